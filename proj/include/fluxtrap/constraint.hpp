#pragma once

#include <string>

#include "fluxtrap/expr.hpp"

namespace fluxtrap {

enum class ConstraintClass { second_class, first_class, undetermined };

inline const char* to_string(ConstraintClass c) {
    switch (c) {
        case ConstraintClass::second_class: return "second_class";
        case ConstraintClass::first_class: return "first_class";
        case ConstraintClass::undetermined: return "undetermined";
    }
    return "?";
}

/// Phase-space relation phi(x, p) imposed as zero.  Generation 1 means
/// it came straight out of a singular Legendre transform; higher
/// generations arise from demanding persistence in time.
struct Constraint {
    Expr expr;
    int generation = 1;
    ConstraintClass cls = ConstraintClass::undetermined;
};

}  // namespace fluxtrap
