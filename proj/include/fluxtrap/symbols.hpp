#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluxtrap/errors.hpp"

namespace fluxtrap {

enum class SymbolKind { coordinate, momentum, velocity, parameter };

inline const char* to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::coordinate: return "coordinate";
        case SymbolKind::momentum: return "momentum";
        case SymbolKind::velocity: return "velocity";
        case SymbolKind::parameter: return "parameter";
    }
    return "?";
}

/// Lightweight handle into a SymbolTable.  Ordering follows
/// registration order, which also fixes the monomial order.
struct Symbol {
    std::uint32_t index = 0;

    friend bool operator==(Symbol a, Symbol b) { return a.index == b.index; }
    friend bool operator!=(Symbol a, Symbol b) { return a.index != b.index; }
    friend bool operator<(Symbol a, Symbol b) { return a.index < b.index; }
};

/// Append-only registry of symbols.  Names are unique; kinds are fixed
/// at registration.  Registration is not thread-safe, but once a set of
/// symbols is in place all lookups are const and expressions built over
/// the table may be shared freely between threads.
class SymbolTable {
public:
    Symbol register_coordinate(const std::string& name) {
        return add(name, SymbolKind::coordinate, false, std::nullopt);
    }

    Symbol register_momentum(const std::string& name) {
        return add(name, SymbolKind::momentum, false, std::nullopt);
    }

    /// A velocity is always paired with exactly one coordinate.
    Symbol register_velocity(const std::string& name, Symbol coordinate) {
        check_index(coordinate);
        if (kind(coordinate) != SymbolKind::coordinate)
            throw SymbolError("velocity '" + name + "' must pair with a coordinate, got " +
                              std::string(to_string(kind(coordinate))) + " '" +
                              this->name(coordinate) + "'");
        for (const Entry& e : entries_)
            if (e.partner && *e.partner == coordinate.index && e.kind == SymbolKind::velocity)
                throw SymbolError("coordinate '" + this->name(coordinate) +
                                  "' already has a paired velocity");
        return add(name, SymbolKind::velocity, false, coordinate.index);
    }

    Symbol register_parameter(const std::string& name, bool positive = false) {
        return add(name, SymbolKind::parameter, positive, std::nullopt);
    }

    std::optional<Symbol> find(const std::string& name) const {
        for (std::uint32_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name == name) return Symbol{i};
        return std::nullopt;
    }

    Symbol require(const std::string& name) const {
        if (auto s = find(name)) return *s;
        throw SymbolError("unknown symbol '" + name + "'");
    }

    const std::string& name(Symbol s) const {
        check_index(s);
        return entries_[s.index].name;
    }

    SymbolKind kind(Symbol s) const {
        check_index(s);
        return entries_[s.index].kind;
    }

    bool is_positive(Symbol s) const {
        check_index(s);
        return entries_[s.index].positive;
    }

    bool is_phase_symbol(Symbol s) const {
        SymbolKind k = kind(s);
        return k != SymbolKind::parameter;
    }

    std::optional<Symbol> paired_coordinate(Symbol velocity) const {
        check_index(velocity);
        const Entry& e = entries_[velocity.index];
        if (e.kind != SymbolKind::velocity || !e.partner) return std::nullopt;
        return Symbol{*e.partner};
    }

    std::optional<Symbol> velocity_of(Symbol coordinate) const {
        check_index(coordinate);
        for (std::uint32_t i = 0; i < entries_.size(); ++i) {
            const Entry& e = entries_[i];
            if (e.kind == SymbolKind::velocity && e.partner &&
                *e.partner == coordinate.index)
                return Symbol{i};
        }
        return std::nullopt;
    }

    std::size_t size() const { return entries_.size(); }

    /// First free name among `base`, `base_r`, `base_r2`, ...
    std::string fresh_name(const std::string& base) const {
        if (!find(base)) return base;
        if (!find(base + "_r")) return base + "_r";
        for (int i = 2;; ++i) {
            std::string candidate = base + "_r" + std::to_string(i);
            if (!find(candidate)) return candidate;
        }
    }

private:
    struct Entry {
        std::string name;
        SymbolKind kind;
        bool positive;
        std::optional<std::uint32_t> partner;  // velocity -> coordinate
    };

    Symbol add(const std::string& name, SymbolKind k, bool positive,
               std::optional<std::uint32_t> partner) {
        validate_name(name);
        if (find(name))
            throw SymbolError("symbol '" + name + "' already registered");
        entries_.push_back(Entry{name, k, positive, partner});
        return Symbol{static_cast<std::uint32_t>(entries_.size() - 1)};
    }

    static void validate_name(const std::string& name) {
        if (name.empty() || (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_'))
            throw SymbolError("invalid symbol name '" + name + "'");
        for (char c : name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw SymbolError("invalid symbol name '" + name + "'");
    }

    void check_index(Symbol s) const {
        if (s.index >= entries_.size())
            throw SymbolError("symbol handle out of range");
    }

    std::vector<Entry> entries_;
};

using SymbolTablePtr = std::shared_ptr<SymbolTable>;

/// Ordered list of canonical (coordinate, momentum) pairs.  The
/// ordering induces the canonical bracket {q_i, p_j} = delta_ij.
class PhaseSpace {
public:
    PhaseSpace() = default;

    PhaseSpace(const SymbolTable& table,
               std::vector<std::pair<Symbol, Symbol>> pairs)
        : pairs_(std::move(pairs)) {
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            auto [q, p] = pairs_[i];
            if (table.kind(q) != SymbolKind::coordinate)
                throw SymbolError("phase-space pair " + std::to_string(i) +
                                  ": '" + table.name(q) + "' is not a coordinate");
            if (table.kind(p) != SymbolKind::momentum)
                throw SymbolError("phase-space pair " + std::to_string(i) +
                                  ": '" + table.name(p) + "' is not a momentum");
            for (std::size_t j = 0; j < i; ++j)
                if (pairs_[j].first == q || pairs_[j].second == p)
                    throw SymbolError("phase-space pairs are not disjoint");
        }
    }

    std::size_t size() const { return pairs_.size(); }
    Symbol coordinate(std::size_t i) const { return pairs_.at(i).first; }
    Symbol momentum(std::size_t i) const { return pairs_.at(i).second; }

    const std::vector<std::pair<Symbol, Symbol>>& pairs() const { return pairs_; }

private:
    std::vector<std::pair<Symbol, Symbol>> pairs_;
};

}  // namespace fluxtrap
