#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fluxtrap/errors.hpp"

namespace fluxtrap::numeric {

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL
/// iteration with Wilkinson shifts (EISPACK tql1 lineage).  `diag` has
/// n entries, `off` the n-1 subdiagonal couplings.  Returns the
/// eigenvalues sorted ascending.
inline std::vector<double> tridiag_eigenvalues(std::vector<double> diag,
                                               std::vector<double> off) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (off.size() + 1 != n)
        throw NumericError("tridiagonal sizes are inconsistent");
    off.push_back(0.0);

    for (std::size_t l = 0; l < n; ++l) {
        int iterations = 0;
        while (true) {
            std::size_t m = l;
            while (m + 1 < n) {
                double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
                ++m;
            }
            if (m == l) break;
            if (++iterations > 60)
                throw NumericError("tridiagonal QL did not converge");

            double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            double r = std::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * off[i];
                double b = c * off[i];
                r = std::hypot(f, g);
                off[i + 1] = r;
                if (r == 0.0) {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    std::sort(diag.begin(), diag.end());
    return diag;
}

}  // namespace fluxtrap::numeric
