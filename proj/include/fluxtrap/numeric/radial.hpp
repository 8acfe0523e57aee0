#pragma once

#include <cmath>
#include <vector>

#include "fluxtrap/errors.hpp"
#include "fluxtrap/numeric/tridiag.hpp"

namespace fluxtrap::numeric {

/// Dimensionless trap configuration (hbar = mu = q = c = 1): the flux
/// fraction alpha, the spectator cyclotron frequency and the secular
/// trap frequency.
struct NumericScenario {
    double alpha = 0.0;
    double omega_c = 1.0;
    double omega_p = 0.5;
};

/// Radial mesh for the eigensolver.  The flux line is idealized
/// (solenoid radius -> 0 at fixed flux) so the default domain starts at
/// the origin; `hard_wall` > 0 instead imposes Dirichlet at that radius
/// for finite-solenoid studies.
struct RadialGrid {
    double r_max = 12.0;
    int n_points = 2000;
    double hard_wall = 0.0;
    double richardson_tol = 1e-6;
};

struct RadialResult {
    std::vector<double> energies;
    bool grid_warning = false;
    double richardson_delta = 0.0;
};

/// Closed-form levels of the planar oscillator in a uniform field with
/// the centrifugal index shifted by the flux fraction:
///     E = sqrt(w_p^2 + w_c^2/4) (2n + |m + a| + 1) + (w_c/2)(m + a).
inline double fock_darwin_level(int n, int m, const NumericScenario& s) {
    double nu = std::abs(m + s.alpha);
    double omega_bar = std::sqrt(s.omega_p * s.omega_p +
                                 0.25 * s.omega_c * s.omega_c);
    return omega_bar * (2 * n + nu + 1.0) + 0.5 * s.omega_c * (m + s.alpha);
}

namespace detail {

/// Flux-line discretization.  The exact wavefunction behaves like
/// r^|m+a| at the origin, which for fractional flux is not smooth and
/// would degrade a naive stencil to below second order.  Factoring
/// psi = r^nu phi leaves a smooth phi and the weighted operator
///   -(1/2) (1/w) d/dr (w dphi/dr) + V(r) phi,    w(r) = r^(2 nu + 1),
/// discretized in flux form on cell centers r_j = (j + 1/2) h.  The
/// weight vanishes at the origin face, so no ghost point is needed and
/// the centrifugal index enters only through w.  Symmetrized by the
/// sqrt(w) similarity.
inline std::vector<double> radial_eigenvalues_flux_line(const NumericScenario& s,
                                                        int m, double r_max,
                                                        int n_cells) {
    const double h = r_max / n_cells;
    const double nu_signed = m + s.alpha;
    const double nu = std::abs(nu_signed);
    const double omega2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;
    const double weight_pow = 2.0 * nu + 1.0;

    std::vector<double> diag(n_cells), off(n_cells - 1);
    std::vector<double> w_center(n_cells), w_face(n_cells + 1);
    for (int j = 0; j < n_cells; ++j)
        w_center[j] = std::pow((j + 0.5) * h, weight_pow);
    for (int j = 0; j <= n_cells; ++j)
        w_face[j] = std::pow(j * h, weight_pow);

    for (int j = 0; j < n_cells; ++j) {
        double r = (j + 0.5) * h;
        double v = 0.5 * s.omega_c * nu_signed + 0.5 * omega2 * r * r;
        double lo = w_face[j] / (2.0 * w_center[j] * h * h);
        double hi = w_face[j + 1] / (2.0 * w_center[j] * h * h);
        double d = v + hi + lo;
        if (j == n_cells - 1) d += hi;  // Dirichlet mirror at r_max
        diag[j] = d;
        if (j + 1 < n_cells)
            off[j] = -w_face[j + 1] /
                     (2.0 * h * h * std::sqrt(w_center[j] * w_center[j + 1]));
    }
    return tridiag_eigenvalues(std::move(diag), std::move(off));
}

/// Hard-wall discretization on [a, r_max]: the origin is outside the
/// domain, so the centrifugal term is kept explicitly and the flux form
/// of the plain radial Laplacian (weight r) applies, with Dirichlet
/// mirrors at both walls.
inline std::vector<double> radial_eigenvalues_walled(const NumericScenario& s,
                                                     int m, double r_min,
                                                     double r_max, int n_cells) {
    const double h = (r_max - r_min) / n_cells;
    const double nu = m + s.alpha;
    const double omega2 = s.omega_p * s.omega_p + 0.25 * s.omega_c * s.omega_c;

    std::vector<double> diag(n_cells), off(n_cells - 1);
    for (int j = 0; j < n_cells; ++j) {
        double r = r_min + (j + 0.5) * h;
        double face_lo = r_min + j * h;
        double face_hi = r_min + (j + 1) * h;
        double v = nu * nu / (2.0 * r * r) + 0.5 * s.omega_c * nu +
                   0.5 * omega2 * r * r;
        double lo = face_lo / (2.0 * r * h * h);
        double hi = face_hi / (2.0 * r * h * h);
        double d = v + hi + lo;
        if (j == 0) d += lo;
        if (j == n_cells - 1) d += hi;
        diag[j] = d;
        if (j + 1 < n_cells) {
            double r_next = r_min + (j + 1.5) * h;
            off[j] = -face_hi / (2.0 * h * h * std::sqrt(r * r_next));
        }
    }
    return tridiag_eigenvalues(std::move(diag), std::move(off));
}

inline std::vector<double> radial_eigenvalues(const NumericScenario& s, int m,
                                              double r_min, double r_max,
                                              int n_cells) {
    if (r_min > 0.0)
        return radial_eigenvalues_walled(s, m, r_min, r_max, n_cells);
    return radial_eigenvalues_flux_line(s, m, r_max, n_cells);
}

}  // namespace detail

/// Lowest k levels of the radial operator in the angular-momentum
/// sector m, with a Richardson half-grid consistency check.
inline RadialResult radial_spectrum(const NumericScenario& s, int m,
                                    const RadialGrid& grid, int k_levels) {
    if (k_levels < 1) throw NumericError("k_levels must be at least 1");
    if (s.omega_p <= 0.0) throw NumericError("omega_p must be positive");
    if (grid.n_points < 200)
        throw NumericError("grid too coarse: need at least 200 points");
    double omega_bar = std::sqrt(s.omega_p * s.omega_p +
                                 0.25 * s.omega_c * s.omega_c);
    double char_len = std::sqrt((std::abs(m + s.alpha) + 1.0) / omega_bar);
    if (grid.r_max < 8.0 * char_len)
        throw NumericError("r_max below 8 characteristic lengths (" +
                           std::to_string(8.0 * char_len) + ")");
    double r_min = grid.hard_wall > 0.0 ? grid.hard_wall : 0.0;
    if (r_min >= grid.r_max) throw NumericError("hard wall beyond r_max");

    auto fine = detail::radial_eigenvalues(s, m, r_min, grid.r_max,
                                           grid.n_points);
    auto coarse = detail::radial_eigenvalues(s, m, r_min, grid.r_max,
                                             grid.n_points / 2);

    RadialResult out;
    out.energies.assign(fine.begin(), fine.begin() + k_levels);
    for (int k = 0; k < k_levels; ++k) {
        double richardson = (4.0 * fine[k] - coarse[k]) / 3.0;
        double delta = std::abs(fine[k] - richardson) /
                       std::max(1.0, std::abs(richardson));
        out.richardson_delta = std::max(out.richardson_delta, delta);
    }
    out.grid_warning = out.richardson_delta > grid.richardson_tol;
    return out;
}

}  // namespace fluxtrap::numeric
