#pragma once

#include <optional>
#include <vector>

#include "fluxtrap/dirac.hpp"
#include "fluxtrap/mechanics.hpp"

namespace fluxtrap {

/// Harmonic form p^2/(2 m*) + 1/2 m* w*^2 x^2 + offset of a reduced
/// Hamiltonian, with the effective mass and frequency positive under
/// the declared parameter positivity.
struct OscillatorForm {
    Expr effective_mass;
    Expr effective_frequency;
    Expr zero_point_offset;
};

struct SpectrumLevel {
    std::vector<int> quantum_numbers;
    std::optional<Expr> energy;
    std::optional<double> value;
};

struct Spectrum {
    enum class Kind { oscillator, landau, radial_numeric };
    Kind kind = Kind::oscillator;
    std::vector<SpectrumLevel> levels;
};

inline const char* to_string(Spectrum::Kind k) {
    switch (k) {
        case Spectrum::Kind::oscillator: return "oscillator";
        case Spectrum::Kind::landau: return "landau";
        case Spectrum::Kind::radial_numeric: return "radial_numeric";
    }
    return "?";
}

/// J = fractional_offset + ladder_coefficient * (N + number_offset).
/// The fractional offset is the flux-induced part; the total zero-point
/// value keeps it separate from the ladder half-quantum.
struct AngularMomentumResult {
    Expr fractional_offset;
    Expr ladder_coefficient;
    Expr number_offset;
    Expr zero_point;
};

namespace detail {

struct QuadraticForm {
    Expr p2, x2, p1, x1, constant;  // coefficients by monomial in (x, p)
};

inline QuadraticForm split_quadratic(const Expr& h, Symbol x, Symbol p) {
    const SymbolTablePtr& t = h.table();
    QuadraticForm q{Expr::zero(t), Expr::zero(t), Expr::zero(t), Expr::zero(t),
                    Expr::zero(t)};
    for (auto& [key, coeff] : collect(h, {x, p})) {
        if (key[0] + key[1] > 2)
            throw QuantizeError("Hamiltonian is not quadratic in the canonical pair");
        if (key[0] == 1 && key[1] == 1)
            throw QuantizeError("cross term x*p remains after completing the square");
        if (key == ExponentKey{0, 2})
            q.p2 = coeff;
        else if (key == ExponentKey{2, 0})
            q.x2 = coeff;
        else if (key == ExponentKey{0, 1})
            q.p1 = coeff;
        else if (key == ExponentKey{1, 0})
            q.x1 = coeff;
        else
            q.constant = coeff;
    }
    return q;
}

}  // namespace detail

/// Read (m*, w*, offset) off a reduced Hamiltonian.  Linear terms are
/// absorbed by completing the square (they only shift the center);
/// cross terms and non-quadratic parts are out of class.
inline OscillatorForm recognize_oscillator(const ReducedCanonicalSystem& sys) {
    const Expr& h = sys.reduced_hamiltonian;
    const SymbolTablePtr& t = h.table();
    const CanonicalPair& pair = sys.independent_pairs.at(0);
    auto q = detail::split_quadratic(h, pair.position, pair.momentum);

    if (q.p2.is_zero() || q.x2.is_zero())
        throw QuantizeError("reduced Hamiltonian is missing a squared term");
    if (!q.p2.is_parameter_only() || !q.x2.is_parameter_only())
        throw QuantizeError("quadratic coefficients are not parameter-only");
    if (!is_positive_under_assumptions(q.p2) || !is_positive_under_assumptions(q.x2))
        throw QuantizeError("quadratic coefficients are not positive under the "
                            "declared parameter assumptions");

    Expr two = Expr::integer(t, 2);
    Expr mass = Expr::one(t) / (two * q.p2);
    auto freq = sqrt_exact(Expr::integer(t, 4) * q.p2 * q.x2);
    if (!freq)
        throw QuantizeError("effective frequency is not an exact parameter root of "
                            + to_string(Expr::integer(t, 4) * q.p2 * q.x2));

    Expr four = Expr::integer(t, 4);
    Expr offset = q.constant;
    if (!q.x1.is_zero()) offset = offset - q.x1 * q.x1 / (four * q.x2);
    if (!q.p1.is_zero()) offset = offset - q.p1 * q.p1 / (four * q.p2);
    return OscillatorForm{mass, *freq, offset};
}

/// E_n = hbar w* (n + 1/2) + offset, exact, for n = 0..n_max.
inline Spectrum oscillator_spectrum(const OscillatorForm& osc, int n_max,
                                    Symbol hbar) {
    if (n_max < 0) throw QuantizeError("n_max must be nonnegative");
    const SymbolTablePtr& t = osc.effective_frequency.table();
    Expr hb = Expr::symbol(t, hbar);
    Spectrum s{Spectrum::Kind::oscillator, {}};
    for (int n = 0; n <= n_max; ++n) {
        Expr quantum = Expr::rational(t, make_rat(2 * n + 1, 2));
        s.levels.push_back(SpectrumLevel{
            {n}, hb * osc.effective_frequency * quantum + osc.zero_point_offset,
            std::nullopt});
    }
    return s;
}

/// Rewrite the angular momentum over the reduced system in ladder form.
/// The elimination map turns J into (fractional offset) + (quadratic
/// form); the quadratic part must be proportional to the oscillator's,
/// so its normal-ordered rewrite with [A, A+] = 1 has no squeeze term
/// and J = offset + ladder * (N + 1/2).
inline AngularMomentumResult angular_momentum_reduce(const Expr& j,
                                                     const ReducedCanonicalSystem& sys,
                                                     const OscillatorForm& osc,
                                                     Symbol hbar) {
    const SymbolTablePtr& t = j.table();
    const CanonicalPair& pair = sys.independent_pairs.at(0);
    Expr jr = express_in_pair(j, sys);
    auto q = detail::split_quadratic(jr, pair.position, pair.momentum);

    if (!q.p1.is_zero() || !q.x1.is_zero())
        throw QuantizeError("angular momentum has linear canonical terms; no "
                            "ladder decomposition exists");
    if (!q.constant.is_parameter_only())
        throw QuantizeError("angular momentum offset is not parameter-only");

    Expr hb = Expr::symbol(t, hbar);
    Expr two = Expr::integer(t, 2);
    Expr mw = osc.effective_mass * osc.effective_frequency;
    // alpha p^2 + beta x^2 -> s (2N + 1) + squeeze (A^2 + A+^2)
    Expr s_coeff = q.p2 * hb * mw / two + q.x2 * hb / (two * mw);
    Expr squeeze = q.x2 * hb / (two * mw) - q.p2 * hb * mw / two;
    if (!squeeze.is_zero())
        throw QuantizeError(
            "quadratic part is not proportional to the oscillator Hamiltonian "
            "(squeeze coefficient " + to_string(squeeze) + ")");

    Expr half = Expr::rational(t, make_rat(1, 2));
    return AngularMomentumResult{q.constant, two * s_coeff, half,
                                 q.constant + s_coeff};
}

/// Spectrum of the kinetic energy (K1^2 + K2^2)/(2 mu) when the
/// mechanical momenta close on a nonzero parameter, via the canonical
/// pair Q = K1/c0, Pi = K2: an oscillator of mass mu and frequency
/// c0/mu.  Commuting momenta mean a free-particle-like continuous
/// spectrum and are rejected.
inline Spectrum landau_levels(const MechanicalMomenta& momenta, int n_max,
                              Symbol hbar) {
    if (momenta.components.size() != 2)
        throw QuantizeError("landau_levels expects two mechanical momenta");
    Expr c0 = momenta.bracket_matrix[0][1];
    if (c0.is_zero())
        throw CommutingMomentaError(
            "mechanical momenta commute: the kinetic energy has a continuous "
            "spectrum and no discrete levels exist");
    if (!c0.is_parameter_only())
        throw QuantizeError("mechanical-momenta bracket is not a parameter: " +
                            to_string(c0));
    Expr freq = c0 / momenta.mass;
    if (!is_positive_under_assumptions(freq)) {
        if (is_positive_under_assumptions(-freq))
            freq = -freq;
        else
            throw QuantizeError("cyclotron frequency has indefinite sign: " +
                                to_string(freq));
    }
    const SymbolTablePtr& t = c0.table();
    OscillatorForm equivalent{momenta.mass, freq, Expr::zero(t)};
    Spectrum s = oscillator_spectrum(equivalent, n_max, hbar);
    s.kind = Spectrum::Kind::landau;
    return s;
}

}  // namespace fluxtrap
