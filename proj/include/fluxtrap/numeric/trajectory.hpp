#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fluxtrap/errors.hpp"
#include "fluxtrap/numeric/radial.hpp"

namespace fluxtrap::numeric {

struct TrajectoryState {
    double x1 = 0.0, x2 = 0.0;
    double v1 = 0.0, v2 = 0.0;
    double time = 0.0;
};

struct TrajectoryResult {
    std::vector<TrajectoryState> samples;
    double energy_drift = 0.0;  // max relative deviation over the run
    double jz_drift = 0.0;
    double speed_drift = 0.0;
};

/// Total energy in trap units; the flux line exerts no classical force
/// outside the solenoid, so only the spectator field and the secular
/// potential enter.
inline double trajectory_energy(const NumericScenario& s, const TrajectoryState& st) {
    double v2 = st.v1 * st.v1 + st.v2 * st.v2;
    double r2 = st.x1 * st.x1 + st.x2 * st.x2;
    return 0.5 * v2 + 0.5 * s.omega_p * s.omega_p * r2;
}

/// Canonical angular momentum: mechanical part plus the spectator
/// diamagnetic term plus the constant flux contribution alpha.
inline double canonical_jz(const NumericScenario& s, const TrajectoryState& st) {
    double r2 = st.x1 * st.x1 + st.x2 * st.x2;
    return (st.x1 * st.v2 - st.x2 * st.v1) + 0.5 * s.omega_c * r2 + s.alpha;
}

/// Strang splitting of the Lorentz-force dynamics: half electrostatic
/// kick, exact cyclotron rotation-drift, half kick.  The rotation step
/// is the closed-form solution of the magnetic sub-flow, so
/// magnetic-force energy conservation is exact to roundoff and plain
/// leapfrog's issues with the velocity-dependent force never arise.
inline TrajectoryResult integrate_trajectory(const NumericScenario& s,
                                             TrajectoryState initial, double dt,
                                             std::int64_t steps,
                                             std::int64_t sample_stride = 0) {
    double omega_max = std::max(std::abs(s.omega_c), std::abs(s.omega_p));
    if (dt <= 0.0 || dt * omega_max >= 0.05)
        throw NumericError("time step too large: require dt*max(omega) < 0.05");
    if (steps < 1) throw NumericError("need at least one step");

    const double wp2 = s.omega_p * s.omega_p;
    const double theta = s.omega_c * dt;
    const double c = std::cos(theta), sn = std::sin(theta);
    const bool rotating = s.omega_c != 0.0;
    // drift matrix for the exact cyclotron arc: x += R_int(theta) v
    const double a11 = rotating ? sn / s.omega_c : dt;
    const double a12 = rotating ? (1.0 - c) / s.omega_c : 0.0;

    TrajectoryResult out;
    TrajectoryState st = initial;
    const double e0 = trajectory_energy(s, st);
    const double j0 = canonical_jz(s, st);
    const double speed0 = std::hypot(st.v1, st.v2);
    auto scale = [](double x) { return std::max(1.0, std::abs(x)); };

    if (sample_stride > 0) out.samples.push_back(st);
    for (std::int64_t step = 0; step < steps; ++step) {
        st.v1 -= 0.5 * dt * wp2 * st.x1;
        st.v2 -= 0.5 * dt * wp2 * st.x2;

        double v1 = c * st.v1 + sn * st.v2;
        double v2 = -sn * st.v1 + c * st.v2;
        st.x1 += a11 * st.v1 + a12 * st.v2;
        st.x2 += -a12 * st.v1 + a11 * st.v2;
        st.v1 = v1;
        st.v2 = v2;

        st.v1 -= 0.5 * dt * wp2 * st.x1;
        st.v2 -= 0.5 * dt * wp2 * st.x2;
        st.time = initial.time + (step + 1) * dt;

        if (!std::isfinite(st.x1) || !std::isfinite(st.x2) ||
            !std::isfinite(st.v1) || !std::isfinite(st.v2))
            throw NumericError("trajectory integration produced non-finite values");

        double de = std::abs(trajectory_energy(s, st) - e0) / scale(e0);
        double dj = std::abs(canonical_jz(s, st) - j0) / scale(j0);
        double dv = std::abs(std::hypot(st.v1, st.v2) - speed0) / scale(speed0);
        out.energy_drift = std::max(out.energy_drift, de);
        out.jz_drift = std::max(out.jz_drift, dj);
        out.speed_drift = std::max(out.speed_drift, dv);
        if (out.energy_drift > 1e-3)
            throw NumericError("integration unstable: relative energy drift " +
                               std::to_string(out.energy_drift));

        if (sample_stride > 0 && (step + 1) % sample_stride == 0)
            out.samples.push_back(st);
    }
    if (sample_stride <= 0) out.samples.push_back(st);
    return out;
}

}  // namespace fluxtrap::numeric
