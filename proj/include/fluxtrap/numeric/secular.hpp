#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fluxtrap/errors.hpp"

namespace fluxtrap::numeric {

namespace detail {

/// Power of the Hann-windowed series at angular frequency omega
/// (sample spacing dt).  Direct phasor-rotation accumulation: the
/// Goertzel recurrence is ill-conditioned at near-DC normalized
/// frequencies over millions of samples, while the rotating-phasor sum
/// only drifts by ~n*eps.
inline double windowed_power(const std::vector<double>& windowed, double omega,
                             double dt) {
    const double c = std::cos(omega * dt), s = std::sin(omega * dt);
    double pr = 1.0, pi = 0.0;  // e^{-i omega t_j}
    double sum_r = 0.0, sum_i = 0.0;
    for (double x : windowed) {
        sum_r += x * pr;
        sum_i += x * pi;
        double nr = pr * c + pi * s;
        pi = pi * c - pr * s;
        pr = nr;
    }
    return sum_r * sum_r + sum_i * sum_i;
}

}  // namespace detail

struct SecularOptions {
    int steps_per_drive_period = 256;
    int coarse_decimation = 64;
};

/// Secular frequency of the driven radial motion.  Integrates
///     x'' = (q V / (2 m d^2)) cos(W t) x
/// (the in-plane equation of the oscillating quadrupole), averages each
/// drive period to suppress the micromotion bands, and returns the
/// dominant sub-drive spectral peak of x(t), refined by maximizing the
/// Hann-windowed power over a continuous frequency.
///
/// Preconditions: drive/Omega >= 20 with Omega = sqrt(sqrt(2) q V / (m d^2)),
/// and duration of at least 20 predicted secular periods.
inline double secular_frequency(double v_amp, double d, double drive_freq,
                                double mu, double charge, double duration,
                                const SecularOptions& opt = {}) {
    if (v_amp <= 0 || d <= 0 || drive_freq <= 0 || mu <= 0 || charge <= 0)
        throw NumericError("secular_frequency: all physical inputs must be positive");
    const double omega = std::sqrt(std::sqrt(2.0) * charge * v_amp / (mu * d * d));
    if (drive_freq < 20.0 * omega)
        throw NumericError("drive frequency must dominate: drive/Omega >= 20");
    const double omega_pred = omega * omega / (4.0 * drive_freq);
    const double secular_period = 2.0 * M_PI / omega_pred;
    if (duration < 20.0 * secular_period)
        throw NumericError("duration under 20 secular periods; the peak cannot "
                           "be resolved");

    const double drive_period = 2.0 * M_PI / drive_freq;
    const int steps_per_period = opt.steps_per_drive_period;
    const double dt = drive_period / steps_per_period;
    const double k = charge * v_amp / (2.0 * mu * d * d);
    const auto n_periods = static_cast<std::int64_t>(duration / drive_period);

    // RK4 on (x, v); one drive-period boxcar average of both x and v
    // per emitted sample.  The drive factor is exactly periodic over a
    // period, so the cosine values at the half-step grid are tabulated
    // once.
    std::vector<double> drive(2 * static_cast<std::size_t>(steps_per_period) + 1);
    for (std::size_t j = 0; j < drive.size(); ++j)
        drive[j] = k * std::cos(drive_freq * (0.5 * dt * j));
    std::vector<double> samples, samples_v;
    samples.reserve(static_cast<std::size_t>(n_periods));
    samples_v.reserve(static_cast<std::size_t>(n_periods));
    double x = 1.0, v = 0.0;
    for (std::int64_t period = 0; period < n_periods; ++period) {
        double acc = 0.0, acc_v = 0.0;
        for (int step = 0; step < steps_per_period; ++step) {
            acc += x;
            acc_v += v;
            double f0 = drive[2 * step], f1 = drive[2 * step + 1],
                   f2 = drive[2 * step + 2];
            double k1x = v, k1v = f0 * x;
            double k2x = v + 0.5 * dt * k1v, k2v = f1 * (x + 0.5 * dt * k1x);
            double k3x = v + 0.5 * dt * k2v, k3v = f1 * (x + 0.5 * dt * k2x);
            double k4x = v + dt * k3v, k4v = f2 * (x + dt * k3x);
            x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        if (!std::isfinite(x) || std::abs(x) > 1e6)
            throw NumericError("driven integration left the stability region");
        samples.push_back(acc / steps_per_period);
        samples_v.push_back(acc_v / steps_per_period);
    }

    const std::size_t n = samples.size();
    std::vector<double> windowed(n);
    for (std::size_t i = 0; i < n; ++i) {
        double hann = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
        windowed[i] = samples[i] * hann;
    }

    // Stage 1: coarse scan on a decimated copy to locate the dominant
    // sub-drive peak.
    std::vector<double> coarse;
    for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(opt.coarse_decimation))
        coarse.push_back(windowed[i]);
    const double dt_coarse = drive_period * opt.coarse_decimation;
    const double omega_nyquist = M_PI / dt_coarse;
    const int n_bins = 4096;
    double best_omega = 0.0, best_power = -1.0;
    for (int b = 1; b < n_bins; ++b) {
        double w = omega_nyquist * b / n_bins;
        double p = detail::windowed_power(coarse, w, dt_coarse);
        if (p > best_power) {
            best_power = p;
            best_omega = w;
        }
    }

    // Stage 2: medium scan on the full series.  A coarse bin can span
    // several window side-lobes, so the bracket must be narrowed to the
    // main lobe before a unimodal refinement is trustworthy.
    const double coarse_bin = omega_nyquist / n_bins;
    double med_lo = std::max(best_omega - 2.0 * coarse_bin, coarse_bin * 1e-3);
    double med_hi = best_omega + 2.0 * coarse_bin;
    const int med_points = 128;
    double med_step = (med_hi - med_lo) / med_points;
    best_power = -1.0;
    for (int b = 0; b <= med_points; ++b) {
        double w = med_lo + b * med_step;
        double p = detail::windowed_power(windowed, w, drive_period);
        if (p > best_power) {
            best_power = p;
            best_omega = w;
        }
    }

    // Stage 3: phase-slope refinement.  The magnitude peak is flat to
    // roundoff over ~1e-8 relative, so the last digits come from the
    // phase drift of the demodulated analytic signal
    //     u(t) = (x - i v / w^) exp(-i w^ t)
    // built with the integrator's own velocity samples.  The quadrature
    // suppresses the negative-frequency image of the real signal by
    // ~(w0 - w^)/(2 w^), the block average of length ~pi/w^ nulls what
    // is left, and the unwrapped block phases are fit linearly.
    const double w_hat = best_omega;
    const auto block = static_cast<std::size_t>(
        std::max(1.0, std::round(M_PI / (w_hat * drive_period))));
    const std::size_t n_blocks = n / block;
    if (n_blocks >= 8) {
        const double c = std::cos(w_hat * drive_period);
        const double s = std::sin(w_hat * drive_period);
        double pr = 1.0, pi_ = 0.0;
        std::vector<double> phase;
        std::vector<double> tc;
        std::size_t k = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            double zr = 0.0, zi = 0.0;
            for (std::size_t j = 0; j < block; ++j, ++k) {
                // (x - i v/w^) * (pr + i pi)
                double ur = samples[k];
                double ui = -samples_v[k] / w_hat;
                zr += ur * pr - ui * pi_;
                zi += ur * pi_ + ui * pr;
                double nr = pr * c + pi_ * s;
                pi_ = pi_ * c - pr * s;
                pr = nr;
            }
            phase.push_back(std::atan2(zi, zr));
            tc.push_back((b + 0.5) * block * drive_period);
        }
        double prev = phase[1], offset = 0.0;
        double t0 = tc[n_blocks / 2];
        double sum_t = 0, sum_p = 0, sum_tt = 0, sum_tp = 0;
        std::size_t used = 0;
        for (std::size_t b = 1; b + 1 < n_blocks; ++b) {
            double p = phase[b] + offset;
            while (p - prev > M_PI) { p -= 2.0 * M_PI; offset -= 2.0 * M_PI; }
            while (p - prev < -M_PI) { p += 2.0 * M_PI; offset += 2.0 * M_PI; }
            prev = p;
            double t = tc[b] - t0;
            sum_t += t;
            sum_p += p;
            sum_tt += t * t;
            sum_tp += t * p;
            ++used;
        }
        double denom = used * sum_tt - sum_t * sum_t;
        if (denom > 0.0) {
            double slope = (used * sum_tp - sum_t * sum_p) / denom;
            double refined = w_hat + slope;
            if (refined > 0.0 && std::abs(refined - w_hat) < med_step)
                return refined;
        }
    }
    return best_omega;
}

}  // namespace fluxtrap::numeric
