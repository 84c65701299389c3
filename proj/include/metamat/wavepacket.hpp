#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "metamat/dispersion.hpp"
#include "metamat/fields.hpp"

namespace metamat {

/// A 1D packet sum_k a(k) exp(i (k x - omega(k) t)) over |k - center_k| < half_width.
struct WavePacketSpec {
    double center_k = 1.0;
    double half_width = 0.02;
    /// Empty means a Gaussian of standard deviation half_width / 3 about center_k.
    std::function<Complex(double)> amplitude;
    std::size_t k_samples = 128;

    void validate() const;
};

struct WavePacketOptions {
    /// Frequency interval selecting one branch of omega(k). Defaults to the
    /// model range, which must then contain exactly one root for every k.
    std::optional<std::pair<double, double>> omega_bracket;
    std::size_t x_samples = 4096;
    std::size_t t_samples = 33;
};

struct WavePacketResult {
    double envelope_velocity = 0.0;
    double phase_velocity = 0.0;
    double center_omega = 0.0;
    /// c / (n + omega dn/domega) at the packet center, for comparison.
    double analytic_group_velocity = 0.0;
    std::vector<double> times;
    std::vector<double> centroids;
};

/// omega(k) on the branch inside the bracket, by bisection.
double branch_omega(const DispersionModel& model, double k_mag, const MediumConstants& medium,
                    std::pair<double, double> bracket);

/// Synthesizes the packet on x in [-line_extent/2, line_extent/2] for
/// t in [0, duration] and fits the intensity-weighted centroid against time.
WavePacketResult simulate_wavepacket(const DispersionModel& model, const WavePacketSpec& spec,
                                     const MediumConstants& medium, double duration,
                                     double line_extent, const WavePacketOptions& options = {});

}  // namespace metamat
