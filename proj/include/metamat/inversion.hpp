#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "metamat/fields.hpp"

namespace metamat {

inline constexpr double kDefaultRhoTarget = 0.5;
/// Smallest admissible value of rho^2 - 2 rho cos(psi) + 1.
inline constexpr double kSingularityGuard = 1e-8;
/// Back-substitution acceptance: |forward_p(h, N) - p| <= tol * (1 + |p|).
inline constexpr double kRoundTripTolerance = 1e-10;

/// p = R (cos psi + i sin psi), psi in (-pi, pi]; psi = 0 when R = 0.
struct PolarForm {
    double R = 0.0;
    double psi = 0.0;
};

/// The (rho, r, phi) parameterization of one sample. 1 + h = r e^{i phi}.
struct InversionIntermediate {
    double rho = 0.0;
    double r = 1.0;
    double sin_phi = 0.0;
    double cos_phi = 1.0;
    double phi = 0.0;
};

/// p = (omega/c)^2 (n0^2 - n^2), sample by sample.
SampledField compute_p(const SampledField& n0sq, const SampledField& nsq,
                       const MediumConstants& medium);

PolarForm polar_decompose(Complex p);

/// N(x) = max_omega |p(x, omega)| / (4 pi rho_target), so that rho <= rho_target.
DensityField choose_density(const SampledField& p, double rho_target = kDefaultRhoTarget);

/// rho = R / (4 pi N); zero when R = 0.
double density_ratio(double R, double N);

InversionIntermediate solve_intermediate(Complex p, double N);

/// Impedance function h with 4 pi N h / (1 + h) = p.
Complex solve_h(Complex p, double N);

/// 4 pi N h / (1 + h).
Complex forward_p(Complex h, double N);

/// Residuals of the real/imaginary component equations, evaluated from
/// (h1, h2, N) without complex division. Each is relative to R = |p| (absolute when p = 0).
struct ComponentResidual {
    double real_part = 0.0;
    double imag_part = 0.0;
};
ComponentResidual component_residual(Complex p, Complex h, double N);

struct SampleDiagnostics {
    double rho = 0.0;
    double residual = 0.0;
};

struct DesignReport {
    std::size_t voxel_count = 0;
    std::size_t freq_count = 0;
    /// Voxel-major, frequency-minor, like SampledField.
    std::vector<SampleDiagnostics> samples;
    double max_residual = 0.0;
    /// max over samples of residual / (1 + |p|)
    double max_scaled_residual = 0.0;
    double max_rho = 0.0;
    bool residuals_pass = true;
};

struct MaterialPlanFields {
    SampledField h;
    DensityField N;
    double rho_max_used = 0.0;
};

struct MaterialDesign {
    SampledField p;
    MaterialPlanFields plan;
    DesignReport report;
};

/// compute_p -> choose_density (or validate a supplied density) -> solve_h.
/// Rejects any sample with Im p > 0.
MaterialDesign design_material(const SampledField& n0sq, const SampledField& nsq,
                               const MediumConstants& medium,
                               double rho_target = kDefaultRhoTarget,
                               const std::optional<DensityField>& density = std::nullopt);

/// Same as design_material but starting from p directly.
MaterialDesign design_from_p(SampledField p, double rho_target = kDefaultRhoTarget,
                             const std::optional<DensityField>& density = std::nullopt);

}  // namespace metamat
