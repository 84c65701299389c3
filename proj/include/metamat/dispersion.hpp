#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "metamat/fields.hpp"
#include "metamat/monotone_cubic.hpp"

namespace metamat {

inline constexpr double kDefaultAbsorptionThreshold = 0.1;
inline constexpr double kRootRelativeTolerance = 1e-10;
inline constexpr double kGroupVelocitySingularity = 1e-8;

/// n(omega) tabulated on strictly increasing samples; real and imaginary
/// parts are interpolated separately with monotone cubics.
struct TabulatedRefraction {
    std::vector<double> omega;
    std::vector<Complex> n;
    MonotoneCubic re;
    MonotoneCubic im;
};

/// n(omega) = 1 / (1 + c omega^2), c > 0.
struct InverseQuadraticRefraction {
    double c_param = 1.0;
};

/// Refraction coefficient n(omega) at a fixed point of the domain.
class DispersionModel {
public:
    static DispersionModel tabulated(std::vector<double> omega, std::vector<Complex> n);
    static DispersionModel inverse_quadratic(double c_param);
    /// Constant n over [omega_lo, omega_hi], stored as a two-sample table.
    static DispersionModel constant(Complex n, double omega_lo, double omega_hi);

    Complex n(double omega) const;
    double n_re(double omega) const { return n(omega).real(); }

    /// Closed interval of admissible omega. The upper bound is +inf for the
    /// analytic model.
    std::pair<double, double> range() const;
    bool contains(double omega) const;

    bool has_closed_form_derivative() const;
    /// d(Re n)/d omega from the analytic formula; throws for tabulated models.
    double closed_form_derivative(double omega) const;

    std::string kind() const;
    const std::variant<TabulatedRefraction, InverseQuadraticRefraction>& impl() const {
        return impl_;
    }

private:
    explicit DispersionModel(std::variant<TabulatedRefraction, InverseQuadraticRefraction> impl)
        : impl_(std::move(impl)) {}

    std::variant<TabulatedRefraction, InverseQuadraticRefraction> impl_;
};

enum class DerivativeMethod { automatic, closed_form, finite_difference };

/// Central-difference step used for d(Re n)/d omega.
double finite_difference_step(double omega);

struct RefractionDerivative {
    double value = 0.0;
    bool closed_form = false;
    /// True when the central stencil did not fit inside the model range.
    bool one_sided = false;
};

RefractionDerivative refraction_derivative(const DispersionModel& model, double omega,
                                           DerivativeMethod method = DerivativeMethod::automatic);

struct CriterionResult {
    double omega = 0.0;
    double n_re = 0.0;
    double dn_domega = 0.0;
    /// (omega / Re n) d(Re n)/d omega
    double value = 0.0;
    bool holds = false;
    bool one_sided = false;
};

/// Negative refraction holds when (omega/n) dn/domega < -1.
CriterionResult negative_refraction_criterion(
    const DispersionModel& model, double omega,
    DerivativeMethod method = DerivativeMethod::automatic);

struct BandCriterion {
    bool all_hold = true;
    std::vector<CriterionResult> table;
};

BandCriterion band_criterion(const DispersionModel& model, const FrequencyGrid& band,
                             DerivativeMethod method = DerivativeMethod::automatic);

/// Principal square root (Re n >= 0). Throws on the negative real axis where
/// the branch is ambiguous.
Complex principal_refraction(Complex nsq);

struct AbsorptionSample {
    Complex n;
    double ratio = 0.0;  // L |Im n|
    bool pass = true;
};

std::vector<AbsorptionSample> absorption_check(std::span<const Complex> nsq, double L,
                                               double threshold = kDefaultAbsorptionThreshold);

/// Sampling used to bracket roots of omega n(omega) - |k| c.
struct RootScan {
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    std::size_t samples = 0;
    bool log_spacing = false;
};

RootScan default_root_scan(const DispersionModel& model);

/// All positive roots of omega Re n(omega) = |k| c inside the scan, ascending.
std::vector<double> solve_dispersion(const DispersionModel& model, double k_mag,
                                     const MediumConstants& medium,
                                     const std::optional<RootScan>& scan = std::nullopt);

struct VelocityResult {
    Vec3 v_p{};
    Vec3 v_g{};
    Vec3 k0{};
    double omega = 0.0;
    /// n + omega dn/domega; v_g = c / group_denominator * k0
    double group_denominator = 0.0;
};

VelocityResult group_velocity(const DispersionModel& model, double omega, const Vec3& k0,
                              const MediumConstants& medium,
                              DerivativeMethod method = DerivativeMethod::automatic);

struct DispersionReportRow {
    double omega = 0.0;
    double n_re = 0.0;
    double n_im = 0.0;
    double dn_domega = 0.0;
    double criterion_value = 0.0;
    bool criterion_holds = false;
    double absorption_ratio = 0.0;
};

std::vector<DispersionReportRow> dispersion_report(
    const DispersionModel& model, const FrequencyGrid& band, double L,
    DerivativeMethod method = DerivativeMethod::automatic);

nlohmann::json to_json(const DispersionReportRow& row);

}  // namespace metamat
