#include "metamat/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "metamat/error.hpp"

namespace metamat {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

std::string sample_locator(const SampledField& f, std::size_t voxel, std::size_t freq) {
    std::ostringstream os;
    os << "voxel " << voxel << ", frequency index " << freq << " (omega = " << f.freqs.samples[freq]
       << ")";
    return os.str();
}

}  // namespace

SampledField compute_p(const SampledField& n0sq, const SampledField& nsq,
                       const MediumConstants& medium) {
    medium.validate();
    n0sq.validate();
    nsq.validate();
    require_same_support(n0sq, nsq);

    SampledField p(n0sq.grid, n0sq.freqs);
    const std::size_t nf = p.freqs.size();
    for (std::size_t v = 0; v < p.grid.voxel_count(); ++v) {
        for (std::size_t f = 0; f < nf; ++f) {
            const double k = p.freqs.samples[f] / medium.c;
            p.at(v, f) = k * k * (n0sq.at(v, f) - nsq.at(v, f));
        }
    }
    return p;
}

PolarForm polar_decompose(Complex p) {
    const double R = std::abs(p);
    if (R == 0.0) return {};
    double psi = std::arg(p);
    // arg(-x - 0i) is -pi; keep the half-open range (-pi, pi].
    if (psi <= -std::numbers::pi) psi = std::numbers::pi;
    return {R, psi};
}

DensityField choose_density(const SampledField& p, double rho_target) {
    if (!(rho_target > 0.0 && rho_target < 1.0))
        throw Error("rho_target must lie in (0, 1)");
    DensityField density(p.grid);
    for (std::size_t v = 0; v < p.grid.voxel_count(); ++v) {
        double sup_R = 0.0;
        for (const Complex& s : p.voxel_samples(v)) sup_R = std::max(sup_R, std::abs(s));
        density.values[v] = sup_R / (kFourPi * rho_target);
    }
    return density;
}

double density_ratio(double R, double N) {
    if (R == 0.0) return 0.0;
    if (!(N > 0.0)) throw Error("density required: p != 0 but N = 0");
    return R / (kFourPi * N);
}

InversionIntermediate solve_intermediate(Complex p, double N) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw Error("p must be finite");
    if (!(N >= 0.0) || !std::isfinite(N)) throw Error("density N must be finite and >= 0");

    const PolarForm polar = polar_decompose(p);
    InversionIntermediate out;
    out.rho = density_ratio(polar.R, N);

    // Direction cosines straight from p keep sin(psi) exactly signed like Im p.
    const double cos_psi = polar.R > 0.0 ? p.real() / polar.R : 1.0;
    const double sin_psi = polar.R > 0.0 ? p.imag() / polar.R : 0.0;
    const double q = out.rho * out.rho - 2.0 * out.rho * cos_psi + 1.0;
    if (q < kSingularityGuard) throw Error("parameterization singular, increase N");

    const double s = std::sqrt(q);
    out.r = 1.0 / s;
    out.sin_phi = out.rho * sin_psi / s;
    out.cos_phi = (1.0 - out.rho * cos_psi) / s;
    out.phi = std::atan2(out.sin_phi, out.cos_phi);
    return out;
}

Complex solve_h(Complex p, double N) {
    const InversionIntermediate m = solve_intermediate(p, N);
    return {m.r * m.cos_phi - 1.0, m.r * m.sin_phi};
}

Complex forward_p(Complex h, double N) {
    const Complex denom = 1.0 + h;
    if (denom == Complex(0.0, 0.0)) throw Error("pole: h = -1");
    return kFourPi * N * h / denom;
}

ComponentResidual component_residual(Complex p, Complex h, double N) {
    const PolarForm polar = polar_decompose(p);
    const double h1 = h.real();
    const double h2 = h.imag();
    const double d = (1.0 + h1) * (1.0 + h1) + h2 * h2;
    const double lhs_re = kFourPi * N * (h1 * (1.0 + h1) + h2 * h2) / d;
    const double lhs_im = kFourPi * N * h2 / d;
    const double scale = polar.R > 0.0 ? polar.R : 1.0;
    return {std::abs(lhs_re - polar.R * std::cos(polar.psi)) / scale,
            std::abs(lhs_im - polar.R * std::sin(polar.psi)) / scale};
}

MaterialDesign design_from_p(SampledField p, double rho_target,
                             const std::optional<DensityField>& density) {
    p.validate();
    const std::size_t nv = p.grid.voxel_count();
    const std::size_t nf = p.freqs.size();

    for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t f = 0; f < nf; ++f) {
            if (p.at(v, f).imag() > 0.0)
                throw Error("Im p > 0 at " + sample_locator(p, v, f) +
                            "; the target requires Im n^2 >= Im n0^2");
        }
    }

    MaterialDesign out;
    if (density) {
        density->validate();
        if (!(density->grid == p.grid)) throw Error("supplied density uses a different grid");
        for (std::size_t v = 0; v < nv; ++v) {
            for (std::size_t f = 0; f < nf; ++f) {
                const double R = std::abs(p.at(v, f));
                if (R == 0.0) continue;
                if (!(density->values[v] > 0.0))
                    throw Error("density required at " + sample_locator(p, v, f));
                if (!(density_ratio(R, density->values[v]) < 1.0))
                    throw Error("supplied density gives rho >= 1 at " + sample_locator(p, v, f));
            }
        }
        out.plan.N = *density;
    } else {
        out.plan.N = choose_density(p, rho_target);
    }

    out.plan.h = SampledField(p.grid, p.freqs);
    DesignReport& report = out.report;
    report.voxel_count = nv;
    report.freq_count = nf;
    report.samples.resize(nv * nf);

    for (std::size_t v = 0; v < nv; ++v) {
        const double N = out.plan.N.values[v];
        for (std::size_t f = 0; f < nf; ++f) {
            const Complex ps = p.at(v, f);
            InversionIntermediate m;
            try {
                m = solve_intermediate(ps, N);
            } catch (const Error& e) {
                throw Error(std::string(e.what()) + " at " + sample_locator(p, v, f));
            }
            const Complex h(m.r * m.cos_phi - 1.0, m.r * m.sin_phi);
            out.plan.h.at(v, f) = h;

            const double residual = std::abs(forward_p(h, N) - ps);
            const double scaled = residual / (1.0 + std::abs(ps));
            report.samples[p.offset(v, f)] = {m.rho, residual};
            report.max_residual = std::max(report.max_residual, residual);
            report.max_scaled_residual = std::max(report.max_scaled_residual, scaled);
            report.max_rho = std::max(report.max_rho, m.rho);
        }
    }
    report.residuals_pass = report.max_scaled_residual <= kRoundTripTolerance;
    out.plan.rho_max_used = report.max_rho;
    out.p = std::move(p);
    return out;
}

MaterialDesign design_material(const SampledField& n0sq, const SampledField& nsq,
                               const MediumConstants& medium, double rho_target,
                               const std::optional<DensityField>& density) {
    if (!density && !(rho_target > 0.0 && rho_target < 1.0))
        throw Error("rho_target must lie in (0, 1)");
    return design_from_p(compute_p(n0sq, nsq, medium), rho_target, density);
}

}  // namespace metamat
