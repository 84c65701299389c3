#include "metamat/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "metamat/error.hpp"

namespace metamat {

void WavePacketSpec::validate() const {
    if (!(center_k > 0.0) || !std::isfinite(center_k)) throw Error("packet center_k must be > 0");
    if (!(half_width > 0.0) || !(half_width < center_k))
        throw Error("packet half_width must satisfy 0 < half_width < center_k");
    if (k_samples < 16) throw Error("packet needs at least 16 k samples");
}

double branch_omega(const DispersionModel& model, double k_mag, const MediumConstants& medium,
                    std::pair<double, double> bracket) {
    const RootScan scan{bracket.first, bracket.second, 513, false};
    const std::vector<double> roots = solve_dispersion(model, k_mag, medium, scan);
    if (roots.size() != 1) {
        std::ostringstream os;
        os << "omega(k) is not single-valued at |k| = " << k_mag << ": " << roots.size()
           << " roots in [" << bracket.first << ", " << bracket.second << "]";
        throw Error(os.str());
    }
    return roots.front();
}

WavePacketResult simulate_wavepacket(const DispersionModel& model, const WavePacketSpec& spec,
                                     const MediumConstants& medium, double duration,
                                     double line_extent, const WavePacketOptions& options) {
    spec.validate();
    medium.validate();
    if (!(duration > 0.0)) throw Error("duration must be positive");
    if (!(line_extent > 0.0)) throw Error("line extent must be positive");
    if (options.x_samples < 16 || options.t_samples < 2)
        throw Error("wave packet needs >= 16 x samples and >= 2 time samples");

    auto omega_of = [&](double k) {
        if (options.omega_bracket) return branch_omega(model, k, medium, *options.omega_bracket);
        const std::vector<double> roots = solve_dispersion(model, k, medium);
        if (roots.size() != 1) {
            std::ostringstream os;
            os << "omega(k) is not single-valued at |k| = " << k << " (" << roots.size()
               << " roots); supply an omega bracket";
            throw Error(os.str());
        }
        return roots.front();
    };

    const std::size_t nk = spec.k_samples;
    const double dk = 2.0 * spec.half_width / static_cast<double>(nk);
    const double period = 2.0 * std::numbers::pi / dk;

    const double sigma = spec.half_width / 3.0;
    std::vector<double> kk(nk);
    std::vector<double> omega(nk);
    std::vector<Complex> amp(nk);
    for (std::size_t i = 0; i < nk; ++i) {
        kk[i] = spec.center_k - spec.half_width + (static_cast<double>(i) + 0.5) * dk;
        omega[i] = omega_of(kk[i]);
        const double q = (kk[i] - spec.center_k) / sigma;
        amp[i] = spec.amplitude ? spec.amplitude(kk[i]) : Complex(std::exp(-0.5 * q * q), 0.0);
        if (!std::isfinite(amp[i].real()) || !std::isfinite(amp[i].imag()))
            throw Error("packet amplitude must be finite");
    }

    const std::size_t nx = options.x_samples;
    const double dx = line_extent / static_cast<double>(nx);
    std::vector<double> x(nx);
    for (std::size_t j = 0; j < nx; ++j) x[j] = -0.5 * line_extent + (j + 0.5) * dx;

    // |u| does not depend on the common carrier exp(i kbar x), so the basis
    // uses k - kbar.
    std::vector<Complex> basis(nk * nx);
    for (std::size_t i = 0; i < nk; ++i)
        for (std::size_t j = 0; j < nx; ++j)
            basis[i * nx + j] = std::polar(1.0, (kk[i] - spec.center_k) * x[j]);

    WavePacketResult out;
    const std::size_t nt = options.t_samples;
    std::vector<Complex> u(nx);
    std::vector<Complex> coeff(nk);
    for (std::size_t m = 0; m < nt; ++m) {
        const double t = duration * static_cast<double>(m) / static_cast<double>(nt - 1);
        for (std::size_t i = 0; i < nk; ++i) coeff[i] = amp[i] * std::polar(1.0, -omega[i] * t);
        std::fill(u.begin(), u.end(), Complex{});
        for (std::size_t i = 0; i < nk; ++i) {
            const Complex* row = &basis[i * nx];
            for (std::size_t j = 0; j < nx; ++j) u[j] += coeff[i] * row[j];
        }

        double mass = 0.0;
        double first = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            const double w = std::norm(u[j]);
            mass += w;
            first += w * x[j];
        }
        if (!(mass > 0.0)) throw Error("wave packet has zero intensity");
        const double centroid = first / mass;
        double second = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            const double dxj = x[j] - centroid;
            second += std::norm(u[j]) * dxj * dxj;
        }
        const double rms = std::sqrt(second / mass);

        if (m == 0 && period < line_extent + 8.0 * rms) {
            std::ostringstream os;
            os << "line extent " << line_extent << " overlaps periodic packet images (period "
               << period << "); increase k_samples";
            throw Error(os.str());
        }
        if (std::abs(centroid) + 4.0 * rms > 0.5 * line_extent) {
            const double projected = t > 0.0 ? std::abs(centroid) * duration / t : 0.0;
            std::ostringstream os;
            os << "wave packet leaves the line before the duration ends (t = " << t
               << "); suggested line extent >= " << 2.5 * (projected + 4.0 * rms);
            throw Error(os.str());
        }
        out.times.push_back(t);
        out.centroids.push_back(centroid);
    }

    double tm = 0.0;
    double cm = 0.0;
    for (std::size_t m = 0; m < nt; ++m) {
        tm += out.times[m];
        cm += out.centroids[m];
    }
    tm /= static_cast<double>(nt);
    cm /= static_cast<double>(nt);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t m = 0; m < nt; ++m) {
        num += (out.times[m] - tm) * (out.centroids[m] - cm);
        den += (out.times[m] - tm) * (out.times[m] - tm);
    }
    out.envelope_velocity = num / den;

    out.center_omega = omega_of(spec.center_k);
    out.phase_velocity = out.center_omega / spec.center_k;
    try {
        out.analytic_group_velocity =
            group_velocity(model, out.center_omega, {1.0, 0.0, 0.0}, medium).v_g[0];
    } catch (const Error&) {
        out.analytic_group_velocity = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace metamat
