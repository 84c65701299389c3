#include "metamat/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metamat/error.hpp"

namespace metamat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string omega_text(double omega) {
    std::ostringstream os;
    os << "omega = " << omega;
    return os.str();
}

std::vector<double> scan_points(const RootScan& scan) {
    std::vector<double> pts(scan.samples);
    const double n = static_cast<double>(scan.samples - 1);
    for (std::size_t i = 0; i < scan.samples; ++i) {
        const double t = static_cast<double>(i) / n;
        pts[i] = scan.log_spacing
                     ? scan.omega_lo * std::pow(scan.omega_hi / scan.omega_lo, t)
                     : scan.omega_lo + t * (scan.omega_hi - scan.omega_lo);
    }
    pts.back() = scan.omega_hi;
    return pts;
}

}  // namespace

DispersionModel DispersionModel::tabulated(std::vector<double> omega, std::vector<Complex> n) {
    if (omega.size() != n.size()) throw Error("tabulated model: omega/n length mismatch");
    if (omega.size() < 2) throw Error("tabulated model needs at least two samples");
    std::vector<double> re(n.size());
    std::vector<double> im(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(omega[i] >= 0.0) || !std::isfinite(omega[i]))
            throw Error("tabulated model: omega must be finite and >= 0");
        if (!std::isfinite(n[i].real()) || !std::isfinite(n[i].imag()))
            throw Error("tabulated model: n must be finite");
        re[i] = n[i].real();
        im[i] = n[i].imag();
    }
    TabulatedRefraction t;
    t.re = MonotoneCubic(omega, std::move(re));
    t.im = MonotoneCubic(omega, std::move(im));
    t.omega = std::move(omega);
    t.n = std::move(n);
    return DispersionModel(std::move(t));
}

DispersionModel DispersionModel::inverse_quadratic(double c_param) {
    if (!(c_param > 0.0) || !std::isfinite(c_param))
        throw Error("inverse-quadratic model needs c_param > 0");
    return DispersionModel(InverseQuadraticRefraction{c_param});
}

DispersionModel DispersionModel::constant(Complex n, double omega_lo, double omega_hi) {
    return tabulated({omega_lo, omega_hi}, {n, n});
}

Complex DispersionModel::n(double omega) const {
    if (!contains(omega)) throw Error("model evaluated outside its range at " + omega_text(omega));
    return std::visit(overloaded{
                          [&](const TabulatedRefraction& t) {
                              return Complex(t.re(omega), t.im(omega));
                          },
                          [&](const InverseQuadraticRefraction& q) {
                              return Complex(1.0 / (1.0 + q.c_param * omega * omega), 0.0);
                          },
                      },
                      impl_);
}

std::pair<double, double> DispersionModel::range() const {
    return std::visit(overloaded{
                          [](const TabulatedRefraction& t) {
                              return std::pair{t.omega.front(), t.omega.back()};
                          },
                          [](const InverseQuadraticRefraction&) {
                              return std::pair{0.0, std::numeric_limits<double>::infinity()};
                          },
                      },
                      impl_);
}

bool DispersionModel::contains(double omega) const {
    const auto [lo, hi] = range();
    return std::isfinite(omega) && omega >= lo && omega <= hi;
}

bool DispersionModel::has_closed_form_derivative() const {
    return std::holds_alternative<InverseQuadraticRefraction>(impl_);
}

double DispersionModel::closed_form_derivative(double omega) const {
    const auto* q = std::get_if<InverseQuadraticRefraction>(&impl_);
    if (!q) throw Error("tabulated models have no closed-form derivative");
    if (!contains(omega)) throw Error("model evaluated outside its range at " + omega_text(omega));
    const double g = 1.0 + q->c_param * omega * omega;
    return -2.0 * q->c_param * omega / (g * g);
}

std::string DispersionModel::kind() const {
    return has_closed_form_derivative() ? "inverse-quadratic" : "tabulated";
}

double finite_difference_step(double omega) { return std::max(1e-6 * std::abs(omega), 1e-9); }

RefractionDerivative refraction_derivative(const DispersionModel& model, double omega,
                                           DerivativeMethod method) {
    if (!model.contains(omega))
        throw Error("derivative requested outside model range at " + omega_text(omega));
    if (method == DerivativeMethod::automatic)
        method = model.has_closed_form_derivative() ? DerivativeMethod::closed_form
                                                    : DerivativeMethod::finite_difference;
    if (method == DerivativeMethod::closed_form)
        return {model.closed_form_derivative(omega), true, false};

    const double h = finite_difference_step(omega);
    const auto [lo, hi] = model.range();
    auto f = [&](double w) { return model.n_re(w); };
    if (omega - h >= lo && omega + h <= hi)
        return {(f(omega + h) - f(omega - h)) / (2.0 * h), false, false};
    // Second-order one-sided stencils at the edges of the table.
    if (omega + 2.0 * h <= hi)
        return {(-3.0 * f(omega) + 4.0 * f(omega + h) - f(omega + 2.0 * h)) / (2.0 * h), false,
                true};
    if (omega - 2.0 * h >= lo)
        return {(3.0 * f(omega) - 4.0 * f(omega - h) + f(omega - 2.0 * h)) / (2.0 * h), false,
                true};
    throw Error("model range too narrow for a finite difference at " + omega_text(omega));
}

CriterionResult negative_refraction_criterion(const DispersionModel& model, double omega,
                                              DerivativeMethod method) {
    CriterionResult out;
    out.omega = omega;
    out.n_re = model.n_re(omega);
    if (!(out.n_re > 0.0))
        throw Error("negative-refraction criterion undefined for Re n <= 0 at " +
                    omega_text(omega));
    const RefractionDerivative d = refraction_derivative(model, omega, method);
    out.dn_domega = d.value;
    out.one_sided = d.one_sided;
    out.value = omega / out.n_re * d.value;
    out.holds = out.value < -1.0;
    return out;
}

BandCriterion band_criterion(const DispersionModel& model, const FrequencyGrid& band,
                             DerivativeMethod method) {
    band.validate();
    BandCriterion out;
    for (double omega : band.samples) {
        if (!model.contains(omega))
            throw Error("band outside model range at " + omega_text(omega));
        out.table.push_back(negative_refraction_criterion(model, omega, method));
        out.all_hold = out.all_hold && out.table.back().holds;
    }
    return out;
}

Complex principal_refraction(Complex nsq) {
    if (nsq.imag() == 0.0 && nsq.real() < 0.0)
        throw Error("n^2 on the negative real axis: square-root branch is ambiguous");
    return std::sqrt(nsq);
}

std::vector<AbsorptionSample> absorption_check(std::span<const Complex> nsq, double L,
                                               double threshold) {
    if (!(L >= 0.0) || !std::isfinite(L)) throw Error("domain diameter must be finite and >= 0");
    if (!(threshold > 0.0)) throw Error("absorption threshold must be positive");
    std::vector<AbsorptionSample> out;
    out.reserve(nsq.size());
    for (const Complex& s : nsq) {
        AbsorptionSample a;
        a.n = principal_refraction(s);
        a.ratio = L * std::abs(a.n.imag());
        a.pass = a.ratio < threshold;
        out.push_back(a);
    }
    return out;
}

RootScan default_root_scan(const DispersionModel& model) {
    return std::visit(overloaded{
                          [](const TabulatedRefraction& t) {
                              return RootScan{t.omega.front(), t.omega.back(),
                                              8 * (t.omega.size() - 1) + 1, false};
                          },
                          [](const InverseQuadraticRefraction&) {
                              return RootScan{1e-6, 1e6, 8192, true};
                          },
                      },
                      model.impl());
}

std::vector<double> solve_dispersion(const DispersionModel& model, double k_mag,
                                     const MediumConstants& medium,
                                     const std::optional<RootScan>& scan_opt) {
    if (!(k_mag > 0.0) || !std::isfinite(k_mag)) throw Error("|k| must be positive");
    medium.validate();
    RootScan scan = scan_opt.value_or(default_root_scan(model));
    const auto [lo, hi] = model.range();
    scan.omega_lo = std::max(scan.omega_lo, lo);
    scan.omega_hi = std::min(scan.omega_hi, hi);
    if (scan.samples < 2 || !(scan.omega_hi > scan.omega_lo) ||
        (scan.log_spacing && !(scan.omega_lo > 0.0)))
        throw Error("invalid root scan");

    const double target = k_mag * medium.c;
    auto f = [&](double w) { return w * model.n_re(w) - target; };

    const std::vector<double> pts = scan_points(scan);
    std::vector<double> roots;
    double fa = f(pts[0]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i];
        double b = pts[i + 1];
        const double fb = f(b);
        if (fa == 0.0) {
            if (a > 0.0) roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            double flo = fa;
            for (int it = 0; it < 400 && (b - a) > kRootRelativeTolerance * std::abs(b); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    a = mid;
                    flo = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(pts.back());
    return roots;
}

VelocityResult group_velocity(const DispersionModel& model, double omega, const Vec3& k0,
                              const MediumConstants& medium, DerivativeMethod method) {
    medium.validate();
    if (std::abs(norm(k0) - 1.0) > 1e-9) throw Error("k0 must be a unit vector");
    const double n = model.n_re(omega);
    if (!(n > 0.0)) throw Error("phase velocity undefined for Re n <= 0 at " + omega_text(omega));
    const double dn = refraction_derivative(model, omega, method).value;

    VelocityResult out;
    out.k0 = k0;
    out.omega = omega;
    out.group_denominator = n + omega * dn;
    if (std::abs(out.group_denominator) < kGroupVelocitySingularity)
        throw Error("group-velocity singularity: n + omega dn/domega = 0 at " + omega_text(omega));
    for (int a = 0; a < 3; ++a) {
        out.v_p[a] = medium.c / n * k0[a];
        out.v_g[a] = medium.c / out.group_denominator * k0[a];
    }
    return out;
}

std::vector<DispersionReportRow> dispersion_report(const DispersionModel& model,
                                                   const FrequencyGrid& band, double L,
                                                   DerivativeMethod method) {
    const BandCriterion crit = band_criterion(model, band, method);
    std::vector<DispersionReportRow> rows;
    for (const CriterionResult& c : crit.table) {
        const Complex n = model.n(c.omega);
        rows.push_back({c.omega, n.real(), n.imag(), c.dn_domega, c.value, c.holds,
                        L * std::abs(n.imag())});
    }
    return rows;
}

nlohmann::json to_json(const DispersionReportRow& row) {
    return {{"omega", row.omega},
            {"n_re", row.n_re},
            {"n_im", row.n_im},
            {"dn_domega", row.dn_domega},
            {"criterion_value", row.criterion_value},
            {"criterion_holds", row.criterion_holds},
            {"absorption_ratio", row.absorption_ratio}};
}

}  // namespace metamat
