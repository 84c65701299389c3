#include "metamat/monotone_cubic.hpp"

#include <algorithm>
#include <cmath>

#include "metamat/error.hpp"

namespace metamat {

namespace {

double three_point_end_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(m) != std::signbit(d0) || d0 == 0.0) {
        m = 0.0;
    } else if (std::signbit(d0) != std::signbit(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
        m = 3.0 * d0;
    }
    return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error("monotone cubic needs >= 2 matching samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
            throw Error("monotone cubic samples must be finite");
        if (i > 0 && !(x_[i] > x_[i - 1]))
            throw Error("monotone cubic abscissae must be strictly increasing");
    }

    std::vector<double> h(n - 1);
    std::vector<double> d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        d[k] = (y_[k + 1] - y_[k]) / h[k];
    }

    m_.assign(n, 0.0);
    if (n == 2) {
        m_[0] = m_[1] = d[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] * d[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m_[0] = three_point_end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = three_point_end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

std::size_t MonotoneCubic::interval(double x) const {
    if (!(x >= x_.front() && x <= x_.back())) throw Error("interpolation outside tabulated range");
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const auto k = static_cast<std::size_t>(std::distance(x_.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[k] + (t3 - 2.0 * t2 + t) * h * m_[k] +
           (-2.0 * t3 + 3.0 * t2) * y_[k + 1] + (t3 - t2) * h * m_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t k = interval(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    return (6.0 * t2 - 6.0 * t) * y_[k] / h + (3.0 * t2 - 4.0 * t + 1.0) * m_[k] +
           (-6.0 * t2 + 6.0 * t) * y_[k + 1] / h + (3.0 * t2 - 2.0 * t) * m_[k + 1];
}

}  // namespace metamat
