#pragma once

#include <cstddef>
#include <vector>

namespace metamat {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// interior slopes, three-point end slopes limited to keep monotonicity).
/// Reproduces the knots exactly and never overshoots between them.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    double lower() const { return x_.front(); }
    double upper() const { return x_.back(); }
    std::size_t size() const { return x_.size(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& slopes() const { return m_; }

private:
    std::size_t interval(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace metamat
