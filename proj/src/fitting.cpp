#include "ionsim/fitting.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ionsim {

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || w.size() != n)
        throw std::invalid_argument("weighted_line_fit: need >= 2 points with matching weights");

    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        S += w[i];
        Sx += w[i] * x[i];
        Sy += w[i] * y[i];
        Sxx += w[i] * x[i] * x[i];
        Sxy += w[i] * x[i] * y[i];
    }
    const double det = S * Sxx - Sx * Sx;
    if (!(std::abs(det) > 1e-300 * S * Sxx) || !std::isfinite(det) || det <= 0.0)
        throw std::invalid_argument("weighted_line_fit: singular design (distinct x required)");

    LineFit fit;
    fit.slope = (S * Sxy - Sx * Sy) / det;
    fit.intercept = (Sxx * Sy - Sx * Sxy) / det;
    fit.intercept_sigma = std::sqrt(Sxx / det);
    fit.slope_sigma = std::sqrt(S / det);
    double chi2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        chi2 += w[i] * r * r;
    }
    fit.ndof = n - 2;
    fit.chi2_reduced = fit.ndof > 0 ? chi2 / static_cast<double>(fit.ndof) : 0.0;
    return fit;
}

namespace {

Eigen::VectorXd polynomial_fit(const std::vector<double>& x, const std::vector<double>& y, int order) {
    if (x.size() != y.size() || x.size() < static_cast<std::size_t>(order + 1))
        throw std::invalid_argument("polynomial_fit: not enough points");
    Eigen::MatrixXd A(x.size(), order + 1);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
            A(i, j) = p;
            p *= x[i];
        }
        b(i) = y[i];
    }
    return A.colPivHouseholderQr().solve(b);
}

}  // namespace

QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::VectorXd c = polynomial_fit(x, y, 2);
    return {c(0), c(1), c(2)};
}

CubicFit cubic_fit(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::VectorXd c = polynomial_fit(x, y, 3);
    return {c(0), c(1), c(2), c(3)};
}

SinusoidFit sinusoid_fit(const std::vector<double>& phases, const std::vector<double>& y) {
    if (phases.size() != y.size() || phases.size() < 3)
        throw std::invalid_argument("sinusoid_fit: need >= 3 points");
    Eigen::MatrixXd A(phases.size(), 3);
    Eigen::VectorXd b(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = std::cos(phases[i]);
        A(i, 2) = std::sin(phases[i]);
        b(i) = y[i];
    }
    Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
    SinusoidFit fit;
    fit.offset = c(0);
    fit.amplitude = std::hypot(c(1), c(2));
    fit.phase = std::atan2(c(2), c(1));
    return fit;
}

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    if (v.empty())
        return out;
    double s = 0;
    for (double a : v)
        s += a;
    out.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double q = 0;
        for (double a : v) {
            const double d = a - out.mean;
            q += d * d;
        }
        out.std = std::sqrt(q / static_cast<double>(v.size() - 1));
    }
    return out;
}

}  // namespace ionsim
