#pragma once

#include <cstddef>
#include <vector>

namespace ionsim {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double intercept_sigma = 0.0;
    double slope_sigma = 0.0;
    double chi2_reduced = 0.0;
    std::size_t ndof = 0;
};

// weighted least squares y = a + b x with weights w = 1/sigma^2
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w);

struct QuadFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // y = c0 + c1 x + c2 x^2
};

QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y);

// y = c0 + c1 x + c2 x^2 + c3 x^3, used for symmetry bounds
struct CubicFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

CubicFit cubic_fit(const std::vector<double>& x, const std::vector<double>& y);

// fits y_k = offset + amp*cos(phi_k - phase); returns {offset, amp, phase}
struct SinusoidFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

SinusoidFit sinusoid_fit(const std::vector<double>& phases, const std::vector<double>& y);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
};

MeanStd mean_std(const std::vector<double>& v);

}  // namespace ionsim
