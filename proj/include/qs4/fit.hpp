#ifndef QS4_FIT_HPP
#define QS4_FIT_HPP

#include <vector>

namespace qs4 {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log y against log x; all values must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

} // namespace qs4

#endif
