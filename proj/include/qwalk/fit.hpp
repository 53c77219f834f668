#pragma once

// Least-squares power-law fit y ~ prefactor * x^exponent on log-log axes.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qwalk {

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double rms_log_residual = 0.0;
};

inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_power_law: need at least two points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_power_law: points must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    PowerLawFit fit;
    fit.exponent = (n * sxy - sx * sy) / den;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.prefactor = std::exp(intercept);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.exponent * lx[i] + intercept);
        acc += r * r;
    }
    fit.rms_log_residual = std::sqrt(acc / n);
    return fit;
}

}  // namespace qwalk
