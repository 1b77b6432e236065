#pragma once

// Least-squares slopes for the decay experiments.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sfplap {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;  // 0 when there are only two points
};

/// Ordinary least squares y = a + b x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two or more paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double res = y[i] - f.intercept - f.slope * x[i];
            rss += res * res;
        }
        f.slope_std_error = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

/// Slope of log y against log x; empty if any y is not strictly positive.
inline std::optional<LineFit> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) return std::nullopt;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

/// Same, after dividing y by log x: a y ~ (log x) x^s law shows slope s.
inline std::optional<LineFit> loglog_fit_log_corrected(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> yc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(x[i] > 1.0)) return std::nullopt;
        yc[i] = y[i] / std::log(x[i]);
    }
    return loglog_fit(x, yc);
}

}  // namespace sfplap
