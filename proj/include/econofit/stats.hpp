#pragma once

// Regression and correlation diagnostics used across the fitting and
// reporting modules.

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "econofit/errors.hpp"

namespace econofit {

namespace detail {

inline double mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace detail

inline double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DomainError("pearson_r: length mismatch");
    if (xs.size() < 3) throw InsufficientDataError("pearson_r: need n >= 3");
    double mx = detail::mean(xs), my = detail::mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DomainError("pearson_r: correlation undefined for constant series");
    return sxy / std::sqrt(sxx * syy);
}

// 1 - SSE/SST; negative for models worse than the mean.
inline double r_squared(const std::vector<double>& observed,
                        const std::vector<double>& predicted) {
    if (observed.size() != predicted.size())
        throw DomainError("r_squared: length mismatch");
    if (observed.size() < 2) throw InsufficientDataError("r_squared: need n >= 2");
    double mo = detail::mean(observed);
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sse += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        sst += (observed[i] - mo) * (observed[i] - mo);
    }
    if (sst == 0.0) throw DomainError("r_squared: undefined for constant observations");
    return 1.0 - sse / sst;
}

// Sample standard deviation, n-1 denominator.
inline double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) throw InsufficientDataError("stddev: need n >= 2");
    double m = detail::mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Welch two-sample t statistic.
inline double two_sample_t(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 2 || ys.size() < 2)
        throw InsufficientDataError("two_sample_t: need n >= 2 in both samples");
    double sx = stddev(xs), sy = stddev(ys);
    double denom = std::sqrt(sx * sx / static_cast<double>(xs.size()) +
                             sy * sy / static_cast<double>(ys.size()));
    double num = detail::mean(xs) - detail::mean(ys);
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::copysign(HUGE_VAL, num);
    return num / denom;
}

inline double regression_t(double coefficient, double std_error) {
    if (!(std_error > 0.0)) throw DomainError("regression_t: std_error must be positive");
    return coefficient / std_error;
}

// First-order residual autocorrelation statistic; denominator over all n
// residuals. Residuals must be ordered (ascending x for fits).
inline double durbin_watson(const std::vector<double>& residuals) {
    if (residuals.size() < 3) throw InsufficientDataError("durbin_watson: need n >= 3");
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        den += residuals[t] * residuals[t];
        if (t > 0) {
            double d = residuals[t] - residuals[t - 1];
            num += d * d;
        }
    }
    if (den == 0.0) throw DomainError("durbin_watson: all residuals are zero");
    return num / den;
}

// Two series paired by label (typically years).
struct PairedSeries {
    std::vector<int> labels;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct Correlation {
    double r = 0.0;
    double t = 0.0;  // Welch two-sample statistic over the paired columns
    int n = 0;
};

// Pair two year-indexed series over the intersection of their years.
inline PairedSeries pair_by_year(const std::map<int, double>& a,
                                 const std::map<int, double>& b) {
    PairedSeries out;
    for (const auto& [year, va] : a) {
        auto it = b.find(year);
        if (it != b.end()) {
            out.labels.push_back(year);
            out.xs.push_back(va);
            out.ys.push_back(it->second);
        }
    }
    return out;
}

inline Correlation correlate_by_year(const std::map<int, double>& a,
                                     const std::map<int, double>& b) {
    PairedSeries p = pair_by_year(a, b);
    if (p.labels.size() < 3)
        throw InsufficientDataError("correlate_by_year: fewer than 3 overlapping years");
    return {pearson_r(p.xs, p.ys), two_sample_t(p.xs, p.ys),
            static_cast<int>(p.labels.size())};
}

}  // namespace econofit
