#pragma once

// Probability point sets built from decile and binned tables, and the
// dynamic growth-decile transform.
//
// Probability units: cdf/ccdf sets carry percent (0..100) on the p axis,
// pdf sets carry fractional shares summing to 1. Log transforms operate
// on those units, so the plateau of a log10 cdf sits near log10(100) = 2.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "econofit/data_model.hpp"
#include "econofit/errors.hpp"

namespace econofit {

enum class AxisScale { linear, log10, ln };
enum class Orientation { cdf, ccdf, pdf };

struct ProbePoint {
    double x = 0.0;
    double p = 0.0;
    bool operator==(const ProbePoint&) const = default;
};

// (x, probability) pairs ready for fitting. Immutable; invariants are
// checked on construction for linear-scale sets.
class ProbePointSet {
public:
    ProbePointSet(std::vector<ProbePoint> points, Orientation orientation,
                  AxisScale x_scale = AxisScale::linear,
                  AxisScale p_scale = AxisScale::linear)
        : points_(std::move(points)),
          orientation_(orientation),
          x_scale_(x_scale),
          p_scale_(p_scale) {
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i].x > points_[i - 1].x))
                throw ValidationError("x values not strictly increasing");
        if (x_scale_ == AxisScale::linear && p_scale_ == AxisScale::linear) {
            if (orientation_ == Orientation::pdf) {
                double sum = 0.0;
                for (const auto& pt : points_) sum += pt.p;
                if (std::abs(sum - 1.0) > 1e-9)
                    throw ValidationError("pdf probabilities sum to " +
                                          std::to_string(sum) + ", expected 1");
            } else {
                bool rising = orientation_ == Orientation::cdf;
                for (std::size_t i = 0; i < points_.size(); ++i) {
                    if (points_[i].p < 0.0 || points_[i].p > 100.0)
                        throw ValidationError("probability outside [0, 100]%");
                    if (i > 0) {
                        bool ok = rising ? points_[i].p >= points_[i - 1].p
                                         : points_[i].p <= points_[i - 1].p;
                        if (!ok)
                            throw ValidationError(
                                rising ? "cdf probabilities not non-decreasing"
                                       : "ccdf probabilities not non-increasing");
                    }
                }
            }
        }
    }

    const std::vector<ProbePoint>& points() const { return points_; }
    Orientation orientation() const { return orientation_; }
    AxisScale x_scale() const { return x_scale_; }
    AxisScale p_scale() const { return p_scale_; }
    std::size_t size() const { return points_.size(); }

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        out << "x,p\n";
        for (const auto& pt : points_) out << pt.x << ',' << pt.p << '\n';
        return out.str();
    }

private:
    std::vector<ProbePoint> points_;
    Orientation orientation_;
    AxisScale x_scale_;
    AxisScale p_scale_;
};

inline std::vector<double> cumulate(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("cumulate: empty input");
    std::vector<double> out(values.size());
    std::partial_sum(values.begin(), values.end(), out.begin());
    return out;
}

// S = {(0,0%),(X1,10%),...,(X10,100%)}; upper/lower-limit series end at 90%.
inline ProbePointSet build_cdf_points(const DecileSeries& series) {
    auto cum = cumulate(series.values());
    std::vector<ProbePoint> pts;
    pts.reserve(cum.size() + 1);
    pts.push_back({0.0, 0.0});
    for (std::size_t i = 0; i < cum.size(); ++i)
        pts.push_back({cum[i], 10.0 * static_cast<double>(i + 1)});
    return ProbePointSet(std::move(pts), Orientation::cdf);
}

// Mirror of build_cdf_points: {(0,100%),(X1,90%),...}.
inline ProbePointSet build_ccdf_points(const DecileSeries& series) {
    auto cum = cumulate(series.values());
    std::vector<ProbePoint> pts;
    pts.reserve(cum.size() + 1);
    pts.push_back({0.0, 100.0});
    for (std::size_t i = 0; i < cum.size(); ++i)
        pts.push_back({cum[i], 100.0 - 10.0 * static_cast<double>(i + 1)});
    return ProbePointSet(std::move(pts), Orientation::ccdf);
}

enum class LogBase { base10, natural };

// Apply log scaling to both axes. Points with x <= 0 or p <= 0 are dropped
// first; log of the zero anchors is undefined and the fitted magnitudes
// assume they are excluded.
inline ProbePointSet log_scale(const ProbePointSet& set, LogBase x_base,
                               LogBase p_base) {
    if (set.x_scale() != AxisScale::linear || set.p_scale() != AxisScale::linear)
        throw DomainError("log_scale: set is already log-scaled");
    auto lg = [](LogBase b, double v) {
        return b == LogBase::base10 ? std::log10(v) : std::log(v);
    };
    std::vector<ProbePoint> pts;
    for (const auto& pt : set.points())
        if (pt.x > 0.0 && pt.p > 0.0)
            pts.push_back({lg(x_base, pt.x), lg(p_base, pt.p)});
    if (pts.size() < 4)
        throw InsufficientDataError("log_scale: fewer than 4 points survive");
    return ProbePointSet(std::move(pts), set.orientation(),
                         x_base == LogBase::base10 ? AxisScale::log10 : AxisScale::ln,
                         p_base == LogBase::base10 ? AxisScale::log10 : AxisScale::ln);
}

// Representative x for a bin on the log10 axis: geometric midpoint for
// closed bins, lower * 1.5 for the open-ended tail bin.
inline double bin_representative(const IncomeBin& b) {
    return b.upper ? std::sqrt(b.lower * *b.upper) : b.lower * 1.5;
}

// (log10 representative, log10 share) per bin; zero-share bins are dropped.
inline ProbePointSet build_pdf_points(const BinnedIncomeTable& table,
                                      std::vector<std::string>* warnings = nullptr) {
    std::vector<ProbePoint> pts;
    for (const auto& b : table.bins()) {
        if (b.share <= 0.0) {
            if (warnings)
                warnings->push_back("dropped zero-share bin at lower edge " +
                                    std::to_string(b.lower));
            continue;
        }
        pts.push_back({std::log10(bin_representative(b)), std::log10(b.share)});
    }
    return ProbePointSet(std::move(pts), Orientation::pdf, AxisScale::log10,
                         AxisScale::log10);
}

// Growth in real terms: nominal delta divided by the price-level ratio.
inline double real_growth(double delta_nominal, double delta_price) {
    if (!(delta_price > 0.0))
        throw DomainError("real_growth: price ratio must be positive");
    return delta_nominal / delta_price;
}

// Per-decile growth between two years: deltas sorted ascending, cumulated.
struct GrowthSeries {
    int base_year = 0;
    int later_year = 0;
    std::vector<double> deltas_sorted;
    std::vector<double> cumulated;
    Basis basis = Basis::nominal;

    bool operator==(const GrowthSeries&) const = default;
};

// Deltas per matching decile, optionally deflated, stable-sorted ascending
// (ties keep input order), prefix-summed. The ccdf point set runs 90%..0%
// for 10-decile series and 90%..10% for 9-decile ones. Deltas can be
// negative in recession years, so no positivity is enforced on x here and
// the returned set is built without the zero anchor.
inline std::pair<GrowthSeries, ProbePointSet> build_growth_points(
    const DecileSeries& base, const DecileSeries& later,
    std::optional<double> deflator = std::nullopt) {
    if (!base.compatible_with(later))
        throw IncompatibleSeriesError(
            "growth requires matching variable/kind/unit/length");
    if (!(later.year() > base.year()))
        throw IncompatibleSeriesError("later.year must exceed base.year");

    GrowthSeries g;
    g.base_year = base.year();
    g.later_year = later.year();
    g.basis = deflator ? Basis::real : base.basis();
    g.deltas_sorted.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        double d = later.values()[i] - base.values()[i];
        g.deltas_sorted[i] = deflator ? real_growth(d, *deflator) : d;
    }
    std::stable_sort(g.deltas_sorted.begin(), g.deltas_sorted.end());
    g.cumulated = cumulate(g.deltas_sorted);

    std::vector<ProbePoint> pts;
    const std::size_t n = g.cumulated.size();
    double prev_x = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double x = g.cumulated[i];
        double p = 100.0 - 10.0 * static_cast<double>(i + 1);
        if (x > prev_x) {
            pts.push_back({x, p});
        } else {
            pts.back().p = p;  // tie in cumulated values keeps the later probability
        }
        prev_x = pts.back().x;
    }
    return {std::move(g), ProbePointSet(std::move(pts), Orientation::ccdf)};
}

// Gini via trapezoidal Lorenz-curve area with equal 10% population weights.
inline double compute_gini(const DecileSeries& series) {
    if (series.kind() != SeriesKind::mean)
        throw DomainError("compute_gini: only mean-decile series supported");
    const auto& v = series.values();
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    double lorenz_area = 0.0;  // twice the area under the Lorenz curve, x n
    double cum = 0.0;
    for (double x : v) {
        double prev = cum;
        cum += x / total;
        lorenz_area += prev + cum;
    }
    return 1.0 - lorenz_area / static_cast<double>(v.size());
}

}  // namespace econofit
