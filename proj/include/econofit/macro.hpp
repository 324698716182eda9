#pragma once

// Batch orchestration across years: per-year fits, parameter time series
// (including derived fugacity), and parameter-vs-indicator correlation
// reports.

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "econofit/data_model.hpp"
#include "econofit/fitting.hpp"
#include "econofit/models.hpp"
#include "econofit/stats.hpp"
#include "econofit/transforms.hpp"

namespace econofit {

// Which point set to build from a DecileSeries before fitting.
struct TransformConfig {
    Orientation orientation = Orientation::ccdf;
    LogBase x_base = LogBase::natural;
    LogBase p_base = LogBase::natural;
    bool take_logs = true;
    int poly_degree = 3;  // used by polynomial fits only
};

inline TransformConfig default_transform(ModelId id) {
    switch (id) {
        case ModelId::logistic:
            return {Orientation::cdf, LogBase::base10, LogBase::base10, true, 3};
        case ModelId::fd_ccdf:
            return {Orientation::ccdf, LogBase::natural, LogBase::natural, true, 3};
        case ModelId::fd_pdf:
            return {Orientation::pdf, LogBase::base10, LogBase::base10, true, 3};
        case ModelId::polynomial:
            return {Orientation::ccdf, LogBase::base10, LogBase::base10, false, 3};
    }
    return {};
}

inline ProbePointSet build_fit_points(const DecileSeries& series,
                                      const TransformConfig& tc) {
    if (tc.orientation == Orientation::pdf)
        throw DomainError("build_fit_points: pdf sets come from binned tables");
    ProbePointSet set = tc.orientation == Orientation::cdf ? build_cdf_points(series)
                                                           : build_ccdf_points(series);
    if (tc.take_logs) return log_scale(set, tc.x_base, tc.p_base);
    return set;
}

struct YearlyFitRow {
    int year = 0;
    std::optional<FitResult> fit;  // empty when the year failed
    std::string error;             // failure reason when fit is empty
};

struct YearlyFitTable {
    ModelId model_id = ModelId::fd_ccdf;
    SeriesKind kind = SeriesKind::mean;
    std::string unit;
    std::vector<YearlyFitRow> rows;  // sorted by year
};

// Fit every series in the list (same variable/kind/unit required). Failed
// years are recorded with their error instead of being dropped. Fits run
// concurrently on up to `threads` workers; output order is by year
// regardless of scheduling.
inline YearlyFitTable batch_fit(const std::vector<DecileSeries>& series_list,
                                ModelId model_id, const TransformConfig& tc,
                                const FitConfig& fc = {}, unsigned threads = 1) {
    if (series_list.empty()) throw DomainError("batch_fit: no input series");
    for (const auto& s : series_list)
        if (!s.compatible_with(series_list.front()))
            throw IncompatibleSeriesError(
                "batch_fit: series must share variable/kind/unit/length");

    std::vector<const DecileSeries*> sorted;
    sorted.reserve(series_list.size());
    for (const auto& s : series_list) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](const DecileSeries* a, const DecileSeries* b) {
                  return a->year() < b->year();
              });

    YearlyFitTable table;
    table.model_id = model_id;
    table.kind = series_list.front().kind();
    table.unit = series_list.front().unit();
    table.rows.resize(sorted.size());

    auto fit_one = [&](std::size_t i) {
        table.rows[i].year = sorted[i]->year();
        try {
            ProbePointSet pts = build_fit_points(*sorted[i], tc);
            table.rows[i].fit = model_id == ModelId::polynomial
                                    ? fit_polynomial(pts, tc.poly_degree)
                                    : fit_nls(model_id, pts, fc);
        } catch (const Error& e) {
            table.rows[i].error = e.what();
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, sorted.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < sorted.size(); ++i) fit_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < sorted.size(); i = next++) fit_one(i);
            });
        for (auto& t : pool) t.join();
    }

    bool any_ok = false;
    for (const auto& row : table.rows) any_ok |= row.fit.has_value();
    if (!any_ok) throw FitError("batch_fit: every year failed");
    return table;
}

// Year -> value series for a named parameter, including derived ones
// ("fugacity" = exp(mu/T) for Fermi-Dirac tables, "r_squared",
// "durbin_watson" for any model).
inline std::map<int, double> param_time_series(const YearlyFitTable& table,
                                               const std::string& param_name) {
    bool is_fd = table.model_id == ModelId::fd_ccdf || table.model_id == ModelId::fd_pdf;
    auto extract = [&](const FitResult& fit) -> double {
        if (param_name == "r_squared") return fit.r_squared;
        if (param_name == "durbin_watson") return fit.durbin_watson;
        if (table.model_id == ModelId::logistic) {
            const auto& p = std::get<LogisticParams>(fit.params);
            if (param_name == "a") return p.a;
            if (param_name == "b") return p.b;
            if (param_name == "c") return p.c;
        } else if (is_fd) {
            const auto& p = std::get<FermiDiracParams>(fit.params);
            if (param_name == "g") return p.g;
            if (param_name == "T") return p.T;
            if (param_name == "mu") return p.mu;
            if (param_name == "fugacity") return fugacity(p.mu, p.T);
        } else {
            const auto& p = std::get<PolynomialParams>(fit.params);
            if (!param_name.empty() && param_name[0] == 'a') {
                int idx = std::stoi(param_name.substr(1));
                if (idx >= 0 && idx <= p.degree()) return p.coeffs[idx];
            }
        }
        throw DomainError("param_time_series: unknown parameter '" + param_name +
                          "' for model " + to_string(table.model_id));
    };
    std::map<int, double> out;
    for (const auto& row : table.rows)
        if (row.fit) out.emplace(row.year, extract(*row.fit));
    if (out.empty())
        throw DomainError("param_time_series: no successful fits in table");
    return out;
}

struct ReportEntry {
    std::string param_name;
    Indicator indicator = Indicator::exports;
    double r = 0.0;
    double t = 0.0;
    int n = 0;
    std::vector<int> years_used;
};

struct CorrelationReport {
    std::vector<ReportEntry> entries;
};

using ParamIndicatorMapping = std::vector<std::pair<std::string, Indicator>>;

// The parameter-indicator pairings correlated by default.
inline ParamIndicatorMapping default_fd_mapping() {
    return {{"mu", Indicator::exports},
            {"g", Indicator::gini},
            {"fugacity", Indicator::inflation},
            {"T", Indicator::income_per_capita}};
}

inline CorrelationReport build_report(const YearlyFitTable& fd_table,
                                      const std::vector<MacroSeries>& macro_sets,
                                      const ParamIndicatorMapping& mapping =
                                          default_fd_mapping()) {
    CorrelationReport report;
    std::string last_error = "no macro series supplied";
    for (const auto& [param, indicator] : mapping) {
        auto macro_it = std::find_if(macro_sets.begin(), macro_sets.end(),
                                     [&, ind = indicator](const MacroSeries& m) {
                                         return m.indicator() == ind;
                                     });
        if (macro_it == macro_sets.end()) continue;
        try {
            auto series = param_time_series(fd_table, param);
            PairedSeries paired = pair_by_year(series, macro_it->samples());
            if (paired.labels.size() < 3)
                throw InsufficientDataError("fewer than 3 overlapping years");
            ReportEntry entry;
            entry.param_name = param;
            entry.indicator = indicator;
            entry.r = pearson_r(paired.xs, paired.ys);
            entry.t = two_sample_t(paired.xs, paired.ys);
            entry.n = static_cast<int>(paired.labels.size());
            entry.years_used = paired.labels;
            report.entries.push_back(std::move(entry));
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    if (report.entries.empty())
        throw DomainError("build_report: no pairing succeeded (" + last_error + ")");
    return report;
}

}  // namespace econofit
