#pragma once

// Decile tables, binned income tables, and macro-indicator series,
// plus their CSV schemas.
//
// Decile CSV:  year,variable,kind,basis,unit,d1,...,d10   (d10 may be blank
//              for upper/lower-limit rows where the top decile is absent)
// Binned CSV:  year,lower,upper,share                     (blank upper = open)
// Macro CSV:   indicator,year,value

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "econofit/errors.hpp"

namespace econofit {

enum class Variable { income, expenditure, wealth, pension };
enum class SeriesKind { mean, upper_limit, lower_limit };
enum class Basis { nominal, real };
enum class Indicator {
    exports,
    gini,
    inflation,
    income_per_capita,
    money_stock,
    agent_count
};

namespace detail {

inline std::string to_string(Variable v) {
    switch (v) {
        case Variable::income: return "income";
        case Variable::expenditure: return "expenditure";
        case Variable::wealth: return "wealth";
        case Variable::pension: return "pension";
    }
    return "?";
}

inline std::string to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::mean: return "mean";
        case SeriesKind::upper_limit: return "upper_limit";
        case SeriesKind::lower_limit: return "lower_limit";
    }
    return "?";
}

inline std::string to_string(Basis b) {
    return b == Basis::nominal ? "nominal" : "real";
}

inline std::string to_string(Indicator i) {
    switch (i) {
        case Indicator::exports: return "exports";
        case Indicator::gini: return "gini";
        case Indicator::inflation: return "inflation";
        case Indicator::income_per_capita: return "income_per_capita";
        case Indicator::money_stock: return "money_stock";
        case Indicator::agent_count: return "agent_count";
    }
    return "?";
}

inline Variable parse_variable(std::string_view s, int line) {
    if (s == "income") return Variable::income;
    if (s == "expenditure") return Variable::expenditure;
    if (s == "wealth") return Variable::wealth;
    if (s == "pension") return Variable::pension;
    throw ParseError("unknown variable '" + std::string(s) + "'", line);
}

inline SeriesKind parse_kind(std::string_view s, int line) {
    if (s == "mean") return SeriesKind::mean;
    if (s == "upper_limit") return SeriesKind::upper_limit;
    if (s == "lower_limit") return SeriesKind::lower_limit;
    throw ParseError("unknown kind '" + std::string(s) + "'", line);
}

inline Basis parse_basis(std::string_view s, int line) {
    if (s == "nominal") return Basis::nominal;
    if (s == "real") return Basis::real;
    throw ParseError("unknown basis '" + std::string(s) + "'", line);
}

inline Indicator parse_indicator(std::string_view s, int line) {
    if (s == "exports") return Indicator::exports;
    if (s == "gini") return Indicator::gini;
    if (s == "inflation") return Indicator::inflation;
    if (s == "income_per_capita") return Indicator::income_per_capita;
    if (s == "money_stock") return Indicator::money_stock;
    if (s == "agent_count") return Indicator::agent_count;
    throw ParseError("unknown indicator '" + std::string(s) + "'", line);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string trim(std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline double parse_real(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("trailing junk in number '" + s + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line);
    }
}

inline int parse_int(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw ParseError("trailing junk in integer '" + s + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("not an integer: '" + s + "'", line);
    }
}

}  // namespace detail

// One year's decile values for one variable and measurement kind.
// Immutable after construction; construction validates all invariants.
class DecileSeries {
public:
    DecileSeries(int year, Variable variable, SeriesKind kind, Basis basis,
                 std::string unit, std::vector<double> values)
        : year_(year),
          variable_(variable),
          kind_(kind),
          basis_(basis),
          unit_(std::move(unit)),
          values_(std::move(values)) {
        if (values_.size() != 9 && values_.size() != 10)
            throw ValidationError("decile series must have 9 or 10 values, got " +
                                  std::to_string(values_.size()));
        if (kind_ == SeriesKind::mean && values_.size() != 10)
            throw ValidationError("mean series must have 10 deciles");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!(values_[i] > 0.0))
                throw ValidationError("decile " + std::to_string(i + 1) +
                                      " is not strictly positive");
            if (i > 0 && values_[i] < values_[i - 1])
                throw ValidationError(
                    "deciles not non-decreasing: d" + std::to_string(i) + "=" +
                    std::to_string(values_[i - 1]) + " > d" + std::to_string(i + 1) +
                    "=" + std::to_string(values_[i]));
        }
    }

    int year() const { return year_; }
    Variable variable() const { return variable_; }
    SeriesKind kind() const { return kind_; }
    Basis basis() const { return basis_; }
    const std::string& unit() const { return unit_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    bool compatible_with(const DecileSeries& other) const {
        return variable_ == other.variable_ && kind_ == other.kind_ &&
               unit_ == other.unit_ && values_.size() == other.values_.size();
    }

    bool operator==(const DecileSeries& other) const = default;

private:
    int year_;
    Variable variable_;
    SeriesKind kind_;
    Basis basis_;
    std::string unit_;
    std::vector<double> values_;
};

struct IncomeBin {
    double lower = 0.0;
    std::optional<double> upper;  // nullopt = open-ended final bin
    double share = 0.0;

    bool operator==(const IncomeBin&) const = default;
};

// Population shares over contiguous income bins for one year.
class BinnedIncomeTable {
public:
    BinnedIncomeTable(int year, std::vector<IncomeBin> bins)
        : year_(year), bins_(std::move(bins)) {
        if (bins_.empty()) throw ValidationError("binned table has no bins");
        double sum = 0.0;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const auto& b = bins_[i];
            if (b.share < 0.0) throw ValidationError("negative share in bin");
            if (b.upper && !(*b.upper > b.lower))
                throw ValidationError("bin edges not strictly increasing");
            if (!b.upper && i + 1 != bins_.size())
                throw ValidationError("only the final bin may be open-ended");
            if (i > 0) {
                const auto& prev = bins_[i - 1];
                if (!prev.upper || std::abs(*prev.upper - b.lower) > 1e-9 * std::max(1.0, b.lower))
                    throw ValidationError("bins not contiguous at edge " +
                                          std::to_string(b.lower));
            }
            sum += b.share;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError("bin shares sum to " + std::to_string(sum) +
                                  ", expected 1");
        // Normalize so downstream code can rely on an exact unit sum.
        for (auto& b : bins_) b.share /= sum;
    }

    int year() const { return year_; }
    const std::vector<IncomeBin>& bins() const { return bins_; }

    bool operator==(const BinnedIncomeTable&) const = default;

private:
    int year_;
    std::vector<IncomeBin> bins_;
};

// Year-indexed external indicator (exports, Gini, inflation, ...).
class MacroSeries {
public:
    explicit MacroSeries(Indicator indicator) : indicator_(indicator) {}

    MacroSeries(Indicator indicator, std::map<int, double> samples)
        : indicator_(indicator), samples_(std::move(samples)) {}

    void insert(int year, double value) {
        auto [it, inserted] = samples_.emplace(year, value);
        (void)it;
        if (!inserted)
            throw ValidationError("duplicate sample for " + detail::to_string(indicator_) +
                                  " year " + std::to_string(year));
    }

    Indicator indicator() const { return indicator_; }
    const std::map<int, double>& samples() const { return samples_; }

    bool operator==(const MacroSeries&) const = default;

private:
    Indicator indicator_;
    std::map<int, double> samples_;
};

// --- CSV ingestion -------------------------------------------------------

inline std::vector<DecileSeries> parse_decile_csv(std::istream& in) {
    std::vector<DecileSeries> out;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("year,", 0) == 0) continue;  // header row
        }
        auto f = detail::split_csv_line(line);
        if (f.size() < 14 || f.size() > 15)
            throw ParseError("expected 14-15 fields, got " + std::to_string(f.size()),
                             lineno);
        int year = detail::parse_int(f[0], lineno);
        auto variable = detail::parse_variable(f[1], lineno);
        auto kind = detail::parse_kind(f[2], lineno);
        auto basis = detail::parse_basis(f[3], lineno);
        std::vector<double> values;
        for (std::size_t i = 5; i < f.size(); ++i) {
            if (detail::trim(f[i]).empty()) {
                if (i + 1 != f.size())
                    throw ParseError("only the final decile may be blank", lineno);
                break;
            }
            values.push_back(detail::parse_real(f[i], lineno));
        }
        try {
            out.emplace_back(year, variable, kind, basis, f[4], std::move(values));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<DecileSeries> parse_decile_csv(const std::string& text) {
    std::istringstream ss(text);
    return parse_decile_csv(ss);
}

inline std::string serialize_decile_csv(const std::vector<DecileSeries>& list) {
    std::ostringstream out;
    out.precision(17);
    out << "year,variable,kind,basis,unit,d1,d2,d3,d4,d5,d6,d7,d8,d9,d10\n";
    for (const auto& s : list) {
        out << s.year() << ',' << detail::to_string(s.variable()) << ','
            << detail::to_string(s.kind()) << ',' << detail::to_string(s.basis())
            << ',' << s.unit();
        for (double v : s.values()) out << ',' << v;
        if (s.size() == 9) out << ',';
        out << '\n';
    }
    return out.str();
}

inline BinnedIncomeTable parse_binned_csv(std::istream& in) {
    std::vector<IncomeBin> bins;
    std::optional<int> year;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("year,", 0) == 0) continue;
        }
        auto f = detail::split_csv_line(line);
        if (f.size() != 4)
            throw ParseError("expected 4 fields, got " + std::to_string(f.size()), lineno);
        int y = detail::parse_int(f[0], lineno);
        if (year && *year != y)
            throw ValidationError("binned table mixes years " + std::to_string(*year) +
                                  " and " + std::to_string(y));
        year = y;
        IncomeBin b;
        b.lower = detail::parse_real(f[1], lineno);
        if (!detail::trim(f[2]).empty()) b.upper = detail::parse_real(f[2], lineno);
        b.share = detail::parse_real(f[3], lineno);
        bins.push_back(b);
    }
    if (!year) throw ParseError("binned CSV contains no data rows");
    return BinnedIncomeTable(*year, std::move(bins));
}

inline BinnedIncomeTable parse_binned_csv(const std::string& text) {
    std::istringstream ss(text);
    return parse_binned_csv(ss);
}

inline std::vector<MacroSeries> parse_macro_csv(std::istream& in) {
    std::map<Indicator, MacroSeries> by_indicator;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("indicator,", 0) == 0) continue;
        }
        auto f = detail::split_csv_line(line);
        if (f.size() != 3)
            throw ParseError("expected 3 fields, got " + std::to_string(f.size()), lineno);
        auto ind = detail::parse_indicator(f[0], lineno);
        int year = detail::parse_int(f[1], lineno);
        double value = detail::parse_real(f[2], lineno);
        auto [it, _] = by_indicator.try_emplace(ind, ind);
        try {
            it->second.insert(year, value);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    std::vector<MacroSeries> out;
    out.reserve(by_indicator.size());
    for (auto& [ind, series] : by_indicator) out.push_back(std::move(series));
    return out;
}

inline std::vector<MacroSeries> parse_macro_csv(const std::string& text) {
    std::istringstream ss(text);
    return parse_macro_csv(ss);
}

inline std::string serialize_macro_csv(const std::vector<MacroSeries>& list) {
    std::ostringstream out;
    out.precision(17);
    out << "indicator,year,value\n";
    for (const auto& s : list)
        for (const auto& [year, value] : s.samples())
            out << detail::to_string(s.indicator()) << ',' << year << ',' << value << '\n';
    return out.str();
}

// Split a heterogeneous pile of series into groups sharing
// (variable, kind, unit), each sorted by year. Currency redenominations
// land in separate groups; cross-unit analysis never happens silently.
inline std::vector<std::vector<DecileSeries>> split_by_unit(
    std::vector<DecileSeries> series) {
    std::stable_sort(series.begin(), series.end(),
                     [](const DecileSeries& a, const DecileSeries& b) {
                         return a.year() < b.year();
                     });
    std::vector<std::vector<DecileSeries>> groups;
    for (auto& s : series) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
            return g.front().variable() == s.variable() && g.front().kind() == s.kind() &&
                   g.front().unit() == s.unit();
        });
        if (it == groups.end())
            groups.push_back({std::move(s)});
        else
            it->push_back(std::move(s));
    }
    return groups;
}

}  // namespace econofit
