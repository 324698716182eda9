// econofit: distribution-fitting toolkit for decile income tables.
//
// Subcommands:
//   fit        batch-fit a model over every year in a decile CSV
//   dynamic    growth-decile transform between two years (+ cubic fit)
//   correlate  correlate fitted parameters with macro indicators
//   ramsey     closed-form consumption paths from the Euler equation
//   gini       Gini coefficient per year from mean-decile rows
//
// Exit codes: 0 success, 1 validation/input error, 2 fit/domain failure.
// Errors are emitted as one JSON object on stderr. Reports are written to a
// temp file and renamed on success, so failures never leave partial output.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "econofit/data_model.hpp"
#include "econofit/fitting.hpp"
#include "econofit/macro.hpp"
#include "econofit/models.hpp"
#include "econofit/ramsey.hpp"
#include "econofit/stats.hpp"
#include "econofit/transforms.hpp"

using json = nlohmann::ordered_json;
using namespace econofit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFit = 2;

[[noreturn]] void fail(int code, const std::string& type, const std::string& message) {
    json err;
    err["error"] = message;
    err["type"] = type;
    std::cerr << err.dump() << '\n';
    std::exit(code);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good())
        fail(kExitValidation, "io", "cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// All report writes go through here: temp file + rename keeps partial
// output off disk on any failure.
void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out.good())
            fail(kExitValidation, "io", "cannot write output file: " + path);
        out << content;
        if (!out.good())
            fail(kExitValidation, "io", "write failed: " + path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) fail(kExitValidation, "io", "rename failed: " + path + " (" + ec.message() + ")");
}

unsigned thread_cap() {
    if (const char* env = std::getenv("ECONOFIT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

ModelId parse_model(const std::string& name) {
    if (name == "logistic") return ModelId::logistic;
    if (name == "fd_ccdf") return ModelId::fd_ccdf;
    if (name == "fd_pdf") return ModelId::fd_pdf;
    if (name == "polynomial") return ModelId::polynomial;
    fail(kExitValidation, "validation", "unknown model: " + name);
}

json params_to_json(const FitResult& fit) {
    json out;
    if (const auto* l = std::get_if<LogisticParams>(&fit.params)) {
        out["a"] = l->a;
        out["b"] = l->b;
        out["c"] = l->c;
    } else if (const auto* f = std::get_if<FermiDiracParams>(&fit.params)) {
        out["g"] = f->g;
        out["T"] = f->T;
        out["mu"] = f->mu;
        out["fugacity"] = fugacity(f->mu, f->T);
    } else {
        const auto& p = std::get<PolynomialParams>(fit.params);
        for (std::size_t i = 0; i < p.coeffs.size(); ++i)
            out["a" + std::to_string(i)] = p.coeffs[i];
    }
    return out;
}

json fit_to_json(const FitResult& fit) {
    json out;
    out["model"] = to_string(fit.model_id);
    out["params"] = params_to_json(fit);
    out["std_errors"] = fit.std_errors;
    out["t_values"] = fit.t_values;
    out["r_squared"] = fit.r_squared;
    out["durbin_watson"] = fit.durbin_watson;
    out["sse"] = fit.sse;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    return out;
}

std::string table_to_csv(const YearlyFitTable& table) {
    std::ostringstream out;
    out.precision(17);
    // Collect parameter column names from the first successful row.
    std::vector<std::string> cols;
    for (const auto& row : table.rows)
        if (row.fit) {
            json first = params_to_json(*row.fit);
            for (const auto& [k, v] : first.items()) cols.push_back(k);
            break;
        }
    out << "year";
    for (const auto& c : cols) out << ',' << c;
    out << ",r_squared,durbin_watson,error\n";
    for (const auto& row : table.rows) {
        out << row.year;
        if (row.fit) {
            json p = params_to_json(*row.fit);
            for (const auto& c : cols) out << ',' << p[c].get<double>();
            out << ',' << row.fit->r_squared << ',' << row.fit->durbin_watson << ',';
        } else {
            for (std::size_t i = 0; i < cols.size() + 2; ++i) out << ',';
            out << row.error;
        }
        out << '\n';
    }
    return out.str();
}

// YearlyFitTable from already-fitted Fermi-Dirac parameter rows
// (year,g,T,mu), for correlating published tables without refitting.
YearlyFitTable load_fd_params(const std::string& path) {
    YearlyFitTable table;
    table.model_id = ModelId::fd_ccdf;
    std::istringstream in(read_file(path));
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
            throw ParseError("expected 4 fields (year,g,T,mu), got " +
                                 std::to_string(f.size()),
                             lineno);
        YearlyFitRow row;
        row.year = detail::parse_int(f[0], lineno);
        FitResult fit;
        fit.model_id = ModelId::fd_ccdf;
        fit.params = FermiDiracParams{detail::parse_real(f[1], lineno),
                                      detail::parse_real(f[2], lineno),
                                      detail::parse_real(f[3], lineno)};
        fit.converged = true;
        row.fit = std::move(fit);
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty())
        throw ParseError("fd-params CSV contains no data rows");
    return table;
}

struct FitArgs {
    std::string model = "fd_ccdf";
    std::string in_path;
    std::string out_path;
    std::string format = "json";
    std::string kind = "mean";
    int degree = 3;
    bool multi_start = false;
};

void emit_plot_files(const std::string& out_path, const YearlyFitTable& table,
                     const std::vector<DecileSeries>& series,
                     const TransformConfig& tc) {
    std::ostringstream points, curve;
    points.precision(17);
    curve.precision(17);
    points << "year,x,p\n";
    curve << "year,x,p\n";
    for (const auto& row : table.rows) {
        if (!row.fit) continue;
        auto it = std::find_if(series.begin(), series.end(), [&](const DecileSeries& s) {
            return s.year() == row.year;
        });
        if (it == series.end()) continue;
        ProbePointSet pts = build_fit_points(*it, tc);
        for (const auto& pt : pts.points())
            points << row.year << ',' << pt.x << ',' << pt.p << '\n';
        double lo = pts.points().front().x, hi = pts.points().back().x;
        for (int i = 0; i < 200; ++i) {
            double x = lo + (hi - lo) * i / 199.0;
            curve << row.year << ',' << x << ','
                  << model_eval(row.fit->model_id, row.fit->params, x) << '\n';
        }
    }
    write_file(out_path + ".points.csv", points.str());
    write_file(out_path + ".curve.csv", curve.str());
}

int cmd_fit(const FitArgs& args) {
    ModelId model = parse_model(args.model);
    auto series = parse_decile_csv(read_file(args.in_path));
    std::vector<DecileSeries> selected;
    for (auto& s : series)
        if (detail::to_string(s.kind()) == args.kind) selected.push_back(std::move(s));
    if (selected.empty())
        throw ValidationError("no series of kind '" + args.kind + "' in " + args.in_path);

    TransformConfig tc = default_transform(model);
    tc.poly_degree = args.degree;
    FitConfig fc;
    fc.multi_start = args.multi_start;
    auto table = batch_fit(selected, model, tc, fc, thread_cap());

    json report;
    report["model"] = to_string(model);
    report["kind"] = args.kind;
    report["unit"] = table.unit;
    report["years"] = json::array();
    for (const auto& row : table.rows) {
        json entry;
        entry["year"] = row.year;
        if (row.fit)
            entry["fit"] = fit_to_json(*row.fit);
        else
            entry["error"] = row.error;
        report["years"].push_back(std::move(entry));
    }
    write_file(args.out_path,
               args.format == "csv" ? table_to_csv(table) : report.dump(2) + "\n");
    emit_plot_files(args.out_path, table, selected, tc);
    return kExitOk;
}

struct DynamicArgs {
    std::string in_path;
    std::string out_path;
    int base_year = 0;
    int later_year = 0;
    bool all_pairs = false;
    bool endpoints = false;
    int degree = 3;
    double deflator = 0.0;       // price-level ratio P_later / P_base
    double deflator_pct = 0.0;   // same, given as percent change
};

json growth_pair_json(const DecileSeries& base, const DecileSeries& later,
                      std::optional<double> deflator, int degree) {
    auto [growth, pts] = build_growth_points(base, later, deflator);
    json entry;
    entry["base_year"] = growth.base_year;
    entry["later_year"] = growth.later_year;
    entry["basis"] = detail::to_string(growth.basis);
    entry["deltas_sorted"] = growth.deltas_sorted;
    entry["cumulated"] = growth.cumulated;
    try {
        entry["fit"] = fit_to_json(fit_polynomial(pts, degree));
    } catch (const Error& e) {
        entry["fit_error"] = e.what();
    }
    return entry;
}

int cmd_dynamic(const DynamicArgs& args) {
    auto series = parse_decile_csv(read_file(args.in_path));
    auto groups = split_by_unit(std::move(series));
    if (groups.empty()) throw ValidationError("no series in " + args.in_path);
    if (groups.size() > 1)
        throw IncompatibleSeriesError(
            "input mixes units/kinds; growth pairs must share one unit");
    auto& list = groups.front();

    std::optional<double> deflator;
    if (args.deflator > 0.0) deflator = args.deflator;
    if (args.deflator_pct != 0.0) {
        if (deflator) throw ValidationError("give --deflate or --deflate-percent, not both");
        deflator = 1.0 + args.deflator_pct / 100.0;
    }

    json report;
    report["pairs"] = json::array();
    auto find_year = [&](int y) -> const DecileSeries& {
        auto it = std::find_if(list.begin(), list.end(),
                               [&](const DecileSeries& s) { return s.year() == y; });
        if (it == list.end())
            throw ValidationError("year " + std::to_string(y) + " not present in input");
        return *it;
    };

    if (args.all_pairs) {
        for (std::size_t i = 0; i + 1 < list.size(); ++i)
            report["pairs"].push_back(
                growth_pair_json(list[i], list[i + 1], deflator, args.degree));
    } else if (args.endpoints) {
        if (list.size() < 2)
            throw ValidationError("--endpoints needs at least two years");
        report["pairs"].push_back(
            growth_pair_json(list.front(), list.back(), deflator, args.degree));
    } else {
        if (args.base_year == args.later_year)
            throw ValidationError("base and later year must differ");
        report["pairs"].push_back(growth_pair_json(
            find_year(args.base_year), find_year(args.later_year), deflator, args.degree));
    }
    write_file(args.out_path, report.dump(2) + "\n");
    return kExitOk;
}

struct CorrelateArgs {
    std::string fd_params_path;
    std::string macro_path;
    std::string out_path;
    std::string format = "json";
};

int cmd_correlate(const CorrelateArgs& args) {
    auto table = load_fd_params(args.fd_params_path);
    auto macro = parse_macro_csv(read_file(args.macro_path));
    auto report = build_report(table, macro);

    json out;
    out["entries"] = json::array();
    for (const auto& e : report.entries) {
        json entry;
        entry["param"] = e.param_name;
        entry["indicator"] = detail::to_string(e.indicator);
        entry["r"] = e.r;
        entry["t"] = e.t;
        entry["n"] = e.n;
        entry["years"] = e.years_used;
        out["entries"].push_back(std::move(entry));
    }
    if (args.format == "csv") {
        std::ostringstream csv;
        csv.precision(17);
        csv << "param,indicator,r,t,n\n";
        for (const auto& e : report.entries)
            csv << e.param_name << ',' << detail::to_string(e.indicator) << ',' << e.r
                << ',' << e.t << ',' << e.n << '\n';
        write_file(args.out_path, csv.str());
    } else {
        write_file(args.out_path, out.dump(2) + "\n");
    }
    return kExitOk;
}

struct RamseyArgs {
    std::string family = "polynomial";
    std::string out_path;
    double beta = 0.0, r = 0.0;
    double p1 = -0.5, p2 = 0.0;
    double g = 1.0, kT = 1.0, mu = 0.0;
    double constant = 1.0;
    double c0 = 0.0;
    bool have_c0 = false;
    double t_start = 0.0, t_end = 1.0;
    int steps = 100;
};

int cmd_ramsey(const RamseyArgs& args) {
    UtilitySpec u;
    if (args.family == "polynomial")
        u.family = UtilityFamily::polynomial;
    else if (args.family == "fermi_dirac")
        u.family = UtilityFamily::fermi_dirac;
    else if (args.family == "bose_einstein")
        u.family = UtilityFamily::bose_einstein;
    else
        throw ValidationError("unknown utility family: " + args.family);
    u.p1 = args.p1;
    u.p2 = args.p2;
    u.g = args.g;
    u.kT = args.kT;
    u.mu = args.mu;

    PathSpec spec;
    spec.beta = args.beta;
    spec.r = args.r;
    spec.t_start = args.t_start;
    spec.t_end = args.t_end;
    spec.steps = args.steps;
    spec.constant = args.have_c0 ? constant_from_initial(u, args.c0, spec.beta, spec.r,
                                                         spec.t_start)
                                 : args.constant;
    write_file(args.out_path, path_to_csv(sample_path(u, spec)));
    return kExitOk;
}

struct GiniArgs {
    std::string in_path;
    std::string out_path;
};

int cmd_gini(const GiniArgs& args) {
    auto series = parse_decile_csv(read_file(args.in_path));
    json report;
    report["gini"] = json::array();
    bool any = false;
    for (const auto& s : series) {
        if (s.kind() != SeriesKind::mean) continue;
        json entry;
        entry["year"] = s.year();
        entry["gini"] = compute_gini(s);
        report["gini"].push_back(std::move(entry));
        any = true;
    }
    if (!any) throw ValidationError("no mean-decile series in " + args.in_path);
    write_file(args.out_path, report.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"econofit: income-distribution fitting toolkit"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a model to decile data, one row per year");
    fit->add_option("--model", fit_args.model,
                    "logistic | fd_ccdf | fd_pdf | polynomial");
    fit->add_option("--in", fit_args.in_path, "decile CSV")->required();
    fit->add_option("--out", fit_args.out_path, "report path")->required();
    fit->add_option("--format", fit_args.format, "json | csv");
    fit->add_option("--kind", fit_args.kind, "mean | upper_limit | lower_limit");
    fit->add_option("--degree", fit_args.degree, "polynomial degree");
    fit->add_flag("--multi-start", fit_args.multi_start, "grid of perturbed starts");

    DynamicArgs dyn_args;
    auto* dyn = app.add_subcommand("dynamic", "Growth-decile transform between years");
    dyn->add_option("--in", dyn_args.in_path, "decile CSV")->required();
    dyn->add_option("--out", dyn_args.out_path, "report path")->required();
    dyn->add_option("--base", dyn_args.base_year, "base year");
    dyn->add_option("--later", dyn_args.later_year, "later year");
    dyn->add_flag("--all-pairs", dyn_args.all_pairs, "every consecutive pair");
    dyn->add_flag("--endpoints", dyn_args.endpoints, "first and last year only");
    dyn->add_option("--degree", dyn_args.degree, "growth-fit polynomial degree");
    dyn->add_option("--deflate", dyn_args.deflator, "price-level ratio P_later/P_base");
    dyn->add_option("--deflate-percent", dyn_args.deflator_pct,
                    "price change in percent (converted to a ratio)");

    CorrelateArgs corr_args;
    auto* corr = app.add_subcommand("correlate",
                                    "Correlate Fermi-Dirac parameters with macro series");
    corr->add_option("--fd-params", corr_args.fd_params_path, "CSV year,g,T,mu")
        ->required();
    corr->add_option("--macro", corr_args.macro_path, "CSV indicator,year,value")
        ->required();
    corr->add_option("--out", corr_args.out_path, "report path")->required();
    corr->add_option("--format", corr_args.format, "json | csv");

    RamseyArgs ram_args;
    auto* ram = app.add_subcommand("ramsey", "Consumption path from the Euler equation");
    ram->add_option("--family", ram_args.family,
                    "polynomial | fermi_dirac | bose_einstein");
    ram->add_option("--out", ram_args.out_path, "CSV path (t,c)")->required();
    ram->add_option("--beta", ram_args.beta, "rate of time preference");
    ram->add_option("--r", ram_args.r, "interest rate");
    ram->add_option("--p1", ram_args.p1, "quadratic utility p1 (nonzero)");
    ram->add_option("--p2", ram_args.p2, "quadratic utility p2");
    ram->add_option("--g", ram_args.g, "degeneracy");
    ram->add_option("--kT", ram_args.kT, "temperature");
    ram->add_option("--mu", ram_args.mu, "chemical potential");
    ram->add_option("--constant", ram_args.constant, "integration constant");
    auto* c0opt = ram->add_option("--c0", ram_args.c0,
                                  "initial consumption (overrides --constant)");
    ram->add_option("--t-start", ram_args.t_start, "start time");
    ram->add_option("--t-end", ram_args.t_end, "end time");
    ram->add_option("--steps", ram_args.steps, "grid steps");

    GiniArgs gini_args;
    auto* gini = app.add_subcommand("gini", "Gini coefficient per mean-decile year");
    gini->add_option("--in", gini_args.in_path, "decile CSV")->required();
    gini->add_option("--out", gini_args.out_path, "report path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::ostringstream msg;
        msg << e.what();
        json err;
        err["error"] = msg.str();
        err["type"] = "usage";
        std::cerr << err.dump() << '\n';
        return kExitValidation;
    }

    try {
        ram_args.have_c0 = c0opt->count() > 0;
        if (fit->parsed()) return cmd_fit(fit_args);
        if (dyn->parsed()) return cmd_dynamic(dyn_args);
        if (corr->parsed()) return cmd_correlate(corr_args);
        if (ram->parsed()) return cmd_ramsey(ram_args);
        if (gini->parsed()) return cmd_gini(gini_args);
    } catch (const ParseError& e) {
        fail(kExitValidation, "parse", e.what());
    } catch (const ValidationError& e) {
        fail(kExitValidation, "validation", e.what());
    } catch (const IncompatibleSeriesError& e) {
        fail(kExitValidation, "incompatible_series", e.what());
    } catch (const InsufficientDataError& e) {
        fail(kExitValidation, "insufficient_data", e.what());
    } catch (const FitError& e) {
        fail(kExitFit, "fit", e.what());
    } catch (const DomainError& e) {
        fail(kExitFit, "domain", e.what());
    } catch (const Error& e) {
        fail(kExitFit, "error", e.what());
    }
    return kExitValidation;
}
