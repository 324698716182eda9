#pragma once

// Least-squares parameter estimation in fit-space: orthogonal-factorization
// OLS for polynomials, damped Gauss-Newton (Levenberg-Marquardt) with
// analytic Jacobians for the sigmoid families, plus initialization
// heuristics and full per-fit diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "econofit/linalg.hpp"
#include "econofit/models.hpp"
#include "econofit/stats.hpp"
#include "econofit/transforms.hpp"

namespace econofit {

struct FitConfig {
    int max_iterations = 200;
    double rel_sse_tolerance = 1e-12;
    double initial_damping = 1e-3;
    double damping_up = 10.0;
    double damping_down = 0.1;
    bool multi_start = false;  // deterministic +-50% grid around the init
};

struct FitResult {
    ModelId model_id = ModelId::polynomial;
    ModelParams params;
    double r_squared = 0.0;
    std::vector<double> residuals;   // fit-space, ordered by ascending x
    std::vector<double> std_errors;  // per parameter
    std::vector<double> t_values;    // params / std_errors
    double durbin_watson = 0.0;
    int iterations = 0;
    bool converged = false;
    double sse = 0.0;
    std::vector<double> sse_trace;  // SSE after each accepted step
};

namespace detail {

inline std::vector<double> flatten(const ModelParams& p) {
    if (auto* l = std::get_if<LogisticParams>(&p)) return {l->a, l->b, l->c};
    if (auto* f = std::get_if<FermiDiracParams>(&p)) return {f->g, f->T, f->mu};
    return std::get<PolynomialParams>(p).coeffs;
}

inline ModelParams unflatten(ModelId id, const std::vector<double>& v) {
    switch (id) {
        case ModelId::logistic:
            return LogisticParams{v[0], v[1], v[2]};
        case ModelId::fd_ccdf:
        case ModelId::fd_pdf:
            return FermiDiracParams{v[0], v[1], v[2]};
        case ModelId::polynomial:
            return PolynomialParams{v};
    }
    throw DomainError("unflatten: unknown model id");
}

inline void check_fit_space(ModelId id, const ProbePointSet& points) {
    auto need = [&](AxisScale x, AxisScale p, const char* what) {
        if (points.x_scale() != x || points.p_scale() != p)
            throw DomainError(std::string("fit_nls: ") + to_string(id) +
                              " expects " + what + " scaled points");
    };
    switch (id) {
        case ModelId::logistic:
        case ModelId::fd_pdf:
            need(AxisScale::log10, AxisScale::log10, "log10/log10");
            break;
        case ModelId::fd_ccdf:
            need(AxisScale::ln, AxisScale::ln, "ln/ln");
            break;
        case ModelId::polynomial:
            break;
    }
}

// Residual diagnostics shared by both fitters. Residuals are observed
// minus predicted, in ascending-x order (the sets are already x-sorted).
inline void finish_diagnostics(FitResult& fit, const ProbePointSet& points,
                               const std::vector<double>& cov_diag_unscaled) {
    const auto& pts = points.points();
    const std::size_t n = pts.size();
    const std::size_t k = cov_diag_unscaled.size();
    fit.residuals.resize(n);
    std::vector<double> observed(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
        observed[i] = pts[i].p;
        predicted[i] = model_eval(fit.model_id, fit.params, pts[i].x);
        fit.residuals[i] = observed[i] - predicted[i];
    }
    fit.sse = 0.0;
    for (double r : fit.residuals) fit.sse += r * r;
    fit.r_squared = r_squared(observed, predicted);
    // A perfect fit has no residual autocorrelation to measure; report the
    // no-autocorrelation value instead of failing the whole fit.
    fit.durbin_watson = fit.sse > 0.0 ? durbin_watson(fit.residuals) : 2.0;

    double s2 = n > k ? fit.sse / static_cast<double>(n - k) : 0.0;
    auto theta = flatten(fit.params);
    fit.std_errors.resize(k);
    fit.t_values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        fit.std_errors[j] = std::sqrt(std::max(0.0, cov_diag_unscaled[j] * s2));
        fit.t_values[j] = fit.std_errors[j] > 0.0 ? theta[j] / fit.std_errors[j]
                                                  : std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace detail

// Ordinary least squares on the monomial basis, solved by Householder QR.
inline FitResult fit_polynomial(const ProbePointSet& points, int degree) {
    if (degree < 1 || degree > kMaxPolyDegree)
        throw DomainError("fit_polynomial: degree must be in [1, " +
                          std::to_string(kMaxPolyDegree) + "]");
    const auto& pts = points.points();
    const std::size_t n = pts.size();
    const std::size_t k = static_cast<std::size_t>(degree) + 1;
    if (n < k + 1)
        throw InsufficientDataError("fit_polynomial: need at least degree+2 points");

    linalg::Matrix A(n, k);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pw = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            A(i, j) = pw;
            pw *= pts[i].x;
        }
        b[i] = pts[i].p;
    }
    std::vector<double> cov_diag;
    std::vector<double> coeffs = linalg::qr_least_squares(std::move(A), std::move(b),
                                                          &cov_diag);
    FitResult fit;
    fit.model_id = ModelId::polynomial;
    fit.params = PolynomialParams{std::move(coeffs)};
    fit.iterations = 1;
    fit.converged = true;
    detail::finish_diagnostics(fit, points, cov_diag);
    fit.sse_trace = {fit.sse};
    return fit;
}

// Initialization heuristics for the sigmoid families.
inline ModelParams default_init(ModelId id, const ProbePointSet& points) {
    const auto& pts = points.points();
    double pmin = pts.front().p, pmax = pts.front().p;
    for (const auto& pt : pts) {
        pmin = std::min(pmin, pt.p);
        pmax = std::max(pmax, pt.p);
    }
    if (pmax - pmin == 0.0)
        throw DomainError("default_init: constant probabilities (flat data)");
    // Sign of the p-vs-x trend from the endpoints.
    double slope = pts.back().p - pts.front().p;

    if (id == ModelId::logistic) {
        double a = pmax;
        double half = a / 2.0;
        // Two points straddling p = a/2 (by p value along x), then the
        // linearization ln(a/p - 1) = (x - b)/c through them.
        std::size_t i = 0;
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            if ((pts[j].p - half) * (pts[j + 1].p - half) <= 0.0) {
                i = j;
                break;
            }
            i = j;
        }
        auto lin = [&](double p) {
            double arg = a / p - 1.0;
            return std::log(std::max(arg, 1e-12));
        };
        double x1 = pts[i].x, x2 = pts[i + 1].x;
        double l1 = lin(pts[i].p), l2 = lin(pts[i + 1].p);
        double m = (l2 - l1) / (x2 - x1);
        if (m == 0.0) m = slope > 0.0 ? -1.0 : 1.0;
        double c = 1.0 / m;
        double b = x1 - l1 * c;
        return LogisticParams{a, b, c};
    }

    // Fermi-Dirac families: g from the plateau, mu at half-occupancy,
    // T from the interquartile x spread.
    double g = pmax;
    double half = g / 2.0;
    std::size_t imu = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
        double d = std::abs(pts[j].p - half);
        if (d < best) {  // ties keep the lower index
            best = d;
            imu = j;
        }
    }
    std::size_t q1 = pts.size() / 4;
    std::size_t q3 = (3 * pts.size()) / 4;
    if (q3 >= pts.size()) q3 = pts.size() - 1;
    double T = (pts[q3].x - pts[q1].x) / 4.0;
    if (T == 0.0) T = 1.0;
    if (slope > 0.0) T = -T;  // rising p means negative temperature
    return FermiDiracParams{g, T, pts[imu].x};
}

namespace detail {

struct LmState {
    std::vector<double> theta;
    double sse = std::numeric_limits<double>::infinity();
};

inline double sse_at(ModelId id, const std::vector<double>& theta,
                     const ProbePointSet& points) {
    ModelParams p = unflatten(id, theta);
    double acc = 0.0;
    for (const auto& pt : points.points()) {
        double r = model_eval(id, p, pt.x) - pt.p;
        acc += r * r;
    }
    return acc;
}

// Core LM loop. Returns the best state reached; fills iterations/converged
// and the accepted-step SSE trace.
inline LmState lm_minimize(ModelId id, const ProbePointSet& points,
                           std::vector<double> theta, const FitConfig& cfg,
                           int& iterations, bool& converged,
                           std::vector<double>& trace) {
    const auto& pts = points.points();
    const std::size_t n = pts.size();
    const std::size_t k = theta.size();
    double lambda = cfg.initial_damping;
    double sse = sse_at(id, theta, points);
    if (!std::isfinite(sse)) throw FitError("fit_nls: non-finite SSE at init");
    trace.push_back(sse);
    converged = false;
    iterations = 0;

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        iterations = it;
        ModelParams p = unflatten(id, theta);
        linalg::Matrix JtJ(k, k);
        std::vector<double> Jtr(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double r = model_eval(id, p, pts[i].x) - pts[i].p;
            auto grad = model_gradient(id, p, pts[i].x);
            for (std::size_t a = 0; a < k; ++a) {
                Jtr[a] += grad[a] * r;
                for (std::size_t b = a; b < k; ++b) JtJ(a, b) += grad[a] * grad[b];
            }
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < a; ++b) JtJ(a, b) = JtJ(b, a);

        bool accepted = false;
        while (!accepted) {
            linalg::Matrix M = JtJ;
            // Marquardt scaling: damp each diagonal entry proportionally.
            for (std::size_t a = 0; a < k; ++a)
                M(a, a) += lambda * std::max(JtJ(a, a), 1e-30);
            std::vector<double> rhs(k), step;
            for (std::size_t a = 0; a < k; ++a) rhs[a] = -Jtr[a];
            if (!linalg::solve_square(M, rhs, step)) {
                lambda *= cfg.damping_up;
                if (lambda > 1e14) return {theta, sse};
                continue;
            }
            std::vector<double> trial(k);
            for (std::size_t a = 0; a < k; ++a) trial[a] = theta[a] + step[a];
            double trial_sse = sse_at(id, trial, points);
            if (!std::isfinite(trial_sse)) {
                lambda *= cfg.damping_up;
                if (lambda > 1e14)
                    throw FitError("fit_nls: diverged (non-finite SSE)");
                continue;
            }
            if (trial_sse <= sse * (1.0 + 1e-15)) {
                double rel = std::abs(sse - trial_sse) / std::max(sse, 1e-300);
                theta = std::move(trial);
                sse = std::min(trial_sse, sse);
                trace.push_back(sse);
                lambda = std::max(lambda * cfg.damping_down, 1e-16);
                accepted = true;
                if (rel < cfg.rel_sse_tolerance) {
                    converged = true;
                    return {theta, sse};
                }
            } else {
                lambda *= cfg.damping_up;
                if (lambda > 1e14) {
                    // Cannot improve from here: treat as converged at the
                    // local minimum.
                    converged = true;
                    return {theta, sse};
                }
            }
        }
    }
    return {theta, sse};
}

}  // namespace detail

// Levenberg-Marquardt fit of a sigmoid-family model in its fit space.
inline FitResult fit_nls(ModelId id, const ProbePointSet& points,
                         const FitConfig& cfg = {},
                         std::optional<ModelParams> init = std::nullopt) {
    if (id == ModelId::polynomial)
        throw DomainError("fit_nls: use fit_polynomial for polynomial models");
    detail::check_fit_space(id, points);
    if (points.size() < 4)
        throw InsufficientDataError("fit_nls: need at least 4 points");

    std::vector<double> theta0 = detail::flatten(init ? *init : default_init(id, points));

    std::vector<std::vector<double>> starts{theta0};
    if (cfg.multi_start) {
        // Fixed grid of +-50% perturbations, one parameter at a time.
        for (std::size_t j = 0; j < theta0.size(); ++j) {
            for (double f : {0.5, 1.5}) {
                auto t = theta0;
                t[j] *= f;
                starts.push_back(std::move(t));
            }
        }
    }

    FitResult fit;
    fit.model_id = id;
    detail::LmState best;
    int best_iters = 0;
    bool best_conv = false;
    std::vector<double> best_trace;
    for (const auto& start : starts) {
        int iters = 0;
        bool conv = false;
        std::vector<double> trace;
        detail::LmState s = detail::lm_minimize(id, points, start, cfg, iters, conv, trace);
        if (s.sse < best.sse) {
            best = std::move(s);
            best_iters = iters;
            best_conv = conv;
            best_trace = std::move(trace);
        }
    }
    fit.params = detail::unflatten(id, best.theta);
    fit.iterations = best_iters;
    fit.converged = best_conv;
    fit.sse_trace = std::move(best_trace);

    // Gauss-Newton covariance at the optimum: (J^T J)^-1 * s^2.
    const auto& pts = points.points();
    const std::size_t k = best.theta.size();
    linalg::Matrix JtJ(k, k);
    for (const auto& pt : pts) {
        auto grad = model_gradient(id, fit.params, pt.x);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) JtJ(a, b) += grad[a] * grad[b];
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) JtJ(a, b) = JtJ(b, a);
    std::vector<double> cov_diag(k, 0.0);
    if (!linalg::inverse_diag(JtJ, cov_diag)) cov_diag.assign(k, 0.0);
    detail::finish_diagnostics(fit, points, cov_diag);
    return fit;
}

}  // namespace econofit
