#pragma once

// Closed-form model evaluators with analytic parameter gradients, plus the
// thermodynamic-analogy quantities (temperature, fugacity, continuous
// occupation count).
//
// The logistic and Fermi-Dirac forms share one sigmoid shape
//     f(x) = plateau / (exp((x - location)/scale) + 1)
// evaluated on log axes. The published logistic coefficient tables only
// reproduce under this location/scale parametrization (b = location,
// c = scale), so that is the parametrization used throughout.

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "econofit/errors.hpp"

namespace econofit {

enum class ModelId { logistic, fd_ccdf, fd_pdf, polynomial };

inline std::string to_string(ModelId m) {
    switch (m) {
        case ModelId::logistic: return "logistic";
        case ModelId::fd_ccdf: return "fd_ccdf";
        case ModelId::fd_pdf: return "fd_pdf";
        case ModelId::polynomial: return "polynomial";
    }
    return "?";
}

struct LogisticParams {
    double a = 1.0;  // plateau of log10-probability
    double b = 0.0;  // location on the log10-x axis (midpoint, f = a/2)
    double c = -1.0; // scale; negative for a rising cdf
};

struct FermiDiracParams {
    double g = 1.0;   // degeneracy: plateau of log-probability
    double T = 1.0;   // temperature; may be negative for pdf fits
    double mu = 0.0;  // chemical potential: log-money level at half-occupancy
};

struct PolynomialParams {
    std::vector<double> coeffs;  // a0..ad, lowest degree first
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

using ModelParams = std::variant<LogisticParams, FermiDiracParams, PolynomialParams>;

inline constexpr int kMaxPolyDegree = 6;

namespace detail {

// 1/(1 + exp(e)), stable for any finite e.
inline double inv_logit(double e) {
    if (e >= 0.0) {
        double z = std::exp(-e);
        return z / (1.0 + z);
    }
    return 1.0 / (1.0 + std::exp(e));
}

// s(1-s) with s = inv_logit(e), computed without catastrophic cancellation.
inline double inv_logit_slope(double e) {
    double z = std::exp(-std::abs(e));
    double d = 1.0 + z;
    return z / (d * d);
}

// log(1 + exp(z)), overflow-safe.
inline double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace detail

// log10 C(X) = a / (exp((log10 X - b)/c) + 1)
inline double logistic_log_cdf(const LogisticParams& p, double log10_x) {
    return p.a * detail::inv_logit((log10_x - p.b) / p.c);
}

// ln Cbar(X) = g / (exp((ln X - mu)/T) + 1)
inline double fermi_dirac_log_ccdf(const FermiDiracParams& p, double ln_x) {
    return p.g * detail::inv_logit((ln_x - p.mu) / p.T);
}

// Same shape on log10 axes; T is typically negative for pdf fits.
inline double fermi_dirac_log_pdf(const FermiDiracParams& p, double x_star) {
    return p.g * detail::inv_logit((x_star - p.mu) / p.T);
}

inline double poly_eval(const PolynomialParams& p, double x) {
    double acc = 0.0;
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline double model_eval(ModelId id, const ModelParams& params, double x) {
    switch (id) {
        case ModelId::logistic:
            return logistic_log_cdf(std::get<LogisticParams>(params), x);
        case ModelId::fd_ccdf:
            return fermi_dirac_log_ccdf(std::get<FermiDiracParams>(params), x);
        case ModelId::fd_pdf:
            return fermi_dirac_log_pdf(std::get<FermiDiracParams>(params), x);
        case ModelId::polynomial:
            return poly_eval(std::get<PolynomialParams>(params), x);
    }
    throw DomainError("model_eval: unknown model id");
}

// d(model value)/d(each parameter), in the parameter order of the structs.
inline std::vector<double> model_gradient(ModelId id, const ModelParams& params,
                                          double x) {
    switch (id) {
        case ModelId::logistic: {
            const auto& p = std::get<LogisticParams>(params);
            double e = (x - p.b) / p.c;
            double s = detail::inv_logit(e);
            double sl = detail::inv_logit_slope(e);
            // f = a*s(e); ds/de = -s(1-s); de/db = -1/c; de/dc = -e/c
            return {s, p.a * sl / p.c, p.a * sl * e / p.c};
        }
        case ModelId::fd_ccdf:
        case ModelId::fd_pdf: {
            const auto& p = std::get<FermiDiracParams>(params);
            double e = (x - p.mu) / p.T;
            double s = detail::inv_logit(e);
            double sl = detail::inv_logit_slope(e);
            return {s, p.g * sl * e / p.T, p.g * sl / p.T};
        }
        case ModelId::polynomial: {
            const auto& p = std::get<PolynomialParams>(params);
            std::vector<double> grad(p.coeffs.size());
            double pw = 1.0;
            for (auto& gi : grad) {
                gi = pw;
                pw *= x;
            }
            return grad;
        }
    }
    throw DomainError("model_gradient: unknown model id");
}

// N(x0) = g*T*ln(1 + exp((mu - x0)/T)): expected count of agents above x0
// under the continuous Fermi-Dirac approximation.
inline double fd_continuous_count(double g, double T, double mu, double x0) {
    if (!(T > 0.0)) throw DomainError("fd_continuous_count: T must be positive");
    return g * T * detail::softplus((mu - x0) / T);
}

// T = M/N: money per agent.
inline double temperature_from_money(double M, double N) {
    if (!(N > 0.0)) throw DomainError("temperature_from_money: N must be positive");
    return M / N;
}

// Coefficient of activity: exp(mu/T).
inline double fugacity(double mu, double T) {
    if (T == 0.0) throw DomainError("fugacity: T must be nonzero");
    return std::exp(mu / T);
}

}  // namespace econofit
