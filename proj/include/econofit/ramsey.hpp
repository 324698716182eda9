#pragma once

// Consumption dynamics from the Euler equation cdot = u'(c)/u''(c) * (beta - r),
// with closed-form paths for quadratic-polynomial, Fermi-Dirac, and
// Bose-Einstein utility families and an RK4 cross-check.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "econofit/errors.hpp"

namespace econofit {

enum class UtilityFamily { polynomial, fermi_dirac, bose_einstein };

struct UtilitySpec {
    UtilityFamily family = UtilityFamily::polynomial;
    // polynomial u(c) = p1*c^2 + p2*c + p3
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    // fermi_dirac / bose_einstein: u(c) = g / (exp((c - mu)/kT) -+ 1)
    double g = 1.0, kT = 1.0, mu = 0.0;

    void validate() const {
        if (family == UtilityFamily::polynomial) {
            if (p1 == 0.0) throw DomainError("polynomial utility: p1 must be nonzero");
        } else {
            if (kT == 0.0) throw DomainError("utility: kT must be nonzero");
            if (!(g > 0.0)) throw DomainError("utility: g must be positive");
        }
    }
};

struct PathSpec {
    double beta = 0.0;   // rate of time preference
    double r = 0.0;      // interest rate
    double constant = 0.0;  // integration constant
    double t_start = 0.0;
    double t_end = 1.0;
    int steps = 100;

    void validate() const {
        if (!(t_end > t_start)) throw DomainError("path: t_end must exceed t_start");
        if (steps < 2) throw DomainError("path: need at least 2 steps");
    }
};

struct PathSample {
    double t = 0.0;
    double c = 0.0;
};

using Path = std::vector<PathSample>;

inline std::string path_to_csv(const Path& path) {
    std::ostringstream out;
    out.precision(17);
    out << "t,c\n";
    for (const auto& s : path) out << s.t << ',' << s.c << '\n';
    return out.str();
}

inline constexpr double kSingularityGuard = 1e-12;

// u'(c)/u''(c) * (beta - r) for the chosen utility family.
inline double euler_rhs(const UtilitySpec& u, double c, double beta, double r) {
    u.validate();
    switch (u.family) {
        case UtilityFamily::polynomial:
            // u' = 2 p1 c + p2, u'' = 2 p1
            return (c + u.p2 / (2.0 * u.p1)) * (beta - r);
        case UtilityFamily::fermi_dirac: {
            double ey = std::exp((c - u.mu) / u.kT);
            if (std::abs(ey - 1.0) < kSingularityGuard)
                throw DomainError("euler_rhs: Fermi-Dirac singularity at c = mu");
            return -u.kT * (beta - r) * (ey + 1.0) / (ey - 1.0);
        }
        case UtilityFamily::bose_einstein: {
            double ey = std::exp((c - u.mu) / u.kT);
            if (std::abs(ey - 1.0) < kSingularityGuard)
                throw DomainError("euler_rhs: Bose-Einstein singularity at c = mu");
            return -u.kT * (beta - r) * (ey - 1.0) / (ey + 1.0);
        }
    }
    throw DomainError("euler_rhs: unknown utility family");
}

namespace detail {

inline double alpha_at(const PathSpec& spec, double t) {
    return -(spec.beta - spec.r) * t + spec.constant;
}

inline std::vector<double> time_grid(const PathSpec& spec) {
    std::vector<double> ts(static_cast<std::size_t>(spec.steps) + 1);
    double dt = (spec.t_end - spec.t_start) / spec.steps;
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = spec.t_start + dt * i;
    ts.back() = spec.t_end;
    return ts;
}

}  // namespace detail

// c(t) = exp((beta - r) t + const) - p2/(2 p1); every sample must be > 0.
inline Path path_polynomial(const UtilitySpec& u, const PathSpec& spec) {
    u.validate();
    spec.validate();
    if (u.family != UtilityFamily::polynomial)
        throw DomainError("path_polynomial: wrong utility family");
    Path path;
    for (double t : detail::time_grid(spec)) {
        double c = std::exp((spec.beta - spec.r) * t + spec.constant) -
                   u.p2 / (2.0 * u.p1);
        if (!(c > 0.0))
            throw DomainError("path_polynomial: c <= 0 at t = " + std::to_string(t));
        path.push_back({t, c});
    }
    return path;
}

// c(t) = acosh((e^alpha - 2)/2) * kT + mu, alpha = -(beta-r) t + const.
// Defined only where e^alpha >= 4.
inline Path path_fermi_dirac(const UtilitySpec& u, const PathSpec& spec) {
    u.validate();
    spec.validate();
    if (u.family != UtilityFamily::fermi_dirac)
        throw DomainError("path_fermi_dirac: wrong utility family");
    Path path;
    for (double t : detail::time_grid(spec)) {
        double arg = (std::exp(detail::alpha_at(spec, t)) - 2.0) / 2.0;
        if (arg < 1.0)
            throw DomainError("path_fermi_dirac: domain violation (e^alpha < 4) at t = " +
                              std::to_string(t));
        path.push_back({t, std::acosh(arg) * u.kT + u.mu});
    }
    return path;
}

// c(t) = acosh((e^alpha + 2)/2) * kT + mu; defined for all real alpha.
inline Path path_bose_einstein(const UtilitySpec& u, const PathSpec& spec) {
    u.validate();
    spec.validate();
    if (u.family != UtilityFamily::bose_einstein)
        throw DomainError("path_bose_einstein: wrong utility family");
    Path path;
    for (double t : detail::time_grid(spec)) {
        double arg = (std::exp(detail::alpha_at(spec, t)) + 2.0) / 2.0;
        path.push_back({t, std::acosh(std::max(arg, 1.0)) * u.kT + u.mu});
    }
    return path;
}

inline Path sample_path(const UtilitySpec& u, const PathSpec& spec) {
    switch (u.family) {
        case UtilityFamily::polynomial: return path_polynomial(u, spec);
        case UtilityFamily::fermi_dirac: return path_fermi_dirac(u, spec);
        case UtilityFamily::bose_einstein: return path_bose_einstein(u, spec);
    }
    throw DomainError("sample_path: unknown utility family");
}

// Recover the integration constant that puts c(t_start) at a given level,
// by inverting each closed form.
inline double constant_from_initial(const UtilitySpec& u, double c0, double beta,
                                    double r, double t_start) {
    u.validate();
    switch (u.family) {
        case UtilityFamily::polynomial: {
            double shifted = c0 + u.p2 / (2.0 * u.p1);
            if (!(shifted > 0.0))
                throw DomainError("constant_from_initial: c0 + p2/(2 p1) must be positive");
            return std::log(shifted) - (beta - r) * t_start;
        }
        case UtilityFamily::fermi_dirac: {
            double y0 = (c0 - u.mu) / u.kT;
            if (y0 < 0.0)
                throw DomainError("constant_from_initial: (c0 - mu)/kT must be >= 0");
            return std::log(2.0 * std::cosh(y0) + 2.0) + (beta - r) * t_start;
        }
        case UtilityFamily::bose_einstein: {
            double y0 = (c0 - u.mu) / u.kT;
            if (!(y0 > 0.0))
                throw DomainError("constant_from_initial: (c0 - mu)/kT must be > 0");
            return std::log(2.0 * std::cosh(y0) - 2.0) + (beta - r) * t_start;
        }
    }
    throw DomainError("constant_from_initial: unknown utility family");
}

// Integrate the Euler ODE with fixed-step RK4 from the path's first sample
// and return the maximum relative deviation from the closed form.
inline double verify_path_ode(const UtilitySpec& u, const PathSpec& spec,
                              const Path& closed_form) {
    u.validate();
    spec.validate();
    if (closed_form.size() < 2)
        throw DomainError("verify_path_ode: path too short");
    double c = closed_form.front().c;
    double max_dev = 0.0;
    auto f = [&](double cc) { return euler_rhs(u, cc, spec.beta, spec.r); };
    for (std::size_t i = 1; i < closed_form.size(); ++i) {
        double h = closed_form[i].t - closed_form[i - 1].t;
        double k1 = f(c);
        double k2 = f(c + 0.5 * h * k1);
        double k3 = f(c + 0.5 * h * k2);
        double k4 = f(c + h * k3);
        c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double ref = closed_form[i].c;
        max_dev = std::max(max_dev, std::abs(c - ref) / std::max(1.0, std::abs(ref)));
    }
    return max_dev;
}

// The grid time past which the Fermi-Dirac closed form leaves its domain
// when beta > r: e^alpha = 4 at t* = (const - ln 4)/(beta - r).
inline double fd_domain_boundary(const PathSpec& spec) {
    if (spec.beta == spec.r)
        throw DomainError("fd_domain_boundary: undefined for beta == r");
    return (spec.constant - std::log(4.0)) / (spec.beta - spec.r);
}

}  // namespace econofit
