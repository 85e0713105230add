#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lwp/packets.hpp"
#include "lwp/quadrature.hpp"
#include "lwp/specfun.hpp"

namespace lwp {

/** @brief Grid observables of a field, with the mass split at a chosen position. */
struct ObservableReport {
    double t = 0.0;
    double norm = 0.0;
    double mean_x = 0.0, mean_p = 0.0;
    double sd_x = 0.0, sd_p = 0.0;
    double left_mass = 0.0, right_mass = 0.0;
};

namespace detail {

// Trapezoid mass of |ψ|² over [a,b] ∩ grid, with |ψ|² linearly interpolated at a and b.
inline double mass_between(const WaveField& w, double a, double b) {
    const auto& x = w.xs();
    const auto& v = w.amps();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double lo = std::max(a, x[i]), hi = std::min(b, x[i + 1]);
        if (!(hi > lo)) continue;
        const double r0 = std::norm(v[i]), r1 = std::norm(v[i + 1]);
        const double h = x[i + 1] - x[i];
        auto at = [&](double y) { return r0 + (r1 - r0) * (y - x[i]) / h; };
        s += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    return s;
}

}  // namespace detail

inline ObservableReport observables(const WaveField& psi, double split_at, const UnitSystem& u = {}) {
    const double n = psi.norm();
    if (!std::isfinite(n) || !(n > 0.0)) throw InvalidArgument("observables: field is not normalizable");
    const auto m = detail::field_moments(psi.xs(), psi.amps(), u.hbar());
    ObservableReport r;
    r.t = psi.t();
    r.norm = n;
    r.mean_x = m.mean_x;
    r.mean_p = m.mean_p;
    r.sd_x = m.sd_x;
    r.sd_p = m.sd_p;
    r.left_mass = detail::mass_between(psi, -INFINITY, split_at);
    r.right_mass = n - r.left_mass;
    return r;
}

/// Samples of psi with a ≤ x ≤ b.
inline WaveField window(const WaveField& psi, double a, double b) {
    std::vector<double> xs;
    std::vector<complex> v;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (psi.xs()[i] >= a && psi.xs()[i] <= b) {
            xs.push_back(psi.xs()[i]);
            v.push_back(psi.amps()[i]);
        }
    if (xs.size() < 2) throw InvalidArgument("window: fewer than two samples in range");
    return WaveField(psi.t(), std::move(xs), std::move(v));
}

/** @brief Upper bound of the late-time reflected mass and whether it is attained. */
struct ReflectionBound {
    double bound = 0.0;      // ∫|f(p)R(p)|² dp
    double condition = 0.0;  // ∫ p |f(-p)R(p)|² dp
    bool saturated = false;  // condition < 0
};

inline ReflectionBound asymptotic_reflection_bound(const MomentumAmplitude& f, double V, const UnitSystem& u = {},
                                                   const QuadratureSpec& spec = {1e-10, 1e-15, 4000}) {
    if (!(V >= 0.0)) throw InvalidArgument("asymptotic_reflection_bound: V must be >= 0");
    ReflectionBound r;
    if (V == 0.0) return r;
    const auto [a, b] = f.support(12.0);
    const double pth = std::sqrt(2.0 * u.mass() * V);
    auto R2 = [&](double p) { return std::norm(reflection_R(p, V, u).value); };
    const int panels = 16;
    std::vector<double> pts = partition(a, b, (b - a) / panels, {-pth, pth});
    auto q = integrate_adaptive([&](double p) { return complex(std::norm(f(p)) * R2(p)); }, pts, spec);
    r.bound = require_converged(q, "asymptotic_reflection_bound").value.real();
    // f(-p) lives on [-b,-a]
    std::vector<double> pm = partition(-b, -a, (b - a) / panels, {-pth, pth});
    auto c = integrate_adaptive([&](double p) { return complex(p * std::norm(f(-p)) * R2(p)); }, pm, spec);
    r.condition = require_converged(c, "asymptotic_reflection_bound").value.real();
    r.saturated = r.condition < 0.0;
    return r;
}

/// Mass inside the box [-d, 0].
inline double box_survival(const WaveField& psi, double d) {
    if (!(d > 0.0)) throw InvalidArgument("box_survival: d must be positive");
    return detail::mass_between(psi, -d, 0.0);
}

/** @brief Time window in which the packet has hit the step m times and sits between the walls. */
struct ReflectionWindow {
    double start, end, mid;
};

/// Packet at x0 ∈ (-d,0) moving right with p0 > 0: m-th step hit at |x0|m/p0 + (m-1)·2dm/p0.
inline ReflectionWindow reflection_window(double x0, double p0, double dx0, double d, int m, const UnitSystem& u = {}) {
    if (!(p0 > 0.0)) throw InvalidArgument("reflection_window: p0 must be positive");
    if (!(x0 < 0.0 && x0 > -d)) throw InvalidArgument("reflection_window: x0 must lie inside (-d,0)");
    if (m < 1) throw InvalidArgument("reflection_window: m must be >= 1");
    const double v = p0 / u.mass();
    const double t1 = -x0 / v, T = 2.0 * d / v, delta = 4.0 * dx0 / v;
    const double a = t1 + (m - 1) * T + delta, b = t1 + m * T - delta;
    if (!(b > a)) throw InvalidArgument("reflection_window: packet too wide for the box");
    return {a, b, 0.5 * (a + b)};
}

/// L² and L∞ differences of two fields on the same grid.
struct FieldDifference {
    double l2 = 0.0, linf = 0.0;
};

inline FieldDifference field_difference(const WaveField& a, const WaveField& b) {
    if (a.xs() != b.xs()) throw InvalidArgument("field_difference: grids differ");
    std::vector<complex> d(a.size());
    FieldDifference r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a.amps()[i] - b.amps()[i];
        r.linf = std::max(r.linf, std::abs(d[i]));
    }
    r.l2 = std::sqrt(WaveField(a.t(), a.xs(), std::move(d)).norm());
    return r;
}

}  // namespace lwp
