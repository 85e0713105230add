#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lwp/units.hpp"

namespace lwp {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdiv = 2000;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("QuadratureSpec: tolerances must be > 0");
        if (max_subdiv < 8) throw InvalidArgument("QuadratureSpec: max_subdiv must be >= 8");
    }
};

/** @brief Value with its achieved error estimate. */
struct QuadResult {
    complex value{0.0, 0.0};
    double error = 0.0;
    long evaluations = 0;
    int intervals = 0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        evaluations += o.evaluations;
        intervals += o.intervals;
        converged = converged && o.converged;
        return *this;
    }
};

/// Throws AccuracyFailure if r did not converge.
inline const QuadResult& require_converged(const QuadResult& r, const std::string& what) {
    if (!r.converged)
        throw AccuracyFailure(what + ": tolerance not met (error estimate " + std::to_string(r.error) + ")", r.value,
                              r.error);
    return r;
}

namespace detail {

struct GkRule {
    std::array<double, 11> x;   // Kronrod abscissae, x[0] = 0
    std::array<double, 11> wk;  // Kronrod weights
    std::array<double, 5> wg;   // Gauss weights at x[1], x[3], ..., x[9]
};

inline const GkRule& gk21() {
    static const GkRule rule = [] {
        GkRule r{};
        const auto& a = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
        const auto& w = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
        const auto& g = boost::math::quadrature::gauss<double, 10>::weights();
        for (int i = 0; i < 11; ++i) {
            r.x[i] = a[i];
            r.wk[i] = w[i];
        }
        for (int i = 0; i < 5; ++i) r.wg[i] = g[i];
        return r;
    }();
    return rule;
}

struct Segment {
    double a, b;
    complex value;
    double error;
    double floor;  // roundoff-limited error floor
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21_segment(F& f, double a, double b) {
    const GkRule& R = gk21();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<complex, 21> fv;
    fv[0] = f(c);
    complex resk = R.wk[0] * fv[0], resg = 0.0;
    double resabs = R.wk[0] * std::abs(fv[0]);
    for (int j = 1; j <= 10; ++j) {
        const double dx = h * R.x[j];
        const complex f1 = f(c - dx), f2 = f(c + dx);
        fv[2 * j - 1] = f1;
        fv[2 * j] = f2;
        resk += R.wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += R.wg[(j - 1) / 2] * (f1 + f2);
        resabs += R.wk[j] * (std::abs(f1) + std::abs(f2));
    }
    const complex mean = 0.5 * resk;
    double resasc = R.wk[0] * std::abs(fv[0] - mean);
    for (int j = 1; j <= 10; ++j) resasc += R.wk[j] * (std::abs(fv[2 * j - 1] - mean) + std::abs(fv[2 * j] - mean));
    const double ah = std::abs(h);
    resasc *= ah;
    resabs *= ah;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    err = std::max(err, floor);
    return Segment{a, b, resk * h, err, floor};
}

}  // namespace detail

/**
 * @brief Globally adaptive Gauss-Kronrod 10/21 quadrature of a complex integrand.
 *
 * `points` is the sorted initial partition (ends included). The segment with the
 * largest error estimate is bisected until the summed estimate meets
 * max(abs_tol, rel_tol·|I|) or max_subdiv bisections were spent.
 */
template <class F>
QuadResult integrate_adaptive(F&& f, const std::vector<double>& points, const QuadratureSpec& spec) {
    if (points.size() < 2) throw InvalidArgument("integrate_adaptive: need at least two points");
    std::priority_queue<detail::Segment> heap;
    QuadResult out;
    complex total = 0.0;
    double err = 0.0, floor = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] >= points[i - 1])) throw InvalidArgument("integrate_adaptive: points must be sorted");
        if (points[i] == points[i - 1]) continue;
        auto s = detail::gk21_segment(f, points[i - 1], points[i]);
        out.evaluations += 21;
        total += s.value;
        err += s.error;
        floor += s.floor;
        heap.push(s);
    }
    if (heap.empty()) return out;

    auto target = [&] { return std::max({spec.abs_tol, spec.rel_tol * std::abs(total), 2.0 * floor}); };
    int splits = 0;
    while (err > target() && splits < spec.max_subdiv) {
        detail::Segment s = heap.top();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) break;  // interval exhausted in double precision
        heap.pop();
        auto l = detail::gk21_segment(f, s.a, mid);
        auto r = detail::gk21_segment(f, mid, s.b);
        out.evaluations += 42;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        floor += l.floor + r.floor - s.floor;
        heap.push(l);
        heap.push(r);
        ++splits;
        if (splits % 64 == 0) {
            // refresh running sums against drift
            total = 0.0;
            err = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                total += copy.top().value;
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    total = 0.0;
    err = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    out.converged = err <= std::max({spec.abs_tol, spec.rel_tol * std::abs(total), 2.0 * floor});
    return out;
}

/// Same, with `panels` equal initial pieces on [a,b].
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec, int panels = 1) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("integrate_adaptive: non-finite limits");
    panels = std::max(panels, 1);
    std::vector<double> pts(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) pts[i] = a + (b - a) * (static_cast<double>(i) / panels);
    pts.back() = b;
    if (b < a) {
        std::reverse(pts.begin(), pts.end());
        QuadResult r = integrate_adaptive(f, pts, spec);
        r.value = -r.value;
        return r;
    }
    return integrate_adaptive(f, pts, spec);
}

/// Uniform partition of [a,b] with pieces no longer than h, merged with extra breakpoints inside (a,b).
inline std::vector<double> partition(double a, double b, double h, const std::vector<double>& extra = {}) {
    int n = 1;
    if (h > 0.0 && std::isfinite(h)) n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    n = std::min(n, 100000);
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1 + extra.size());
    for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
    pts.back() = b;
    for (double e : extra)
        if (e > a && e < b) pts.push_back(e);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/**
 * @brief Wynn epsilon extrapolation of a sequence of partial sums.
 * Returns the last diagonal estimate and a crude error from the two latest estimates.
 */
inline std::pair<complex, double> wynn_epsilon(const std::vector<complex>& s) {
    const std::size_t n = s.size();
    if (n == 0) return {0.0, INFINITY};
    if (n < 3) return {s.back(), n == 2 ? std::abs(s[1] - s[0]) : INFINITY};
    // e[k] columns computed in place; keep even columns as estimates
    std::vector<complex> prev(n + 1, 0.0), cur(s.begin(), s.end());
    complex best = s.back();
    double best_err = std::abs(s[n - 1] - s[n - 2]);
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<complex> next(cur.size() - 1);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const complex d = cur[i + 1] - cur[i];
            if (std::abs(d) < 1e-300) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (!ok) break;
        if (col % 2 == 0 && next.size() >= 2) {
            const complex est = next.back();
            const double e = std::abs(est - next[next.size() - 2]);
            if (e < best_err) {
                best_err = e;
                best = est;
            }
        }
        prev = cur;
        cur = std::move(next);
        if (cur.size() < 2) break;
    }
    return {best, best_err};
}

}  // namespace lwp
