#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lwp/packets.hpp"
#include "lwp/quadrature.hpp"

namespace lwp {

/** @brief Uniform finite-difference grid for the Crank–Nicolson oracle. */
struct FdGrid {
    double x_min = 0.0, x_max = 1.0;
    int n_points = 64;
    double dt = 1e-3;

    double dx() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return i == n_points - 1 ? x_max : x_min + i * dx(); }

    void validate() const {
        if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
            throw InvalidArgument("FdGrid: need finite x_min < x_max");
        if (n_points < 64) throw InvalidArgument("FdGrid: n_points must be >= 64");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("FdGrid: dt must be positive");
    }
    /// dx ≤ (π/8)ħ/(|p0| + 6Δp0).
    bool resolves(double p0, double dp0, const UnitSystem& u) const {
        return dx() <= (pi / 8.0) * u.hbar() / (std::abs(p0) + 6.0 * dp0) * (1.0 + 1e-12);
    }
    /// Grid on [a,b] with spacing ≤ h; step dt.
    static FdGrid with_spacing(double a, double b, double h, double dt) {
        const int n = static_cast<int>(std::ceil((b - a) / h - 1e-9)) + 1;
        return {a, b, std::max(n, 64), dt};
    }
};

namespace detail {

// Node index exactly at position x, or -1.
inline int node_at(const FdGrid& g, double x) {
    const double s = (x - g.x_min) / g.dx();
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-6 || r < 0 || r > g.n_points - 1) return -1;
    return static_cast<int>(r);
}

struct CnLayout {
    std::vector<double> V;  // potential on active nodes
    int lo = 0, hi = 0;     // active node range [lo, hi]; outside pinned to zero
    bool wall_lo = false, wall_hi = false;
};

inline CnLayout cn_layout(const PotentialSpec& pot, const FdGrid& g) {
    CnLayout L;
    L.lo = 1;
    L.hi = g.n_points - 2;
    if (pot.is_infinite_well()) {
        const int a = node_at(g, 0.0), b = node_at(g, pot.width());
        if (a < 0 || b < 0) throw InvalidArgument("crank_nicolson_evolve: walls at 0 and d must be grid nodes");
        L.lo = a + 1;
        L.hi = b - 1;
        L.wall_lo = L.wall_hi = true;
    } else if (pot.is_asymmetric_well()) {
        const int a = node_at(g, -pot.width());
        if (a < 0) throw InvalidArgument("crank_nicolson_evolve: wall at -d must be a grid node");
        L.lo = a + 1;
        L.wall_lo = true;
    }
    if (L.hi - L.lo < 8) throw InvalidArgument("crank_nicolson_evolve: too few interior nodes");
    L.V.assign(static_cast<std::size_t>(g.n_points), 0.0);
    if (!pot.is_infinite_well()) {
        const int i0 = node_at(g, 0.0);
        for (int i = 0; i < g.n_points; ++i) {
            if (i == i0) L.V[static_cast<std::size_t>(i)] = 0.5 * pot.height();
            else if (g.x(i) > 0.0) L.V[static_cast<std::size_t>(i)] = pot.height();
        }
    }
    return L;
}

inline double strip_mass(const std::vector<complex>& a, double dx, int from, int to) {
    double s = 0.0;
    for (int i = from; i < to; ++i) s += std::norm(a[static_cast<std::size_t>(i)]);
    return s * dx;
}

}  // namespace detail

/**
 * @brief Crank–Nicolson evolution of grid samples to each of the requested times.
 *
 * Dirichlet conditions at the grid ends and at infinite walls (which must sit on
 * nodes); a node exactly on the step gets V/2. The step in each interval between
 * output times is the largest dt_eff ≤ grid.dt that divides it.
 */
inline std::vector<WaveField> crank_nicolson_evolve(const WaveField& psi0, const PotentialSpec& pot, const FdGrid& grid,
                                                    const std::vector<double>& times, const UnitSystem& u = {}) {
    grid.validate();
    if (static_cast<int>(psi0.xs().size()) != grid.n_points)
        throw InvalidArgument("crank_nicolson_evolve: field does not live on the grid");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] >= psi0.t()) || (i > 0 && times[i] < times[i - 1]))
            throw InvalidArgument("crank_nicolson_evolve: times must be ascending and >= the initial time");
    const auto L = detail::cn_layout(pot, grid);
    const int n = grid.n_points;
    const double dx = grid.dx();
    const double h = u.hbar(), m = u.mass();

    std::vector<complex> a(psi0.amps());
    for (int i = 0; i < L.lo; ++i) a[static_cast<std::size_t>(i)] = 0.0;
    for (int i = L.hi + 1; i < n; ++i) a[static_cast<std::size_t>(i)] = 0.0;

    const double total = detail::strip_mass(a, dx, 0, n);
    if (!(total > 0.0)) throw InvalidArgument("crank_nicolson_evolve: zero initial field");
    const int strip = std::max(1, n / 10);
    auto edge_mass = [&](int w) {
        double e = 0.0;
        if (!L.wall_lo) e += detail::strip_mass(a, dx, 0, w);
        if (!L.wall_hi) e += detail::strip_mass(a, dx, n - w, n);
        return e / total;
    };
    if (edge_mass(strip) > 1e-10)
        throw DomainOverrun("crank_nicolson_evolve: initial field not negligible within 10% of the grid edges");

    const int N = L.hi - L.lo + 1;
    std::vector<complex> diag(N), cprime(N), rhs(N), explicit_diag(N);
    std::vector<complex> inv_denom(N);
    complex off = 0.0, offr = 0.0;
    double cur_dt = -1.0;
    auto factor = [&](double dt) {
        const double kin = h * h / (m * dx * dx);
        const complex g(0.0, dt / (2.0 * h));
        off = g * (-0.5 * kin);    // off-diagonal of (1 + iHdt/2ħ)
        offr = -g * (-0.5 * kin);  // off-diagonal of (1 - iHdt/2ħ)
        for (int j = 0; j < N; ++j) {
            diag[j] = 1.0 + g * (kin + L.V[static_cast<std::size_t>(L.lo + j)]);
            explicit_diag[j] = 2.0 - diag[j];
        }
        // Thomas factorization with reciprocal pivots
        inv_denom[0] = 1.0 / diag[0];
        cprime[0] = off * inv_denom[0];
        for (int j = 1; j < N; ++j) {
            inv_denom[j] = 1.0 / (diag[j] - off * cprime[j - 1]);
            cprime[j] = off * inv_denom[j];
        }
        cur_dt = dt;
    };
    auto step = [&]() {
        complex* y = a.data() + L.lo;
        // rhs = (1 - iHdt/2ħ) y, forward sweep fused
        complex prev = 0.0;
        for (int j = 0; j < N; ++j) {
            complex v = explicit_diag[j] * y[j];
            if (j > 0) v += offr * y[j - 1];
            if (j + 1 < N) v += offr * y[j + 1];
            prev = (v - off * prev) * inv_denom[j];
            rhs[j] = prev;
        }
        for (int j = N - 2; j >= 0; --j) rhs[j] -= cprime[j] * rhs[j + 1];
        std::copy(rhs.begin(), rhs.end(), y);
    };

    std::vector<WaveField> out;
    out.reserve(times.size());
    double t = psi0.t();
    const int guard = std::max(1, n / 20);
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const long steps = static_cast<long>(std::ceil(span / grid.dt - 1e-9));
            const double dt = span / steps;
            if (dt != cur_dt) factor(dt);
            for (long s = 0; s < steps; ++s) {
                step();
                if ((s & 63) == 63 && edge_mass(guard) > 1e-6)
                    throw DomainOverrun("crank_nicolson_evolve: field reached the grid edge");
            }
            t = target;
        }
        if (edge_mass(guard) > 1e-6) throw DomainOverrun("crank_nicolson_evolve: field reached the grid edge");
        out.emplace_back(target, psi0.xs(), a);
    }
    return out;
}

/// Single final time.
inline WaveField crank_nicolson_evolve(const WaveField& psi0, const PotentialSpec& pot, const FdGrid& grid, double t_final,
                                       const UnitSystem& u = {}) {
    return crank_nicolson_evolve(psi0, pot, grid, std::vector<double>{t_final}, u).front();
}

/// Samples an analytic packet on the grid nodes.
template <WavePacket P>
WaveField sample_on(const P& psi0, const FdGrid& grid) {
    grid.validate();
    std::vector<double> xs(static_cast<std::size_t>(grid.n_points));
    std::vector<complex> a(xs.size());
    for (int i = 0; i < grid.n_points; ++i) {
        xs[static_cast<std::size_t>(i)] = grid.x(i);
        a[static_cast<std::size_t>(i)] = psi0.position(xs[static_cast<std::size_t>(i)]);
    }
    return WaveField(0.0, std::move(xs), std::move(a));
}

template <WavePacket P>
std::vector<WaveField> crank_nicolson_evolve(const P& psi0, const PotentialSpec& pot, const FdGrid& grid,
                                             const std::vector<double>& times) {
    if (const double dp = psi0.momentum_spread(); !grid.resolves(psi0.mean_momentum(), dp, psi0.units()))
        throw InvalidArgument("crank_nicolson_evolve: grid too coarse for the packet momentum");
    return crank_nicolson_evolve(sample_on(psi0, grid), pot, grid, times, psi0.units());
}

// ---------------------------------------------------------------------------
// Infinite-well eigenfunction expansion
// ---------------------------------------------------------------------------

/** @brief Sine-basis expansion on [0,d]; coefficients computed once. */
class InfiniteWellEigenSum {
public:
    InfiniteWellEigenSum(const GaussianPacket& g, double d, int n_max) : u_(g.units()), d_(d) {
        init(n_max);
        const double h = u_.hbar();
        const auto f = momentum_rep(g);
        const complex pref = std::sqrt(2.0 / d) * std::sqrt(2.0 * pi * h) / complex(0.0, 2.0);
        for (int n = 1; n <= n_max; ++n) {
            const double p = h * n * pi / d;
            c_[static_cast<std::size_t>(n)] = pref * (f(-p) - f(p));
        }
        finish(g.position_spread() > 0 ? 1.0 : 0.0, [&](double x) { return g.position(x); });
    }

    InfiniteWellEigenSum(const SampledPacket& s, double d, int n_max, const QuadratureSpec& spec = {1e-11, 1e-14, 20000})
        : u_(s.units()), d_(d) {
        init(n_max);
        if (s.x_min() >= 0.0 && s.x_max() <= d) {
            // samples inside the well: sine coefficients from the exact transform of the interpolant
            const double h = u_.hbar();
            const complex pref = std::sqrt(2.0 / d) * std::sqrt(2.0 * pi * h) / complex(0.0, 2.0);
            for (int n = 1; n <= n_max; ++n) {
                const double p = h * n * pi / d;
                c_[static_cast<std::size_t>(n)] = pref * (s.momentum(-p) - s.momentum(p));
            }
            finish(1.0, [&](double x) { return s.position(x); });
            return;
        }
        const int panels = std::max(8, static_cast<int>(s.nodes().size()));
        for (int n = 1; n <= n_max; ++n) {
            const double k = n * pi / d;
            auto r = integrate_adaptive([&](double x) { return std::sin(k * x) * s.position(x); }, 0.0, d, spec, panels);
            c_[static_cast<std::size_t>(n)] = std::sqrt(2.0 / d) * require_converged(r, "eigen coefficient").value;
        }
        finish(1.0, [&](double x) { return s.position(x); });
    }

    complex operator()(double t, double x) const {
        if (!(x >= 0.0 && x <= d_)) throw DomainError("eigen_sum_infinite_well: x outside [0,d]");
        const double h = u_.hbar(), m = u_.mass();
        const double e1 = pi * pi * h / (2.0 * m * d_ * d_);  // E_1/ħ
        complex s = 0.0;
        for (std::size_t n = 1; n < c_.size(); ++n) {
            const double nn = static_cast<double>(n);
            const double ph = std::fmod(e1 * nn * nn * t, 2.0 * pi);
            s += c_[n] * std::sin(nn * pi * x / d_) * std::polar(1.0, -ph);
        }
        return std::sqrt(2.0 / d_) * s;
    }

    /// 1 - Σ|c_n|², relative to the packet mass inside [0,d].
    double tail_mass() const noexcept { return tail_; }
    /// Exact recurrence 2π/ω₁ = 4md²/(πħ); every phase E_n t/ħ is then a multiple of 2π.
    double revival_time() const noexcept { return 4.0 * u_.mass() * d_ * d_ / (pi * u_.hbar()); }
    const std::vector<complex>& coefficients() const noexcept { return c_; }

private:
    void init(int n_max) {
        if (!(d_ > 0.0)) throw InvalidArgument("eigen_sum_infinite_well: d must be positive");
        if (n_max < 1) throw InvalidArgument("eigen_sum_infinite_well: n_max must be >= 1");
        c_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    }
    template <class F>
    void finish(double, F&& psi) {
        // packet mass inside [0,d] by fine quadrature
        auto r = integrate_adaptive([&](double x) { return complex(std::norm(psi(x))); }, 0.0, d_, {1e-13, 1e-16, 20000}, 64);
        double s = 0.0;
        for (std::size_t n = 1; n < c_.size(); ++n) s += std::norm(c_[n]);
        tail_ = std::max(0.0, r.value.real() - s) / r.value.real();
        if (tail_ > 1e-8)
            throw AccuracyFailure("eigen_sum_infinite_well: n_max too small (tail mass " + std::to_string(tail_) + ")",
                                  complex(s), tail_);
    }
    UnitSystem u_;
    double d_;
    std::vector<complex> c_;
    double tail_ = 0.0;
};

template <WavePacket P>
complex eigen_sum_infinite_well(const P& psi0, double d, double t, double x, int n_max) {
    return InfiniteWellEigenSum(psi0, d, n_max)(t, x);
}

/// Textbook spreading Gaussian, a = α + iħt/m.
inline complex free_gaussian_analytic(const GaussianPacket& g, double t, double x) {
    const UnitSystem& u = g.units();
    const double h = u.hbar(), m = u.mass();
    const double al = g.alpha(), x0 = g.x0(), p0 = g.p0();
    const complex a(al, h * t / m);
    const double s = x - x0 - p0 * t / m;
    return std::pow(pi * al, -0.25) * std::sqrt(al / a) * std::exp(-s * s / (2.0 * a)) *
           std::polar(1.0, (p0 * x - p0 * p0 * t / (2.0 * m)) / h);
}

}  // namespace lwp
