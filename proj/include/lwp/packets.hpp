#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lwp/quadrature.hpp"
#include "lwp/specfun.hpp"
#include "lwp/units.hpp"

namespace lwp {

/** @brief Normalized Gaussian (πα)^{-1/4} e^{-(x-x0)²/2α} e^{ip0 x/ħ}. */
class GaussianPacket {
public:
    GaussianPacket(double alpha, double x0, double p0, UnitSystem u = {}) : alpha_(alpha), x0_(x0), p0_(p0), u_(u) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("GaussianPacket: alpha must be positive");
        if (!std::isfinite(x0) || !std::isfinite(p0)) throw InvalidArgument("GaussianPacket: non-finite x0 or p0");
    }

    double alpha() const noexcept { return alpha_; }
    double x0() const noexcept { return x0_; }
    double p0() const noexcept { return p0_; }
    const UnitSystem& units() const noexcept { return u_; }

    double mean_position() const noexcept { return x0_; }
    double mean_momentum() const noexcept { return p0_; }
    double position_spread() const noexcept { return std::sqrt(alpha_ / 2.0); }
    double momentum_spread() const noexcept { return u_.hbar() / std::sqrt(2.0 * alpha_); }

    complex position(double x) const {
        const double d = x - x0_;
        return std::pow(pi * alpha_, -0.25) * std::exp(-d * d / (2.0 * alpha_)) * std::polar(1.0, p0_ * x / u_.hbar());
    }

    /// f(p) = (α/πħ²)^{1/4} e^{-α(p-p0)²/2ħ²} e^{-i(p-p0)x0/ħ}
    complex momentum(double p) const {
        const double h = u_.hbar(), d = p - p0_;
        return std::pow(alpha_ / (pi * h * h), 0.25) * std::exp(-alpha_ * d * d / (2.0 * h * h)) *
               std::polar(1.0, -d * x0_ / h);
    }

private:
    double alpha_, x0_, p0_;
    UnitSystem u_;
};

inline complex gaussian_position(const GaussianPacket& g, double x) { return g.position(x); }

/**
 * @brief Momentum-space amplitude f(p) with the metadata the propagators need.
 * Position metadata (centre, spread) drives quadrature partitioning and image pruning.
 */
class MomentumAmplitude {
public:
    using Eval = std::function<complex(double)>;

    MomentumAmplitude(Eval f, double p0, double spread, double x_center, double x_spread, UnitSystem u = {})
        : f_(std::move(f)), p0_(p0), spread_(spread), xc_(x_center), xs_(x_spread), u_(u) {
        if (!f_) throw InvalidArgument("MomentumAmplitude: empty evaluator");
        if (!(spread > 0.0) || !(x_spread > 0.0)) throw InvalidArgument("MomentumAmplitude: spreads must be positive");
    }

    complex operator()(double p) const { return f_(p); }
    double p0() const noexcept { return p0_; }
    double spread() const noexcept { return spread_; }
    double x_center() const noexcept { return xc_; }
    double x_spread() const noexcept { return xs_; }
    const UnitSystem& units() const noexcept { return u_; }

    /// Effective support p0 ± n·spread.
    std::pair<double, double> support(double n = 10.0) const { return {p0_ - n * spread_, p0_ + n * spread_}; }

    /// Set when the amplitude came from a Gaussian packet (enables closed forms).
    const GaussianPacket* gaussian() const noexcept { return gauss_ ? &*gauss_ : nullptr; }
    MomentumAmplitude& with_gaussian(const GaussianPacket& g) {
        gauss_ = g;
        return *this;
    }

private:
    Eval f_;
    double p0_, spread_, xc_, xs_;
    UnitSystem u_;
    std::optional<GaussianPacket> gauss_;
};

inline MomentumAmplitude momentum_rep(const GaussianPacket& g) {
    MomentumAmplitude m([g](double p) { return g.momentum(p); }, g.p0(), g.momentum_spread(), g.x0(),
                        g.position_spread(), g.units());
    m.with_gaussian(g);
    return m;
}

/// f(K,p) = e^{ipK/ħ} f(p): momentum amplitude of the packet translated by -K.
inline complex shifted_momentum(const MomentumAmplitude& f, double K, double p) {
    return std::polar(1.0, p * K / f.units().hbar()) * f(p);
}

// ---------------------------------------------------------------------------
// Sampled packets
// ---------------------------------------------------------------------------

/** @brief Grid moments of a sampled field: norm, centre, spreads (phase-gradient momentum). */
struct FieldMoments {
    double norm = 0.0, mean_x = 0.0, mean_p = 0.0, sd_x = 0.0, sd_p = 0.0;
};

namespace detail {

// Trapezoid moments on a possibly non-uniform grid.
inline FieldMoments field_moments(const std::vector<double>& xs, const std::vector<complex>& a, double hbar) {
    const std::size_t n = xs.size();
    FieldMoments m;
    double sx = 0.0, sxx = 0.0;
    auto acc = [&](std::size_t i, double w) {
        const double r = std::norm(a[i]);
        m.norm += w * r;
        sx += w * r * xs[i];
        sxx += w * r * xs[i] * xs[i];
    };
    for (std::size_t i = 0; i < n; ++i) {
        double w = 0.0;
        if (i > 0) w += 0.5 * (xs[i] - xs[i - 1]);
        if (i + 1 < n) w += 0.5 * (xs[i + 1] - xs[i]);
        acc(i, w);
    }
    if (!(m.norm > 0.0)) return m;
    m.mean_x = sx / m.norm;
    m.sd_x = std::sqrt(std::max(0.0, sxx / m.norm - m.mean_x * m.mean_x));
    // <p> = ħ ∫ |ψ|² ∂φ ; <p²> = ħ² ∫ (∂A)² + A² (∂φ)² with ψ = A e^{iφ}, on interval midpoints
    // (phase steps below π per interval are unambiguous)
    double sp = 0.0, spp = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = xs[i + 1] - xs[i];
        const double k = std::arg(a[i + 1] * std::conj(a[i])) / h;
        const double A0 = std::abs(a[i]), A1 = std::abs(a[i + 1]);
        const double dA = (A1 - A0) / h;
        const double r = A0 * A1;
        sp += h * r * k;
        spp += h * (dA * dA + r * k * k);
        wsum += h * r;
    }
    if (wsum > 0.0) {
        m.mean_p = hbar * sp / wsum;
        const double p2 = hbar * hbar * spp / wsum;
        m.sd_p = std::sqrt(std::max(0.0, p2 - m.mean_p * m.mean_p));
    }
    return m;
}

// I[k] = ∫_0^1 s^k e^{-iκs} ds, k = 0..3. Power series for small κ, where the recursion cancels.
inline void monomial_fourier_moments(double kappa, complex* I) {
    if (std::abs(kappa) < 1.0) {
        complex term = 1.0;  // (-iκ)^n / n!
        for (int k = 0; k < 4; ++k) I[k] = 0.0;
        for (int n = 0; n < 24; ++n) {
            for (int k = 0; k < 4; ++k) I[k] += term / double(n + k + 1);
            term *= complex(0.0, -kappa) / double(n + 1);
        }
        return;
    }
    const complex c(0.0, -kappa), ec = std::polar(1.0, -kappa);
    I[0] = (ec - 1.0) / c;
    for (int k = 1; k < 4; ++k) I[k] = (ec - double(k) * I[k - 1]) / c;
}

}  // namespace detail

/**
 * @brief Packet given by samples; cubic Hermite interpolation between nodes, zero outside.
 */
class SampledPacket {
public:
    explicit SampledPacket(const WaveField& w, UnitSystem u = {}) : xs_(w.xs()), a_(w.amps()), u_(u) {
        const std::size_t n = xs_.size();
        if (n < 4) throw InvalidArgument("SampledPacket: need at least four samples");
        d_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0)
                d_[i] = (a_[1] - a_[0]) / (xs_[1] - xs_[0]);
            else if (i + 1 == n)
                d_[i] = (a_[n - 1] - a_[n - 2]) / (xs_[n - 1] - xs_[n - 2]);
            else {
                const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
                d_[i] = (a_[i + 1] - a_[i]) * (h0 / (h1 * (h0 + h1))) + (a_[i] - a_[i - 1]) * (h1 / (h0 * (h0 + h1)));
            }
        }
        mom_ = detail::field_moments(xs_, a_, u_.hbar());
        if (!(mom_.norm > 0.0)) throw DegenerateInput("SampledPacket: zero field");
        if (!(mom_.sd_x > 0.0)) mom_.sd_x = xs_.back() - xs_.front();
        if (!(mom_.sd_p > 0.0)) mom_.sd_p = u_.hbar() / (2.0 * mom_.sd_x);
        dx_min_ = INFINITY;
        for (std::size_t i = 1; i < n; ++i) dx_min_ = std::min(dx_min_, xs_[i] - xs_[i - 1]);
    }

    const UnitSystem& units() const noexcept { return u_; }
    double mean_position() const noexcept { return mom_.mean_x; }
    double mean_momentum() const noexcept { return mom_.mean_p; }
    double position_spread() const noexcept { return mom_.sd_x; }
    double momentum_spread() const noexcept { return mom_.sd_p; }
    double norm() const noexcept { return mom_.norm; }
    double x_min() const noexcept { return xs_.front(); }
    double x_max() const noexcept { return xs_.back(); }
    double min_spacing() const noexcept { return dx_min_; }
    const std::vector<double>& nodes() const noexcept { return xs_; }

    complex position(double x) const {
        if (x < xs_.front() || x > xs_.back()) return 0.0;
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        if (i == 0) i = 1;
        if (i >= xs_.size()) i = xs_.size() - 1;
        const std::size_t j = i - 1;
        const double h = xs_[i] - xs_[j], s = (x - xs_[j]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * a_[j] + h10 * h * d_[j] + h01 * a_[i] + h11 * h * d_[i];
    }

    /// f(p): Fourier integral of the interpolant, done exactly interval by interval.
    complex momentum(double p) const {
        const double hb = u_.hbar();
        // plain real arithmetic: std::complex products go through a slow NaN-checking path
        auto mul = [](complex a, complex b) {
            return complex(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
        };
        complex sum = 0.0, I[4], phase, step;
        double h_cached = NAN;
        for (std::size_t j = 0; j + 1 < xs_.size(); ++j) {
            const double h = xs_[j + 1] - xs_[j];
            // spacings of a "uniform" grid differ in the last bits; reuse the moments across those
            const double jitter = 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(xs_[j]), std::abs(xs_[j + 1]));
            if (!(std::abs(h - h_cached) <= jitter)) {
                detail::monomial_fourier_moments(p * h / hb, I);
                step = std::polar(1.0, -p * h / hb);
                h_cached = h;
            }
            // rotate the phase forward, resyncing now and then so rounding cannot build up
            if (j % 64 == 0) phase = std::polar(1.0, -p * xs_[j] / hb);
            // interpolant as c0 + c1 s + c2 s² + c3 s³ on s ∈ [0,1]
            const complex a0 = a_[j], a1 = a_[j + 1], m0 = h * d_[j], m1 = h * d_[j + 1];
            const complex c2 = -3.0 * a0 - 2.0 * m0 + 3.0 * a1 - m1, c3 = 2.0 * a0 + m0 - 2.0 * a1 + m1;
            sum += h * mul(phase, mul(a0, I[0]) + mul(m0, I[1]) + mul(c2, I[2]) + mul(c3, I[3]));
            phase = mul(phase, step);
        }
        return sum / std::sqrt(2.0 * pi * hb);
    }

private:
    std::vector<double> xs_;
    std::vector<complex> a_;
    std::vector<complex> d_;
    UnitSystem u_;
    FieldMoments mom_;
    double dx_min_;
};

inline MomentumAmplitude momentum_rep(const SampledPacket& s) {
    auto sp = std::make_shared<SampledPacket>(s);
    return MomentumAmplitude([sp](double p) { return sp->momentum(p); }, s.mean_momentum(), s.momentum_spread(),
                             s.mean_position(), s.position_spread(), s.units());
}

/** @brief Requirements the propagators place on a packet type. */
template <class P>
concept WavePacket = requires(const P& p, double x) {
    { p.position(x) } -> std::convertible_to<complex>;
    { p.momentum(x) } -> std::convertible_to<complex>;
    { p.mean_position() } -> std::convertible_to<double>;
    { p.mean_momentum() } -> std::convertible_to<double>;
    { p.position_spread() } -> std::convertible_to<double>;
    { p.momentum_spread() } -> std::convertible_to<double>;
    { p.units() } -> std::convertible_to<UnitSystem>;
};

// ---------------------------------------------------------------------------
// Peakedness diagnostics
// ---------------------------------------------------------------------------

/** @brief Measured validity margins of the semiclassical step approximations. */
struct PeakednessReport {
    double p_cut = 0.0;          // momentum with 1e-6 tail mass beyond it (towards the threshold)
    double threshold = 0.0;      // sqrt(2mV)
    double tail_mass = 0.0;      // mass on the wrong side of the threshold
    double negative_mass = 0.0;  // mass at p < 0 (forbidden case)
    double factor = 0.0;         // 1/sqrt(|p_cut²/2mV - 1|)
    double spread_ratio = 0.0;   // (|p0|/(mV))·Δp0
    bool ok = false;
    std::vector<PreconditionViolation::Margin> violations;
};

namespace detail {

inline constexpr double tail_mass_limit = 1e-6;
inline constexpr double factor_lo = 0.2, factor_hi = 5.0;
inline constexpr double spread_ratio_limit = 0.1;

// c with P(N(0,1) < -c) = 1e-6
inline double gaussian_tail_quantile() {
    static const double c = [] {
        double lo = 0.0, hi = 10.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail_mass_limit ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return c;
}

// ∫_a^b |f|² dp
inline double momentum_mass(const MomentumAmplitude& f, double a, double b) {
    if (!(b > a)) return 0.0;
    if (const GaussianPacket* g = f.gaussian()) {
        const double s = g->momentum_spread() * std::sqrt(2.0);
        return 0.5 * (std::erfc((a - g->p0()) / s) - std::erfc((b - g->p0()) / s));
    }
    QuadratureSpec q{1e-10, 1e-14, 2000};
    auto r = integrate_adaptive([&](double p) { return complex(std::norm(f(p)), 0.0); }, a, b, q, 16);
    return r.value.real();
}

// p with mass 1e-6 below it (lower = true) or above it.
inline double momentum_quantile(const MomentumAmplitude& f, bool lower) {
    if (const GaussianPacket* g = f.gaussian()) {
        const double c = gaussian_tail_quantile() * g->momentum_spread();
        return lower ? g->p0() - c : g->p0() + c;
    }
    auto [a, b] = f.support(12.0);
    double lo = a, hi = b;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double m = lower ? momentum_mass(f, a, mid) : momentum_mass(f, mid, b);
        if (lower)
            (m > tail_mass_limit ? hi : lo) = mid;
        else
            (m > tail_mass_limit ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Checks for the climbing case (k0 > 1): mass below sqrt(2mV), factor at the cutoff, spread ratio.
inline PeakednessReport climb_diagnostics(const MomentumAmplitude& f, double V) {
    const UnitSystem& u = f.units();
    PeakednessReport r;
    r.threshold = std::sqrt(2.0 * u.mass() * V);
    r.p_cut = detail::momentum_quantile(f, true);
    r.tail_mass = detail::momentum_mass(f, f.support(12.0).first, r.threshold);
    const double kc = r.p_cut * r.p_cut / (2.0 * u.mass() * V) - 1.0;
    r.factor = kc > 0.0 ? 1.0 / std::sqrt(kc) : INFINITY;
    r.spread_ratio = std::abs(f.p0()) / (u.mass() * V) * f.spread();
    if (!(f.p0() > r.threshold)) r.violations.push_back({"k0_above_one", f.p0() / r.threshold, 1.0});
    if (!(r.p_cut > r.threshold)) r.violations.push_back({"cutoff_above_threshold", r.p_cut, r.threshold});
    if (!(r.tail_mass < detail::tail_mass_limit))
        r.violations.push_back({"mass_below_threshold", r.tail_mass, detail::tail_mass_limit});
    if (!(r.factor >= detail::factor_lo && r.factor <= detail::factor_hi))
        r.violations.push_back({"factor_at_cutoff", r.factor, r.factor < detail::factor_lo ? detail::factor_lo : detail::factor_hi});
    if (!(r.spread_ratio < detail::spread_ratio_limit))
        r.violations.push_back({"spread_ratio", r.spread_ratio, detail::spread_ratio_limit});
    r.ok = r.violations.empty();
    return r;
}

/// Checks for the forbidden case (0 < k0 < 1): mass above sqrt(2mV) and below 0, factor, spread ratio.
inline PeakednessReport forbidden_diagnostics(const MomentumAmplitude& f, double V) {
    const UnitSystem& u = f.units();
    PeakednessReport r;
    r.threshold = std::sqrt(2.0 * u.mass() * V);
    r.p_cut = detail::momentum_quantile(f, false);
    r.tail_mass = detail::momentum_mass(f, r.threshold, f.support(12.0).second);
    r.negative_mass = detail::momentum_mass(f, f.support(12.0).first, 0.0);
    const double kc = 1.0 - r.p_cut * r.p_cut / (2.0 * u.mass() * V);
    r.factor = kc > 0.0 ? 1.0 / std::sqrt(kc) : INFINITY;
    r.spread_ratio = std::abs(f.p0()) / (u.mass() * V) * f.spread();
    if (!(f.p0() > 0.0 && f.p0() < r.threshold)) r.violations.push_back({"k0_in_unit_interval", f.p0() / r.threshold, 1.0});
    if (!(r.p_cut < r.threshold)) r.violations.push_back({"cutoff_below_threshold", r.p_cut, r.threshold});
    if (!(r.tail_mass < detail::tail_mass_limit))
        r.violations.push_back({"mass_above_threshold", r.tail_mass, detail::tail_mass_limit});
    if (!(r.negative_mass < detail::tail_mass_limit))
        r.violations.push_back({"mass_at_negative_p", r.negative_mass, detail::tail_mass_limit});
    if (!(r.factor >= detail::factor_lo && r.factor <= detail::factor_hi))
        r.violations.push_back({"factor_at_cutoff", r.factor, r.factor < detail::factor_lo ? detail::factor_lo : detail::factor_hi});
    if (!(r.spread_ratio < detail::spread_ratio_limit))
        r.violations.push_back({"spread_ratio", r.spread_ratio, detail::spread_ratio_limit});
    r.ok = r.violations.empty();
    return r;
}

// ---------------------------------------------------------------------------
// Deformed packet of the transmitted wave
// ---------------------------------------------------------------------------

/** @brief ψ~(y,0) and its free evolution, with λ = q0/p0 and q0 = sqrt(p0²-2mV). */
class DeformedPacket {
public:
    using Eval0 = std::function<complex(double)>;
    using EvalT = std::function<complex(double, double)>;

    DeformedPacket(Eval0 init, EvalT evolved, double lambda, double q0)
        : init_(std::move(init)), evolved_(std::move(evolved)), lambda_(lambda), q0_(q0) {}

    complex operator()(double y) const { return init_(y); }
    /// Free evolution of ψ~ to time t.
    complex free(double y, double t) const { return t == 0.0 ? init_(y) : evolved_(y, t); }
    double lambda() const noexcept { return lambda_; }
    double q0() const noexcept { return q0_; }

private:
    Eval0 init_;
    EvalT evolved_;
    double lambda_, q0_;
};

namespace detail {

inline void require_above_threshold(const MomentumAmplitude& f, double V) {
    const UnitSystem& u = f.units();
    const double thr = std::sqrt(2.0 * u.mass() * V);
    const double low = momentum_mass(f, f.support(12.0).first, thr);
    if (!(f.p0() > thr) || !(low < tail_mass_limit))
        throw PreconditionViolation("deformed_packet: momentum weight below sqrt(2mV)",
                                    {{"mass_below_threshold", low, tail_mass_limit}, {"p0_over_threshold", f.p0() / thr, 1.0}});
}

}  // namespace detail

/**
 * @brief ψ~ for a Gaussian: in q the amplitude is again Gaussian,
 * λC exp(-a(q-q0)² + ib(q-q0)) with a = αλ²/2ħ² + i x0 mV/(ħ p0³), b = -λx0/ħ.
 */
inline DeformedPacket deformed_packet(const GaussianPacket& g, double V) {
    const UnitSystem& u = g.units();
    const double h = u.hbar(), m = u.mass();
    if (V == 0.0) {
        return DeformedPacket([g](double y) { return g.position(y); },
                              [g, h, m](double y, double t) {
                                  // free Gaussian, same formula below with λ=1, no chirp
                                  const complex A(g.alpha() / (2 * h * h), t / (2 * m * h));
                                  const double B0 = -g.x0() / h;
                                  const complex B = B0 + y / h - g.p0() * t / (m * h);
                                  const double C = std::pow(g.alpha() / (pi * h * h), 0.25);
                                  return C / std::sqrt(2 * pi * h) * std::sqrt(pi / A) *
                                         std::exp(-B * B / (4.0 * A) + complex(0, g.p0() * y / h - g.p0() * g.p0() * t / (2 * m * h)));
                              },
                              1.0, g.p0());
    }
    detail::require_above_threshold(momentum_rep(g), V);
    const double p0 = g.p0();
    const double q0 = std::sqrt(p0 * p0 - 2 * m * V);
    const double lam = q0 / p0;
    const double C = std::pow(g.alpha() / (pi * h * h), 0.25);
    const complex a(g.alpha() * lam * lam / (2 * h * h), g.x0() * m * V / (h * p0 * p0 * p0));
    const double b = -lam * g.x0() / h;
    auto ev = [=](double y, double t) {
        const complex A = a + complex(0.0, t / (2 * m * h));
        const double B = b + y / h - q0 * t / (m * h);
        return lam * C / std::sqrt(2 * pi * h) * std::sqrt(pi / A) *
               std::exp(-B * B / (4.0 * A) + complex(0.0, q0 * y / h - q0 * q0 * t / (2 * m * h)));
    };
    return DeformedPacket([ev](double y) { return ev(y, 0.0); }, ev, lam, q0);
}

/// ψ~ for a general amplitude by quadrature of (1/sqrt(2πħ))∫ e^{iZy/ħ - iZ²t/2mħ} f(p) dp over p > sqrt(2mV).
inline DeformedPacket deformed_packet(const MomentumAmplitude& f, double V, const UnitSystem& u) {
    detail::require_above_threshold(f, V);
    const double h = u.hbar(), m = u.mass();
    const double thr = std::sqrt(2 * m * V);
    const double q0 = std::sqrt(f.p0() * f.p0() - 2 * m * V);
    const double lam = q0 / f.p0();
    auto fp = std::make_shared<MomentumAmplitude>(f);
    auto ev = [fp, h, m, V, thr](double y, double t) {
        auto [a, b] = fp->support(10.0);
        a = std::max(a, thr);
        if (!(b > a)) return complex(0.0, 0.0);
        auto g = [&](double p) {
            const double Z = std::sqrt(std::max(0.0, p * p - 2 * m * V));
            return std::polar(1.0, Z * y / h - Z * Z * t / (2 * m * h)) * (*fp)(p);
        };
        const double span = std::abs(y) + (b) * t / m + fp->x_spread();
        const int panels = std::clamp(static_cast<int>(span * (b - a) / (2 * pi * h)) + 8, 8, 2000);
        auto r = integrate_adaptive(g, a, b, QuadratureSpec{1e-10, 1e-13, 4000}, panels);
        return r.value / std::sqrt(2 * pi * h);
    };
    return DeformedPacket([ev](double y) { return ev(y, 0.0); }, ev, lam, q0);
}

}  // namespace lwp
