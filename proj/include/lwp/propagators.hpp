#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <type_traits>
#include <vector>

#include "lwp/numerics.hpp"
#include "lwp/packets.hpp"
#include "lwp/specfun.hpp"

namespace lwp {

/** @brief Accumulated quadrature diagnostics of one or more propagator evaluations. */
struct EvalReport {
    double error = 0.0;       // summed quadrature error estimates
    double tail_bound = 0.0;  // bound on omitted series terms
    long evaluations = 0;     // integrand evaluations
    int max_order = 0;        // largest series order used
    bool converged = true;

    void add(const QuadResult& q) {
        error += q.error;
        evaluations += q.evaluations;
        converged = converged && q.converged;
    }
    EvalReport& operator+=(const EvalReport& o) {
        error = std::max(error, o.error);
        tail_bound = std::max(tail_bound, o.tail_bound);
        evaluations += o.evaluations;
        max_order = std::max(max_order, o.max_order);
        converged = converged && o.converged;
        return *this;
    }
};

enum class StepSolutionMode { ExactLeft, ExactRight, ApproxClimb, ApproxForbidden };

/** @brief e^{-decay_rate·x} profile of the evanescent field, scaled by (1+R(p0)). */
struct EvanescentProfile {
    double decay_rate;
    complex prefactor;
};

// ---------------------------------------------------------------------------
// Free evolution
// ---------------------------------------------------------------------------

inline complex free_evolve(const GaussianPacket& g, double t, double x) {
    if (!(t >= 0.0)) throw InvalidArgument("free_evolve: t < 0");
    if (t == 0.0) return g.position(x);
    return fresnel_gaussian_integral(x, -1, t, g, g.units());
}

inline complex free_evolve(const SampledPacket& s, double t, double x, const QuadratureSpec& spec = {1e-10, 1e-13, 4000}) {
    if (!(t >= 0.0)) throw InvalidArgument("free_evolve: t < 0");
    const UnitSystem& u = s.units();
    const double h = u.hbar(), m = u.mass();
    const double zone = std::sqrt(2.0 * pi * h * t / m);
    if (t == 0.0 || zone < 0.05 * s.min_spacing()) return s.position(x);
    const double c = m / (2.0 * h * t);
    const complex pref = u.kappa() / std::sqrt(complex(0.0, 2.0 * pi * t));
    auto kern = [&](double y) { return pref * std::polar(1.0, c * (x - y) * (x - y)); };
    const double a = s.x_min(), b = s.x_max();
    const double lever = std::max(std::abs(x - a), std::abs(x - b));
    const double osc = 2.0 * c * lever * (b - a) / (2.0 * pi);
    // at short times the Fresnel kernel is a fast chirp; the momentum integral is then far tamer
    const double pw = 10.0 * s.momentum_spread(), pmax = std::abs(s.mean_momentum()) + pw;
    const double osc_p = (std::abs(x - s.mean_position()) + pmax * t / m) * 2.0 * pw / (2.0 * pi * h);
    if (osc > 4.0 * osc_p + 64.0) {
        auto q = momentum_integral(momentum_rep(s), [](double) { return 1.0; }, x, t, spec, u);
        return require_converged(q, "free_evolve(sampled)").value;
    }
    const int panels = std::clamp(static_cast<int>(osc / 2.0) + static_cast<int>(s.nodes().size() / 4) + 4, 4, 200000);
    auto r = integrate_adaptive([&](double y) { return kern(y) * s.position(y); }, a, b, spec, panels);
    return require_converged(r, "free_evolve(sampled)").value;
}

namespace detail {

/** @brief Classical envelope of a freely moving packet; used to skip terms that are ~e^{-36} small. */
struct Envelope {
    bool enabled = false;
    double c = 0.0, v = 0.0, sx = 1.0, sv = 0.0;
    static constexpr double nsig = 12.0;

    double centre(double t) const { return c + v * t; }
    double sd(double t) const { return std::hypot(sx, sv * t); }
    bool negligible_at(double Q, double t) const { return enabled && std::abs(Q - centre(t)) > nsig * sd(t); }
    /// Entire packet still left of x = 0.
    bool before_origin(double t) const { return enabled && centre(t) + nsig * sd(t) < 0.0; }
};

inline Envelope envelope_of(const GaussianPacket& g) {
    const double m = g.units().mass();
    return {true, g.x0(), g.p0() / m, g.position_spread(), g.momentum_spread() / m};
}
inline Envelope envelope_of(const SampledPacket&) { return {}; }
inline Envelope envelope_of(const MomentumAmplitude& f) {
    if (!f.gaussian()) return {};
    return envelope_of(*f.gaussian());
}

template <class P>
double speed_of(const P& p) {
    return std::abs(p.mean_momentum()) / p.units().mass();
}

// Initial τ-panel width: twice the time the packet needs to move one width.
template <class P>
double tau_panel_width(const P& p, double t) {
    const double m = p.units().mass();
    const double ts = p.position_spread() * m / (std::abs(p.mean_momentum()) + p.momentum_spread());
    return std::max(2.0 * ts, t / 4000.0);
}

// τ at which the packet centre passes Q (and ±3 spreads around it), inside (0,t).
inline void passage_breakpoints(const Envelope& e, double Q, double t, std::vector<double>& out) {
    if (!e.enabled || e.v == 0.0) return;
    const double tp = (Q - e.c) / e.v;
    const double w = 3.0 * e.sx / std::abs(e.v);
    for (double s : {tp - w, tp, tp + w}) {
        const double tau = t - s;
        if (tau > 0.0 && tau < t) out.push_back(tau);
    }
}

inline QuadratureSpec tau_spec(const QuadratureSpec& s, const SeriesPolicy& p) {
    return {std::min(s.rel_tol, p.tau_quad_tol), s.abs_tol, s.max_subdiv};
}
inline QuadratureSpec momentum_spec(const QuadratureSpec& s, const SeriesPolicy& p) {
    return {p.x_quad_tol, 0.1 * s.abs_tol, s.max_subdiv};
}

// Images needed so that every copy within ten spreads of the moving, spreading packet is kept.
template <class P>
int default_k_max(const P& p, double t, double d) {
    const double m = p.units().mass();
    const double sd = std::hypot(p.position_spread(), p.momentum_spread() * t / m);
    const double reach = std::abs(p.mean_position()) + speed_of(p) * t + 10.0 * sd + d;
    return static_cast<int>(std::ceil(reach / (2.0 * d))) + 1;
}

// ∫_0^t (k/τ) min(1, (Vτ/4ħ)^k/k!) dτ, the |M(k,·)| envelope integral.
inline double M_envelope_integral(int k, double t, double V, const UnitSystem& u) {
    const double a = V / (4.0 * u.hbar());
    const double lf = std::lgamma(k + 1.0);
    const double tc = std::exp(lf / k) / a;
    if (t <= tc) return std::exp(k * std::log(a * t) - lf);
    return 1.0 + k * std::log(t / tc);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Infinite well on [0,d]
// ---------------------------------------------------------------------------

/// Σ_{j=-K..K} [free(x+2dj) - free(-x+2dj)], K = policy.k_max or enough images to cover the spreading packet.
template <WavePacket P>
complex mirror_well(const P& psi0, double d, double t, double x, const SeriesPolicy& policy = {}, EvalReport* rep = nullptr) {
    if (!(d > 0.0)) throw InvalidArgument("mirror_well: d must be positive");
    if (!(x >= 0.0 && x <= d)) throw DomainError("mirror_well: x outside [0,d]");
    if (!(t >= 0.0)) throw InvalidArgument("mirror_well: t < 0");
    const int K = policy.k_max ? *policy.k_max : detail::default_k_max(psi0, t, d);
    complex s = 0.0;
    for (int j = -K; j <= K; ++j) s += free_evolve(psi0, t, x + 2.0 * d * j) - free_evolve(psi0, t, -x + 2.0 * d * j);
    if (rep) rep->max_order = std::max(rep->max_order, K);
    return s;
}

// ---------------------------------------------------------------------------
// Potential step at x = 0
// ---------------------------------------------------------------------------

/// free(x,t) + ∫_0^t free(-x,t-τ) r(τ) dτ for x < 0.
template <WavePacket P>
complex step_left_exact(const P& psi0, double V, double t, double x, const QuadratureSpec& spec = {},
                        const SeriesPolicy& policy = {}, EvalReport* rep = nullptr) {
    if (!(x < 0.0)) throw DomainError("step_left_exact: x must be < 0");
    if (!(t >= 0.0)) throw InvalidArgument("step_left_exact: t < 0");
    if (!(V > 0.0)) throw InvalidArgument("step_left_exact: V must be positive");
    if (t == 0.0) return psi0.position(x);
    const UnitSystem& u = psi0.units();
    const auto env = detail::envelope_of(psi0);
    auto F = [&](double tp) -> complex {
        if (env.negligible_at(-x, tp)) return 0.0;
        return free_evolve(psi0, tp, -x);
    };
    auto kern = [&](double tau) { return M_kernel(1, tau, V, u); };
    ConvolutionOptions opt;
    opt.panel_width = detail::tau_panel_width(psi0, t);
    detail::passage_breakpoints(env, -x, t, opt.breakpoints);
    auto q = convolve_with_kernel(F, kern, t, detail::tau_spec(spec, policy), policy, opt);
    if (rep) rep->add(q);
    require_converged(q, "step_left_exact");
    return free_evolve(psi0, t, x) + q.value;
}

/// free(x,t) + (1/√(2πħ))∫ e^{-ipx/ħ} e^{-ip²t/2mħ} f(p) R(p) dp; requires t_R·V/ħ above the policy threshold.
template <WavePacket P>
complex step_left_approx(const P& psi0, double V, double t, double x, const QuadratureSpec& spec = {},
                         const SeriesPolicy& policy = {}, EvalReport* rep = nullptr) {
    if (!(x < 0.0)) throw DomainError("step_left_approx: x must be < 0");
    if (!(V > 0.0)) throw InvalidArgument("step_left_approx: V must be positive");
    const UnitSystem& u = psi0.units();
    const double tR = classical_reflection_time(psi0.mean_position(), psi0.mean_momentum(), u);
    const double ratio = tR * V / u.hbar();
    if (!(ratio > policy.conv_extend_threshold))
        throw PreconditionViolation("step_left_approx: t_R·V/ħ below threshold", {{"tR_V_over_hbar", ratio, policy.conv_extend_threshold}});
    if (t == 0.0) return psi0.position(x);
    const MomentumAmplitude f = momentum_rep(psi0);
    auto q = momentum_integral(f, [&](double p) { return reflection_R(p, V, u).value; }, -x, t,
                               detail::momentum_spec(spec, policy), u);
    if (rep) rep->add(q);
    require_converged(q, "step_left_approx");
    return free_evolve(psi0, t, x) + q.value;
}

namespace detail {

/** @brief One shifted packet entering the transmission integrals: amplitude e^{ipK/ħ} f(±p). */
struct ShiftedAmplitude {
    double K;
    bool mirrored;
    Envelope env;  // physical position/velocity of the shifted packet
};

inline ShiftedAmplitude shifted(const MomentumAmplitude& f, double K, bool mirrored) {
    Envelope e = envelope_of(f);
    if (mirrored) {
        e.c = -e.c;
        e.v = -e.v;
    }
    e.c -= K;
    return {K, mirrored, e};
}

/**
 * @brief Σ_j c_j ∫ K(x,p,t') a_j(p) dp for the given active amplitudes in a single momentum integral.
 * Mirrored amplitudes a(p) = e^{ipK/ħ} f(-p) are folded onto p ↦ -p using the evenness of K in p.
 */
inline QuadResult transmitted_sum(const MomentumAmplitude& f, const std::vector<ShiftedAmplitude>& terms,
                                  const std::vector<complex>& coef, double x, double tp, double V,
                                  const QuadratureSpec& qs) {
    QuadResult out;
    if (terms.empty() || tp <= 0.0) return out;
    const UnitSystem& u = f.units();
    const double h = u.hbar(), m = u.mass();
    const auto [a, b] = f.support(10.0);
    auto g = [&](double p) -> complex {
        complex w = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            // mirrored: ∫K(p) e^{ipK} f(-p) dp = ∫K(p) e^{-ipK} f(p) dp
            const double ph = (terms[j].mirrored ? -1.0 : 1.0) * p * terms[j].K / h;
            w += coef[j] * std::polar(1.0, ph);
        }
        return step_transmission_kernel(x, p, tp, V, u) * f(p) * w;
    };
    // total variation of the dominant phase -p·c_f + s·x·Re Z - p²t'/2m over the support sets the panel count;
    // the branch point of Z is a breakpoint
    const double pth = std::sqrt(2.0 * m * V);
    auto zr = [&](double p) { return std::sqrt(std::max(0.0, p * p - pth * pth)); };
    double tv = 0.0;
    for (const auto& s : terms) {
        const double cf = s.mirrored ? f.x_center() + s.K : f.x_center() - s.K;
        for (double sg : {-1.0, 1.0}) {
            auto phi = [&](double p) { return (-p * cf + sg * x * zr(p) - p * p * tp / (2.0 * m)) / h; };
            double acc = 0.0, prev = phi(a);
            for (int i = 1; i <= 64; ++i) {
                const double cur = phi(a + (b - a) * i / 64.0);
                acc += std::abs(cur - prev);
                prev = cur;
            }
            tv = std::max(tv, acc);
        }
    }
    const int panels = std::clamp(static_cast<int>(std::ceil(tv / (2.0 * pi) / 2.0)) + 2, 2, 4000);
    std::vector<double> pts = partition(a, b, (b - a) / panels, {-pth, pth});
    out = integrate_adaptive(g, pts, qs);
    return out;
}

// Sum over both shifted families of the outside solution. Family + : e^{ip2dk/ħ}f(p) with sign (-1)^k;
// family - : e^{ip2d(k+1)/ħ} f(-p) with sign -(-1)^k. d = ∞ leaves only the k = 0 term of family +.
inline complex outside_series(const MomentumAmplitude& f, double d, double V, double t, double x, int kmax,
                              const QuadratureSpec& spec, const SeriesPolicy& policy, EvalReport* rep) {
    const UnitSystem& u = f.units();
    struct Term {
        ShiftedAmplitude s;
        int k;
        double sign;
    };
    std::vector<Term> terms;
    const bool finite = std::isfinite(d);
    for (int k = 0; k <= (finite ? kmax : 0); ++k) {
        const double sg = (k % 2 == 0) ? 1.0 : -1.0;
        terms.push_back({shifted(f, finite ? 2.0 * d * k : 0.0, false), k, sg});
        if (finite) terms.push_back({shifted(f, 2.0 * d * (k + 1), true), k, -sg});
    }
    const QuadratureSpec qs = momentum_spec(spec, policy);
    QuadResult inner_total;

    // un-convolved part of the k = 0 terms (delta in (ρ+1)ρ^0)
    std::vector<ShiftedAmplitude> act;
    std::vector<complex> cf;
    for (const auto& tm : terms)
        if (tm.k == 0 && !tm.s.env.before_origin(t)) {
            act.push_back(tm.s);
            cf.push_back(tm.sign);
        }
    auto direct = transmitted_sum(f, act, cf, x, t, V, qs);
    inner_total += direct;

    const int nk = kmax + 2;
    std::vector<complex> M(static_cast<std::size_t>(nk) + 1);
    auto integrand = [&](double tp) -> complex {
        const double tau = t - tp;
        if (tp <= 0.0) return 0.0;
        std::vector<ShiftedAmplitude> a;
        std::vector<complex> c;
        bool any = false;
        for (const auto& tm : terms)
            if (!tm.s.env.before_origin(tp)) {
                any = true;
                break;
            }
        if (!any) return 0.0;
        M_kernel_sequence(nk, tau, V, u, M.data());
        for (const auto& tm : terms) {
            if (tm.s.env.before_origin(tp)) continue;
            const complex L = tm.k == 0 ? M[1] : M[static_cast<std::size_t>(tm.k)] + M[static_cast<std::size_t>(tm.k) + 1];
            a.push_back(tm.s);
            c.push_back(tm.sign * L);
        }
        auto r = transmitted_sum(f, a, c, x, tp, V, qs);
        inner_total += r;
        return r.value;
    };
    ConvolutionOptions opt;
    const double m = u.mass();
    const double ts = f.x_spread() * m / (std::abs(f.p0()) + f.spread());
    opt.panel_width = std::max(2.0 * ts, t / 4000.0);
    // activation times of the shifted packets become breakpoints
    for (const auto& tm : terms) {
        const auto& e = tm.s.env;
        if (!e.enabled || e.v <= 0.0) continue;
        const double ta = -(e.c + Envelope::nsig * e.sx) / e.v;
        if (ta > 0.0 && ta < t) opt.breakpoints.push_back(t - ta);
    }
    auto q = convolve_with_kernel(integrand, [](double) { return complex(1.0, 0.0); }, t, tau_spec(spec, policy), policy, opt);
    if (rep) {
        rep->add(q);
        rep->evaluations += inner_total.evaluations;
        rep->max_order = std::max(rep->max_order, kmax);
        rep->converged = rep->converged && inner_total.converged;
        if (finite) {
            // omitted orders: reachable only if the k_max+1 packet arrives before t
            const auto nxt = shifted(f, 2.0 * d * (kmax + 1), false);
            if (!nxt.env.enabled || !nxt.env.before_origin(t)) rep->tail_bound = INFINITY;
        }
    }
    require_converged(q, "transmitted series");
    if (!inner_total.converged)
        throw AccuracyFailure("transmitted series: momentum integral did not converge", q.value + direct.value,
                              inner_total.error);
    return direct.value + q.value;
}

}  // namespace detail

/// ∫K(x,p,t) f(p) dp + ∫_0^t [∫K(x,p,t-τ) f(p) dp] r(τ) dτ for x > 0.
inline complex step_right_exact(const MomentumAmplitude& f, double V, double t, double x, const QuadratureSpec& spec = {},
                                const SeriesPolicy& policy = {}, EvalReport* rep = nullptr) {
    if (!(x > 0.0)) throw DomainError("step_right_exact: x must be > 0");
    if (!(t >= 0.0)) throw InvalidArgument("step_right_exact: t < 0");
    if (!(V > 0.0)) throw InvalidArgument("step_right_exact: V must be positive");
    if (t == 0.0) return 0.0;
    return detail::outside_series(f, INFINITY, V, t, x, 0, spec, policy, rep);
}

/** @brief Climbing-case approximation; diagnostics and ψ~ are built once. */
class StepClimbApprox {
public:
    template <WavePacket P>
    StepClimbApprox(const P& psi0, double V)
        : u_(psi0.units()), V_(V), R_(reflection_R(psi0.mean_momentum(), V, psi0.units()).value),
          diag_(climb_diagnostics(momentum_rep(psi0), V)),
          tilde_(make_tilde(psi0, V, diag_)) {
        if constexpr (std::is_same_v<P, GaussianPacket>)
            free_ = [g = psi0](double t, double x) { return free_evolve(g, t, x); };
        else
            free_ = [s = psi0](double t, double x) { return free_evolve(s, t, x); };
    }

    complex operator()(double t, double x) const {
        if (x <= 0.0) return free_(t, x) + R_ * free_(t, -x);
        return (1.0 + R_) * std::polar(1.0, -V_ * t / u_.hbar()) * tilde_.free(x, t);
    }
    const PeakednessReport& diagnostics() const noexcept { return diag_; }
    complex R() const noexcept { return R_; }
    const DeformedPacket& deformed() const noexcept { return tilde_; }

private:
    template <class P>
    static DeformedPacket make_tilde(const P& psi0, double V, const PeakednessReport& d) {
        if (!d.ok) throw PreconditionViolation("step_climb_approx: packet not peaked enough above the step", d.violations);
        if constexpr (std::is_same_v<P, GaussianPacket>)
            return deformed_packet(psi0, V);
        else
            return deformed_packet(momentum_rep(psi0), V, psi0.units());
    }
    UnitSystem u_;
    double V_;
    complex R_;
    PeakednessReport diag_;
    DeformedPacket tilde_;
    std::function<complex(double, double)> free_;
};

template <WavePacket P>
complex step_climb_approx(const P& psi0, double V, double t, double x) {
    return StepClimbApprox(psi0, V)(t, x);
}

/** @brief Forbidden-region approximation; diagnostics are built once. */
class StepForbiddenApprox {
public:
    template <WavePacket P>
    StepForbiddenApprox(const P& psi0, double V)
        : u_(psi0.units()), R_(reflection_R(psi0.mean_momentum(), V, psi0.units()).value),
          diag_(forbidden_diagnostics(momentum_rep(psi0), V)) {
        if (!diag_.ok) throw PreconditionViolation("step_forbidden_approx: packet not confined below the step", diag_.violations);
        const double p0 = psi0.mean_momentum();
        prof_ = {std::sqrt(2.0 * u_.mass() * V - p0 * p0) / u_.hbar(), 1.0 + R_};
        if constexpr (std::is_same_v<P, GaussianPacket>)
            free_ = [g = psi0](double t, double x) { return free_evolve(g, t, x); };
        else
            free_ = [s = psi0](double t, double x) { return free_evolve(s, t, x); };
    }

    complex operator()(double t, double x) const {
        if (x <= 0.0) return free_(t, x) + R_ * free_(t, -x);
        return prof_.prefactor * std::exp(-prof_.decay_rate * x) * free_(t, 0.0);
    }
    const PeakednessReport& diagnostics() const noexcept { return diag_; }
    const EvanescentProfile& profile() const noexcept { return prof_; }
    complex R() const noexcept { return R_; }

private:
    UnitSystem u_;
    complex R_;
    PeakednessReport diag_;
    EvanescentProfile prof_{};
    std::function<complex(double, double)> free_;
};

template <WavePacket P>
complex step_forbidden_approx(const P& psi0, double V, double t, double x) {
    return StepForbiddenApprox(psi0, V)(t, x);
}

// ---------------------------------------------------------------------------
// Box with exit: wall at x = -d, step of height V at x = 0
// ---------------------------------------------------------------------------

namespace detail {

/** @brief One image term free(Q(x), ·) convolved with M(order,·) and weighted by coef. */
struct ImageTerm {
    double a, b;  // Q = a + b·x
    int order;    // kernel order; 0 = un-convolved
    double coef;
};

// Mirror-sum image terms of the inside solution truncated at kmax.
inline std::vector<ImageTerm> inside_terms(double d, int kmax) {
    std::vector<ImageTerm> T;
    T.push_back({0.0, 1.0, 0, 1.0});    // free(x)
    T.push_back({0.0, -1.0, 1, 1.0});   // free(-x) * r
    for (int k = 0; k <= kmax; ++k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
        const double D = 2.0 * d * (k + 1);
        T.push_back({-D, -1.0, k, -s});      // -(-1)^k free(-(D+x)) * M(k)
        T.push_back({D, 1.0, k + 1, -s});    // (-1)^{k+1} free(D+x) * M(k+1)
        T.push_back({-D, 1.0, k + 1, -s});   // (-1)^{k+1} free(x-D) * M(k+1)
        T.push_back({D, -1.0, k + 2, -s});   // -(-1)^{k+2} free(D-x) * M(k+2)
    }
    return T;
}

}  // namespace detail

/// Exact solution inside the box, x ∈ [-d, 0].
template <WavePacket P>
complex asym_inside_exact(const P& psi0, double d, double V, double t, double x, const QuadratureSpec& spec = {},
                          const SeriesPolicy& policy = {}, EvalReport* rep = nullptr) {
    if (!(d > 0.0) || !(V > 0.0)) throw InvalidArgument("asym_inside_exact: d and V must be positive");
    if (!(x >= -d && x <= 0.0)) throw DomainError("asym_inside_exact: x outside [-d,0]");
    if (!(t >= 0.0)) throw InvalidArgument("asym_inside_exact: t < 0");
    if (t == 0.0) return psi0.position(x);
    const UnitSystem& u = psi0.units();
    const int kmax = policy.k_max ? *policy.k_max : detail::default_k_max(psi0, t, d);
    const auto terms = detail::inside_terms(d, kmax);
    const auto env = detail::envelope_of(psi0);

    complex direct = 0.0;
    std::vector<detail::ImageTerm> conv;
    for (const auto& T : terms) {
        if (T.order == 0)
            direct += T.coef * free_evolve(psi0, t, T.a + T.b * x);
        else
            conv.push_back(T);
    }
    const int nk = kmax + 2;
    std::vector<complex> M(static_cast<std::size_t>(nk) + 1);
    auto integrand = [&](double tp) -> complex {
        const double tau = t - tp;
        complex s = 0.0;
        bool have_kernels = false;
        for (const auto& T : conv) {
            const double Q = T.a + T.b * x;
            if (env.negligible_at(Q, tp)) continue;
            if (!have_kernels) {
                M_kernel_sequence(nk, tau, V, u, M.data());
                have_kernels = true;
            }
            s += T.coef * free_evolve(psi0, tp, Q) * M[static_cast<std::size_t>(T.order)];
        }
        return s;
    };
    ConvolutionOptions opt;
    opt.panel_width = detail::tau_panel_width(psi0, t);
    for (const auto& T : conv) detail::passage_breakpoints(env, T.a + T.b * x, t, opt.breakpoints);
    auto q = convolve_with_kernel(integrand, [](double) { return complex(1.0, 0.0); }, t, detail::tau_spec(spec, policy),
                                  policy, opt);
    if (rep) {
        rep->add(q);
        rep->max_order = std::max(rep->max_order, kmax);
        // bound for the next two omitted orders of every family
        double tail = 0.0;
        for (int k = kmax + 1; k <= kmax + 2; ++k) {
            const double D = 2.0 * d * (k + 1);
            const double Qs[4] = {-(D + x), D + x, x - D, D - x};
            const int ord[4] = {k, k + 1, k + 1, k + 2};
            for (int j = 0; j < 4; ++j) {
                double sup = 0.0;
                for (int i = 0; i <= 64; ++i) sup = std::max(sup, std::abs(free_evolve(psi0, t * i / 64.0, Qs[j])));
                tail += sup * detail::M_envelope_integral(ord[j], t, V, u);
            }
        }
        rep->tail_bound = std::max(rep->tail_bound, tail);
    }
    require_converged(q, "asym_inside_exact");
    return direct + q.value;
}

/// Exact solution outside the box, x > 0.
inline complex asym_outside_exact(const MomentumAmplitude& f, double d, double V, double t, double x,
                                  const QuadratureSpec& spec = {}, const SeriesPolicy& policy = {},
                                  EvalReport* rep = nullptr) {
    if (!(d > 0.0) || !(V > 0.0)) throw InvalidArgument("asym_outside_exact: d and V must be positive");
    if (!(x > 0.0)) throw DomainError("asym_outside_exact: x must be > 0");
    if (!(t >= 0.0)) throw InvalidArgument("asym_outside_exact: t < 0");
    if (t == 0.0) return 0.0;
    const int kmax = policy.k_max ? *policy.k_max
                                  : static_cast<int>(std::ceil(std::abs(f.p0()) / f.units().mass() * t / (2.0 * d))) + 3;
    return detail::outside_series(f, d, V, t, x, kmax, spec, policy, rep);
}

/** @brief Truncation checks of the exit approximation. */
struct ExitConditions {
    int l = 0;
    int L = 0;
    double cond1 = 0.0;
    double cond2 = 0.0;
};

template <WavePacket P>
ExitConditions exit_conditions(const P& psi0, double d, double V, double t, const SeriesPolicy& policy = {}) {
    const UnitSystem& u = psi0.units();
    const double h = u.hbar(), m = u.mass();
    const double v0 = detail::speed_of(psi0);
    ExitConditions c;
    c.l = std::max(1, static_cast<int>(std::ceil((v0 * t + 3.0 * d) / (2.0 * d) - 1e-12)));
    c.L = c.l - 1;
    c.cond1 = t * t * h * std::sqrt(V / (m * m * m)) / (d * d * d);
    c.cond2 = (t > 0.0 ? std::pow(2.0 * h / (V * t), policy.cond2_epsilon) : 0.0) * c.l * (c.l - 1) / 2.0;
    return c;
}

/// Exit approximation inside the box: mirror sums weighted by powers of R(p0).
template <WavePacket P>
complex asym_inside_approx(const P& psi0, double d, double V, double t, double x, const SeriesPolicy& policy = {}) {
    if (!(d > 0.0) || !(V > 0.0)) throw InvalidArgument("asym_inside_approx: d and V must be positive");
    if (!(x >= -d && x <= 0.0)) throw DomainError("asym_inside_approx: x outside [-d,0]");
    const auto c = exit_conditions(psi0, d, V, t, policy);
    if (!(c.cond1 < policy.cond1_max) || !(c.cond2 < policy.cond2_max))
        throw PreconditionViolation("asym_inside_approx: truncation conditions violated",
                                    {{"cond1", c.cond1, policy.cond1_max}, {"cond2", c.cond2, policy.cond2_max}});
    const complex R = reflection_R(psi0.mean_momentum(), V, psi0.units()).value;
    const int L1 = policy.L1.value_or(c.L), L2 = policy.L2.value_or(c.L), L3 = policy.L3.value_or(c.L),
              L4 = policy.L4.value_or(c.L);
    auto fr = [&](double Q) { return free_evolve(psi0, t, Q); };
    complex s = fr(x) + R * fr(-x);
    complex Rk = 1.0;  // R^k
    const int Lmax = std::max({L1, L2, L3, L4});
    for (int k = 0; k <= Lmax; ++k) {
        const double sg = (k % 2 == 0) ? 1.0 : -1.0;
        const double D = 2.0 * d * (k + 1);
        if (k <= L1) s += -sg * Rk * fr(-(D + x));
        if (k <= L2) s += -sg * Rk * R * fr(x - D);
        if (k <= L3) s += -sg * Rk * R * fr(D + x);
        if (k <= L4) s += -sg * Rk * R * R * fr(D - x);
        Rk *= R;
    }
    return s;
}

}  // namespace lwp
