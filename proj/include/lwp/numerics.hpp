#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "lwp/packets.hpp"
#include "lwp/quadrature.hpp"
#include "lwp/specfun.hpp"

namespace lwp {

/**
 * @brief (κ/√(2πit)) ∫ e^{iκ²(Q + sign·y)²/2t} ψ_g(y) dy in closed form.
 *
 * Completing the square gives prefactor 1/√(1+iħt/(mα)) and an exponent whose
 * numerator and denominator are both O(1/t), so small t does not cancel.
 */
inline complex fresnel_gaussian_integral(double Q, int sign, double t, const GaussianPacket& g, const UnitSystem& u) {
    if (!(t > 0.0)) throw InvalidArgument("fresnel_gaussian_integral: t must be > 0");
    if (sign != 1 && sign != -1) throw InvalidArgument("fresnel_gaussian_integral: sign must be +1 or -1");
    const double h = u.hbar(), m = u.mass();
    const double X = -sign * Q;  // kernel centred at y = X
    const double c = m / (2.0 * h * t);
    const double a = 1.0 / (2.0 * g.alpha());
    const double x0 = g.x0(), p0 = g.p0();
    const double dX = X - x0;
    const complex num(p0 * p0 / (h * h) - 4.0 * c * X * p0 / h, -4.0 * a * c * dX * dX - 4.0 * a * x0 * p0 / h);
    const complex den(-4.0 * a, 4.0 * c);
    const complex pref = 1.0 / std::sqrt(complex(1.0, h * t / (m * g.alpha())));
    return std::pow(pi * g.alpha(), -0.25) * pref * std::exp(num / den);
}

/**
 * @brief Half-line Fresnel integral (κ/√(2πit)) ∫_0^∞ e^{iκ²(X+y)²/2t} e^{iqy/ħ} dy, q complex.
 *
 * Closed form ½ e^{-iXq/ħ - iq²t/2mħ} erfc(z), z = e^{-iπ/4} κ (X + qt/m)/√(2t),
 * evaluated through w(·) so that no factor overflows.
 */
inline complex half_line_fresnel(double X, complex q, double t, const UnitSystem& u) {
    if (!(t > 0.0)) throw InvalidArgument("half_line_fresnel: t must be > 0");
    const double h = u.hbar(), m = u.mass();
    const complex w = X + q * (t / m);
    const complex rot(std::sqrt(0.5), -std::sqrt(0.5));
    const complex z = rot * (u.kappa() / std::sqrt(2.0 * t)) * w;
    const complex chirp = std::polar(0.5, m * X * X / (2.0 * h * t));
    const complex iz(-z.imag(), z.real());
    if (z.real() >= 0.0) return chirp * faddeeva_w(iz);
    const complex plane = std::exp(complex(0.0, -1.0) * (X * q / h + q * q * t / (2.0 * m * h)));
    return plane - chirp * faddeeva_w(-iz);
}

/// Transmission kernel K(x,p,t) = e^{-iVt/ħ}(H(x,Z,t)+H(x,-Z,t))/√(2πħ), Z = √(p²-2mV) principal branch.
inline complex step_transmission_kernel(double x, double p, double t, double V, const UnitSystem& u) {
    const double h = u.hbar(), m = u.mass();
    if (t == 0.0) return 0.0;
    const complex Z = std::sqrt(complex(p * p - 2.0 * m * V, 0.0));
    const complex s = half_line_fresnel(x, Z, t, u) + half_line_fresnel(x, -Z, t, u);
    return std::polar(1.0 / std::sqrt(2.0 * pi * h), -V * t / h) * s;
}

/// ∫ kernel(y) ψ0(y) dy over [support.first, support.second].
template <class Kern, class P>
QuadResult oscillatory_integral(Kern&& kernel, const P& psi0, std::pair<double, double> support,
                                const QuadratureSpec& spec = {}, int panels = 0) {
    const auto [a, b] = support;
    if (!(b >= a)) throw InvalidArgument("oscillatory_integral: empty support");
    if (panels <= 0) {
        const double w = std::max(psi0.position_spread() * 0.5, (b - a) / 2000.0);
        panels = std::clamp(static_cast<int>(std::ceil((b - a) / w)), 1, 4000);
    }
    auto g = [&](double y) -> complex { return kernel(y) * psi0.position(y); };
    auto r = integrate_adaptive(g, a, b, spec, panels);
    return require_converged(r, "oscillatory_integral");
}

/** @brief Knobs for convolve_with_kernel beyond the tolerance spec. */
struct ConvolutionOptions {
    double panel_width = 0.0;         // initial τ-panel width (0: whole interval)
    std::vector<double> breakpoints;  // extra τ partition points
    bool sqrt_substitution = false;   // τ = t - σ² for 1/√(t-τ) endpoint behaviour
    bool extend_to_infinity = false;  // integrate τ over [0, ∞) instead of [0, t]
    double kernel_rate = 0.0;         // V/ħ; required for the extension check
    double tail_period = 0.0;         // chunk length of the extended tail
};

namespace detail {

template <class G>
QuadResult oscillatory_tail(G& g, double start, double L, const QuadratureSpec& spec) {
    QuadResult out;
    std::vector<complex> partial;
    complex s = 0.0;
    complex prev_est = INFINITY;
    int stable = 0;
    for (int j = 0; j < 20000; ++j) {
        auto r = integrate_adaptive(g, start + j * L, start + (j + 1) * L, spec, 1);
        out.evaluations += r.evaluations;
        s += r.value;
        partial.push_back(s);
        if (partial.size() > 40) partial.erase(partial.begin());
        if (j >= 8) {
            auto [est, err] = wynn_epsilon(partial);
            const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(est));
            if (std::abs(est - prev_est) < tol && err < 10 * tol) {
                if (++stable >= 3) {
                    out.value = est;
                    out.error = std::max(std::abs(est - prev_est), err);
                    return out;
                }
            } else {
                stable = 0;
            }
            prev_est = est;
        }
    }
    out.value = s;
    out.error = std::abs(partial.back() - partial[partial.size() - 2]);
    out.converged = false;
    return out;
}

}  // namespace detail

/**
 * @brief ∫_0^t F(t-τ) kern(τ) dτ by adaptive quadrature.
 *
 * With opt.extend_to_infinity the upper limit becomes ∞ (F is then evaluated at
 * negative arguments and must be an analytic form such as a plane wave); this is
 * only allowed when t·V/ħ exceeds policy.conv_extend_threshold.
 */
template <class F, class K>
QuadResult convolve_with_kernel(F&& Ff, K&& kern, double t, const QuadratureSpec& spec, const SeriesPolicy& policy,
                                const ConvolutionOptions& opt = {}) {
    if (!(t >= 0.0)) throw InvalidArgument("convolve_with_kernel: t < 0");
    QuadResult out;
    if (t > 0.0) {
        if (!opt.sqrt_substitution) {
            auto g = [&](double tau) -> complex { return Ff(t - tau) * kern(tau); };
            auto pts = partition(0.0, t, opt.panel_width, opt.breakpoints);
            out = integrate_adaptive(g, pts, spec);
        } else {
            auto g = [&](double s) -> complex { return Ff(s * s) * kern(t - s * s) * (2.0 * s); };
            auto tp = partition(0.0, t, opt.panel_width, opt.breakpoints);
            std::vector<double> sp;
            sp.reserve(tp.size());
            for (auto it = tp.rbegin(); it != tp.rend(); ++it) sp.push_back(std::sqrt(std::max(0.0, t - *it)));
            out = integrate_adaptive(g, sp, spec);
        }
    }
    if (opt.extend_to_infinity) {
        if (!(opt.kernel_rate > 0.0)) throw InvalidArgument("convolve_with_kernel: extension needs kernel_rate = V/ħ");
        const double tv = t * opt.kernel_rate;
        if (!(tv > policy.conv_extend_threshold))
            throw PreconditionViolation("convolve_with_kernel: extension requires t·V/ħ above threshold",
                                        {{"t_V_over_hbar", tv, policy.conv_extend_threshold}});
        const double L = opt.tail_period > 0.0 ? opt.tail_period : 2.0 * pi / opt.kernel_rate;
        auto g = [&](double tau) -> complex { return Ff(t - tau) * kern(tau); };
        out += detail::oscillatory_tail(g, t, L, spec);
    }
    return out;
}

/**
 * @brief (1/√(2πħ)) ∫ e^{ipx/ħ} e^{-ip²t/2mħ} f(p) w(p) dp over the effective support of f.
 * With w ≡ 1 this is the free evolution at x; the reflected image uses x → -x.
 */
template <class W>
QuadResult momentum_integral(const MomentumAmplitude& f, W&& weight, double x, double t, const QuadratureSpec& spec,
                             const UnitSystem& u) {
    const double h = u.hbar(), m = u.mass();
    const auto [a, b] = f.support(10.0);
    auto g = [&](double p) -> complex {
        return std::polar(1.0, p * x / h - p * p * t / (2.0 * m * h)) * f(p) * complex(weight(p));
    };
    const double lever = std::abs(x - f.x_center()) + std::max(std::abs(a), std::abs(b)) * t / m;
    const int panels = std::clamp(static_cast<int>(std::ceil(lever * (b - a) / (2.0 * pi * h) / 3.0)) + 4, 4, 4000);
    auto r = integrate_adaptive(g, a, b, spec, panels);
    r.value /= std::sqrt(2.0 * pi * h);
    r.error /= std::sqrt(2.0 * pi * h);
    return r;
}

/// ∫_0^∞ e^{-st} g(t) dt for real s > 0, truncated where e^{-st} < 1e-17.
template <class G>
QuadResult laplace_transform(G&& g, double s, const QuadratureSpec& spec = {1e-10, 1e-14, 20000}, double scale = 1.0) {
    if (!(s > 0.0)) throw InvalidArgument("laplace_transform: s must be positive");
    const double T = 39.2 / s;
    const int panels = std::clamp(static_cast<int>(std::ceil(T / scale)), 8, 100000);
    auto r = integrate_adaptive([&](double t) { return std::exp(-s * t) * complex(g(t)); }, 0.0, T, spec, panels);
    return r;
}

}  // namespace lwp
