#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "lwp/units.hpp"

namespace lwp {

// ---------------------------------------------------------------------------
// Faddeeva function w(z) = e^{-z^2} erfc(-iz)
// Region split after Poppe & Wijers: power series near the origin, Laplace
// continued fraction far out, combined Taylor/continued fraction between.
// ---------------------------------------------------------------------------
inline complex faddeeva_w(complex z) {
    const double xi = z.real(), yi = z.imag();
    if (!std::isfinite(xi) || !std::isfinite(yi)) throw InvalidArgument("faddeeva_w: non-finite argument");
    constexpr double factor = 1.12837916709551257388;  // 2/sqrt(pi)

    const double xabs = std::abs(xi), yabs = std::abs(yi);
    const double x = xabs / 6.3, y = yabs / 4.4;
    double qrho = x * x + y * y;
    const double xquad0 = xabs * xabs - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;

    double u = 0.0, v = 0.0, u2 = 0.0, v2 = 0.0;
    const bool series = qrho < 0.085264;
    if (series) {
        qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j, ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad0 - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad0) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = factor * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad0);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0, h2 = 0.0;
        int kapn = 0, nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            h2 = 2.0 * h;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const bool b = h > 0.0;
        double qlambda = b ? std::pow(h2, kapn) : 0.0;
        double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (b && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (h == 0.0) {
            u = factor * rx;
            v = factor * ry;
        } else {
            u = factor * sx;
            v = factor * sy;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }

    if (yi < 0.0) {
        if (series) {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            // 2 e^{-z^2} may overflow; that is the true size of w there.
            const double w1 = 2.0 * std::exp(-xquad0);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (xi > 0.0) v = -v;
    } else if (xi < 0.0) {
        v = -v;
    }
    return {u, v};
}

namespace detail {
inline void require_finite(complex z, const char* who) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument(std::string(who) + ": non-finite argument");
}
}  // namespace detail

/// Scaled complementary error function e^{z^2} erfc(z). Finite wherever erfc is representable after scaling.
inline complex erfcx_complex(complex z) {
    detail::require_finite(z, "erfcx_complex");
    const complex iz(-z.imag(), z.real());
    if (z.real() >= 0.0) return faddeeva_w(iz);
    // erfc(z) = 2 - erfc(-z)  =>  erfcx(z) = 2 e^{z^2} - w(-iz)
    return 2.0 * std::exp(z * z) - faddeeva_w(-iz);
}

/// Complementary error function for complex argument.
inline complex erfc_complex(complex z) {
    detail::require_finite(z, "erfc_complex");
    const complex iz(-z.imag(), z.real());
    if (z.real() >= 0.0) {
        const complex e = -z * z;
        if (e.real() < -745.0) return {0.0, 0.0};
        return std::exp(e) * faddeeva_w(iz);
    }
    const complex e = -z * z;
    if (e.real() < -745.0) return {2.0, 0.0};
    return 2.0 - std::exp(e) * faddeeva_w(-iz);
}

// ---------------------------------------------------------------------------
// Bessel functions of the first kind, integer order
// ---------------------------------------------------------------------------
namespace detail {

inline double bessel_series(int n, double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / k;
    double sum = term;
    const double q = -h * h;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel asymptotic expansion for J0, J1; accurate to ~1e-16 for x >= 25.
inline void bessel_j01_asymptotic(double x, double& j0, double& j1) {
    const double s = std::sin(x), c = std::cos(x);
    const double r = std::sqrt(2.0 / (pi * x)) / std::sqrt(2.0);
    double out[2];
    for (int nu = 0; nu < 2; ++nu) {
        const double mu = 4.0 * nu * nu;
        double P = 1.0, Q = 0.0, t = 1.0;
        for (int k = 1; k < 60; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double nt = t * (mu - odd * odd) / (k * 8.0 * x);
            if (std::abs(nt) > std::abs(t)) break;
            t = nt;
            const int m = k / 2;
            const double sg = (m % 2 == 0) ? 1.0 : -1.0;
            if (k % 2 == 0)
                P += sg * t;
            else
                Q += sg * t;
            if (std::abs(t) < 1e-17) break;
        }
        // chi = x - pi/4 (nu=0), x - 3pi/4 (nu=1); the 1/sqrt2 is folded into r
        double cchi, schi;
        if (nu == 0) {
            cchi = c + s;
            schi = s - c;
        } else {
            cchi = s - c;
            schi = -s - c;
        }
        out[nu] = r * (P * cchi - Q * schi);
    }
    j0 = out[0];
    j1 = out[1];
}

// Miller backward recurrence normalized by J0 + 2 sum J_2k = 1; fills J_0..J_nmax.
inline void bessel_miller(int nmax, double x, double* out) {
    const int top = std::max(nmax, static_cast<int>(x));
    int m = top + 16 + static_cast<int>(std::sqrt(40.0 * (top + 1)));
    m += m % 2;
    const double tox = 2.0 / x;
    double bjp = 0.0, bj = 1.0, sum = 0.0;
    for (int i = 0; i <= nmax; ++i) out[i] = 0.0;
    for (int j = m; j > 0; --j) {
        const double bjm = j * tox * bj - bjp;
        bjp = bj;
        bj = bjm;  // J_{j-1}
        if (std::abs(bj) > 1e250) {
            bj *= 1e-250;
            bjp *= 1e-250;
            sum *= 1e-250;
            for (int i = j - 1; i <= nmax; ++i) out[i] *= 1e-250;
        }
        if (j - 1 <= nmax) out[j - 1] = bj;
        if ((j - 1) % 2 == 0 && j - 1 > 0) sum += bj;
    }
    sum = 2.0 * sum + bj;
    for (int i = 0; i <= nmax; ++i) out[i] /= sum;
}

// J_0..J_nmax for x >= 0.
inline void bessel_sequence_nonneg(int nmax, double x, double* out) {
    if (x == 0.0) {
        out[0] = 1.0;
        for (int i = 1; i <= nmax; ++i) out[i] = 0.0;
        return;
    }
    if (x < 1.0) {
        for (int i = 0; i <= nmax; ++i) out[i] = bessel_series(i, x);
        return;
    }
    if (x >= 25.0 && nmax < x) {
        double j0, j1;
        bessel_j01_asymptotic(x, j0, j1);
        out[0] = j0;
        if (nmax >= 1) out[1] = j1;
        for (int n = 1; n < nmax; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
        return;
    }
    bessel_miller(nmax, x, out);
}

}  // namespace detail

/// J_0(x)..J_nmax(x) written to out[0..nmax].
inline void bessel_j_sequence(int nmax, double x, double* out) {
    if (nmax < 0) throw InvalidArgument("bessel_j_sequence: nmax < 0");
    if (!std::isfinite(x)) throw InvalidArgument("bessel_j_sequence: non-finite x");
    detail::bessel_sequence_nonneg(nmax, std::abs(x), out);
    if (x < 0.0)
        for (int i = 1; i <= nmax; i += 2) out[i] = -out[i];
}

/// Integer-order Bessel function of the first kind.
inline double bessel_j(int n, double x) {
    if (n < 0) throw InvalidArgument("bessel_j: negative order");
    if (!std::isfinite(x)) throw InvalidArgument("bessel_j: non-finite x");
    const double ax = std::abs(x);
    double v;
    if (ax < 1.0) {
        v = detail::bessel_series(n, ax);
    } else if (n <= 1 || (ax >= 25.0 && n < ax)) {
        std::vector<double> buf(static_cast<std::size_t>(std::max(n, 1)) + 1);
        detail::bessel_sequence_nonneg(n, ax, buf.data());
        v = buf[static_cast<std::size_t>(n)];
    } else {
        std::vector<double> buf(static_cast<std::size_t>(n) + 1);
        detail::bessel_miller(n, ax, buf.data());
        v = buf[static_cast<std::size_t>(n)];
    }
    return (x < 0.0 && (n % 2 == 1)) ? -v : v;
}

// ---------------------------------------------------------------------------
// Step kernels
// ---------------------------------------------------------------------------

/// rho(s) = 2/(1+sqrt(1 - V/(hbar s i))) - 1, principal branch.
inline complex rho_of_s(complex s, double V, const UnitSystem& u = {}) {
    if (s == complex(0.0, 0.0)) throw Singularity("rho_of_s: s == 0");
    detail::require_finite(s, "rho_of_s");
    const complex rad = 1.0 - V / (u.hbar() * s * complex(0.0, 1.0));
    return 2.0 / (1.0 + std::sqrt(rad)) - 1.0;
}

namespace detail {
// (-i)^k
inline complex minus_i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}
}  // namespace detail

/// M(k,t) = k/(i^k t) J_k(Vt/2hbar) e^{-iVt/2hbar}; inverse transform of rho^k.
inline complex M_kernel(int k, double t, double V, const UnitSystem& u = {}) {
    if (k < 1) throw InvalidArgument("M_kernel: k < 1");
    if (!(t >= 0.0)) throw InvalidArgument("M_kernel: t < 0");
    if (t == 0.0) return k == 1 ? complex(0.0, -V / (4.0 * u.hbar())) : complex(0.0, 0.0);
    const double a = V * t / (2.0 * u.hbar());
    return detail::minus_i_pow(k) * (k * bessel_j(k, a) / t) * std::polar(1.0, -a);
}

/// r(t) = M(1,t); inverse transform of rho.
inline complex r_kernel(double t, double V, const UnitSystem& u = {}) {
    if (!(t >= 0.0)) throw InvalidArgument("r_kernel: t < 0");
    return M_kernel(1, t, V, u);
}

/// L(k,t) = M(k,t)+M(k+1,t) for k>=1; the delta-free part r(t) for k=0.
inline complex L_kernel(int k, double t, double V, const UnitSystem& u = {}) {
    if (k < 0) throw InvalidArgument("L_kernel: k < 0");
    if (k == 0) return r_kernel(t, V, u);
    return M_kernel(k, t, V, u) + M_kernel(k + 1, t, V, u);
}

/**
 * @brief M(1..kmax, t) in one Bessel sweep; out[k] = M(k,t), out[0] unused (set 0).
 * out must hold kmax+1 values.
 */
inline void M_kernel_sequence(int kmax, double t, double V, const UnitSystem& u, complex* out) {
    if (kmax < 1) throw InvalidArgument("M_kernel_sequence: kmax < 1");
    out[0] = 0.0;
    if (t == 0.0) {
        out[1] = complex(0.0, -V / (4.0 * u.hbar()));
        for (int k = 2; k <= kmax; ++k) out[k] = 0.0;
        return;
    }
    constexpr int stack = 64;
    double jbuf[stack];
    std::vector<double> jheap;
    double* J = jbuf;
    if (kmax + 1 > stack) {
        jheap.resize(static_cast<std::size_t>(kmax) + 1);
        J = jheap.data();
    }
    const double a = V * t / (2.0 * u.hbar());
    bessel_j_sequence(kmax, a, J);
    const complex ph = std::polar(1.0 / t, -a);
    for (int k = 1; k <= kmax; ++k) out[k] = detail::minus_i_pow(k) * (k * J[k]) * ph;
}

/** @brief Stationary reflection amplitude at the step. */
struct ReflectionCoefficient {
    complex value;
    double k_ratio;
};

/// R(p) = rho(-i p^2/(2 m hbar)); equals -1+2k-2sqrt(k(k-1)) for k=p^2/(2mV) >= 1.
inline ReflectionCoefficient reflection_R(double p, double V, const UnitSystem& u = {}) {
    if (!(V > 0.0)) throw InvalidArgument("reflection_R: V must be positive");
    const double k = p * p / (2.0 * u.mass() * V);
    if (k == 0.0) return {complex(-1.0, 0.0), 0.0};
    if (k >= 1.0) {
        // -1+2k-2sqrt(k(k-1)) = 1/(sqrt k + sqrt(k-1))^2, cancellation-free
        const double s = std::sqrt(k) + std::sqrt(k - 1.0);
        return {complex(1.0 / (s * s), 0.0), k};
    }
    // principal-branch rho at s = -i p^2/(2 m hbar): sqrt(1-1/k) = i sqrt(1/k-1)
    const complex root(0.0, std::sqrt(1.0 / k - 1.0));
    return {2.0 / (1.0 + root) - 1.0, k};
}

}  // namespace lwp
