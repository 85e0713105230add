// End-to-end acceptance checks, one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lwp/diagnostics.hpp"
#include "lwp/numerics.hpp"
#include "lwp/oracle.hpp"
#include "lwp/propagators.hpp"

using namespace lwp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

std::vector<double> arange(double a, double b, double h) {
    std::vector<double> xs;
    for (long i = 0;; ++i) {
        const double x = a + i * h;
        if (x > b + 1e-9 * h) break;
        xs.push_back(x);
    }
    return xs;
}

WaveField tabulate(double t, const std::vector<double>& xs, const std::function<complex(double)>& f) {
    std::vector<complex> v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) v[i] = f(xs[i]);
    return WaveField(t, xs, std::move(v));
}

// Oracle values at the given positions, which must be grid nodes.
WaveField pick_nodes(const WaveField& cn, const FdGrid& g, const std::vector<double>& xs) {
    std::vector<complex> v;
    for (double x : xs) {
        const double s = (x - g.x_min) / g.dx();
        const long i = std::lround(s);
        if (std::abs(s - i) > 1e-6 || i < 0 || i >= g.n_points) throw InvalidArgument("pick_nodes: position is not a grid node");
        v.push_back(cn.amps()[static_cast<std::size_t>(i)]);
    }
    return WaveField(cn.t(), xs, std::move(v));
}

double l2_diff(const WaveField& a, const WaveField& b) { return field_difference(a, b).l2; }

// ---- 1: mirror images against the sine expansion ---------------------------

Outcome mirror_vs_eigen() {
    const double alpha = 1.0, d = 20.0 * std::sqrt(alpha);
    const GaussianPacket g(alpha, d / 2.0, 30.0 / std::sqrt(alpha));
    const InfiniteWellEigenSum es(g, d, 400);
    const double period = 2.0 * d / (g.p0() / g.units().mass());
    double worst = 0.0;
    int n = 0;
    for (int k = 0; k <= 16; ++k) {
        const double t = 2.0 * period * k / 16.0;
        for (double x : arange(0.0, d, 0.05)) {
            worst = std::max(worst, std::abs(mirror_well(g, d, t, x) - es(t, x)));
            ++n;
        }
    }
    return {worst < 1e-6, fmt("Linf=%.2e over %d points up to two periods (limit 1e-6)", worst, n)};
}

// ---- shared oracle run for the climbing step -------------------------------

const GaussianPacket kClimb(1.0, -10.0, 100.0);
const double kClimbV = 100.0 * 100.0 / (2.0 * 1.5);

struct ClimbOracle {
    FdGrid grid;
    std::vector<WaveField> fields;  // t = 2 t_R, 4 t_R
};

const ClimbOracle& climb_oracle() {
    // spacing small enough that the lattice dispersion moves |R|² by < 4e-4
    static const ClimbOracle o = [] {
        ClimbOracle c{FdGrid::with_spacing(-40.0, 30.0, 0.00125, 2e-5), {}};
        c.fields = crank_nicolson_evolve(kClimb, PotentialSpec::step(kClimbV), c.grid, {0.2, 0.4});
        return c;
    }();
    return o;
}

// ---- 2: transmitted packet slows down --------------------------------------

Outcome step_slowdown() {
    const GaussianPacket& g = kClimb;
    const double V = kClimbV, k0 = 1.5, t = 0.2;
    const double target = std::sqrt((k0 - 1.0) / k0) * g.p0();
    const StepClimbApprox climb(g, V);

    // transmitted window: approximate |ψ|² above 1e-8 of its peak
    double peak = 0.0, xa = INFINITY, xb = -INFINITY;
    const auto scan = arange(0.005, 30.0, 0.005);
    for (double x : scan) peak = std::max(peak, std::norm(climb(t, x)));
    for (double x : scan)
        if (std::norm(climb(t, x)) > 1e-8 * peak) xa = std::min(xa, x), xb = std::max(xb, x);
    xa = std::floor(xa / 0.04) * 0.04;
    xb = std::ceil(xb / 0.04) * 0.04;

    const auto f = momentum_rep(g);
    const auto xs = arange(xa, xb, 0.04);
    const double p_exact = observables(tabulate(t, xs, [&](double x) { return step_right_exact(f, V, t, x); }), 0.0).mean_p;
    const double p_climb = observables(tabulate(t, arange(xa, xb, 0.01), [&](double x) { return climb(t, x); }), 0.0).mean_p;
    const auto& o = climb_oracle();
    const double p_cn = observables(pick_nodes(o.fields[0], o.grid, arange(xa, xb, 0.01)), 0.0).mean_p;

    const double e1 = rel(p_exact, target), e2 = rel(p_climb, target), e3 = rel(p_cn, target);
    const double pair = std::max({rel(p_exact, p_climb), rel(p_exact, p_cn), rel(p_climb, p_cn)});
    const bool pass = e1 < 0.02 && e2 < 0.02 && e3 < 0.02 && pair < 0.02;
    return {pass, fmt("<p>/p0: exact %.5f, approx %.5f, oracle %.5f vs %.5f; worst pairwise %.1e (limit 2%%) in x=[%.2f,%.2f]",
                      p_exact / g.p0(), p_climb / g.p0(), p_cn / g.p0(), target / g.p0(), pair, xa, xb)};
}

// ---- 3: reflected mass -----------------------------------------------------

Outcome reflection_probability() {
    const GaussianPacket& g = kClimb;
    const double V = kClimbV, t = 0.4;
    const double expected = std::pow(2.0 - std::sqrt(3.0), 2);
    const auto w = tabulate(t, arange(-40.0, -0.01, 0.01), [&](double x) { return step_left_exact(g, V, t, x); });
    const double left = w.norm();
    const auto& o = climb_oracle();
    const double left_cn = detail::mass_between(o.fields[1], -INFINITY, 0.0);
    const bool pass = rel(left, expected) < 0.05 && std::abs(left - left_cn) < 1e-3;
    return {pass, fmt("left mass %.6f vs %.6f (rel %.1e, limit 5%%); oracle %.6f (diff %.1e, limit 1e-3)", left, expected,
                      rel(left, expected), left_cn, std::abs(left - left_cn))};
}

// ---- 4: forbidden region ---------------------------------------------------

Outcome forbidden_region() {
    const GaussianPacket g(1.0, -10.0, 10.0);
    const double V = 10.0 * 10.0 / (2.0 * 0.25);
    const auto f = momentum_rep(g);

    // least-squares slope of ln|ψ|² at the arrival time
    const double tR = 1.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double x : arange(0.05, 0.25, 0.025)) {
        const double y = std::log(std::norm(step_right_exact(f, V, tR, x)));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = -2.0 * std::sqrt(2.0 * V - g.p0() * g.p0());

    std::vector<double> xs{1e-9};
    for (double x : arange(0.01, 1.0, 0.01)) xs.push_back(x);
    const double right = tabulate(2.0, xs, [&](double x) { return step_right_exact(f, V, 2.0, x); }).norm();

    const double R_dev = std::abs(std::abs(reflection_R(g.p0(), V).value) - 1.0);
    const bool pass = rel(slope, expected) < 0.05 && right < 1e-2 && R_dev < 1e-12;
    return {pass, fmt("log-slope %.4f vs %.4f (rel %.1e, limit 5%%); right mass at 2t_R %.2e (limit 1e-2); ||R|-1|=%.1e",
                      slope, expected, rel(slope, expected), right, R_dev)};
}

// ---- 5: Laplace transforms of the kernels ----------------------------------

Outcome kernel_identities() {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double s = 0.5 * std::pow(40.0, i / 9.0);
        const complex rho = rho_of_s(s, 1.0);
        worst = std::max(worst, std::abs(laplace_transform([](double t) { return r_kernel(t, 1.0); }, s).value - rho));
        for (int k = 2; k <= 3; ++k)
            worst = std::max(worst, std::abs(laplace_transform([k](double t) { return M_kernel(k, t, 1.0); }, s).value -
                                             std::pow(rho, k)));
    }
    return {worst < 1e-6, fmt("worst |L{kernel} - rho^k| = %.2e over 10 s in [0.5,20] (limit 1e-6)", worst)};
}

// ---- 6: unitarity above the step -------------------------------------------

Outcome unitarity() {
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double k = 1.0 + 99.0 * i / 50.0;
        const double R = reflection_R(std::sqrt(2.0 * k), 1.0).value.real();
        const double lam = std::sqrt(1.0 - 1.0 / k);
        worst = std::max(worst, std::abs((R + 1.0) * (R + 1.0) * lam - (1.0 - R * R)));
    }
    return {worst < 1e-12, fmt("worst residual %.2e over 50 k in (1,100] (limit 1e-12)", worst)};
}

// ---- 7: leakage out of the box ---------------------------------------------

Outcome box_leakage() {
    // p0 = 50: the momentum spread moves <|R|^4> only 2.4% off |R(p0)|^4 (7% at p0 = 30)
    const double alpha = 1.0, d = 20.0 * std::sqrt(alpha), p0 = 50.0, V = p0 * p0 / (2.0 * 1.5);
    const GaussianPacket g(alpha, -d / 2.0, p0);
    const double R2 = std::norm(reflection_R(p0, V).value);
    const auto grid = FdGrid::with_spacing(-d, 50.0, 0.0025, 1e-4);
    std::vector<double> mids;
    for (int m = 1; m <= 2; ++m) mids.push_back(reflection_window(g.x0(), p0, g.position_spread(), d, m).mid);
    const auto cn = crank_nicolson_evolve(g, PotentialSpec::asymmetric_well(d, V), grid, mids);

    bool pass = true;
    std::string detail;
    for (int m = 1; m <= 2; ++m) {
        const double t = mids[static_cast<std::size_t>(m - 1)];
        const double expected = std::pow(R2, m);
        const double ex = box_survival(tabulate(t, arange(-d, 0.0, 0.01), [&](double x) { return asym_inside_exact(g, d, V, t, x); }), d);
        const double orc = box_survival(cn[static_cast<std::size_t>(m - 1)], d);
        pass = pass && rel(ex, expected) < 0.05 && rel(orc, expected) < 0.05;
        detail += fmt("%sm=%d t=%.3f: exact %.5f, oracle %.5f vs %.5f (rel %.1e, %.1e)", m > 1 ? "; " : "", m, t, ex, orc,
                      expected, rel(ex, expected), rel(orc, expected));
    }
    return {pass, detail + " (limit 5%)"};
}

// ---- 8: stitched exact fields against the oracle ---------------------------

Outcome exact_vs_oracle() {
    const GaussianPacket g(1.0, -10.0, 5.0);
    const double V = 5.0 * 5.0 / (2.0 * 1.5), d = 20.0;
    const auto f = momentum_rep(g);
    const std::vector<double> times{0.8, 1.6, 2.4, 3.2, 4.0};  // up to twice the arrival time
    const auto right = arange(0.1, 20.0, 0.1);

    double worst_step = 0.0, worst_box = 0.0;
    {
        // oracle error is second order: about 7.5e-4 at h = 2.5e-3, dt = 5e-4 and a quarter of that here
        const auto grid = FdGrid::with_spacing(-40.0, 30.0, 0.00125, 2.5e-4);
        const auto cn = crank_nicolson_evolve(g, PotentialSpec::step(V), grid, times);
        auto xs = arange(-40.0, -0.05, 0.05);
        xs.insert(xs.end(), right.begin(), right.end());
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            const auto ex = tabulate(t, xs, [&](double x) {
                return x < 0.0 ? step_left_exact(g, V, t, x) : step_right_exact(f, V, t, x);
            });
            worst_step = std::max(worst_step, l2_diff(ex, pick_nodes(cn[i], grid, xs)));
        }
    }
    {
        const auto grid = FdGrid::with_spacing(-d, 30.0, 0.00125, 2.5e-4);
        const auto cn = crank_nicolson_evolve(g, PotentialSpec::asymmetric_well(d, V), grid, times);
        auto xs = arange(-d, 0.0, 0.05);
        xs.insert(xs.end(), right.begin(), right.end());
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            const auto ex = tabulate(t, xs, [&](double x) {
                return x <= 0.0 ? asym_inside_exact(g, d, V, t, x) : asym_outside_exact(f, d, V, t, x);
            });
            worst_box = std::max(worst_box, l2_diff(ex, pick_nodes(cn[i], grid, xs)));
        }
    }
    const bool pass = worst_step < 1e-3 && worst_box < 1e-3;
    return {pass, fmt("worst L2 over t=0.8..4.0: step %.2e, box %.2e (limit 1e-3)", worst_step, worst_box)};
}

// ---- 9: oracle self-checks -------------------------------------------------

Outcome oracle_self_checks() {
    const PotentialSpec free_region = PotentialSpec::step(1.0);  // grids below stay left of the step

    const GaussianPacket g(1.0, -20.0, 3.0);
    const auto g1 = FdGrid::with_spacing(-40.0, -1.0, 0.01, 1e-3);
    const auto w0 = sample_on(g, g1);
    const double drift = std::abs(crank_nicolson_evolve(w0, free_region, g1, 1.0).norm() - w0.norm());

    const GaussianPacket m(1.0, -20.0, 1.0);
    const auto g2 = FdGrid::with_spacing(-35.0, -5.0, 5e-4, 2.5e-4);
    const auto w = crank_nicolson_evolve(m, free_region, g2, {1.0}).front();
    const double l2 = l2_diff(w, tabulate(1.0, w.xs(), [&](double x) { return free_gaussian_analytic(m, 1.0, x); }));

    const double d = 20.0;
    const GaussianPacket b(1.0, 10.0, 30.0);
    const InfiniteWellEigenSum es(b, d, 400);
    auto overlap = [&](double T) {
        auto q = integrate_adaptive([&](double x) { return std::conj(es(T, x)) * es(0.0, x); }, 0.0, d, {1e-12, 1e-15, 20000}, 128);
        return std::abs(q.value);
    };
    const double T = es.revival_time();  // 4md²/(πħ)
    const double T_literal = 4.0 * d * d;
    const double dev = std::abs(overlap(T) - 1.0);
    const bool pass = drift < 1e-10 && l2 < 1e-6 && dev < 1e-6;
    return {pass, fmt("norm drift/1000 steps %.1e (limit 1e-10); free Gaussian L2 %.2e (limit 1e-6); "
                      "|<psi(T)|psi(0)>|-1 = %.1e at T=4md^2/(pi hbar)=%.2f (limit 1e-6; at 4md^2/hbar=%.0f the overlap is %.3f)",
                      drift, l2, dev, T, T_literal, overlap(T_literal))};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"mirror vs eigen-sum", mirror_vs_eigen},
        {"transmitted momentum", step_slowdown},
        {"reflection probability", reflection_probability},
        {"forbidden region", forbidden_region},
        {"kernel Laplace identities", kernel_identities},
        {"unitarity identity", unitarity},
        {"box leakage", box_leakage},
        {"exact vs oracle", exact_vs_oracle},
        {"oracle self-checks", oracle_self_checks},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
