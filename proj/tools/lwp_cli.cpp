#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwp/scenario.hpp"

namespace fs = std::filesystem;
using namespace lwp;

namespace {

enum Exit { ok = 0, config = 2, accuracy = 3, precondition = 4 };

fs::path output_root(const std::string& flag, const std::string& fallback) {
    if (!flag.empty()) return flag;
    if (const char* e = std::getenv("LWP_OUTPUT_DIR"); e && *e) return fs::path(e) / fallback;
    return fs::path("runs") / fallback;
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    Config c = Config::load(path);
    for (const auto& o : overrides) c.set(o);
    return scenario_from_config(c);
}

int report_run(const RunResult& r, const fs::path& dir) {
    std::printf("wrote %zu snapshots to %s\n", r.snapshots.size(), dir.string().c_str());
    for (const auto& ob : r.observables)
        std::printf("  t=%-10.6g norm=%.9f <x>=%.6g <p>=%.6g left=%.6g right=%.6g\n", ob.t, ob.norm, ob.mean_x, ob.mean_p,
                    ob.left_mass, ob.right_mass);
    if (r.failures) {
        std::fprintf(stderr, "accuracy: %d points missed their tolerance (flagged in manifest.json)\n", r.failures);
        return accuracy;
    }
    return ok;
}

// ---- check verb -----------------------------------------------------------

struct Check {
    std::string name;
    std::function<double()> measure;  // returns the error measure
    double limit;
};

std::vector<Check> checks() {
    std::vector<Check> c;
    c.push_back({"laplace transforms of kernel powers", [] {
                     double worst = 0.0;
                     for (int k = 1; k <= 3; ++k)
                         for (double s : {0.5, 2.0, 7.0, 20.0}) {
                             auto q = laplace_transform([k](double t) { return M_kernel(k, t, 1.0); }, s);
                             worst = std::max(worst, std::abs(q.value - std::pow(rho_of_s(s, 1.0), k)));
                         }
                     return worst;
                 },
                 1e-6});
    c.push_back({"unitarity of stationary scattering", [] {
                     double worst = 0.0;
                     for (double k = 1.01; k <= 100.0; k *= 1.7) {
                         const double R = reflection_R(std::sqrt(2.0 * k), 1.0).value.real();
                         const double lam = std::sqrt(1.0 - 1.0 / k);
                         worst = std::max(worst, std::abs((R + 1) * (R + 1) * lam - (1 - R * R)));
                     }
                     return worst;
                 },
                 1e-12});
    c.push_back({"crank-nicolson vs free gaussian", [] {
                     // grid entirely left of the step, so the potential vanishes on it
                     const GaussianPacket g(1.0, -12.5, 0.0);
                     const auto grid = FdGrid::with_spacing(-24.5, -0.5, 1e-3, 1e-3);
                     const auto w = crank_nicolson_evolve(g, PotentialSpec::step(1.0), grid, {1.0}).front();
                     std::vector<complex> d(w.size());
                     for (std::size_t i = 0; i < w.size(); ++i)
                         d[i] = w.amps()[i] - free_gaussian_analytic(g, 1.0, w.xs()[i]);
                     return std::sqrt(WaveField(1.0, w.xs(), d).norm());
                 },
                 1e-5});
    c.push_back({"eigen-sum revival", [] {
                     const double d = 10.0;
                     const GaussianPacket g(1.0, 5.0, 10.0);
                     const InfiniteWellEigenSum es(g, d, 200);
                     const double T = es.revival_time();
                     auto ov = integrate_adaptive(
                         [&](double x) { return std::conj(es(T, x)) * es(0.0, x); }, 0.0, d, {1e-12, 1e-15, 20000}, 64);
                     return std::abs(std::abs(ov.value) - 1.0);
                 },
                 1e-6});
    c.push_back({"mirror images vs eigen-sum", [] {
                     const double d = 20.0;
                     const GaussianPacket g(1.0, 10.0, 30.0);
                     const InfiniteWellEigenSum es(g, d, 400);
                     double worst = 0.0;
                     for (double x = 0.0; x <= d; x += 0.37) worst = std::max(worst, std::abs(mirror_well(g, d, 0.9, x) - es(0.9, x)));
                     return worst;
                 },
                 1e-6});
    return c;
}

int run_checks() {
    int failed = 0;
    for (const auto& c : checks()) {
        double e = NAN;
        std::string note;
        try {
            e = c.measure();
        } catch (const std::exception& ex) {
            note = ex.what();
        }
        const bool pass = e < c.limit;
        failed += !pass;
        std::printf("%s  %-40s err=%.3e limit=%.0e %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), e, c.limit, note.c_str());
    }
    return failed ? accuracy : ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave packets at steps, walls and boxes: scenario runner"};
    app.require_subcommand(1);
    std::vector<std::string> overrides;
    std::string out;

    auto* run_cmd = app.add_subcommand("run", "evolve one scenario and write snapshots");
    std::string cfg;
    run_cmd->add_option("config", cfg, "key=value scenario file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("-s,--set", overrides, "override key=value (repeatable)");
    run_cmd->add_option("-o,--out", out, "output directory");

    auto* cmp_cmd = app.add_subcommand("compare", "difference table between two methods");
    std::string ma, mb;
    cmp_cmd->add_option("config", cfg, "key=value scenario file")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--a", ma, "first method")->required();
    cmp_cmd->add_option("--b", mb, "second method")->required();
    cmp_cmd->add_option("-s,--set", overrides, "override key=value (repeatable)");
    cmp_cmd->add_option("-o,--out", out, "output directory");

    auto* fig_cmd = app.add_subcommand("figure", "data for a figure bundle (exact and approximate step solutions)");
    std::string fig;
    fig_cmd->add_option("which", fig, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
    fig_cmd->add_option("-s,--set", overrides, "override key=value (repeatable)");
    fig_cmd->add_option("-o,--out", out, "output directory");

    app.add_subcommand("check", "kernel identities and oracle cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config;
    }

    try {
        if (*run_cmd) {
            const auto s = load_scenario(cfg, overrides);
            const auto dir = output_root(out, s.name);
            return report_run(run(s, dir), dir);
        }
        if (*cmp_cmd) {
            const auto s = load_scenario(cfg, overrides);
            const auto a = parse_method(ma), b = parse_method(mb);
            for (Method m : {a, b})
                if (!Scenario::compatible(m, s.potential))
                    throw ConfigError("method " + to_string(m) + " does not apply to potential " + s.potential.name());
            const auto dir = output_root(out, s.name + "_" + ma + "_vs_" + mb);
            const auto rows = compare(s, a, b, dir);
            std::printf("%-12s %-12s %-12s %-12s %-12s\n", "t", "l2", "linf", "d_norm", "d_left");
            for (const auto& r : rows)
                std::printf("%-12.6g %-12.4e %-12.4e %-12.4e %-12.4e\n", r.t, r.l2, r.linf, r.d_norm, r.d_left_mass);
            return ok;
        }
        if (*fig_cmd) {
            int rc = ok;
            const auto root = output_root(out, fig);
            for (const char* m : {"step_exact", "step_approx"}) {
                Config c = figure_config(fig);
                c.set("method", m);
                for (const auto& o : overrides) c.set(o);
                rc = std::max(rc, report_run(run(scenario_from_config(c), root / m), root / m));
            }
            return rc;
        }
        return run_checks();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return config;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return config;
    } catch (const PreconditionViolation& e) {
        std::fprintf(stderr, "precondition violated: %s\n", e.what());
        return precondition;
    } catch (const AccuracyFailure& e) {
        std::fprintf(stderr, "accuracy failure: %s\n", e.what());
        return accuracy;
    } catch (const DomainOverrun& e) {
        std::fprintf(stderr, "domain overrun: %s\n", e.what());
        return accuracy;
    }
}
