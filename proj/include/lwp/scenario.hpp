#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lwp/diagnostics.hpp"
#include "lwp/oracle.hpp"
#include "lwp/propagators.hpp"

namespace lwp {

enum class Method { mirror, step_exact, step_approx, asym_exact, asym_approx, oracle_cn, oracle_eigen };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::mirror: return "mirror";
        case Method::step_exact: return "step_exact";
        case Method::step_approx: return "step_approx";
        case Method::asym_exact: return "asym_exact";
        case Method::asym_approx: return "asym_approx";
        case Method::oracle_cn: return "oracle_cn";
        case Method::oracle_eigen: return "oracle_eigen";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::mirror, Method::step_exact, Method::step_approx, Method::asym_exact, Method::asym_approx,
                     Method::oracle_cn, Method::oracle_eigen})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown method '" + s + "'");
}

/** @brief Flat key=value configuration; '#' starts a comment. Later assignments win. */
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "<config>") {
        Config c;
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            const auto s = trim(line);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(no) + ": expected key=value");
            const auto k = trim(s.substr(0, eq)), v = trim(s.substr(eq + 1));
            if (k.empty()) throw ConfigError(origin + ":" + std::to_string(no) + ": empty key");
            c.kv_[k] = v;
        }
        return c;
    }
    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file '" + path + "'");
        return parse(f, path);
    }
    /// Override from "key=value".
    void set(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
        kv_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
    }
    void set(const std::string& k, const std::string& v) { kv_[k] = v; }

    bool has(const std::string& k) const { return kv_.count(k) != 0; }
    std::string str(const std::string& k, const std::string& def = "") const {
        used_[k] = true;
        auto it = kv_.find(k);
        return it == kv_.end() ? def : it->second;
    }
    double num(const std::string& k, std::optional<double> def = std::nullopt) const {
        used_[k] = true;
        auto it = kv_.find(k);
        if (it == kv_.end()) {
            if (!def) throw ConfigError("missing key '" + k + "'");
            return *def;
        }
        return to_double(k, it->second);
    }
    std::optional<double> opt(const std::string& k) const {
        used_[k] = true;
        auto it = kv_.find(k);
        if (it == kv_.end()) return std::nullopt;
        return to_double(k, it->second);
    }
    std::vector<double> list(const std::string& k) const {
        used_[k] = true;
        std::vector<double> out;
        auto it = kv_.find(k);
        if (it == kv_.end()) throw ConfigError("missing key '" + k + "'");
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto t = trim(item);
            if (!t.empty()) out.push_back(to_double(k, t));
        }
        if (out.empty()) throw ConfigError("key '" + k + "' is empty");
        return out;
    }
    /// Keys never read by the scenario builder.
    std::vector<std::string> unused() const {
        std::vector<std::string> u;
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) u.push_back(k);
        return u;
    }
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double to_double(const std::string& k, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("key '" + k + "': '" + v + "' is not a number");
        }
    }
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> used_;
};

using AnyPacket = std::variant<GaussianPacket, SampledPacket>;

/** @brief Output grid in user coordinates: uniform, or two uniform pieces meeting at x_break. */
struct OutputGrid {
    double x_min = -10.0, x_max = 10.0;
    int n_points = 201;
    std::optional<double> x_break;
    int n_points_right = 0;

    std::vector<double> nodes() const {
        std::vector<double> xs;
        auto fill = [&](double a, double b, int n, bool skip_first) {
            for (int i = skip_first ? 1 : 0; i < n; ++i) xs.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
        };
        if (!x_break) {
            fill(x_min, x_max, n_points, false);
        } else {
            fill(x_min, *x_break, n_points, false);
            fill(*x_break, x_max, n_points_right, true);
        }
        return xs;
    }
    bool uniform() const { return !x_break; }
    void validate() const {
        if (!(x_max > x_min)) throw ConfigError("grid: x_max must exceed x_min");
        if (n_points < 2) throw ConfigError("grid: n_points must be >= 2");
        if (x_break && (!(*x_break > x_min && *x_break < x_max) || n_points_right < 2))
            throw ConfigError("grid: x_break must lie inside (x_min,x_max) with n_points_right >= 2");
    }
};

/** @brief Everything needed to reproduce one run. */
struct Scenario {
    std::string name = "scenario";
    PotentialSpec potential = PotentialSpec::step(1.0);
    UnitSystem units{};
    std::optional<GaussianPacket> gaussian;  // in internal coordinates
    std::string packet_file;
    std::optional<SampledPacket> sampled;  // in internal coordinates
    Method method = Method::step_exact;
    std::vector<double> times{0.0};
    OutputGrid grid{};
    double split_at = 0.0;  // user coordinates
    double coordinate_shift = 0.0;  // internal = user + shift
    SeriesPolicy policy{};
    QuadratureSpec quad{};
    double cn_dx = 0.0, cn_dt = 0.0;  // 0: derived from the packet
    int n_max = 400;

    AnyPacket packet() const {
        if (gaussian) return *gaussian;
        return *sampled;
    }
    double mean_momentum() const { return gaussian ? gaussian->p0() : sampled->mean_momentum(); }

    static bool compatible(Method m, const PotentialSpec& p) {
        switch (m) {
            case Method::mirror:
            case Method::oracle_eigen: return p.is_infinite_well();
            case Method::step_exact:
            case Method::step_approx: return p.is_step();
            case Method::asym_exact:
            case Method::asym_approx: return p.is_asymmetric_well();
            case Method::oracle_cn: return true;
        }
        return false;
    }

    void validate() const {
        grid.validate();
        if (!compatible(method, potential))
            throw ConfigError("method " + to_string(method) + " does not apply to potential " + potential.name());
        for (std::size_t i = 0; i < times.size(); ++i)
            if (!(times[i] >= 0.0) || (i > 0 && !(times[i] >= times[i - 1])))
                throw ConfigError("times must be non-negative and ascending");
        if (method == Method::oracle_cn && !grid.uniform()) throw ConfigError("oracle_cn needs a uniform output grid");
        if (method == Method::asym_approx && grid.x_max + coordinate_shift > 0.0)
            throw ConfigError("asym_approx covers only the box interior; keep the grid inside [-d, 0]");
        policy.validate();
        quad.validate();
    }
};

/// Reads x,re,im rows (a non-numeric first line is taken as a header).
inline WaveField read_field_csv(const std::string& path, double shift = 0.0) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open packet file '" + path + "'");
    std::vector<double> xs;
    std::vector<complex> a;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        double x, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("packet file '" + path + "': bad row '" + line + "'");
        }
        first = false;
        xs.push_back(x + shift);
        a.emplace_back(re, im);
    }
    return WaveField(0.0, std::move(xs), std::move(a));
}

inline Scenario scenario_from_config(const Config& c) {
    Scenario s;
    s.name = c.str("name", "scenario");
    s.units = UnitSystem(c.num("hbar", 1.0), c.num("mass", 1.0));
    s.coordinate_shift = c.num("coordinate_shift", 0.0);
    s.method = parse_method(c.str("method", "step_exact"));

    // packet first: V may be given through k0 = p0²/(2mV)
    s.packet_file = c.str("packet_file", "");
    if (!s.packet_file.empty()) {
        s.sampled.emplace(read_field_csv(s.packet_file, s.coordinate_shift), s.units);
    } else {
        s.gaussian.emplace(c.num("alpha", 1.0), c.num("x0") + s.coordinate_shift, c.num("p0"), s.units);
    }
    const std::string pot = c.str("potential", "step");
    auto height = [&]() {
        if (auto V = c.opt("V")) return *V;
        if (auto k0 = c.opt("k0")) {
            const double p0 = s.mean_momentum();
            if (!(*k0 > 0.0) || p0 == 0.0) throw ConfigError("k0 needs k0 > 0 and p0 != 0");
            return p0 * p0 / (2.0 * s.units.mass() * *k0);
        }
        throw ConfigError("potential needs V or k0");
    };
    if (pot == "infinite_well") s.potential = PotentialSpec::infinite_well(c.num("d"));
    else if (pot == "step") s.potential = PotentialSpec::step(height());
    else if (pot == "asymmetric_well") s.potential = PotentialSpec::asymmetric_well(c.num("d"), height());
    else throw ConfigError("unknown potential '" + pot + "'");

    s.times = c.list("times");
    s.grid.x_min = c.num("x_min");
    s.grid.x_max = c.num("x_max");
    s.grid.n_points = static_cast<int>(c.num("n_points"));
    if (auto b = c.opt("x_break")) {
        s.grid.x_break = *b;
        s.grid.n_points_right = static_cast<int>(c.num("n_points_right"));
    }
    s.split_at = c.num("split_at", -s.coordinate_shift);

    auto oint = [&](const char* k) -> std::optional<int> {
        if (auto v = c.opt(k)) return static_cast<int>(*v);
        return std::nullopt;
    };
    s.policy.k_max = oint("k_max");
    s.policy.L1 = oint("L1");
    s.policy.L2 = oint("L2");
    s.policy.L3 = oint("L3");
    s.policy.L4 = oint("L4");
    s.policy.tau_quad_tol = c.num("tau_quad_tol", s.policy.tau_quad_tol);
    s.policy.x_quad_tol = c.num("x_quad_tol", s.policy.x_quad_tol);
    s.policy.conv_extend_threshold = c.num("conv_extend_threshold", s.policy.conv_extend_threshold);
    s.policy.cond1_max = c.num("cond1_max", s.policy.cond1_max);
    s.policy.cond2_max = c.num("cond2_max", s.policy.cond2_max);
    s.policy.cond2_epsilon = c.num("cond2_epsilon", s.policy.cond2_epsilon);
    s.quad.rel_tol = c.num("rel_tol", s.quad.rel_tol);
    s.quad.abs_tol = c.num("abs_tol", s.quad.abs_tol);
    s.quad.max_subdiv = static_cast<int>(c.num("max_subdiv", s.quad.max_subdiv));
    s.cn_dx = c.num("cn_dx", 0.0);
    s.cn_dt = c.num("cn_dt", 0.0);
    s.n_max = static_cast<int>(c.num("n_max", 400));
    if (auto u = c.unused(); !u.empty()) throw ConfigError("unknown key '" + u.front() + "'");
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/** @brief One time slice with its accumulated error report and failed points. */
struct Snapshot {
    WaveField field;
    EvalReport report;
    int failures = 0;
    std::string first_failure;
};

namespace detail {

// Pointwise evaluator; AccuracyFailure at a point keeps the best estimate and is counted.
template <class F>
Snapshot sample_points(const Scenario& s, double t, F&& eval) {
    const auto xs = s.grid.nodes();
    std::vector<complex> a(xs.size());
    Snapshot out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double xi = xs[i] + s.coordinate_shift;
        try {
            a[i] = eval(t, xi, out.report);
        } catch (const AccuracyFailure& e) {
            a[i] = e.best_estimate();
            out.report.converged = false;
            out.report.error = std::max(out.report.error, e.error_estimate());
            if (out.failures++ == 0) out.first_failure = e.what();
        }
    }
    out.field = WaveField(t, xs, std::move(a));
    return out;
}

inline std::vector<Snapshot> run_cn(const Scenario& s) {
    const auto xs = s.grid.nodes();
    const double out_dx = (s.grid.x_max - s.grid.x_min) / (s.grid.n_points - 1);
    const double p0 = s.mean_momentum();
    const double dp = s.gaussian ? s.gaussian->momentum_spread() : s.sampled->momentum_spread();
    const double h = s.units.hbar(), m = s.units.mass();
    double dx = s.cn_dx > 0.0 ? s.cn_dx : (pi / 8.0) * h / (std::abs(p0) + 6.0 * dp);
    const int refine = std::max(1, static_cast<int>(std::ceil(out_dx / dx - 1e-9)));
    double dt = s.cn_dt;
    if (!(dt > 0.0)) {
        // a quarter of the fastest relevant phase period
        const double V = std::isfinite(s.potential.height()) ? s.potential.height() : 0.0;
        const double E = std::pow(std::abs(p0) + 6.0 * dp, 2) / (2.0 * m) + V;
        dt = 0.25 * h / std::max(E, 1e-12);
    }
    FdGrid g{s.grid.x_min + s.coordinate_shift, s.grid.x_max + s.coordinate_shift, (s.grid.n_points - 1) * refine + 1, dt};
    std::vector<double> gx(static_cast<std::size_t>(g.n_points));
    std::vector<complex> ga(gx.size());
    const AnyPacket pk = s.packet();
    for (int i = 0; i < g.n_points; ++i) {
        gx[static_cast<std::size_t>(i)] = g.x(i);
        ga[static_cast<std::size_t>(i)] = std::visit([&](const auto& p) { return p.position(g.x(i)); }, pk);
    }
    // the step/asymmetric well on the grid lives in internal coordinates
    auto fields = crank_nicolson_evolve(WaveField(0.0, gx, ga), s.potential, g, s.times, s.units);
    std::vector<Snapshot> out;
    for (auto& f : fields) {
        std::vector<complex> a(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) a[i] = f.amps()[i * static_cast<std::size_t>(refine)];
        Snapshot sn;
        sn.field = WaveField(f.t(), xs, std::move(a));
        out.push_back(std::move(sn));
    }
    return out;
}

}  // namespace detail

/// Field snapshots of the scenario's method at all requested times.
inline std::vector<Snapshot> evaluate(const Scenario& s) {
    s.validate();
    if (s.method == Method::oracle_cn) return detail::run_cn(s);
    const AnyPacket pk = s.packet();
    const auto& pot = s.potential;
    std::vector<Snapshot> out;

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            switch (s.method) {
                case Method::mirror: {
                    const double d = pot.width();
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport& r) -> complex {
                            if (x < 0.0 || x > d) return 0.0;
                            return mirror_well(p, d, tt, x, s.policy, &r);
                        }));
                    break;
                }
                case Method::oracle_eigen: {
                    const InfiniteWellEigenSum es(p, pot.width(), s.n_max);
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport&) -> complex {
                            if (x < 0.0 || x > pot.width()) return 0.0;
                            return es(tt, x);
                        }));
                    break;
                }
                case Method::step_exact: {
                    const MomentumAmplitude f = momentum_rep(p);
                    const double V = pot.height();
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport& r) -> complex {
                            if (tt == 0.0) return p.position(x);
                            if (x > 0.0) return step_right_exact(f, V, tt, x, s.quad, s.policy, &r);
                            return step_left_exact(p, V, tt, std::min(x, std::nextafter(0.0, -1.0)), s.quad, s.policy, &r);
                        }));
                    break;
                }
                case Method::step_approx: {
                    const double V = pot.height();
                    const double k0 = p.mean_momentum() * p.mean_momentum() / (2.0 * s.units.mass() * V);
                    std::function<complex(double, double)> ev;
                    if (k0 > 1.0) {
                        auto a = std::make_shared<StepClimbApprox>(p, V);
                        ev = [a](double t, double x) { return (*a)(t, x); };
                    } else {
                        auto a = std::make_shared<StepForbiddenApprox>(p, V);
                        ev = [a](double t, double x) { return (*a)(t, x); };
                    }
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport&) -> complex {
                            if (tt == 0.0) return p.position(x);
                            return ev(tt, x);
                        }));
                    break;
                }
                case Method::asym_exact: {
                    const MomentumAmplitude f = momentum_rep(p);
                    const double d = pot.width(), V = pot.height();
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport& r) -> complex {
                            if (x < -d) return 0.0;
                            if (tt == 0.0) return p.position(x);
                            if (x > 0.0) return asym_outside_exact(f, d, V, tt, x, s.quad, s.policy, &r);
                            return asym_inside_exact(p, d, V, tt, x, s.quad, s.policy, &r);
                        }));
                    break;
                }
                case Method::asym_approx: {
                    const double d = pot.width(), V = pot.height();
                    for (double t : s.times)
                        out.push_back(detail::sample_points(s, t, [&](double tt, double x, EvalReport&) -> complex {
                            if (x < -d) return 0.0;
                            if (tt == 0.0) return p.position(x);
                            return asym_inside_approx(p, d, V, tt, x, s.policy);
                        }));
                    break;
                }
                case Method::oracle_cn: break;
            }
            (void)sizeof(P);
        },
        pk);
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

inline void write_field_csv(const WaveField& w, const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << "x,re,im,abs2\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        const complex a = w.amps()[i];
        f << fmt17(w.xs()[i]) << ',' << fmt17(a.real()) << ',' << fmt17(a.imag()) << ',' << fmt17(std::norm(a)) << '\n';
    }
}

inline nlohmann::json scenario_json(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["method"] = to_string(s.method);
    j["potential"] = {{"type", s.potential.name()}};
    if (!s.potential.is_step()) j["potential"]["d"] = s.potential.width();
    if (!s.potential.is_infinite_well()) j["potential"]["V"] = s.potential.height();
    j["units"] = {{"hbar", s.units.hbar()}, {"mass", s.units.mass()}};
    if (s.gaussian)
        j["packet"] = {{"type", "gaussian"}, {"alpha", s.gaussian->alpha()}, {"x0", s.gaussian->x0() - s.coordinate_shift},
                       {"p0", s.gaussian->p0()}};
    else
        j["packet"] = {{"type", "sampled"}, {"file", s.packet_file}};
    j["coordinate_shift"] = s.coordinate_shift;
    j["times"] = s.times;
    j["grid"] = {{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"n_points", s.grid.n_points}};
    if (s.grid.x_break) {
        j["grid"]["x_break"] = *s.grid.x_break;
        j["grid"]["n_points_right"] = s.grid.n_points_right;
    }
    j["split_at"] = s.split_at;
    auto oi = [](const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    j["policy"] = {{"k_max", oi(s.policy.k_max)},
                   {"L1", oi(s.policy.L1)},
                   {"L2", oi(s.policy.L2)},
                   {"L3", oi(s.policy.L3)},
                   {"L4", oi(s.policy.L4)},
                   {"tau_quad_tol", s.policy.tau_quad_tol},
                   {"x_quad_tol", s.policy.x_quad_tol},
                   {"conv_extend_threshold", s.policy.conv_extend_threshold},
                   {"cond1_max", s.policy.cond1_max},
                   {"cond2_max", s.policy.cond2_max},
                   {"cond2_epsilon", s.policy.cond2_epsilon}};
    j["quadrature"] = {{"rel_tol", s.quad.rel_tol}, {"abs_tol", s.quad.abs_tol}, {"max_subdiv", s.quad.max_subdiv}};
    j["cn"] = {{"dx", s.cn_dx}, {"dt", s.cn_dt}};
    j["n_max"] = s.n_max;
    return j;
}

/** @brief Result of a run: snapshots plus the number of points that missed their tolerance. */
struct RunResult {
    std::vector<Snapshot> snapshots;
    std::vector<ObservableReport> observables;
    int failures = 0;
};

inline RunResult run(const Scenario& s, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    RunResult res;
    res.snapshots = evaluate(s);
    nlohmann::json man = scenario_json(s);
    man["snapshots"] = nlohmann::json::array();
    std::ofstream diag(dir / "diagnostics.csv");
    diag << "t,norm,mean_x,mean_p,sd_x,sd_p,left_mass,right_mass\n";
    std::ofstream gp(dir / "plot.gp");
    gp << "set datafile separator ','\nset key outside\nset xlabel 'x'\nset ylabel '|psi|^2'\nplot ";
    for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
        const auto& sn = res.snapshots[i];
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
        write_field_csv(sn.field, dir / name);
        const auto ob = observables(sn.field, s.split_at, s.units);
        res.observables.push_back(ob);
        diag << fmt17(ob.t) << ',' << fmt17(ob.norm) << ',' << fmt17(ob.mean_x) << ',' << fmt17(ob.mean_p) << ','
             << fmt17(ob.sd_x) << ',' << fmt17(ob.sd_p) << ',' << fmt17(ob.left_mass) << ',' << fmt17(ob.right_mass)
             << '\n';
        gp << (i ? ", \\\n     " : "") << "'" << name << "' using 1:4 with lines title 't=" << fmt17(sn.field.t()) << "'";
        res.failures += sn.failures;
        nlohmann::json e = {{"t", sn.field.t()},
                            {"file", name},
                            {"error_estimate", sn.report.error},
                            {"tail_bound", sn.report.tail_bound},
                            {"evaluations", sn.report.evaluations},
                            {"max_order", sn.report.max_order},
                            {"failed_points", sn.failures}};
        if (sn.failures) e["first_failure"] = sn.first_failure;
        man["snapshots"].push_back(e);
    }
    gp << '\n';
    man["status"] = res.failures ? "accuracy_failure" : "ok";
    std::ofstream(dir / "manifest.json") << man.dump(2) << '\n';
    return res;
}

/** @brief Per-time differences between two methods on one scenario. */
struct CompareRow {
    double t, l2, linf, d_norm, d_mean_x, d_mean_p, d_left_mass;
};

inline std::vector<CompareRow> compare(const Scenario& base, Method a, Method b, const std::filesystem::path& dir) {
    Scenario sa = base, sb = base;
    sa.method = a;
    sb.method = b;
    const auto ra = evaluate(sa), rb = evaluate(sb);
    std::vector<CompareRow> rows;
    int failures = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const auto d = field_difference(ra[i].field, rb[i].field);
        const auto oa = observables(ra[i].field, base.split_at, base.units), ob = observables(rb[i].field, base.split_at, base.units);
        rows.push_back({ra[i].field.t(), d.l2, d.linf, oa.norm - ob.norm, oa.mean_x - ob.mean_x, oa.mean_p - ob.mean_p,
                        oa.left_mass - ob.left_mass});
        failures += ra[i].failures + rb[i].failures;
    }
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "compare.csv");
    f << "t,l2,linf,d_norm,d_mean_x,d_mean_p,d_left_mass\n";
    for (const auto& r : rows)
        f << fmt17(r.t) << ',' << fmt17(r.l2) << ',' << fmt17(r.linf) << ',' << fmt17(r.d_norm) << ',' << fmt17(r.d_mean_x)
          << ',' << fmt17(r.d_mean_p) << ',' << fmt17(r.d_left_mass) << '\n';
    nlohmann::json man = scenario_json(base);
    man["compare"] = {{"a", to_string(a)}, {"b", to_string(b)}, {"failed_points", failures}};
    man["status"] = failures ? "accuracy_failure" : "ok";
    std::ofstream(dir / "manifest.json") << man.dump(2) << '\n';
    if (failures) throw AccuracyFailure("compare: " + std::to_string(failures) + " points missed their tolerance", 0.0, 0.0);
    return rows;
}

/// Built-in figure scenarios: "fig1" (k0 = 1.5) and "fig2" (k0 = 1/4).
inline Config figure_config(const std::string& which) {
    Config c;
    c.set("potential", "step");
    c.set("alpha", "1");
    c.set("x0", "-10");
    if (which == "fig1") {
        c.set("name", "fig1");
        c.set("p0", "100");
        c.set("k0", "1.5");
        c.set("times", "0,0.1,0.2");
        c.set("x_min", "-30");
        c.set("x_break", "0");
        c.set("n_points", "6001");
        c.set("x_max", "20");
        c.set("n_points_right", "401");
    } else if (which == "fig2") {
        c.set("name", "fig2");
        c.set("p0", "10");
        c.set("k0", "0.25");
        c.set("times", "0,1,2");
        c.set("x_min", "-30");
        c.set("x_break", "0");
        c.set("n_points", "3001");
        c.set("x_max", "5");
        c.set("n_points_right", "201");
    } else {
        throw ConfigError("unknown figure '" + which + "' (fig1 or fig2)");
    }
    return c;
}

}  // namespace lwp
