#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwp/errors.hpp"

namespace lwp {

using complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

/** @brief hbar and mass; kappa = sqrt(mass/hbar) is cached. Immutable. */
class UnitSystem {
public:
    UnitSystem() : UnitSystem(1.0, 1.0) {}
    UnitSystem(double hbar, double mass) : hbar_(hbar), mass_(mass) {
        if (!(hbar > 0.0) || !(mass > 0.0) || !std::isfinite(hbar) || !std::isfinite(mass))
            throw InvalidArgument("UnitSystem: hbar and mass must be positive and finite");
        kappa_ = (hbar == mass) ? 1.0 : std::sqrt(mass / hbar);
    }
    double hbar() const noexcept { return hbar_; }
    double mass() const noexcept { return mass_; }
    double kappa() const noexcept { return kappa_; }

private:
    double hbar_;
    double mass_;
    double kappa_;
};

/** @brief Hard walls at x=0 and x=d. */
struct InfiniteWell {
    double d;
};
/** @brief V(x)=0 for x<0, V for x>0. */
struct Step {
    double V;
};
/** @brief Hard wall at x=-d, zero inside [-d,0], height V for x>0. */
struct AsymmetricWell {
    double d;
    double V;
};

class PotentialSpec {
public:
    using Variant = std::variant<InfiniteWell, Step, AsymmetricWell>;

    static PotentialSpec infinite_well(double d) {
        check_positive(d, "well width d");
        return PotentialSpec(InfiniteWell{d});
    }
    static PotentialSpec step(double V) {
        check_positive(V, "step height V");
        return PotentialSpec(Step{V});
    }
    static PotentialSpec asymmetric_well(double d, double V) {
        check_positive(d, "well width d");
        check_positive(V, "step height V");
        return PotentialSpec(AsymmetricWell{d, V});
    }

    const Variant& variant() const noexcept { return v_; }
    bool is_infinite_well() const noexcept { return std::holds_alternative<InfiniteWell>(v_); }
    bool is_step() const noexcept { return std::holds_alternative<Step>(v_); }
    bool is_asymmetric_well() const noexcept { return std::holds_alternative<AsymmetricWell>(v_); }

    /// Width d; 0 for the step.
    double width() const noexcept {
        if (auto* w = std::get_if<InfiniteWell>(&v_)) return w->d;
        if (auto* a = std::get_if<AsymmetricWell>(&v_)) return a->d;
        return 0.0;
    }
    /// Height V; +inf for the infinite well.
    double height() const noexcept {
        if (auto* s = std::get_if<Step>(&v_)) return s->V;
        if (auto* a = std::get_if<AsymmetricWell>(&v_)) return a->V;
        return INFINITY;
    }
    std::string name() const {
        if (is_infinite_well()) return "infinite_well";
        if (is_step()) return "step";
        return "asymmetric_well";
    }

private:
    explicit PotentialSpec(Variant v) : v_(v) {}
    static void check_positive(double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string("PotentialSpec: ") + what + " must be positive and finite");
    }
    Variant v_;
};

/** @brief Complex field sampled on a strictly increasing grid at one time. */
class WaveField {
public:
    WaveField() = default;
    WaveField(double t, std::vector<double> xs, std::vector<complex> amps)
        : t_(t), xs_(std::move(xs)), amps_(std::move(amps)) {
        if (xs_.size() != amps_.size()) throw InvalidArgument("WaveField: xs and amps differ in length");
        if (xs_.size() < 2) throw InvalidArgument("WaveField: need at least two samples");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1])) throw InvalidArgument("WaveField: xs must be strictly increasing");
        double n = norm();
        if (!std::isfinite(n)) throw InvalidArgument("WaveField: norm is not finite");
    }

    double t() const noexcept { return t_; }
    const std::vector<double>& xs() const noexcept { return xs_; }
    const std::vector<complex>& amps() const noexcept { return amps_; }
    std::size_t size() const noexcept { return xs_.size(); }

    /// Trapezoid-rule norm.
    double norm() const {
        double s = 0.0;
        for (std::size_t i = 1; i < xs_.size(); ++i)
            s += 0.5 * (std::norm(amps_[i]) + std::norm(amps_[i - 1])) * (xs_[i] - xs_[i - 1]);
        return s;
    }

private:
    double t_ = 0.0;
    std::vector<double> xs_;
    std::vector<complex> amps_;
};

/**
 * @brief Truncation orders and tolerances for the series propagators.
 *
 * Unset k_max / L1..L4 mean "derive from the packet speed and time".
 * cond*_max are the thresholds used by the exit-approximation checks.
 */
struct SeriesPolicy {
    std::optional<int> k_max;
    std::optional<int> L1, L2, L3, L4;
    double tau_quad_tol = 1e-8;
    double x_quad_tol = 1e-9;
    double conv_extend_threshold = 50.0;
    double cond1_max = 0.1;
    double cond2_max = 0.1;
    double cond2_epsilon = 0.25;

    void validate() const {
        auto tol = [](double v, const char* n) {
            if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string("SeriesPolicy: ") + n + " must be in (0,1)");
        };
        tol(tau_quad_tol, "tau_quad_tol");
        tol(x_quad_tol, "x_quad_tol");
        auto ord = [](const std::optional<int>& v, const char* n) {
            if (v && *v < 0) throw InvalidArgument(std::string("SeriesPolicy: ") + n + " must be >= 0");
        };
        ord(k_max, "k_max");
        ord(L1, "L1");
        ord(L2, "L2");
        ord(L3, "L3");
        ord(L4, "L4");
        if (!(conv_extend_threshold > 0.0)) throw InvalidArgument("SeriesPolicy: conv_extend_threshold must be > 0");
        if (!(cond1_max > 0.0) || !(cond2_max > 0.0)) throw InvalidArgument("SeriesPolicy: condition limits must be > 0");
        if (!(cond2_epsilon > 0.0)) throw InvalidArgument("SeriesPolicy: cond2_epsilon must be > 0");
    }
};

/// |x0|·m/|p0|: arrival time of the packet centre at x=0.
inline double classical_reflection_time(double x0, double p0, const UnitSystem& u = {}) {
    if (p0 == 0.0) throw DegenerateInput("classical_reflection_time: p0 == 0");
    return std::abs(x0) * u.mass() / std::abs(p0);
}

}  // namespace lwp
