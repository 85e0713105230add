#include <gtest/gtest.h>

#include <cmath>

#include "lwp/diagnostics.hpp"
#include "lwp/oracle.hpp"

using namespace lwp;

namespace {

WaveField sample(const std::function<complex(double)>& f, double a, double b, double h, double t = 0.0) {
    std::vector<double> xs;
    std::vector<complex> v;
    for (int i = 0; a + i * h <= b + 1e-12; ++i) {
        xs.push_back(a + i * h);
        v.push_back(f(xs.back()));
    }
    return WaveField(t, xs, v);
}

}  // namespace

TEST(Observables, GaussianMoments) {
    const GaussianPacket g(2.0, 1.0, -3.0);
    const auto w = sample([&](double x) { return g.position(x); }, -15, 17, 0.01);
    const auto r = observables(w, 1.0);
    EXPECT_NEAR(r.norm, 1.0, 1e-12);
    EXPECT_NEAR(r.mean_x, 1.0, 1e-12);
    EXPECT_NEAR(r.mean_p, -3.0, 1e-10);
    EXPECT_NEAR(r.sd_x, 1.0, 1e-8);
    EXPECT_NEAR(r.sd_p, 0.5, 1e-4);
    EXPECT_NEAR(r.left_mass, 0.5, 1e-12);
    EXPECT_NEAR(r.left_mass + r.right_mass, r.norm, 1e-15);
}

TEST(Observables, SplitBetweenNodesInterpolates) {
    const WaveField w(0.0, {0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    EXPECT_NEAR(observables(w, 0.25).left_mass, 0.25, 1e-15);
    EXPECT_THROW(observables(WaveField(0.0, {0.0, 1.0}, {0.0, 0.0}), 0.5), InvalidArgument);
}

TEST(Window, SelectsSubrange) {
    const WaveField w(0.0, {0, 1, 2, 3, 4}, {1.0, 2.0, 3.0, 4.0, 5.0});
    const auto s = window(w, 1.0, 3.0);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.amps().front(), complex(2.0));
    EXPECT_THROW(window(w, 1.2, 1.8), InvalidArgument);
}

TEST(ReflectionBound, AboveStepNearStationaryValue) {
    // k0 = 1.5: |R(p0)|² = (2-√3)² ≈ 0.0718; packet averaging shifts it slightly
    const GaussianPacket g(1.0, -10.0, 100.0);
    const auto r = asymptotic_reflection_bound(momentum_rep(g), 10000.0 / 3.0);
    EXPECT_NEAR(r.bound, std::pow(2.0 - std::sqrt(3.0), 2), 2e-3);
    EXPECT_TRUE(r.saturated);
}

TEST(ReflectionBound, BelowStepIsTotal) {
    const GaussianPacket g(1.0, -10.0, 10.0);
    const auto r = asymptotic_reflection_bound(momentum_rep(g), 200.0);
    EXPECT_NEAR(r.bound, 1.0, 1e-9);
    EXPECT_TRUE(r.saturated);
    EXPECT_EQ(asymptotic_reflection_bound(momentum_rep(g), 0.0).bound, 0.0);
}

TEST(BoxSurvival, MassInsideBox) {
    const GaussianPacket g(1.0, -10.0, 10.0);
    const auto w = sample([&](double x) { return g.position(x); }, -20, 10, 0.01);
    EXPECT_NEAR(box_survival(w, 20.0), 1.0, 1e-12);
    EXPECT_NEAR(box_survival(w, 10.0), 0.5, 1e-12);
    EXPECT_THROW(box_survival(w, 0.0), InvalidArgument);
}

TEST(ReflectionWindow, BetweenSuccessiveStepHits) {
    const auto w = reflection_window(-10.0, 30.0, std::sqrt(0.5), 20.0, 1);
    const double t1 = 10.0 / 30.0, T = 40.0 / 30.0, dl = 4.0 * std::sqrt(0.5) / 30.0;
    EXPECT_NEAR(w.start, t1 + dl, 1e-15);
    EXPECT_NEAR(w.end, t1 + T - dl, 1e-15);
    EXPECT_NEAR(w.mid, t1 + T / 2.0, 1e-15);
    const auto w2 = reflection_window(-10.0, 30.0, std::sqrt(0.5), 20.0, 2);
    EXPECT_NEAR(w2.mid - w.mid, T, 1e-14);
    EXPECT_THROW(reflection_window(-10.0, -1.0, 0.7, 20.0, 1), InvalidArgument);
    EXPECT_THROW(reflection_window(-10.0, 30.0, 5.0, 20.0, 1), InvalidArgument);
}

TEST(FieldDifference, SelfIsZeroAndGridMustMatch) {
    const GaussianPacket g(1.0, 0.0, 1.0);
    const auto a = sample([&](double x) { return g.position(x); }, -8, 8, 0.01);
    EXPECT_EQ(field_difference(a, a).l2, 0.0);
    const auto b = sample([&](double x) { return 1.001 * g.position(x); }, -8, 8, 0.01);
    EXPECT_NEAR(field_difference(a, b).l2, 1e-3, 1e-9);
    EXPECT_THROW(field_difference(a, sample([&](double x) { return g.position(x); }, -8, 8, 0.02)), InvalidArgument);
}
