#include <gtest/gtest.h>

#include "lwp/units.hpp"

using namespace lwp;

TEST(UnitSystem, DefaultsToNaturalUnits) {
    const UnitSystem u;
    EXPECT_EQ(u.hbar(), 1.0);
    EXPECT_EQ(u.mass(), 1.0);
    EXPECT_EQ(u.kappa(), 1.0);
}

TEST(UnitSystem, KappaIsRootOfMassOverHbar) {
    const UnitSystem u(0.5, 2.0);
    EXPECT_DOUBLE_EQ(u.kappa(), 2.0);
}

TEST(UnitSystem, RejectsNonPositive) {
    EXPECT_THROW(UnitSystem(0.0, 1.0), InvalidArgument);
    EXPECT_THROW(UnitSystem(1.0, -1.0), InvalidArgument);
    EXPECT_THROW(UnitSystem(INFINITY, 1.0), InvalidArgument);
}

TEST(PotentialSpec, VariantsReportGeometry) {
    const auto w = PotentialSpec::infinite_well(3.0);
    EXPECT_TRUE(w.is_infinite_well());
    EXPECT_EQ(w.width(), 3.0);
    EXPECT_TRUE(std::isinf(w.height()));

    const auto s = PotentialSpec::step(7.0);
    EXPECT_TRUE(s.is_step());
    EXPECT_EQ(s.height(), 7.0);
    EXPECT_EQ(s.width(), 0.0);

    const auto a = PotentialSpec::asymmetric_well(2.0, 5.0);
    EXPECT_TRUE(a.is_asymmetric_well());
    EXPECT_EQ(a.width(), 2.0);
    EXPECT_EQ(a.height(), 5.0);
    EXPECT_EQ(a.name(), "asymmetric_well");
}

TEST(PotentialSpec, RejectsDegenerateParameters) {
    EXPECT_THROW(PotentialSpec::infinite_well(0.0), InvalidArgument);
    EXPECT_THROW(PotentialSpec::step(-1.0), InvalidArgument);
    EXPECT_THROW(PotentialSpec::asymmetric_well(1.0, INFINITY), InvalidArgument);
}

TEST(WaveField, TrapezoidNorm) {
    const WaveField w(0.0, {0.0, 1.0, 3.0}, {complex(1, 0), complex(0, 1), complex(1, 1)});
    // 0.5*(1+1)*1 + 0.5*(1+2)*2
    EXPECT_DOUBLE_EQ(w.norm(), 4.0);
}

TEST(WaveField, RejectsBadGrids) {
    EXPECT_THROW(WaveField(0.0, {0.0, 0.0}, {1.0, 1.0}), InvalidArgument);
    EXPECT_THROW(WaveField(0.0, {0.0, 1.0}, {1.0}), InvalidArgument);
    EXPECT_THROW(WaveField(0.0, {0.0}, {1.0}), InvalidArgument);
    EXPECT_THROW(WaveField(0.0, {0.0, 1.0}, {complex(NAN, 0), 1.0}), InvalidArgument);
}

TEST(SeriesPolicy, Validation) {
    SeriesPolicy p;
    EXPECT_NO_THROW(p.validate());
    p.tau_quad_tol = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = {};
    p.k_max = -1;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(ClassicalTime, ArrivalAtOrigin) {
    EXPECT_DOUBLE_EQ(classical_reflection_time(-10.0, 100.0), 0.1);
    EXPECT_DOUBLE_EQ(classical_reflection_time(-10.0, 10.0, UnitSystem(1.0, 2.0)), 2.0);
    EXPECT_THROW(classical_reflection_time(-1.0, 0.0), DegenerateInput);
}
