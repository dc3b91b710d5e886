#include "oracles.hpp"
#include "twistgap/group.hpp"

#include <gtest/gtest.h>

using namespace twistgap;

namespace {

const GroupDescriptor kGroups[] = {GroupDescriptor::cyclic(2), GroupDescriptor::cyclic(3),
                                   GroupDescriptor::cyclic(5), GroupDescriptor::u1(), GroupDescriptor::su2()};

}  // namespace

TEST(Irreps, DimensionsAndNality) {
    const auto su2 = GroupDescriptor::su2();
    EXPECT_EQ(su2_spin(1.5).dimension, 4);
    EXPECT_EQ(su2_spin(1.5).n_ality, 1);
    EXPECT_EQ(su2_spin(1.0).n_ality, 0);
    EXPECT_EQ(make_irrep(GroupDescriptor::cyclic(3), -1).label, 2);
    EXPECT_THROW(su2_spin(0.3), DomainError);
    EXPECT_THROW(make_irrep(su2, -1), DomainError);
    EXPECT_THROW(GroupDescriptor::cyclic(1), DomainError);
}

TEST(Irreps, ConjugationIsAnInvolution) {
    for (const auto& g : kGroups)
        for (const auto& r : enumerate_irreps(g, 6)) EXPECT_EQ(conjugate(g, conjugate(g, r)), r);
}

TEST(Irreps, FusionPreservesDimension) {
    const auto su2 = GroupDescriptor::su2();
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            int total = 0;
            for (const auto& r : fusion_channels(su2, make_irrep(su2, a), make_irrep(su2, b))) total += r.dimension;
            EXPECT_EQ(total, (a + 1) * (b + 1));
        }
}

TEST(Characters, IdentityGivesDimension) {
    for (const auto& g : kGroups)
        for (const auto& r : enumerate_irreps(g, 6)) EXPECT_NEAR(character(g, r, 0.0).real(), r.dimension, 1e-12);
}

TEST(Characters, Su2CenterElement) {
    for (int l = 0; l < 10; ++l)
        EXPECT_NEAR(su2_character(l, kPi), (l % 2 ? -1.0 : 1.0) * (l + 1), 1e-9);
}

// Schur orthogonality under each group's class measure.
TEST(ClassIntegral, CharactersAreOrthonormal) {
    for (const auto& g : kGroups) {
        const auto irreps = enumerate_irreps(g, 4);
        for (const auto& r : irreps)
            for (const auto& s : irreps) {
                const auto v = class_integral(
                    g, [&](double t) { return character(g, r, t) * std::conj(character(g, s, t)); }, 1e-14);
                EXPECT_NEAR(v.real(), r == s ? 1.0 : 0.0, 1e-12) << g.name() << " " << r.label << " " << s.label;
                EXPECT_NEAR(v.imag(), 0.0, 1e-12);
            }
    }
}

TEST(ClassIntegral, NodeBudgetExhaustionIsReported) {
    QuadratureOptions opt;
    opt.min_nodes = 16;
    opt.max_nodes = 64;
    EXPECT_THROW(class_integral_detailed(
                     GroupDescriptor::u1(), [](double t) { return std::exp(20.0 * std::cos(50.0 * t)); }, 1e-14, opt),
                 QuadratureFailure);
}

TEST(Coefficients, U1WilsonIsModifiedBessel) {
    for (double beta : {0.25, 1.0, 4.0}) {
        const auto cc = expand_action(GroupDescriptor::u1(), Action::wilson(beta));
        for (int q = -6; q <= 6; ++q) {
            const double ref = oracle::u1_wilson_F(q, beta);
            EXPECT_NEAR(cc.F_of(make_irrep(cc.group, q)), ref, 1e-13 * oracle::u1_wilson_F(0, beta))
                << "beta " << beta << " q " << q;
        }
    }
}

TEST(Coefficients, Su2WilsonIsModifiedBessel) {
    for (double beta : {0.25, 1.0, 4.0}) {
        const auto cc = expand_action(GroupDescriptor::su2(), Action::wilson(beta));
        for (int l = 0; l <= 8; ++l) {
            const double ref = oracle::su2_wilson_F(l, beta);
            EXPECT_NEAR(cc.F_of(make_irrep(cc.group, l)), ref, 1e-13 * oracle::su2_wilson_F(0, beta))
                << "beta " << beta << " 2j " << l;
        }
    }
}

TEST(Coefficients, Z2IsCoshSinh) {
    const auto cc = expand_action(GroupDescriptor::cyclic(2), Action::wilson(0.8));
    EXPECT_NEAR(cc.F[0], std::cosh(0.8), 1e-15);
    EXPECT_NEAR(cc.F_of(make_irrep(cc.group, 1)), std::sinh(0.8), 1e-15);
    EXPECT_NEAR(cc.c_of(make_irrep(cc.group, 1)), std::tanh(0.8), 1e-15);
}

TEST(Coefficients, ZnMatchesDirectSum) {
    const auto g = GroupDescriptor::cyclic(5);
    const double beta = 1.3;
    const auto cc = expand_action(g, Action::wilson(beta));
    for (int q = 0; q < 5; ++q) {
        double ref = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double t = 2 * kPi * k / 5;
            ref += std::exp(beta * std::cos(t)) * std::cos(q * t) / 5;
        }
        EXPECT_NEAR(cc.F_of(make_irrep(g, q)), ref, 1e-14);
    }
}

TEST(Coefficients, SharedNodesAgreeWithPerIrrepQuadrature) {
    const auto g = GroupDescriptor::su2();
    const auto a = Action::wilson(2.0);
    const auto cc = expand_action(g, a);
    for (int l = 0; l <= 5; ++l)
        EXPECT_NEAR(cc.F_of(make_irrep(g, l)), character_coefficient(g, a, make_irrep(g, l), 1e-14), 1e-12);
}

TEST(Coefficients, WilsonCoefficientsLieInUnitInterval) {
    for (const auto& g : kGroups)
        for (double beta : {0.1, 1.0, 5.0}) {
            const auto cc = expand_action(g, Action::wilson(beta));
            // high orders are below the quadrature rounding floor
            for (double c : cc.c) {
                EXPECT_GE(c, -1e-14);
                EXPECT_LE(c, 1.0);
            }
        }
}

TEST(Coefficients, AdjointActionOnlyFeedsZeroNality) {
    for (const auto& g : {GroupDescriptor::su2(), GroupDescriptor::cyclic(3)}) {
        const auto cc = expand_action(g, Action::adjoint(1.5));
        for (std::size_t i = 0; i < cc.size(); ++i)
            if (cc.irreps[i].n_ality != 0) EXPECT_EQ(cc.c[i], 0.0);
    }
}

TEST(Coefficients, ZeroCouplingIsExactlyTrivial) {
    for (const auto& g : kGroups) {
        const auto cc = expand_action(g, Action::wilson(0.0));
        EXPECT_EQ(cc.c[0], 1.0);
        for (std::size_t i = 1; i < cc.size(); ++i) EXPECT_EQ(cc.c[i], 0.0);
    }
}

TEST(Coefficients, CustomActionReproducesWilson) {
    const auto g = GroupDescriptor::u1();
    const auto a = expand_action(g, Action::wilson(1.7));
    const auto b = expand_action(g, Action::custom(1.7, [](double t) { return 1.7 * std::cos(t); }));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.c[i], b.c[i], 1e-13);
}

TEST(Coefficients, TruncationSuggestsLargerCutoff) {
    ExpandOptions opt;
    opt.cutoff = 4;
    try {
        expand_action(GroupDescriptor::u1(), Action::wilson(40.0), opt);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError& e) {
        EXPECT_GT(e.suggested_cutoff(), 4);
    }
    EXPECT_THROW(expand_action(GroupDescriptor::u1(), Action::wilson(1.0), ExpandOptions{0}), DomainError);
}
