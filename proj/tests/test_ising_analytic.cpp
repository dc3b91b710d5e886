#include "oracles.hpp"
#include "twistgap/ising_analytic.hpp"

#include <gtest/gtest.h>

using namespace twistgap;

TEST(SquareClosedForm, MatchesBruteForce) {
    for (auto [L1, L2] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{4, 3}, std::pair{4, 4}})
        for (auto [a, b] : {std::pair{0.3, 0.2}, std::pair{0.2, 0.7}, std::pair{0.6, 0.5}}) {
            const auto p = kastening_partition_pair({a, b, L1, L2});
            const auto [z, zt] = oracle::ising_brute_force(L1 * L2, oracle::square_bonds(L1, L2, a, b));
            EXPECT_NEAR(p.log_Z, std::log(z), 1e-12) << L1 << "x" << L2 << " a " << a << " b " << b;
            EXPECT_NEAR(p.log_Z_twisted, std::log(zt), 1e-12) << L1 << "x" << L2 << " a " << a << " b " << b;
            EXPECT_NEAR(p.ratio(), zt / z, 1e-12);
        }
}

TEST(SquareClosedForm, RatioFormsAgreeInDisorderedPhase) {
    const SquareIsingSpec s{0.25, 0.2, 8, 6};
    ASSERT_GT(s.mass_gap(), 0.0);
    const double x = square_ratio(s);
    EXPECT_NEAR(kastening_partition_pair(s).one_minus_ratio.value(), 2 * x / (1 + x), 1e-14);
    EXPECT_THROW(square_ratio({0.6, 0.6, 8, 6}), PhaseError);
}

TEST(SquareClosedForm, GammaSpectrum) {
    const auto g = gamma_spectrum(0.3, 0.2, 5);
    ASSERT_EQ(g.size(), 10u);
    EXPECT_NEAR(g[0], 2 * (dual_coupling(0.3) - 0.2), 1e-15);
    for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g[k], 0.0);
    EXPECT_NEAR(dual_coupling(dual_coupling(0.37)), 0.37, 1e-14);
}

TEST(SquareClosedForm, DecayRateConvergesInWidth) {
    const SquareIsingSpec s{0.3, 0.2, 64, 4};
    const double limit = square_decay_rate_limit(s);
    double prev = 1.0;
    for (int L2 : {4, 8, 16, 32}) {
        const double err = std::fabs(square_decay_rate({0.3, 0.2, 64, L2}) - limit);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(SquareClosedForm, HugeLatticeStaysFinite) {
    const auto p = kastening_partition_pair({0.3, 0.2, 4096, 4096});
    EXPECT_TRUE(std::isfinite(p.log_Z));
    EXPECT_TRUE(std::isfinite(p.one_minus_ratio.log_abs));
    EXPECT_GT(p.one_minus_ratio.sign, 0);
}

TEST(TriangularClosedForm, MatchesHelicalBruteForce) {
    for (auto [M, N] : {std::pair{1, 2}, std::pair{1, 4}, std::pair{2, 4}, std::pair{2, 8}})
        for (auto [t1, t] : {std::pair{0.2, 0.1}, std::pair{-0.3, 0.2}, std::pair{0.1, -0.15}}) {
            TriangularIsingSpec s{t1, t, M, N};
            const auto p = tri_partition_pair(s);
            const auto [z, zt] =
                oracle::ising_brute_force(M * N, oracle::triangular_bonds(N, M, std::atanh(t1), std::atanh(t)));
            EXPECT_NEAR(p.log_Z, std::log(z), 1e-12) << "M " << M << " N " << N << " t1 " << t1 << " t " << t;
            EXPECT_NEAR(p.ratio(), zt / z, 1e-12) << "M " << M << " N " << N << " t1 " << t1 << " t " << t;
        }
}

TEST(TriangularClosedForm, OrderedPhaseNeedsOptIn) {
    TriangularIsingSpec s{0.2, 0.9, 2, 4};
    EXPECT_THROW(tri_partition_pair(s), PhaseError);
    s.allow_ordered = true;
    const auto p = tri_partition_pair(s);
    const auto [z, zt] = oracle::ising_brute_force(8, oracle::triangular_bonds(4, 2, std::atanh(0.2), std::atanh(0.9)));
    EXPECT_NEAR(p.log_Z, std::log(z), 1e-11);
    EXPECT_NEAR(p.ratio(), zt / z, 1e-11);
}

TEST(TriangularClosedForm, RowFormEqualsDoubleProduct) {
    const TriangularIsingSpec s{0.3, 0.25, 3, 10};
    for (int mu : {0, 1})
        for (int nu : {0, 1}) EXPECT_NEAR(tri_log_omega(s, mu, nu), tri_log_omega_direct(s, mu, nu), 1e-11);
}

TEST(TriangularClosedForm, X0RatioMatchesPair) {
    const TriangularIsingSpec s{0.1, 0.2, 2, 8};
    const double x = tri_x0_ratio(s);
    EXPECT_NEAR(tri_partition_pair(s).one_minus_ratio.value(), 2 * x / (1 + x), 1e-12);
}

TEST(TriangularPhase, CriticalLineAndSides) {
    const double tc = std::sqrt(2.0) - 1.0;  // f = 0 at t1 = 0
    EXPECT_EQ(tri_phase(0.0, tc), TriPhase::critical);
    EXPECT_EQ(tri_phase(0.0, tc - 0.01), TriPhase::disordered);
    EXPECT_EQ(tri_phase(0.0, tc + 0.01), TriPhase::ordered);
    EXPECT_EQ(tri_phase(0.2, 0.9), TriPhase::ordered);
    EXPECT_GT(tri_gap_ratio(0.2, 0.9), 1.0);
    // strongly antiferromagnetic t1 stays disordered
    EXPECT_EQ(tri_phase(-0.9, 0.9), TriPhase::disordered);
    EXPECT_EQ(tri_rho(0.0, tc).rho, 0.0);
    EXPECT_THROW(tri_rho(0.2, 0.9), PhaseError);
}

TEST(TriangularPhase, RatioNeverBelowOne) {
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 41; ++j) {
            const double t1 = heatmap_coordinate(i, 41), t = heatmap_coordinate(j, 41);
            if (t == 0.0) continue;
            EXPECT_GE(tri_gap_ratio(t1, t), 1.0 - 1e-12) << t1 << " " << t;
        }
}

TEST(TriangularRho, ReferenceValueAtZeroT1) {
    // t1 = 0: B = 0, g = 1/2, rho = acosh((1 + t^2)^2 / (4t(1 - t^2)))
    const double t = 0.2;
    EXPECT_NEAR(tri_rho(0.0, t).rho, std::acosh(std::pow(1 + t * t, 2) / (4 * t * (1 - t * t))), 1e-14);
    EXPECT_NEAR(-std::expm1(-tri_rho(0.0, t).rho), 0.5833333333333333, 1e-12);
}

TEST(TriangularRho, SlopeKinkAtBMinusThird) {
    // along t = 0.3, B crosses -1/3 between t1 = -0.9 and 0; g switches branch there
    std::vector<double> t1s;
    for (int i = 0; i <= 45; ++i) t1s.push_back(-0.9 + 0.02 * i);
    const auto rows = rho_slope_probe(0.3, t1s);
    for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.drho_dt1));
    EXPECT_LT(rows.front().B, -1.0 / 3.0);
    EXPECT_GT(rows.back().B, -1.0 / 3.0);
}

TEST(Heatmap, SymmetricUnderTFlip) {
    const int n1 = 21, n2 = 21;
    const auto cells = rho_heatmap(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const auto& a = cells[i * n2 + j];
            const auto& b = cells[i * n2 + (n2 - 1 - j)];
            EXPECT_EQ(a.t, -b.t);
            EXPECT_EQ(a.phase, b.phase);
            if (std::isfinite(a.rho)) EXPECT_EQ(a.rho, b.rho);
        }
    EXPECT_TRUE(cells[10].divergent);
    EXPECT_THROW(rho_heatmap(0, 3), DomainError);
}

TEST(Heatmap, ValuesInUnitInterval) {
    for (const auto& c : rho_heatmap(31, 31)) {
        if (std::isnan(c.rho)) {
            EXPECT_EQ(c.phase, TriPhase::ordered);
            continue;
        }
        EXPECT_GE(c.one_minus_exp_neg_rho, 0.0);
        EXPECT_LE(c.one_minus_exp_neg_rho, 1.0);
    }
}

// 1 - Z^-/Z approaches the large-N form; the relative error shrinks with N.
TEST(TriangularAsymptotics, LargeNForm) {
    const double t1 = 0.1, t = 0.2;
    double prev = kInf;
    for (int N : {8, 16, 32, 64}) {
        const TriangularIsingSpec s{t1, t, 2, N};
        const auto exact = tri_partition_pair(s).one_minus_ratio;
        const auto asym = tri_asymptotic_ratio(s);
        const double rel = std::fabs(std::expm1(exact.log_abs - asym.log_value));
        EXPECT_LT(rel, prev) << N;
        prev = rel;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(TriangularAsymptotics, ThetaBarTendsToRho) {
    const double t1 = 0.1, t = 0.2;
    const double rho = tri_rho(t1, t).rho;
    double prev = kInf;
    for (int M : {4, 8, 16, 32, 64}) {
        const double tb = tri_asymptotic_ratio({t1, t, M, 2 * M}).theta_bar;
        EXPECT_GE(tb, rho - 1e-12);
        EXPECT_LE(tb - rho, prev + 1e-15);
        prev = tb - rho;
    }
    EXPECT_LT(prev, 1e-3);
}
