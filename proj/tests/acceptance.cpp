// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracles.hpp"
#include "twistgap/twistgap.hpp"

#include <boost/math/distributions/normal.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace twistgap;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_err(double x, double ref) { return std::fabs(x - ref) / std::max(std::fabs(ref), 1e-300); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome square_oracle() {
    double worst = 0.0;
    for (auto [L1, L2] : {std::pair{4, 2}, std::pair{4, 4}, std::pair{2, 2}})
        for (double a : {0.2, 0.3, 0.5})
            for (double b : {0.2, 0.3, 0.5}) {
                const auto closed = kastening_partition_pair({a, b, L1, L2});
                const auto lat = SpinLattice::square(L1, L2, a, b).with_walls({L1 - 1});
                const auto e = enumerate_partition(lat).pair;
                worst = std::max({worst, rel_err(closed.log_Z, e.log_Z), rel_err(closed.log_Z_twisted, e.log_Z_twisted)});
            }
    return {worst <= 1e-9, fmt("max relative error %.3g over 27 points", worst)};
}

Outcome triangular_oracle() {
    double worst = 0.0;
    for (auto [N, M] : {std::pair{4, 2}, std::pair{8, 2}, std::pair{6, 3}})
        for (double t : {0.1, -0.1, 0.2, -0.2}) {
            TriangularIsingSpec s{t, t, M, N};
            s.allow_ordered = true;
            const auto closed = tri_partition_pair(s);
            const auto lat = SpinLattice::triangular_t(N, M, t, t, true).with_walls({N - 1});
            const auto e = enumerate_partition(lat).pair;
            worst = std::max({worst, rel_err(closed.log_Z, e.log_Z), rel_err(closed.log_Z_twisted, e.log_Z_twisted)});
        }
    return {worst <= 1e-9, fmt("max relative error %.3g over 12 points", worst)};
}

Outcome diagonal_identity() {
    const double tmax = std::sqrt(2.0) - 1.0;
    double worst = 0.0;
    int points = 0;
    for (int i = 1; i <= 50; ++i) {
        const double t = tmax * i / 51.0;
        for (double s : {t, -t}) {
            const double ref = std::acosh(std::pow(1 + s * s, 2) / (4 * std::fabs(s) * (1 - s * s)));
            worst = std::max(worst, std::fabs(tri_rho(0.0, s).rho - ref));
            ++points;
        }
    }
    return {worst <= 1e-12, fmt("max |diff| %.3g over %d points", worst, points)};
}

// (1 - Z-/Z)^{1/L1} against the finite-L2 rate, then the rate against e^{-gamma_0} in L2.
Outcome square_decay() {
    const double a = 0.3, b = 0.3;
    const int L2 = 8;
    const double target = square_decay_rate({a, b, 16, L2});
    bool monotone = true;
    double prev = kInf, last = 0.0;
    std::ostringstream os;
    for (int L1 : {16, 32, 64, 128}) {
        const auto p = kastening_partition_pair({a, b, L1, L2});
        const double v = std::exp(p.one_minus_ratio.log_abs / L1);
        const double d = std::fabs(v - target);
        monotone &= d < prev;
        prev = d;
        last = d;
        os << " L1=" << L1 << ":" << fmt("%.3g", d);
    }
    // convergence exponent in L2 from the last two widths
    const double lim = square_decay_rate_limit({a, b, 16, L2});
    std::vector<double> errs;
    const int widths[] = {4, 8, 16, 32};
    for (int w : widths) errs.push_back(std::fabs(square_decay_rate({a, b, 16, w}) - lim));
    double exponent = std::numeric_limits<double>::quiet_NaN();
    if (errs[2] > 0 && errs[3] > 0) exponent = std::log(errs[2] / errs[3]) / std::log(2.0);
    else if (errs[1] > 0 && errs[2] > 0) exponent = std::log(errs[1] / errs[2]) / std::log(2.0);
    const bool l1_ok = monotone && last <= 1e-6;
    const bool l2_ok = std::fabs(exponent - 1.0) <= 0.1;
    os << fmt("; monotone=%d final |diff| %.3g; L2 errors %.3g %.3g %.3g %.3g, fitted exponent %.3g", monotone, last,
              errs[0], errs[1], errs[2], errs[3], exponent);
    return {l1_ok && l2_ok, os.str().substr(1)};
}

Outcome triangular_asymptotics() {
    const double t1 = 0.15, t = 0.15;
    const TriangularIsingSpec big{t1, t, 8, 512};
    const auto exact = tri_partition_pair(big).one_minus_ratio;
    const auto asym = tri_asymptotic_ratio(big);
    const double rel = std::fabs(std::expm1(asym.log_value - exact.log_abs));

    // y(N) = log(1 - Z-/Z)/N = -theta + log 2 / N: Richardson in 1/N, then in 1/M^2
    std::vector<double> theta;
    const int Ms[] = {8, 16, 32};
    for (int M : Ms) {
        const double y1 = tri_partition_pair({t1, t, M, 256}).one_minus_ratio.log_abs / 256;
        const double y2 = tri_partition_pair({t1, t, M, 512}).one_minus_ratio.log_abs / 512;
        theta.push_back(-(2 * y2 - y1));
    }
    const double theta_inf = (4 * theta[2] - theta[1]) / 3;
    const double rho = tri_rho(t1, t).rho;
    const double diff = std::fabs(std::exp(-theta_inf) - std::exp(-rho));
    return {rel <= 1e-3 && diff <= 1e-4,
            fmt("asymptotic vs exact relative %.3g at N=512; extrapolated e^-theta %.12g vs e^-rho %.12g (|diff| %.3g)",
                rel, std::exp(-theta_inf), std::exp(-rho), diff)};
}

Outcome inequality_suite() {
    int rows = 0, bad = 0;
    auto theorem_ns = [](const SpinLattice& lat) {
        std::vector<int> ns;
        for (int n = 1; n < lat.L1(); ++n)
            if (is_power_of_two_multiple(lat.L1(), n) && (lat.is_square() || n % 2 == 0)) ns.push_back(n);
        return ns;
    };
    auto run = [&](const SpinLattice& lat) {
        for (const auto& r : check_inequality(lat, theorem_ns(lat))) {
            ++rows;
            bad += !r.ok;
        }
    };
    for (auto [L1, L2] : {std::pair{4, 2}, std::pair{4, 4}, std::pair{8, 2}, std::pair{8, 3}})
        for (double a : {0.2, -0.2, 0.5, -0.5})
            for (double b : {0.2, -0.2, 0.5, -0.5}) run(SpinLattice::square(L1, L2, a, b));
    for (auto [N, M] : {std::pair{4, 2}, std::pair{8, 2}, std::pair{8, 3}})
        for (double t1 : {0.1, -0.1, 0.3, -0.3})
            for (double t : {0.1, -0.1, 0.3, -0.3}) run(SpinLattice::triangular_t(N, M, t1, t, true));

    int grows = 0, gbad = 0, torus_rows = 0, torus_bad = 0;
    std::vector<long long> areas;
    for (long long A = 1; A <= 16; ++A) areas.push_back(A);
    for (const auto& g : {GroupDescriptor::u1(), GroupDescriptor::su2(), GroupDescriptor::cyclic(2),
                          GroupDescriptor::cyclic(3)})
        for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0})
            for (int L : {4, 8})
                for (const auto& r : check_ty_bound(make_lgt2d(g, Action::wilson(beta), L, L), fundamental(g), areas)) {
                    ++grows;
                    gbad += !r.ok;
                    if (r.theorem_regime) {
                        ++torus_rows;
                        torus_bad += !r.ok_torus;
                    }
                }
    return {bad == 0 && gbad == 0,
            fmt("spin: %d violations in %d rows; gauge: %d violations in %d rows (finite-torus loop: %d of %d)", bad, rows,
                gbad, grows, torus_bad, torus_rows)};
}

Outcome flux_algebra() {
    double worst_sum = 0.0, worst_range = 0.0;
    int tables = 0;
    for (const auto& g : {GroupDescriptor::su2(), GroupDescriptor::u1()})
        for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0})
            for (int L : {2, 4, 8}) {
                const auto t = sector_table(make_lgt2d(g, Action::wilson(beta), L, L));
                double sum = 0.0;
                for (double f : t.flux) {
                    sum += f;
                    worst_range = std::max({worst_range, -f, f - 1.0});
                }
                worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
                ++tables;
            }
    return {worst_sum <= 1e-10 && worst_range <= 1e-12,
            fmt("%d tables, max |sum - 1| %.3g, max range excess %.3g", tables, worst_sum, worst_range)};
}

Outcome pcm_crosscheck() {
    double worst = 0.0;
    for (double beta : {0.1, 0.3, 1.0})
        for (int L : {8, 64}) {
            const auto s = make_chain(GroupDescriptor::cyclic(2), TwistSubgroup::full(), Action::wilson(beta), L);
            const oracle::Z2Chain ref{beta, L};
            const double z = ref.Z(), zg = ref.Z_twisted();
            worst = std::max(worst, rel_err(std::exp(chain_log_partition(s)), z));
            worst = std::max(worst, rel_err(chain_log_twisted(s, kPi).value(), zg));
            worst = std::max(worst, std::fabs(wall_projection(s) - 0.5 * (1 - zg / z)));
            for (int n = 0; n <= L; ++n)
                worst = std::max(worst, std::fabs(chain_correlation(s, fundamental(s.group), n).finite_volume.value() -
                                                  ref.correlator(n)));
        }
    double su2 = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto s = make_chain(GroupDescriptor::su2(), TwistSubgroup::full(), Action::wilson(beta), 4);
        su2 = std::max(su2, rel_err(std::exp(chain_log_partition(s)), oracle::su2_chain4_partition(beta)));
    }
    return {worst <= 1e-12 && su2 <= 1e-8, fmt("Z2 chain max deviation %.3g; SU(2) L=4 relative %.3g", worst, su2)};
}

// The audit compares 32 states at once; the per-state cut is Bonferroni-corrected so
// the family-wise false-alarm rate equals that of a single 3 sigma test.
Outcome monte_carlo() {
    McConfig cfg;
    cfg.lattice = SpinLattice::square(8, 8, 0.3, 0.3);
    cfg.sweeps = 1000000;
    cfg.thermalization = 1000;
    cfg.seed = 1;
    const auto est = run_extended_ensemble(cfg);
    const double exact = kastening_partition_pair({0.3, 0.3, 8, 8}).ratio();
    const double z = (est.ratio - exact) / est.stderr_ratio;

    McConfig small = cfg;
    small.lattice = SpinLattice::square(2, 2, 0.3, 0.3);
    small.sweeps = 400000;
    const int states = 1 << (small.lattice.sites() + 1);
    const double family = 2 * boost::math::cdf(boost::math::complement(boost::math::normal(), 3.0));
    const double cut = boost::math::quantile(boost::math::complement(boost::math::normal(), family / (2 * states)));
    const auto audit = detailed_balance_audit(small, 64, cut);
    return {std::fabs(z) <= 3.0 && audit.ok,
            fmt("ratio %.6f +- %.6f vs exact %.6f (z = %.2f); 2x2 audit max z %.2f, cut %.2f", est.ratio,
                est.stderr_ratio, exact, z, audit.max_z, cut)};
}

Outcome strong_coupling() {
    const auto rows = sce_leading_check(6, 4, {0.05, 0.025});
    const double d1 = std::fabs(rows[0].r - 1.0), d2 = std::fabs(rows[1].r - 1.0);
    return {d1 <= 0.1 && d2 <= 0.03, fmt("r(0.05) = %.6f, r(0.025) = %.6f", rows[0].r, rows[1].r)};
}

Outcome heatmap() {
    const int n = 201;
    const auto cells = rho_heatmap(n, n);
    std::ostringstream csv;
    write_heatmap_csv(csv, cells);
    double asym = 0.0;
    int markers = 0, mismatch = 0, ordered = 0, ratio_le_one = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& a = cells[i * n + j];
            const auto& b = cells[i * n + (n - 1 - j)];
            if (a.t != -b.t || a.phase != b.phase || std::isnan(a.rho) != std::isnan(b.rho)) asym = kInf;
            else if (std::isfinite(a.rho)) asym = std::max(asym, std::fabs(a.rho - b.rho));
            if (a.t == 0.0) {
                markers += a.divergent;
                continue;
            }
            const bool is_ordered = a.phase == TriPhase::ordered;
            const bool literal = a.gap_ratio <= 1.0;
            ordered += is_ordered;
            ratio_le_one += literal;
            mismatch += is_ordered != literal;
        }
    const bool csv_markers = csv.str().find(",inf,") != std::string::npos;
    return {asym <= 1e-12 && markers == n && csv_markers && mismatch == 0,
            fmt("symmetry %.3g, %d divergence markers; ordered cells %d vs cells with g(B)/|A| <= 1: %d (%d mismatches)",
                asym, markers, ordered, ratio_le_one, mismatch)};
}

Outcome walls() {
    double worst = 0.0;
    for (const auto& lat : {SpinLattice::square(5, 3, 0.4, 0.3), SpinLattice::triangular(6, 3, 0.2, -0.3)}) {
        const int last = lat.L1() - 1;
        worst = std::max(worst, std::fabs(wall_mod2_check(lat, {last}, {0, 2, last}).diff));
        const auto tw = lat.with_walls({last});
        worst = std::max(worst, std::fabs(wall_deformation_check(tw, {tw.site(last, 0), tw.site(last, 1)}).diff));
        worst = std::max(worst, std::fabs(wall_deformation_check(tw, {tw.site(last, 2), tw.site(0, 1)}).diff));
    }
    return {worst <= 1e-12, fmt("max |log Z difference| %.3g", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "square closed form vs enumeration", 60, square_oracle},
        {2, "triangular closed form vs enumeration", 120, triangular_oracle},
        {3, "diagonal mass-gap identity", 1, diagonal_identity},
        {4, "square decay-rate limits", 10, square_decay},
        {5, "triangular asymptotics", 60, triangular_asymptotics},
        {6, "inequality suite", 300, inequality_suite},
        {7, "flux algebra", 60, flux_algebra},
        {8, "principal chiral chain cross-check", 60, pcm_crosscheck},
        {9, "Monte Carlo consistency", 300, monte_carlo},
        {10, "strong-coupling leading order", 10, strong_coupling},
        {11, "rho heatmap", 30, heatmap},
        {12, "wall mod-2 and deformation", 60, walls},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= c.budget_s;
        failures += !pass;
        std::printf("%s [%2d] %s: %s (%.2f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
