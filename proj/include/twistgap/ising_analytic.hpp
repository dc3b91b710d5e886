#pragma once

// Closed-form Ising partition functions with periodic and antiperiodic
// boundaries, and the off-axis mass-gap bound of the triangular model.
//
// Normalization is 1/2 sum_sigma per site throughout, so every textbook
// prefactor carries an extra 2^{-sites}.
//
// Square lattice: couplings a (direction 1, L1 sites) and b (direction 2, L2 sites);
// the twist flips the a-bonds of one column, i.e. antiperiodic along direction 1.
//
// Triangular lattice: N columns of M sites. Site (x, y) couples to (x, y+1)
// with J1 and to (x+1, y), (x+1, y-1) with J. Columns close with a half-turn
// helical seam, (x+N, y) ~ (x, y+N/2). The twist flips both J bonds across
// the seam between column N-1 and column 0.

#include "twistgap/errors.hpp"
#include "twistgap/numeric.hpp"
#include "twistgap/partition_pair.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace twistgap {

// ---------------------------------------------------------------- square lattice

inline double dual_coupling(double a) {
    if (!(a > 0)) throw DomainError("dual coupling needs a > 0");
    return 0.5 * std::asinh(1.0 / std::sinh(2.0 * a));
}

struct SquareIsingSpec {
    double a = 0.0;
    double b = 0.0;
    int L1 = 1;
    int L2 = 1;

    double a_dual() const { return dual_coupling(a); }
    double mass_gap() const { return 2.0 * (a_dual() - b); }
};

/// gamma_k for k = 0 .. 2 L2 - 1; gamma_0 = 2(abar - b) keeps its sign.
inline std::vector<double> gamma_spectrum(double a, double b, int L2) {
    if (L2 < 1) throw DomainError("L2 must be positive");
    const double ad = dual_coupling(a);
    const double ch = std::cosh(2 * ad) * std::cosh(2 * b);
    const double sh = std::sinh(2 * ad) * std::sinh(2 * b);
    std::vector<double> g(2 * L2);
    g[0] = 2.0 * (ad - b);
    for (int k = 1; k < 2 * L2; ++k)
        g[k] = acosh_stable(ch - std::cos(kPi * k / L2) * sh);
    return g;
}

inline std::vector<double> gamma_spectrum(const SquareIsingSpec& s) {
    return gamma_spectrum(s.a, s.b, s.L2);
}

namespace detail {

// Pieces of the square-lattice closed form, all in log domain:
//   Z  ~ S + D,  Z^- ~ S - D
//   S = P_c^odd (1 + T_odd),  D = P_c^even (1 - T_even)
// with T = prod tanh(L1 gamma / 2) over the odd or even modes.
struct SquarePieces {
    double log_prefactor = 0.0;
    double log_S = 0.0;
    SignedLog D;
};

inline SquarePieces square_pieces(const SquareIsingSpec& s) {
    if (s.L1 < 1) throw DomainError("L1 must be positive");
    const auto g = gamma_spectrum(s);
    const double half_l1 = 0.5 * s.L1;
    SquarePieces out;
    const double sites = static_cast<double>(s.L1) * s.L2;
    out.log_prefactor = -kLn2 + 0.5 * sites * std::log(2.0 * std::sinh(2.0 * s.a)) - sites * kLn2;

    double log_pco = 0.0, log_to = 0.0;
    double log_pce = 0.0;
    std::vector<double> neg_log_tanh_even;  // log(-log tanh y) per even mode
    int even_sign = 1;
    bool even_zero = false;
    for (int k = 1; k <= s.L2; ++k) {
        const double yo = half_l1 * g[2 * k - 1];
        log_pco += log_2cosh(yo);
        log_to += -std::exp(log_neg_log_tanh(yo));
        const double ye = half_l1 * g[2 * k - 2];
        log_pce += log_2cosh(ye);
        if (ye == 0.0) even_zero = true;
        else {
            if (ye < 0) even_sign = -even_sign;
            neg_log_tanh_even.push_back(log_neg_log_tanh(std::fabs(ye)));
        }
    }
    out.log_S = log_pco + std::log1p(std::exp(log_to));

    double log_one_minus_te = 0.0;
    int d_sign = 1;
    if (!even_zero) {
        const double log_minus_log_te = log_sum_exp(neg_log_tanh_even);  // log(-log|T_e|)
        if (even_sign > 0) {
            log_one_minus_te = log_one_minus_exp_neg(log_minus_log_te);
        } else {
            log_one_minus_te = std::log1p(std::exp(-std::exp(log_minus_log_te)));
        }
    }
    out.D = SignedLog::from_log(log_pce + log_one_minus_te, d_sign);
    return out;
}

}  // namespace detail

/// Z and Z^- from the closed form, with 1 - Z^-/Z = 2D / (S + D) kept exact.
inline PartitionPair kastening_partition_pair(const SquareIsingSpec& s) {
    const auto p = detail::square_pieces(s);
    const SignedLog S = SignedLog::from_log(p.log_S);
    const SignedLog plus = S + p.D;
    const SignedLog minus = S - p.D;
    if (plus.sign <= 0 || minus.sign <= 0)
        throw ConsistencyError("square closed form produced a nonpositive partition function");
    PartitionPair out;
    out.method = PairMethod::closed_form;
    out.log_Z = p.log_prefactor + plus.log_abs;
    out.log_Z_twisted = p.log_prefactor + minus.log_abs;
    out.one_minus_ratio = SignedLog::from_log(kLn2 + p.D.log_abs - plus.log_abs, p.D.sign);
    return out;
}

/// (Z - Z^-) / (Z + Z^-) = D / S, the tanh/cosh-ratio form.
inline double square_ratio(const SquareIsingSpec& s) {
    const auto g = gamma_spectrum(s);
    if (!(g[0] > 0)) throw PhaseError("square_ratio needs the disordered phase (gamma_0 > 0)");
    const auto p = detail::square_pieces(s);
    return p.D.sign * std::exp(p.D.log_abs - p.log_S);
}

/// exp{-(gamma_0 + 1/2 sum_k (-1)^{k+1} gamma_k)}: the L1 -> infinity rate of (1 - Z^-/Z)^{1/L1}.
inline double square_decay_rate(const SquareIsingSpec& s) {
    const auto g = gamma_spectrum(s);
    if (!(g[0] > 0)) throw PhaseError("decay rate needs the disordered phase (gamma_0 > 0)");
    CompensatedSum alt;
    for (std::size_t k = 0; k < g.size(); ++k) alt.add((k % 2 ? 1.0 : -1.0) * g[k]);
    return std::exp(-(g[0] + 0.5 * alt.value()));
}

/// L2 -> infinity limit of the decay rate: e^{-gamma_0} = e^{-2(abar - b)}.
inline double square_decay_rate_limit(const SquareIsingSpec& s) {
    const double m = s.mass_gap();
    if (!(m > 0)) throw PhaseError("decay rate needs the disordered phase (gamma_0 > 0)");
    return std::exp(-m);
}

inline void write_gamma_csv(std::ostream& os, const std::vector<double>& g) {
    os << "k,gamma_k\n";
    os.precision(17);
    for (std::size_t k = 0; k < g.size(); ++k) os << k << ',' << g[k] << '\n';
}

// ------------------------------------------------------------ triangular lattice

struct TriCoefficients {
    double A0 = 1.0;
    double A = 0.0;
    double B = 0.0;
};

inline TriCoefficients tri_coefficients(double t1, double t) {
    if (!(std::fabs(t1) < 1.0 && std::fabs(t) < 1.0))
        throw DomainError("t1 and t must lie in (-1, 1)");
    const double t2 = t * t;
    const double A0 = (1 + t2 * t1) * (1 + t2 * t1) + (t1 + t2) * (t1 + t2) +
                      2 * t2 * (1 + t1) * (1 + t1);
    return {A0, 2 * (1 - t1 * t1) * (1 - t2) * t / A0, 2 * t1 * (1 - t2) * (1 - t2) / A0};
}

inline double g_function(double x) {
    if (!(std::fabs(x) < 1.0)) throw DomainError("g(x) needs |x| < 1");
    if (x < -1.0 / 3.0) return std::sqrt(-2.0 * x * (1.0 + x));
    return 0.5 * (1.0 - x);
}

enum class TriPhase { disordered, critical, ordered };

inline std::string to_string(TriPhase p) {
    switch (p) {
        case TriPhase::disordered: return "disordered";
        case TriPhase::critical: return "critical";
        case TriPhase::ordered: return "ordered";
    }
    return "?";
}

/// g(B)/|A|; +inf on the t = 0 line.
inline double tri_gap_ratio(double t1, double t) {
    const auto c = tri_coefficients(t1, t);
    if (c.A == 0.0) return kInf;
    return g_function(c.B) / std::fabs(c.A);
}

/// Phase of the triangular model. g(B)/|A| >= 1 holds on the whole square and
/// touches 1 only on the critical line, so the side is read off from
///   A0 (1 - B - 2|A|) = f^2,  f = (1 - t1)(1 - t^2) - 2|t|(1 + t1):
/// disordered iff B < -1/3 or f > 0.
inline TriPhase tri_phase(double t1, double t) {
    const auto c = tri_coefficients(t1, t);
    const double ratio = tri_gap_ratio(t1, t);
    if (std::isfinite(ratio) && std::fabs(ratio - 1.0) <= 1e-12) return TriPhase::critical;
    const double s = std::fabs(t);
    const double f = (1 - t1) * (1 - s * s) - 2 * s * (1 + t1);
    return (c.B < -1.0 / 3.0 || f > 0) ? TriPhase::disordered : TriPhase::ordered;
}

struct MassGapBound {
    double rho = 0.0;
    double g_of_B = 0.0;
    double gap_ratio = 0.0;  // g(B)/|A|
    double theta_bar = 0.0;  // filled by the finite-M asymptotics
    TriPhase phase = TriPhase::disordered;
};

inline MassGapBound tri_rho(double t1, double t) {
    const auto c = tri_coefficients(t1, t);
    MassGapBound out;
    out.g_of_B = g_function(c.B);
    out.phase = tri_phase(t1, t);
    out.gap_ratio = tri_gap_ratio(t1, t);
    if (out.phase == TriPhase::ordered)
        throw PhaseError("ordered phase: no mass-gap bound");
    if (out.phase == TriPhase::critical) {
        out.rho = 0.0;
        return out;
    }
    out.rho = std::isinf(out.gap_ratio) ? kInf : std::acosh(out.gap_ratio);
    out.theta_bar = out.rho;
    return out;
}

struct TriangularIsingSpec {
    double t1 = 0.0;
    double t = 0.0;
    int M = 2;  // sites per column
    int N = 2;  // columns, even
    bool allow_ordered = false;
};

namespace detail {

// One row p of the Omega product at fixed mu, summed over q in closed form:
//   prod_q [c0 - kappa cos(psi_q - phi/2)] = (|kappa|/2)^N (2 cosh N theta - 2 cos X).
struct TriRow {
    double c0 = 1.0;
    double kappa = 0.0;
    double theta = 0.0;
    int x_units = 0;  // X at nu = 0 in units of pi / (2M), reduced mod 4M
};

inline TriRow tri_row(const TriCoefficients& c, int M, int N, int p, int two_mu) {
    const int m2 = 2 * p + two_mu;  // phi = pi m2 / M
    TriRow r;
    r.c0 = 1.0 - c.B * std::cos(kPi * m2 / M);
    const double half = m2 == M ? 0.0 : std::cos(kPi * m2 / (2.0 * M));
    r.kappa = 2.0 * c.A * half;
    if (r.kappa != 0.0) r.theta = acosh_stable(r.c0 / std::fabs(r.kappa));
    long long units = -static_cast<long long>(N) * m2;
    if (r.kappa < 0) units += 2LL * M * N;
    const long long mod = 4LL * M;
    r.x_units = static_cast<int>(((units % mod) + mod) % mod);
    return r;
}

inline double cos_units(int units, int M) { return std::cos(kPi * units / (2.0 * M)); }

// log(2 cosh N theta - 2 cos X), exact near theta = 0 and cos X = 1.
inline double log_row_bracket(double n_theta, int units, int M) {
    const double c = cos_units(units, M);
    const double one_minus_c = 2.0 * std::pow(std::sin(kPi * units / (4.0 * M)), 2);
    const double e = std::exp(-n_theta);
    const double lin = one_minus_c - c * std::expm1(-n_theta);  // 1 - c e^{-N theta}
    const double inner = lin * lin + (1.0 - c * c) * e * e;
    if (inner <= 0.0) return kNegInf;
    return n_theta + std::log(inner);
}

inline double log_omega_rows(const TriCoefficients& c, int M, int N, int two_mu, int two_nu) {
    double s = static_cast<double>(M) * N * std::log(c.A0);
    for (int p = 0; p < M; ++p) {
        const TriRow r = tri_row(c, M, N, p, two_mu);
        if (r.kappa == 0.0) {
            s += N * std::log(r.c0);
            continue;
        }
        const int units = (r.x_units + 2 * M * two_nu) % (4 * M);
        const double lb = log_row_bracket(N * r.theta, units, M);
        if (lb == kNegInf) return kNegInf;
        s += N * std::log(std::fabs(r.kappa) / 2.0) + lb;
    }
    return 0.5 * s;
}

// log(log1p(v)) for v > 0 given log v.
inline double log_log1p(double log_v) {
    const double v = std::exp(log_v);
    if (v < 1e-8) return log_v + std::log1p(-0.5 * v);
    return std::log(std::log1p(v));
}

// x = log Omega_{0,1/2} - log Omega_{0,0} = -1/2 sum_p log((C - c)/(C + c)).
inline SignedLog omega_zero_row_gap(const TriCoefficients& c, int M, int N) {
    std::vector<SignedLog> terms;
    for (int p = 0; p < M; ++p) {
        const TriRow r = tri_row(c, M, N, p, 0);
        if (r.kappa == 0.0) continue;
        const double cx = cos_units(r.x_units, M);
        if (std::fabs(cx) < 1e-15) continue;
        const double nt = N * r.theta;
        const double e = std::exp(-nt);
        // u = 2c / (C + c) = 4c e^{-Nt} / (1 + e^{-2Nt} + 2c e^{-Nt})
        const double den = 1.0 + e * e + 2.0 * cx * e;
        if (den <= 0.0) return SignedLog::from_log(kInf);  // critical zero mode
        const double log_u = std::log(4.0 * std::fabs(cx)) - nt - std::log(den);
        // -1/2 log1p(-u): positive for u > 0, negative for u < 0
        double mag;
        if (cx > 0) {
            if (log_u >= 0.0) return SignedLog::from_log(kInf);
            mag = log_neg_log1p_neg(log_u);
        } else {
            mag = log_log1p(log_u);
        }
        terms.push_back(SignedLog::from_log(mag - kLn2, cx > 0 ? 1 : -1));
    }
    return signed_log_sum(terms);
}

}  // namespace detail

/// log Omega_{mu,nu} by the per-row closed form; mu, nu in {0, 1/2} given as 2mu, 2nu.
inline double tri_log_omega(const TriangularIsingSpec& s, int two_mu, int two_nu) {
    return detail::log_omega_rows(tri_coefficients(s.t1, s.t), s.M, s.N, two_mu, two_nu);
}

/// Same quantity as the literal double product 1/2 sum_{p,q} log(A0 * bracket).
inline double tri_log_omega_direct(const TriangularIsingSpec& s, int two_mu, int two_nu) {
    const auto c = tri_coefficients(s.t1, s.t);
    CompensatedSum acc;
    for (int p = 0; p < s.M; ++p) {
        const double phi = kPi * (2 * p + two_mu) / s.M;
        for (int q = 0; q < s.N; ++q) {
            const double psi = kPi * (2 * q + two_nu) / s.N;
            const double br = 1 - c.B * std::cos(phi) - c.A * std::cos(psi) - c.A * std::cos(phi - psi);
            if (br < 0.0 && br < -1e-14)
                throw DomainError("negative bracket under the square root");
            if (br <= 0.0) return kNegInf;
            acc.add(0.5 * std::log(c.A0 * br));
        }
    }
    return acc.value();
}

namespace detail {

inline void validate_tri(const TriangularIsingSpec& s) {
    if (s.M < 1 || s.N < 2 || s.N % 2 != 0)
        throw DomainError("triangular lattice needs M >= 1 and even N >= 2");
}

inline double tri_log_prefactor(const TriangularIsingSpec& s) {
    // 1/2 [cosh J1 cosh^2 J]^{MN} with cosh^2 J = 1 / (1 - t^2)
    const double mn = static_cast<double>(s.M) * s.N;
    return -kLn2 + mn * (-0.5 * std::log1p(-s.t1 * s.t1) - std::log1p(-s.t * s.t));
}

}  // namespace detail

/// Z and Z^- from the four Omega sums. Ordered-phase evaluation needs allow_ordered.
inline PartitionPair tri_partition_pair(const TriangularIsingSpec& s) {
    detail::validate_tri(s);
    const auto c = tri_coefficients(s.t1, s.t);
    const TriPhase phase = tri_phase(s.t1, s.t);
    if (phase == TriPhase::ordered && !s.allow_ordered)
        throw PhaseError("ordered phase; pass allow_ordered to evaluate");
    const int sgn = phase == TriPhase::ordered ? -1 : 1;

    const double l_hh = detail::log_omega_rows(c, s.M, s.N, 1, 1);
    const double l_h0 = detail::log_omega_rows(c, s.M, s.N, 1, 0);
    const double l_0h = detail::log_omega_rows(c, s.M, s.N, 0, 1);
    const SignedLog S = SignedLog::from_log(log_add_exp(l_hh, l_h0));

    // D = Omega_{0,1/2} - sgn Omega_{0,0} = Omega_{0,1/2} (1 - sgn e^{-x})
    const SignedLog x = detail::omega_zero_row_gap(c, s.M, s.N);
    SignedLog D;
    if (sgn > 0) {
        if (x.sign > 0) D = SignedLog::from_log(l_0h + log_one_minus_exp_neg(x.log_abs));
        else if (x.sign < 0) D = SignedLog::from_log(l_0h + std::log(std::expm1(std::exp(x.log_abs))), -1);
    } else {
        const double neg_x = x.sign == 0 ? 0.0 : -x.sign * std::exp(x.log_abs);
        D = SignedLog::from_log(l_0h + log_add_exp(0.0, neg_x));
    }

    const SignedLog plus = S + D;
    const SignedLog minus = S - D;
    if (plus.sign <= 0 || minus.sign <= 0)
        throw ConsistencyError("triangular closed form produced a nonpositive partition function");
    const double pre = detail::tri_log_prefactor(s);
    PartitionPair out;
    out.method = PairMethod::closed_form;
    out.log_Z = pre + plus.log_abs;
    out.log_Z_twisted = pre + minus.log_abs;
    out.one_minus_ratio = D.is_zero() ? SignedLog{}
                                      : SignedLog::from_log(kLn2 + D.log_abs - plus.log_abs, D.sign);
    return out;
}

/// (Omega_{0,1/2} - Omega_{0,0}) / (Omega_{1/2,1/2} + Omega_{1/2,0}) from the direct double products.
inline double tri_x0_ratio(const TriangularIsingSpec& s) {
    detail::validate_tri(s);
    const double o00 = tri_log_omega_direct(s, 0, 0);
    const double o0h = tri_log_omega_direct(s, 0, 1);
    const double ohh = tri_log_omega_direct(s, 1, 1);
    const double oh0 = tri_log_omega_direct(s, 1, 0);
    const SignedLog num = SignedLog::from_log(o0h) - SignedLog::from_log(o00);
    const double den = log_add_exp(ohh, oh0);
    return num.is_zero() ? 0.0 : num.sign * std::exp(num.log_abs - den);
}

/// f(x) = 1/2 log{1 - B cos 2pi x + sqrt((1 - B cos 2pi x)^2 - (2A cos pi x)^2)}.
inline double tri_f(const TriCoefficients& c, double x) {
    const double u = 1.0 - c.B * std::cos(2 * kPi * x);
    const double v = 2.0 * c.A * std::cos(kPi * x);
    return 0.5 * std::log(u + std::sqrt(std::max(0.0, u * u - v * v)));
}

struct AsymptoticRatio {
    double value = 0.0;      // 2 exp{-N [theta_bar + alt]}
    double log_value = 0.0;
    double theta_bar = 0.0;
    double alternating = 0.0;
    std::vector<int> excluded_rows;  // p with cos(pi p / M) = 0
};

/// Large-N form of 1 - Z^-/Z at fixed M.
inline AsymptoticRatio tri_asymptotic_ratio(const TriangularIsingSpec& s) {
    detail::validate_tri(s);
    const auto c = tri_coefficients(s.t1, s.t);
    if (tri_phase(s.t1, s.t) != TriPhase::disordered)
        throw PhaseError("asymptotic ratio needs the disordered phase");
    if (c.A == 0.0) throw DomainError("asymptotic ratio undefined at t = 0");
    AsymptoticRatio out;
    out.theta_bar = kInf;
    for (int p = 0; p < s.M; ++p) {
        if (2 * p == s.M) {
            out.excluded_rows.push_back(p);
            continue;
        }
        const double num = std::fabs(1.0 - c.B * std::cos(2 * kPi * p / s.M));
        const double den = std::fabs(2.0 * c.A * std::cos(kPi * p / s.M));
        out.theta_bar = std::min(out.theta_bar, acosh_stable(num / den));
    }
    CompensatedSum alt;
    for (int k = 0; k < 2 * s.M; ++k)
        alt.add((k % 2 ? 1.0 : -1.0) * tri_f(c, static_cast<double>(k) / (2 * s.M)));
    out.alternating = alt.value();
    out.log_value = kLn2 - s.N * (out.theta_bar + out.alternating);
    out.value = std::exp(out.log_value);
    return out;
}

struct HeatmapCell {
    double t1 = 0.0;
    double t = 0.0;
    double rho = 0.0;  // +inf on t = 0, NaN in the ordered phase
    double one_minus_exp_neg_rho = 0.0;
    double gap_ratio = 0.0;
    TriPhase phase = TriPhase::disordered;
    bool divergent = false;
};

/// Grid node i of n: (2i + 1 - n) / (n + 1). Symmetric about 0 and contains 0 for odd n.
inline double heatmap_coordinate(int i, int n) {
    return static_cast<double>(2 * i + 1 - n) / (n + 1);
}

/// Row-major n1 x n2 grid over (t1, t); t1 varies slowest.
inline std::vector<HeatmapCell> rho_heatmap(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw DomainError("heatmap resolution must be positive");
    std::vector<HeatmapCell> cells;
    cells.reserve(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            HeatmapCell cell;
            cell.t1 = heatmap_coordinate(i, n1);
            // integer numerators over one denominator: cells j and n2-1-j are exactly +-t
            cell.t = heatmap_coordinate(j, n2);
            cell.phase = tri_phase(cell.t1, cell.t);
            cell.gap_ratio = tri_gap_ratio(cell.t1, std::fabs(cell.t));
            if (cell.t == 0.0) {
                cell.divergent = true;
                cell.rho = kInf;
                cell.one_minus_exp_neg_rho = 1.0;
            } else if (cell.phase == TriPhase::ordered) {
                cell.rho = std::numeric_limits<double>::quiet_NaN();
                cell.one_minus_exp_neg_rho = std::numeric_limits<double>::quiet_NaN();
            } else {
                cell.rho = tri_rho(cell.t1, std::fabs(cell.t)).rho;
                cell.one_minus_exp_neg_rho = -std::expm1(-cell.rho);
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

inline void write_heatmap_csv(std::ostream& os, const std::vector<HeatmapCell>& cells) {
    os << "t1,t,rho,one_minus_exp_neg_rho,phase,gap_ratio\n";
    os.precision(17);
    for (const auto& c : cells) {
        os << c.t1 << ',' << c.t << ',';
        if (c.divergent) os << "inf";
        else if (std::isnan(c.rho)) os << "nan";
        else os << c.rho;
        os << ',';
        if (std::isnan(c.one_minus_exp_neg_rho)) os << "nan";
        else os << c.one_minus_exp_neg_rho;
        os << ',' << (c.divergent ? "divergent" : to_string(c.phase)) << ',';
        if (std::isinf(c.gap_ratio)) os << "inf";
        else os << c.gap_ratio;
        os << '\n';
    }
}

struct SlopeSample {
    double t1 = 0.0;
    double t = 0.0;
    double rho = 0.0;
    double drho_dt1 = 0.0;
    double B = 0.0;
};

/// rho and a central difference in t1 along a fixed-t slice, for locating the B = -1/3 kink.
inline std::vector<SlopeSample> rho_slope_probe(double t, const std::vector<double>& t1_values,
                                                double h = 1e-5) {
    std::vector<SlopeSample> out;
    for (double t1 : t1_values) {
        SlopeSample s;
        s.t1 = t1;
        s.t = t;
        s.B = tri_coefficients(t1, t).B;
        s.rho = tri_rho(t1, t).rho;
        s.drho_dt1 = (tri_rho(t1 + h, t).rho - tri_rho(t1 - h, t).rho) / (2 * h);
        out.push_back(s);
    }
    return out;
}

}  // namespace twistgap
