#pragma once

#include "twistgap/errors.hpp"
#include "twistgap/group.hpp"
#include "twistgap/numeric.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace twistgap {

// G x G principal chiral model on a periodic chain of L links.
//   Z   = sum_r d_r^2 F_r^L
//   Z^g = sum_r d_r chi_r(g) F_r^L

enum class SubgroupKind { trivial, cyclic, full };

struct TwistSubgroup {
    SubgroupKind kind = SubgroupKind::full;
    int order = 1;

    static TwistSubgroup trivial() { return {SubgroupKind::trivial, 1}; }
    static TwistSubgroup cyclic(int n) { return {SubgroupKind::cyclic, n}; }
    static TwistSubgroup full() { return {SubgroupKind::full, 0}; }
};

struct ChainSpec {
    GroupDescriptor group;
    TwistSubgroup subgroup;
    Action action;
    int L = 2;
    CharacterCoefficients coeffs;
};

inline void validate_subgroup(const GroupDescriptor& g, const TwistSubgroup& h) {
    if (h.kind != SubgroupKind::cyclic) return;
    if (h.order < 1) throw DomainError("subgroup order must be positive");
    switch (g.kind) {
        case GroupKind::cyclic:
            if (g.order % h.order != 0) throw DomainError("Z_n is a subgroup of Z_N only when n | N");
            break;
        case GroupKind::su2:
            if (h.order > 2) throw DomainError("only the center Z_2 is supported inside SU(2)");
            break;
        case GroupKind::u1: break;
    }
}

inline ChainSpec make_chain(const GroupDescriptor& g, const TwistSubgroup& h, const Action& a,
                            int L, const ExpandOptions& opt = {}) {
    if (L < 2) throw DomainError("chain length must be at least 2");
    validate_subgroup(g, h);
    return {g, h, a, L, expand_action(g, a, opt)};
}

// Class angles of the elements of a finite twist subgroup.
inline std::vector<double> subgroup_elements(const ChainSpec& s) {
    std::vector<double> out;
    switch (s.subgroup.kind) {
        case SubgroupKind::trivial: out.push_back(0.0); break;
        case SubgroupKind::cyclic:
            for (int k = 0; k < s.subgroup.order; ++k) {
                // -1 in SU(2) has class angle pi
                out.push_back(canonical_class_angle(s.group, 2.0 * kPi * k / s.subgroup.order));
            }
            break;
        case SubgroupKind::full: break;
    }
    return out;
}

// Haar average over G' of a class function.
inline std::complex<double> subgroup_average(const ChainSpec& s, const ClassFunction& f) {
    if (s.subgroup.kind == SubgroupKind::full) return class_integral(s.group, f, 1e-13);
    std::complex<double> acc = 0.0;
    const auto elems = subgroup_elements(s);
    for (double t : elems) acc += f(t);
    return acc / static_cast<double>(elems.size());
}

// 1 - avg_{G'} chi_r / d_r: 1 when r is nontrivial w.r.t. G', 0 when trivial on it.
inline double nontrivial_weight(const ChainSpec& s, const Irrep& r) {
    if (s.subgroup.kind == SubgroupKind::full) return r.is_trivial() ? 0.0 : 1.0;
    const auto avg = subgroup_average(s, [&](double t) { return character(s.group, r, t); });
    const double w = 1.0 - avg.real() / r.dimension;
    if (std::fabs(w) > 1e-12 && std::fabs(w - 1.0) > 1e-12)
        throw ConsistencyError("subgroup average of a character is neither 0 nor d_r");
    return std::round(w);
}

namespace detail {

template <class Weight>
SignedLog chain_sum(const ChainSpec& s, Weight&& w, long long power) {
    std::vector<SignedLog> terms;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        const double c = s.coeffs.c[i];
        const double wi = w(s.coeffs.irreps[i]);
        if (c == 0.0 || wi == 0.0) continue;
        const int sign = (c < 0 && power % 2 != 0) ? -1 : 1;
        terms.push_back(SignedLog::from_log(power * std::log(std::fabs(c)), sign) *
                        SignedLog::from_value(wi));
    }
    return signed_log_sum(terms);
}

}  // namespace detail

inline double chain_log_partition(const ChainSpec& s) {
    const auto rel = detail::chain_sum(
        s, [](const Irrep& r) { return double(r.dimension) * r.dimension; }, s.L);
    if (rel.sign <= 0) throw ConsistencyError("nonpositive chain partition function");
    return s.L * s.coeffs.log_F_trivial + rel.log_abs;
}

/// log Z^g for g given by its class angle.
inline SignedLog chain_log_twisted(const ChainSpec& s, double g_angle) {
    const auto rel = detail::chain_sum(
        s, [&](const Irrep& r) { return r.dimension * character(s.group, r, g_angle).real(); },
        s.L);
    return SignedLog::from_log(rel.log_abs + s.L * s.coeffs.log_F_trivial, rel.sign);
}

/// <O(g)> = Z^g / Z.
inline double wall_expectation(const ChainSpec& s, double g_angle) {
    const SignedLog z = SignedLog::from_log(chain_log_partition(s));
    const SignedLog zg = chain_log_twisted(s, g_angle);
    return zg.is_zero() ? 0.0 : zg.sign * std::exp(zg.log_abs - z.log_abs);
}

/// 1 - int_{G'} dg <O(g)> = sum' d^2 c^L / sum d^2 c^L.
inline double wall_projection(const ChainSpec& s) {
    auto d2 = [](const Irrep& r) { return double(r.dimension) * r.dimension; };
    const auto num = detail::chain_sum(
        s, [&](const Irrep& r) { return d2(r) * nontrivial_weight(s, r); }, s.L);
    const auto den = detail::chain_sum(s, d2, s.L);
    const double v = num.is_zero() ? 0.0 : num.sign * std::exp(num.log_abs - den.log_abs);
    if (v < -1e-12 || v > 1.0 + 1e-12) throw ConsistencyError("wall projection outside [0, 1]");
    return v;
}

/// Largest c_r among irreps nontrivial w.r.t. G'.
inline double leading_nontrivial_coefficient(const ChainSpec& s) {
    double best = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        if (nontrivial_weight(s, s.coeffs.irreps[i]) > 0.5)
            best = std::max(best, std::fabs(s.coeffs.c[i]));
    return best;
}

struct ChainCorrelation {
    double thermodynamic = 1.0;          // c_R^n
    std::optional<double> finite_volume; // abelian groups only
};

/// Normalized <Gamma(n)>/<Gamma(0)> for Gamma(n) = chi_R(g_0 g_n^{-1}).
inline ChainCorrelation chain_correlation(const ChainSpec& s, const Irrep& R, int n) {
    if (R.is_trivial()) throw DomainError("correlator needs an irrep nontrivial w.r.t. G");
    if (n < 0 || n > s.L) throw DomainError("separation must lie in [0, L]");
    ChainCorrelation out;
    out.thermodynamic = n == 0 ? 1.0 : std::pow(s.coeffs.c_of(R), n);
    if (!s.group.is_abelian()) return out;

    // sum_q c_q^n c_{q+R}^{L-n} / sum_q c_q^L; charges beyond the cutoff are dropped
    const auto& cc = s.coeffs;
    std::vector<SignedLog> num;
    for (std::size_t i = 0; i < cc.size(); ++i) {
        const Irrep shifted = make_irrep(s.group, cc.irreps[i].label + R.label);
        const int j = cc.index_of(shifted);
        if (j < 0) continue;
        const double a = cc.c[i], b = cc.c[j];
        if ((a == 0.0 && n > 0) || (b == 0.0 && n < s.L)) continue;
        const int sign = ((a < 0 && n % 2) ? -1 : 1) * ((b < 0 && (s.L - n) % 2) ? -1 : 1);
        const double la = n == 0 ? 0.0 : n * std::log(std::fabs(a));
        const double lb = n == s.L ? 0.0 : (s.L - n) * std::log(std::fabs(b));
        num.push_back(SignedLog::from_log(la + lb, sign));
    }
    const auto nsum = signed_log_sum(num);
    const auto den = detail::chain_sum(s, [](const Irrep&) { return 1.0; }, s.L);
    out.finite_volume = nsum.is_zero() ? 0.0 : nsum.sign * std::exp(nsum.log_abs - den.log_abs);
    return out;
}

struct SpinBoundReport {
    int n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double prefactor = 1.0;       // <Gamma(0)^2> / <Gamma(0)>^2
    bool finite_volume_lhs = false;
    bool theorem_regime = false;  // L = 2^k n, k >= 1
    bool nontrivial_on_subgroup = false;
    bool ok = false;
};

inline SpinBoundReport check_spin_ty_bound(const ChainSpec& s, const Irrep& R, int n) {
    const auto corr = chain_correlation(s, R, n);
    SpinBoundReport rep;
    rep.n = n;
    rep.finite_volume_lhs = corr.finite_volume.has_value();
    rep.lhs = std::fabs(corr.finite_volume.value_or(corr.thermodynamic));
    // Gamma(0) = chi_R(1) = d_R on every configuration
    const double g0 = R.dimension;
    rep.prefactor = (g0 * g0) / (g0 * g0);
    const double wall = wall_projection(s);
    const double e = static_cast<double>(n) / s.L;
    rep.rhs = 2.0 * std::pow(rep.prefactor, e) * (wall > 0 ? std::pow(wall, e) : 0.0);
    rep.theorem_regime = is_power_of_two_multiple(s.L, n);
    rep.nontrivial_on_subgroup = nontrivial_weight(s, R) > 0.5;
    // at n = L/2 the bound saturates up to c^L, below double resolution
    rep.ok = rep.lhs <= rep.rhs * (1.0 + 1e-13);
    return rep;
}

using Su2Matrix = std::array<std::complex<double>, 4>;  // row major

/// Class angle of an SU(2) matrix: tr U = 2 cos theta.
inline double su2_class_angle(const Su2Matrix& u) {
    const double half_trace = 0.5 * (u[0] + u[3]).real();
    return std::acos(std::clamp(half_trace, -1.0, 1.0));
}

}  // namespace twistgap
