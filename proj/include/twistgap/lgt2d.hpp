#pragma once

// Exact 2D lattice gauge theory on a periodic L1 x L2 torus.
//
// With V = L1 L2 plaquettes every sector sum collapses to a single character sum,
//   Z      = sum_r F_r^V
//   Z^[k]  = sum_r F_r^V Re z^{k N(r)},   z = e^{2 pi i / N}
// and all of it is evaluated relative to the trivial term F_T^V.

#include "twistgap/errors.hpp"
#include "twistgap/group.hpp"
#include "twistgap/numeric.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace twistgap {

struct Lgt2dSpec {
    GroupDescriptor group;
    Action action;
    int L1 = 1;
    int L2 = 1;
    CharacterCoefficients coeffs;

    long long volume() const { return static_cast<long long>(L1) * L2; }
    double beta() const { return action.beta; }
};

inline Lgt2dSpec make_lgt2d(const GroupDescriptor& g, const Action& a, int L1, int L2,
                            const ExpandOptions& opt = {}) {
    if (L1 < 1 || L2 < 1) throw DomainError("lattice sides must be positive");
    return {g, a, L1, L2, expand_action(g, a, opt)};
}

namespace detail {

// c_r^V as a signed log; negative c only survives for odd V.
inline SignedLog coefficient_power(double c, long long V) {
    if (c == 0.0) return {};
    const int sign = (c < 0 && (V % 2 != 0)) ? -1 : 1;
    return SignedLog::from_log(static_cast<double>(V) * std::log(std::fabs(c)), sign);
}

// sum_r w_r c_r^V over the retained irreps, as a signed log.
template <class Weight>
SignedLog weighted_power_sum(const Lgt2dSpec& s, Weight&& w) {
    std::vector<SignedLog> terms;
    terms.reserve(s.coeffs.size());
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        const double wi = w(s.coeffs.irreps[i]);
        if (wi == 0.0) continue;
        terms.push_back(coefficient_power(s.coeffs.c[i], s.volume()) * SignedLog::from_value(wi));
    }
    return signed_log_sum(terms);
}

}  // namespace detail

/// log Z = V log F_T + log(1 + sum_{r != T} c_r^V).
inline double log_partition_function(const Lgt2dSpec& s) {
    const SignedLog rel = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; });
    if (rel.sign <= 0) throw ConsistencyError("nonpositive partition function: truncation fault");
    return static_cast<double>(s.volume()) * s.coeffs.log_F_trivial + rel.log_abs;
}

/// Z with the plaquette twist e^{i theta}: theta = 2 pi k / N for center sectors,
/// any angle for U(1). Returned signed since nothing forces Z^[k] > 0 off the Wilson action.
inline SignedLog log_twisted_partition_angle(const Lgt2dSpec& s, double theta) {
    // imaginary parts cancel pairwise through F_r = F_rbar
    const SignedLog im = detail::weighted_power_sum(
        s, [&](const Irrep& r) { return std::sin(theta * r.n_ality); });
    const SignedLog re = detail::weighted_power_sum(
        s, [&](const Irrep& r) { return std::cos(theta * r.n_ality); });
    const SignedLog total = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; });
    if (!im.is_zero() && im.log_abs - total.log_abs > std::log(1e-12))
        throw ConsistencyError("twisted partition function has a non-cancelling imaginary part");
    const double shift = static_cast<double>(s.volume()) * s.coeffs.log_F_trivial;
    return SignedLog::from_log(re.log_abs + shift, re.sign);
}

inline SignedLog log_twisted_partition_function(const Lgt2dSpec& s, int k) {
    const int n = s.group.center_order();
    if (n == 0) throw DomainError("U(1) twists are labelled by an angle, not a sector index");
    if (k < 0 || k >= n) throw DomainError("twist sector out of range");
    if (k == 0) return SignedLog::from_log(log_partition_function(s));
    return log_twisted_partition_angle(s, 2.0 * kPi * k / n);
}

/// <O^[k]> = Z^[k] / Z, computed from relative sums.
inline double vortex_expectation_angle(const Lgt2dSpec& s, double theta) {
    const SignedLog num = detail::weighted_power_sum(
        s, [&](const Irrep& r) { return std::cos(theta * r.n_ality); });
    const SignedLog den = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; });
    return num.sign * std::exp(num.log_abs - den.log_abs);
}

/// Direct charge/N-ality projection: sum_{N(r) = m} c^V / sum_r c^V.
inline double flux_projection(const Lgt2dSpec& s, int m) {
    const int n = s.group.center_order();
    auto in_class = [&](const Irrep& r) {
        if (n == 0) return r.n_ality == m;
        return ((r.n_ality - m) % n + n) % n == 0;
    };
    const SignedLog num =
        detail::weighted_power_sum(s, [&](const Irrep& r) { return in_class(r) ? 1.0 : 0.0; });
    const SignedLog den = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; });
    return num.is_zero() ? 0.0 : num.sign * std::exp(num.log_abs - den.log_abs);
}

/// log(1 - <F^[0]>) without cancellation; -inf when it vanishes exactly.
inline double log_one_minus_flux0(const Lgt2dSpec& s) {
    const SignedLog num = detail::weighted_power_sum(
        s, [](const Irrep& r) { return r.n_ality != 0 ? 1.0 : 0.0; });
    const SignedLog den = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; });
    if (num.sign < 0) throw ConsistencyError("1 - <F0> came out negative");
    return num.is_zero() ? kNegInf : num.log_abs - den.log_abs;
}

struct SectorTable {
    int n_sectors = 0;              // N, or the theta grid size for U(1)
    bool continuous = false;        // U(1): sectors are angles
    double log_Z = 0.0;
    std::vector<double> angles;     // twist angle of each sector
    std::vector<SignedLog> log_Zk;
    std::vector<double> vortex;     // <O^[k]>
    std::vector<int> flux_labels;   // m
    std::vector<double> flux;       // <F^[m]> via the Fourier sum over sectors
    std::vector<double> flux_direct;  // <F^[m]> via the direct projection
};

struct SectorOptions {
    int u1_angle_nodes = 1 << 10;
    int u1_max_charge = 8;  // flux labels -m..m reported for U(1)
    double tolerance = 1e-12;
};

/// Sector table with invariants enforced; violations signal truncation or quadrature faults.
inline SectorTable sector_table(const Lgt2dSpec& s, const SectorOptions& opt = {}) {
    SectorTable t;
    t.log_Z = log_partition_function(s);
    const int n = s.group.center_order();
    t.continuous = n == 0;
    t.n_sectors = t.continuous ? opt.u1_angle_nodes : n;
    for (int k = 0; k < t.n_sectors; ++k) {
        const double theta = 2.0 * kPi * k / t.n_sectors;
        t.angles.push_back(theta);
        if (k == 0) {
            t.log_Zk.push_back(SignedLog::from_log(t.log_Z));
            t.vortex.push_back(1.0);
        } else {
            t.log_Zk.push_back(log_twisted_partition_angle(s, theta));
            t.vortex.push_back(vortex_expectation_angle(s, theta));
        }
    }
    if (t.continuous) {
        for (int m = -opt.u1_max_charge; m <= opt.u1_max_charge; ++m) t.flux_labels.push_back(m);
    } else {
        for (int m = 0; m < n; ++m) t.flux_labels.push_back(m);
    }
    for (int m : t.flux_labels) {
        // (1/N) sum_k z^{mk} <O^[k]>, or the trapezoid over theta for U(1)
        std::complex<double> acc = 0.0;
        for (int k = 0; k < t.n_sectors; ++k)
            acc += std::polar(1.0, m * t.angles[k]) * t.vortex[k];
        acc /= static_cast<double>(t.n_sectors);
        if (std::fabs(acc.imag()) > 1e-12)
            throw ConsistencyError("flux expectation has an imaginary part");
        t.flux.push_back(acc.real());
        t.flux_direct.push_back(flux_projection(s, m));
    }

    const double tol = opt.tolerance;
    for (double v : t.vortex)
        if (v < -tol || v > 1.0 + tol)
            throw ConsistencyError("vortex expectation outside [0, 1]");
    double sum = 0.0;
    for (double f : t.flux) {
        if (f < -tol || f > 1.0 + tol) throw ConsistencyError("flux expectation outside [0, 1]");
        sum += f;
    }
    // for U(1) only the reported window of charges enters the sum
    if (!t.continuous && std::fabs(sum - 1.0) > 1e-10)
        throw ConsistencyError("flux expectations do not sum to one");
    return t;
}

/// <F^[l] F^[m]> from sector sums, using that two twists on one torus add: O^k O^k' = O^{k+k'}.
/// Equals delta_lm <F^[l]> when the projector algebra holds.
inline double flux_product(const Lgt2dSpec& s, int l, int m) {
    const int n = s.group.center_order();
    if (n == 0) throw DomainError("flux products need a finite center");
    std::vector<double> o(n);
    for (int k = 0; k < n; ++k) o[k] = k == 0 ? 1.0 : vortex_expectation_angle(s, 2.0 * kPi * k / n);
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k)
        for (int kk = 0; kk < n; ++kk)
            acc += std::polar(1.0, 2.0 * kPi * (l * k + m * kk) / n) * o[(k + kk) % n];
    return acc.real() / (static_cast<double>(n) * n);
}

/// <W_R(C)> = c_Rbar^A.
inline double wilson_loop_exact(const Lgt2dSpec& s, const Irrep& R, long long area) {
    if (area < 0 || area > s.volume()) throw DomainError("loop area must lie in [0, L1 L2]");
    if (area == 0) return 1.0;
    const double c = s.coeffs.c_of(conjugate(s.group, R));
    return std::pow(c, static_cast<double>(area));
}

/// <chi_R(C)>/d_R on the finite torus for a contractible loop enclosing `area` plaquettes:
///   sum_s sum_{r in s (x) R} (d_s / d_r) c_s^A c_r^{V-A} / (d_R sum_r c_r^V).
/// Tends to c_R^A as V - A grows.
inline double wilson_loop_torus(const Lgt2dSpec& s, const Irrep& R, long long area) {
    if (area < 0 || area > s.volume()) throw DomainError("loop area must lie in [0, L1 L2]");
    const auto& cc = s.coeffs;
    const long long rest = s.volume() - area;
    std::vector<SignedLog> num;
    for (std::size_t i = 0; i < cc.size(); ++i) {
        const Irrep& si = cc.irreps[i];
        const SignedLog inner = area == 0 ? SignedLog::from_value(1.0) : detail::coefficient_power(cc.c[i], area);
        if (inner.is_zero()) continue;
        for (const Irrep& r : fusion_channels(s.group, si, R)) {
            const int j = cc.index_of(r);
            if (j < 0) continue;  // beyond the cutoff: weight below the tail bound
            const SignedLog outer = rest == 0 ? SignedLog::from_value(1.0) : detail::coefficient_power(cc.c[j], rest);
            num.push_back(inner * outer * SignedLog::from_value(double(si.dimension) / r.dimension));
        }
    }
    const SignedLog n = signed_log_sum(num);
    const SignedLog d = detail::weighted_power_sum(s, [](const Irrep&) { return 1.0; }) *
                        SignedLog::from_value(R.dimension);
    return n.is_zero() ? 0.0 : n.sign * d.sign * std::exp(n.log_abs - d.log_abs);
}

struct TyBoundRow {
    long long area = 0;
    double lhs = 0.0;  // |<W_R>| = |c_R|^A
    double rhs = 0.0;  // 2 (1 - <F^[0]>)^{A/V}
    bool ok = false;
    double lhs_torus = 0.0;  // |<W_R>| on the finite torus
    bool ok_torus = false;
    bool theorem_regime = false;  // V / A a power of two
};

/// Areas whose loop doubles onto the full torus in p >= 1 steps: V = 2^p A.
inline bool area_in_theorem_regime(long long area, long long volume) {
    return area > 0 && is_power_of_two_multiple(volume, area);
}

inline std::vector<TyBoundRow> check_ty_bound(const Lgt2dSpec& s, const Irrep& R,
                                              const std::vector<long long>& areas) {
    if (R.n_ality == 0)
        throw DomainError("the center-sector bound needs an irrep of nonzero N-ality");
    const double log_gap = log_one_minus_flux0(s);
    const double V = static_cast<double>(s.volume());
    std::vector<TyBoundRow> rows;
    for (long long a : areas) {
        TyBoundRow row;
        row.area = a;
        row.lhs = std::fabs(wilson_loop_exact(s, R, a));
        row.rhs = log_gap == kNegInf ? 0.0 : 2.0 * std::exp(log_gap * a / V);
        row.ok = row.lhs <= row.rhs;
        row.lhs_torus = std::fabs(wilson_loop_torus(s, R, a));
        row.ok_torus = row.lhs_torus <= row.rhs;
        row.theorem_regime = area_in_theorem_regime(a, s.volume());
        rows.push_back(row);
    }
    return rows;
}

/// Largest |c_r| over irreps of nonzero N-ality: the thermodynamic decay rate of 1 - <F0>.
inline double leading_nonzero_nality_coefficient(const Lgt2dSpec& s) {
    double best = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        if (s.coeffs.irreps[i].n_ality != 0) best = std::max(best, std::fabs(s.coeffs.c[i]));
    return best;
}

}  // namespace twistgap
