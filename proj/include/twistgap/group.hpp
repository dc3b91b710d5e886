#pragma once

// Compact-group machinery: class-parameter quadrature, irreducible characters
// and character coefficients of exponentiated one-variable actions.
//
// Class parameters:
//   Z_N   theta_k = 2 pi k / N, uniform weight 1/N
//   U(1)  theta in [0, 2pi), weight 1/(2pi)
//   SU(2) theta in [0, pi], U ~ diag(e^{i theta}, e^{-i theta}), weight (2/pi) sin^2 theta

#include "twistgap/errors.hpp"
#include "twistgap/numeric.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace twistgap {

enum class GroupKind { cyclic, u1, su2 };

struct GroupDescriptor {
    GroupKind kind = GroupKind::u1;
    int order = 0;  // N for Z_N, 0 otherwise

    static GroupDescriptor cyclic(int n) {
        if (n < 2) throw DomainError("Z_N requires N >= 2");
        return {GroupKind::cyclic, n};
    }
    static GroupDescriptor u1() { return {GroupKind::u1, 0}; }
    static GroupDescriptor su2() { return {GroupKind::su2, 0}; }

    bool is_abelian() const { return kind != GroupKind::su2; }
    bool is_finite() const { return kind == GroupKind::cyclic; }

    /// Order of the center sectors used for twists; 0 marks the continuous U(1) case.
    int center_order() const {
        switch (kind) {
            case GroupKind::cyclic: return order;
            case GroupKind::su2: return 2;
            case GroupKind::u1: return 0;
        }
        return 0;
    }

    std::string name() const {
        switch (kind) {
            case GroupKind::cyclic: return "Z" + std::to_string(order);
            case GroupKind::su2: return "SU(2)";
            case GroupKind::u1: return "U(1)";
        }
        return "?";
    }
};

/// Irrep label: the charge q for U(1), q mod N for Z_N, and 2j for SU(2).
struct Irrep {
    int label = 0;
    int dimension = 1;
    int n_ality = 0;  // charge itself for U(1), q mod N for Z_N, 2j mod 2 for SU(2)

    bool is_trivial() const { return label == 0; }
    bool operator==(const Irrep&) const = default;
};

inline Irrep make_irrep(const GroupDescriptor& g, int label) {
    switch (g.kind) {
        case GroupKind::cyclic: {
            const int q = ((label % g.order) + g.order) % g.order;
            return {q, 1, q};
        }
        case GroupKind::u1:
            return {label, 1, label};
        case GroupKind::su2:
            if (label < 0) throw DomainError("SU(2) spin must be non-negative");
            return {label, label + 1, label % 2};
    }
    throw DomainError("unknown group");
}

inline Irrep su2_spin(double j) {
    const int two_j = static_cast<int>(std::lround(2.0 * j));
    if (two_j < 0 || std::fabs(2.0 * j - two_j) > 1e-12)
        throw DomainError("spin must be a non-negative half-integer");
    return make_irrep(GroupDescriptor::su2(), two_j);
}

inline Irrep conjugate(const GroupDescriptor& g, const Irrep& r) {
    switch (g.kind) {
        case GroupKind::cyclic: return make_irrep(g, g.order - r.label);
        case GroupKind::u1: return make_irrep(g, -r.label);
        case GroupKind::su2: return r;
    }
    return r;
}

/// Irreps appearing in a (x) b, each once (SU(2) and abelian fusion is multiplicity free).
inline std::vector<Irrep> fusion_channels(const GroupDescriptor& g, const Irrep& a, const Irrep& b) {
    if (g.kind != GroupKind::su2) return {make_irrep(g, a.label + b.label)};
    std::vector<Irrep> out;
    for (int l = std::abs(a.label - b.label); l <= a.label + b.label; l += 2) out.push_back(make_irrep(g, l));
    return out;
}

/// Irreps in enumeration order: by |charge| for abelian groups, by j for SU(2).
/// For Z_N all N irreps are returned regardless of cutoff.
inline std::vector<Irrep> enumerate_irreps(const GroupDescriptor& g, int cutoff) {
    std::vector<Irrep> out;
    switch (g.kind) {
        case GroupKind::cyclic:
            out.push_back(make_irrep(g, 0));
            for (int q = 1; 2 * q <= g.order; ++q) {
                out.push_back(make_irrep(g, q));
                if (2 * q != g.order) out.push_back(make_irrep(g, -q));
            }
            break;
        case GroupKind::u1:
            out.push_back(make_irrep(g, 0));
            for (int q = 1; q <= cutoff; ++q) {
                out.push_back(make_irrep(g, q));
                out.push_back(make_irrep(g, -q));
            }
            break;
        case GroupKind::su2:
            for (int l = 0; l <= cutoff; ++l) out.push_back(make_irrep(g, l));
            break;
    }
    return out;
}

/// SU(2) character U_{2j}(cos theta) by the Chebyshev recurrence; no 0/0 at the poles.
inline double su2_character(int two_j, double theta) {
    const double x = std::cos(theta);
    double u_prev = 1.0, u = 2.0 * x;
    if (two_j == 0) return 1.0;
    for (int n = 2; n <= two_j; ++n) {
        const double next = 2.0 * x * u - u_prev;
        u_prev = u;
        u = next;
    }
    return u;
}

inline std::complex<double> character(const GroupDescriptor& g, const Irrep& r, double theta) {
    if (g.kind == GroupKind::su2) return su2_character(r.label, theta);
    const double a = r.label * theta;
    return {std::cos(a), std::sin(a)};
}

inline Irrep fundamental(const GroupDescriptor& g) { return make_irrep(g, 1); }

/// Fold an arbitrary angle into the class domain of g.
inline double canonical_class_angle(const GroupDescriptor& g, double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    if (g.kind == GroupKind::su2 && t > kPi) t = 2.0 * kPi - t;
    return t;
}

using ClassFunction = std::function<std::complex<double>(double)>;

struct QuadratureOptions {
    int min_nodes = 512;  // above twice the highest charge the expansions reach
    int max_nodes = 1 << 20;
};

struct QuadratureResult {
    std::complex<double> value;
    double error_estimate = 0.0;
    int nodes = 0;
};

namespace detail {

// Periodic trapezoid on [0, 2pi); doubles until successive refinements agree within tol.
inline QuadratureResult periodic_trapezoid(const std::function<std::complex<double>(double)>& h,
                                           double tol, const QuadratureOptions& opt) {
    int n = std::max(4, opt.min_nodes);
    auto rule = [&](int nodes) {
        std::complex<double> s = 0.0;
        for (int i = 0; i < nodes; ++i) s += h(2.0 * kPi * i / nodes);
        return s / static_cast<double>(nodes);
    };
    std::complex<double> prev = rule(n);
    int agreements = 0;  // two in a row guards against coincidental aliasing
    for (;;) {
        if (2 * n > opt.max_nodes)
            throw QuadratureFailure("class quadrature did not converge within node budget",
                                    prev.real(), kInf);
        // reuse the previous nodes: new rule = (old + midpoints) / 2
        std::complex<double> mid = 0.0;
        for (int i = 0; i < n; ++i) mid += h(2.0 * kPi * (i + 0.5) / n);
        const std::complex<double> cur = 0.5 * (prev + mid / static_cast<double>(n));
        n *= 2;
        const double err = std::abs(cur - prev);
        agreements = err <= tol ? agreements + 1 : 0;
        if (agreements >= 2) return {cur, err, n};
        prev = cur;
    }
}

}  // namespace detail

/// Haar integral of a class function. Exact for Z_N, spectrally accurate trapezoid otherwise.
inline QuadratureResult class_integral_detailed(const GroupDescriptor& g, const ClassFunction& f,
                                                double tol = 1e-12,
                                                const QuadratureOptions& opt = {}) {
    if (!(tol > 0)) throw DomainError("quadrature tolerance must be positive");
    switch (g.kind) {
        case GroupKind::cyclic: {
            std::complex<double> s = 0.0;
            for (int k = 0; k < g.order; ++k) s += f(2.0 * kPi * k / g.order);
            return {s / static_cast<double>(g.order), 0.0, g.order};
        }
        case GroupKind::u1:
            return detail::periodic_trapezoid(f, tol, opt);
        case GroupKind::su2:
            // (2/pi) int_0^pi sin^2 f = (1/pi) int_0^{2pi} sin^2 f, f(2pi - t) = f(t)
            return detail::periodic_trapezoid(
                [&](double t) {
                    const double s = std::sin(t);
                    return 2.0 * s * s * f(canonical_class_angle(g, t));
                },
                tol, opt);
    }
    throw DomainError("unknown group");
}

inline std::complex<double> class_integral(const GroupDescriptor& g, const ClassFunction& f,
                                           double tol = 1e-12) {
    return class_integral_detailed(g, f, tol).value;
}

enum class ActionKind { wilson, adjoint, custom };

/// One-variable action; the Boltzmann weight is exp(log_weight(theta)).
///   wilson   beta Re chi_f / d_f        (beta cos theta for U(1) and SU(2))
///   adjoint  beta |chi_f|^2 / d_f^2     (center invariant)
///   custom   user callback
struct Action {
    ActionKind kind = ActionKind::wilson;
    double beta = 0.0;
    std::function<double(double)> custom_log_weight;

    static Action wilson(double beta) { return {ActionKind::wilson, beta, {}}; }
    static Action adjoint(double beta) { return {ActionKind::adjoint, beta, {}}; }
    static Action custom(double beta, std::function<double(double)> lw) {
        return {ActionKind::custom, beta, std::move(lw)};
    }

    double log_weight(const GroupDescriptor& g, double theta) const {
        const Irrep f = fundamental(g);
        const std::complex<double> chi = character(g, f, theta);
        const double d = f.dimension;
        switch (kind) {
            case ActionKind::wilson: return beta * chi.real() / d;
            case ActionKind::adjoint: return beta * std::norm(chi) / (d * d);
            case ActionKind::custom: return custom_log_weight(theta);
        }
        return 0.0;
    }

    /// Upper bound on log_weight used to keep exponentials in range.
    double log_weight_shift() const {
        return kind == ActionKind::custom ? 0.0 : std::fabs(beta);
    }
};

/// F_r = (1/d_r) int dU e^{-S(U)} conj chi_r(U).
inline double character_coefficient(const GroupDescriptor& g, const Action& a, const Irrep& r,
                                    double tol = 1e-12) {
    const double shift = a.log_weight_shift();
    const auto res = class_integral_detailed(
        g,
        [&](double t) {
            return std::exp(a.log_weight(g, t) - shift) * std::conj(character(g, r, t));
        },
        tol * std::exp(-shift));
    return std::exp(shift) * res.value.real() / r.dimension;
}

struct CharacterCoefficients {
    GroupDescriptor group;
    double beta = 0.0;
    int cutoff = 0;
    std::vector<Irrep> irreps;  // enumeration order, trivial first
    std::vector<double> F;
    std::vector<double> c;      // F / F_T, computed without forming F_T^{-1} overflow
    double log_F_trivial = 0.0;
    double tail_bound = 0.0;

    std::size_t size() const { return irreps.size(); }

    int index_of(const Irrep& r) const {
        for (std::size_t i = 0; i < irreps.size(); ++i)
            if (irreps[i].label == r.label) return static_cast<int>(i);
        return -1;
    }
    double c_of(const Irrep& r) const {
        const int i = index_of(r);
        if (i < 0) throw TruncationError("irrep beyond expansion cutoff", std::abs(r.label));
        return c[i];
    }
    double F_of(const Irrep& r) const {
        const int i = index_of(r);
        if (i < 0) throw TruncationError("irrep beyond expansion cutoff", std::abs(r.label));
        return F[i];
    }
};

struct ExpandOptions {
    int cutoff = 64;
    double tol = 1e-13;       // tail tolerance on normalized coefficients
    double quad_tol = 1e-15;  // convergence of the shared quadrature
};

/// Character expansion of exp(-S) up to cutoff, all coefficients from one shared node set.
inline CharacterCoefficients expand_action(const GroupDescriptor& g, const Action& a,
                                           const ExpandOptions& opt = {}) {
    if (opt.cutoff < 1) throw DomainError("expansion cutoff must be >= 1");
    CharacterCoefficients out;
    out.group = g;
    out.beta = a.beta;
    out.cutoff = opt.cutoff;
    out.irreps = enumerate_irreps(g, opt.cutoff);
    const std::size_t n_irr = out.irreps.size();
    const double shift = a.log_weight_shift();

    // Scaled coefficients f_r = e^{-shift} d_r F_r on a node set of size n.
    auto coefficients_at = [&](int n) {
        std::vector<double> f(n_irr, 0.0);
        const bool finite = g.is_finite();
        const int nodes = finite ? g.order : n;
        for (int i = 0; i < nodes; ++i) {
            const double theta = 2.0 * kPi * i / nodes;
            double w = std::exp(a.log_weight(g, canonical_class_angle(g, theta)) - shift);
            if (g.kind == GroupKind::su2) {
                const double s = std::sin(theta);
                w *= 2.0 * s * s;
            }
            for (std::size_t k = 0; k < n_irr; ++k)
                f[k] += w * std::conj(character(g, out.irreps[k], theta)).real();
        }
        for (double& v : f) v /= nodes;
        return f;
    };

    std::vector<double> f;
    if (g.is_finite()) {
        f = coefficients_at(g.order);
    } else {
        int n = 4 * opt.cutoff + 64;
        std::vector<double> prev = coefficients_at(n);
        double prev_err = kInf;
        for (;;) {
            n *= 2;
            if (n > (1 << 22))
                throw QuadratureFailure("character expansion quadrature did not converge",
                                        prev[0], kInf);
            f = coefficients_at(n);
            double err = 0.0;
            for (std::size_t k = 0; k < n_irr; ++k) err = std::max(err, std::fabs(f[k] - prev[k]));
            const double scale = std::max(1.0, std::fabs(f[0]));
            if (err <= opt.quad_tol * scale) break;
            // refinements stopped improving at the rounding floor: the rule has converged
            if (err <= 1e-12 * scale && err > 0.5 * prev_err) break;
            prev_err = err;
            prev = std::move(f);
        }
    }

    if (!(f[0] > 0.0)) throw DomainError("trivial coefficient must be positive");
    out.F.resize(n_irr);
    out.c.resize(n_irr);
    for (std::size_t k = 0; k < n_irr; ++k) {
        const double d = out.irreps[k].dimension;
        out.F[k] = std::exp(shift) * f[k] / d;
        out.c[k] = (f[k] / d) / f[0];
    }
    out.c[0] = 1.0;
    out.log_F_trivial = shift + std::log(f[0]);

    // A center-invariant action couples only to zero N-ality; enforce the
    // selection rule exactly instead of trusting quadrature noise.
    if (a.kind == ActionKind::adjoint)
        for (std::size_t k = 0; k < n_irr; ++k)
            if (out.irreps[k].n_ality != 0) out.F[k] = out.c[k] = 0.0;
    // A constant weight is orthogonal to every nontrivial character.
    if (a.kind != ActionKind::custom && a.beta == 0.0)
        for (std::size_t k = 1; k < n_irr; ++k) out.F[k] = out.c[k] = 0.0;

    if (!g.is_finite()) {
        // tail = last |c| times a geometric extrapolation of the decay
        const std::size_t last = n_irr - 1;
        const std::size_t step = g.kind == GroupKind::u1 ? 2 : 1;
        const double c_last = std::fabs(out.c[last]);
        const double c_prev = std::fabs(out.c[last - step]);
        const double floor = 1e-15;
        if (std::max(c_last, c_prev) <= floor) {
            out.tail_bound = floor;
        } else {
            const double q = c_prev > 0 ? c_last / c_prev : 1.0;
            out.tail_bound = q < 1.0 ? c_last * q / (1.0 - q) : kInf;
            if (out.tail_bound > opt.tol) {
                int suggest = 0;
                if (q < 1.0 && q > 0.0)
                    suggest = opt.cutoff +
                              static_cast<int>(std::ceil(std::log(opt.tol / c_last) / std::log(q))) + 1;
                throw TruncationError("character expansion tail exceeds tolerance at cutoff " +
                                          std::to_string(opt.cutoff),
                                      suggest);
            }
        }
    }
    return out;
}

}  // namespace twistgap
