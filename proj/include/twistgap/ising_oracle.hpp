#pragma once

// Ground-truth Ising engines: exhaustive enumeration and strip transfer matrices.
//
// Site (x, y) with x in [0, L1) the column and y in [0, L2) the height has index
// x * L2 + y. Bonds are identified by their origin site and a direction:
//   square      dir 0: (x,y)-(x+1,y) coupling a,   dir 1: (x,y)-(x,y+1) coupling b
//   triangular  dir 0: (x,y)-(x,y+1) coupling J1,  dir 1: (x,y)-(x+1,y) J,
//               dir 2: (x,y)-(x+1,y-1) J
//
// Triangular embedding: column x+1 sits half a spacing above column x, so the
// height of (x, y) is y + x/2 and the sites level with (0, 0) are (n, -n/2).
// tri_helical closes the columns with (x+L1, y) ~ (x, y + L1/2), which turns every
// horizontal line into a closed loop of L1 sites; tri_straight is the plain torus.
//
//        y+1 o
//            | \            J1 vertical, J to the right and down-right
//          y o---o (x+1,y)
//              \
//                o (x+1,y-1)
//
// A wall at column c flips every bond crossing from column c to c+1.

#include "twistgap/errors.hpp"
#include "twistgap/numeric.hpp"
#include "twistgap/partition_pair.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <thread>
#include <utility>
#include <vector>

namespace twistgap {

enum class LatticeKind { square, tri_helical, tri_straight };

inline std::string to_string(LatticeKind k) {
    switch (k) {
        case LatticeKind::square: return "square";
        case LatticeKind::tri_helical: return "triangular-helical";
        case LatticeKind::tri_straight: return "triangular-straight";
    }
    return "?";
}

struct Bond {
    int i = 0;
    int j = 0;
    double K = 0.0;
    int dir = 0;
};

class SpinLattice {
public:
    static SpinLattice square(int L1, int L2, double a, double b) {
        SpinLattice s(LatticeKind::square, L1, L2);
        s.couplings_ = {a, b};
        s.build();
        return s;
    }

    /// N columns of M sites; couplings J1 (vertical) and J.
    static SpinLattice triangular(int N, int M, double J1, double J, bool helical = true) {
        if (helical && N % 2 != 0) throw DomainError("the helical seam needs an even column count");
        SpinLattice s(helical ? LatticeKind::tri_helical : LatticeKind::tri_straight, N, M);
        s.couplings_ = {J1, J};
        s.build();
        return s;
    }

    static SpinLattice triangular_t(int N, int M, double t1, double t, bool helical = true) {
        return triangular(N, M, std::atanh(t1), std::atanh(t), helical);
    }

    LatticeKind kind() const { return kind_; }
    int L1() const { return L1_; }
    int L2() const { return L2_; }
    int sites() const { return L1_ * L2_; }
    bool is_square() const { return kind_ == LatticeKind::square; }
    int directions() const { return is_square() ? 2 : 3; }
    const std::vector<Bond>& bonds() const { return bonds_; }
    const std::vector<char>& mask() const { return mask_; }
    const std::vector<int>& walls() const { return walls_; }
    bool deformed() const { return deformed_; }
    std::pair<double, double> couplings() const { return couplings_; }

    int site(int x, int y) const { return x * L2_ + y; }
    int bond_id(int x, int y, int dir) const { return site(x, y) * directions() + dir; }

    /// Canonical coordinates of (x, y) after the periodic identifications.
    std::pair<int, int> wrap(int x, int y) const {
        int shift = 0;
        while (x >= L1_) {
            x -= L1_;
            if (kind_ == LatticeKind::tri_helical) shift += L1_ / 2;
        }
        while (x < 0) {
            x += L1_;
            if (kind_ == LatticeKind::tri_helical) shift -= L1_ / 2;
        }
        y = ((y + shift) % L2_ + L2_) % L2_;
        return {x, y};
    }

    /// Flip the bonds crossing from column c to c+1. Repeating a column cancels it.
    SpinLattice& add_wall(int column) {
        if (column < 0 || column >= L1_) throw DomainError("wall column out of range");
        walls_.push_back(column);
        for (int y = 0; y < L2_; ++y) {
            if (is_square()) {
                mask_[bond_id(column, y, 0)] ^= 1;
            } else {
                mask_[bond_id(column, y, 1)] ^= 1;
                mask_[bond_id(column, y, 2)] ^= 1;
            }
        }
        return *this;
    }

    SpinLattice with_walls(const std::vector<int>& columns) const {
        SpinLattice s = *this;
        for (int c : columns) s.add_wall(c);
        return s;
    }

    /// Gauge-deform the wall by the change of variables sigma_site -> -sigma_site.
    SpinLattice& deform_wall(int site_index) {
        for (std::size_t b = 0; b < bonds_.size(); ++b) {
            if (bonds_[b].i == site_index) mask_[b] ^= 1;
            if (bonds_[b].j == site_index) mask_[b] ^= 1;
        }
        deformed_ = true;
        return *this;
    }

    /// Number of walls modulo 2, read off as the Z_2 holonomy along a level line.
    int wall_parity() const {
        int flips = 0, x = 0, y = 0;
        for (int step = 0; step < L1_; ++step) {
            // the triangular walk alternates right and down-right to stay level
            const int dir = is_square() ? 0 : (step % 2 == 0 ? 1 : 2);
            flips += mask_[bond_id(x, y, dir)];
            const auto nxt = wrap(x + 1, dir == 2 ? y - 1 : y);
            x = nxt.first;
            y = nxt.second;
        }
        return flips % 2;
    }

    /// True when every elementary face carries an even number of flipped bonds,
    /// i.e. the mask is a union of closed loops on the dual lattice.
    bool parity_audit() const {
        for (int x = 0; x < L1_; ++x) {
            for (int y = 0; y < L2_; ++y) {
                if (is_square()) {
                    const auto r = wrap(x + 1, y);
                    const auto u = wrap(x, y + 1);
                    const int f = mask_[bond_id(x, y, 0)] + mask_[bond_id(r.first, r.second, 1)] +
                                  mask_[bond_id(u.first, u.second, 0)] + mask_[bond_id(x, y, 1)];
                    if (f % 2) return false;
                } else {
                    const auto u = wrap(x, y + 1);
                    const int f1 = mask_[bond_id(x, y, 0)] + mask_[bond_id(x, y, 1)] +
                                   mask_[bond_id(u.first, u.second, 2)];
                    const auto d = wrap(x + 1, y - 1);
                    const int f2 = mask_[bond_id(x, y, 1)] + mask_[bond_id(x, y, 2)] +
                                   mask_[bond_id(d.first, d.second, 0)];
                    if (f1 % 2 || f2 % 2) return false;
                }
            }
        }
        return true;
    }

    /// Site level with site(0, 0) after n columns.
    int horizontal_partner(int n) const {
        if (is_square()) {
            const auto p = wrap(n, 0);
            return site(p.first, p.second);
        }
        if (n % 2 != 0) throw DomainError("level partners on the triangular lattice need even n");
        const auto p = wrap(n, -n / 2);
        return site(p.first, p.second);
    }

    void dump(std::ostream& os) const {
        os << "# " << to_string(kind_) << ' ' << L1_ << 'x' << L2_ << '\n';
        os << "bond,dir,from_x,from_y,to_x,to_y,K,flipped\n";
        for (std::size_t b = 0; b < bonds_.size(); ++b) {
            const auto& bd = bonds_[b];
            os << b << ',' << bd.dir << ',' << bd.i / L2_ << ',' << bd.i % L2_ << ',' << bd.j / L2_
               << ',' << bd.j % L2_ << ',' << bd.K << ',' << int(mask_[b]) << '\n';
        }
    }

private:
    SpinLattice(LatticeKind k, int L1, int L2) : kind_(k), L1_(L1), L2_(L2) {
        if (L1 < 1 || L2 < 1) throw DomainError("lattice sides must be positive");
    }

    void build() {
        bonds_.clear();
        for (int x = 0; x < L1_; ++x) {
            for (int y = 0; y < L2_; ++y) {
                const int s = site(x, y);
                auto to = [&](int dx, int dy) {
                    const auto p = wrap(x + dx, y + dy);
                    return site(p.first, p.second);
                };
                if (is_square()) {
                    bonds_.push_back({s, to(1, 0), couplings_.first, 0});
                    bonds_.push_back({s, to(0, 1), couplings_.second, 1});
                } else {
                    bonds_.push_back({s, to(0, 1), couplings_.first, 0});
                    bonds_.push_back({s, to(1, 0), couplings_.second, 1});
                    bonds_.push_back({s, to(1, -1), couplings_.second, 2});
                }
            }
        }
        mask_.assign(bonds_.size(), 0);
    }

    LatticeKind kind_;
    int L1_;
    int L2_;
    std::pair<double, double> couplings_{0.0, 0.0};
    std::vector<Bond> bonds_;
    std::vector<char> mask_;
    std::vector<int> walls_;
    bool deformed_ = false;
};

// -------------------------------------------------------------------- enumeration

inline constexpr int kEnumerationSiteCap = 26;

struct EnumerationResult {
    PartitionPair pair;
    std::vector<double> correlators;  // untwisted <s_i s_j> for the requested pairs
};

/// Exhaustive 1/2-per-site sum of Z (no twist) and Z_twisted (mask applied),
/// with Z - Z_twisted accumulated term by term.
inline EnumerationResult enumerate_partition(const SpinLattice& lat,
                                             const std::vector<std::pair<int, int>>& pairs = {},
                                             unsigned threads = 0) {
    const int n = lat.sites();
    if (n > kEnumerationSiteCap)
        throw ResourceCapError("enumeration is capped at " + std::to_string(kEnumerationSiteCap) +
                                   " sites; use the transfer matrix",
                               kEnumerationSiteCap);
    struct Nbr {
        int j;
        double K;
        bool wall;
    };
    std::vector<std::vector<Nbr>> nbr(n);
    double constant = 0.0, constant_wall = 0.0, shift = 0.0;
    const auto& bonds = lat.bonds();
    const auto& mask = lat.mask();
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        const auto& bd = bonds[b];
        shift += std::fabs(bd.K);
        if (bd.i == bd.j) {
            constant += bd.K;
            if (mask[b]) constant_wall += bd.K;
            continue;
        }
        nbr[bd.i].push_back({bd.j, bd.K, mask[b] != 0});
        nbr[bd.j].push_back({bd.i, bd.K, mask[b] != 0});
    }

    const unsigned want = resolve_threads(threads);
    int top_bits = 0;
    while ((1u << top_bits) < want && top_bits < n - 1 && top_bits < 8) ++top_bits;
    const int low_bits = n - top_bits;
    const std::uint64_t chunks = 1ull << top_bits;

    struct Acc {
        CompensatedSum z, zt, diff;
        std::vector<CompensatedSum> corr;
    };
    std::vector<Acc> acc(chunks);

    auto work = [&](std::uint64_t chunk) {
        Acc& a = acc[chunk];
        a.corr.resize(pairs.size());
        std::vector<int> s(n, 1);
        for (int k = 0; k < top_bits; ++k) s[low_bits + k] = (chunk >> k) & 1 ? -1 : 1;
        double e = constant, w = constant_wall;
        for (std::size_t b = 0; b < bonds.size(); ++b) {
            const auto& bd = bonds[b];
            if (bd.i == bd.j) continue;
            const double v = bd.K * s[bd.i] * s[bd.j];
            e += v;
            if (mask[b]) w += v;
        }
        auto accumulate = [&] {
            const double base = std::exp(e - shift);
            a.z.add(base);
            a.zt.add(base * std::exp(-2.0 * w));
            a.diff.add(-base * std::expm1(-2.0 * w));
            for (std::size_t p = 0; p < pairs.size(); ++p)
                a.corr[p].add(base * s[pairs[p].first] * s[pairs[p].second]);
        };
        accumulate();
        const std::uint64_t count = 1ull << low_bits;
        for (std::uint64_t g = 1; g < count; ++g) {
            const int bit = std::countr_zero(g);
            double de = 0.0, dw = 0.0;
            for (const auto& nb : nbr[bit]) {
                const double v = nb.K * s[nb.j];
                de += v;
                if (nb.wall) dw += v;
            }
            e -= 2.0 * s[bit] * de;
            w -= 2.0 * s[bit] * dw;
            s[bit] = -s[bit];
            accumulate();
        }
    };

    if (chunks == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t next = 0;
        const unsigned nt = std::min<unsigned>(want, static_cast<unsigned>(chunks));
        std::vector<std::vector<std::uint64_t>> jobs(nt);
        for (std::uint64_t c = 0; c < chunks; ++c) jobs[next++ % nt].push_back(c);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (auto c : jobs[t]) work(c);
            });
        for (auto& th : pool) th.join();
    }

    CompensatedSum z, zt, diff;
    std::vector<CompensatedSum> corr(pairs.size());
    for (const auto& a : acc) {
        z.add(a.z);
        zt.add(a.zt);
        diff.add(a.diff);
        for (std::size_t p = 0; p < pairs.size(); ++p) corr[p].add(a.corr[p]);
    }
    const double norm = shift - n * kLn2;
    EnumerationResult out;
    out.pair.method = PairMethod::enumeration;
    out.pair.log_Z = std::log(z.value()) + norm;
    out.pair.log_Z_twisted = std::log(zt.value()) + norm;
    const double d = diff.value();
    out.pair.one_minus_ratio = d == 0.0 ? SignedLog{} : SignedLog::from_log(std::log(std::fabs(d)) - std::log(z.value()), d > 0 ? 1 : -1);
    for (auto& c : corr) out.correlators.push_back(c.value() / z.value());
    return out;
}

// ----------------------------------------------------------------- transfer matrix

inline constexpr int kTransferWidthCap = 16;

namespace detail {

// Transfer from column x to column x+1 for a strip of width L2, acting in place.
// Bit y of a state index is 1 when spin (., y) is -1.
class StripTransfer {
public:
    explicit StripTransfer(const SpinLattice& lat) : lat_(lat), M_(lat.L2()), dim_(1u << lat.L2()) {
        const auto [k_intra_or_a, k_b] = lat.couplings();
        if (lat.is_square()) {
            k_cross_ = k_intra_or_a;
            k_intra_ = k_b;
        } else {
            k_intra_ = k_intra_or_a;
            k_cross_ = k_b;
        }
        diag_.resize(dim_);
        for (std::uint32_t s = 0; s < dim_; ++s) {
            double e = 0.0;
            for (int y = 0; y < M_; ++y) e += k_intra_ * spin(s, y) * spin(s, (y + 1) % M_);
            diag_[s] = e;
        }
        diag_shift_ = *std::max_element(diag_.begin(), diag_.end());
        for (auto& d : diag_) d = std::exp(d - diag_shift_);
        // rotation of the helical seam: s_N[y] = s_0[y + L1/2]
        rot_.resize(dim_);
        const int sh = lat.kind() == LatticeKind::tri_helical ? (lat.L1() / 2) % M_ : 0;
        for (std::uint32_t s = 0; s < dim_; ++s) {
            std::uint32_t r = 0;
            for (int y = 0; y < M_; ++y)
                if ((s >> ((y + sh) % M_)) & 1u) r |= 1u << y;
            rot_[s] = r;
        }
    }

    std::uint32_t dim() const { return dim_; }
    std::uint32_t all_flipped(std::uint32_t s) const { return s ^ (dim_ - 1); }
    std::uint32_t rotated(std::uint32_t s) const { return rot_[s]; }
    static int spin(std::uint32_t s, int y) { return (s >> y) & 1u ? -1 : 1; }

    /// One column step; returns the log of the scale factor divided out.
    double apply(std::vector<double>& v) const {
        const double ep = std::exp(k_cross_ - std::fabs(k_cross_));
        const double em = std::exp(-k_cross_ - std::fabs(k_cross_));
        double log_scale = M_ * std::fabs(k_cross_) + diag_shift_;
        if (lat_.is_square()) {
            for (int y = 0; y < M_; ++y) pair_factor(v, y, ep, em);
        } else {
            log_scale += M_ * std::fabs(k_cross_);
            triangular_step(v, ep, em);
        }
        double mx = 0.0;
        for (std::uint32_t s = 0; s < dim_; ++s) {
            v[s] *= diag_[s];
            mx = std::max(mx, std::fabs(v[s]));
        }
        if (mx > 0) {
            for (auto& x : v) x /= mx;
            log_scale += std::log(mx);
        }
        return log_scale;
    }

private:
    // v(.., s'_y, ..) = sum_{s_y} e^{K s_y s'_y} v(.., s_y, ..)
    void pair_factor(std::vector<double>& v, int y, double ep, double em) const {
        const std::uint32_t bit = 1u << y;
        for (std::uint32_t s = 0; s < dim_; ++s) {
            if (s & bit) continue;
            const double a = v[s], b = v[s | bit];
            v[s] = ep * a + em * b;
            v[s | bit] = em * a + ep * b;
        }
    }

    // Old spin s_y couples to new s'_y and s'_{y-1}. Sites are swapped in order
    // y = 0 .. M-1; old s_0 also needs s'_{M-1}, so it is parked in an extra bit.
    void triangular_step(std::vector<double>& v, double ep, double em) const {
        const std::uint32_t extra = dim_;
        std::vector<double> w(2 * dim_, 0.0);
        for (std::uint32_t s = 0; s < dim_; ++s) w[s | ((s & 1u) ? extra : 0u)] = v[s];
        auto factor = [&](int a, int b) { return a * b > 0 ? ep : em; };
        for (int y = 0; y < M_; ++y) {
            const std::uint32_t bit = 1u << y;
            for (std::uint32_t s = 0; s < 2 * dim_; ++s) {
                if (s & bit) continue;
                const double old_up = w[s], old_dn = w[s | bit];
                for (int np = 0; np < 2; ++np) {
                    const int ns = np ? -1 : 1;
                    double f_up = factor(1, ns), f_dn = factor(-1, ns);
                    if (y > 0) {
                        const int prev = spin(s, y - 1);  // already the new spin s'_{y-1}
                        f_up *= factor(1, prev);
                        f_dn *= factor(-1, prev);
                    }
                    const double val = f_up * old_up + f_dn * old_dn;
                    if (np == 0) w[s] = val;
                    else w[s | bit] = val;
                    // both writes read old_up/old_dn captured above
                }
            }
        }
        for (std::uint32_t s = 0; s < dim_; ++s) {
            const int last = spin(s, M_ - 1);
            v[s] = factor(1, last) * w[s] + factor(-1, last) * w[s | extra];
        }
    }

    const SpinLattice& lat_;
    int M_;
    std::uint32_t dim_;
    double k_cross_ = 0.0;
    double k_intra_ = 0.0;
    double diag_shift_ = 0.0;
    std::vector<double> diag_;
    std::vector<std::uint32_t> rot_;
};

// Sector traces Tr_{+-}(T^L1 R) over the even / odd subspaces of the global flip.
struct SectorTraces {
    SignedLog even;
    SignedLog odd;
};

inline SectorTraces sector_traces_sweep(const SpinLattice& lat) {
    StripTransfer tm(lat);
    const std::uint32_t dim = tm.dim();
    const std::uint32_t half = dim / 2;  // representatives: top bit clear
    std::vector<SignedLog> even_terms, odd_terms;
    std::vector<double> v(dim);
    for (int parity = 0; parity < 2; ++parity) {
        const double sgn = parity == 0 ? 1.0 : -1.0;
        for (std::uint32_t s = 0; s < half; ++s) {
            std::fill(v.begin(), v.end(), 0.0);
            v[s] = 1.0;
            v[tm.all_flipped(s)] = sgn;
            double log_scale = 0.0;
            for (int x = 0; x < lat.L1(); ++x) log_scale += tm.apply(v);
            const std::uint32_t r = tm.rotated(s);
            const double comp = 0.5 * (v[r] + sgn * v[tm.all_flipped(r)]);
            const SignedLog term = SignedLog::from_value(comp) * SignedLog::from_log(log_scale);
            (parity == 0 ? even_terms : odd_terms).push_back(term);
        }
    }
    return {signed_log_sum(even_terms), signed_log_sum(odd_terms)};
}

// Dense route for long strips: build the sector blocks of T once and raise them
// to the L1-th power by squaring.
inline SignedLog sector_trace_dense(const SpinLattice& lat, int parity) {
    StripTransfer tm(lat);
    const std::uint32_t dim = tm.dim();
    const std::uint32_t half = dim / 2;
    const double sgn = parity == 0 ? 1.0 : -1.0;
    Eigen::MatrixXd T(half, half), R = Eigen::MatrixXd::Zero(half, half);
    std::vector<double> v(dim);
    double log_t = 0.0;
    std::vector<double> scales(half);
    for (std::uint32_t b = 0; b < half; ++b) {
        std::fill(v.begin(), v.end(), 0.0);
        v[b] = 1.0;
        v[tm.all_flipped(b)] = sgn;
        scales[b] = tm.apply(v);
        for (std::uint32_t a = 0; a < half; ++a) T(a, b) = v[a];
        const std::uint32_t r = tm.rotated(b);
        // trace(R X) = sum_b (T^L1 f_b) read at the rotated index R b
        if (r < half) R(b, r) = 1.0;
        else R(b, tm.all_flipped(r)) = sgn;
    }
    const double ref = *std::max_element(scales.begin(), scales.end());
    for (std::uint32_t b = 0; b < half; ++b) T.col(b) *= std::exp(scales[b] - ref);
    log_t = ref;

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(half, half);
    double log_result = 0.0;
    Eigen::MatrixXd base = T;
    double log_base = log_t;
    for (long long e = lat.L1(); e > 0; e >>= 1) {
        if (e & 1) {
            result = result * base;
            log_result += log_base;
            const double m = result.cwiseAbs().maxCoeff();
            if (m > 0) {
                result /= m;
                log_result += std::log(m);
            }
        }
        if (e > 1) {
            base = base * base;
            log_base *= 2.0;
            const double m = base.cwiseAbs().maxCoeff();
            if (m > 0) {
                base /= m;
                log_base += std::log(m);
            }
        }
    }
    const double tr = (R * result).trace();
    return SignedLog::from_value(tr) * SignedLog::from_log(log_result);
}

inline SectorTraces sector_traces(const SpinLattice& lat) {
    const double M = lat.L2();
    const double dim = std::ldexp(1.0, lat.L2());
    const double sweep_cost = dim * dim * M * lat.L1();
    const double dense_cost = std::pow(dim / 2, 3) * 4.0 * std::log2(lat.L1() + 1.0) + dim * dim * M;
    if (lat.L2() >= 2 && dense_cost < sweep_cost && lat.L2() <= 12)
        return {sector_trace_dense(lat, 0), sector_trace_dense(lat, 1)};
    return sector_traces_sweep(lat);
}

}  // namespace detail

/// Z and the wall-twisted Z from strip transfer matrices. Walls must be whole
/// columns (no deformations). With an even wall count the twisted Z is the untwisted one.
inline PartitionPair strip_transfer(const SpinLattice& lat, int max_width = kTransferWidthCap) {
    if (lat.L2() > max_width)
        throw ResourceCapError("transfer width " + std::to_string(lat.L2()) + " exceeds cap " +
                                   std::to_string(max_width),
                               max_width);
    if (lat.deformed()) throw DomainError("transfer matrices only handle straight column walls");
    const auto tr = detail::sector_traces(lat);
    const SignedLog Z2 = tr.even + tr.odd;  // 2^{-sites} normalization applied below
    const double norm = -lat.sites() * kLn2;
    PartitionPair out;
    out.method = PairMethod::transfer_matrix;
    out.log_Z = Z2.log_abs + norm;
    const bool twisted = lat.walls().size() % 2 == 1;
    if (!twisted) {
        out.log_Z_twisted = out.log_Z;
        return out;
    }
    const SignedLog Zt = tr.even - tr.odd;
    if (Z2.sign <= 0 || Zt.sign <= 0) throw ConsistencyError("transfer trace not positive");
    out.log_Z_twisted = Zt.log_abs + norm;
    // 1 - Z_t / Z = 2 Tr_odd / (Tr_even + Tr_odd)
    out.one_minus_ratio = SignedLog::from_log(kLn2 + tr.odd.log_abs - Z2.log_abs, tr.odd.sign);
    return out;
}

// --------------------------------------------------------------------- correlators

/// Untwisted <s_i s_j>: enumeration when small, otherwise a transfer sweep with
/// sigma insertions at the two columns.
inline double correlator(const SpinLattice& lat, int i, int j) {
    if (i < 0 || j < 0 || i >= lat.sites() || j >= lat.sites()) throw DomainError("site out of range");
    if (lat.sites() <= 20) return enumerate_partition(lat.with_walls({}), {{i, j}}).correlators[0];
    if (lat.L2() > kTransferWidthCap)
        throw ResourceCapError("correlator width exceeds the transfer cap", kTransferWidthCap);
    if (!lat.walls().empty() || lat.deformed())
        throw DomainError("transfer correlator works on the untwisted lattice");
    detail::StripTransfer tm(lat);
    const int M = lat.L2();
    int xi = i / M, yi = i % M, xj = j / M, yj = j % M;
    if (xj < xi) {
        std::swap(xi, xj);
        std::swap(yi, yj);
    }
    std::vector<SignedLog> num, den;
    std::vector<double> v(tm.dim());
    for (std::uint32_t s = 0; s < tm.dim(); ++s) {
        for (int pass = 0; pass < 2; ++pass) {
            std::fill(v.begin(), v.end(), 0.0);
            v[s] = 1.0;
            double log_scale = 0.0;
            auto insert = [&](int y) {
                for (std::uint32_t k = 0; k < tm.dim(); ++k) v[k] *= detail::StripTransfer::spin(k, y);
            };
            // columns 0 .. L1-1 are visited after x steps; column 0 is the start state
            if (pass == 1 && xi == 0) insert(yi);
            if (pass == 1 && xj == 0) insert(yj);
            for (int x = 1; x <= lat.L1(); ++x) {
                log_scale += tm.apply(v);
                if (pass == 1 && x < lat.L1()) {
                    if (x == xi) insert(yi);
                    if (x == xj) insert(yj);
                }
            }
            const double comp = v[tm.rotated(s)];
            (pass == 0 ? den : num).push_back(SignedLog::from_value(comp) * SignedLog::from_log(log_scale));
        }
    }
    const SignedLog n = signed_log_sum(num), d = signed_log_sum(den);
    return n.is_zero() ? 0.0 : n.sign * std::exp(n.log_abs - d.log_abs);
}

inline double horizontal_correlator(const SpinLattice& lat, int n) {
    return correlator(lat, lat.site(0, 0), lat.horizontal_partner(n));
}

// ---------------------------------------------------------------------- checks

struct InequalityRow {
    int n = 0;
    double lhs = 0.0;  // <s_0 s_n>
    double rhs = 0.0;  // 2 {1/2 (1 - Z^-/Z)}^{n/L1}
    bool theorem_regime = false;
    bool ok = false;
};

/// Checks <s_0 s_n> <= 2 {1/2 (1 - Z^-/Z)}^{n/L1}; the lattice carries no walls,
/// a single wall at the last column defines Z^-.
inline std::vector<InequalityRow> check_inequality(const SpinLattice& lat, const std::vector<int>& separations) {
    const SpinLattice twisted = lat.with_walls({lat.L1() - 1});
    const PartitionPair pair = lat.sites() <= kEnumerationSiteCap ? enumerate_partition(twisted).pair
                                                                   : strip_transfer(twisted);
    std::vector<InequalityRow> rows;
    for (int n : separations) {
        InequalityRow r;
        r.n = n;
        r.lhs = horizontal_correlator(lat, n);
        const SignedLog half = pair.one_minus_ratio * SignedLog::from_value(0.5);
        r.rhs = half.sign > 0 ? 2.0 * std::exp(half.log_abs * n / lat.L1()) : (n == 0 ? 2.0 : 0.0);
        r.theorem_regime = is_power_of_two_multiple(lat.L1(), n) && (lat.is_square() || n % 2 == 0);
        r.ok = r.lhs <= r.rhs;
        rows.push_back(r);
    }
    return rows;
}

struct EqualityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double diff = 0.0;
    bool equal = false;
};

/// log Z with one wall against log Z with three parallel walls.
inline EqualityReport wall_mod2_check(const SpinLattice& lat, const std::vector<int>& walls_a,
                                      const std::vector<int>& walls_b, double tol = 1e-12) {
    const auto a = enumerate_partition(lat.with_walls(walls_a)).pair.log_Z_twisted;
    const auto b = enumerate_partition(lat.with_walls(walls_b)).pair.log_Z_twisted;
    return {a, b, a - b, std::fabs(a - b) <= tol};
}

/// log Z_twisted before and after a gauge deformation of the wall at the given sites.
inline EqualityReport wall_deformation_check(const SpinLattice& twisted, const std::vector<int>& sites,
                                             double tol = 1e-12) {
    SpinLattice deformed = twisted;
    for (int s : sites) deformed.deform_wall(s);
    if (!deformed.parity_audit()) throw ConsistencyError("deformed wall failed the parity audit");
    const auto a = enumerate_partition(twisted).pair.log_Z_twisted;
    const auto b = enumerate_partition(deformed).pair.log_Z_twisted;
    return {a, b, a - b, std::fabs(a - b) <= tol};
}

struct EquivalenceReport {
    int N = 0;
    int M = 0;
    double log_Z_helical = 0.0;
    double log_Z_straight = 0.0;
    double diff = 0.0;
    bool multiple_of_2M = false;
    bool equal = false;
};

/// Helical against straight triangular torus.
inline EquivalenceReport lattice_equivalence_check(int N, int M, double J1, double J, double tol = 1e-12) {
    const auto a = SpinLattice::triangular(N, M, J1, J, true);
    const auto b = SpinLattice::triangular(N, M, J1, J, false);
    auto logz = [](const SpinLattice& l) {
        return l.sites() <= kEnumerationSiteCap ? enumerate_partition(l).pair.log_Z : strip_transfer(l).log_Z;
    };
    EquivalenceReport r;
    r.N = N;
    r.M = M;
    r.log_Z_helical = logz(a);
    r.log_Z_straight = logz(b);
    r.diff = r.log_Z_helical - r.log_Z_straight;
    r.multiple_of_2M = N % (2 * M) == 0;
    r.equal = std::fabs(r.diff) <= tol;
    return r;
}

struct SceRow {
    double t = 0.0;
    double log_ratio = 0.0;  // log(Z^-/Z)
    double leading = 0.0;    // -2 L2 t^{L1}
    double r = 0.0;
};

/// r(t) = log(Z^-/Z) / (-2 L2 t^{L1}) on the isotropic square lattice.
inline std::vector<SceRow> sce_leading_check(int L1, int L2, const std::vector<double>& ts) {
    std::vector<SceRow> rows;
    for (double t : ts) {
        if (t == 0.0) continue;
        const double lead_log = L1 * std::log(std::fabs(t));
        if (lead_log < std::log(1e-280))
            throw DomainError("t^L1 underflows; use a larger t or a smaller L1");
        const double K = std::atanh(t);
        const auto lat = SpinLattice::square(L1, L2, K, K).with_walls({L1 - 1});
        const auto pair = strip_transfer(lat);
        SceRow row;
        row.t = t;
        // log(1 - u) with u = 1 - Z^-/Z
        row.log_ratio = std::log1p(-pair.one_minus_ratio.value());
        row.leading = -2.0 * L2 * std::pow(t, L1);
        row.r = row.log_ratio / row.leading;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace twistgap
