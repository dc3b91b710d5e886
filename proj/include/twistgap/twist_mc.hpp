#pragma once

// Extended-ensemble Metropolis: the twist sector is a dynamical bit, so the
// chain samples exp(E_sector(s)) over (spins, sector) and
//   Z_twisted / Z = (time in twisted sector) / (time in untwisted sector).
//
// Random numbers: std::mt19937_64 (fully specified by the standard), seeded
// per chain through splitmix64, mapped to doubles as (x >> 11) * 2^-53. No
// std distributions are used, so a seed fixes the output on every platform.

#include "twistgap/errors.hpp"
#include "twistgap/ising_oracle.hpp"
#include "twistgap/numeric.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace twistgap {

struct McConfig {
    SpinLattice lattice = SpinLattice::square(2, 2, 0.0, 0.0);
    long long sweeps = 100000;
    long long thermalization = 1000;
    std::uint64_t seed = 1;
    int sector_flips_per_sweep = 1;
    int chains = 1;
    unsigned threads = 0;
    int wall_column = -1;  // defaults to the last column
};

/// Mean and error of a correlated time series by blocking.
struct BlockingResult {
    double mean = 0.0;
    double error = 0.0;
    double naive_error = 0.0;
    double tau = 0.5;  // integrated autocorrelation time, 1/2 for independent samples
    int block_size = 1;
    int blocks = 0;
};

/// Block sizes double until the error estimate stops growing beyond its own
/// statistical uncertainty; at least min_blocks blocks are always kept.
inline BlockingResult blocking_analysis(const std::vector<double>& series, int min_blocks = 32) {
    BlockingResult r;
    const std::size_t n = series.size();
    if (n < 2) throw DomainError("blocking needs at least two samples");
    CompensatedSum s;
    for (double x : series) s.add(x);
    r.mean = s.value() / n;

    std::vector<double> level(series);
    auto level_error = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var /= (v.size() - 1);
        return std::sqrt(var / v.size());
    };
    r.naive_error = level_error(level);
    r.error = r.naive_error;
    r.blocks = static_cast<int>(n);
    int size = 1;
    double best = r.naive_error;
    int best_size = 1, best_blocks = static_cast<int>(n);
    bool plateau = false;
    int confirm = 0;  // levels past the plateau that may still raise the estimate
    while (level.size() / 2 >= static_cast<std::size_t>(min_blocks)) {
        const double cur = level_error(level);
        std::vector<double> next(level.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (level[2 * i] + level[2 * i + 1]);
        const double nxt = level_error(next);
        const double slack = cur * std::sqrt(2.0 / (level.size() - 1));
        if (plateau && confirm > 0) {
            --confirm;
            if (cur > r.error) r.error = cur;
        }
        if (!plateau && nxt <= cur + slack && size > 1) {
            r.error = cur;
            r.block_size = size;
            r.blocks = static_cast<int>(level.size());
            plateau = true;
            confirm = 2;
        }
        if (cur > best) {
            best = cur;
            best_size = size;
            best_blocks = static_cast<int>(level.size());
        }
        level.swap(next);
        size *= 2;
    }
    if (!plateau) {
        r.error = best;
        r.block_size = best_size;
        r.blocks = best_blocks;
    }
    r.tau = r.naive_error > 0 ? 0.5 * (r.error * r.error) / (r.naive_error * r.naive_error) : 0.5;
    return r;
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class McRng {
public:
    McRng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ull * (stream + 1));
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(sm)), static_cast<std::uint32_t>(splitmix64(sm)),
                          static_cast<std::uint32_t>(splitmix64(sm)), static_cast<std::uint32_t>(splitmix64(sm))};
        eng_.seed(seq);
    }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    int index(int n) { return static_cast<int>(uniform() * n); }

private:
    std::mt19937_64 eng_;
};

struct ChainResult {
    double ratio = 0.0;
    double stderr_ratio = 0.0;
    double fraction_twisted = 0.0;
    double tau = 0.0;
    double spin_acceptance = 0.0;
    double sector_acceptance = 0.0;
    long long visits_untwisted = 0;
    long long visits_twisted = 0;
    std::vector<BlockingResult> correlators;  // one per requested separation
};

struct McEstimate {
    double ratio = 0.0;  // Z_twisted / Z
    double stderr_ratio = 0.0;
    double spin_acceptance = 0.0;
    double sector_acceptance = 0.0;
    double tau = 0.0;
    std::vector<ChainResult> chains;
};

struct McCorrelator {
    int n = 0;
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

class ExtendedChain {
public:
    ExtendedChain(const McConfig& cfg, int chain_index)
        : cfg_(cfg), lat_(cfg.lattice), rng_(cfg.seed, static_cast<std::uint64_t>(chain_index)) {
        const int wall = cfg.wall_column < 0 ? lat_.L1() - 1 : cfg.wall_column;
        const SpinLattice walled = lat_.with_walls({wall});
        const auto& bonds = lat_.bonds();
        nbr_.resize(lat_.sites());
        for (std::size_t b = 0; b < bonds.size(); ++b) {
            Bond bd = bonds[b];
            if (lat_.mask()[b]) bd.K = -bd.K;  // flips already present in the base lattice
            const bool on_wall = walled.mask()[b] != lat_.mask()[b];
            if (on_wall) wall_.push_back(bd);
            if (bd.i == bd.j) continue;  // self-loops never change
            nbr_[bd.i].push_back({bd.j, bd.K, on_wall});
            nbr_[bd.j].push_back({bd.i, bd.K, on_wall});
        }
        spins_.assign(lat_.sites(), 1);
        for (auto& s : spins_) s = rng_.uniform() < 0.5 ? 1 : -1;
    }

    void sweep() {
        const double eta = twisted_ ? -1.0 : 1.0;
        for (int i = 0; i < lat_.sites(); ++i) {
            double h = 0.0;
            for (const auto& nb : nbr_[i]) h += (nb.wall ? eta : 1.0) * nb.K * spins_[nb.j];
            const double dE = -2.0 * spins_[i] * h;  // change of log weight
            ++spin_tries_;
            if (dE >= 0.0 || rng_.uniform() < std::exp(dE)) {
                spins_[i] = -spins_[i];
                ++spin_accepts_;
            }
        }
        for (int k = 0; k < cfg_.sector_flips_per_sweep; ++k) sector_flip();
    }

    void sector_flip() {
        const double eta = twisted_ ? -1.0 : 1.0;
        double w = 0.0;
        for (const auto& b : wall_) w += eta * b.K * spins_[b.i] * spins_[b.j];
        const double dE = -2.0 * w;
        ++sector_tries_;
        if (dE >= 0.0 || rng_.uniform() < std::exp(dE)) {
            twisted_ = !twisted_;
            ++sector_accepts_;
        }
    }

    bool twisted() const { return twisted_; }
    const std::vector<int>& spins() const { return spins_; }
    int state_index() const {
        int idx = 0;
        for (int i = 0; i < lat_.sites(); ++i)
            if (spins_[i] < 0) idx |= 1 << i;
        return idx | (twisted_ ? 1 << lat_.sites() : 0);
    }
    double spin_acceptance() const { return spin_tries_ ? double(spin_accepts_) / spin_tries_ : 0.0; }
    double sector_acceptance() const { return sector_tries_ ? double(sector_accepts_) / sector_tries_ : 0.0; }

private:
    struct Nbr {
        int j;
        double K;
        bool wall;
    };
    const McConfig& cfg_;
    const SpinLattice& lat_;
    McRng rng_;
    std::vector<std::vector<Nbr>> nbr_;
    std::vector<Bond> wall_;
    std::vector<int> spins_;
    bool twisted_ = false;
    long long spin_tries_ = 0, spin_accepts_ = 0, sector_tries_ = 0, sector_accepts_ = 0;
};

// All translates of the level pair (0,0)-(n, level) for translation averaging.
inline std::vector<std::pair<int, int>> level_pairs(const SpinLattice& lat, int n) {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < lat.L1(); ++x)
        for (int y = 0; y < lat.L2(); ++y) {
            const auto p = lat.is_square() ? lat.wrap(x + n, y) : lat.wrap(x + n, y - n / 2);
            out.push_back({lat.site(x, y), lat.site(p.first, p.second)});
        }
    return out;
}

inline ChainResult run_chain(const McConfig& cfg, int chain_index, long long sweeps,
                             const std::vector<int>& separations) {
    ExtendedChain chain(cfg, chain_index);
    for (long long s = 0; s < cfg.thermalization; ++s) chain.sweep();
    std::vector<double> sector;
    sector.reserve(static_cast<std::size_t>(sweeps));
    std::vector<std::vector<std::pair<int, int>>> pairs;
    for (int n : separations) pairs.push_back(level_pairs(cfg.lattice, n));
    std::vector<std::vector<double>> corr(separations.size());
    ChainResult r;
    for (long long s = 0; s < sweeps; ++s) {
        chain.sweep();
        const bool tw = chain.twisted();
        sector.push_back(tw ? 1.0 : 0.0);
        (tw ? r.visits_twisted : r.visits_untwisted)++;
        if (!tw) {
            const auto& sp = chain.spins();
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                double acc = 0.0;
                for (const auto& [i, j] : pairs[k]) acc += sp[i] * sp[j];
                corr[k].push_back(acc / pairs[k].size());
            }
        }
    }
    r.spin_acceptance = chain.spin_acceptance();
    r.sector_acceptance = chain.sector_acceptance();
    if (r.visits_twisted == 0 || r.visits_untwisted == 0) {
        throw TunnelingError("chain " + std::to_string(chain_index) + " never visited one twist sector",
                             r.visits_untwisted, r.visits_twisted);
    }
    const auto b = blocking_analysis(sector);
    const double f = b.mean;
    r.fraction_twisted = f;
    r.ratio = f / (1.0 - f);
    r.stderr_ratio = b.error / ((1.0 - f) * (1.0 - f));
    r.tau = b.tau;
    for (std::size_t k = 0; k < corr.size(); ++k) {
        if (separations[k] == 0) {
            BlockingResult one;
            one.mean = 1.0;
            one.error = 0.0;
            r.correlators.push_back(one);
        } else if (corr[k].size() >= 64) {
            r.correlators.push_back(blocking_analysis(corr[k]));
        } else {
            throw TunnelingError("too few untwisted samples for correlators", r.visits_untwisted,
                                 r.visits_twisted);
        }
    }
    return r;
}

inline std::vector<ChainResult> run_chains(const McConfig& cfg, const std::vector<int>& separations) {
    if (cfg.sweeps <= cfg.thermalization || cfg.thermalization < 0)
        throw DomainError("sweeps must exceed thermalization, which must be non-negative");
    if (cfg.chains < 1) throw DomainError("at least one chain is required");
    const long long per_chain = (cfg.sweeps - cfg.thermalization) / cfg.chains;
    if (per_chain < 64) throw DomainError("too few measured sweeps per chain");
    std::vector<ChainResult> results(cfg.chains);
    std::vector<std::exception_ptr> errors(cfg.chains);
    const unsigned nt = std::min<unsigned>(resolve_threads(cfg.threads), cfg.chains);
    auto job = [&](int c) {
        try {
            results[c] = run_chain(cfg, c, per_chain, separations);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    if (nt <= 1) {
        for (int c = 0; c < cfg.chains; ++c) job(c);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                for (int c = static_cast<int>(t); c < cfg.chains; c += static_cast<int>(nt)) job(c);
            });
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

inline std::pair<double, double> inverse_variance(const std::vector<double>& v, const std::vector<double>& e) {
    if (v.size() == 1) return {v[0], e[0]};
    double wsum = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = e[i] > 0 ? 1.0 / (e[i] * e[i]) : 0.0;
        wsum += w;
        acc += w * v[i];
    }
    if (wsum == 0.0) {
        double m = 0.0;
        for (double x : v) m += x;
        return {m / v.size(), 0.0};
    }
    return {acc / wsum, 1.0 / std::sqrt(wsum)};
}

}  // namespace detail

/// Z_twisted / Z from sector occupation, chains combined by inverse-variance weighting.
inline McEstimate run_extended_ensemble(const McConfig& cfg) {
    const auto chains = detail::run_chains(cfg, {});
    McEstimate out;
    std::vector<double> v, e;
    for (const auto& c : chains) {
        v.push_back(c.ratio);
        e.push_back(c.stderr_ratio);
        out.spin_acceptance += c.spin_acceptance / chains.size();
        out.sector_acceptance += c.sector_acceptance / chains.size();
        out.tau += c.tau / chains.size();
    }
    std::tie(out.ratio, out.stderr_ratio) = detail::inverse_variance(v, e);
    out.chains = chains;
    return out;
}

/// Level-pair correlators from untwisted-sector samples, averaged over translations.
inline std::vector<McCorrelator> mc_correlator(const McConfig& cfg, const std::vector<int>& separations) {
    const auto chains = detail::run_chains(cfg, separations);
    std::vector<McCorrelator> out;
    for (std::size_t k = 0; k < separations.size(); ++k) {
        std::vector<double> v, e;
        for (const auto& c : chains) {
            v.push_back(c.correlators[k].mean);
            e.push_back(c.correlators[k].error);
        }
        const auto [m, s] = detail::inverse_variance(v, e);
        out.push_back({separations[k], m, s});
    }
    return out;
}

struct DetailedBalanceReport {
    std::vector<double> empirical;  // per (spins, sector) state
    std::vector<double> exact;
    std::vector<double> sigma;
    double max_z = 0.0;
    bool ok = false;
};

/// Visits per (spin configuration, sector) state against exact Boltzmann weights,
/// errors from batch means. Intended for lattices with at most 12 sites.
inline DetailedBalanceReport detailed_balance_audit(const McConfig& cfg, int batches = 64, double n_sigma = 3.0) {
    const SpinLattice& lat = cfg.lattice;
    const int n = lat.sites();
    if (n > 12) throw ResourceCapError("detailed-balance audit is capped at 12 sites", 12);
    const int wall = cfg.wall_column < 0 ? lat.L1() - 1 : cfg.wall_column;
    const SpinLattice walled = lat.with_walls({wall});
    const int states = 1 << (n + 1);

    DetailedBalanceReport rep;
    rep.exact.assign(states, 0.0);
    double total = 0.0;
    for (int st = 0; st < states; ++st) {
        const bool tw = (st >> n) & 1;
        double e = 0.0;
        for (std::size_t b = 0; b < walled.bonds().size(); ++b) {
            const auto& bd = walled.bonds()[b];
            const int si = (st >> bd.i) & 1 ? -1 : 1, sj = (st >> bd.j) & 1 ? -1 : 1;
            const bool negative = tw ? walled.mask()[b] != 0 : lat.mask()[b] != 0;
            e += (negative ? -1.0 : 1.0) * bd.K * si * sj;
        }
        rep.exact[st] = std::exp(e);
        total += rep.exact[st];
    }
    for (auto& p : rep.exact) p /= total;

    detail::ExtendedChain chain(cfg, 0);
    for (long long s = 0; s < cfg.thermalization; ++s) chain.sweep();
    const long long measured = cfg.sweeps - cfg.thermalization;
    const long long per_batch = measured / batches;
    if (per_batch < 1) throw DomainError("too few sweeps for the requested batches");
    std::vector<std::vector<double>> freq(batches, std::vector<double>(states, 0.0));
    for (int b = 0; b < batches; ++b) {
        for (long long s = 0; s < per_batch; ++s) {
            chain.sweep();
            freq[b][chain.state_index()] += 1.0;
        }
        for (auto& f : freq[b]) f /= per_batch;
    }
    rep.empirical.assign(states, 0.0);
    rep.sigma.assign(states, 0.0);
    for (int st = 0; st < states; ++st) {
        double m = 0.0;
        for (int b = 0; b < batches; ++b) m += freq[b][st];
        m /= batches;
        double var = 0.0;
        for (int b = 0; b < batches; ++b) var += (freq[b][st] - m) * (freq[b][st] - m);
        var /= (batches - 1);
        rep.empirical[st] = m;
        rep.sigma[st] = std::sqrt(var / batches);
        const double z = rep.sigma[st] > 0 ? std::fabs(m - rep.exact[st]) / rep.sigma[st] : 0.0;
        rep.max_z = std::max(rep.max_z, z);
    }
    rep.ok = rep.max_z <= n_sigma;
    return rep;
}

}  // namespace twistgap
