// twistgap: command-line front end. One subcommand per computation; output is
// CSV (with a "# key=value" echo of the resolved configuration) or JSON.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage, 3 domain or phase error, 4 resource cap.

#include "table.hpp"
#include "twistgap/twistgap.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace tg = twistgap;
using tg::cli::Cell;
using tg::cli::ConfigEcho;
using tg::cli::Table;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitCap = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_size(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw UsageError("size must look like 8x4, got '" + s + "'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const int a = std::stoi(s.substr(0, x), &p1);
        const int b = std::stoi(s.substr(x + 1), &p2);
        if (p1 != x || p2 != s.size() - x - 1 || a < 1 || b < 1) throw std::invalid_argument("size");
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError("size must look like 8x4, got '" + s + "'");
    }
}

tg::GroupDescriptor parse_group(const std::string& g) {
    if (g == "u1") return tg::GroupDescriptor::u1();
    if (g == "su2") return tg::GroupDescriptor::su2();
    if (g.size() > 1 && (g[0] == 'z' || g[0] == 'Z')) {
        try {
            std::size_t pos = 0;
            const int n = std::stoi(g.substr(1), &pos);
            if (pos == g.size() - 1 && n >= 2) return tg::GroupDescriptor::cyclic(n);
        } catch (const std::logic_error&) {
        }
    }
    throw UsageError("unknown group '" + g + "' (use zN, u1 or su2)");
}

tg::Action parse_action(const std::string& kind, double beta) {
    if (!std::isfinite(beta)) throw UsageError("beta must be finite");
    if (kind == "wilson") return tg::Action::wilson(beta);
    if (kind == "adjoint") return tg::Action::adjoint(beta);
    throw UsageError("unknown action '" + kind + "' (use wilson or adjoint)");
}

// Irrep from --charge (abelian) or --j (SU(2)); the trivial irrep is refused.
tg::Irrep parse_irrep(const tg::GroupDescriptor& g, std::optional<int> charge, std::optional<double> j) {
    if (g.kind == tg::GroupKind::su2) {
        if (charge) throw UsageError("SU(2) irreps are chosen with --j");
        const double spin = j.value_or(0.5);
        if (spin <= 0 || std::fabs(2 * spin - std::round(2 * spin)) > 1e-12)
            throw UsageError("--j must be a positive half-integer");
        return tg::su2_spin(spin);
    }
    if (j) throw UsageError("--j only applies to su2; use --charge");
    const int q = charge.value_or(1);
    const tg::Irrep r = tg::make_irrep(g, q);
    if (r.is_trivial()) throw UsageError("the trivial irrep carries no information here");
    return r;
}

std::string join_values(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

// Flat "key = value" file mirroring long flags. Keys already given on the command
// line win; "flag = true" turns on a flag and "false" leaves it off.
std::vector<std::string> config_file_args(const std::string& path, const std::vector<std::string>& argv) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    auto present = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : argv)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config" || present(key)) continue;
        if (value == "true") extra.push_back("--" + key);
        else if (value != "false") {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    return extra;
}

ConfigEcho echo_options(const CLI::App* sub, const std::string& command) {
    ConfigEcho cfg{{"command", command}};
    for (const CLI::Option* opt : sub->get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names[0] == "help") continue;
        std::string value;
        if (opt->get_expected_max() == 0) value = opt->count() ? "true" : "false";
        else if (opt->count()) value = join_values(opt->results());
        else value = opt->get_default_str();
        if (value.size() > 1 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
        if (value.empty()) value = "auto";  // resolved by the subcommand
        cfg.emplace_back(names[0], value);
    }
    return cfg;
}

// Shared output settings for every subcommand.
struct Output {
    std::string format = "csv";
    std::string path;
    unsigned threads = 0;

    std::ostream& stream() {
        if (path.empty() || path == "-") return std::cout;
        if (!file) {
            file = std::make_unique<std::ofstream>(path);
            if (!*file) throw UsageError("cannot open output '" + path + "'");
        }
        return *file;
    }
    void emit(const ConfigEcho& cfg, const Table& t) {
        if (format == "json") tg::cli::write_json(stream(), cfg, t);
        else tg::cli::write_csv(stream(), cfg, t);
    }

private:
    std::unique_ptr<std::ofstream> file;
};

// ------------------------------------------------------------------- lgt2d

struct Lgt2dArgs {
    std::string group = "u1";
    std::string action = "wilson";
    double beta = 1.0;
    std::string size = "8x8";
    std::optional<int> charge;
    std::optional<double> j;
    std::vector<long long> areas{1, 2, 4, 8, 16};
    int cutoff = 64;
    bool sectors = false;
};

void add_lgt2d(CLI::App& app, Lgt2dArgs& a) {
    app.add_option("--group", a.group, "zN, u1 or su2")->capture_default_str();
    app.add_option("--action", a.action, "wilson or adjoint")->capture_default_str();
    app.add_option("--beta", a.beta, "inverse coupling")->capture_default_str();
    app.add_option("--size", a.size, "torus L1xL2")->capture_default_str();
    app.add_option("--charge", a.charge, "abelian irrep label of the loop");
    app.add_option("--j", a.j, "SU(2) spin of the loop");
    app.add_option("--areas", a.areas, "loop areas")->delimiter(',')->capture_default_str();
    app.add_option("--cutoff", a.cutoff, "character expansion cutoff")->capture_default_str();
    app.add_flag("--sectors", a.sectors, "emit the twist-sector table instead of the bound");
}

int run_lgt2d(const Lgt2dArgs& a, Output& out, const ConfigEcho& cfg) {
    const auto g = parse_group(a.group);
    const auto act = parse_action(a.action, a.beta);
    const auto [L1, L2] = parse_size(a.size);
    tg::ExpandOptions eo;
    eo.cutoff = a.cutoff;
    const auto spec = tg::make_lgt2d(g, act, L1, L2, eo);
    Table t;
    if (a.sectors) {
        const auto st = tg::sector_table(spec);
        t.columns = {"kind", "index", "angle", "value", "value_direct"};
        for (std::size_t k = 0; k < st.vortex.size(); ++k)
            t.add({std::string("vortex"), static_cast<long long>(k), st.angles[k], st.vortex[k], st.vortex[k]});
        for (std::size_t m = 0; m < st.flux.size(); ++m)
            t.add({std::string("flux"), static_cast<long long>(st.flux_labels[m]), 0.0, st.flux[m],
                   st.flux_direct[m]});
    } else {
        const auto R = parse_irrep(g, a.charge, a.j);
        const auto rows = tg::check_ty_bound(spec, R, a.areas);
        t.columns = {"group", "beta", "L1", "L2", "irrep", "area", "lhs", "rhs", "regime", "ok", "lhs_torus", "ok_torus"};
        for (const auto& r : rows)
            t.add({g.name(), a.beta, static_cast<long long>(L1), static_cast<long long>(L2),
                   static_cast<long long>(R.label), r.area, r.lhs, r.rhs,
                   std::string(r.theorem_regime ? "theorem" : "outside"), r.ok, r.lhs_torus, r.ok_torus});
    }
    out.emit(cfg, t);
    return kExitOk;
}

// --------------------------------------------------------------------- tri

struct TriArgs {
    double t1 = 0.0;
    double t = 0.2;
    bool rho = false;
    std::string heatmap;
    std::string svg;
    int M = 0;
    int N = 0;
    bool allow_ordered = false;
    std::vector<double> slope_t1;
};

void add_tri(CLI::App& app, TriArgs& a) {
    app.add_option("--t1", a.t1, "tanh J1")->capture_default_str();
    app.add_option("--t", a.t, "tanh J")->capture_default_str();
    app.add_flag("--rho", a.rho, "closed-form decay rate (default mode)");
    app.add_option("--heatmap", a.heatmap, "grid n1xn2 over (t1, t) in (-1, 1)^2");
    app.add_option("--svg", a.svg, "also write the heatmap as SVG to this path");
    app.add_option("--M", a.M, "sites per column for the finite-size pair");
    app.add_option("--N", a.N, "columns (even) for the finite-size pair");
    app.add_flag("--allow-ordered", a.allow_ordered, "evaluate partition functions in the ordered phase");
    app.add_option("--slope", a.slope_t1, "t1 values for the d rho / d t1 probe")->delimiter(',');
}

int run_tri(const TriArgs& a, Output& out, const ConfigEcho& cfg) {
    Table t;
    if (!a.heatmap.empty()) {
        const auto [n1, n2] = parse_size(a.heatmap);
        const auto cells = tg::rho_heatmap(n1, n2);
        t.columns = {"t1", "t", "rho", "one_minus_exp_neg_rho", "phase", "gap_ratio"};
        std::vector<double> shade;
        for (const auto& c : cells) {
            t.add({c.t1, c.t, c.rho, c.one_minus_exp_neg_rho,
                   std::string(c.divergent ? "divergent" : tg::to_string(c.phase)), c.gap_ratio});
            shade.push_back(c.divergent ? tg::kInf : c.one_minus_exp_neg_rho);
        }
        if (!a.svg.empty()) {
            std::ofstream svg(a.svg);
            if (!svg) throw UsageError("cannot open svg output '" + a.svg + "'");
            // rows of the picture are t1 values, columns t values
            tg::cli::write_svg_heatmap(svg, n1, n2, shade);
        }
    } else if (!a.slope_t1.empty()) {
        const auto rows = tg::rho_slope_probe(a.t, a.slope_t1);
        t.columns = {"t1", "t", "B", "rho", "drho_dt1"};
        for (const auto& r : rows) t.add({r.t1, r.t, r.B, r.rho, r.drho_dt1});
    } else if (a.M > 0 || a.N > 0) {
        if (a.M < 1 || a.N < 2) throw UsageError("--M and --N must both be given");
        tg::TriangularIsingSpec s{a.t1, a.t, a.M, a.N, a.allow_ordered};
        const auto pair = tg::tri_partition_pair(s);
        t.columns = {"t1", "t", "M", "N", "log_Z", "log_Z_twisted", "one_minus_ratio", "method"};
        t.add({a.t1, a.t, static_cast<long long>(a.M), static_cast<long long>(a.N), pair.log_Z,
               pair.log_Z_twisted, pair.one_minus_ratio.value(), tg::to_string(pair.method)});
    } else {
        const auto r = tg::tri_rho(a.t1, a.t);
        t.columns = {"t1", "t", "rho", "one_minus_exp_neg_rho", "phase", "gap_ratio"};
        t.add({a.t1, a.t, r.rho, -std::expm1(-r.rho), tg::to_string(r.phase), r.gap_ratio});
    }
    out.emit(cfg, t);
    return kExitOk;
}

// ------------------------------------------------------------------ square

struct SquareArgs {
    double a = 0.3;
    double b = 0.3;
    std::string size = "8x8";
    bool decay = false;
    bool gamma = false;
};

void add_square(CLI::App& app, SquareArgs& s) {
    app.add_option("--a", s.a, "coupling on bonds crossed by the twist")->capture_default_str();
    app.add_option("--b", s.b, "coupling along the twist")->capture_default_str();
    app.add_option("--size", s.size, "torus L1xL2")->capture_default_str();
    app.add_flag("--decay", s.decay, "(1 - Z-/Z)^(1/L1) and its L1 -> infinity limit");
    app.add_flag("--gamma", s.gamma, "gamma_k spectrum");
}

int run_square(const SquareArgs& s, Output& out, const ConfigEcho& cfg) {
    const auto [L1, L2] = parse_size(s.size);
    const tg::SquareIsingSpec spec{s.a, s.b, L1, L2};
    Table t;
    if (s.gamma) {
        const auto g = tg::gamma_spectrum(spec);
        t.columns = {"k", "gamma_k"};
        for (std::size_t k = 0; k < g.size(); ++k) t.add({static_cast<long long>(k), g[k]});
    } else if (s.decay) {
        t.columns = {"a", "b", "L1", "L2", "decay", "limit", "mass_gap"};
        t.add({s.a, s.b, static_cast<long long>(L1), static_cast<long long>(L2), tg::square_decay_rate(spec),
               tg::square_decay_rate_limit(spec), spec.mass_gap()});
    } else {
        const auto p = tg::kastening_partition_pair(spec);
        t.columns = {"a", "b", "L1", "L2", "log_Z", "log_Z_twisted", "one_minus_ratio", "method"};
        t.add({s.a, s.b, static_cast<long long>(L1), static_cast<long long>(L2), p.log_Z, p.log_Z_twisted,
               p.one_minus_ratio.value(), tg::to_string(p.method)});
    }
    out.emit(cfg, t);
    return kExitOk;
}

// ------------------------------------------------------------------ oracle

struct LatticeArgs {
    std::string lattice = "square";
    std::string size = "4x2";
    double a = 0.3;  // square couplings
    double b = 0.3;
    double t1 = 0.1;  // triangular couplings as tanh J
    double t = 0.1;
};

void add_lattice(CLI::App& app, LatticeArgs& l) {
    app.add_option("--lattice", l.lattice, "square or triangular")->capture_default_str();
    app.add_option("--size", l.size, "L1xL2 (triangular: NxM)")->capture_default_str();
    app.add_option("--a", l.a, "square coupling across the wall")->capture_default_str();
    app.add_option("--b", l.b, "square coupling along the wall")->capture_default_str();
    app.add_option("--t1", l.t1, "triangular tanh J1")->capture_default_str();
    app.add_option("--t", l.t, "triangular tanh J")->capture_default_str();
}

tg::SpinLattice make_lattice(const LatticeArgs& l) {
    const auto [L1, L2] = parse_size(l.size);
    if (l.lattice == "square") return tg::SpinLattice::square(L1, L2, l.a, l.b);
    if (l.lattice == "triangular") return tg::SpinLattice::triangular_t(L1, L2, l.t1, l.t);
    throw UsageError("unknown lattice '" + l.lattice + "'");
}

struct OracleArgs {
    LatticeArgs lat;
    std::vector<int> ns;
    std::vector<int> walls_a;
    std::vector<int> walls_b;
    std::vector<int> deform_sites;
    int N = 4;
    int M = 2;
    std::vector<double> ts{0.05, 0.025};
    std::string method = "auto";
};

int run_check_inequality(const OracleArgs& o, Output& out, const ConfigEcho& cfg) {
    const auto lat = make_lattice(o.lat);
    std::vector<int> ns = o.ns;
    if (ns.empty())
        for (int n = 1; n < lat.L1(); ++n)
            if (tg::is_power_of_two_multiple(lat.L1(), n) && (lat.is_square() || n % 2 == 0)) ns.push_back(n);
    const auto rows = tg::check_inequality(lat, ns);
    Table t;
    t.columns = {"n", "lhs", "rhs", "regime_flag", "ok"};
    for (const auto& r : rows) t.add({static_cast<long long>(r.n), r.lhs, r.rhs, r.theorem_regime, r.ok});
    out.emit(cfg, t);
    return kExitOk;
}

int run_equivalence(const OracleArgs& o, Output& out, const ConfigEcho& cfg) {
    const auto r = tg::lattice_equivalence_check(o.N, o.M, std::atanh(o.lat.t1), std::atanh(o.lat.t));
    Table t;
    t.columns = {"N", "M", "logZ_a", "logZ_b", "diff"};
    t.add({static_cast<long long>(r.N), static_cast<long long>(r.M), r.log_Z_helical, r.log_Z_straight, r.diff});
    out.emit(cfg, t);
    return kExitOk;
}

int run_mod2(const OracleArgs& o, Output& out, const ConfigEcho& cfg) {
    const auto lat = make_lattice(o.lat);
    const auto wa = o.walls_a.empty() ? std::vector<int>{lat.L1() - 1} : o.walls_a;
    std::vector<int> wb = o.walls_b;
    if (wb.empty())
        for (int c = 0; c < std::min(3, lat.L1()); ++c) wb.push_back(c);
    Table t;
    t.columns = {"check", "log_Z_a", "log_Z_b", "diff", "equal"};
    const auto r = tg::wall_mod2_check(lat, wa, wb);
    t.add({std::string("mod2"), r.lhs, r.rhs, r.diff, r.equal});
    if (!o.deform_sites.empty()) {
        const auto d = tg::wall_deformation_check(lat.with_walls(wa), o.deform_sites);
        t.add({std::string("deformation"), d.lhs, d.rhs, d.diff, d.equal});
    }
    out.emit(cfg, t);
    return kExitOk;
}

int run_sce(const OracleArgs& o, Output& out, const ConfigEcho& cfg) {
    const auto [L1, L2] = parse_size(o.lat.size);
    const auto rows = tg::sce_leading_check(L1, L2, o.ts);
    Table t;
    t.columns = {"t", "log_ratio", "leading", "r"};
    for (const auto& r : rows) t.add({r.t, r.log_ratio, r.leading, r.r});
    out.emit(cfg, t);
    return kExitOk;
}

int run_enumerate(const OracleArgs& o, Output& out, const ConfigEcho& cfg) {
    auto lat = make_lattice(o.lat);
    lat = lat.with_walls(o.walls_a.empty() ? std::vector<int>{lat.L1() - 1} : o.walls_a);
    Table t;
    t.columns = {"method", "log_Z", "log_Z_twisted", "one_minus_ratio"};
    auto add = [&](const tg::PartitionPair& p) {
        t.add({tg::to_string(p.method), p.log_Z, p.log_Z_twisted, p.one_minus_ratio.value()});
    };
    // auto runs whichever engines fit their caps
    const bool fits_enum = lat.sites() <= tg::kEnumerationSiteCap;
    const bool fits_tm = lat.L2() <= tg::kTransferWidthCap;
    const bool any = o.method == "auto";
    if (!any && o.method != "enumeration" && o.method != "transfer" && o.method != "both")
        throw UsageError("--method must be auto, enumeration, transfer or both");
    if (o.method == "enumeration" || o.method == "both" || (any && fits_enum))
        add(tg::enumerate_partition(lat, {}, out.threads).pair);
    if (o.method == "transfer" || o.method == "both" || (any && fits_tm)) add(tg::strip_transfer(lat));
    if (t.rows.empty()) throw tg::ResourceCapError("lattice exceeds both the enumeration and transfer caps",
                                                   tg::kTransferWidthCap);
    out.emit(cfg, t);
    return kExitOk;
}

// --------------------------------------------------------------------- pcm

struct PcmArgs {
    std::string group = "z2";
    std::string subgroup = "full";
    std::string action = "wilson";
    double beta = 0.3;
    int L = 8;
    std::optional<int> charge;
    std::optional<double> j;
    std::vector<int> ns{1, 2, 4};
    int cutoff = 64;
};

void add_pcm(CLI::App& app, PcmArgs& p) {
    app.add_option("--group", p.group, "zN, u1 or su2")->capture_default_str();
    app.add_option("--subgroup", p.subgroup, "trivial, zN or full")->capture_default_str();
    app.add_option("--action", p.action, "wilson or adjoint")->capture_default_str();
    app.add_option("--beta", p.beta, "coupling")->capture_default_str();
    app.add_option("--L", p.L, "chain length")->capture_default_str();
    app.add_option("--charge", p.charge, "abelian irrep label of the correlator");
    app.add_option("--j", p.j, "SU(2) spin of the correlator");
    app.add_option("--n", p.ns, "separations")->delimiter(',')->capture_default_str();
    app.add_option("--cutoff", p.cutoff, "character expansion cutoff")->capture_default_str();
}

tg::TwistSubgroup parse_subgroup(const std::string& s) {
    if (s == "trivial") return tg::TwistSubgroup::trivial();
    if (s == "full") return tg::TwistSubgroup::full();
    if (s.size() > 1 && (s[0] == 'z' || s[0] == 'Z')) {
        try {
            return tg::TwistSubgroup::cyclic(std::stoi(s.substr(1)));
        } catch (const std::logic_error&) {
        }
    }
    throw UsageError("unknown subgroup '" + s + "'");
}

int run_pcm(const PcmArgs& p, Output& out, const ConfigEcho& cfg) {
    const auto g = parse_group(p.group);
    tg::ExpandOptions eo;
    eo.cutoff = p.cutoff;
    const auto chain = tg::make_chain(g, parse_subgroup(p.subgroup), parse_action(p.action, p.beta), p.L, eo);
    const auto R = parse_irrep(g, p.charge, p.j);
    const double wall = tg::wall_projection(chain);
    Table t;
    t.columns = {"n", "lhs", "rhs", "prefactor", "wall_projection", "regime", "ok"};
    for (int n : p.ns) {
        const auto r = tg::check_spin_ty_bound(chain, R, n);
        t.add({static_cast<long long>(n), r.lhs, r.rhs, r.prefactor, wall,
               std::string(r.theorem_regime ? "theorem" : "outside"), r.ok});
    }
    out.emit(cfg, t);
    return kExitOk;
}

// ---------------------------------------------------------------------- mc

struct McArgs {
    std::string size = "8x8";
    double a = 0.3;
    double b = 0.3;
    long long sweeps = 100000;
    long long thermalization = 1000;
    std::uint64_t seed = 1;
    int chains = 1;
    int flips = 1;
    std::vector<int> separations;
    bool audit = false;
};

void add_mc(CLI::App& app, McArgs& m) {
    app.add_option("--size", m.size, "square torus L1xL2")->capture_default_str();
    app.add_option("--a", m.a, "coupling across the wall")->capture_default_str();
    app.add_option("--b", m.b, "coupling along the wall")->capture_default_str();
    app.add_option("--sweeps", m.sweeps, "total sweeps including thermalization")->capture_default_str();
    app.add_option("--thermalization", m.thermalization, "discarded sweeps")->capture_default_str();
    app.add_option("--seed", m.seed, "64-bit seed")->capture_default_str();
    app.add_option("--chains", m.chains, "independent chains")->capture_default_str();
    app.add_option("--flips", m.flips, "sector flip attempts per sweep")->capture_default_str();
    app.add_option("--separations", m.separations, "also estimate <s_0 s_n>")->delimiter(',');
    app.add_flag("--audit", m.audit, "run the 2x2 detailed-balance audit as well");
}

nlohmann::json blocking_json(const tg::BlockingResult& b) {
    return {{"mean", b.mean}, {"error", b.error}, {"tau", b.tau}, {"block_size", b.block_size}};
}

int run_mc(const McArgs& m, Output& out, const ConfigEcho& cfg) {
    const auto [L1, L2] = parse_size(m.size);
    tg::McConfig c;
    c.lattice = tg::SpinLattice::square(L1, L2, m.a, m.b);
    c.sweeps = m.sweeps;
    c.thermalization = m.thermalization;
    c.seed = m.seed;
    c.chains = m.chains;
    c.sector_flips_per_sweep = m.flips;
    c.threads = out.threads;

    const auto est = tg::run_extended_ensemble(c);
    nlohmann::json j;
    j["config"] = tg::cli::config_json(cfg);
    j["ratio"] = est.ratio;
    j["stderr"] = est.stderr_ratio;
    j["acceptance"] = {{"spin", est.spin_acceptance}, {"sector", est.sector_acceptance}};
    j["tau"] = est.tau;
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& ch : est.chains)
        chains.push_back({{"ratio", ch.ratio},
                          {"stderr", ch.stderr_ratio},
                          {"tau", ch.tau},
                          {"visits_untwisted", ch.visits_untwisted},
                          {"visits_twisted", ch.visits_twisted}});
    j["chains"] = chains;

    const double exact = tg::kastening_partition_pair({m.a, m.b, L1, L2}).ratio();
    j["exact"] = exact;
    const double z = est.stderr_ratio > 0 ? (est.ratio - exact) / est.stderr_ratio : 0.0;
    j["z_score"] = z;
    j["agree_3sigma"] = std::fabs(z) <= 3.0;

    if (!m.separations.empty()) {
        nlohmann::json corr = nlohmann::json::array();
        for (const auto& r : tg::mc_correlator(c, m.separations))
            corr.push_back({{"n", r.n}, {"value", r.value}, {"error", r.error}});
        j["correlators"] = corr;
    }
    if (m.audit) {
        tg::McConfig small = c;
        small.lattice = tg::SpinLattice::square(2, 2, m.a, m.b);
        small.chains = 1;
        const auto rep = tg::detailed_balance_audit(small);
        j["detailed_balance"] = {{"max_z", rep.max_z}, {"ok", rep.ok}};
    }

    if (out.format == "csv") {
        Table t;
        t.columns = {"ratio", "stderr", "exact", "z_score", "agree_3sigma", "spin_acceptance", "sector_acceptance",
                     "tau"};
        t.add({est.ratio, est.stderr_ratio, exact, z, std::fabs(z) <= 3.0, est.spin_acceptance,
               est.sector_acceptance, est.tau});
        out.emit(cfg, t);
    } else {
        out.stream() << j.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    CLI::App app{"Twisted-boundary free energies and mass-gap bounds in solvable lattice models", "twistgap"};
    app.require_subcommand(1, 1);
    app.fallthrough();  // global options may follow the subcommand
    Output out;
    std::string config_path;
    app.add_option("--config", config_path, "flat key = value file mirroring the flags");
    app.add_option("--format", out.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--output,-o", out.path, "output path, default stdout");
    app.add_option("--threads", out.threads, "worker threads")->envname("TWISTGAP_THREADS");

    Lgt2dArgs lgt;
    TriArgs tri;
    SquareArgs sq;
    OracleArgs ora;
    PcmArgs pcm;
    McArgs mc;

    auto* c_lgt = app.add_subcommand("lgt2d", "2D gauge theory: twist sectors and the Wilson-loop bound");
    add_lgt2d(*c_lgt, lgt);
    auto* c_tri = app.add_subcommand("tri", "triangular Ising: decay rate, partition pairs, heatmap");
    add_tri(*c_tri, tri);
    auto* c_sq = app.add_subcommand("square", "square Ising closed forms");
    add_square(*c_sq, sq);
    auto* c_pcm = app.add_subcommand("pcm", "principal chiral chain bound");
    add_pcm(*c_pcm, pcm);
    auto* c_mc = app.add_subcommand("mc", "extended-ensemble Monte Carlo for Z-/Z");
    add_mc(*c_mc, mc);

    auto* c_ora = app.add_subcommand("oracle", "brute-force checks");
    c_ora->require_subcommand(1, 1);
    c_ora->fallthrough();
    auto* o_ineq = c_ora->add_subcommand("check-inequality", "<s_0 s_n> against the twist bound");
    add_lattice(*o_ineq, ora.lat);
    o_ineq->add_option("--n", ora.ns, "separations, default every n with L1 = 2^k n")->delimiter(',');
    auto* o_eq = c_ora->add_subcommand("equivalence", "helical against straight triangular torus");
    o_eq->add_option("--N", ora.N, "columns")->capture_default_str();
    o_eq->add_option("--M", ora.M, "sites per column")->capture_default_str();
    o_eq->add_option("--t1", ora.lat.t1, "tanh J1")->capture_default_str();
    o_eq->add_option("--t", ora.lat.t, "tanh J")->capture_default_str();
    auto* o_mod2 = c_ora->add_subcommand("mod2", "wall count mod 2 and gauge deformation");
    add_lattice(*o_mod2, ora.lat);
    o_mod2->add_option("--walls-a", ora.walls_a, "wall columns, default the last")->delimiter(',');
    o_mod2->add_option("--walls-b", ora.walls_b, "wall columns, default 0,1,2")->delimiter(',');
    o_mod2->add_option("--deform", ora.deform_sites, "sites whose spin is flipped")->delimiter(',');
    auto* o_sce = c_ora->add_subcommand("sce", "strong-coupling leading order of log(Z-/Z)");
    o_sce->add_option("--size", ora.lat.size, "L1xL2")->capture_default_str();
    o_sce->add_option("--ts", ora.ts, "values of tanh K")->delimiter(',')->capture_default_str();
    auto* o_enum = c_ora->add_subcommand("enumerate", "partition pair by enumeration and transfer matrix");
    add_lattice(*o_enum, ora.lat);
    o_enum->add_option("--walls", ora.walls_a, "wall columns, default the last")->delimiter(',');
    o_enum->add_option("--method", ora.method, "auto, enumeration, transfer or both")->capture_default_str();

    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty()) {
            const auto extra = config_file_args(config_path, args);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    const CLI::App* leaf = app.get_subcommands().front();
    std::string command = leaf->get_name();
    if (!leaf->get_subcommands().empty()) {
        leaf = leaf->get_subcommands().front();
        command += " " + leaf->get_name();
    }
    ConfigEcho cfg = echo_options(leaf, command);
    cfg.emplace_back("format", out.format);
    cfg.emplace_back("threads", std::to_string(tg::resolve_threads(out.threads)));
    if (!config_path.empty()) cfg.emplace_back("config", config_path);

    try {
        if (c_lgt->parsed()) return run_lgt2d(lgt, out, cfg);
        if (c_tri->parsed()) return run_tri(tri, out, cfg);
        if (c_sq->parsed()) return run_square(sq, out, cfg);
        if (c_pcm->parsed()) return run_pcm(pcm, out, cfg);
        if (c_mc->parsed()) return run_mc(mc, out, cfg);
        if (o_ineq->parsed()) return run_check_inequality(ora, out, cfg);
        if (o_eq->parsed()) return run_equivalence(ora, out, cfg);
        if (o_mod2->parsed()) return run_mod2(ora, out, cfg);
        if (o_sce->parsed()) return run_sce(ora, out, cfg);
        if (o_enum->parsed()) return run_enumerate(ora, out, cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tg::PhaseError& e) {
        std::cerr << "phase error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const tg::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const tg::ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what()
                  << "\nhint: use a smaller lattice, --method transfer, or the closed-form subcommand\n";
        return kExitCap;
    } catch (const tg::TruncationError& e) {
        std::cerr << "truncation: " << e.what();
        if (e.suggested_cutoff() > 0) std::cerr << " (try --cutoff " << e.suggested_cutoff() << ")";
        std::cerr << '\n';
        return kExitNumeric;
    } catch (const tg::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
