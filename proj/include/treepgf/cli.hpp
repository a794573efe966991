#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: argument parsing, dispatch and JSON output.
 *
 * Every command prints one JSON object
 *
 *     {"command", "parameters", "payload", "version", "timing"}
 *
 * with rationals as canonical "p/q" strings and reals as decimal strings with
 * their digit count. `--format table` prints the same data flattened to
 * "key: value" lines; `--no-timing` drops the timing field so output is
 * reproducible byte for byte.
 *
 * Exit codes: 0 success, 1 verification mismatch or internal failure,
 * 2 usage error (bad flag, out-of-range size, infeasible enumeration).
 */

#include <treepgf/asymptotics.hpp>
#include <treepgf/bst.hpp>
#include <treepgf/cumulants.hpp>
#include <treepgf/dst.hpp>
#include <treepgf/dst_enum.hpp>
#include <treepgf/high_real.hpp>
#include <treepgf/moments.hpp>
#include <treepgf/montecarlo.hpp>
#include <treepgf/types.hpp>
#include <treepgf/verify.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepgf::cli {

inline constexpr const char* kVersion = "0.1.0";

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CommandResult {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json payload = nlohmann::json::object();
    double seconds = 0;
    int exit_code = 0;

    nlohmann::json to_json(bool with_timing = true) const {
        nlohmann::json j = {{"command", command}, {"parameters", parameters}, {"payload", payload}, {"version", kVersion}};
        if (with_timing) j["timing"] = {{"seconds", seconds}};
        return j;
    }
};

namespace detail {

inline void require_range(const char* what, std::size_t v, std::size_t lo, std::size_t hi) {
    if (v < lo || v > hi)
        throw usage_error(std::string(what) + " must be in " + std::to_string(lo) + ".." + std::to_string(hi) + ", got "
                          + std::to_string(v));
}

inline nlohmann::json moments_json(const Moments& m) { return m.to_json(); }

inline nlohmann::json rationals(const std::vector<Rational>& v, std::size_t from = 0) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = from; i < v.size(); ++i) arr.push_back(v[i].str());
    return arr;
}

/// Factorial moments 0..order plus cumulants 1..order derived from them.
inline nlohmann::json higher_moments(const std::vector<Rational>& fact) {
    auto kappa = factorial_to_cumulants(fact);
    return {{"factorial_moments", rationals(fact)}, {"cumulants", rationals(kappa, 1)}};
}

inline std::vector<Rational> factorial_moments_of(const Poly& p, unsigned order) {
    std::vector<Rational> m{p.sum()};
    for (unsigned r = 1; r <= order; ++r) m.push_back(derivative_at_one(p, r));
    return m;
}

inline void flatten(const nlohmann::json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    if (j.is_array()) {
        const bool scalars = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
        if (scalars) {
            out << prefix << ":";
            for (const auto& e : j) out << " " << (e.is_string() ? e.get<std::string>() : e.dump());
            out << "\n";
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        return;
    }
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
}

/// Exact PGF a simulation can be tested against, when cheap enough to build.
inline std::optional<Poly> exact_pgf_for(sim::Tree tree, Search s, Keys k, std::size_t n) {
    if (tree == sim::Tree::bst) {
        if (s == Search::unsuccessful) return n <= 400 ? std::optional(bst::unsuccessful_pgf(n)) : std::nullopt;
        if (s == Search::successful) return n <= 400 ? std::optional(bst::successful_pgf(n)) : std::nullopt;
        return n <= 40 ? std::optional(bst::path_length_pgf(n)) : std::nullopt;
    }
    if (k == Keys::infinite) {
        if (s == Search::unsuccessful) return n <= 100 ? std::optional(dst::unsuccessful_pgf_infinite(n)) : std::nullopt;
        if (s == Search::successful) return n <= 100 ? std::optional(dst::successful_pgf_infinite(n)) : std::nullopt;
        return n <= 40 ? std::optional(dst::path_length_pgf(n)) : std::nullopt;
    }
    if (n >= 2 && n <= 5) return dst::golden_table(s, k, n);
    if (n == 1) return Poly::monomial(s == Search::path_length ? 0 : 1);
    return std::nullopt;
}

inline std::optional<Rational> exact_mean_for(sim::Tree tree, Search s, Keys k, std::size_t n) {
    if (tree == sim::Tree::bst) {
        if (s == Search::unsuccessful) return bst::unsuccessful_moments(n).g;
        if (s == Search::successful) return bst::successful_moments(n).g;
        if (n <= 20000) return bst::path_length_means(n).back();
        return std::nullopt;
    }
    if (auto p = exact_pgf_for(tree, s, k, n)) return pgf_mean(*p);
    return std::nullopt;
}

struct Options {
    std::string search = "unsuccessful";
    std::string keys = "infinite";
    std::string source = "auto";
    std::string family;
    std::size_t n = 0;
    unsigned order = 2;
    unsigned width = 0;
    unsigned jobs = 1;
    unsigned max_order = 8;
    unsigned precision = 20;
    bool symmetry = false;
    bool check_width = false;
    bool fast = false;
    bool full = false;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = sim::kDefaultSeed;
    std::vector<std::size_t> grid;
};

inline CommandResult bst_pgf(const Options& o) {
    const Search s = parse_search(o.search);
    require_range("n", o.n, 1, s == Search::path_length ? 120 : 5000);
    Poly p = s == Search::unsuccessful ? bst::unsuccessful_pgf(o.n)
           : s == Search::successful   ? bst::successful_pgf(o.n)
                                       : bst::path_length_pgf(o.n);
    return {"bst pgf", {{"search", to_string(s)}, {"n", o.n}},
            {{"pgf", p.to_json()}, {"mean", pgf_mean(p).str()}, {"variance", pgf_variance(p).str()}}};
}

inline CommandResult bst_moments(const Options& o) {
    const Search s = parse_search(o.search);
    require_range("order", o.order, 1, cumulants::kMaxOrder);
    const bool higher = o.order > 2;
    require_range("n", o.n, 1, s == Search::path_length ? (higher ? 2000 : 20000) : (higher ? 2000 : 100000));
    nlohmann::json payload;
    if (s == Search::unsuccessful) payload = moments_json(bst::unsuccessful_moments(o.n));
    else if (s == Search::successful) payload = moments_json(bst::successful_moments(o.n));
    else payload = moments_json(bst::path_length_moments(o.n));
    if (higher) {
        std::vector<Rational> fact;
        if (s == Search::path_length) fact = bst::path_length_factorial_moments(o.n, o.order).m;
        else fact = factorial_moments_of(s == Search::unsuccessful ? bst::unsuccessful_pgf(o.n) : bst::successful_pgf(o.n), o.order);
        payload.update(higher_moments(fact));
    }
    return {"bst moments", {{"search", to_string(s)}, {"n", o.n}, {"order", o.order}}, payload};
}

inline Poly dst_pgf_from(const std::string& source, Search s, Keys k, std::size_t n, unsigned jobs, std::string& used) {
    used = source;
    if (used == "auto") used = k == Keys::infinite ? "recursion" : (n >= 2 && n <= 5 ? "golden" : "enumerate");
    if (used == "recursion") {
        if (k == Keys::finite) throw usage_error("finite keys have no recursion; use --source golden or enumerate");
        require_range("n", n, 1, s == Search::path_length ? 120 : 400);
        return verify::detail::recursion_pgf(s, n);
    }
    if (used == "golden") return dst::golden_table(s, k, n);
    if (used == "enumerate") return dst::enumerate(n, s, k, {0, jobs, false}).pgf;
    throw usage_error("unknown source '" + source + "' (expected auto|recursion|golden|enumerate)");
}

inline CommandResult dst_pgf(const Options& o) {
    const Search s = parse_search(o.search);
    const Keys k = parse_keys(o.keys);
    std::string used;
    Poly p = dst_pgf_from(o.source, s, k, o.n, o.jobs, used);
    return {"dst pgf", {{"search", to_string(s)}, {"keys", to_string(k)}, {"n", o.n}, {"source", used}},
            {{"pgf", p.to_json()}, {"mean", pgf_mean(p).str()}, {"variance", pgf_variance(p).str()}}};
}

inline CommandResult dst_moments(const Options& o) {
    const Search s = parse_search(o.search);
    const Keys k = parse_keys(o.keys);
    nlohmann::json payload;
    if (s == Search::path_length && k == Keys::infinite) {
        require_range("n", o.n, 1, 2000);
        payload = moments_json(dst::path_length_moments(o.n));
    } else {
        std::string used;
        Poly p = dst_pgf_from(o.source, s, k, o.n, o.jobs, used);
        payload = moments_json(Moments::from_factorial(o.n, pgf_mean(p), derivative_at_one(p, 2)));
    }
    return {"dst moments", {{"search", to_string(s)}, {"keys", to_string(k)}, {"n", o.n}}, payload};
}

inline CommandResult dst_enumerate(const Options& o) {
    const Search s = parse_search(o.search);
    const Keys k = parse_keys(o.keys);
    auto res = dst::enumerate(o.n, s, k, {o.width, o.jobs, o.symmetry});
    nlohmann::json payload = res.to_json();
    if (o.check_width) {
        if (k != Keys::infinite) throw usage_error("--check-width applies to infinite keys only");
        if (s == Search::path_length) throw usage_error("--check-width applies to searches only");
        payload["width_stable"] = dst::width_stability_check(o.n, s, o.jobs);
    }
    return {"dst enumerate",
            {{"search", to_string(s)}, {"keys", to_string(k)}, {"n", o.n}, {"width", res.width},
             {"jobs", o.jobs}, {"symmetry", o.symmetry}, {"check_width", o.check_width}},
            payload};
}

inline CommandResult cumulants_cmd(const Options& o) {
    require_range("max-order", o.max_order, 2, cumulants::kMaxOrder);
    check_digits(o.precision);
    auto table = cumulants::cumulant_table(o.max_order, o.precision);
    return {"cumulants", {{"max_order", o.max_order}, {"precision", o.precision}}, {{"rows", table.to_json()}}};
}

inline CommandResult constants_cmd(const Options& o) {
    check_digits(o.precision);
    const unsigned d = o.precision;
    const HighReal k2 = cumulants::kappa_leading_constant(2, d);
    HighReal closed{Real(7) - 2 * pi() * pi() / 3, 0, d};
    return {"constants",
            {{"precision", d}},
            {{"alpha", asymptotics::constant_alpha(d).to_json()},
             {"beta", asymptotics::constant_beta(d).to_json()},
             {"Q", asymptotics::constant_Q(d).to_json()},
             {"C", asymptotics::constant_C(d).to_json()},
             {"D", asymptotics::constant_D(d).to_json()},
             {"kappa2_leading", k2.to_json()},
             {"seven_minus_two_pi2_over_3", closed.to_json()}}};
}

inline std::size_t family_cap(asymptotics::Family f) {
    using asymptotics::Family;
    switch (f) {
        case Family::bst_unsucc_mean:
        case Family::bst_unsucc_var:
        case Family::bst_succ_mean:
        case Family::bst_succ_var:
        case Family::bst_L_mean: return 100000;
        case Family::bst_L_var: return 10000;
        default: return 2000;
    }
}

inline CommandResult asymptotics_cmd(const Options& o) {
    std::vector<std::size_t> grid = o.grid;
    if (o.family == "kappa") {
        require_range("max-order", o.max_order, 2, 5);
        if (grid.empty()) grid = {20, 40, 80, 160};
        for (auto n : grid) require_range("grid value", n, 1, 400);
        auto kc = asymptotics::kappa_convergence(o.max_order, grid);
        return {"asymptotics", {{"family", "kappa"}, {"grid", grid}, {"max_order", o.max_order}}, kc.to_json()};
    }
    const auto f = asymptotics::parse_family(o.family);
    if (grid.empty()) grid = f == asymptotics::Family::bst_L_mean ? std::vector<std::size_t>{32, 64, 128, 256, 512, 1024}
                                                                  : std::vector<std::size_t>{100, 1000};
    for (auto n : grid) require_range("grid value", n, 2, family_cap(f));
    auto rep = asymptotics::convergence_report(f, grid);
    return {"asymptotics", {{"family", o.family}, {"grid", grid}}, rep.to_json()};
}

inline CommandResult simulate_tree(const Options& o, sim::Tree tree) {
    const Search s = parse_search(o.search);
    const Keys k = parse_keys(o.keys);
    if (o.trials < 1) throw usage_error("trials must be >= 1");
    require_range("n", o.n, 1, tree == sim::Tree::bst ? 100000 : (k == Keys::finite ? 62 : 100000));
    sim::SimConfig cfg{tree, o.n, o.trials, o.seed, s, k, o.jobs};
    auto sum = sim::simulate(cfg);
    nlohmann::json payload = sum.to_json();
    if (auto mean = exact_mean_for(tree, s, k, o.n)) {
        payload["exact_mean"] = mean->str();
        if (sum.standard_error > 0) payload["mean_z_score"] = (sum.mean - mean->to_double()) / sum.standard_error;
    }
    if (auto p = exact_pgf_for(tree, s, k, o.n)) payload["chi_square"] = sim::chi_square_test(sum.histogram, *p).to_json();
    nlohmann::json params = {{"n", o.n}, {"trials", o.trials}, {"seed", o.seed}, {"search", to_string(s)}};
    if (tree == sim::Tree::dst) params["keys"] = to_string(k);
    return {tree == sim::Tree::bst ? "simulate bst" : "simulate dst", params, payload};
}

inline CommandResult simulate_covariance(const Options& o) {
    require_range("n", o.n, 2, 100000);
    if (o.trials < 2) throw usage_error("covariance needs at least 2 trials");
    auto est = sim::simulate_dst_cost_covariance(o.n, o.trials, o.seed, o.jobs);
    nlohmann::json payload = est.to_json();
    payload["D"] = asymptotics::constant_D(20).to_json();
    if (o.n <= 128) {
        const Rational exact = dst::successful_pair_covariance(o.n);
        payload["exact_covariance"] = exact.str();
        payload["exact_n_covariance"] = (Rational(static_cast<long>(o.n)) * exact).to_double();
        if (est.standard_error > 0) payload["z_score"] = (est.covariance - exact.to_double()) / est.standard_error;
    }
    return {"simulate covariance", {{"n", o.n}, {"trials", o.trials}, {"seed", o.seed}}, payload};
}

inline CommandResult verify_cmd(const Options& o) {
    if (o.fast && o.full) throw usage_error("--fast and --full are exclusive");
    const auto tier = o.fast ? verify::Tier::fast : o.full ? verify::Tier::full : verify::Tier::standard;
    auto rep = verify::run(tier, o.jobs);
    CommandResult r{"verify", {{"tier", verify::to_string(tier)}, {"jobs", o.jobs}}, rep.to_json()};
    r.exit_code = rep.all_passed() ? 0 : 1;
    return r;
}

}  // namespace detail

/// Parses args (without the program name), runs the command and writes its
/// output; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using detail::Options;
    Options o;
    std::string format = "json";
    bool no_timing = false;
    std::function<CommandResult()> action;

    CLI::App app{"Exact distributions of search costs in random BSTs and DSTs", "treepgf"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    app.add_flag("--no-timing", no_timing, "Omit the timing field");

    const std::vector<std::string> searches{"unsuccessful", "successful", "pathlength"};
    auto search_opt = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("--search", o.search, "unsuccessful|successful|pathlength")->check(CLI::IsMember(searches));
        if (required) opt->required();
    };
    auto keys_opt = [&](CLI::App* c) {
        c->add_option("--keys", o.keys, "infinite|finite (default infinite)")->check(CLI::IsMember({"infinite", "finite"}));
    };
    auto n_opt = [&](CLI::App* c) { c->add_option("--n", o.n, "Number of keys")->required(); };
    auto jobs_opt = [&](CLI::App* c) { c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1U, 256U)); };
    auto leaf = [&](CLI::App* c, std::function<CommandResult(const Options&)> f) {
        c->callback([&action, &o, f] { action = [&o, f] { return f(o); }; });
    };

    auto* bst = app.add_subcommand("bst", "Binary search tree PGFs and moments");
    bst->require_subcommand(1);
    auto* bst_pgf = bst->add_subcommand("pgf", "Exact PGF");
    search_opt(bst_pgf, true);
    n_opt(bst_pgf);
    leaf(bst_pgf, detail::bst_pgf);
    auto* bst_mom = bst->add_subcommand("moments", "Exact moments");
    search_opt(bst_mom, true);
    n_opt(bst_mom);
    bst_mom->add_option("--order", o.order, "Highest factorial moment (1..8)");
    leaf(bst_mom, detail::bst_moments);

    auto* dst = app.add_subcommand("dst", "Digital search tree PGFs, moments and enumeration");
    dst->require_subcommand(1);
    auto* dst_pgf = dst->add_subcommand("pgf", "Exact PGF");
    search_opt(dst_pgf, true);
    keys_opt(dst_pgf);
    n_opt(dst_pgf);
    dst_pgf->add_option("--source", o.source, "auto|recursion|golden|enumerate");
    jobs_opt(dst_pgf);
    leaf(dst_pgf, detail::dst_pgf);
    auto* dst_mom = dst->add_subcommand("moments", "Exact mean and variance");
    search_opt(dst_mom, true);
    keys_opt(dst_mom);
    n_opt(dst_mom);
    dst_mom->add_option("--source", o.source, "auto|recursion|golden|enumerate");
    jobs_opt(dst_mom);
    leaf(dst_mom, detail::dst_moments);
    auto* dst_enum = dst->add_subcommand("enumerate", "Exhaustive enumeration of bit matrices");
    search_opt(dst_enum, true);
    keys_opt(dst_enum);
    n_opt(dst_enum);
    dst_enum->add_option("--width", o.width, "Bits per key (default n)");
    dst_enum->add_flag("--symmetry", o.symmetry, "Use bit-complement symmetry");
    dst_enum->add_flag("--check-width", o.check_width, "Also compare widths n and n+1");
    jobs_opt(dst_enum);
    leaf(dst_enum, detail::dst_enumerate);

    auto* cum = app.add_subcommand("cumulants", "Limiting cumulant constants of BST path length");
    cum->add_option("--max-order", o.max_order, "Highest order (2..8)");
    cum->add_option("--precision", o.precision, "Decimal digits (1..40)");
    leaf(cum, detail::cumulants_cmd);

    auto* con = app.add_subcommand("constants", "Asymptotic constants");
    con->add_option("--precision", o.precision, "Decimal digits (1..40)");
    leaf(con, detail::constants_cmd);

    auto* asy = app.add_subcommand("asymptotics", "Exact values against asymptotic expansions");
    asy->add_option("--family", o.family, "Expansion family, or 'kappa'")->required();
    asy->add_option("--grid", o.grid, "Comma-separated n values")->delimiter(',');
    asy->add_option("--max-order", o.max_order, "Highest cumulant for --family kappa (2..5)");
    leaf(asy, detail::asymptotics_cmd);

    auto* simc = app.add_subcommand("simulate", "Monte Carlo simulation");
    simc->require_subcommand(1);
    for (auto [name, tree] : {std::pair{"bst", sim::Tree::bst}, std::pair{"dst", sim::Tree::dst}}) {
        auto* c = simc->add_subcommand(name, std::string("Simulate ") + name + " search costs");
        search_opt(c, true);
        if (tree == sim::Tree::dst) keys_opt(c);
        n_opt(c);
        c->add_option("--trials", o.trials, "Number of trials");
        c->add_option("--seed", o.seed, "RNG seed");
        jobs_opt(c);
        const sim::Tree t = tree;
        leaf(c, [t](const Options& opt) { return detail::simulate_tree(opt, t); });
    }
    auto* cov = simc->add_subcommand("covariance", "Covariance of two successful costs in one DST");
    n_opt(cov);
    cov->add_option("--trials", o.trials, "Number of trials");
    cov->add_option("--seed", o.seed, "RNG seed");
    jobs_opt(cov);
    leaf(cov, detail::simulate_covariance);

    auto* ver = app.add_subcommand("verify", "Cross-check recursions, tables and enumeration");
    ver->add_flag("--fast", o.fast, "Enumerations up to n=4 only");
    ver->add_flag("--full", o.full, "Include n=5 finite-key unsuccessful search");
    jobs_opt(ver);
    leaf(ver, detail::verify_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    CommandResult result;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        result = action();
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    const auto j = result.to_json(!no_timing);
    if (format == "table") detail::flatten(j, "", out);
    else out << j.dump(2) << "\n";
    return result.exit_code;
}

}  // namespace treepgf::cli
