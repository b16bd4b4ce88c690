// tools/latgen.cpp: command-line driver for the experiments.
//
// Exit status: 0 when every check passes, 2 when a check fails, 1 on
// operational errors (bad arguments, guards, sampler failures).

#include "latgen/latgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace latgen;

struct Options {
    std::string n;
    std::optional<long> m;
    std::optional<long> m_offset;
    std::string C;
    std::optional<std::uint64_t> reps, samples, seed;
    std::optional<std::size_t> workers;
    std::string out;
    std::string config;
    std::string policy;
    bool paper_scale = false;
    int precision = kDefaultPrecision;
    // lattice-based subcommands
    std::string lattice;
    std::string B;
    std::string nu;
    bool allow_out_of_hypothesis = false;
};

std::pair<std::size_t, std::size_t> parse_n_range(const std::string& s) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) {
        const auto v = std::stoul(s);
        return {v, v};
    }
    return {std::stoul(s.substr(0, dash)), std::stoul(s.substr(dash + 1))};
}

ExperimentConfig build_config(const Options& o, const std::string& kind) {
    ExperimentConfig c;
    if (!o.config.empty()) c = config_from_json(load_json_file(o.config), c);
    c.kind = kind;
    if (o.paper_scale) c.apply_paper_scale();
    if (!o.n.empty()) std::tie(c.n_min, c.n_max) = parse_n_range(o.n);
    if (o.m_offset) c.m_offset = *o.m_offset;
    if (o.m) {
        if (c.n_min != c.n_max) throw std::invalid_argument("--m needs a single --n; use --m-offset for ranges");
        c.m_offset = *o.m - static_cast<long>(c.n_min);
    }
    if (!o.C.empty()) c.C = parse_integer(o.C);
    if (o.reps) c.reps = *o.reps;
    if (o.samples) c.samples = *o.samples;
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (!o.out.empty()) c.out = o.out;
    if (!o.policy.empty()) c.policy = parse_policy(o.policy);
    c.validate();
    return c;
}

void emit(const CsvTable& t, const std::string& out) {
    if (out.empty() || out == "-") {
        write_csv(std::cout, t);
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    write_csv(f, t);
}

int summarize(const std::vector<Check>& checks) {
    for (const auto& c : checks) std::cerr << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << c.detail << '\n';
    return all_pass(checks) ? 0 : 2;
}

int cmd_unimodular(const Options& o) {
    const auto cfg = build_config(o, "unimodular");
    const ZetaContext ctx(o.precision);
    const auto rep = run_unimodular_experiment(cfg, ctx);
    emit(to_table(rep), cfg.out);
    for (const auto& row : rep.rows)
        std::cerr << "n=" << row.n << " m=" << row.m << " average " << fmt_double(row.average().get_d(), 6)
                  << " min " << fmt_double(row.minimum().get_d(), 6) << " max "
                  << fmt_double(row.maximum().get_d(), 6) << " ideal " << to_decimal(row.ideal.lo(), 6) << '\n';
    return summarize(rep.checks);
}

int cmd_coprime(const Options& o) {
    std::uint64_t N = 1000;
    if (!o.n.empty()) N = parse_n_range(o.n).second;
    const auto t = run_coprime_table(N);
    emit(to_table(t), o.out);
    return summarize(t.checks);
}

int cmd_bounds(const Options& o) {
    long n_max = 15;
    if (!o.n.empty()) n_max = static_cast<long>(parse_n_range(o.n).second);
    const ZetaContext ctx(o.precision);
    const auto t = run_bounds_table(n_max, ctx);
    emit(to_table(t), o.out);
    return summarize(t.checks);
}

int cmd_lemma(const Options& o) {
    std::vector<LemmaInstance> instances;
    if (!o.lattice.empty()) {
        const auto j = load_json_file(o.lattice);
        if (o.B.empty()) throw std::invalid_argument("--B is required with --lattice");
        instances.push_back({o.lattice, lattice_from_json(j), parse_rational(o.B)});
    } else {
        instances = default_lemma_instances();
    }
    const auto rep = run_lemma_verification(instances);
    emit(to_table(rep), o.out);
    return summarize(rep.checks);
}

// The lattice file may carry "sublattice": [[...], ...] (n vectors) and "B1".
int cmd_tv(const Options& o) {
    std::vector<TvResult> results;
    if (!o.lattice.empty()) {
        const auto j = load_json_file(o.lattice);
        const auto L = lattice_from_json(j);
        const auto sub = vectors_from_json(j.at("sublattice"), L.dim());
        const Rational B1 = !o.B.empty() ? parse_rational(o.B) : rational_from_json(j.at("B1"));
        results.push_back(run_tv_check(L, sub, B1, o.lattice));
    } else {
        for (const auto& inst : default_tv_instances()) results.push_back(run_tv_check(inst));
    }
    std::vector<Check> checks;
    for (const auto& r : results) {
        auto c = tv_checks(r);
        checks.insert(checks.end(), c.begin(), c.end());
    }
    emit(to_table(results), o.out);
    return summarize(checks);
}

int cmd_fullrank(const Options& o) {
    std::vector<std::pair<std::string, LatticeBasis>> lattices;
    if (!o.lattice.empty()) {
        lattices.emplace_back(o.lattice, lattice_from_json(load_json_file(o.lattice)));
    } else {
        lattices.emplace_back("Z^2", LatticeBasis::integer_lattice(2));
        lattices.emplace_back("skew(1,1/2;0,1)",
                              LatticeBasis(RationalMatrix{{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1)}}));
    }
    const std::uint64_t trials = o.samples.value_or(10000);
    const std::uint64_t seed = o.seed.value_or(ExperimentConfig{}.seed);
    std::optional<Rational> nu;
    if (!o.nu.empty()) nu = parse_rational(o.nu);
    CsvTable t;
    t.header = {{"kind", "fullrank-check"}, {"rng", rng_provenance(seed)}, {"trials", trials}};
    t.columns = {"lattice", "n", "B", "threshold", "in_hypothesis", "trials", "full_rank", "frequency", "wilson_radius"};
    std::vector<Check> checks;
    for (std::size_t i = 0; i < lattices.size(); ++i) {
        const auto& [name, L] = lattices[i];
        RngStream rng(seed, i);
        const Rational threshold = fullrank_threshold(L.dim(), nu.value_or(L.nu_upper()), L.precision());
        const Rational B = o.B.empty() ? threshold : parse_rational(o.B);
        if (B < threshold && !o.allow_out_of_hypothesis)
            throw std::invalid_argument(name + ": B below the threshold " + to_decimal(threshold, 6) +
                                        " (pass --allow-out-of-hypothesis to run anyway)");
        const auto r = run_fullrank_check(L, B, trials, rng, nu);
        t.rows.push_back({name, std::to_string(r.n), to_string(r.B), to_string(r.threshold),
                          r.in_hypothesis ? "1" : "0", std::to_string(r.trials), std::to_string(r.full_rank),
                          fmt_double(r.frequency(), 8), fmt_double(r.wilson(), 8)});
        if (!r.in_hypothesis) std::cerr << name << ": out of hypothesis, frequency reported only\n";
        auto c = fullrank_checks(r, name);
        checks.insert(checks.end(), c.begin(), c.end());
    }
    emit(t, o.out);
    return summarize(checks);
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--n", o.n, "dimension or range, e.g. 3 or 1-4");
    sub->add_option("--m", o.m, "columns per matrix (single n only)");
    sub->add_option("--m-offset", o.m_offset, "m - n (default 1)");
    sub->add_option("--C", o.C, "coordinate bound for random generators");
    sub->add_option("--reps", o.reps, "parallelepipeds per n");
    sub->add_option("--samples", o.samples, "samples per parallelepiped (trials for fullrank-check)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--out", o.out, "CSV output path (default stdout)");
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--policy", o.policy, "random or cube");
    sub->add_option("--precision", o.precision, "decimal digits for enclosures");
    sub->add_flag("--paper-scale", o.paper_scale, "R = 1000, C = 10^18, n up to 15");
    sub->add_option("--lattice", o.lattice, "lattice JSON file");
    sub->add_option("--B", o.B, "window bound (B1 for tv-check)");
    sub->add_option("--nu", o.nu, "covering-radius upper bound to use for thresholds");
    sub->add_flag("--allow-out-of-hypothesis", o.allow_out_of_hypothesis, "run below the window threshold");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unimodularity and lattice-generation experiments"};
    app.require_subcommand(1);
    Options o;
    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(const Options&);
    };
    const Cmd cmds[] = {
        {"unimodular", "random matrices from random parallelepipeds", cmd_unimodular},
        {"coprime", "exact coprimality probabilities on [0, N]^2", cmd_coprime},
        {"bounds-table", "certified bound constants per dimension", cmd_bounds},
        {"lemma-verify", "window and hyperplane counting bounds", cmd_lemma},
        {"tv-check", "coset distribution of window points", cmd_tv},
        {"fullrank-check", "full-rank frequency of window samples", cmd_fullrank},
    };
    std::vector<std::pair<CLI::App*, const Cmd*>> subs;
    for (const auto& c : cmds) {
        auto* s = app.add_subcommand(c.name, c.help);
        add_common(s, o);
        subs.emplace_back(s, &c);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        for (auto& [s, c] : subs)
            if (s->parsed()) return c->fn(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
