// include/latgen/experiments.hpp: Monte Carlo and exact experiment drivers
// with CSV reports.

#pragma once

#include "latgen/bounds.hpp"
#include "latgen/exactmat.hpp"
#include "latgen/groupgen.hpp"
#include "latgen/lattice.hpp"
#include "latgen/rng.hpp"
#include "latgen/sampling.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace latgen {

// ---------------------------------------------------------------------------
// Statistics.

inline constexpr double kWilsonZ = 1.959963984540054; // two-sided 95%
inline constexpr double kToleranceRadii = 3.0;
inline constexpr double kSquareCaseCeiling = 0.001;
inline constexpr double kPublishedSpread = 0.0366;

// Half-width of the Wilson score interval for `successes` out of `trials`.
inline double wilson_radius(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ) {
    if (trials == 0) return 0.0;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
};

inline bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

inline std::string fmt_double(double x, int digits = 17) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Configuration.

enum class ParallelepipedPolicy { random, cube };

inline std::string to_string(ParallelepipedPolicy p) { return p == ParallelepipedPolicy::cube ? "cube" : "random"; }

inline ParallelepipedPolicy parse_policy(const std::string& s) {
    if (s == "random") return ParallelepipedPolicy::random;
    if (s == "cube") return ParallelepipedPolicy::cube;
    throw std::invalid_argument("unknown parallelepiped policy: " + s);
}

struct ExperimentConfig {
    std::string kind = "unimodular";
    std::size_t n_min = 1;
    std::size_t n_max = 4;
    long m_offset = 1; // m = n + m_offset
    Integer C = 10000;
    std::uint64_t reps = 100;     // parallelepipeds per n
    std::uint64_t samples = 10000; // matrices per parallelepiped
    std::uint64_t seed = 0x5eed'1a77'1ce5'0001ULL;
    std::size_t workers = 1;
    std::string out;
    bool paper_scale = false;
    ParallelepipedPolicy policy = ParallelepipedPolicy::random;
    std::uint64_t max_rejects = kDefaultMaxRejects;

    void validate() const {
        if (n_min < 1 || n_max < n_min) throw std::invalid_argument("config: need 1 <= n_min <= n_max");
        if (m_offset < 0) throw std::invalid_argument("config: m must be >= n");
        if (C < 1) throw std::invalid_argument("config: C must be >= 1");
        if (reps < 1 || samples < 1 || workers < 1 || max_rejects < 1)
            throw std::invalid_argument("config: counts must be >= 1");
    }

    // R = 1000 parallelepipeds, C = 10^18, n up to 15.
    void apply_paper_scale() {
        paper_scale = true;
        reps = 1000;
        samples = 10000;
        C = pow10(18);
        if (n_max < 15 && n_min == 1) n_max = 15;
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"kind", c.kind},
            {"n_min", c.n_min},
            {"n_max", c.n_max},
            {"m_offset", c.m_offset},
            {"C", c.C.get_str()},
            {"reps", c.reps},
            {"samples", c.samples},
            {"seed", c.seed},
            {"workers", c.workers},
            {"out", c.out},
            {"paper_scale", c.paper_scale},
            {"policy", to_string(c.policy)},
            {"max_rejects", c.max_rejects}};
}

// Missing keys keep their defaults. Integers may be JSON numbers or strings.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c = {}) {
    auto integer = [](const nlohmann::json& v) {
        return v.is_string() ? parse_integer(v.get<std::string>()) : Integer(v.get<long>());
    };
    if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
    if (j.contains("n")) {
        c.n_min = c.n_max = j.at("n").get<std::size_t>();
    }
    if (j.contains("n_min")) c.n_min = j.at("n_min").get<std::size_t>();
    if (j.contains("n_max")) c.n_max = j.at("n_max").get<std::size_t>();
    if (j.contains("m_offset")) c.m_offset = j.at("m_offset").get<long>();
    if (j.contains("C")) c.C = integer(j.at("C"));
    if (j.contains("reps")) c.reps = j.at("reps").get<std::uint64_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<std::size_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("paper_scale")) c.paper_scale = j.at("paper_scale").get<bool>();
    if (j.contains("policy")) c.policy = parse_policy(j.at("policy").get<std::string>());
    if (j.contains("max_rejects")) c.max_rejects = j.at("max_rejects").get<std::uint64_t>();
    return c;
}

// Shard r of dimension n draws from stream (n << 32) | r.
inline std::uint64_t stream_id(std::size_t n, std::uint64_t shard) {
    return (static_cast<std::uint64_t>(n) << 32) | (shard & 0xffff'ffffULL);
}

inline nlohmann::json rng_provenance(std::uint64_t seed) {
    return {{"algorithm", std::string(RngStream::algorithm_id)},
            {"seed", seed},
            {"key", "seed as two 32-bit words, low word first"},
            {"counter", "(block index: 64 bits, stream id: 64 bits)"},
            {"stream_layout", "stream id = (n << 32) | parallelepiped index"}};
}

// ---------------------------------------------------------------------------
// CSV with a JSON header line: "# {json}", then the column row, then data.

struct CsvTable {
    nlohmann::json header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string csv_cell(const std::string& c) {
    if (c.find_first_of(",\"\n") == std::string::npos) return c;
    std::string q = "\"";
    for (char ch : c) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                out.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back();
        } else {
            out.back() += ch;
        }
    }
    if (quoted) throw std::runtime_error("csv: unterminated quote");
    return out;
}

} // namespace detail

inline void write_csv(std::ostream& os, const CsvTable& t) {
    os << "# " << t.header.dump() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << detail::csv_cell(t.columns[i]);
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << detail::csv_cell(r[i]);
        os << '\n';
    }
}

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("csv: missing JSON header line");
    t.header = nlohmann::json::parse(line.substr(2));
    if (!std::getline(is, line)) throw std::runtime_error("csv: missing column row");
    t.columns = detail::csv_split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto r = detail::csv_split(line);
        if (r.size() != t.columns.size()) throw std::runtime_error("csv: ragged row");
        t.rows.push_back(std::move(r));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Unimodularity of random matrices from random parallelepipeds.

struct ParallelepipedResult {
    std::uint64_t successes = 0;
    std::uint64_t draws = 0;     // box draws spent by the rejection sampler
    std::uint64_t resamples = 0; // singular generator sets redrawn
    friend bool operator==(const ParallelepipedResult&, const ParallelepipedResult&) = default;
};

struct UnimodularRow {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t samples = 0;
    std::vector<ParallelepipedResult> results;
    Interval ideal;

    std::uint64_t total_successes() const {
        std::uint64_t s = 0;
        for (const auto& r : results) s += r.successes;
        return s;
    }
    std::uint64_t total_trials() const { return samples * results.size(); }
    Rational frequency(std::size_t i) const {
        Rational f(Integer(static_cast<unsigned long>(results.at(i).successes)),
                   Integer(static_cast<unsigned long>(samples)));
        f.canonicalize();
        return f;
    }
    Rational average() const {
        Rational f(Integer(static_cast<unsigned long>(total_successes())),
                   Integer(static_cast<unsigned long>(total_trials())));
        f.canonicalize();
        return f;
    }
    Rational minimum() const {
        auto it = std::min_element(results.begin(), results.end(),
                                   [](const auto& a, const auto& b) { return a.successes < b.successes; });
        return frequency(static_cast<std::size_t>(it - results.begin()));
    }
    Rational maximum() const {
        auto it = std::max_element(results.begin(), results.end(),
                                   [](const auto& a, const auto& b) { return a.successes < b.successes; });
        return frequency(static_cast<std::size_t>(it - results.begin()));
    }
    double wilson() const { return wilson_radius(total_successes(), total_trials()); }

    friend bool operator==(const UnimodularRow& a, const UnimodularRow& b) {
        return a.n == b.n && a.m == b.m && a.samples == b.samples && a.results == b.results &&
               a.ideal.lo() == b.ideal.lo() && a.ideal.hi() == b.ideal.hi();
    }
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<UnimodularRow> rows;
    std::vector<Check> checks;
    bool ok() const { return all_pass(checks); }
    friend bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
        return a.config == b.config && a.rows == b.rows;
    }
};

struct ShardFailure : std::runtime_error {
    ShardFailure(std::size_t n, std::uint64_t index, const std::string& what)
        : std::runtime_error("n=" + std::to_string(n) + " parallelepiped " + std::to_string(index) + ": " + what),
          n(n), index(index) {}
    std::size_t n;
    std::uint64_t index;
};

namespace detail {

inline Parallelepiped make_parallelepiped(std::size_t n, const ExperimentConfig& cfg, RngStream& rng) {
    if (cfg.policy == ParallelepipedPolicy::cube) {
        ExactMatrix V(n, n);
        for (std::size_t i = 0; i < n; ++i) V(i, i) = cfg.C;
        return Parallelepiped(std::move(V));
    }
    return random_parallelepiped(n, cfg.C, rng);
}

inline ParallelepipedResult run_parallelepiped(std::size_t n, std::size_t m, const ExperimentConfig& cfg,
                                               std::uint64_t index) {
    RngStream rng(cfg.seed, stream_id(n, index));
    const Parallelepiped P = make_parallelepiped(n, cfg, rng);
    const LinearRegion& region = P.region();
    ParallelepipedResult res;
    res.resamples = P.resamples;
    if (region.has_fast_path()) {
        std::vector<int128> col(n);
        Matrix<Checked128> M(n, m), work(n, m);
        for (std::uint64_t s = 0; s < cfg.samples; ++s) {
            for (std::size_t j = 0; j < m; ++j) {
                res.draws += region.sample_fast(rng, col, cfg.max_rejects);
                for (std::size_t i = 0; i < n; ++i) M(i, j) = col[i];
            }
            work = M;
            bool unimodular;
            try {
                unimodular = is_unimodular_inplace(work);
            } catch (const OverflowError&) {
                unimodular = is_unimodular(M.map<Integer>([](Checked128 x) { return to_integer(x); }));
            }
            if (unimodular) ++res.successes;
        }
        return res;
    }
    IntVector z;
    ExactMatrix M(n, m);
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        for (std::size_t j = 0; j < m; ++j) {
            res.draws += region.sample(rng, z, cfg.max_rejects);
            for (std::size_t i = 0; i < n; ++i) M(i, j) = z[i];
        }
        if (is_unimodular(M)) ++res.successes;
    }
    return res;
}

// Runs task(i) for i in [0, count) on `workers` threads; results land by index.
template <class R, class F>
std::vector<R> parallel_map(std::uint64_t count, std::size_t workers, F&& task) {
    std::vector<R> out(count);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto body = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = task(i);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    const std::size_t w = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, count));
    if (w == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < w; ++t) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace detail

inline UnimodularRow run_unimodular_row(std::size_t n, const ExperimentConfig& cfg, const ZetaContext& ctx) {
    UnimodularRow row;
    row.n = n;
    row.m = n + static_cast<std::size_t>(cfg.m_offset);
    row.samples = cfg.samples;
    row.ideal = ideal_probability(static_cast<long>(n), static_cast<long>(row.m), ctx);
    row.results = detail::parallel_map<ParallelepipedResult>(cfg.reps, cfg.workers, [&](std::uint64_t r) {
        try {
            return detail::run_parallelepiped(n, row.m, cfg, r);
        } catch (const ShardFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw ShardFailure(n, r, e.what());
        }
    });
    return row;
}

// Per-row assertions: average within 3 Wilson radii of the ideal value (m > n),
// below 0.001 (m = n), and with paper_scale set the minimum within the published
// spread of the average.
inline std::vector<Check> unimodular_checks(const UnimodularRow& row, bool paper_scale) {
    std::vector<Check> checks;
    const double avg = row.average().get_d();
    const std::string tag = "n=" + std::to_string(row.n) + " m=" + std::to_string(row.m);
    if (row.m > row.n) {
        const double tol = kToleranceRadii * row.wilson();
        const Rational a = row.average();
        const Rational gap_lo = a - row.ideal.hi(), gap_hi = row.ideal.lo() - a;
        const double dev = std::max({gap_lo.get_d(), gap_hi.get_d(), 0.0});
        checks.push_back({tag + " average vs ideal", dev <= tol,
                          "average " + fmt_double(avg, 8) + ", ideal " + to_decimal(row.ideal.lo(), 8) +
                              ", deviation " + fmt_double(dev, 4) + ", tolerance " + fmt_double(tol, 4)});
    } else {
        checks.push_back({tag + " square case", avg < kSquareCaseCeiling,
                          "average " + fmt_double(avg, 8) + ", ceiling " + fmt_double(kSquareCaseCeiling)});
    }
    if (paper_scale) {
        const double spread = Rational(row.average() - row.minimum()).get_d();
        checks.push_back({tag + " minimum within published spread", spread <= kPublishedSpread,
                          "average - minimum = " + fmt_double(spread, 4)});
    }
    return checks;
}

inline ExperimentReport run_unimodular_experiment(const ExperimentConfig& cfg, const ZetaContext& ctx = ZetaContext()) {
    cfg.validate();
    ExperimentReport rep;
    rep.config = cfg;
    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) {
        rep.rows.push_back(run_unimodular_row(n, cfg, ctx));
        auto c = unimodular_checks(rep.rows.back(), cfg.paper_scale);
        rep.checks.insert(rep.checks.end(), c.begin(), c.end());
    }
    return rep;
}

inline CsvTable to_table(const ExperimentReport& rep) {
    CsvTable t;
    t.header = {{"config", to_json(rep.config)}, {"rng", rng_provenance(rep.config.seed)}};
    auto& summary = t.header["summary"] = nlohmann::json::array();
    for (const auto& row : rep.rows) {
        summary.push_back({{"n", row.n},
                           {"m", row.m},
                           {"average", fmt_double(row.average().get_d())},
                           {"minimum", fmt_double(row.minimum().get_d())},
                           {"maximum", fmt_double(row.maximum().get_d())},
                           {"wilson_radius", fmt_double(row.wilson())},
                           {"ideal_lo", to_string(row.ideal.lo())},
                           {"ideal_hi", to_string(row.ideal.hi())}});
    }
    t.columns = {"n", "m", "index", "samples", "successes", "frequency", "draws", "resamples"};
    for (const auto& row : rep.rows)
        for (std::size_t i = 0; i < row.results.size(); ++i) {
            const auto& r = row.results[i];
            t.rows.push_back({std::to_string(row.n), std::to_string(row.m), std::to_string(i),
                              std::to_string(row.samples), std::to_string(r.successes),
                              fmt_double(row.frequency(i).get_d()), std::to_string(r.draws),
                              std::to_string(r.resamples)});
        }
    return t;
}

inline ExperimentReport report_from_table(const CsvTable& t) {
    ExperimentReport rep;
    rep.config = config_from_json(t.header.at("config"));
    std::map<std::size_t, UnimodularRow> rows;
    for (const auto& s : t.header.at("summary")) {
        UnimodularRow r;
        r.n = s.at("n").get<std::size_t>();
        r.m = s.at("m").get<std::size_t>();
        r.ideal = Interval(parse_rational(s.at("ideal_lo").get<std::string>()),
                           parse_rational(s.at("ideal_hi").get<std::string>()));
        rows.emplace(r.n, std::move(r));
    }
    for (const auto& cells : t.rows) {
        const std::size_t n = std::stoul(cells.at(0));
        auto& row = rows.at(n);
        row.samples = std::stoull(cells.at(3));
        if (std::stoull(cells.at(2)) != row.results.size()) throw std::runtime_error("csv: rows out of order");
        row.results.push_back({std::stoull(cells.at(4)), std::stoull(cells.at(6)), std::stoull(cells.at(7))});
    }
    for (auto& [n, r] : rows) {
        rep.rows.push_back(std::move(r));
        auto c = unimodular_checks(rep.rows.back(), rep.config.paper_scale);
        rep.checks.insert(rep.checks.end(), c.begin(), c.end());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Coprimality table.

inline const Rational kCoprimeMinimum{13, 22};

struct CoprimeRow {
    std::uint64_t N;
    std::uint64_t totient_sum;
    Rational probability;
};

struct CoprimeTable {
    std::vector<CoprimeRow> rows;
    std::uint64_t argmin = 0;
    Rational minimum;
    std::vector<Check> checks;
};

inline CoprimeTable run_coprime_table(std::uint64_t N_max) {
    if (N_max < 1) throw std::invalid_argument("coprime table: N_max must be >= 1");
    const auto phi = totient_table(N_max);
    CoprimeTable t;
    std::uint64_t s = 0;
    for (std::uint64_t N = 1; N <= N_max; ++N) {
        s += phi[N];
        Rational p(Integer(2) * Integer(static_cast<unsigned long>(s)) + 1,
                   pow_int(Integer(static_cast<unsigned long>(N + 1)), 2));
        p.canonicalize();
        if (t.rows.empty() || p < t.minimum) {
            t.minimum = p;
            t.argmin = N;
        }
        t.rows.push_back({N, s, p});
    }
    std::uint64_t below = 0, equal = 0;
    for (const auto& r : t.rows) {
        if (r.probability < kCoprimeMinimum) ++below;
        if (r.probability == kCoprimeMinimum && r.N != 10) ++equal;
    }
    t.checks.push_back({"all p_N >= 13/22", below == 0, std::to_string(below) + " rows below"});
    t.checks.push_back({"13/22 attained only at N = 10", equal == 0 && (N_max < 10 || t.rows[9].probability == kCoprimeMinimum),
                        "minimum " + to_string(t.minimum) + " at N = " + std::to_string(t.argmin)});
    return t;
}

inline CsvTable to_table(const CoprimeTable& t) {
    CsvTable c;
    c.header = {{"kind", "coprime"}, {"minimum", to_string(t.minimum)}, {"argmin", t.argmin}};
    c.columns = {"N", "totient_sum", "probability", "probability_decimal", "is_minimum"};
    for (const auto& r : t.rows)
        c.rows.push_back({std::to_string(r.N), std::to_string(r.totient_sum), to_string(r.probability),
                          to_decimal(r.probability, 12), r.N == t.argmin ? "1" : "0"});
    return c;
}

// ---------------------------------------------------------------------------
// Bounds table.

// Published three-decimal full-rank bounds, n = 1..7.
inline const std::vector<std::string>& published_fullrank_bounds() {
    static const std::vector<std::string> v{"0.666", "0.725", "0.812", "0.859", "0.883", "0.896", "0.905"};
    return v;
}

// Published ideal unimodularity probabilities in percent, n = 1..15 (m = n + 1).
inline const std::vector<std::string>& published_ideal_percentages() {
    static const std::vector<std::string> v{"60.7927", "50.5739", "46.7272", "45.0631", "44.2949",
                                            "43.9281", "43.7497", "43.6620", "43.6187", "43.5971",
                                            "43.5864", "43.5810", "43.5784", "43.5770", "43.5764"};
    return v;
}

inline const Rational kAlphaFloor{92, 1000};

// x truncated to `digits` decimals, or rounded half-up when `round` is set; the
// enclosure must make the choice unambiguous.
inline std::optional<std::string> certified_digits(const Interval& x, int digits, bool round) {
    const Rational shift = round ? Rational(1, 2 * pow10(digits)) : Rational(0);
    const std::string lo = to_decimal(x.lo() + shift, digits), hi = to_decimal(x.hi() + shift, digits);
    if (lo != hi) return std::nullopt;
    return lo;
}

struct BoundsRow {
    long n;
    Interval fullrank;
    std::optional<Interval> alpha;
    Interval ideal;
    std::optional<WindowThresholds> thresholds; // for a lattice with nu = 1
};

struct BoundsTable {
    std::vector<BoundsRow> rows;
    std::vector<Check> checks;
};

inline BoundsTable run_bounds_table(long n_max, const ZetaContext& ctx = ZetaContext()) {
    if (n_max < 1) throw std::invalid_argument("bounds table: n_max must be >= 1");
    BoundsTable t;
    for (long n = 1; n <= n_max; ++n) {
        BoundsRow r{n, fullrank_lower_bound(n, ctx.precision()), std::nullopt, ideal_probability(n, n + 1, ctx),
                    std::nullopt};
        if (n >= 2) {
            r.alpha = alpha(n, ctx);
            r.thresholds = window_thresholds(n, Rational(1), ctx.precision());
            t.checks.push_back({"alpha_" + std::to_string(n) + " >= 0.092", r.alpha->lo() >= kAlphaFloor,
                                "lower end " + to_decimal(r.alpha->lo(), 6)});
        }
        const auto& fr = published_fullrank_bounds();
        if (n <= static_cast<long>(fr.size())) {
            const auto got = certified_digits(r.fullrank, 3, false);
            t.checks.push_back({"fullrank n=" + std::to_string(n) + " matches table", got && *got == fr[n - 1],
                                "computed " + got.value_or("ambiguous") + ", table " + fr[n - 1]});
        }
        const auto& ip = published_ideal_percentages();
        if (n <= static_cast<long>(ip.size())) {
            const auto got = certified_digits(r.ideal * Interval(Rational(100)), 4, true);
            t.checks.push_back({"ideal n=" + std::to_string(n) + " matches table", got && *got == ip[n - 1],
                                "computed " + got.value_or("ambiguous") + "%, table " + ip[n - 1] + "%"});
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline CsvTable to_table(const BoundsTable& t, int digits = 12) {
    CsvTable c;
    c.header = {{"kind", "bounds-table"}, {"digits", digits}, {"threshold_nu", "1"}};
    c.columns = {"n", "fullrank_lower", "alpha_lo", "alpha_hi", "ideal_prob", "B_min", "B1_min"};
    for (const auto& r : t.rows)
        c.rows.push_back({std::to_string(r.n), to_decimal(r.fullrank.lo(), digits),
                          r.alpha ? to_decimal(r.alpha->lo(), digits) : "",
                          r.alpha ? to_decimal(r.alpha->hi(), digits) : "", to_decimal(r.ideal.mid(), digits),
                          r.thresholds ? to_decimal(r.thresholds->B_min, 6) : "",
                          r.thresholds ? to_decimal(r.thresholds->B1_min, 6) : ""});
    return c;
}

// ---------------------------------------------------------------------------
// Window counting lemmas.

inline constexpr unsigned kGridResolution2 = 64;
inline constexpr unsigned kGridResolution3 = 16;

struct LemmaInstance {
    std::string name;
    LatticeBasis lattice;
    Rational B;
};

struct LemmaResult {
    std::string name;
    std::size_t n = 0;
    Rational B;
    std::size_t count = 0;
    Rational nu_est;
    Rational nu_upper;
    bool lower_applies = false; // B > 2 nu_est
    Rational lower;             // (B - 2 nu_est)^n / det
    Rational upper;             // (B + 2 nu_upper)^n / det
    struct Slice {
        std::vector<std::size_t> basis_indices;
        std::size_t count;
        Rational bound;
    };
    std::vector<Slice> slices;
};

struct LemmaReport {
    std::vector<LemmaResult> results;
    std::vector<Check> checks;
};

inline unsigned grid_resolution_for(std::size_t n) {
    return n == 1 ? 256 : n == 2 ? kGridResolution2 : kGridResolution3;
}

inline LemmaResult verify_lemmas(const LemmaInstance& inst) {
    const LatticeBasis& L = inst.lattice;
    const std::size_t n = L.dim();
    if (n > 3) throw std::invalid_argument("lemma verification supports n <= 3");
    const Window W(inst.B, n);
    LemmaResult r;
    r.name = inst.name;
    r.n = n;
    r.B = inst.B;
    r.count = enumerate_window_coordinates(L, W).size();
    r.nu_est = covering_radius_estimate(L, grid_resolution_for(n));
    r.nu_upper = L.nu_upper();
    r.lower_applies = inst.B > 2 * r.nu_est;
    const auto un = static_cast<unsigned long>(n);
    if (r.lower_applies) r.lower = pow_rat(inst.B - 2 * r.nu_est, un) / L.det();
    r.upper = pow_rat(inst.B + 2 * r.nu_upper, un) / L.det();
    // Hyperplanes spanned by every nonempty proper subset of the basis.
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<RatVector> span;
        LemmaResult::Slice s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                span.push_back(L.basis_vector(i));
                s.basis_indices.push_back(i);
            }
        const auto k = static_cast<unsigned long>(span.size());
        s.count = count_in_hyperplane(L, W, span);
        const Rational nk = detail::half_power(un, k, L.precision() + 5).hi();
        s.bound = nk * pow_rat(inst.B + 2 * r.nu_upper, k) * pow_rat(2 * r.nu_upper, un - k) / L.det();
        r.slices.push_back(std::move(s));
    }
    return r;
}

inline std::vector<Check> lemma_checks(const LemmaResult& r) {
    std::vector<Check> checks;
    const Rational cnt(Integer(static_cast<unsigned long>(r.count)));
    const std::string tag = r.name + " B=" + to_string(r.B);
    if (r.lower_applies)
        checks.push_back({tag + " lower count bound", r.lower <= cnt,
                          "count " + std::to_string(r.count) + ", lower " + to_decimal(r.lower, 4)});
    checks.push_back({tag + " upper count bound", cnt <= r.upper,
                      "count " + std::to_string(r.count) + ", upper " + to_decimal(r.upper, 4)});
    for (const auto& s : r.slices) {
        std::string idx;
        for (auto i : s.basis_indices) idx += std::to_string(i);
        checks.push_back({tag + " hyperplane b" + idx, Rational(Integer(static_cast<unsigned long>(s.count))) <= s.bound,
                          "count " + std::to_string(s.count) + ", bound " + to_decimal(s.bound, 4)});
    }
    return checks;
}

// Desk-scale library: rectangular, sheared and rational lattices in dimensions
// 1 to 3 with a spread of window sizes.
inline std::vector<LemmaInstance> default_lemma_instances() {
    std::vector<LemmaInstance> v;
    auto add = [&](std::string name, RationalMatrix M, std::initializer_list<Rational> Bs) {
        LatticeBasis L(std::move(M));
        for (const auto& B : Bs) v.push_back({name, L, B});
    };
    add("Z", RationalMatrix{{Rational(1)}}, {Rational(7), Rational(23, 2)});
    add("3/2 Z", RationalMatrix{{Rational(3, 2)}}, {Rational(10)});
    add("Z^2", RationalMatrix::identity(2), {Rational(3), Rational(10), Rational(25, 2)});
    add("2Z x 3Z", RationalMatrix{{Rational(2), Rational(0)}, {Rational(0), Rational(3)}}, {Rational(12), Rational(20)});
    add("shear(1,1;0,1)", RationalMatrix{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}}, {Rational(8), Rational(15)});
    add("hexagonal-ish", RationalMatrix{{Rational(2), Rational(1)}, {Rational(0), Rational(2)}}, {Rational(9), Rational(30)});
    add("rational(1,1/2;0,3/4)", RationalMatrix{{Rational(1), Rational(1, 2)}, {Rational(0), Rational(3, 4)}},
        {Rational(6), Rational(14)});
    add("skew(3,1;1,2)", RationalMatrix{{Rational(3), Rational(1)}, {Rational(1), Rational(2)}}, {Rational(20)});
    add("Z^3", RationalMatrix::identity(3), {Rational(6), Rational(12)});
    add("diag(1,2,3)", RationalMatrix{{Rational(1), Rational(0), Rational(0)},
                                      {Rational(0), Rational(2), Rational(0)},
                                      {Rational(0), Rational(0), Rational(3)}},
        {Rational(15)});
    add("shear3", RationalMatrix{{Rational(1), Rational(1), Rational(0)},
                                 {Rational(0), Rational(1), Rational(1)},
                                 {Rational(0), Rational(0), Rational(2)}},
        {Rational(10)});
    add("fcc-like", RationalMatrix{{Rational(1), Rational(1), Rational(0)},
                                   {Rational(1), Rational(0), Rational(1)},
                                   {Rational(0), Rational(1), Rational(1)}},
        {Rational(9)});
    return v;
}

inline LemmaReport run_lemma_verification(const std::vector<LemmaInstance>& instances) {
    LemmaReport rep;
    for (const auto& inst : instances) {
        rep.results.push_back(verify_lemmas(inst));
        auto c = lemma_checks(rep.results.back());
        rep.checks.insert(rep.checks.end(), c.begin(), c.end());
    }
    return rep;
}

inline CsvTable to_table(const LemmaReport& rep) {
    CsvTable c;
    c.header = {{"kind", "lemma-verify"}, {"grid_resolution", {grid_resolution_for(1), kGridResolution2, kGridResolution3}}};
    c.columns = {"lattice", "n", "B", "hyperplane", "count", "lower", "upper", "slack"};
    for (const auto& r : rep.results) {
        const double cnt = static_cast<double>(r.count);
        c.rows.push_back({r.name, std::to_string(r.n), to_string(r.B), "", std::to_string(r.count),
                          r.lower_applies ? to_decimal(r.lower, 6) : "", to_decimal(r.upper, 6),
                          fmt_double(r.upper.get_d() - cnt, 8)});
        for (const auto& s : r.slices) {
            std::string idx;
            for (auto i : s.basis_indices) idx += "b" + std::to_string(i);
            c.rows.push_back({r.name, std::to_string(r.n), to_string(r.B), idx, std::to_string(s.count), "",
                              to_decimal(s.bound, 6), fmt_double(s.bound.get_d() - static_cast<double>(s.count), 8)});
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Coset distribution of window samples.

struct TvInstance {
    std::string name;
    LatticeBasis lattice;
    std::vector<RatVector> sub; // n vectors spanning the sublattice
    Rational B1;
};

struct TvResult {
    std::string name;
    std::size_t n = 0;
    Rational B1;
    Integer group_order;
    std::string group;
    std::size_t points = 0;
    Rational tv;
    Rational bound;
    Rational nu1_upper, nu_upper;
};

inline TvResult run_tv_check(const LatticeBasis& L, std::span<const RatVector> sub, const Rational& B1,
                             std::string name = "") {
    const std::size_t n = L.dim();
    if (n > 3) throw std::invalid_argument("tv check supports n <= 3");
    RationalMatrix S(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) S(i, j) = sub[j].at(i);
    const LatticeBasis L1(S, L.precision());
    TvResult r;
    r.name = std::move(name);
    r.n = n;
    r.B1 = B1;
    r.nu1_upper = L1.nu_upper();
    r.nu_upper = L.nu_upper();
    r.bound = tv_bound(static_cast<long>(n), B1, r.nu1_upper, r.nu_upper); // throws when B1 <= 2 nu1

    const QuotientGroup Q = quotient_group(L, sub);
    r.group_order = Q.group.order();
    r.group = Q.group.to_string();
    std::map<IntVector, std::uint64_t> counts;
    for (const auto& c : enumerate_window_coordinates(L, Window(B1, n)))
        ++counts[Q.projection.project_coordinates(c).coords];
    for (const auto& [coset, k] : counts) r.points += k;
    const Rational N(Integer(static_cast<unsigned long>(r.points)));
    const Rational u(Integer(1), r.group_order);
    Rational l1 = 0;
    for (const auto& [coset, k] : counts) l1 += abs(Rational(Integer(static_cast<unsigned long>(k))) / N - u);
    // Cosets never hit contribute 1/|G| each.
    l1 += Rational(r.group_order - Integer(static_cast<unsigned long>(counts.size()))) * u;
    r.tv = l1 / 2;
    return r;
}

inline TvResult run_tv_check(const TvInstance& inst) { return run_tv_check(inst.lattice, inst.sub, inst.B1, inst.name); }

inline std::vector<TvInstance> default_tv_instances() {
    std::vector<TvInstance> v;
    auto R = [](long p, long q = 1) { return Rational(p, q); };
    const LatticeBasis Z1 = LatticeBasis::integer_lattice(1), Z2 = LatticeBasis::integer_lattice(2);
    v.push_back({"Z / 2Z", Z1, {{R(2)}}, R(101)});
    v.push_back({"Z / 3Z", Z1, {{R(3)}}, R(50)});
    v.push_back({"Z / 5Z", Z1, {{R(5)}}, R(37, 2)});
    v.push_back({"Z / Z", Z1, {{R(1)}}, R(10)});
    v.push_back({"Z^2 / Z^2", Z2, {{R(1), R(0)}, {R(0), R(1)}}, R(20)});
    v.push_back({"Z^2 / 2Zx3Z", Z2, {{R(2), R(0)}, {R(0), R(3)}}, R(60)});
    v.push_back({"Z^2 / 2Z^2", Z2, {{R(2), R(0)}, {R(0), R(2)}}, R(25)});
    v.push_back({"Z^2 / <(1,1),(1,-1)>", Z2, {{R(1), R(1)}, {R(1), R(-1)}}, R(31)});
    v.push_back({"Z^2 / <(2,1),(0,3)>", Z2, {{R(2), R(1)}, {R(0), R(3)}}, R(45)});
    const LatticeBasis shear(RationalMatrix{{R(1), R(1, 2)}, {R(0), R(1)}});
    v.push_back({"shear / index 4", shear, {{R(2), R(0)}, {R(1), R(2)}}, R(40)});
    v.push_back({"Z^3 / 2Z x Z x Z", LatticeBasis::integer_lattice(3),
                 {{R(2), R(0), R(0)}, {R(0), R(1), R(0)}, {R(0), R(0), R(1)}}, R(41)});
    return v;
}

inline std::vector<Check> tv_checks(const TvResult& r) {
    return {{r.name + " B1=" + to_string(r.B1), r.tv <= r.bound,
             "TV " + to_string(r.tv) + " (" + to_decimal(r.tv, 6) + "), bound " + to_decimal(r.bound, 6)}};
}

inline CsvTable to_table(const std::vector<TvResult>& rs) {
    CsvTable c;
    c.header = {{"kind", "tv-check"}};
    c.columns = {"instance", "n", "B1", "group", "order", "points", "tv", "tv_decimal", "bound", "nu1_upper", "nu_upper"};
    for (const auto& r : rs)
        c.rows.push_back({r.name, std::to_string(r.n), to_string(r.B1), r.group,
                          r.group_order.get_str(), std::to_string(r.points), to_string(r.tv), to_decimal(r.tv, 8),
                          to_decimal(r.bound, 8), to_string(r.nu1_upper), to_string(r.nu_upper)});
    return c;
}

// ---------------------------------------------------------------------------
// Full-rank frequency of n window samples.

struct FullrankResult {
    std::size_t n = 0;
    Rational B;
    Rational threshold;
    bool in_hypothesis = false;
    std::uint64_t trials = 0;
    std::uint64_t full_rank = 0;
    double frequency() const { return trials ? static_cast<double>(full_rank) / static_cast<double>(trials) : 0.0; }
    double wilson() const { return wilson_radius(full_rank, trials); }
};

// Window size from which n uniform window samples span R^n with probability
// at least 1/2: 8 n^{n/2} nu.
inline Rational fullrank_threshold(std::size_t n, const Rational& nu_upper, int precision = kDefaultPrecision) {
    return detail::min_window(static_cast<long>(n), nu_upper, precision);
}

// `nu_upper` may be any valid upper bound on the covering radius; defaults to
// the lattice's cached bound.
inline FullrankResult run_fullrank_check(const LatticeBasis& L, const Rational& B, std::uint64_t trials, RngStream& rng,
                                         std::optional<Rational> nu_upper = std::nullopt) {
    const std::size_t n = L.dim();
    FullrankResult r;
    r.n = n;
    r.B = B;
    r.threshold = fullrank_threshold(n, nu_upper.value_or(L.nu_upper()), L.precision());
    r.in_hypothesis = B >= r.threshold;
    r.trials = trials;
    if (trials == 0) return r;
    const WindowSampler sampler(L, Window(B, n));
    std::vector<RatVector> vs(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (auto& v : vs) v = sampler.sample(rng);
        if (rank_of_span(vs) == n) ++r.full_rank;
    }
    return r;
}

inline std::vector<Check> fullrank_checks(const FullrankResult& r, const std::string& name) {
    if (r.trials == 0 || !r.in_hypothesis) return {};
    const double floor = 0.5 - kToleranceRadii * r.wilson();
    return {{name + " full-rank frequency", r.frequency() >= floor,
             "frequency " + fmt_double(r.frequency(), 6) + ", floor " + fmt_double(floor, 6)}};
}

} // namespace latgen
