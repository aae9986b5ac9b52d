#pragma once

// Monte Carlo experiments: threshold sweeps for both models, the three-term
// singularity decomposition, complement checks, and CSV/SVG output.
//
// Seed layout. A sweep cell (n, c_index) draws from
//   cell_seed  = derive_seed(derive_seed(master_seed, n), c_index)
//   trial_seed = derive_seed(cell_seed, trial_index)
// and the matrix is sample(model, n, trial_seed). Certification primes use
// prime_seed_for(trial_seed), a stream index no matrix row can reach.

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "spsing/bitmatrix.hpp"
#include "spsing/bounds.hpp"
#include "spsing/certify.hpp"
#include "spsing/errors.hpp"
#include "spsing/exactla.hpp"
#include "spsing/models.hpp"
#include "spsing/rational.hpp"
#include "spsing/rng.hpp"
#include "spsing/stats.hpp"
#include "spsing/structure.hpp"

namespace spsing {

enum class ModelKind { Bernoulli, Combinatorial };

inline const char* to_string(ModelKind k) { return k == ModelKind::Bernoulli ? "bernoulli" : "combinatorial"; }

inline constexpr std::uint64_t kPrimeStream = ~std::uint64_t{0};

inline std::uint64_t prime_seed_for(std::uint64_t trial_seed) { return derive_seed(trial_seed, kPrimeStream); }

/// Worker count: SPSING_THREADS if set and positive, else the hardware count.
inline std::size_t default_thread_count() {
    if (const char* env = std::getenv("SPSING_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on `threads` workers. Results must be
/// written to per-index slots; the first exception is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Density mapping

struct Density {
    Model model;
    bool clamped = false;

    std::string to_string() const {
        if (const auto* b = std::get_if<BernoulliModel>(&model)) return to_decimal_string(b->p, 12);
        return std::to_string(std::get<CombinatorialModel>(model).d);
    }
};

/// Bernoulli: p = floor(c·ln(n)/n · 2^64) / 2^64, the exact resolution of the
/// sampler. Combinatorial: d = round(c·ln n), ties up. Both clamp to the valid
/// range and report it.
inline Density map_density(ModelKind kind, std::size_t n, const Rational& c) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (c < 0) throw Error(ErrorKind::InfeasibleDensity, "c must be nonnegative");
    mpfr_t x;
    mpfr_init2(x, 256);
    mpfr_log_ui(x, n, MPFR_RNDN);
    mpfr_mul_q(x, x, c.get_mpq_t(), MPFR_RNDN);
    Integer z;
    Density out;
    if (kind == ModelKind::Bernoulli) {
        mpfr_div_ui(x, x, n, MPFR_RNDN);
        mpfr_mul_2ui(x, x, 64, MPFR_RNDN);
        mpfr_get_z(z.get_mpz_t(), x, MPFR_RNDD);
        const Integer one = Integer(1) << 64;
        if (z > one) {
            z = one;
            out.clamped = true;
        }
        out.model = BernoulliModel{make_rational(z, one)};
    } else {
        mpfr_add_d(x, x, 0.5, MPFR_RNDN);
        mpfr_get_z(z.get_mpz_t(), x, MPFR_RNDD);
        if (z > n) {
            z = static_cast<unsigned long>(n);
            out.clamped = true;
        }
        out.model = CombinatorialModel{static_cast<std::size_t>(z.get_ui())};
    }
    mpfr_clear(x);
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
    ModelKind model = ModelKind::Bernoulli;
    std::vector<std::size_t> n_grid;
    std::vector<Rational> c_grid;
    std::uint64_t trials_per_cell = 1;
    std::uint64_t master_seed = 0;
    std::filesystem::path output;  // aggregate CSV; empty means no files
    bool write_trials = false;     // <stem>.trials.csv next to output
    bool write_svg = false;        // <stem>.svg next to output
    std::size_t threads = 0;       // 0 means default_thread_count()
};

struct TrialRecord {
    ModelKind model = ModelKind::Bernoulli;
    std::size_t n = 0;
    Rational c;
    std::string density;
    std::uint64_t trial_index = 0;
    std::uint64_t derived_seed = 0;
    Verdict verdict = Verdict::Nonsingular;
    std::size_t gf2_rank = 0;
    bool had_zero_line = false;
    bool had_duplicate_line = false;
    double elapsed = 0.0;
};

struct CellSummary {
    ModelKind model = ModelKind::Bernoulli;
    std::size_t n = 0;
    Rational c;
    std::string density;
    std::uint64_t trials = 0;
    std::uint64_t singular_count = 0;
    std::uint64_t explained_count = 0;
    Interval ci;
    std::uint64_t master_seed = 0;

    double fraction() const { return trials ? static_cast<double>(singular_count) / static_cast<double>(trials) : 0.0; }
    /// Share of singular trials with a zero or repeated line; empty when nothing was singular.
    std::optional<double> explained_fraction() const {
        if (singular_count == 0) return std::nullopt;
        return static_cast<double>(explained_count) / static_cast<double>(singular_count);
    }
};

struct SweepResult {
    std::vector<CellSummary> cells;
    std::vector<TrialRecord> records;
    std::vector<std::string> warnings;
};

inline std::uint64_t cell_seed(std::uint64_t master, std::size_t n, std::size_t c_index) {
    return derive_seed(derive_seed(master, n), c_index);
}

/// One trial: sample, certify, look for zero or repeated lines.
inline TrialRecord run_trial(ModelKind kind, std::size_t n, const Rational& c, const Density& density,
                             std::uint64_t trial_index, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord r;
    r.model = kind;
    r.n = n;
    r.c = c;
    r.density = density.to_string();
    r.trial_index = trial_index;
    r.derived_seed = seed;
    const BitMatrix m = sample(density.model, n, seed);
    CertifyOptions opts;
    opts.prime_seed = prime_seed_for(seed);
    const auto cert = is_singular_exact(m, opts);
    r.verdict = cert.verdict;
    r.gf2_rank = cert.stats.gf2_rank;
    const auto lines = find_duplicate_or_zero_lines(m);
    r.had_zero_line = !lines.zero_rows.empty() || !lines.zero_cols.empty();
    r.had_duplicate_line = !lines.duplicate_row_pairs.empty() || !lines.duplicate_col_pairs.empty();
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Writes to a sibling temporary and renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::filesystem::path sibling(const std::filesystem::path& output, const std::string& suffix) {
    auto p = output;
    p.replace_extension();
    p += suffix;
    return p;
}

}  // namespace detail

inline const char* kAggregateHeader =
    "model,n,c,density,trials,singular_count,fraction,ci_low,ci_high,explained_fraction,master_seed";

inline std::string aggregate_csv(const std::vector<CellSummary>& cells) {
    std::ostringstream out;
    out << kAggregateHeader << "\r\n";
    for (const auto& cell : cells) {
        const auto explained = cell.explained_fraction();
        out << to_string(cell.model) << ',' << cell.n << ',' << detail::csv_field(to_fraction_string(cell.c)) << ','
            << cell.density << ',' << cell.trials << ',' << cell.singular_count << ','
            << detail::fixed(cell.fraction()) << ',' << detail::fixed(cell.ci.low) << ','
            << detail::fixed(cell.ci.high) << ',' << (explained ? detail::fixed(*explained) : std::string()) << ','
            << cell.master_seed << "\r\n";
    }
    return out.str();
}

/// Per-trial rows. Wall-clock time is left out so the file is reproducible.
inline std::string trials_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    out << "model,n,c,density,trial_index,derived_seed,verdict,gf2_rank,had_zero_line,had_duplicate_line\r\n";
    for (const auto& r : records) {
        out << to_string(r.model) << ',' << r.n << ',' << detail::csv_field(to_fraction_string(r.c)) << ','
            << r.density << ',' << r.trial_index << ',' << r.derived_seed << ',' << to_string(r.verdict) << ','
            << r.gf2_rank << ',' << r.had_zero_line << ',' << r.had_duplicate_line << "\r\n";
    }
    return out.str();
}

/// Singular fraction against c, one polyline per n.
inline std::string sweep_svg(const std::vector<CellSummary>& cells) {
    const double width = 640, height = 400, margin = 50;
    double cmin = 0, cmax = 1;
    if (!cells.empty()) {
        cmin = cmax = cells.front().c.get_d();
        for (const auto& cell : cells) {
            cmin = std::min(cmin, cell.c.get_d());
            cmax = std::max(cmax, cell.c.get_d());
        }
        if (cmax == cmin) cmax = cmin + 1;
    }
    auto px = [&](double c) { return margin + (c - cmin) / (cmax - cmin) * (width - 2 * margin); };
    auto py = [&](double f) { return height - margin - f * (height - 2 * margin); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::vector<std::size_t> ns;
    for (const auto& cell : cells)
        if (std::find(ns.begin(), ns.end(), cell.n) == ns.end()) ns.push_back(cell.n);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << width - margin << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << margin << "\" y2=\"" << py(1)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">c</text>\n";
    out << "<text x=\"12\" y=\"" << height / 2 << "\" transform=\"rotate(-90 12 " << height / 2
        << ")\" text-anchor=\"middle\">singular fraction</text>\n";
    out << "<text x=\"" << margin - 6 << "\" y=\"" << py(1) + 4 << "\" text-anchor=\"end\">1</text>\n";
    out << "<text x=\"" << margin - 6 << "\" y=\"" << py(0) + 4 << "\" text-anchor=\"end\">0</text>\n";
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const char* colour = palette[k % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (const auto& cell : cells) {
            if (cell.n != ns[k]) continue;
            out << detail::fixed(px(cell.c.get_d()), 2) << ',' << detail::fixed(py(cell.fraction()), 2) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * static_cast<double>(k) << "\" fill=\""
            << colour << "\">n=" << ns[k] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

/// Throws InvalidArgument before any sampling if the configuration cannot run
/// or its output directory does not exist.
inline void validate(const SweepConfig& cfg) {
    if (cfg.trials_per_cell < 1) throw Error(ErrorKind::InvalidArgument, "trials_per_cell must be >= 1");
    if (cfg.n_grid.empty() || cfg.c_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty n or c grid");
    for (auto n : cfg.n_grid)
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    for (const auto& c : cfg.c_grid)
        if (c < 0) throw Error(ErrorKind::InfeasibleDensity, "c must be nonnegative");
    if (!cfg.output.empty()) {
        const auto dir = cfg.output.has_parent_path() ? cfg.output.parent_path() : std::filesystem::path(".");
        if (!std::filesystem::is_directory(dir)) {
            throw Error(ErrorKind::InvalidArgument, "output directory does not exist: " + dir.string());
        }
    }
}

/// Runs every (n, c) cell. Output is a pure function of the configuration
/// (thread count included or not).
inline SweepResult run_sweep(const SweepConfig& cfg) {
    validate(cfg);
    SweepResult result;
    struct Job {
        std::size_t cell;
        std::uint64_t trial;
    };
    std::vector<Density> densities;
    std::vector<Job> jobs;
    for (auto n : cfg.n_grid) {
        for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
            const auto& c = cfg.c_grid[ci];
            Density density = map_density(cfg.model, n, c);
            if (density.clamped) {
                result.warnings.push_back("density for n=" + std::to_string(n) + " c=" + to_fraction_string(c) +
                                          " clamped to " + density.to_string());
            }
            CellSummary cell;
            cell.model = cfg.model;
            cell.n = n;
            cell.c = c;
            cell.density = density.to_string();
            cell.trials = cfg.trials_per_cell;
            cell.master_seed = cfg.master_seed;
            for (std::uint64_t t = 0; t < cfg.trials_per_cell; ++t) jobs.push_back({result.cells.size(), t});
            result.cells.push_back(cell);
            densities.push_back(std::move(density));
        }
    }

    result.records.resize(jobs.size());
    parallel_for(jobs.size(), cfg.threads ? cfg.threads : default_thread_count(), [&](std::size_t i) {
        const auto& job = jobs[i];
        const auto& cell = result.cells[job.cell];
        const std::size_t ci = job.cell % cfg.c_grid.size();
        const std::uint64_t seed = derive_seed(cell_seed(cfg.master_seed, cell.n, ci), job.trial);
        result.records[i] = run_trial(cfg.model, cell.n, cell.c, densities[job.cell], job.trial, seed);
    });

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& cell = result.cells[jobs[i].cell];
        const auto& r = result.records[i];
        if (r.verdict == Verdict::Singular) {
            ++cell.singular_count;
            if (r.had_zero_line || r.had_duplicate_line) ++cell.explained_count;
        }
    }
    for (auto& cell : result.cells) cell.ci = clopper_pearson(cell.singular_count, cell.trials, 0.99);

    if (!cfg.output.empty()) {
        detail::write_atomically(cfg.output, aggregate_csv(result.cells));
        if (cfg.write_trials) detail::write_atomically(detail::sibling(cfg.output, ".trials.csv"), trials_csv(result.records));
        if (cfg.write_svg) detail::write_atomically(detail::sibling(cfg.output, ".svg"), sweep_svg(result.cells));
    }
    return result;
}

/// Re-runs one trial from its record.
inline TrialRecord replay(const TrialRecord& r) {
    return run_trial(r.model, r.n, r.c, map_density(r.model, r.n, r.c), r.trial_index, r.derived_seed);
}

// ---------------------------------------------------------------------------
// Three-term decomposition

struct TermEstimate {
    std::uint64_t count = 0;
    std::uint64_t trials = 0;
    Rational scale = 1;  // 1 for probabilities, n/t for the scaled terms
    Interval ci;         // 99% Clopper-Pearson on the unscaled fraction

    double fraction() const { return trials ? static_cast<double>(count) / static_cast<double>(trials) : 0.0; }
    double estimate() const { return scale.get_d() * fraction(); }
    double sigma() const { return scale.get_d() * binomial_sigma(count, trials); }
};

struct DecompositionReport {
    std::size_t n = 0;
    Rational t;
    PropertyPredicate pred;
    std::uint64_t trials = 0;

    TermEstimate singular;    // Pr(A singular)
    TermEstimate small_supp;  // Pr(x^T A = 0 for some nonzero x with |supp x| < t)
    TermEstimate not_in_p;    // (n/t) Pr(some nonzero x outside P kills rows 1..n-1)
    TermEstimate lo_plugin;   // (n/t) Pr(realized kernel vector x lies in P and x·R_n = 0)

    /// Exact max_a Pr(x·R = a) for the all-ones vector on ceil(t) coordinates,
    /// a member of P for support predicates. A reference point, not a bound on
    /// the maximum over P.
    std::optional<Rational> lo_reference;

    std::uint64_t kernel_too_large = 0;     // min-support searches over budget, counted as events
    std::uint64_t multi_dim_kernels = 0;    // (n-1)-row kernels of dimension > 1
    bool degenerate = false;                // t > n: every nonzero vector has support < t

    double rhs() const { return small_supp.estimate() + not_in_p.estimate() + lo_plugin.estimate(); }
    double combined_sigma() const {
        return std::sqrt(singular.sigma() * singular.sigma() + small_supp.sigma() * small_supp.sigma() +
                         not_in_p.sigma() * not_in_p.sigma() + lo_plugin.sigma() * lo_plugin.sigma());
    }
    /// Pr(singular) <= term1 + term2 + term3 + 3 combined sigma.
    bool holds() const { return singular.estimate() <= rhs() + 3 * combined_sigma(); }
};

namespace detail {

inline std::size_t support_size(const RationalVector& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; }));
}

/// Does some nonzero left-kernel vector of a singular m have support < t?
/// GF(2) minimum support is a lower bound for the rational one (reduce a
/// primitive integer kernel vector mod 2), so it filters first.
inline bool small_left_kernel(const BitMatrix& m, const Rational& t, std::uint64_t& too_large) {
    try {
        const auto gf2 = enumerate_gf2_kernel_min_support(m, Side::Left);
        if (gf2.min_support && Rational(*gf2.min_support) >= t) return false;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::KernelTooLarge) throw;
    }
    const auto basis = kernel_rational(IntMatrix::from_bits(m), Side::Left);
    if (basis.empty()) return false;
    try {
        return Rational(min_support_rational(basis).min_support) < t;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::KernelTooLarge) throw;
        ++too_large;
        return true;
    }
}

inline void finalize(TermEstimate& term, std::uint64_t trials, Rational scale) {
    term.trials = trials;
    term.scale = std::move(scale);
    term.ci = clopper_pearson(term.count, trials, 0.99);
}

}  // namespace detail

/// Estimates each term of the decomposition by resampling.
///
/// Trial k draws two independent matrices, A from derive_seed(seed_A, k) and
/// B from derive_seed(seed_B, k), with seed_A = derive_seed(seed, 1) and
/// seed_B = derive_seed(seed, 2).
///   singular, small_supp: from A;
///   not_in_p: the right kernel of B's first n-1 rows holds a nonzero vector
///     outside P (exact for support predicates; for fibre predicates a kernel
///     of dimension > 1 is counted as an event);
///   lo_plugin: the canonical kernel vector x of those rows lies in P and
///     x·R_n = 0 for B's last row R_n.
/// Pr(singular) <= term1 + (n/t)(Pr(x not in P) + Pr(x in P, x·R_n = 0)) holds
/// exactly, so the plug-in term is a sound stand-in for the max over P.
inline DecompositionReport verify_decomposition(const Model& model, std::size_t n, const Rational& t,
                                          const PropertyPredicate& pred, std::uint64_t trials, std::uint64_t seed,
                                          std::size_t threads = 0) {
    if (t < 1) throw Error(ErrorKind::InvalidArgument, "t must be >= 1");
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be >= 2");
    validate(model, n);

    DecompositionReport report;
    report.n = n;
    report.t = t;
    report.pred = pred;
    report.trials = trials;
    report.degenerate = t > n;

    struct Outcome {
        bool singular = false, small = false, not_in_p = false, lo = false, multi = false;
        std::uint64_t too_large = 0;
    };
    std::vector<Outcome> outcomes(trials);
    const std::uint64_t seed_a = derive_seed(seed, 1), seed_b = derive_seed(seed, 2);
    const bool support_pred = std::holds_alternative<SupportAtLeast>(pred);

    parallel_for(trials, threads ? threads : default_thread_count(), [&](std::size_t k) {
        Outcome& o = outcomes[k];
        const std::uint64_t sa = derive_seed(seed_a, k);
        const BitMatrix a = sample(model, n, sa);
        CertifyOptions opts;
        opts.prime_seed = prime_seed_for(sa);
        o.singular = is_singular_exact(a, opts).singular();
        if (o.singular) o.small = detail::small_left_kernel(a, t, o.too_large);

        const BitMatrix b = sample(model, n, derive_seed(seed_b, k));
        const auto basis = kernel_rational(IntMatrix::from_bits(b.top_rows(n - 1)), Side::Right);
        const RationalVector& x = basis.vectors.front();
        o.multi = basis.dimension() > 1;
        const bool x_in_p = eval_predicate(pred, x);
        if (!o.multi) {
            o.not_in_p = !x_in_p;
        } else if (support_pred) {
            try {
                o.not_in_p = !eval_predicate(pred, min_support_rational(basis).witness);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::KernelTooLarge) throw;
                ++o.too_large;
                o.not_in_p = true;
            }
        } else {
            o.not_in_p = true;
        }
        if (x_in_p) {
            Rational dot = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (b.get(n - 1, j)) dot += x[j];
            o.lo = dot == 0;
        }
    });

    for (const auto& o : outcomes) {
        report.singular.count += o.singular;
        report.small_supp.count += o.small;
        report.not_in_p.count += o.not_in_p;
        report.lo_plugin.count += o.lo;
        report.multi_dim_kernels += o.multi;
        report.kernel_too_large += o.too_large;
    }
    const Rational scale = Rational(static_cast<unsigned long>(n)) / t;
    detail::finalize(report.singular, trials, 1);
    detail::finalize(report.small_supp, trials, 1);
    detail::finalize(report.not_in_p, trials, scale);
    detail::finalize(report.lo_plugin, trials, scale);

    if (support_pred && !report.degenerate) {
        Integer width;
        mpz_cdiv_q(width.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
        const RationalVector ones(width.get_ui(), Rational(1));
        try {
            if (const auto* bm = std::get_if<BernoulliModel>(&model)) {
                report.lo_reference = max_atom_bernoulli(ones, bm->p).max_prob;
            } else {
                RationalVector padded(n, Rational(0));
                std::fill_n(padded.begin(), ones.size(), Rational(1));
                report.lo_reference = max_atom_combinatorial(padded, std::get<CombinatorialModel>(model).d).max_prob;
            }
        } catch (const Error& e) {
            if (!e.is_budget()) throw;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Complement and sub-threshold checks

struct ComplementResult {
    std::uint64_t agreements = 0;
    std::uint64_t disagreements = 0;
};

/// Certifies Q and J - Q exactly for combinatorial samples Q.
inline ComplementResult verify_complement(std::size_t n, std::size_t d, std::uint64_t trials, std::uint64_t seed) {
    if (d == 0 || d >= n) throw Error(ErrorKind::InvalidArgument, "need 0 < d < n");
    ComplementResult out;
    for (std::uint64_t k = 0; k < trials; ++k) {
        const std::uint64_t s = derive_seed(seed, k);
        const BitMatrix q = sample(CombinatorialModel{d}, n, s);
        CertifyOptions opts;
        opts.prime_seed = prime_seed_for(s);
        const bool a = is_singular_exact(q, opts).singular();
        const bool b = is_singular_exact(complement(q), opts).singular();
        (a == b ? out.agreements : out.disagreements) += 1;
    }
    return out;
}

struct AutopsyResult {
    std::uint64_t trials = 0;
    std::uint64_t singular = 0;
    std::uint64_t explained = 0;  // singular with a zero or repeated row/column

    std::optional<double> share() const {
        if (singular == 0) return std::nullopt;
        return static_cast<double>(explained) / static_cast<double>(singular);
    }
};

inline AutopsyResult subthreshold_autopsy(const Model& model, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                          std::size_t threads = 0) {
    validate(model, n);
    std::vector<TrialRecord> records(trials);
    const Density density{model, false};
    const ModelKind kind = is_bernoulli(model) ? ModelKind::Bernoulli : ModelKind::Combinatorial;
    parallel_for(trials, threads ? threads : default_thread_count(),
                 [&](std::size_t k) { records[k] = run_trial(kind, n, Rational(0), density, k, derive_seed(seed, k)); });
    AutopsyResult out;
    out.trials = trials;
    for (const auto& r : records) {
        if (r.verdict != Verdict::Singular) continue;
        ++out.singular;
        out.explained += r.had_zero_line || r.had_duplicate_line;
    }
    return out;
}

}  // namespace spsing
