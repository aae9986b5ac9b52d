#pragma once

// Command-line front end. Each subcommand parses flags, calls the library and
// formats the result; run_cli is callable in-process so tests can diff its
// output against direct library calls.
//
// Exit codes: 0 nonsingular (or success), 10 singular, 2 usage or input
// error, 3 budget exceeded.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spsing/bounds.hpp"
#include "spsing/certify.hpp"
#include "spsing/errors.hpp"
#include "spsing/harness.hpp"
#include "spsing/io.hpp"
#include "spsing/models.hpp"
#include "spsing/rational.hpp"
#include "spsing/structure.hpp"

namespace spsing {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSingular = 10;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

namespace cli {

inline ModelKind parse_model(const std::string& name) {
    if (name == "bernoulli" || name == "ber") return ModelKind::Bernoulli;
    if (name == "comb" || name == "combinatorial") return ModelKind::Combinatorial;
    throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "' (bernoulli|comb)");
}

inline RationalVector parse_rational_list(const std::string& text) {
    RationalVector out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }), item.end());
        if (!item.empty()) out.push_back(parse_rational(item));
    }
    return out;
}

inline BitMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    return read_matrix(in, path);
}

inline void print_value(std::ostream& out, const Rational& v) {
    out << to_fraction_string(v) << '\n' << to_decimal_string(v, 16) << '\n';
}

inline void print_bound(std::ostream& out, const BoundValue& v) {
    if (v.exact) {
        print_value(out, *v.exact);
    } else {
        out << "<= " << v.upper->to_string(20) << '\n';
    }
}

struct SampleArgs {
    std::string model, p, out;
    std::size_t n = 0;
    std::optional<std::size_t> d;
    std::uint64_t seed = 0;
};

struct CertifyArgs {
    std::string in;
    bool json = false;
};

struct BoundsArgs {
    std::string formula, p, x, pvals;
    std::size_t s = 0, n = 0, smax = 0, d = 0;
    std::optional<std::uint64_t> q;
    bool force_float = false;
};

struct SweepArgs {
    std::string config, model, out;
    std::vector<std::size_t> n_grid;
    std::vector<std::string> c_grid;
    std::uint64_t trials = 0, seed = 0;
    std::size_t threads = 0;
    bool trials_csv = false, svg = false;
};

struct AnalyzeArgs {
    std::string in, side = "right";
};

inline int cmd_sample(const SampleArgs& a, CLI::App& sub, std::ostream& out) {
    const ModelKind kind = parse_model(a.model);
    Model model;
    if (kind == ModelKind::Bernoulli) {
        if (sub.count("--p") == 0) throw Error(ErrorKind::InvalidArgument, "bernoulli model needs --p");
        model = BernoulliModel{parse_rational(a.p)};
    } else {
        if (!a.d) throw Error(ErrorKind::InvalidArgument, "combinatorial model needs --d");
        model = CombinatorialModel{*a.d};
    }
    validate(model, a.n);
    const BitMatrix m = sample(model, a.n, a.seed);
    if (a.out.empty() || a.out == "-") {
        write_matrix(out, m);
    } else {
        std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
        if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + a.out);
        write_matrix(file, m);
    }
    return kExitOk;
}

inline int cmd_certify(const CertifyArgs& a, std::ostream& out) {
    const BitMatrix m = load_matrix(a.in);
    const auto cert = is_singular_exact(m);
    if (a.json) {
        out << certificate_to_json(cert).dump(2) << '\n';
    } else {
        out << "verdict: " << to_string(cert.verdict) << '\n';
        out << "evidence: " << to_string(cert.evidence) << '\n';
        switch (cert.evidence) {
        case Evidence::KernelVector: {
            out << "witness:";
            for (const auto& x : cert.witness) out << ' ' << x.get_str();
            out << '\n';
            break;
        }
        case Evidence::PrimeResidue:
            out << "det mod " << cert.prime << " = " << cert.residue << '\n';
            break;
        case Evidence::ExactDeterminant:
            out << "det = " << cert.determinant.get_str() << '\n';
            break;
        }
        out << "gf2 rank: " << cert.stats.gf2_rank << '\n';
        out << "stage: " << to_string(cert.stats.stage) << '\n';
        out << "elapsed: " << cert.stats.elapsed_seconds << " s\n";
    }
    return cert.singular() ? kExitSingular : kExitOk;
}

inline int cmd_bounds(const BoundsArgs& a, CLI::App& sub, std::ostream& out) {
    auto need = [&](const char* flag) {
        if (sub.count(flag) == 0) throw Error(ErrorKind::InvalidArgument, a.formula + " needs " + flag);
    };
    if (a.formula == "p_even") {
        need("--s");
        need("--p");
        print_value(out, p_even(a.s, parse_rational(a.p)));
    } else if (a.formula == "union_ber") {
        need("--n");
        need("--p");
        need("--smax");
        print_bound(out, union_bound_ber(a.n, parse_rational(a.p), a.smax, a.force_float));
    } else if (a.formula == "union_comb") {
        need("--n");
        need("--q");
        need("--smax");
        need("--P");
        const auto pv = parse_rational_list(a.pvals);
        print_bound(out, union_bound_comb(a.n, *a.q, a.smax, pv, a.force_float));
    } else if (a.formula == "atom_ber") {
        need("--x");
        need("--p");
        const auto r = max_atom_bernoulli(parse_rational_list(a.x), parse_rational(a.p));
        print_value(out, r.max_prob);
        out << "argmax " << to_fraction_string(r.argmax) << '\n';
    } else if (a.formula == "atom_comb") {
        need("--x");
        need("--d");
        const auto r = max_atom_combinatorial(parse_rational_list(a.x), a.d, a.q);
        print_value(out, r.max_prob);
        out << "argmax " << to_fraction_string(r.argmax) << '\n';
    } else if (a.formula == "binom_pm") {
        need("--n");
        need("--p");
        need("--d");
        print_value(out, binomial_point_mass(a.n, parse_rational(a.p), a.d));
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown formula '" + a.formula + "'");
    }
    return kExitOk;
}

/// Config file fields (all optional, flags win): model, n_grid, c_grid,
/// trials_per_cell, master_seed, output, trials_csv, svg, threads.
inline SweepConfig build_sweep_config(const SweepArgs& a, CLI::App& sub) {
    nlohmann::json j = nlohmann::json::object();
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config " + a.config);
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::ParseError, a.config + ": " + e.what());
        }
        if (!j.is_object()) throw Error(ErrorKind::ParseError, a.config + ": top level must be an object");
    }
    SweepConfig cfg;
    try {
        cfg.model = parse_model(sub.count("--model") ? a.model : j.value("model", std::string("bernoulli")));
        if (sub.count("--n")) {
            cfg.n_grid = a.n_grid;
        } else if (j.contains("n_grid")) {
            cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
        }
        if (sub.count("--c")) {
            for (const auto& c : a.c_grid) cfg.c_grid.push_back(parse_rational(c));
        } else if (j.contains("c_grid")) {
            for (const auto& c : j.at("c_grid")) cfg.c_grid.push_back(parse_rational(c.is_string() ? c.get<std::string>() : c.dump()));
        }
        cfg.trials_per_cell = sub.count("--trials") ? a.trials : j.value("trials_per_cell", std::uint64_t{1});
        cfg.master_seed = sub.count("--seed") ? a.seed : j.value("master_seed", std::uint64_t{0});
        cfg.output = sub.count("--out") ? a.out : j.value("output", std::string());
        cfg.write_trials = sub.count("--trials-csv") ? a.trials_csv : j.value("trials_csv", false);
        cfg.write_svg = sub.count("--svg") ? a.svg : j.value("svg", false);
        cfg.threads = sub.count("--threads") ? a.threads : j.value("threads", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, a.config + ": " + e.what());
    }
    validate(cfg);
    return cfg;
}

inline int cmd_sweep(const SweepArgs& a, CLI::App& sub, std::ostream& out, std::ostream& err) {
    const SweepConfig cfg = build_sweep_config(a, sub);
    const auto result = run_sweep(cfg);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    out << "model          n        c   density       trials  singular  fraction  99% CI               explained\n";
    for (const auto& cell : result.cells) {
        char line[256];
        const auto explained = cell.explained_fraction();
        std::snprintf(line, sizeof line, "%-13s %5zu %8s %9s %12llu %9llu  %8.4f  [%.4f, %.4f]  %s\n", to_string(cell.model),
                      cell.n, to_fraction_string(cell.c).c_str(), cell.density.c_str(),
                      static_cast<unsigned long long>(cell.trials), static_cast<unsigned long long>(cell.singular_count),
                      cell.fraction(), cell.ci.low, cell.ci.high,
                      explained ? detail::fixed(*explained, 4).c_str() : "-");
        out << line;
    }
    return kExitOk;
}

inline nlohmann::json structure_json(const RationalVector& v) {
    const auto r = analyze_vector(v);
    nlohmann::json j;
    auto entries = nlohmann::json::array();
    for (const auto& x : v) entries.push_back(to_fraction_string(x));
    j["vector"] = entries;
    j["support_size"] = r.support_size;
    j["largest_fibre_size"] = r.largest_fibre_size;
    j["s"] = r.s;
    j["fibre_sizes"] = r.fibre_sizes();
    return j;
}

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    if (a.side != "left" && a.side != "right") throw Error(ErrorKind::InvalidArgument, "--side must be left or right");
    const Side side = a.side == "left" ? Side::Left : Side::Right;
    const BitMatrix m = load_matrix(a.in);
    nlohmann::json j;
    j["side"] = a.side;

    const auto gf2 = enumerate_gf2_kernel_min_support(m, side);
    nlohmann::json g;
    g["kernel_dim"] = gf2.kernel_dim;
    if (gf2.min_support) {
        g["min_support"] = *gf2.min_support;
        g["witness"] = gf2.witness.to_string();
    } else {
        g["min_support"] = nullptr;
    }
    j["gf2"] = g;

    const auto basis = kernel_rational(IntMatrix::from_bits(m), side);
    nlohmann::json q;
    q["kernel_dim"] = basis.dimension();
    auto vectors = nlohmann::json::array();
    for (const auto& v : basis.vectors) vectors.push_back(structure_json(v));
    q["basis"] = vectors;
    if (!basis.empty()) {
        const auto ms = min_support_rational(basis);
        q["min_support"] = ms.min_support;
        q["min_support_witness"] = structure_json(ms.witness);
    } else {
        q["min_support"] = nullptr;
    }
    j["rational"] = q;
    j["status"] = !basis.empty() ? "nontrivial kernel" : gf2.trivial() ? "trivial kernel" : "trivial rational kernel";
    out << j.dump(2) << '\n';
    return kExitOk;
}

}  // namespace cli

/// Runs the command line `args` (program name excluded).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spsing: exact singularity tools for sparse random zero-one matrices", "spsing"};
    app.require_subcommand(1);

    cli::SampleArgs sa;
    auto* sample_cmd = app.add_subcommand("sample", "sample a random matrix");
    sample_cmd->add_option("--model", sa.model, "bernoulli | comb")->required();
    sample_cmd->add_option("--n", sa.n, "dimension")->required();
    sample_cmd->add_option("--p", sa.p, "Bernoulli density, e.g. 1/5");
    sample_cmd->add_option("--d", sa.d, "ones per row (combinatorial)");
    sample_cmd->add_option("--seed", sa.seed, "seed");
    sample_cmd->add_option("--out", sa.out, "output file (default stdout)");

    cli::CertifyArgs ca;
    auto* certify_cmd = app.add_subcommand("certify", "decide singularity with a checkable certificate");
    certify_cmd->add_option("--in", ca.in, "matrix file")->required();
    certify_cmd->add_flag("--json", ca.json, "print the certificate as JSON");

    cli::BoundsArgs ba;
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a closed-form bound");
    bounds_cmd->add_option("--formula", ba.formula, "p_even|union_ber|union_comb|atom_ber|atom_comb|binom_pm")->required();
    bounds_cmd->add_option("--s", ba.s, "binomial size");
    bounds_cmd->add_option("--p", ba.p, "probability, e.g. 3/10");
    bounds_cmd->add_option("--n", ba.n, "dimension");
    bounds_cmd->add_option("--smax", ba.smax, "largest s in the union bound");
    bounds_cmd->add_option("--q", ba.q, "modulus");
    bounds_cmd->add_option("--P", ba.pvals, "comma-separated P_1..P_smax");
    bounds_cmd->add_option("--x", ba.x, "comma-separated vector");
    bounds_cmd->add_option("--d", ba.d, "subset size / point");
    bounds_cmd->add_flag("--float", ba.force_float, "use the rounded-up float path");

    cli::SweepArgs wa;
    auto* sweep_cmd = app.add_subcommand("sweep", "threshold sweep");
    sweep_cmd->add_option("--config", wa.config, "JSON config file");
    sweep_cmd->add_option("--model", wa.model, "bernoulli | comb");
    sweep_cmd->add_option("--n", wa.n_grid, "dimensions")->delimiter(',');
    sweep_cmd->add_option("--c", wa.c_grid, "threshold constants")->delimiter(',');
    sweep_cmd->add_option("--trials", wa.trials, "trials per cell");
    sweep_cmd->add_option("--seed", wa.seed, "master seed");
    sweep_cmd->add_option("--out", wa.out, "aggregate CSV path");
    sweep_cmd->add_option("--threads", wa.threads, "worker threads (default SPSING_THREADS or all cores)");
    sweep_cmd->add_flag("--trials-csv", wa.trials_csv, "also write <stem>.trials.csv");
    sweep_cmd->add_flag("--svg", wa.svg, "also write <stem>.svg");

    cli::AnalyzeArgs aa;
    auto* analyze_cmd = app.add_subcommand("analyze", "kernel structure report");
    analyze_cmd->add_option("--in", aa.in, "matrix file")->required();
    analyze_cmd->add_option("--side", aa.side, "left | right");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*sample_cmd) return cli::cmd_sample(sa, *sample_cmd, out);
        if (*certify_cmd) return cli::cmd_certify(ca, out);
        if (*bounds_cmd) return cli::cmd_bounds(ba, *bounds_cmd, out);
        if (*sweep_cmd) return cli::cmd_sweep(wa, *sweep_cmd, out, err);
        if (*analyze_cmd) return cli::cmd_analyze(aa, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_budget() ? kExitBudget : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace spsing
