#pragma once

// Samplers for the Bernoulli and combinatorial zero-one matrix models, the
// pairing realization of a uniform d-subset, and the complement transform.
//
// Row i of every sampled matrix draws from its own stream
// SplitMix64(derive_seed(seed, i)), so rows can be produced in any order and
// the first k rows of an n x n sample equal a k x n sample with the same seed.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "spsing/bitmatrix.hpp"
#include "spsing/errors.hpp"
#include "spsing/rational.hpp"
#include "spsing/rng.hpp"

namespace spsing {

struct BernoulliModel {
    Rational p;
};

struct CombinatorialModel {
    std::size_t d = 0;
};

using Model = std::variant<BernoulliModel, CombinatorialModel>;

struct SampleSpec {
    Model model;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

inline bool is_bernoulli(const Model& m) { return std::holds_alternative<BernoulliModel>(m); }

inline void validate(const Model& model, std::size_t n) {
    if (const auto* b = std::get_if<BernoulliModel>(&model)) {
        if (b->p < 0 || b->p > 1) throw Error(ErrorKind::InvalidArgument, "p must lie in [0,1]");
    } else if (std::get<CombinatorialModel>(model).d > n) {
        throw Error(ErrorKind::InfeasibleDensity, "d must lie in [0,n]");
    }
}

/// Acceptance threshold for a Bernoulli(p) draw: bit = (u < floor(p * 2^64)).
/// p == 1 is reported as nullopt, meaning "always one".
inline std::optional<std::uint64_t> bernoulli_threshold(const Rational& p) {
    if (p >= 1) return std::nullopt;
    if (p <= 0) return 0;
    Integer scaled = p.get_num();
    scaled <<= 64;
    mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), p.get_den_mpz_t());
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, scaled.get_mpz_t());
    return out;
}

/// `rows` x `cols` matrix with i.i.d. Bernoulli(p) entries.
inline BitMatrix sample_bernoulli_rows(const Rational& p, std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "p must lie in [0,1]");
    const auto threshold = bernoulli_threshold(p);
    if (!threshold) return BitMatrix::ones(rows, cols);
    BitMatrix m(rows, cols);
    if (*threshold == 0) return m;
    for (std::size_t i = 0; i < rows; ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        auto row = m.row(i);
        for (std::size_t j = 0; j < cols; ++j) {
            if (rng() < *threshold) row[j / kWordBits] |= Word{1} << (j % kWordBits);
        }
    }
    return m;
}

inline BitMatrix sample_bernoulli(const SampleSpec& spec) {
    const auto* model = std::get_if<BernoulliModel>(&spec.model);
    if (model == nullptr) throw Error(ErrorKind::InvalidArgument, "spec is not a Bernoulli model");
    return sample_bernoulli_rows(model->p, spec.n, spec.n, spec.seed);
}

/// Uniform d-subset of [0, n): partial Fisher-Yates over an index array, then sorted.
inline std::vector<std::size_t> sample_subset(std::size_t n, std::size_t d, SplitMix64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.bounded(n - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(d);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// `rows` x `n` matrix whose rows are independent uniform d-subset indicators.
inline BitMatrix sample_combinatorial_rows(std::size_t d, std::size_t rows, std::size_t n, std::uint64_t seed) {
    if (d > n) throw Error(ErrorKind::InfeasibleDensity, "d must lie in [0,n]");
    BitMatrix m(rows, n);
    for (std::size_t i = 0; i < rows; ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        for (std::size_t j : sample_subset(n, d, rng)) m.set(i, j);
    }
    return m;
}

inline BitMatrix sample_combinatorial(const SampleSpec& spec) {
    const auto* model = std::get_if<CombinatorialModel>(&spec.model);
    if (model == nullptr) throw Error(ErrorKind::InvalidArgument, "spec is not a combinatorial model");
    return sample_combinatorial_rows(model->d, spec.n, spec.n, spec.seed);
}

/// Dispatches on the model; `rows` defaults to a square sample.
inline BitMatrix sample(const Model& model, std::size_t n, std::uint64_t seed, std::optional<std::size_t> rows = {}) {
    validate(model, n);
    const std::size_t r = rows.value_or(n);
    if (const auto* b = std::get_if<BernoulliModel>(&model)) return sample_bernoulli_rows(b->p, r, n, seed);
    return sample_combinatorial_rows(std::get<CombinatorialModel>(model).d, r, n, seed);
}

inline BitMatrix sample(const SampleSpec& spec) { return sample(spec.model, spec.n, spec.seed); }

// ---------------------------------------------------------------------------
// Pairing realization

struct PairingSample {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> choices;  // true picks pairs[k].first

    /// Sorted one-set { choices[k] ? first : second }.
    std::vector<std::size_t> one_set() const {
        std::vector<std::size_t> out;
        out.reserve(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) out.push_back(choices[k] ? pairs[k].first : pairs[k].second);
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// d disjoint ordered pairs from the first 2d positions of a Fisher-Yates
/// shuffle, followed by d fair coins from the same stream.
inline PairingSample sample_pairing(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (2 * d > n) {
        throw Error(ErrorKind::PairingInfeasible, "2d = " + std::to_string(2 * d) + " exceeds n = " + std::to_string(n));
    }
    SplitMix64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < 2 * d; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.bounded(n - k));
        std::swap(idx[k], idx[j]);
    }
    PairingSample out;
    out.n = n;
    out.pairs.reserve(d);
    out.choices.reserve(d);
    for (std::size_t k = 0; k < d; ++k) out.pairs.emplace_back(idx[2 * k], idx[2 * k + 1]);
    for (std::size_t k = 0; k < d; ++k) out.choices.push_back(rng.coin());
    return out;
}

// ---------------------------------------------------------------------------
// Transforms and structural detectors

/// J - Q: entrywise complement within the logical width.
inline BitMatrix complement(const BitMatrix& q) {
    BitMatrix out = q;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (auto& w : r) w = ~w;
        if (!r.empty()) r.back() &= tail_mask(out.cols());
    }
    return out;
}

/// Common row sum if every row has the same weight.
inline std::optional<std::size_t> common_row_sum(const BitMatrix& m) {
    if (m.rows() == 0) return std::nullopt;
    const std::size_t d = m.row_weight(0);
    for (std::size_t i = 1; i < m.rows(); ++i) {
        if (m.row_weight(i) != d) return std::nullopt;
    }
    return d;
}

struct LineReport {
    std::vector<std::size_t> zero_rows;
    std::vector<std::size_t> zero_cols;
    /// (first occurrence, later duplicate); a class of k equal lines gives k-1 pairs.
    std::vector<std::pair<std::size_t, std::size_t>> duplicate_row_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> duplicate_col_pairs;

    bool any() const noexcept {
        return !zero_rows.empty() || !zero_cols.empty() || !duplicate_row_pairs.empty() || !duplicate_col_pairs.empty();
    }
};

namespace detail {

inline void scan_lines(const BitMatrix& m, std::vector<std::size_t>& zeros,
                       std::vector<std::pair<std::size_t, std::size_t>>& duplicates) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    buckets.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        bool zero = true;
        std::uint64_t h = 0x243F6A8885A308D3ULL;
        for (Word w : r) {
            zero = zero && w == 0;
            h = mix64(h ^ w) + kGoldenGamma;
        }
        if (zero) zeros.push_back(i);
        auto& bucket = buckets[h];
        bool matched = false;
        for (std::size_t first : bucket) {
            auto f = m.row(first);
            if (std::equal(f.begin(), f.end(), r.begin())) {
                duplicates.emplace_back(first, i);
                matched = true;
                break;
            }
        }
        if (!matched) bucket.push_back(i);
    }
}

}  // namespace detail

/// Exact zero and repeated rows/columns, found by hashing packed rows of M and Mᵀ.
inline LineReport find_duplicate_or_zero_lines(const BitMatrix& m) {
    LineReport report;
    detail::scan_lines(m, report.zero_rows, report.duplicate_row_pairs);
    detail::scan_lines(m.transpose(), report.zero_cols, report.duplicate_col_pairs);
    return report;
}

}  // namespace spsing
