#pragma once

// Combinatorial structure of kernel vectors: support, fibres (maximal sets of
// equal entries), property predicates, and exhaustive small-n oracles.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spsing/bitmatrix.hpp"
#include "spsing/errors.hpp"
#include "spsing/exactla.hpp"
#include "spsing/rational.hpp"

namespace spsing {

struct KernelStructureReport {
    std::size_t n = 0;
    std::size_t support_size = 0;
    std::map<Rational, std::size_t> fibre_histogram;  // value -> multiplicity
    std::size_t largest_fibre_size = 0;
    std::size_t s = 0;  // n - largest_fibre_size

    /// Fibre sizes in descending order (the value-free shape of the vector).
    std::vector<std::size_t> fibre_sizes() const {
        std::vector<std::size_t> out;
        for (const auto& [value, count] : fibre_histogram) out.push_back(count);
        std::sort(out.rbegin(), out.rend());
        return out;
    }
};

/// Exact support and fibre report; equality is rational equality in lowest terms.
inline KernelStructureReport analyze_vector(const RationalVector& x) {
    if (x.empty()) throw Error(ErrorKind::EmptyVector, "cannot analyze an empty vector");
    KernelStructureReport r;
    r.n = x.size();
    for (const auto& v : x) {
        ++r.fibre_histogram[v];
        if (v != 0) ++r.support_size;
    }
    for (const auto& [value, count] : r.fibre_histogram) r.largest_fibre_size = std::max(r.largest_fibre_size, count);
    r.s = r.n - r.largest_fibre_size;
    return r;
}

inline KernelStructureReport analyze_vector(const IntegerVector& x) { return analyze_vector(to_rational(x)); }

/// Largest fibre size of an integer vector (e.g. a vector over Z_q).
template <class Int>
std::size_t largest_fibre(const std::vector<Int>& v) {
    std::map<Int, std::size_t> counts;
    std::size_t best = 0;
    for (const auto& x : v) best = std::max(best, ++counts[x]);
    return best;
}

// ---------------------------------------------------------------------------
// Predicates

/// |supp(x)| >= threshold.
struct SupportAtLeast {
    Rational threshold;
};

/// largest fibre of x has size <= bound.
struct LargestFibreAtMost {
    Rational bound;
};

using PropertyPredicate = std::variant<SupportAtLeast, LargestFibreAtMost>;

/// Bound (1 - c/log d)·n with natural log, rounded down to an integer.
inline Rational log_fibre_bound(const Rational& c, std::size_t n, std::size_t d) {
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "log d requires d >= 2");
    const double value = (1.0 - c.get_d() / std::log(static_cast<double>(d))) * static_cast<double>(n);
    return Rational(static_cast<long>(std::floor(std::max(0.0, value))));
}

inline bool eval_predicate(const PropertyPredicate& pred, const KernelStructureReport& report) {
    if (const auto* s = std::get_if<SupportAtLeast>(&pred)) return Rational(report.support_size) >= s->threshold;
    return Rational(report.largest_fibre_size) <= std::get<LargestFibreAtMost>(pred).bound;
}

inline bool eval_predicate(const PropertyPredicate& pred, const RationalVector& x) {
    return eval_predicate(pred, analyze_vector(x));
}

inline std::string describe(const PropertyPredicate& pred) {
    if (const auto* s = std::get_if<SupportAtLeast>(&pred)) return "SupportAtLeast{" + s->threshold.get_str() + "}";
    return "LargestFibreAtMost{" + std::get<LargestFibreAtMost>(pred).bound.get_str() + "}";
}

// ---------------------------------------------------------------------------
// Minimum-weight GF(2) kernel vectors

struct MinSupportResult {
    Side side = Side::Right;
    std::size_t kernel_dim = 0;
    std::optional<std::size_t> min_support;  // empty for a trivial kernel
    BitVector witness;

    bool trivial() const noexcept { return kernel_dim == 0; }
};

/// Scans all 2^k - 1 nonzero combinations of the GF(2) kernel basis in Gray-code
/// order and returns a minimum Hamming weight vector.
inline MinSupportResult enumerate_gf2_kernel_min_support(const BitMatrix& m, Side side, std::size_t max_dim = 20) {
    auto basis = kernel_gf2(m, side);
    MinSupportResult out;
    out.side = side;
    out.kernel_dim = basis.dimension();
    if (out.kernel_dim > max_dim) {
        throw Error(ErrorKind::KernelTooLarge, "kernel dimension " + std::to_string(out.kernel_dim) +
                                                   " exceeds " + std::to_string(max_dim));
    }
    if (out.kernel_dim == 0) return out;
    BitVector current(basis.ambient_dim);
    const std::uint64_t combos = std::uint64_t{1} << out.kernel_dim;
    std::size_t best = basis.ambient_dim + 1;
    for (std::uint64_t i = 1; i < combos; ++i) {
        current ^= basis.vectors[static_cast<std::size_t>(std::countr_zero(i))];
        const std::size_t weight = current.count();
        if (weight < best) {
            best = weight;
            out.witness = current;
        }
    }
    out.min_support = best;
    if (!apply_gf2(m, out.witness, side).none() || out.witness.count() != best || best == 0) {
        throw std::logic_error("minimum-support witness failed its kernel check");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Minimum support over a rational kernel

struct RationalMinSupport {
    std::size_t min_support = 0;
    RationalVector witness;
    std::uint64_t subsets_examined = 0;
};

/// Exact minimum support of a nonzero vector in span(basis).
///
/// A minimum-support vector x is, up to scale, the unique kernel vector
/// vanishing on some (k-1)-subset J of its zero set, so it suffices to scan all
/// (k-1)-subsets J and take the one-dimensional solutions. Throws
/// KernelTooLarge when C(n, k-1) exceeds `max_subsets`.
inline RationalMinSupport min_support_rational(const KernelBasis<RationalVector>& basis,
                                               std::uint64_t max_subsets = 200000) {
    if (basis.empty()) throw Error(ErrorKind::InvalidArgument, "trivial kernel has no nonzero vectors");
    const std::size_t k = basis.dimension();
    const std::size_t n = basis.ambient_dim;
    auto support_of = [](const RationalVector& v) {
        return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; }));
    };
    RationalMinSupport out;
    if (k == 1) {
        out.witness = basis.vectors.front();
        out.min_support = support_of(out.witness);
        return out;
    }
    const Integer subsets = binomial(n, k - 1);
    if (subsets > max_subsets) {
        throw Error(ErrorKind::KernelTooLarge,
                    "rational kernel dimension " + std::to_string(k) + " needs " + subsets.get_str() + " subsets");
    }
    std::vector<IntegerVector> ints;
    for (const auto& v : basis.vectors) ints.push_back(primitive_integer_multiple(v));

    out.min_support = n + 1;
    std::vector<std::size_t> J(k - 1);
    for (std::size_t a = 0; a + 1 < k; ++a) J[a] = a;
    for (;;) {
        ++out.subsets_examined;
        IntMatrix system(k - 1, k);
        for (std::size_t a = 0; a + 1 < k; ++a)
            for (std::size_t i = 0; i < k; ++i) system.at(a, i) = ints[i][J[a]];
        auto coeffs = kernel_rational(system, Side::Right);
        if (coeffs.dimension() == 1) {
            RationalVector y(n, Rational(0));
            for (std::size_t i = 0; i < k; ++i) {
                const Rational& ci = coeffs.vectors[0][i];
                if (ci == 0) continue;
                for (std::size_t j = 0; j < n; ++j) y[j] += ci * Rational(ints[i][j]);
            }
            const std::size_t supp = support_of(y);
            if (supp > 0 && supp < out.min_support) {
                out.min_support = supp;
                out.witness = std::move(y);
            }
        }
        // next (k-1)-subset in lexicographic order
        std::size_t pos = k - 1;
        while (pos > 0 && J[pos - 1] == n - (k - 1) + (pos - 1)) --pos;
        if (pos == 0) break;
        ++J[pos - 1];
        for (std::size_t b = pos; b < k - 1; ++b) J[b] = J[b - 1] + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive mod-q oracle

/// All nonconstant v in Z_q^n with R·v = 0 (mod q) for every row R of `rows`
/// and n - largest_fibre(v) <= s_max. Vectors are listed in lexicographic order.
inline std::vector<std::vector<std::uint32_t>> enumerate_modq_bad_vectors(const BitMatrix& rows, std::uint32_t q,
                                                                          std::size_t s_max,
                                                                          std::uint64_t budget = 16777216) {
    if (q < 2) throw Error(ErrorKind::InvalidArgument, "q must be >= 2");
    const std::size_t n = rows.cols();
    Integer space;
    mpz_ui_pow_ui(space.get_mpz_t(), q, n);
    if (space > budget) {
        throw Error(ErrorKind::BudgetExceeded, "q^n = " + space.get_str() + " exceeds budget " + std::to_string(budget));
    }
    std::vector<std::vector<std::size_t>> supports(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (rows.get(i, j)) supports[i].push_back(j);

    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> v(n, 0);
    const auto total = space.get_ui();
    for (unsigned long code = 0; code < total; ++code) {
        if (code > 0) {
            // odometer increment, last coordinate fastest
            for (std::size_t j = n; j-- > 0;) {
                if (++v[j] < q) break;
                v[j] = 0;
            }
        }
        bool ok = true;
        for (const auto& supp : supports) {
            std::uint64_t acc = 0;
            for (auto j : supp) acc += v[j];
            if (acc % q != 0) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const std::size_t largest = largest_fibre(v);
        if (largest == n) continue;  // constant
        if (n - largest > s_max) continue;
        out.push_back(v);
    }
    return out;
}

}  // namespace spsing
