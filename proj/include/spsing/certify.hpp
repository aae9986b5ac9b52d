#pragma once

// Exact singularity decisions for square zero-one matrices, with certificates
// that can be re-checked without trusting the elimination that produced them.

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spsing/bitmatrix.hpp"
#include "spsing/errors.hpp"
#include "spsing/exactla.hpp"
#include "spsing/models.hpp"
#include "spsing/numtheory.hpp"
#include "spsing/rational.hpp"
#include "spsing/rng.hpp"

namespace spsing {

enum class Verdict { Nonsingular, Singular };

inline const char* to_string(Verdict v) { return v == Verdict::Singular ? "singular" : "nonsingular"; }

enum class Evidence {
    KernelVector,      // singular: A·w = 0 for the nonzero integer witness w
    PrimeResidue,      // nonsingular: det(A) mod prime == residue != 0
    ExactDeterminant,  // nonsingular: det(A) == determinant != 0
};

inline const char* to_string(Evidence e) {
    switch (e) {
    case Evidence::KernelVector: return "kernel_vector";
    case Evidence::PrimeResidue: return "prime_residue";
    case Evidence::ExactDeterminant: return "exact_determinant";
    }
    return "unknown";
}

/// Which stage settled the verdict.
enum class Stage { Gf2FullRank, ZeroOrDuplicateColumn, RandomPrime, RationalKernel };

struct CertifyStats {
    std::size_t gf2_rank = 0;
    std::size_t primes_tried = 0;
    Stage stage = Stage::Gf2FullRank;
    double elapsed_seconds = 0.0;
};

struct SingularityCertificate {
    Verdict verdict = Verdict::Nonsingular;
    Evidence evidence = Evidence::PrimeResidue;
    IntegerVector witness;       // KernelVector
    std::uint64_t prime = 0;     // PrimeResidue
    std::uint64_t residue = 0;   // PrimeResidue
    Integer determinant;         // ExactDeterminant
    CertifyStats stats;

    bool singular() const noexcept { return verdict == Verdict::Singular; }
};

struct CertifyOptions {
    /// Drives the choice of random primes; kept apart from any sampling seed.
    std::uint64_t prime_seed = 0x5EED5EED5EED5EEDULL;
    std::size_t prime_trials = 3;
    /// Resolve zero/duplicate columns directly instead of by elimination.
    bool line_shortcut = true;
};

namespace detail {

/// det(A) mod p for a zero-one matrix: unpacked column-major elimination that
/// pivots on the last candidate row. Deliberately shares nothing with exactla.
inline std::uint64_t independent_det_mod(const BitMatrix& m, std::uint64_t p) {
    const std::size_t n = m.rows();
    std::vector<std::vector<std::uint64_t>> col(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) col[j][i] = m.get(i, j) ? 1 % p : 0;
    std::uint64_t det = 1 % p;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        for (std::size_t r = n; r-- > k;) {
            if (col[k][perm[r]] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot == n) return 0;
        if (pivot != k) {
            std::swap(perm[pivot], perm[k]);
            det = (p - det) % p;
        }
        const std::size_t pr = perm[k];
        const std::uint64_t a = col[k][pr];
        det = mulmod(det, a, p);
        const std::uint64_t inv = powmod(a, p - 2, p);
        for (std::size_t j = k + 1; j < n; ++j) {
            const std::uint64_t f = mulmod(col[j][pr], inv, p);
            if (f == 0) continue;
            for (std::size_t r = k + 1; r < n; ++r) {
                const std::size_t row = perm[r];
                const std::uint64_t sub = mulmod(f, col[k][row], p);
                col[j][row] = col[j][row] >= sub ? col[j][row] - sub : col[j][row] + p - sub;
            }
        }
    }
    return det;
}

/// Exact determinant by fraction-free elimination with sign tracking.
inline Integer fraction_free_det(const BitMatrix& m) {
    IntMatrix a = IntMatrix::from_bits(m);
    const std::size_t n = a.rows();
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        for (std::size_t i = k; i < n; ++i) {
            if (a.at(i, k) != 0) {
                pivot = i;
                break;
            }
        }
        if (pivot == n) return 0;
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) mpz_swap(a.at(pivot, j).get_mpz_t(), a.at(k, j).get_mpz_t());
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a.at(i, j) = (a.at(k, k) * a.at(i, j) - a.at(i, k) * a.at(k, j)) / prev;
            }
            a.at(i, k) = 0;
        }
        prev = a.at(k, k);
    }
    return n == 0 ? Integer(1) : Integer(sign * prev);
}

inline SingularityCertificate singular_from(IntegerVector witness) {
    SingularityCertificate c;
    c.verdict = Verdict::Singular;
    c.evidence = Evidence::KernelVector;
    make_primitive(witness);
    c.witness = std::move(witness);
    return c;
}

}  // namespace detail

/// Independently re-checks a certificate against m.
inline bool verify_certificate(const BitMatrix& m, const SingularityCertificate& c) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "certificate for non-square matrix");
    const std::size_t n = m.rows();
    switch (c.evidence) {
    case Evidence::KernelVector: {
        if (c.verdict != Verdict::Singular) return false;
        if (c.witness.size() != n) throw Error(ErrorKind::DimensionMismatch, "witness length != n");
        bool nonzero = false;
        for (const auto& x : c.witness) nonzero = nonzero || x != 0;
        if (!nonzero) return false;
        Integer acc;
        for (std::size_t i = 0; i < n; ++i) {
            acc = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (m.get(i, j)) acc += c.witness[j];
            }
            if (acc != 0) return false;
        }
        return true;
    }
    case Evidence::PrimeResidue:
        if (c.verdict != Verdict::Nonsingular) return false;
        if (!is_prime_u64(c.prime) || c.residue == 0 || c.residue >= c.prime) return false;
        return detail::independent_det_mod(m, c.prime) == c.residue;
    case Evidence::ExactDeterminant:
        if (c.verdict != Verdict::Nonsingular || c.determinant == 0) return false;
        return detail::fraction_free_det(m) == c.determinant;
    }
    return false;
}

/// Staged exact decision:
///   1. full rank over GF(2) means det is odd, hence nonzero;
///   2. a zero column j or a repeated column pair (j,k) gives witness e_j or e_j - e_k;
///   3. up to `prime_trials` random primes; any full-rank reduction settles it;
///   4. exact rational kernel; a kernel vector certifies singularity, otherwise
///      the exact determinant is attached.
inline SingularityCertificate is_singular_exact(const BitMatrix& m, const CertifyOptions& options = {}) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = m.rows();

    auto finish = [&](SingularityCertificate c, CertifyStats stats) {
        stats.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.stats = stats;
        if (!verify_certificate(m, c)) throw std::logic_error("certificate failed self-verification");
        return c;
    };

    CertifyStats stats;
    stats.gf2_rank = rank_gf2(m);
    if (stats.gf2_rank == n) {
        SingularityCertificate c;
        c.verdict = Verdict::Nonsingular;
        c.evidence = Evidence::PrimeResidue;
        c.prime = 2;
        c.residue = 1;
        stats.stage = Stage::Gf2FullRank;
        return finish(std::move(c), stats);
    }

    if (options.line_shortcut) {
        const auto lines = find_duplicate_or_zero_lines(m);
        if (!lines.zero_cols.empty() || !lines.duplicate_col_pairs.empty()) {
            IntegerVector w(n, Integer(0));
            if (!lines.zero_cols.empty()) {
                w[lines.zero_cols.front()] = 1;
            } else {
                w[lines.duplicate_col_pairs.front().first] = 1;
                w[lines.duplicate_col_pairs.front().second] = -1;
            }
            stats.stage = Stage::ZeroOrDuplicateColumn;
            return finish(detail::singular_from(std::move(w)), stats);
        }
    }

    SplitMix64 prime_rng(options.prime_seed);
    for (std::size_t k = 0; k < options.prime_trials; ++k) {
        const std::uint64_t p = random_prime(prime_rng);
        ++stats.primes_tried;
        const std::uint64_t residue = det_mod(ModMatrix::from_bits(m, p));
        if (residue != 0) {
            SingularityCertificate c;
            c.verdict = Verdict::Nonsingular;
            c.evidence = Evidence::PrimeResidue;
            c.prime = p;
            c.residue = residue;
            stats.stage = Stage::RandomPrime;
            return finish(std::move(c), stats);
        }
    }

    stats.stage = Stage::RationalKernel;
    const IntMatrix lifted = IntMatrix::from_bits(m);
    auto kernel = kernel_rational(lifted, Side::Right);
    if (!kernel.empty()) {
        return finish(detail::singular_from(primitive_integer_multiple(kernel.vectors.front())), stats);
    }
    SingularityCertificate c;
    c.verdict = Verdict::Nonsingular;
    c.evidence = Evidence::ExactDeterminant;
    c.determinant = det_exact(lifted);
    return finish(std::move(c), stats);
}

}  // namespace spsing
