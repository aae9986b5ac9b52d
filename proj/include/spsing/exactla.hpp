#pragma once

// Exact linear algebra over GF(2), prime fields, and the rationals.
//
// Conventions: a 0x0 matrix has rank 0, determinant 1, and an empty kernel.
// Pivot search always takes the lowest-index row holding a nonzero entry.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spsing/bitmatrix.hpp"
#include "spsing/errors.hpp"
#include "spsing/numtheory.hpp"
#include "spsing/rational.hpp"

namespace spsing {

enum class Side { Left, Right };

inline const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

enum class FieldTag { GF2, Prime, Rational };

/// Basis of a left or right kernel. Vectors are independent over the tagged field.
template <class Vector>
struct KernelBasis {
    FieldTag field = FieldTag::Rational;
    std::uint64_t prime = 0;  // set when field == Prime
    Side side = Side::Right;
    std::size_t ambient_dim = 0;
    std::vector<Vector> vectors;

    std::size_t dimension() const noexcept { return vectors.size(); }
    bool empty() const noexcept { return vectors.empty(); }
};

// ---------------------------------------------------------------------------
// GF(2)

namespace detail {

/// Forward elimination in place; returns the pivot column of each pivot row.
/// With `reduce` set, pivots are also cleared above (reduced row echelon form).
inline std::vector<std::size_t> eliminate_gf2(BitMatrix& m, bool reduce) {
    const std::size_t rows = m.rows();
    const std::size_t stride = m.stride();
    std::vector<std::size_t> pivot_cols;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < m.cols() && pivot_row < rows; ++col) {
        const std::size_t w = col / kWordBits;
        const Word bit = Word{1} << (col % kWordBits);
        std::size_t found = rows;
        for (std::size_t i = pivot_row; i < rows; ++i) {
            if (m.row(i)[w] & bit) {
                found = i;
                break;
            }
        }
        if (found == rows) continue;
        if (found != pivot_row) {
            auto a = m.row(found);
            auto b = m.row(pivot_row);
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(w), a.end(), b.begin() + static_cast<std::ptrdiff_t>(w));
        }
        const Word* src = m.row(pivot_row).data();
        const std::size_t begin = reduce ? 0 : pivot_row + 1;
        for (std::size_t i = begin; i < rows; ++i) {
            if (i == pivot_row) continue;
            Word* dst = m.row(i).data();
            if (dst[w] & bit) {
                // Words before w are zero in the pivot row.
                for (std::size_t k = w; k < stride; ++k) dst[k] ^= src[k];
            }
        }
        pivot_cols.push_back(col);
        ++pivot_row;
    }
    return pivot_cols;
}

}  // namespace detail

/// Rank over GF(2) by packed row reduction.
inline std::size_t rank_gf2(const BitMatrix& m) {
    BitMatrix work = m;
    return detail::eliminate_gf2(work, false).size();
}

/// Right kernel of a matrix over GF(2); basis indexed by free columns.
inline std::vector<BitVector> right_kernel_gf2(const BitMatrix& m) {
    BitMatrix rref = m;
    const auto pivots = detail::eliminate_gf2(rref, true);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<BitVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        BitVector v(m.cols());
        v.set(free);
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            if (rref.get(k, free)) v.set(pivots[k]);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

inline KernelBasis<BitVector> kernel_gf2(const BitMatrix& m, Side side) {
    KernelBasis<BitVector> out;
    out.field = FieldTag::GF2;
    out.prime = 2;
    out.side = side;
    if (side == Side::Right) {
        out.ambient_dim = m.cols();
        out.vectors = right_kernel_gf2(m);
    } else {
        out.ambient_dim = m.rows();
        out.vectors = right_kernel_gf2(m.transpose());
    }
    return out;
}

/// A·v over GF(2) (Right) or vᵀ·A (Left); the result is the zero vector iff v is in that kernel.
inline BitVector apply_gf2(const BitMatrix& m, const BitVector& v, Side side) {
    if (side == Side::Right) {
        if (v.size() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "vector length != columns");
        BitVector out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            Word acc = 0;
            auto r = m.row(i);
            for (std::size_t w = 0; w < r.size(); ++w) acc ^= r[w] & v.words()[w];
            if (std::popcount(acc) & 1) out.set(i);
        }
        return out;
    }
    if (v.size() != m.rows()) throw Error(ErrorKind::DimensionMismatch, "vector length != rows");
    BitVector out(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!v.get(i)) continue;
        auto r = m.row(i);
        auto o = out.words();
        for (std::size_t w = 0; w < r.size(); ++w) o[w] ^= r[w];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prime fields

/// Matrix of residues modulo `modulus`; entries always reduced.
class ModMatrix {
  public:
    ModMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus)
        : rows_(rows), cols_(cols), modulus_(modulus), entries_(rows * cols, 0) {
        if (modulus < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be >= 2");
    }

    static ModMatrix from_bits(const BitMatrix& m, std::uint64_t modulus) {
        ModMatrix out(m.rows(), m.cols(), modulus);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                out.entries_[i * out.cols_ + j] = m.get(i, j) ? 1 % modulus : 0;
            }
        }
        return out;
    }

    template <class Int>
    static ModMatrix from_rows(std::initializer_list<std::initializer_list<Int>> rows, std::uint64_t modulus) {
        std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
        ModMatrix out(rows.size(), cols, modulus);
        std::size_t i = 0;
        for (const auto& r : rows) {
            if (r.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged rows");
            std::size_t j = 0;
            for (Int x : r) out.set(i, j++, x);
            ++i;
        }
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint64_t modulus() const noexcept { return modulus_; }

    std::uint64_t at(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

    /// Stores value reduced into [0, modulus).
    template <class Int>
    void set(std::size_t i, std::size_t j, Int value) {
        auto m = static_cast<long long>(modulus_);
        long long r = static_cast<long long>(value) % m;
        if (r < 0) r += m;
        entries_[i * cols_ + j] = static_cast<std::uint64_t>(r);
    }
    void set_residue(std::size_t i, std::size_t j, std::uint64_t residue) noexcept {
        entries_[i * cols_ + j] = residue % modulus_;
    }

    std::span<std::uint64_t> row(std::size_t i) noexcept { return {entries_.data() + i * cols_, cols_}; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::uint64_t modulus_;
    std::vector<std::uint64_t> entries_;
};

namespace detail {

/// Forward elimination over a prime field. Returns (rank, determinant) where
/// the determinant is meaningful only for square input.
inline std::pair<std::size_t, std::uint64_t> eliminate_mod(ModMatrix m) {
    const std::uint64_t p = m.modulus();
    std::uint64_t det = 1 % p;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t found = m.rows();
        for (std::size_t i = rank; i < m.rows(); ++i) {
            if (m.at(i, col) != 0) {
                found = i;
                break;
            }
        }
        if (found == m.rows()) {
            det = 0;
            continue;
        }
        if (found != rank) {
            std::swap_ranges(m.row(found).begin(), m.row(found).end(), m.row(rank).begin());
            det = (p - det) % p;
        }
        auto pivot_row = m.row(rank);
        const std::uint64_t pivot = pivot_row[col];
        det = mulmod(det, pivot, p);
        const std::uint64_t inv = invmod_prime(pivot, p);
        for (std::size_t i = rank + 1; i < m.rows(); ++i) {
            auto r = m.row(i);
            if (r[col] == 0) continue;
            const std::uint64_t factor = mulmod(r[col], inv, p);
            const std::uint64_t neg = p - factor;
            if (p < kPrimeCeiling) {
                for (std::size_t j = col; j < m.cols(); ++j) r[j] = (r[j] + neg * pivot_row[j]) % p;
            } else {
                for (std::size_t j = col; j < m.cols(); ++j) {
                    const std::uint64_t add = mulmod(neg, pivot_row[j], p);
                    r[j] = r[j] >= p - add ? r[j] - (p - add) : r[j] + add;
                }
            }
        }
        ++rank;
    }
    if (m.rows() != m.cols() || rank < m.rows()) det = 0;
    return {rank, det};
}

}  // namespace detail

inline std::size_t rank_mod(const ModMatrix& m) {
    if (!is_prime_u64(m.modulus())) {
        throw Error(ErrorKind::CompositeModulus, "modulus " + std::to_string(m.modulus()) + " is not prime");
    }
    return detail::eliminate_mod(m).first;
}

/// Determinant modulo the (prime) modulus.
inline std::uint64_t det_mod(const ModMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::NotSquare, "determinant of non-square matrix");
    if (!is_prime_u64(m.modulus())) {
        throw Error(ErrorKind::CompositeModulus, "modulus " + std::to_string(m.modulus()) + " is not prime");
    }
    return detail::eliminate_mod(m).second;
}

// ---------------------------------------------------------------------------
// Integers and rationals

class IntMatrix {
  public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

    static IntMatrix from_bits(const BitMatrix& m) {
        IntMatrix out(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (m.get(i, j)) out.at(i, j) = 1;
            }
        }
        return out;
    }

    static IntMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows) {
        std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
        IntMatrix out(rows.size(), cols);
        std::size_t i = 0;
        for (const auto& r : rows) {
            if (r.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged rows");
            std::size_t j = 0;
            for (long x : r) out.at(i, j++) = x;
            ++i;
        }
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Integer& at(std::size_t i, std::size_t j) noexcept { return entries_[i * cols_ + j]; }
    const Integer& at(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        }
        return t;
    }

    ModMatrix reduce(std::uint64_t modulus) const {
        ModMatrix out(rows_, cols_, modulus);
        Integer r;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                mpz_fdiv_r_ui(r.get_mpz_t(), at(i, j).get_mpz_t(), modulus);
                out.set_residue(i, j, r.get_ui());
            }
        }
        return out;
    }

    bool is_zero_one() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const Integer& x) { return x == 0 || x == 1; });
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> entries_;
};

/// Square of the Hadamard bound, prod_i ||row_i||^2. For zero-one matrices
/// this is replaced by n^n (each row norm is at most sqrt(n)).
inline Integer hadamard_bound_squared(const IntMatrix& m) {
    Integer bound;
    if (m.is_zero_one()) {
        mpz_ui_pow_ui(bound.get_mpz_t(), m.rows(), m.rows());
        return bound;
    }
    bound = 1;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Integer norm2 = 0;
        for (std::size_t j = 0; j < m.cols(); ++j) norm2 += m.at(i, j) * m.at(i, j);
        bound *= norm2;
    }
    return bound;
}

/// Exact determinant by Chinese remaindering over the prime table until the
/// modulus exceeds twice the Hadamard bound, then a symmetric lift.
inline Integer det_exact(const IntMatrix& m) {
    if (!m.is_square()) throw Error(ErrorKind::NotSquare, "determinant of non-square matrix");
    if (m.rows() == 0) return Integer(1);
    const Integer target = 4 * hadamard_bound_squared(m);  // need modulus^2 > (2H)^2
    if (target == 0) return Integer(0);
    Integer modulus = 1;
    Integer value = 0;
    for (std::size_t k = 0; modulus * modulus <= target; ++k) {
        const std::uint64_t p = table_prime(k);
        const std::uint64_t residue = detail::eliminate_mod(m.reduce(p)).second;
        // value += modulus * ((residue - value) * modulus^-1 mod p)
        Integer tmp;
        const std::uint64_t value_mod = mpz_fdiv_ui(value.get_mpz_t(), p);
        const std::uint64_t modulus_mod = mpz_fdiv_ui(modulus.get_mpz_t(), p);
        const std::uint64_t diff = (residue + p - value_mod) % p;
        const std::uint64_t step = mulmod(diff, invmod_prime(modulus_mod, p), p);
        tmp = modulus;
        tmp *= static_cast<unsigned long>(step);
        value += tmp;
        modulus *= static_cast<unsigned long>(p);
    }
    if (2 * value > modulus) value -= modulus;
    return value;
}

/// Divides by the gcd of the entries and makes the first nonzero entry positive.
inline void make_primitive(IntegerVector& v) {
    Integer g = 0;
    for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 0) return;
    auto first = std::find_if(v.begin(), v.end(), [](const Integer& x) { return x != 0; });
    if (*first < 0) g = -g;
    for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// Clears denominators of a rational vector and returns the primitive integer multiple.
inline IntegerVector primitive_integer_multiple(const RationalVector& v) {
    Integer l = 1;
    for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    IntegerVector out;
    out.reserve(v.size());
    for (const auto& x : v) {
        Integer scaled = l;
        mpz_divexact(scaled.get_mpz_t(), scaled.get_mpz_t(), x.get_den_mpz_t());
        scaled *= x.get_num();
        out.push_back(std::move(scaled));
    }
    make_primitive(out);
    return out;
}

namespace detail {

/// Fraction-free (Bareiss) forward elimination in place. Every intermediate
/// entry is a minor of the input, so each division is exact.
inline std::vector<std::size_t> bareiss_echelon(IntMatrix& a) {
    std::vector<std::size_t> pivots;
    Integer prev = 1;
    Integer tmp;
    std::size_t pr = 0;
    for (std::size_t col = 0; col < a.cols() && pr < a.rows(); ++col) {
        std::size_t found = a.rows();
        for (std::size_t i = pr; i < a.rows(); ++i) {
            if (a.at(i, col) != 0) {
                found = i;
                break;
            }
        }
        if (found == a.rows()) continue;
        if (found != pr) {
            for (std::size_t j = col; j < a.cols(); ++j) mpz_swap(a.at(found, j).get_mpz_t(), a.at(pr, j).get_mpz_t());
        }
        const mpz_srcptr pivot = a.at(pr, col).get_mpz_t();
        for (std::size_t i = pr + 1; i < a.rows(); ++i) {
            mpz_ptr lead = a.at(i, col).get_mpz_t();
            const bool lead_zero = mpz_sgn(lead) == 0;
            for (std::size_t j = col + 1; j < a.cols(); ++j) {
                mpz_ptr x = a.at(i, j).get_mpz_t();
                mpz_mul(tmp.get_mpz_t(), pivot, x);
                if (!lead_zero) mpz_submul(tmp.get_mpz_t(), lead, a.at(pr, j).get_mpz_t());
                mpz_divexact(x, tmp.get_mpz_t(), prev.get_mpz_t());
            }
            mpz_set_ui(lead, 0);
        }
        prev = a.at(pr, col);
        pivots.push_back(col);
        ++pr;
    }
    return pivots;
}

inline std::vector<RationalVector> right_kernel_rational(const IntMatrix& m) {
    IntMatrix echelon = m;
    const auto pivots = bareiss_echelon(echelon);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;

    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RationalVector x(m.cols(), Rational(0));
        x[free] = 1;
        for (std::size_t k = pivots.size(); k-- > 0;) {
            Rational acc = 0;
            for (std::size_t j = pivots[k] + 1; j < m.cols(); ++j) {
                if (x[j] != 0 && echelon.at(k, j) != 0) acc += Rational(echelon.at(k, j)) * x[j];
            }
            x[pivots[k]] = -acc / Rational(echelon.at(k, pivots[k]));
        }
        basis.push_back(to_rational(primitive_integer_multiple(x)));
    }
    return basis;
}

}  // namespace detail

/// Exact rational kernel; each basis vector is returned as its primitive
/// integer multiple (gcd 1, first nonzero entry positive).
inline KernelBasis<RationalVector> kernel_rational(const IntMatrix& m, Side side) {
    KernelBasis<RationalVector> out;
    out.field = FieldTag::Rational;
    out.side = side;
    if (side == Side::Right) {
        out.ambient_dim = m.cols();
        out.vectors = detail::right_kernel_rational(m);
    } else {
        out.ambient_dim = m.rows();
        out.vectors = detail::right_kernel_rational(m.transpose());
    }
    return out;
}

/// Exact A·x (Right) or xᵀ·A (Left) for an integer matrix and rational vector.
inline RationalVector apply(const IntMatrix& m, const RationalVector& x, Side side) {
    const std::size_t in = side == Side::Right ? m.cols() : m.rows();
    const std::size_t out_dim = side == Side::Right ? m.rows() : m.cols();
    if (x.size() != in) throw Error(ErrorKind::DimensionMismatch, "vector length mismatch");
    RationalVector out(out_dim, Rational(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m.at(i, j) == 0) continue;
            if (side == Side::Right) {
                out[i] += Rational(m.at(i, j)) * x[j];
            } else {
                out[j] += Rational(m.at(i, j)) * x[i];
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Membership mod a (possibly composite) modulus

/// True iff every row (Right) or column (Left) inner product with v vanishes mod `modulus`.
inline bool check_vector_mod(const BitMatrix& m, std::span<const Integer> v, const Integer& modulus, Side side) {
    if (modulus < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be >= 2");
    const std::size_t expected = side == Side::Right ? m.cols() : m.rows();
    if (v.size() != expected) {
        throw Error(ErrorKind::DimensionMismatch,
                    "vector length " + std::to_string(v.size()) + " != " + std::to_string(expected));
    }
    const std::size_t lines = side == Side::Right ? m.rows() : m.cols();
    Integer acc;
    for (std::size_t line = 0; line < lines; ++line) {
        acc = 0;
        for (std::size_t k = 0; k < expected; ++k) {
            const bool bit = side == Side::Right ? m.get(line, k) : m.get(k, line);
            if (bit) acc += v[k];
        }
        if (mpz_divisible_p(acc.get_mpz_t(), modulus.get_mpz_t()) == 0) return false;
    }
    return true;
}

inline bool check_vector_mod(const BitMatrix& m, std::span<const std::int64_t> v, std::uint64_t modulus, Side side) {
    IntegerVector big;
    big.reserve(v.size());
    for (auto x : v) big.emplace_back(static_cast<long>(x));
    return check_vector_mod(m, big, Integer(static_cast<unsigned long>(modulus)), side);
}

/// Rational-vector form; entries must be integers.
inline bool check_vector_mod(const BitMatrix& m, const RationalVector& v, const Integer& modulus, Side side) {
    IntegerVector big;
    big.reserve(v.size());
    for (const auto& x : v) {
        if (!is_integer(x)) throw Error(ErrorKind::InvalidArgument, "entries must be integers");
        big.push_back(x.get_num());
    }
    return check_vector_mod(m, big, modulus, side);
}

}  // namespace spsing
