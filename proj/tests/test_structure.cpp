#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "spsing/models.hpp"
#include "spsing/structure.hpp"

using namespace spsing;

namespace {

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

/// Minimum support over span(basis) by scanning forced-zero sets (n <= 10).
std::size_t brute_min_support(const KernelBasis<RationalVector>& basis) {
    const std::size_t n = basis.ambient_dim;
    const std::size_t k = basis.dimension();
    std::size_t best = n;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        // Restrict basis to coordinates in mask: does a nonzero combination vanish there?
        std::vector<std::size_t> coords;
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (1U << j)) coords.push_back(j);
        IntMatrix restricted(coords.size(), k);
        for (std::size_t a = 0; a < coords.size(); ++a)
            for (std::size_t i = 0; i < k; ++i) restricted.at(a, i) = basis.vectors[i][coords[a]].get_num();  // integer basis
        if (!kernel_rational(restricted, Side::Right).empty() || coords.empty()) {
            best = std::min(best, n - coords.size());
        }
    }
    return best;
}

}  // namespace

TEST(AnalyzeVector, Examples) {
    auto zero = analyze_vector(rv({0, 0, 0}));
    EXPECT_EQ(zero.support_size, 0u);
    EXPECT_EQ(zero.largest_fibre_size, 3u);
    EXPECT_EQ(zero.s, 0u);

    auto r = analyze_vector(rv({1, 1, 2, 0}));
    EXPECT_EQ(r.support_size, 3u);
    EXPECT_EQ(r.fibre_histogram.at(Rational(1)), 2u);
    EXPECT_EQ(r.fibre_histogram.at(Rational(2)), 1u);
    EXPECT_EQ(r.fibre_histogram.at(Rational(0)), 1u);
    EXPECT_EQ(r.largest_fibre_size, 2u);
    EXPECT_EQ(r.s, 2u);

    auto halves = analyze_vector(rv({Rational(1, 2), make_rational(2, 4), 3}));
    EXPECT_EQ(halves.fibre_histogram.at(Rational(1, 2)), 2u);
}

TEST(AnalyzeVector, EmptyVector) {
    try {
        (void)analyze_vector(RationalVector{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyVector);
    }
}

TEST(AnalyzeVector, InvariantsUnderPermutationAndScaling) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + gen() % 15;
        RationalVector x(n);
        for (auto& v : x) v = make_rational(static_cast<long>(gen() % 5) - 2, 1 + static_cast<long>(gen() % 3));
        auto base = analyze_vector(x);
        std::size_t total = 0;
        for (const auto& [value, count] : base.fibre_histogram) total += count;
        ASSERT_EQ(total, n);
        ASSERT_EQ(base.s, n - base.largest_fibre_size);

        RationalVector perm = x;
        std::shuffle(perm.begin(), perm.end(), gen);
        auto p = analyze_vector(perm);
        ASSERT_EQ(p.support_size, base.support_size);
        ASSERT_EQ(p.fibre_histogram, base.fibre_histogram);

        Rational lambda = make_rational(static_cast<long>(gen() % 7) - 3, 1 + static_cast<long>(gen() % 4));
        if (lambda == 0) lambda = Rational(-5, 3);
        RationalVector scaled = x;
        for (auto& v : scaled) v *= lambda;
        auto s = analyze_vector(scaled);
        ASSERT_EQ(s.support_size, base.support_size);
        ASSERT_EQ(s.fibre_sizes(), base.fibre_sizes());
    }
}

TEST(EvalPredicate, Examples) {
    EXPECT_FALSE(eval_predicate(SupportAtLeast{2}, rv({1, 0, 0})));
    EXPECT_TRUE(eval_predicate(SupportAtLeast{1}, rv({0, Rational(-3, 7), 0})));
    EXPECT_TRUE(eval_predicate(LargestFibreAtMost{4}, rv({1, 1, 1, 1, 0})));  // floor(0.8*5) = 4
    EXPECT_FALSE(eval_predicate(LargestFibreAtMost{3}, rv({1, 1, 1, 1, 0})));
    EXPECT_EQ(log_fibre_bound(Rational(1), 100, 3), Rational(8));  // (1 - 1/ln 3)*100 = 8.98
}

TEST(MinSupportGf2, Examples) {
    auto trivial = enumerate_gf2_kernel_min_support(BitMatrix::identity(4), Side::Right);
    EXPECT_TRUE(trivial.trivial());
    EXPECT_FALSE(trivial.min_support.has_value());

    auto tri = enumerate_gf2_kernel_min_support(BitMatrix::from_rows({"110", "011", "101"}), Side::Left);
    EXPECT_EQ(tri.min_support.value(), 3u);
    EXPECT_EQ(tri.witness.to_string(), "111");

    // Columns 1 and 3 equal.
    auto dup = enumerate_gf2_kernel_min_support(BitMatrix::from_rows({"1101", "0101", "1000", "0010"}), Side::Right);
    EXPECT_EQ(dup.min_support.value(), 2u);
    EXPECT_EQ(dup.witness.to_string(), "0101");
}

TEST(MinSupportGf2, KernelTooLarge) {
    try {
        (void)enumerate_gf2_kernel_min_support(BitMatrix(3, 30), Side::Right);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::KernelTooLarge);
    }
}

TEST(MinSupportGf2, ZeroColumnGivesSupportOne) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        BitMatrix m = sample(BernoulliModel{Rational(1, 3)}, 12, seed);
        const std::size_t j = seed % 12;
        for (std::size_t i = 0; i < 12; ++i) m.set(i, j, false);
        ASSERT_EQ(enumerate_gf2_kernel_min_support(m, Side::Right).min_support.value(), 1u);
    }
}

TEST(MinSupportGf2, MatchesExhaustiveScan) {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t rows = 1 + gen() % 8;
        std::size_t cols = 1 + gen() % 10;
        BitMatrix m = oracle::random_bits(rows, cols, 0.4, gen);
        std::size_t best = cols + 1;
        for (unsigned v = 1; v < (1U << cols); ++v) {
            BitVector bv(cols);
            for (std::size_t j = 0; j < cols; ++j)
                if (v & (1U << j)) bv.set(j);
            if (apply_gf2(m, bv, Side::Right).none()) best = std::min<std::size_t>(best, std::popcount(v));
        }
        auto r = enumerate_gf2_kernel_min_support(m, Side::Right);
        if (best == cols + 1) {
            ASSERT_TRUE(r.trivial());
        } else {
            ASSERT_EQ(r.min_support.value(), best);
        }
    }
}

TEST(MinSupportRational, MatchesForcedZeroScan) {
    std::mt19937_64 gen(23);
    int nontrivial = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t rows = 1 + gen() % 5;
        std::size_t cols = 2 + gen() % 7;
        IntMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = static_cast<long>(gen() % 3) - 1;
        auto basis = kernel_rational(m, Side::Right);
        if (basis.empty()) continue;
        ++nontrivial;
        auto fast = min_support_rational(basis);
        ASSERT_EQ(fast.min_support, brute_min_support(basis)) << trial;
        const auto image = apply(m, fast.witness, Side::Right);
        ASSERT_TRUE(std::all_of(image.begin(), image.end(), [](const Rational& x) { return x == 0; }));
    }
    EXPECT_GT(nontrivial, 100);
}

TEST(ModqBadVectors, Examples) {
    // All n identity rows: only the zero vector survives, and it is constant.
    EXPECT_TRUE(enumerate_modq_bad_vectors(BitMatrix::identity(4), 3, 4).empty());

    // n-1 identity rows leave the last coordinate free.
    BitMatrix partial = BitMatrix::identity(4).top_rows(3);
    auto free_last = enumerate_modq_bad_vectors(partial, 3, 4);
    ASSERT_EQ(free_last.size(), 2u);
    EXPECT_EQ(free_last[0], (std::vector<std::uint32_t>{0, 0, 0, 1}));
    EXPECT_EQ(free_last[1], (std::vector<std::uint32_t>{0, 0, 0, 2}));

    EXPECT_EQ(enumerate_modq_bad_vectors(BitMatrix(2, 3), 2, 3).size(), 6u);
    EXPECT_TRUE(enumerate_modq_bad_vectors(BitMatrix::from_rows({"11"}), 2, 2).empty());
}

TEST(ModqBadVectors, FibreFilterAndMembership) {
    BitMatrix rows = sample(CombinatorialModel{3}, 6, 11, 5);
    for (std::size_t s_max = 0; s_max <= 6; ++s_max) {
        auto list = enumerate_modq_bad_vectors(rows, 2, s_max);
        for (const auto& v : list) {
            std::vector<std::int64_t> signed_v(v.begin(), v.end());
            ASSERT_TRUE(check_vector_mod(rows, signed_v, 2, Side::Right));
            ASSERT_LE(6 - largest_fibre(v), s_max);
            ASSERT_LT(largest_fibre(v), 6u);
        }
    }
}

TEST(ModqBadVectors, BudgetExceeded) {
    try {
        (void)enumerate_modq_bad_vectors(BitMatrix(1, 9), 8, 9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
    }
}
