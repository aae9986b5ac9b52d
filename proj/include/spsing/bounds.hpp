#pragma once

// Closed-form quantities from the singularity arguments, evaluated exactly,
// plus exhaustive small-ball (atom) oracles.
//
// Union bounds are exact rationals up to n = 64. Beyond that they are 256-bit
// MPFR floats in which every operation rounds toward +infinity; all summands
// are nonnegative, so the rounded value is still a true upper bound.

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spsing/errors.hpp"
#include "spsing/models.hpp"
#include "spsing/rational.hpp"
#include "spsing/rng.hpp"
#include "spsing/stats.hpp"

namespace spsing {

inline constexpr std::size_t kExactUnionBoundMaxN = 64;
inline constexpr mpfr_prec_t kUpperPrecision = 256;

/// 256-bit float whose every arithmetic step rounds up.
class UpperFloat {
  public:
    UpperFloat() {
        mpfr_init2(value_, kUpperPrecision);
        mpfr_set_zero(value_, 1);
    }
    explicit UpperFloat(const Rational& q) : UpperFloat() { mpfr_set_q(value_, q.get_mpq_t(), MPFR_RNDU); }
    explicit UpperFloat(const Integer& z) : UpperFloat() { mpfr_set_z(value_, z.get_mpz_t(), MPFR_RNDU); }
    UpperFloat(const UpperFloat& other) : UpperFloat() { mpfr_set(value_, other.value_, MPFR_RNDU); }
    UpperFloat& operator=(const UpperFloat& other) {
        if (this != &other) mpfr_set(value_, other.value_, MPFR_RNDU);
        return *this;
    }
    ~UpperFloat() { mpfr_clear(value_); }

    UpperFloat& operator+=(const UpperFloat& other) {
        mpfr_add(value_, value_, other.value_, MPFR_RNDU);
        return *this;
    }
    UpperFloat& operator*=(const UpperFloat& other) {
        mpfr_mul(value_, value_, other.value_, MPFR_RNDU);
        return *this;
    }
    /// Nonnegative base only.
    UpperFloat pow(unsigned long exponent) const {
        UpperFloat out;
        mpfr_pow_ui(out.value_, value_, exponent, MPFR_RNDU);
        return out;
    }

    double to_double() const { return mpfr_get_d(value_, MPFR_RNDU); }

    /// Exact value of the float (it is a dyadic rational).
    Rational to_rational() const {
        Rational out;
        mpfr_get_q(out.get_mpq_t(), value_);
        return out;
    }

    /// Scientific decimal rendering, rounded up.
    std::string to_string(int digits = 20) const {
        mpfr_exp_t exp = 0;
        char* raw = mpfr_get_str(nullptr, &exp, 10, static_cast<std::size_t>(digits), value_, MPFR_RNDU);
        std::string mant(raw);
        mpfr_free_str(raw);
        if (mpfr_zero_p(value_)) return "0";
        bool neg = mant.front() == '-';
        if (neg) mant.erase(0, 1);
        std::string out = mant.substr(0, 1) + "." + mant.substr(1) + "e" + std::to_string(exp - 1);
        return neg ? "-" + out : out;
    }

    friend bool operator<=(const UpperFloat& a, const UpperFloat& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }

  private:
    mpfr_t value_;
};

/// Result of a bound evaluation: exact when available, otherwise a rounded-up float.
struct BoundValue {
    std::optional<Rational> exact;
    std::optional<UpperFloat> upper;

    double approx() const { return exact ? exact->get_d() : upper->to_double(); }

    std::string decimal() const { return exact ? to_decimal_string(*exact, 16) : upper->to_string(20); }
};

// ---------------------------------------------------------------------------
// Parity of binomial sums

/// Probability that Binomial(s, p) is even: 1/2 + (1 - 2p)^s / 2.
inline Rational p_even(unsigned long s, const Rational& p) {
    Rational half(1, 2);
    return half + pow(Rational(1 - 2 * p), s) * half;
}

/// Sum over s = 1..s_max of C(n,s) * p_even(s,p)^(n-1).
inline BoundValue union_bound_ber(std::size_t n, const Rational& p, std::size_t s_max, bool force_float = false) {
    if (s_max > n) throw Error(ErrorKind::InvalidArgument, "s_max must not exceed n");
    if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "p must lie in [0,1]");
    const unsigned long exponent = n == 0 ? 0 : n - 1;
    BoundValue out;
    if (n <= kExactUnionBoundMaxN && !force_float) {
        Rational total = 0;
        for (std::size_t s = 1; s <= s_max; ++s) total += Rational(binomial(n, s)) * pow(p_even(s, p), exponent);
        out.exact = total;
        return out;
    }
    UpperFloat total;
    for (std::size_t s = 1; s <= s_max; ++s) {
        UpperFloat term(binomial(n, s));
        term *= UpperFloat(p_even(s, p)).pow(exponent);
        total += term;
    }
    out.upper = total;
    return out;
}

/// Sum over s = 1..s_max of C(n,s) * q^(s+1) * P_s^(n-1), with P_s = p_values[s-1].
inline BoundValue union_bound_comb(std::size_t n, std::uint64_t q, std::size_t s_max, std::span<const Rational> p_values,
                                   bool force_float = false) {
    if (s_max > n) throw Error(ErrorKind::InvalidArgument, "s_max must not exceed n");
    if (p_values.size() < s_max) {
        throw Error(ErrorKind::DimensionMismatch, "need one P value per s in 1..s_max");
    }
    for (std::size_t s = 0; s < s_max; ++s) {
        if (p_values[s] < 0 || p_values[s] > 1) throw Error(ErrorKind::InvalidArgument, "P values must lie in [0,1]");
    }
    const unsigned long exponent = n == 0 ? 0 : n - 1;
    BoundValue out;
    if (n <= kExactUnionBoundMaxN && !force_float) {
        Rational total = 0;
        for (std::size_t s = 1; s <= s_max; ++s) {
            Integer qpow;
            mpz_ui_pow_ui(qpow.get_mpz_t(), q, s + 1);
            total += Rational(binomial(n, s) * qpow) * pow(p_values[s - 1], exponent);
        }
        out.exact = total;
        return out;
    }
    UpperFloat total;
    for (std::size_t s = 1; s <= s_max; ++s) {
        Integer qpow;
        mpz_ui_pow_ui(qpow.get_mpz_t(), q, s + 1);
        UpperFloat term(Integer(binomial(n, s) * qpow));
        term *= UpperFloat(p_values[s - 1]).pow(exponent);
        total += term;
    }
    out.upper = total;
    return out;
}

// ---------------------------------------------------------------------------
// Point masses and atoms

/// C(n,d) p^d (1-p)^(n-d).
inline Rational binomial_point_mass(std::size_t n, const Rational& p, std::size_t d) {
    if (d > n) throw Error(ErrorKind::InvalidArgument, "d must lie in [0,n]");
    return Rational(binomial(n, d)) * pow(p, d) * pow(Rational(1 - p), n - d);
}

/// Exact factor 1 / Pr(Bin(n,p) = d)^rows that converts a probability for
/// i.i.d. Bernoulli rows into a bound for `rows` rows of weight exactly d.
inline Rational row_weight_conditioning_factor(std::size_t n, const Rational& p, std::size_t d, std::size_t rows) {
    const Rational mass = binomial_point_mass(n, p, d);
    if (mass == 0) throw Error(ErrorKind::InvalidArgument, "row weight d has zero probability");
    return pow(Rational(1 / mass), rows);
}

struct AtomResult {
    Rational max_prob;
    Rational argmax;  // smallest value attaining max_prob
};

struct RationalHash {
    std::size_t operator()(const Rational& q) const noexcept {
        auto limbs = [](mpz_srcptr z) {
            std::uint64_t h = static_cast<std::uint64_t>(mpz_sgn(z)) + 0x9E37;
            const std::size_t size = mpz_size(z);
            for (std::size_t i = 0; i < size; ++i) h = mix64(h ^ static_cast<std::uint64_t>(mpz_getlimbn(z, i)));
            return h;
        };
        return static_cast<std::size_t>(limbs(q.get_num_mpz_t()) * 31 + limbs(q.get_den_mpz_t()));
    }
};

namespace detail {

template <class Map>
AtomResult best_atom(const Map& masses, const Rational& total) {
    AtomResult best{Rational(-1), Rational(0)};
    for (const auto& [value, mass] : masses) {
        if (mass > best.max_prob || (mass == best.max_prob && value < best.argmax)) {
            best.max_prob = mass;
            best.argmax = value;
        }
    }
    best.max_prob /= total;
    return best;
}

}  // namespace detail

/// max_a Pr(x_1 ξ_1 + ... + x_n ξ_n = a) for i.i.d. Bernoulli(p) ξ, by dynamic
/// programming over the exact set of reachable sums.
inline AtomResult max_atom_bernoulli(const RationalVector& x, Rational p, std::size_t max_len = 30,
                                     std::size_t max_states = std::size_t{1} << 22) {
    p.canonicalize();
    if (x.size() > max_len) {
        throw Error(ErrorKind::BudgetExceeded, "vector length " + std::to_string(x.size()) + " exceeds " + std::to_string(max_len));
    }
    if (p < 0 || p > 1) throw Error(ErrorKind::InvalidArgument, "p must lie in [0,1]");
    const Rational q = 1 - p;
    std::unordered_map<Rational, Rational, RationalHash> masses{{Rational(0), Rational(1)}};
    for (Rational xi : x) {
        xi.canonicalize();
        if (xi == 0) continue;
        std::unordered_map<Rational, Rational, RationalHash> next;
        next.reserve(masses.size() * 2);
        for (const auto& [value, mass] : masses) {
            if (q != 0) next[value] += mass * q;
            if (p != 0) next[value + xi] += mass * p;
        }
        if (next.size() > max_states) throw Error(ErrorKind::BudgetExceeded, "too many distinct partial sums");
        masses = std::move(next);
    }
    return detail::best_atom(masses, Rational(1));
}

/// max_a Pr(x·γ = a) (or ≡ a mod `modulus`) for γ a uniform d-subset
/// indicator, by enumerating all C(n,d) subsets.
inline AtomResult max_atom_combinatorial(const RationalVector& x, std::size_t d,
                                         std::optional<std::uint64_t> modulus = std::nullopt,
                                         std::uint64_t budget = 1000000) {
    const std::size_t n = x.size();
    if (d > n) throw Error(ErrorKind::InvalidArgument, "d must lie in [0,n]");
    const Integer outcomes = binomial(n, d);
    if (outcomes > budget) {
        throw Error(ErrorKind::BudgetExceeded, "C(n,d) = " + outcomes.get_str() + " exceeds " + std::to_string(budget));
    }
    if (modulus && *modulus < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be >= 2");

    // Reduce to a common integer scale when possible so the hot loop stays in machine words.
    Integer denom_lcm = 1;
    for (const auto& v : x) mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), v.get_den_mpz_t());
    if (modulus && denom_lcm != 1) throw Error(ErrorKind::InvalidArgument, "mod-q atoms need integer entries");
    std::vector<std::int64_t> scaled;
    bool fits = true;
    for (const auto& v : x) {
        Integer s = v.get_num() * (denom_lcm / v.get_den());
        if (modulus) mpz_fdiv_r_ui(s.get_mpz_t(), s.get_mpz_t(), *modulus);
        if (!s.fits_slong_p() || abs(s) > (Integer(1) << 40)) fits = false;
        scaled.push_back(fits ? s.get_si() : 0);
    }

    std::vector<std::size_t> pick(d);
    for (std::size_t k = 0; k < d; ++k) pick[k] = k;
    auto advance = [&]() {
        std::size_t pos = d;
        while (pos > 0 && pick[pos - 1] == n - d + (pos - 1)) --pos;
        if (pos == 0) return false;
        ++pick[pos - 1];
        for (std::size_t b = pos; b < d; ++b) pick[b] = pick[b - 1] + 1;
        return true;
    };

    const Rational total(outcomes);
    if (fits) {
        std::unordered_map<std::int64_t, std::uint64_t> counts;
        do {
            std::int64_t sum = 0;
            for (auto k : pick) sum += scaled[k];
            if (modulus) sum %= static_cast<std::int64_t>(*modulus);
            ++counts[sum];
        } while (advance());
        std::unordered_map<Rational, Rational, RationalHash> masses;
        for (const auto& [sum, count] : counts) {
            masses.emplace(make_rational(Integer(static_cast<long>(sum)), modulus ? Integer(1) : denom_lcm),
                           Rational(static_cast<unsigned long>(count)));
        }
        return detail::best_atom(masses, total);
    }
    RationalVector canon = x;
    for (auto& v : canon) v.canonicalize();
    std::unordered_map<Rational, Rational, RationalHash> masses;
    do {
        Rational sum = 0;
        for (auto k : pick) sum += canon[k];
        masses[sum] += 1;
    } while (advance());
    return detail::best_atom(masses, total);
}

// ---------------------------------------------------------------------------
// Pairing disagreement

struct DisagreementEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    Interval ci;  // 99% Clopper-Pearson
};

/// Monte Carlo estimate of the probability that some pair of a random pairing
/// (d disjoint pairs) straddles two fibres of v. Trial t uses
/// sample_pairing(n, d, derive_seed(seed, t)).
inline DisagreementEstimate pairing_disagreement_prob(const RationalVector& v, std::size_t d, std::uint64_t trials,
                                                      std::uint64_t seed) {
    const std::size_t n = v.size();
    if (2 * d > n) throw Error(ErrorKind::PairingInfeasible, "2d exceeds n");
    if (trials == 0) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
    DisagreementEstimate out;
    out.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto pairing = sample_pairing(n, d, derive_seed(seed, t));
        const bool straddles = std::any_of(pairing.pairs.begin(), pairing.pairs.end(),
                                           [&](const auto& pr) { return v[pr.first] != v[pr.second]; });
        out.successes += straddles;
    }
    out.estimate = static_cast<double>(out.successes) / static_cast<double>(trials);
    out.ci = clopper_pearson(out.successes, trials, 0.99);
    return out;
}

}  // namespace spsing
