#pragma once

// Word-sized modular arithmetic and the deterministic prime table.

#include <cstdint>
#include <mutex>
#include <vector>

#include "spsing/rng.hpp"

namespace spsing {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1U) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin, exact for every 64-bit input.
inline bool is_prime_u64(std::uint64_t n) noexcept {
    if (n < 2) return false;
    constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : small) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1U) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : small) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Inverse of a modulo prime p (a not divisible by p).
inline std::uint64_t invmod_prime(std::uint64_t a, std::uint64_t p) noexcept { return powmod(a, p - 2, p); }

/// Modular primes live in [2^30, 2^31) so that products of two residues fit
/// in 64 bits without widening.
inline constexpr std::uint64_t kPrimeFloor = std::uint64_t{1} << 30;
inline constexpr std::uint64_t kPrimeCeiling = std::uint64_t{1} << 31;

/// The i-th largest prime below 2^31. The table grows on demand and its
/// order never changes, which keeps multi-modular results reproducible.
inline std::uint64_t table_prime(std::size_t index) {
    static std::mutex mutex;
    static std::vector<std::uint64_t> table;
    std::lock_guard lock(mutex);
    std::uint64_t candidate = table.empty() ? kPrimeCeiling - 1 : table.back() - 2;
    while (table.size() <= index) {
        while (!is_prime_u64(candidate)) candidate -= 2;
        table.push_back(candidate);
        candidate -= 2;
    }
    return table[index];
}

/// A uniformly placed prime in [2^30, 2^31): random odd start, then the next prime up.
inline std::uint64_t random_prime(SplitMix64& rng) {
    for (;;) {
        std::uint64_t candidate = kPrimeFloor + rng.bounded(kPrimeCeiling - kPrimeFloor);
        candidate |= 1U;
        while (candidate < kPrimeCeiling && !is_prime_u64(candidate)) candidate += 2;
        if (candidate < kPrimeCeiling) return candidate;
    }
}

}  // namespace spsing
