#pragma once

/**
 * @file numbertheory.hpp
 * @brief Square-free integers: sieve, the intensity factor f(q), coprime
 *        counting and the truncated integrated intensity Z(k).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diffscale/core.hpp"

namespace diffscale {

inline constexpr std::uint64_t kSieveBudget = 500'000'000;

/// Square-free flags and smallest prime factors on 1..N.
class SquarefreeSieve {
   public:
    explicit SquarefreeSieve(std::uint64_t N) : N_(N) {
        if (N < 2) throw Error("sieve requires N >= 2");
        if (N > kSieveBudget) throw Error("sieve limit exceeds the memory budget of " + std::to_string(kSieveBudget));
        flags_.assign(N + 1, true);
        flags_[0] = false;
        spf_.assign(N + 1, 0);
        for (std::uint64_t p = 2; p <= N; ++p) {
            if (spf_[p] != 0) continue;
            for (std::uint64_t m = p; m <= N; m += p)
                if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(p);
            if (p <= N / p)
                for (std::uint64_t m = p * p; m <= N; m += p * p) flags_[m] = false;
        }
    }

    std::uint64_t limit() const { return N_; }
    /// n ∈ Z with 0 < |n| ≤ N.
    bool is_squarefree(std::int64_t n) const {
        auto a = static_cast<std::uint64_t>(n < 0 ? -n : n);
        if (a > N_) throw Error("argument beyond sieve limit");
        return flags_[a];
    }
    std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_.at(n); }

    std::uint64_t count() const {
        std::uint64_t c = 0;
        for (std::uint64_t n = 1; n <= N_; ++n) c += flags_[n];
        return c;
    }

    /// Distinct primes of n ≤ N in increasing order.
    std::vector<std::uint64_t> primes_of(std::uint64_t n) const {
        std::vector<std::uint64_t> ps;
        while (n > 1) {
            std::uint64_t p = spf_.at(n);
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
        return ps;
    }

    /// First S square-free numbers.
    std::vector<std::uint64_t> first(std::size_t S) const {
        std::vector<std::uint64_t> out;
        for (std::uint64_t n = 1; n <= N_ && out.size() < S; ++n)
            if (flags_[n]) out.push_back(n);
        if (out.size() < S) throw Error("sieve too small for the requested count");
        return out;
    }

   private:
    std::uint64_t N_;
    std::vector<bool> flags_;
    std::vector<std::uint32_t> spf_;
};

inline SquarefreeSieve sieve(std::uint64_t N) { return SquarefreeSieve(N); }

/// Sieve large enough to hold the first S square-free numbers.
inline SquarefreeSieve sieve_for_count(std::size_t S) {
    return SquarefreeSieve(std::max<std::uint64_t>(16, static_cast<std::uint64_t>(1.7 * static_cast<double>(S)) + 64));
}

/// Distinct primes with multiplicities by trial division.
inline std::vector<std::pair<std::uint64_t, int>> factorise(std::uint64_t q) {
    if (q < 1) throw Error("factorise requires q >= 1");
    std::vector<std::pair<std::uint64_t, int>> f;
    for (std::uint64_t p = 2; p <= q / p; ++p) {
        if (q % p) continue;
        int e = 0;
        while (q % p == 0) q /= p, ++e;
        f.emplace_back(p, e);
    }
    if (q > 1) f.emplace_back(q, 1);
    return f;
}

/// f(q) = Π_{p|q} 1/(p² − 1) for cube-free q, else 0.
inline Rational f_factor(std::uint64_t q) {
    Rational r(1);
    for (auto [p, e] : factorise(q)) {
        if (e >= 3) return Rational(0);
        r = r * Rational(1, static_cast<i128>(p) * static_cast<i128>(p) - 1);
    }
    return r;
}

/// #{1 ≤ m ≤ x : gcd(m, q) = 1} by inclusion–exclusion over the primes of q.
inline std::uint64_t coprime_count_primes(long double x, const std::vector<std::uint64_t>& primes) {
    if (x < 1) return 0;
    const auto X = static_cast<std::int64_t>(std::floor(x));
    std::int64_t total = 0;
    const std::size_t w = primes.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w); ++mask) {
        std::int64_t d = 1;
        int bits = 0;
        for (std::size_t i = 0; i < w; ++i)
            if (mask >> i & 1) {
                ++bits;
                d *= static_cast<std::int64_t>(primes[i]);
                if (d > X) break;
            }
        if (d > X) continue;
        total += (bits % 2 ? -1 : 1) * (X / d);
    }
    return static_cast<std::uint64_t>(total);
}

inline std::uint64_t coprime_count(long double x, std::uint64_t q) {
    if (q < 1) throw Error("coprime_count requires q >= 1");
    if (x < 0) throw Error("coprime_count requires x >= 0");
    std::vector<std::uint64_t> primes;
    for (auto [p, e] : factorise(q)) primes.push_back(p);
    return coprime_count_primes(x, primes);
}

/// Square-free generators with their prime sets, reusable across k.
class SquarefreeGenerators {
   public:
    explicit SquarefreeGenerators(std::size_t S) {
        if (S < 1) throw Error("S must be >= 1");
        auto sv = sieve_for_count(S);
        for (auto s : sv.first(S)) {
            Gen g;
            g.s = s;
            g.primes = sv.primes_of(s);
            long double f = 1;
            for (auto p : g.primes) f /= static_cast<long double>(p * p - 1);
            g.f2 = f * f;
            // divisors of square-free s
            g.divisors = {1};
            for (auto p : g.primes) {
                auto n = g.divisors.size();
                for (std::size_t i = 0; i < n; ++i) g.divisors.push_back(g.divisors[i] * p);
            }
            gens_.push_back(std::move(g));
        }
    }

    std::size_t size() const { return gens_.size(); }

    /// Σ over s and d | s of #{m ≤ s d k coprime to s} f(s)², for s d k ≥ 1.
    long double z(long double k) const {
        if (!(k > 0 && k < 1)) throw Error("z_squarefree requires 0 < k < 1");
        std::vector<long double> terms;
        for (const auto& g : gens_)
            for (auto d : g.divisors) {
                long double qk = static_cast<long double>(g.s) * static_cast<long double>(d) * k;
                if (qk < 1) continue;
                auto c = coprime_count_primes(qk, g.primes);
                if (c) terms.push_back(static_cast<long double>(c) * g.f2);
            }
        return ordered_sum(std::move(terms));
    }

   private:
    struct Gen {
        std::uint64_t s = 0;
        std::vector<std::uint64_t> primes;
        std::vector<std::uint64_t> divisors;
        long double f2 = 0;
    };
    std::vector<Gen> gens_;
};

inline long double z_squarefree(long double k, std::size_t S) { return SquarefreeGenerators(S).z(k); }

struct RPoint {
    long double k = 0;
    long double z = 0;
    long double r = 0;
};

/// R(k) = log Z(k) / log k; truncated sums underestimate Z, so R is biased upwards.
inline std::vector<RPoint> r_diagnostic(const std::vector<long double>& ks, std::size_t S) {
    SquarefreeGenerators g(S);
    std::vector<RPoint> out;
    for (auto k : ks) {
        long double z = g.z(k);
        out.push_back({k, z, std::log(z) / std::log(k)});
    }
    return out;
}

}  // namespace diffscale
