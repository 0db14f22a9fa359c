// Shared utilities: exceptions, deterministic RNG, prime tables, exact
// linear algebra and interpolation over Z / Q (GMP-backed).
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfsieve {

using Int = mpz_class;
using Rat = mpq_class;

// Contract violations (bad arguments, unmet preconditions). CLI exit code 1.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Work size exceeds the configured budget. CLI exit code 2.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG.  splitmix64 seeds independent streams per work unit so
// results never depend on the number of worker threads.

struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Unbiased value in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        uint64_t lim = ~uint64_t{0} - (~uint64_t{0} % n);
        uint64_t v;
        do { v = next(); } while (v >= lim);
        return v % n;
    }
    // Uniform integer in [-bound, bound].
    long symmetric(long bound) {
        return static_cast<long>(below(2 * static_cast<uint64_t>(bound) + 1)) - bound;
    }
};

inline uint64_t derive_stream(uint64_t master, uint64_t index) {
    SplitMix64 g(master ^ (0xa0761d6478bd642full * (index + 1)));
    return g.next();
}

// ---------------------------------------------------------------------------
// Primes.

inline std::vector<uint32_t> primes_up_to(uint32_t n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<uint32_t> out;
    for (uint32_t i = 2; i <= n; ++i) {
        if (!comp[i]) {
            out.push_back(i);
            for (uint64_t j = uint64_t{i} * i; j <= n; j += i) comp[j] = true;
        }
    }
    return out;
}

inline bool is_prime_u32(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t d = 2; uint64_t{d} * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Small exact linear algebra.

// Fraction-free (Bareiss) determinant of an integer matrix, destroys `m`.
inline Int bareiss_det(std::vector<std::vector<Int>>& m) {
    const size_t n = m.size();
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            size_t piv = k + 1;
            while (piv < n && m[piv][k] == 0) ++piv;
            if (piv == n) return 0;
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : Int(-m[n - 1][n - 1]);
}

// Determinant of a square rational matrix of dimension <= 4 (cofactor
// expansion; sizes here never exceed 4).
inline Rat small_det(const std::vector<std::vector<Rat>>& m) {
    const size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Rat acc = 0;
    std::vector<std::vector<Rat>> minor(n - 1, std::vector<Rat>(n - 1));
    for (size_t c = 0; c < n; ++c) {
        for (size_t i = 1; i < n; ++i) {
            size_t jj = 0;
            for (size_t j = 0; j < n; ++j) {
                if (j == c) continue;
                minor[i - 1][jj++] = m[i][j];
            }
        }
        Rat term = m[0][c] * small_det(minor);
        if (c % 2 == 0) acc += term; else acc -= term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact univariate interpolation.  Given values f(0), f(1), ..., f(d) of a
// polynomial of degree <= d, recover its coefficients (Newton form, exact).
inline std::vector<Rat> interpolate_coeffs(const std::vector<Rat>& values) {
    const size_t n = values.size();
    // Divided differences at nodes 0..n-1.
    std::vector<Rat> dd(values);
    for (size_t level = 1; level < n; ++level) {
        for (size_t i = n - 1; i >= level; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / Rat(static_cast<long>(level));
            if (i == level) break;
        }
    }
    // Expand the Newton basis prod_{j<i} (x - j).
    std::vector<Rat> coeffs(n, Rat(0));
    std::vector<Rat> basis{Rat(1)};
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < basis.size(); ++j) coeffs[j] += dd[i] * basis[j];
        if (i + 1 < n) {
            basis.push_back(0);
            for (size_t j = basis.size() - 1; j > 0; --j)
                basis[j] = basis[j - 1] - Rat(static_cast<long>(i)) * basis[j];
            basis[0] *= -Rat(static_cast<long>(i));
        }
    }
    return coeffs;
}

// ---------------------------------------------------------------------------
// Rational helpers.

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

// p-adic valuation of a nonzero rational; throws on zero.
inline long valuation(const Rat& q, unsigned long p) {
    if (q == 0) throw ContractError("valuation of zero");
    Int num = q.get_num(), den = q.get_den();
    long v = 0;
    while (mpz_divisible_ui_p(num.get_mpz_t(), p)) { num /= static_cast<long>(p); ++v; }
    while (mpz_divisible_ui_p(den.get_mpz_t(), p)) { den /= static_cast<long>(p); --v; }
    return v;
}

// Divisibility by p^k for a rational (zero counts as divisible).
inline bool divisible_pk(const Rat& q, unsigned long p, long k) {
    if (q == 0) return true;
    return valuation(q, p) >= k;
}

inline Int pow_ui(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e == 0) return 1;
    Rat b = e > 0 ? base : Rat(1) / base;
    unsigned long k = static_cast<unsigned long>(e > 0 ? e : -e);
    Rat r = 1;
    while (k) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

// Exact integer quotient; throws if the division is not exact.
inline Int exact_div(const Int& a, const Int& b) {
    if (b == 0 || !mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
        throw ContractError("inexact integer division");
    Int q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace sqfsieve
