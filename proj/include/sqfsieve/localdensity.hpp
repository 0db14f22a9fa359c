// Counting and classifying discriminant zeros modulo p and p^2: the
// strong/weak dichotomy and exact or estimated c_p (the number of residues
// x in (Z/p^2)^m with f(x) = 0 mod p^2).
//
// Exhaustive scans: cp_bruteforce walks (Z/p^2)^m; cp_hensel walks (Z/p)^m
// canonical representatives and lifts:
//   c_p = p^{m-1} N_w + p^m N_s
// where N_w counts residues with f = 0 (p), grad f != 0 (p) (each such
// residue contributes a hyperplane of p^{m-1} lifts) and N_s counts residues
// with grad f = 0 (p) and f = 0 (p^2) (f is then constant mod p^2 along the
// fiber, so all p^m lifts vanish).
#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "sqfsieve/common.hpp"
#include "sqfsieve/forms.hpp"
#include "sqfsieve/invariants.hpp"

namespace sqfsieve {

enum class PointClass { NotMultiple, WeakMultiple, StrongMultiple };

enum class CpMethod { BruteForce, Hensel, MonteCarlo };

inline const char* to_string(PointClass c) {
    switch (c) {
        case PointClass::NotMultiple: return "not-multiple";
        case PointClass::WeakMultiple: return "weak";
        case PointClass::StrongMultiple: return "strong";
    }
    return "?";
}

inline const char* to_string(CpMethod m) {
    switch (m) {
        case CpMethod::BruteForce: return "bruteforce";
        case CpMethod::Hensel: return "hensel";
        case CpMethod::MonteCarlo: return "montecarlo";
    }
    return "?";
}

struct LocalDensityRecord {
    Family family;
    unsigned long p = 0;
    Rat cp = 0;           // exact count, or scaled estimate for Monte Carlo
    Rat strong_count = 0; // residues mod p^2 in the strong class
    Rat weak_count = 0;
    CpMethod method = CpMethod::BruteForce;
    Rat ci_radius = 0;    // 3-sigma radius on the density scale; 0 when exact
    uint64_t samples = 0;
    uint64_t seed = 0;
};

struct CpOptions {
    uint64_t budget = 1000000000ull; // max residues to scan
    int threads = 1;
};

// ---------------------------------------------------------------------------
// Point classification.

inline PointClass classify_lattice(Family fam, const std::vector<Int>& x, unsigned long p) {
    Int f = disc_lattice(fam, x);
    Int p2 = Int(static_cast<long>(p)) * static_cast<long>(p);
    if (!mpz_divisible_p(f.get_mpz_t(), p2.get_mpz_t())) return PointClass::NotMultiple;
    const int m = family_info(fam).m;
    for (int i = 0; i < m; ++i) {
        Int d = disc_partial_lattice(fam, x, i);
        if (!mpz_divisible_ui_p(d.get_mpz_t(), p)) return PointClass::WeakMultiple;
    }
    return PointClass::StrongMultiple;
}

inline PointClass classify_point(Family fam, const FormVector& v, unsigned long p) {
    if (v.family != fam) throw ContractError("family mismatch");
    if (!is_prime_u32(static_cast<uint32_t>(p))) throw ContractError("p must be prime");
    return classify_lattice(fam, lattice_coords(v), p);
}

// ---------------------------------------------------------------------------
// Scan plumbing.

namespace detail {

inline Int ipow_check_budget(unsigned long base, int exp, uint64_t budget, const char* what) {
    Int total = pow_ui(Int(static_cast<long>(base)), static_cast<unsigned long>(exp));
    if (total > Int(static_cast<unsigned long>(budget)))
        throw BudgetError(std::string(what) + ": scan size " + total.get_str() +
                          " exceeds budget " + std::to_string(budget));
    return total;
}

// Exact f value at small nonnegative lattice coordinates, for the generic
// scan paths (term lists where available, exact invariant otherwise).
inline Int disc_at(Family fam, const std::vector<Int>& x) { return disc_lattice(fam, x); }

inline bool grad_zero_mod_p(Family fam, const std::vector<Int>& x, unsigned long p) {
    const int m = family_info(fam).m;
    if (const auto* grads = disc_gradient_terms(fam)) {
        for (int i = 0; i < m; ++i) {
            Int d = (*grads)[i].eval(x);
            if (!mpz_divisible_ui_p(d.get_mpz_t(), p)) return false;
        }
        return true;
    }
    for (int i = 0; i < m; ++i) {
        Int d = disc_partial_lattice(fam, x, i);
        if (!mpz_divisible_ui_p(d.get_mpz_t(), p)) return false;
    }
    return true;
}

// Specialized Hensel scan for binary cubics: Horner in the last coordinate,
// int64 arithmetic throughout (valid for p up to ~2^15).
struct F3HenselTally {
    uint64_t nw = 0, ns = 0;
};

inline F3HenselTally f3_hensel_slab(long p, long a_lo, long a_hi) {
    F3HenselTally t;
    const long p2 = p * p;
    auto md = [&](long v) { long r = v % p; return r < 0 ? r + p : r; };
    for (long a = a_lo; a < a_hi; ++a) {
        for (long b = 0; b < p; ++b) {
            const long b3 = md(md(b * b) * b);
            for (long c = 0; c < p; ++c) {
                // f = -27 a^2 d^2 + (18abc - 4b^3) d + (b^2 c^2 - 4 a c^3)
                const long c2 = md(-27 * md(a * a));
                const long c1 = md(18 * md(md(a * b) * c) - 4 * b3);
                const long c0 = md(md(md(b * b) * md(c * c)) - 4 * md(a * md(md(c * c) * c)));
                for (long d = 0; d < p; ++d) {
                    long f = md((md(c2 * d) + c1) * d % p + c0);
                    if (f != 0) continue;
                    // gradient mod p
                    long ga = md(18 * md(b * md(c * d)) - 4 * md(c * md(c * c)) -
                                 54 * md(a * md(d * d)));
                    long gb = md(18 * md(a * md(c * d)) - 12 * md(md(b * b) * d) +
                                 2 * md(b * md(c * c)));
                    long gc = md(18 * md(a * md(b * d)) + 2 * md(md(b * b) * c) -
                                 12 * md(a * md(c * c)));
                    long gd = md(18 * md(a * md(b * c)) - 4 * b3 - 54 * md(md(a * a) * d));
                    if (ga | gb | gc | gd) {
                        ++t.nw;
                    } else {
                        // strong candidate: value mod p^2 (inputs < p, so
                        // every product below stays within int64 for p<2^15)
                        const long bb = b * b % p2, cc = c * c % p2;
                        const long aa = a * a % p2, dd = d * d % p2;
                        long t1 = (18 * a * b % p2) * c % p2 * d % p2;
                        long t2 = (4 * bb % p2) * b % p2 * d % p2;
                        long t3 = bb * cc % p2;
                        long t4 = (4 * a * cc % p2) * c % p2;
                        long t5 = (27 * aa % p2) * dd % p2;
                        long f2 = ((t1 - t2 + t3 - t4 - t5) % p2 + p2) % p2;
                        if (f2 == 0) ++t.ns;
                    }
                }
            }
        }
    }
    return t;
}

} // namespace detail

// ---------------------------------------------------------------------------
// c_p by exhaustive count over (Z/p^2)^m.

inline LocalDensityRecord cp_bruteforce(Family fam, unsigned long p, CpOptions opt = {}) {
    if (!is_prime_u32(static_cast<uint32_t>(p))) throw ContractError("p must be prime");
    const auto& d = family_info(fam);
    detail::ipow_check_budget(p * p, d.m, opt.budget, "cp_bruteforce");
    const long q = static_cast<long>(p * p);
    std::vector<Int> x(d.m, Int(0));
    Int p2 = q;
    uint64_t strong = 0, weak = 0;
    const TermPoly* terms = disc_terms(fam);
    const auto* grads = disc_gradient_terms(fam);
    while (true) {
        Int f = terms ? terms->eval(x) : detail::disc_at(fam, x);
        if (mpz_divisible_p(f.get_mpz_t(), p2.get_mpz_t())) {
            bool gz = grads ? [&] {
                for (const auto& g : *grads)
                    if (!mpz_divisible_ui_p(Int(g.eval(x)).get_mpz_t(), p)) return false;
                return true;
            }() : detail::grad_zero_mod_p(fam, x, p);
            if (gz) ++strong; else ++weak;
        }
        int i = 0;
        for (; i < d.m; ++i) {
            x[i] += 1;
            if (x[i] < q) break;
            x[i] = 0;
        }
        if (i == d.m) break;
    }
    LocalDensityRecord rec;
    rec.family = fam;
    rec.p = p;
    rec.method = CpMethod::BruteForce;
    rec.strong_count = Rat(static_cast<unsigned long>(strong));
    rec.weak_count = Rat(static_cast<unsigned long>(weak));
    rec.cp = rec.strong_count + rec.weak_count;
    return rec;
}

// ---------------------------------------------------------------------------
// c_p via the Hensel structure of canonical representatives mod p.

inline LocalDensityRecord cp_hensel(Family fam, unsigned long p, CpOptions opt = {}) {
    if (!is_prime_u32(static_cast<uint32_t>(p))) throw ContractError("p must be prime");
    const auto& d = family_info(fam);
    detail::ipow_check_budget(p, d.m, opt.budget, "cp_hensel");

    uint64_t nw = 0, ns = 0;
    if (fam == Family::F3) {
        const long lp = static_cast<long>(p);
        int nthreads = std::max(1, opt.threads);
        if (nthreads == 1 || lp < 8) {
            auto t = detail::f3_hensel_slab(lp, 0, lp);
            nw = t.nw;
            ns = t.ns;
        } else {
            std::vector<detail::F3HenselTally> tallies(nthreads);
            std::vector<std::thread> pool;
            for (int w = 0; w < nthreads; ++w) {
                long lo = lp * w / nthreads, hi = lp * (w + 1) / nthreads;
                pool.emplace_back([&, w, lo, hi] { tallies[w] = detail::f3_hensel_slab(lp, lo, hi); });
            }
            for (auto& th : pool) th.join();
            for (const auto& t : tallies) { nw += t.nw; ns += t.ns; }
        }
    } else {
        std::vector<Int> x(d.m, Int(0));
        const long q = static_cast<long>(p);
        Int p2 = Int(q) * q;
        const TermPoly* terms = disc_terms(fam);
        while (true) {
            Int f = terms ? terms->eval(x) : detail::disc_at(fam, x);
            if (mpz_divisible_ui_p(f.get_mpz_t(), p)) {
                if (!detail::grad_zero_mod_p(fam, x, p)) {
                    ++nw;
                } else if (mpz_divisible_p(f.get_mpz_t(), p2.get_mpz_t())) {
                    ++ns;
                }
            }
            int i = 0;
            for (; i < d.m; ++i) {
                x[i] += 1;
                if (x[i] < q) break;
                x[i] = 0;
            }
            if (i == d.m) break;
        }
    }

    LocalDensityRecord rec;
    rec.family = fam;
    rec.p = p;
    rec.method = CpMethod::Hensel;
    Int pm1 = pow_ui(Int(static_cast<long>(p)), static_cast<unsigned long>(d.m - 1));
    Int pm = pm1 * static_cast<long>(p);
    rec.weak_count = Rat(pm1 * Int(static_cast<unsigned long>(nw)));
    rec.strong_count = Rat(pm * Int(static_cast<unsigned long>(ns)));
    rec.cp = rec.strong_count + rec.weak_count;
    return rec;
}

// ---------------------------------------------------------------------------
// Unbiased Monte Carlo estimate of c_p / p^{2m}, reported on the residue
// count scale with a 3-sigma radius.

inline LocalDensityRecord cp_montecarlo(Family fam, unsigned long p, uint64_t samples,
                                        uint64_t seed, CpOptions opt = {}) {
    (void)opt;
    if (!is_prime_u32(static_cast<uint32_t>(p))) throw ContractError("p must be prime");
    if (samples < 10000) throw ContractError("cp_montecarlo needs samples >= 10^4");
    const auto& d = family_info(fam);
    const unsigned long q = p * p;
    SplitMix64 rng(derive_stream(seed, 0x6d632d63 /* mc-c */));
    uint64_t hits = 0, strong = 0, weak = 0;
    std::vector<Int> x(d.m);
    Int p2 = Int(static_cast<long>(q));
    for (uint64_t s = 0; s < samples; ++s) {
        for (int i = 0; i < d.m; ++i) x[i] = static_cast<long>(rng.below(q));
        Int f = disc_lattice(fam, x);
        if (!mpz_divisible_p(f.get_mpz_t(), p2.get_mpz_t())) continue;
        ++hits;
        if (detail::grad_zero_mod_p(fam, x, p)) ++strong; else ++weak;
    }
    LocalDensityRecord rec;
    rec.family = fam;
    rec.p = p;
    rec.method = CpMethod::MonteCarlo;
    rec.samples = samples;
    rec.seed = seed;
    Int p2m = pow_ui(Int(static_cast<long>(p)), static_cast<unsigned long>(2 * d.m));
    Rat scale = Rat(p2m) / Rat(static_cast<unsigned long>(samples));
    rec.cp = Rat(static_cast<unsigned long>(hits)) * scale;
    rec.strong_count = Rat(static_cast<unsigned long>(strong)) * scale;
    rec.weak_count = Rat(static_cast<unsigned long>(weak)) * scale;
    // 3 sqrt(q(1-q)/n) <= 3 ceil(sqrt(h(n-h)n)) / n^2, exact rational bound.
    Int inner = Int(static_cast<unsigned long>(hits)) *
                Int(static_cast<unsigned long>(samples - hits)) *
                Int(static_cast<unsigned long>(samples));
    Int root;
    mpz_sqrt(root.get_mpz_t(), inner.get_mpz_t());
    if (root * root < inner) root += 1;
    rec.ci_radius = Rat(3 * root) / Rat(Int(static_cast<unsigned long>(samples)) *
                                        Int(static_cast<unsigned long>(samples)));
    return rec;
}

// ---------------------------------------------------------------------------
// #Y_k(F_p), the subscheme cut by f and its first k-1 derivatives in the
// designated last coordinate.

inline Int count_Yk_points(Family fam, int k, unsigned long p, CpOptions opt = {}) {
    if (k < 1 || k > 3) throw ContractError("count_Yk_points: k must be 1..3");
    if (!is_prime_u32(static_cast<uint32_t>(p))) throw ContractError("p must be prime");
    const auto& d = family_info(fam);
    detail::ipow_check_budget(p, d.m, opt.budget, "count_Yk_points");
    const int last = d.m - 1;

    // Successive derivatives in the last coordinate.
    std::vector<TermPoly> derivs;
    const TermPoly* base = disc_terms(fam);
    if (base) {
        TermPoly cur = *base;
        for (int j = 1; j < k; ++j) {
            cur = cur.derivative(last);
            derivs.push_back(cur);
        }
    }

    std::vector<Int> x(d.m, Int(0));
    const long q = static_cast<long>(p);
    Int count = 0;
    while (true) {
        bool ok = true;
        Int f = base ? base->eval(x) : detail::disc_at(fam, x);
        ok = mpz_divisible_ui_p(f.get_mpz_t(), p);
        if (ok && k >= 2) {
            if (base) {
                for (const auto& dp : derivs) {
                    Int v = dp.eval(x);
                    if (!mpz_divisible_ui_p(v.get_mpz_t(), p)) { ok = false; break; }
                }
            } else {
                // j-th derivative = j! * (coefficient j of f along e_last);
                // recover the coefficients by exact interpolation.
                const int deg = d.disc_degree;
                std::vector<Rat> samples(deg + 1);
                std::vector<Int> pt(x);
                for (int j = 0; j <= deg; ++j) {
                    pt[last] = x[last] + j;
                    samples[j] = Rat(detail::disc_at(fam, pt));
                }
                std::vector<Rat> coeffs = interpolate_coeffs(samples);
                Int factorial = 1;
                for (int j = 1; j < k && ok; ++j) {
                    factorial *= j;
                    Rat cj = static_cast<size_t>(j) < coeffs.size() ? coeffs[j] : Rat(0);
                    Int dj = Rat(cj * Rat(factorial)).get_num();
                    if (!mpz_divisible_ui_p(dj.get_mpz_t(), p)) ok = false;
                }
            }
        }
        if (ok) count += 1;
        int i = 0;
        for (; i < d.m; ++i) {
            x[i] += 1;
            if (x[i] < q) break;
            x[i] = 0;
        }
        if (i == d.m) break;
    }
    return count;
}

// ---------------------------------------------------------------------------
// 1 - c_p / p^{2m}.

inline Rat local_factor(const LocalDensityRecord& rec) {
    const auto& d = family_info(rec.family);
    Int p2m = pow_ui(Int(static_cast<long>(rec.p)), static_cast<unsigned long>(2 * d.m));
    return Rat(1) - rec.cp / Rat(p2m);
}

inline Rat local_factor(Family fam, unsigned long p, CpMethod method, CpOptions opt = {},
                        uint64_t samples = 100000, uint64_t seed = 0xB1A46A) {
    switch (method) {
        case CpMethod::BruteForce: return local_factor(cp_bruteforce(fam, p, opt));
        case CpMethod::Hensel: return local_factor(cp_hensel(fam, p, opt));
        case CpMethod::MonteCarlo: return local_factor(cp_montecarlo(fam, p, samples, seed, opt));
    }
    throw ContractError("unknown method");
}

} // namespace sqfsieve
