// Exact evaluation of the discriminant invariant of each family, plus
// covariance laws, symbolic term lists and exact partial derivatives.
//
// All arithmetic in this header is exact (GMP integers / rationals).
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

#include "sqfsieve/common.hpp"
#include "sqfsieve/forms.hpp"

namespace sqfsieve {

// ---------------------------------------------------------------------------
// Univariate discriminant via the Sylvester resultant.
//
// `coeffs` are descending: f(x) = coeffs[0] x^n + ... + coeffs[n], with
// coeffs[0] != 0.  disc(f) = (-1)^{n(n-1)/2} Res(f, f') / lc(f), computed
// exactly with a fraction-free determinant.

inline Int resultant_f_fprime(const std::vector<Int>& f) {
    const int n = static_cast<int>(f.size()) - 1;
    std::vector<Int> g(n);
    for (int i = 0; i < n; ++i) g[i] = Int(n - i) * f[i];
    const int dim = 2 * n - 1;
    std::vector<std::vector<Int>> M(dim, std::vector<Int>(dim, Int(0)));
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j <= n; ++j) M[i][i + j] = f[j];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n - 1; ++j) M[n - 1 + i][i + j] = g[j];
    return bareiss_det(M);
}

inline Int disc_univariate(const std::vector<Int>& coeffs) {
    if (coeffs.empty() || std::all_of(coeffs.begin(), coeffs.end(),
                                      [](const Int& c) { return c == 0; }))
        throw ContractError("disc_univariate: zero polynomial");
    if (coeffs[0] == 0) throw ContractError("disc_univariate: zero leading coefficient");
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) throw ContractError("disc_univariate: degree must be >= 1");
    if (n == 1) return 1;
    Int res = resultant_f_fprime(coeffs);
    Int d = exact_div(res, coeffs[0]);
    int s = (n * (n - 1) / 2) % 2;
    return s ? Int(-d) : d;
}

// ---------------------------------------------------------------------------
// Discriminant of a binary form of degree n (descending coefficients,
// rational entries permitted).  Homogeneous of degree 2n-2 in the
// coefficients.  A vanishing leading coefficient is repaired by the
// unimodular shear (s,t) -> (s, t + L s), which leaves the invariant fixed.

inline Rat disc_binary_form(std::vector<Rat> coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 2) throw ContractError("disc_binary_form: degree must be >= 2");
    bool zero = std::all_of(coeffs.begin(), coeffs.end(), [](const Rat& c) { return c == 0; });
    if (zero) throw ContractError("disc_binary_form: zero form");

    if (coeffs[0] == 0) {
        long shear = 0;
        for (long lam = 1; lam <= n; ++lam) {
            Rat lead = 0, lp = 1;
            for (int i = 0; i <= n; ++i) { lead += coeffs[i] * lp; lp *= lam; }
            if (lead != 0) { shear = lam; break; }
        }
        if (shear == 0) throw ContractError("disc_binary_form: no unimodular shear found");
        Mat g = {{Rat(1), Rat(shear)}, {Rat(0), Rat(1)}};
        coeffs = detail::binary_substitute(coeffs, n, g);
    }

    Int den = 1;
    for (const auto& c : coeffs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<Int> ic(n + 1);
    for (int i = 0; i <= n; ++i) {
        Rat scaled = coeffs[i] * Rat(den);
        ic[i] = scaled.get_num();
    }
    Rat result(disc_univariate(ic));
    result /= pow_rat(Rat(den), 2 * n - 2);
    return result;
}

inline Rat disc_w1(const Rat& A, const Rat& B) {
    return Rat(-4) * A * A * A - Rat(27) * B * B;
}

// ---------------------------------------------------------------------------
// Pencil discriminants.
//
// For a pair (A, B) of symmetric k x k Gram matrices the invariant is the
// discriminant of the integral resolvent binary form of det(As + Bt):
//   k = 3:  disc(4 det(As+Bt))          (primitive on integer-valued pairs)
//   k = 4:  disc(16 det(As+Bt)) / 2^8   (normalized to be primitive on
//                                        integer-valued pairs; the constant
//                                        was fixed by a gcd survey over
//                                        random integral pairs)
// Both scalings matter only as global constants; covariance ratios and
// zero loci are unaffected.

struct PencilDisc {
    Rat value;
    bool degenerate = false; // det(As+Bt) identically zero
};

// Coefficients (descending in s) of det(As + Bt), via exact interpolation.
inline std::vector<Rat> pencil_form(const Mat& A, const Mat& B) {
    const int k = static_cast<int>(A.size());
    if (B.size() != A.size()) throw ContractError("pencil matrices differ in size");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (A[i][j] != A[j][i] || B[i][j] != B[j][i])
                throw ContractError("pencil matrices must be symmetric");
    // q(x) = det(Ax + B) has degree <= k; sample x = 0..k.
    std::vector<Rat> samples(k + 1);
    for (int x = 0; x <= k; ++x) {
        Mat M(k, std::vector<Rat>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) M[i][j] = A[i][j] * x + B[i][j];
        samples[x] = small_det(M);
    }
    std::vector<Rat> asc = interpolate_coeffs(samples); // q = sum asc[i] x^i
    std::vector<Rat> desc(k + 1);
    for (int i = 0; i <= k; ++i) desc[i] = asc[k - i];
    return desc; // coefficient of s^{k-i} t^i
}

namespace detail {
// 2-content of the k=4 pencil invariant disc(16 det(As+Bt)) over the lattice
// of integer-valued pairs, found empirically and verified by exactness
// assertions on every integral evaluation.
inline const Int& g4_pencil_divisor() {
    static const Int d = 256;
    return d;
}
} // namespace detail

inline PencilDisc disc_pencil(const Mat& A, const Mat& B) {
    const int k = static_cast<int>(A.size());
    if (k != 3 && k != 4) throw ContractError("pencil size must be 3 or 4");
    std::vector<Rat> form = pencil_form(A, B);
    long scale = k == 3 ? 4 : 16;
    bool zero = std::all_of(form.begin(), form.end(), [](const Rat& c) { return c == 0; });
    if (zero) return {Rat(0), true};
    for (auto& c : form) c *= scale;
    Rat d = disc_binary_form(form);
    if (k == 4) d /= Rat(detail::g4_pencil_divisor());
    return {d, false};
}

// ---------------------------------------------------------------------------
// Ternary cubic discriminant via the 15 x 15 Macaulay resultant of the three
// partial derivatives (quadrics), with minor division and a char-polynomial
// fallback when the minor is singular.  The resultant equals a fixed integer
// multiple of the primitive invariant; the divisor below was fixed by a gcd
// survey over random integer cubics (see tests for the primitivity check).

namespace detail {

inline const std::array<std::array<int, 3>, 15>& deg4_monomials() {
    static const std::array<std::array<int, 3>, 15> m = {{
        {4, 0, 0}, {3, 1, 0}, {3, 0, 1}, {2, 2, 0}, {2, 1, 1}, {2, 0, 2},
        {1, 3, 0}, {1, 2, 1}, {1, 1, 2}, {1, 0, 3}, {0, 4, 0}, {0, 3, 1},
        {0, 2, 2}, {0, 1, 3}, {0, 0, 4},
    }};
    return m;
}

inline int deg4_index(int i, int j, int k) {
    const auto& mono = deg4_monomials();
    for (size_t a = 0; a < mono.size(); ++a)
        if (mono[a][0] == i && mono[a][1] == j && mono[a][2] == k) return static_cast<int>(a);
    throw ContractError("bad degree-4 monomial");
}

// Quadric coefficients ordered r^2, rs, rt, s^2, st, t^2.
inline const std::array<std::array<int, 3>, 6>& quad_monomials() {
    static const std::array<std::array<int, 3>, 6> m = {{
        {2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2},
    }};
    return m;
}

// Partial derivatives of an integer ternary cubic, as three quadrics.
inline std::array<std::array<Int, 6>, 3> cubic_partials(const std::vector<Int>& c) {
    std::array<std::array<Int, 6>, 3> q;
    for (auto& arr : q) arr.fill(Int(0));
    const auto& expo = g3_exponents();
    const auto& qm = quad_monomials();
    for (int idx = 0; idx < 10; ++idx) {
        if (c[idx] == 0) continue;
        int e[3] = {expo[idx][0], expo[idx][1], expo[idx][2]};
        for (int var = 0; var < 3; ++var) {
            if (e[var] == 0) continue;
            int d[3] = {e[0], e[1], e[2]};
            d[var] -= 1;
            for (int pos = 0; pos < 6; ++pos)
                if (qm[pos][0] == d[0] && qm[pos][1] == d[1] && qm[pos][2] == d[2]) {
                    q[var][pos] += Int(e[var]) * c[idx];
                    break;
                }
        }
    }
    return q;
}

// The Macaulay matrix for three quadrics in (r,s,t) at total degree 4.
// Row for monomial mu is (mu / x_i^2) * q_i where i is the first variable
// with x_i^2 | mu.  Columns are the 15 degree-4 monomials.
inline std::vector<std::vector<Int>> macaulay_matrix(const std::array<std::array<Int, 6>, 3>& q) {
    const auto& mono = deg4_monomials();
    const auto& qm = quad_monomials();
    std::vector<std::vector<Int>> M(15, std::vector<Int>(15, Int(0)));
    for (int row = 0; row < 15; ++row) {
        int e[3] = {mono[row][0], mono[row][1], mono[row][2]};
        int which = e[0] >= 2 ? 0 : (e[1] >= 2 ? 1 : 2);
        int shift[3] = {e[0], e[1], e[2]};
        shift[which] -= 2;
        for (int pos = 0; pos < 6; ++pos) {
            if (q[which][pos] == 0) continue;
            int col = deg4_index(shift[0] + qm[pos][0], shift[1] + qm[pos][1],
                                 shift[2] + qm[pos][2]);
            M[row][col] += q[which][pos];
        }
    }
    return M;
}

// Indices of the monomials divisible by at least two of r^2, s^2, t^2.
inline std::array<int, 3> macaulay_minor_indices() {
    return {deg4_index(2, 2, 0), deg4_index(2, 0, 2), deg4_index(0, 2, 2)};
}

inline Int det3(const std::array<std::array<Int, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Exact division of polynomials over Q; throws on nonzero remainder.
inline std::vector<Rat> poly_divide_exact(std::vector<Rat> num, const std::vector<Rat>& den) {
    while (!num.empty() && num.back() == 0) num.pop_back();
    std::vector<Rat> d(den);
    while (!d.empty() && d.back() == 0) d.pop_back();
    if (d.empty()) throw ContractError("polynomial division by zero");
    if (num.empty()) return {Rat(0)};
    if (num.size() < d.size()) throw ContractError("polynomial division not exact");
    std::vector<Rat> quot(num.size() - d.size() + 1, Rat(0));
    for (size_t k = quot.size(); k-- > 0;) {
        Rat q = num[k + d.size() - 1] / d.back();
        quot[k] = q;
        for (size_t j = 0; j < d.size(); ++j) num[k + j] -= q * d[j];
    }
    for (const auto& c : num)
        if (c != 0) throw ContractError("polynomial division not exact");
    return quot;
}

// Resultant of the three partial-derivative quadrics of an integer cubic.
inline Int macaulay_resultant(const std::vector<Int>& cubic) {
    auto q = cubic_partials(cubic);
    auto M = macaulay_matrix(q);
    auto idx = macaulay_minor_indices();
    std::array<std::array<Int, 3>, 3> minor;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) minor[i][j] = M[idx[i]][idx[j]];
    Int dminor = det3(minor);
    if (dminor != 0) {
        auto tmp = M;
        Int dfull = bareiss_det(tmp);
        return exact_div(dfull, dminor);
    }
    // Singular minor: perturb q_i by tau * x_i^2, which adds tau on the
    // diagonal of both the full matrix and the minor.  The Macaulay identity
    // det M(tau) = Res(tau) * det M''(tau) holds identically in tau, so the
    // resultant is the constant term of the exact polynomial quotient.
    std::vector<Rat> pfull(16), pminor(16);
    for (int tau = 0; tau <= 15; ++tau) {
        auto tmp = M;
        for (int i = 0; i < 15; ++i) tmp[i][i] += tau;
        pfull[tau] = Rat(bareiss_det(tmp));
        std::array<std::array<Int, 3>, 3> mm = minor;
        for (int i = 0; i < 3; ++i) mm[i][i] += tau;
        pminor[tau] = Rat(det3(mm));
    }
    std::vector<Rat> cf = interpolate_coeffs(pfull);
    std::vector<Rat> cm0 = interpolate_coeffs(pminor);
    std::vector<Rat> cm(cm0.begin(), cm0.begin() + 4);
    std::vector<Rat> quot = poly_divide_exact(cf, cm);
    Rat res = quot.empty() ? Rat(0) : quot[0];
    if (!is_integer(res)) throw ContractError("macaulay resultant not integral");
    return res.get_num();
}

// Res(dF/dr, dF/ds, dF/dt) = -27 * Disc(F) with Disc the primitive integral
// invariant.  The content 27 was frozen from a gcd survey over random
// integer cubics; the sign makes the Weierstrass specialization
// Disc(y^2 z - x^3 - A x z^2 - B z^3) = -16 (4A^3 + 27B^2) agree with the
// classical elliptic-curve discriminant.
inline const Int& g3_macaulay_divisor() {
    static const Int d = -27;
    return d;
}

} // namespace detail

inline Rat disc_ternary_cubic(const std::vector<Rat>& coeffs) {
    if (coeffs.size() != 10) throw ContractError("ternary cubic has 10 coefficients");
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Rat& c) { return c == 0; }))
        throw ContractError("disc_ternary_cubic: zero form");
    Int den = 1;
    for (const auto& c : coeffs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<Int> ic(10);
    for (int i = 0; i < 10; ++i) ic[i] = Rat(coeffs[i] * Rat(den)).get_num();
    Int res = detail::macaulay_resultant(ic);
    Rat val = Rat(res) / Rat(detail::g3_macaulay_divisor());
    val /= pow_rat(Rat(den), 12);
    return val;
}

// ---------------------------------------------------------------------------
// Family dispatch.

struct DiscValue {
    Rat value;
    Family family;
    bool degenerate = false;
};

inline DiscValue disc(const FormVector& v) {
    const auto& d = family_info(v.family);
    if (static_cast<int>(v.coeffs.size()) != d.m)
        throw ContractError("coefficient vector length mismatch");
    DiscValue out{Rat(0), v.family, false};
    switch (v.family) {
        case Family::W1:
            out.value = disc_w1(v.coeffs[0], v.coeffs[1]);
            break;
        case Family::F3:
        case Family::G2: {
            bool zero = std::all_of(v.coeffs.begin(), v.coeffs.end(),
                                    [](const Rat& c) { return c == 0; });
            out.value = zero ? Rat(0) : disc_binary_form(v.coeffs);
            break;
        }
        case Family::G3: {
            bool zero = std::all_of(v.coeffs.begin(), v.coeffs.end(),
                                    [](const Rat& c) { return c == 0; });
            out.value = zero ? Rat(0) : disc_ternary_cubic(v.coeffs);
            break;
        }
        case Family::F4:
        case Family::G4: {
            auto [A, B] = gram_pair(v);
            PencilDisc p = disc_pencil(A, B);
            out.value = p.value;
            out.degenerate = p.degenerate;
            break;
        }
    }
    return out;
}

// Integer discriminant of a lattice-integral form (asserts integrality of
// both the input and the value).
inline Int disc_int(const FormVector& v) {
    if (!v.integral()) throw ContractError("disc_int requires a lattice-integral form");
    Rat val = disc(v).value;
    if (!is_integer(val)) throw ContractError("integral input produced non-integral disc");
    return val.get_num();
}

// ---------------------------------------------------------------------------
// Covariance: disc(act(gamma, v)) = lambda(gamma) * disc(v) with
//   W1: u^6 (weighted scaling by u)     F3: det^2      G2, G3: 1
//   F4: det(g2)^6 det(g3)^8             G4: det(g2)^12 det(g4)^12

inline Rat covariance_multiplier(Family fam, const GroupElement& gamma) {
    switch (fam) {
        case Family::W1: return pow_rat(gamma.block_det(0), 6);
        case Family::F3: return pow_rat(gamma.block_det(0), 2);
        case Family::G2: return 1;
        case Family::G3: return 1;
        case Family::F4:
            return pow_rat(gamma.block_det(0), 6) * pow_rat(gamma.block_det(1), 8);
        case Family::G4:
            return pow_rat(gamma.block_det(0), 12) * pow_rat(gamma.block_det(1), 12);
    }
    throw ContractError("unknown family");
}

inline std::pair<Rat, Rat> covariance_check(Family fam, const GroupElement& gamma,
                                            const FormVector& v) {
    if (fam != v.family) throw ContractError("family mismatch");
    Rat lhs = disc(act(gamma, v)).value;
    Rat rhs = covariance_multiplier(fam, gamma) * disc(v).value;
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Symbolic term lists for the low-dimensional families (used by the modular
// scanning kernels) and exact partial derivatives for all families.

struct TermPoly {
    int nvars;
    struct Term {
        long coeff;
        std::array<uint8_t, 20> e;
    };
    std::vector<Term> terms;

    Int eval(const std::vector<Int>& x) const {
        Int acc = 0, t;
        for (const auto& term : terms) {
            t = term.coeff;
            for (int i = 0; i < nvars; ++i)
                for (int rep = 0; rep < term.e[i]; ++rep) t *= x[i];
            acc += t;
        }
        return acc;
    }

    // Evaluation modulo `mod` (mod^2 must fit in 64 bits for the reductions
    // used here; callers keep mod <= 2^31).
    uint64_t eval_mod(const uint32_t* x, uint64_t mod) const {
        uint64_t acc = 0;
        for (const auto& term : terms) {
            long c = term.coeff % static_cast<long>(mod);
            if (c < 0) c += static_cast<long>(mod);
            uint64_t t = static_cast<uint64_t>(c);
            for (int i = 0; i < nvars; ++i)
                for (int rep = 0; rep < term.e[i]; ++rep) t = t * (x[i] % mod) % mod;
            acc = (acc + t) % mod;
        }
        return acc;
    }

    TermPoly derivative(int var) const {
        TermPoly out{nvars, {}};
        for (const auto& term : terms) {
            if (term.e[var] == 0) continue;
            Term d = term;
            d.coeff = term.coeff * term.e[var];
            d.e[var] -= 1;
            out.terms.push_back(d);
        }
        return out;
    }
};

namespace detail {

inline TermPoly make_terms(int nvars, std::vector<std::pair<long, std::vector<int>>> spec) {
    TermPoly p{nvars, {}};
    for (auto& [c, e] : spec) {
        TermPoly::Term t{};
        t.coeff = c;
        t.e.fill(0);
        for (int i = 0; i < nvars; ++i) t.e[i] = static_cast<uint8_t>(e[i]);
        p.terms.push_back(t);
    }
    return p;
}

} // namespace detail

// Expanded discriminant polynomials for W1 / F3 / G2.
inline const TermPoly* disc_terms(Family fam) {
    static const TermPoly w1 = detail::make_terms(2, {{-4, {3, 0}}, {-27, {0, 2}}});
    static const TermPoly f3 = detail::make_terms(
        4, {{18, {1, 1, 1, 1}}, {-4, {0, 3, 0, 1}}, {1, {0, 2, 2, 0}},
            {-4, {1, 0, 3, 0}}, {-27, {2, 0, 0, 2}}});
    static const TermPoly g2 = detail::make_terms(
        5, {{256, {3, 0, 0, 0, 3}}, {-192, {2, 1, 0, 1, 2}}, {-128, {2, 0, 2, 0, 2}},
            {144, {2, 0, 1, 2, 1}},  {-27, {2, 0, 0, 4, 0}}, {144, {1, 2, 1, 0, 2}},
            {-6, {1, 2, 0, 2, 1}},   {-80, {1, 1, 2, 1, 1}}, {18, {1, 1, 1, 3, 0}},
            {16, {1, 0, 4, 0, 1}},   {-4, {1, 0, 3, 2, 0}},  {-27, {0, 4, 0, 0, 2}},
            {18, {0, 3, 1, 1, 1}},   {-4, {0, 3, 0, 3, 0}},  {-4, {0, 2, 3, 0, 1}},
            {1, {0, 2, 2, 2, 0}}});
    switch (fam) {
        case Family::W1: return &w1;
        case Family::F3: return &f3;
        case Family::G2: return &g2;
        default: return nullptr;
    }
}

inline const std::vector<TermPoly>* disc_gradient_terms(Family fam) {
    static const auto build = [](Family f) {
        std::vector<TermPoly> g;
        const TermPoly* p = disc_terms(f);
        for (int i = 0; i < p->nvars; ++i) g.push_back(p->derivative(i));
        return g;
    };
    static const std::vector<TermPoly> w1 = build(Family::W1);
    static const std::vector<TermPoly> f3 = build(Family::F3);
    static const std::vector<TermPoly> g2 = build(Family::G2);
    switch (fam) {
        case Family::W1: return &w1;
        case Family::F3: return &f3;
        case Family::G2: return &g2;
        default: return nullptr;
    }
}

// Discriminant as a function of integer lattice coordinates.
inline Int disc_lattice(Family fam, const std::vector<Int>& x) {
    if (const TermPoly* p = disc_terms(fam)) return p->eval(x);
    return disc_int(form_from_lattice(fam, x));
}

// Exact partial derivative d f / d x_i at integer lattice coordinates, via
// term lists where available and exact univariate interpolation otherwise.
inline Int disc_partial_lattice(Family fam, const std::vector<Int>& x, int i) {
    if (const auto* grads = disc_gradient_terms(fam)) return (*grads)[i].eval(x);
    const int deg = family_info(fam).disc_degree;
    std::vector<Rat> samples(deg + 1);
    std::vector<Int> pt(x);
    for (int j = 0; j <= deg; ++j) {
        pt[i] = x[i] + j;
        samples[j] = Rat(disc_lattice(fam, pt));
    }
    std::vector<Rat> coeffs = interpolate_coeffs(samples);
    Rat c1 = coeffs.size() > 1 ? coeffs[1] : Rat(0);
    if (!is_integer(c1)) throw ContractError("partial derivative not integral");
    return c1.get_num();
}

} // namespace sqfsieve
