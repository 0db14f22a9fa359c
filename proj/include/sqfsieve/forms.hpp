// Representation families, coefficient encodings and twisted group actions.
//
// Six families are registered:
//   W1  Weierstrass coefficient pairs (A,B), disc -4A^3-27B^2
//   F3  binary cubic forms  a s^3 + b s^2 t + c s t^2 + d t^3
//   G2  binary quartic forms a s^4 + ... + e t^4
//   G3  ternary cubic forms (degree-lex coefficient order)
//   F4  pairs of ternary quadratic forms (symmetric Gram matrices)
//   G4  pairs of quaternary quadratic forms (symmetric Gram matrices)
//
// For the Gram families the stored coefficients are the Gram entries, so an
// integer-valued quadratic form has integer diagonal and half-integer
// off-diagonal entries.  The integer lattice V(Z) is parametrized by the
// polynomial coefficients (off-diagonals doubled); all modular and
// enumerative operations work in those lattice coordinates.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sqfsieve/common.hpp"

namespace sqfsieve {

enum class Family { W1, F3, G2, G3, F4, G4 };

using Mat = std::vector<std::vector<Rat>>;

struct FamilyDescriptor {
    Family id;
    int m;           // ambient dimension
    int disc_degree; // degree of the discriminant invariant (weighted for W1)
    std::string group_shape;
    std::vector<std::string> layout;
    std::vector<int> block_sizes;
    int twist; // action multiplies by det(block 0)^{-twist}
};

namespace detail {

inline std::vector<std::string> gram_layout(char a, char b, int k) {
    std::vector<std::string> out;
    for (char mat : {a, b})
        for (int i = 1; i <= k; ++i)
            for (int j = i; j <= k; ++j)
                out.push_back(std::string(1, mat) + std::to_string(i) + std::to_string(j));
    return out;
}

inline const std::array<FamilyDescriptor, 6>& registry() {
    static const std::array<FamilyDescriptor, 6> table = {{
        {Family::W1, 2, 6, "Gm weighted (A,B) -> (u^2 A, u^3 B)", {"A", "B"}, {1}, 0},
        {Family::F3, 4, 4, "GL2, twist det^-1", {"a", "b", "c", "d"}, {2}, 1},
        {Family::G2, 5, 6, "GL2, twist det^-2", {"a", "b", "c", "d", "e"}, {2}, 2},
        {Family::G3, 10, 12, "GL3, twist det^-1",
         {"r3", "r2s", "r2t", "rs2", "rst", "rt2", "s3", "s2t", "st2", "t3"}, {3}, 1},
        {Family::F4, 12, 12, "GL2 x SL3 on Gram pairs", gram_layout('a', 'b', 3), {2, 3}, 0},
        {Family::G4, 20, 24, "GL2 x SL4 on Gram pairs", gram_layout('a', 'b', 4), {2, 4}, 0},
    }};
    return table;
}

// Exponent triples for the G3 degree-lex layout.
inline const std::array<std::array<int, 3>, 10>& g3_exponents() {
    static const std::array<std::array<int, 3>, 10> e = {{
        {3, 0, 0}, {2, 1, 0}, {2, 0, 1}, {1, 2, 0}, {1, 1, 1},
        {1, 0, 2}, {0, 3, 0}, {0, 2, 1}, {0, 1, 2}, {0, 0, 3},
    }};
    return e;
}

} // namespace detail

inline const FamilyDescriptor& family_info(Family id) {
    for (const auto& d : detail::registry())
        if (d.id == id) return d;
    throw ContractError("unknown family id");
}

inline std::string family_name(Family id) {
    switch (id) {
        case Family::W1: return "w1";
        case Family::F3: return "f3";
        case Family::G2: return "g2";
        case Family::G3: return "g3";
        case Family::F4: return "f4";
        case Family::G4: return "g4";
    }
    throw ContractError("unknown family id");
}

inline Family family_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
    if (s == "w1") return Family::W1;
    if (s == "f3") return Family::F3;
    if (s == "g2") return Family::G2;
    if (s == "g3") return Family::G3;
    if (s == "f4") return Family::F4;
    if (s == "g4") return Family::G4;
    throw ContractError("unknown family name: " + name);
}

inline bool is_gram_family(Family id) { return id == Family::F4 || id == Family::G4; }

inline int gram_size(Family id) { return id == Family::F4 ? 3 : 4; }

// ---------------------------------------------------------------------------
// FormVector

struct FormVector {
    Family family;
    std::vector<Rat> coeffs;

    // Lattice integrality: membership in V(Z).  For the Gram families the
    // diagonal must be integral and off-diagonals half-integral; otherwise
    // every entry must be an integer.
    bool integral() const {
        const auto& d = family_info(family);
        if (static_cast<int>(coeffs.size()) != d.m)
            throw ContractError("coefficient vector length mismatch");
        if (!is_gram_family(family)) {
            for (const auto& c : coeffs)
                if (!is_integer(c)) return false;
            return true;
        }
        int k = gram_size(family);
        size_t idx = 0;
        for (int mat = 0; mat < 2; ++mat)
            for (int i = 0; i < k; ++i)
                for (int j = i; j < k; ++j, ++idx) {
                    if (i == j) {
                        if (!is_integer(coeffs[idx])) return false;
                    } else {
                        if (!is_integer(coeffs[idx] * 2)) return false;
                    }
                }
        return true;
    }

    bool operator==(const FormVector& o) const {
        return family == o.family && coeffs == o.coeffs;
    }
};

inline FormVector zero_form(Family id) {
    return FormVector{id, std::vector<Rat>(family_info(id).m, Rat(0))};
}

// Integer lattice coordinates (doubled off-diagonals for Gram families).
inline std::vector<Int> lattice_coords(const FormVector& v) {
    const auto& d = family_info(v.family);
    if (static_cast<int>(v.coeffs.size()) != d.m)
        throw ContractError("coefficient vector length mismatch");
    if (!v.integral()) throw ContractError("form is not lattice-integral");
    std::vector<Int> out(d.m);
    if (!is_gram_family(v.family)) {
        for (int i = 0; i < d.m; ++i) out[i] = v.coeffs[i].get_num();
        return out;
    }
    int k = gram_size(v.family);
    size_t idx = 0;
    for (int mat = 0; mat < 2; ++mat)
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j, ++idx) {
                Rat c = i == j ? v.coeffs[idx] : v.coeffs[idx] * 2;
                out[idx] = c.get_num();
            }
    return out;
}

inline FormVector form_from_lattice(Family id, const std::vector<Int>& x) {
    const auto& d = family_info(id);
    if (static_cast<int>(x.size()) != d.m) throw ContractError("lattice vector length mismatch");
    FormVector v{id, std::vector<Rat>(d.m)};
    if (!is_gram_family(id)) {
        for (int i = 0; i < d.m; ++i) v.coeffs[i] = Rat(x[i]);
        return v;
    }
    int k = gram_size(id);
    size_t idx = 0;
    for (int mat = 0; mat < 2; ++mat)
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j, ++idx)
                v.coeffs[idx] = i == j ? Rat(x[idx]) : Rat(x[idx]) / 2;
    return v;
}

// Gram matrices of a pencil family form (A first, B second).
inline std::pair<Mat, Mat> gram_pair(const FormVector& v) {
    if (!is_gram_family(v.family)) throw ContractError("not a Gram family");
    int k = gram_size(v.family);
    Mat A(k, std::vector<Rat>(k)), B(k, std::vector<Rat>(k));
    size_t idx = 0;
    for (Mat* M : {&A, &B})
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j, ++idx) {
                (*M)[i][j] = v.coeffs[idx];
                (*M)[j][i] = v.coeffs[idx];
            }
    return {A, B};
}

inline FormVector form_from_gram(Family id, const Mat& A, const Mat& B) {
    int k = gram_size(id);
    FormVector v{id, {}};
    v.coeffs.reserve(2 * k * (k + 1) / 2);
    for (const Mat* M : {&A, &B})
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) v.coeffs.push_back((*M)[i][j]);
    return v;
}

// ---------------------------------------------------------------------------
// Canonical textual encoding: "family:c1,c2,...,cm" with rationals as num/den.

inline std::string encode_form(const FormVector& v) {
    std::ostringstream os;
    os << family_name(v.family) << ":";
    for (size_t i = 0; i < v.coeffs.size(); ++i) {
        if (i) os << ",";
        os << v.coeffs[i].get_str();
    }
    return os.str();
}

inline FormVector decode_form(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ContractError("form encoding missing ':'");
    Family id = family_from_name(text.substr(0, colon));
    const auto& d = family_info(id);
    FormVector v{id, {}};
    std::string rest = text.substr(colon + 1);
    std::istringstream is(rest);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) throw ContractError("empty coefficient in form encoding");
        try {
            Rat q(tok);
            q.canonicalize();
            v.coeffs.push_back(q);
        } catch (const std::invalid_argument&) {
            throw ContractError("bad coefficient '" + tok + "'");
        }
    }
    if (static_cast<int>(v.coeffs.size()) != d.m)
        throw ContractError("expected " + std::to_string(d.m) + " coefficients for " +
                            family_name(id));
    return v;
}

// ---------------------------------------------------------------------------
// GroupElement and the twisted action.

struct GroupElement {
    std::vector<Mat> blocks;
    int twist = 0;

    Rat block_det(size_t i) const { return small_det(blocks.at(i)); }

    bool integral_unimodular() const {
        for (const auto& b : blocks) {
            for (const auto& row : b)
                for (const auto& e : row)
                    if (!is_integer(e)) return false;
            Rat d = small_det(b);
            if (d != 1 && d != -1) return false;
        }
        return true;
    }
};

inline Mat mat_identity(int n) {
    Mat m(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    size_t n = a.size(), k = b.size(), c = b[0].size();
    if (a[0].size() != k) throw ContractError("matrix shape mismatch");
    Mat r(n, std::vector<Rat>(c, Rat(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (size_t j = 0; j < c; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

inline Mat mat_transpose(const Mat& a) {
    Mat r(a[0].size(), std::vector<Rat>(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[0].size(); ++j) r[j][i] = a[i][j];
    return r;
}

inline GroupElement identity_element(Family id) {
    const auto& d = family_info(id);
    GroupElement g;
    g.twist = d.twist;
    for (int sz : d.block_sizes) g.blocks.push_back(mat_identity(sz));
    return g;
}

inline GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
    if (g1.blocks.size() != g2.blocks.size() || g1.twist != g2.twist)
        throw ContractError("group element shape mismatch");
    GroupElement out;
    out.twist = g1.twist;
    for (size_t i = 0; i < g1.blocks.size(); ++i)
        out.blocks.push_back(mat_mul(g1.blocks[i], g2.blocks[i]));
    return out;
}

namespace detail {

inline void check_shape(const GroupElement& g, const FamilyDescriptor& d) {
    if (g.blocks.size() != d.block_sizes.size())
        throw ContractError("group element block count mismatch");
    for (size_t i = 0; i < g.blocks.size(); ++i) {
        const Mat& b = g.blocks[i];
        if (static_cast<int>(b.size()) != d.block_sizes[i])
            throw ContractError("group element block size mismatch");
        for (const auto& row : b)
            if (static_cast<int>(row.size()) != d.block_sizes[i])
                throw ContractError("group element block not square");
    }
    if (g.twist != d.twist) throw ContractError("twist exponent mismatch");
    for (size_t i = 0; i < g.blocks.size(); ++i)
        if (small_det(g.blocks[i]) == 0) throw ContractError("zero determinant block");
}

// Coefficients of x((s,t)*gamma) for a binary form x of degree n, where the
// layout is coeff[i] * s^{n-i} t^i.
inline std::vector<Rat> binary_substitute(const std::vector<Rat>& coeffs, int n, const Mat& g) {
    // (s,t)*gamma = (g00 s + g10 t, g01 s + g11 t)
    const Rat &p = g[0][0], &q = g[0][1], &r = g[1][0], &w = g[1][1];
    std::vector<Rat> out(n + 1, Rat(0));
    // Expand sum_i coeffs[i] (p s + r t)^{n-i} (q s + w t)^i.
    for (int i = 0; i <= n; ++i) {
        if (coeffs[i] == 0) continue;
        // (p s + r t)^{n-i}: binomial coefficients.
        std::vector<Rat> first(n - i + 1), second(i + 1);
        for (int a = 0; a <= n - i; ++a) {
            Int binom;
            mpz_bin_uiui(binom.get_mpz_t(), n - i, a);
            first[a] = Rat(binom) * pow_rat(p, n - i - a) * pow_rat(r, a);
        }
        for (int b = 0; b <= i; ++b) {
            Int binom;
            mpz_bin_uiui(binom.get_mpz_t(), i, b);
            second[b] = Rat(binom) * pow_rat(q, i - b) * pow_rat(w, b);
        }
        for (int a = 0; a <= n - i; ++a)
            for (int b = 0; b <= i; ++b)
                out[a + b] += coeffs[i] * first[a] * second[b];
    }
    return out;
}

// Homogeneous trivariate polynomials as dense maps (i,j) -> coeff with
// k = deg - i - j, used only for the degree-3 substitution.
struct TriPoly {
    int deg;
    std::map<std::pair<int, int>, Rat> c;
};

inline TriPoly tri_mul_linear(const TriPoly& f, const Rat& u, const Rat& v, const Rat& w) {
    TriPoly out{f.deg + 1, {}};
    for (const auto& [ij, coef] : f.c) {
        auto [i, j] = ij;
        if (u != 0) out.c[{i + 1, j}] += coef * u;
        if (v != 0) out.c[{i, j + 1}] += coef * v;
        if (w != 0) out.c[{i, j}] += coef * w;
    }
    return out;
}

inline std::vector<Rat> ternary_substitute(const std::vector<Rat>& coeffs, const Mat& g) {
    // (r,s,t)*gamma: variable i maps to linear form with coefficients from
    // column j of gamma: l_j = g0j r + g1j s + g2j t.
    std::vector<Rat> out(10, Rat(0));
    const auto& expo = g3_exponents();
    for (size_t idx = 0; idx < 10; ++idx) {
        if (coeffs[idx] == 0) continue;
        TriPoly p{0, {{{0, 0}, Rat(1)}}};
        for (int rep = 0; rep < expo[idx][0]; ++rep) p = tri_mul_linear(p, g[0][0], g[1][0], g[2][0]);
        for (int rep = 0; rep < expo[idx][1]; ++rep) p = tri_mul_linear(p, g[0][1], g[1][1], g[2][1]);
        for (int rep = 0; rep < expo[idx][2]; ++rep) p = tri_mul_linear(p, g[0][2], g[1][2], g[2][2]);
        for (const auto& [ij, coef] : p.c) {
            auto [i, j] = ij;
            int k = 3 - i - j;
            for (size_t pos = 0; pos < 10; ++pos)
                if (expo[pos][0] == i && expo[pos][1] == j && expo[pos][2] == k) {
                    out[pos] += coeffs[idx] * coef;
                    break;
                }
        }
    }
    return out;
}

} // namespace detail

// Twisted action gamma . v.  Composition satisfies
// act(g1, act(g2, v)) == act(compose(g1, g2), v) exactly.
inline FormVector act(const GroupElement& gamma, const FormVector& v) {
    const auto& d = family_info(v.family);
    if (static_cast<int>(v.coeffs.size()) != d.m)
        throw ContractError("coefficient vector length mismatch");
    detail::check_shape(gamma, d);

    FormVector out{v.family, {}};
    switch (v.family) {
        case Family::W1: {
            const Rat& u = gamma.blocks[0][0][0];
            out.coeffs = {v.coeffs[0] * u * u, v.coeffs[1] * u * u * u};
            break;
        }
        case Family::F3:
        case Family::G2: {
            int n = v.family == Family::F3 ? 3 : 4;
            out.coeffs = detail::binary_substitute(v.coeffs, n, gamma.blocks[0]);
            break;
        }
        case Family::G3: {
            out.coeffs = detail::ternary_substitute(v.coeffs, gamma.blocks[0]);
            break;
        }
        case Family::F4:
        case Family::G4: {
            auto [A, B] = gram_pair(v);
            const Mat& gk = gamma.blocks[1];
            Mat gkT = mat_transpose(gk);
            Mat A1 = mat_mul(gk, mat_mul(A, gkT));
            Mat B1 = mat_mul(gk, mat_mul(B, gkT));
            const Mat& g2 = gamma.blocks[0];
            int k = gram_size(v.family);
            Mat A2(k, std::vector<Rat>(k)), B2(k, std::vector<Rat>(k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    A2[i][j] = g2[0][0] * A1[i][j] + g2[0][1] * B1[i][j];
                    B2[i][j] = g2[1][0] * A1[i][j] + g2[1][1] * B1[i][j];
                }
            out = form_from_gram(v.family, A2, B2);
            break;
        }
    }
    if (d.twist != 0) {
        Rat scale = pow_rat(gamma.block_det(0), -d.twist);
        for (auto& c : out.coeffs) c *= scale;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic random forms: lattice coordinates uniform in [-bound, bound].

inline FormVector random_form(Family id, long coeff_bound, uint64_t seed) {
    if (coeff_bound < 0) throw ContractError("coeffBound must be >= 0");
    const auto& d = family_info(id);
    SplitMix64 rng(derive_stream(seed, 0x666f726d));
    std::vector<Int> x(d.m);
    for (int i = 0; i < d.m; ++i)
        x[i] = coeff_bound == 0 ? 0 : Int(rng.symmetric(coeff_bound));
    return form_from_lattice(id, x);
}

// Componentwise canonical residues of the lattice coordinates in [0, q).
inline std::vector<Int> reduce_mod(const FormVector& v, const Int& q) {
    if (q < 2) throw ContractError("modulus must be >= 2");
    std::vector<Int> x = lattice_coords(v);
    for (auto& e : x) {
        Int r;
        mpz_mod(r.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
        e = r;
    }
    return x;
}

} // namespace sqfsieve
