#include "modlie/pmap.hpp"

#include <random>
#include <stdexcept>

namespace modlie {

namespace {

// rows of the system ad(y) = T: one equation per matrix slot (r,c),
// unknowns y_k with coefficient (ad e_k)_{r,c}
std::vector<SparseRow> ad_system_rows(const LieAlgebra& L) {
    const u32 n = L.dim();
    std::vector<SparseRow> rows(static_cast<std::size_t>(n) * n);
    for (u32 k = 0; k < n; ++k)
        for (u32 c = 0; c < n; ++c) {
            if (k == c) continue;
            for (const auto& e : L.bracket_basis(k, c)) rows[static_cast<std::size_t>(e.col) * n + c].push_back({k, e.val});
        }
    return rows;
}

DenseMatrix ad_power_p(const Element& x) {
    DenseMatrix m = ad_matrix(x);
    return mat_pow(m, x.parent->p());
}

} // namespace

std::optional<Element> p_map_solve(const Element& x) {
    const auto& L = x.parent;
    const u32 n = L->dim(), p = L->p();
    DenseMatrix target = ad_power_p(x);
    auto rows = ad_system_rows(*L);
    StreamEchelon ech(n + 1, p, 1);
    for (u32 r = 0; r < n; ++r)
        for (u32 c = 0; c < n; ++c) {
            SparseRow row = rows[static_cast<std::size_t>(r) * n + c];
            u32 t = target.at(r, c);
            if (row.empty() && t == 0) continue;
            if (t) row.push_back({n, t});
            ech.insert(row);
        }
    if (!ech.inconsistency_rows().empty()) return std::nullopt;
    Element y{L, ech.solve(0)};
    if (!(ad_matrix(y) == target)) return std::nullopt; // exact verification
    return y;
}

std::optional<std::vector<SparseRow>> solve_p_map_all(const AlgebraPtr& L) {
    const u32 n = L->dim(), p = L->p();
    auto rows = ad_system_rows(*L);
    std::vector<DenseMatrix> targets;
    targets.reserve(n);
    for (u32 b = 0; b < n; ++b) targets.push_back(ad_power_p(L->basis_element(b)));

    StreamEchelon ech(n + n, p, n);
    for (u32 r = 0; r < n; ++r)
        for (u32 c = 0; c < n; ++c) {
            SparseRow row = rows[static_cast<std::size_t>(r) * n + c];
            for (u32 b = 0; b < n; ++b) {
                u32 t = targets[b].at(r, c);
                if (t) row.push_back({n + b, t});
            }
            if (!row.empty()) ech.insert(row);
        }
    for (const auto& bad : ech.inconsistency_rows())
        if (!bad.empty()) return std::nullopt;
    std::vector<SparseRow> images(n);
    for (u32 b = 0; b < n; ++b) {
        auto y = ech.solve(b);
        Element ye{L, y};
        if (!(ad_matrix(ye) == targets[b])) return std::nullopt;
        SparseRow img;
        for (u32 k = 0; k < n; ++k)
            if (y[k]) img.push_back({k, y[k]});
        images[b] = std::move(img);
    }
    return images;
}

Element p_power(const Element& x) {
    const auto& L = x.parent;
    if (!L->has_p_map()) throw std::logic_error("p_power: algebra has no p-map");
    const u32 p = L->p();
    Element acc = L->zero();   // running sum S_t of processed terms
    Element power = L->zero(); // S_t^{[p]}
    bool first = true;
    for (u32 k = 0; k < L->dim(); ++k) {
        if (!x.coords[k]) continue;
        Element term = scale(L->basis_element(k), x.coords[k]);
        Element term_power = scale(L->element_from_row(L->p_map()[k]), pow_mod(x.coords[k], p, p));
        if (first) {
            acc = term;
            power = term_power;
            first = false;
            continue;
        }
        Element next = add(power, term_power);
        for (u32 i = 1; i < p; ++i) next = add(next, s_i_wordsum(i, acc, term));
        acc = add(acc, term);
        power = next;
    }
    return power;
}

Element s_i_wordsum(u32 i, const Element& x0, const Element& x1) {
    const auto& L = x0.parent;
    const u32 p = L->p();
    if (i < 1 || i >= p) throw std::out_of_range("s_i_wordsum: i must be in [1, p-1]");
    Element total = L->zero();
    const u32 slots = p - 1;
    for (u32 mask = 0; mask < (1u << slots); ++mask) {
        if (static_cast<u32>(__builtin_popcount(mask)) != slots - i) continue; // i zeros
        // word acts rightmost-first on x1
        Element v = x1;
        for (u32 t = slots; t-- > 0;) {
            const Element& arg = (mask >> t) & 1 ? x1 : x0;
            v = bracket(arg, v);
        }
        total = add(total, v);
    }
    return scale(total, (p - inv_mod(i, p)) % p); // factor -1/i
}

Element s_i_coefficient(u32 i, const Element& x0, const Element& x1) {
    const auto& L = x0.parent;
    const u32 p = L->p();
    if (i < 1 || i >= p) throw std::out_of_range("s_i_coefficient: i must be in [1, p-1]");
    // f(t) = ad(t x0 + x1)^{p-1}(x0) has degree <= p-1 in t; evaluate at all
    // residues and interpolate (Vandermonde on p points is invertible).
    std::vector<Element> values;
    values.reserve(p);
    for (u32 t = 0; t < p; ++t) {
        Element z = add(scale(x0, t), x1);
        Element v = x0;
        for (u32 it = 0; it + 1 < p; ++it) v = bracket(z, v);
        values.push_back(v);
    }
    // Lagrange coefficient extraction for t^{i-1}
    Element coeff = L->zero();
    for (u32 t = 0; t < p; ++t) {
        // ell_t(T) = prod_{s != t} (T - s)/(t - s); take its T^{i-1} coefficient
        std::vector<u32> poly{1}; // product of (T - s)
        u32 denom = 1;
        for (u32 s = 0; s < p; ++s) {
            if (s == t) continue;
            std::vector<u32> next(poly.size() + 1, 0);
            for (std::size_t d = 0; d < poly.size(); ++d) {
                next[d + 1] = (next[d + 1] + poly[d]) % p;
                next[d] = (next[d] + poly[d] * ((p - s) % p)) % p;
            }
            poly.swap(next);
            denom = denom * ((t + p - s) % p) % p;
        }
        u32 c = poly[i - 1] * inv_mod(denom, p) % p;
        coeff = add(coeff, scale(values[t], c));
    }
    return scale(coeff, inv_mod(i, p)); // i * s_i = coefficient
}

PAxiomReport verify_p_axioms(const AlgebraPtr& L, u32 samples, u64 seed) {
    PAxiomReport rep;
    if (!L->has_p_map()) throw std::logic_error("verify_p_axioms: algebra has no p-map");
    const u32 p = L->p(), n = L->dim();

    for (u32 b = 0; b < n && rep.axiom1; ++b) {
        Element eb = L->basis_element(b);
        DenseMatrix lhs = ad_matrix(L->element_from_row(L->p_map()[b]));
        DenseMatrix rhs = mat_pow(ad_matrix(eb), p);
        if (!(lhs == rhs)) {
            rep.axiom1 = false;
            rep.witness = "axiom 1 fails on basis vector " + L->basis_labels()[b];
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<u32> dv(0, p - 1);
    auto random_element = [&] {
        Element e = L->zero();
        for (u32 k = 0; k < n; ++k) e.coords[k] = dv(rng);
        return e;
    };

    for (u32 s = 0; s < samples && rep.axiom2; ++s) {
        u32 a = dv(rng);
        Element x = random_element();
        Element lhs = p_power(scale(x, a));
        Element rhs = scale(p_power(x), pow_mod(a, p, p));
        if (!(lhs == rhs)) {
            rep.axiom2 = false;
            rep.witness = "axiom 2 fails at sample " + std::to_string(s);
        }
    }

    for (u32 s = 0; s < samples && rep.axiom3; ++s) {
        Element x = random_element(), y = random_element();
        Element lhs = p_power(add(x, y));
        Element rhs = add(p_power(x), p_power(y));
        for (u32 i = 1; i < p; ++i) rhs = add(rhs, s_i_wordsum(i, x, y));
        if (!(lhs == rhs)) {
            rep.axiom3 = false;
            rep.witness = "axiom 3 fails at sample " + std::to_string(s);
        }
    }

    const u32 cross = std::min(samples, 25u);
    for (u32 s = 0; s < cross && rep.si_crosscheck; ++s) {
        Element x = random_element(), y = random_element();
        for (u32 i = 1; i < p && rep.si_crosscheck; ++i) {
            if (!(s_i_wordsum(i, x, y) == s_i_coefficient(i, x, y))) {
                rep.si_crosscheck = false;
                rep.witness = "s_i cross-check fails at sample " + std::to_string(s) + ", i=" + std::to_string(i);
            }
        }
    }
    return rep;
}

} // namespace modlie
