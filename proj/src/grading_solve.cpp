#include "modlie/grading_solve.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>

namespace modlie {

namespace {

using i128 = __int128;

i64 gcd64(i64 a, i64 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

struct Rat {
    i64 n = 0, d = 1;

    Rat() = default;
    Rat(i64 num) : n(num), d(1) {}
    Rat(i64 num, i64 den) : n(num), d(den) { normalize(); }

    void normalize() {
        if (d == 0) throw std::overflow_error("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        i64 g = gcd64(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
    }
    bool is_zero() const { return n == 0; }

    friend Rat operator+(Rat a, Rat b) {
        i128 num = static_cast<i128>(a.n) * b.d + static_cast<i128>(b.n) * a.d;
        i128 den = static_cast<i128>(a.d) * b.d;
        i128 g = den; // reduce via gcd on 64-bit chunks after clamping
        (void)g;
        Rat r;
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Rat: overflow");
        r.n = static_cast<i64>(num);
        r.d = static_cast<i64>(den);
        r.normalize();
        return r;
    }
    friend Rat operator-(Rat a, Rat b) { return a + Rat(-b.n, b.d); }
    friend Rat operator*(Rat a, Rat b) {
        i128 num = static_cast<i128>(a.n) * b.n;
        i128 den = static_cast<i128>(a.d) * b.d;
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("Rat: overflow");
        return Rat(static_cast<i64>(num), static_cast<i64>(den));
    }
    friend Rat operator/(Rat a, Rat b) {
        if (b.n == 0) throw std::domain_error("Rat: division by zero");
        return a * Rat(b.d, b.n);
    }
    friend bool operator==(Rat a, Rat b) { return a.n == b.n && a.d == b.d; }
};

// sparse linear form over symbol ids, sorted
using LinForm = std::vector<std::pair<u32, Rat>>;

void form_add(LinForm& a, const LinForm& b, Rat scale) {
    LinForm out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            Rat v = b[j].second * scale;
            if (!v.is_zero()) out.emplace_back(b[j].first, v);
            ++j;
        } else {
            Rat v = a[i].second + b[j].second * scale;
            if (!v.is_zero()) out.emplace_back(a[i].first, v);
            ++i;
            ++j;
        }
    }
    a.swap(out);
}

// substitute symbol s := repl into form
void form_subst(LinForm& f, u32 s, const LinForm& repl) {
    auto it = std::find_if(f.begin(), f.end(), [&](const auto& e) { return e.first == s; });
    if (it == f.end()) return;
    Rat c = it->second;
    f.erase(it);
    form_add(f, repl, c);
}

struct DSU {
    std::vector<u32> parent;
    explicit DSU(u32 n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    u32 find(u32 x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(u32 a, u32 b) { parent[find(a)] = find(b); }
};

std::vector<int> primitive_int(const std::vector<Rat>& v) {
    i64 lcm = 1;
    for (const auto& r : v) {
        i64 g = gcd64(lcm, r.d);
        i128 l = static_cast<i128>(lcm) / g * r.d;
        if (l > INT64_MAX) throw std::overflow_error("grading_solve: lcm overflow");
        lcm = static_cast<i64>(l);
    }
    std::vector<i64> w(v.size());
    i64 content = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        i128 x = static_cast<i128>(v[i].n) * (lcm / v[i].d);
        if (x > INT64_MAX || x < INT64_MIN) throw std::overflow_error("grading_solve: overflow");
        w[i] = static_cast<i64>(x);
        content = gcd64(content, w[i]);
    }
    std::vector<int> out(v.size(), 0);
    if (content == 0) return out;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<int>(w[i] / content);
    return out;
}

// solve G x = b over Q (G symmetric PSD Gram matrix, system consistent);
// returns any solution
std::vector<Rat> solve_rational(std::vector<std::vector<Rat>> G, std::vector<Rat> b) {
    const std::size_t k = b.size();
    std::vector<long> pivot_col_of_row(k, -1);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < k && rank < k; ++c) {
        std::size_t piv = k;
        for (std::size_t r = rank; r < k; ++r)
            if (!G[r][c].is_zero()) {
                piv = r;
                break;
            }
        if (piv == k) continue;
        std::swap(G[rank], G[piv]);
        std::swap(b[rank], b[piv]);
        Rat inv = Rat(1) / G[rank][c];
        for (std::size_t cc = 0; cc < k; ++cc) G[rank][cc] = G[rank][cc] * inv;
        b[rank] = b[rank] * inv;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == rank || G[r][c].is_zero()) continue;
            Rat f = G[r][c];
            for (std::size_t cc = 0; cc < k; ++cc) G[r][cc] = G[r][cc] - f * G[rank][cc];
            b[r] = b[r] - f * b[rank];
        }
        pivot_col_of_row[rank] = static_cast<long>(c);
        ++rank;
    }
    std::vector<Rat> x(k, Rat(0));
    for (std::size_t r = 0; r < rank; ++r) x[static_cast<std::size_t>(pivot_col_of_row[r])] = b[r];
    return x;
}

} // namespace

GradingSolveResult grading_solve(const LieAlgebra& L) {
    const u32 dim = L.dim();
    struct Triple {
        u32 i, j, k;
    };
    std::vector<Triple> cons;
    DSU dsu(dim);
    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            u64 pr = LieAlgebra::pair_rank(i, j);
            for (const SparseEntry* e = L.pair_begin(pr); e != L.pair_end(pr); ++e) {
                cons.push_back({i, j, e->col});
                dsu.unite(i, j);
                dsu.unite(i, e->col);
            }
        }

    GradingSolveResult res;
    res.weights.assign(dim, 0);
    if (cons.empty()) {
        // no constraints at all (abelian): the zero grading, normalized
        res.found = true;
        return res;
    }

    std::vector<std::vector<u32>> adj(dim);
    for (u32 c = 0; c < cons.size(); ++c) {
        adj[cons[c].i].push_back(c);
        adj[cons[c].j].push_back(c);
        adj[cons[c].k].push_back(c);
    }

    std::vector<std::optional<LinForm>> form(dim);
    std::vector<u8> done(cons.size(), 0);
    std::vector<u8> constrained(dim, 0);
    for (const auto& t : cons) constrained[t.i] = constrained[t.j] = constrained[t.k] = 1;

    std::queue<u32> queue;
    std::vector<u8> queued(cons.size(), 0);
    auto wake_node = [&](u32 node) {
        for (u32 c : adj[node])
            if (!done[c] && !queued[c]) {
                queued[c] = 1;
                queue.push(c);
            }
    };

    u32 next_symbol = 0;
    std::vector<u32> alive_symbols;
    auto seed = [&](u32 node) {
        u32 s = next_symbol++;
        if (next_symbol > 64) throw std::runtime_error("grading_solve: symbol budget exceeded");
        form[node] = LinForm{{s, Rat(1)}};
        alive_symbols.push_back(s);
        wake_node(node);
    };

    auto eliminate = [&](const LinForm& relation) {
        // relation = 0; solve for the largest symbol
        auto [s, coeff] = relation.back();
        LinForm repl;
        for (std::size_t t = 0; t + 1 < relation.size(); ++t) {
            Rat v = Rat(0) - relation[t].second / coeff;
            repl.emplace_back(relation[t].first, v);
        }
        for (u32 nd = 0; nd < dim; ++nd)
            if (form[nd]) form_subst(*form[nd], s, repl);
        alive_symbols.erase(std::remove(alive_symbols.begin(), alive_symbols.end(), s), alive_symbols.end());
    };

    u32 seed_cursor = 0;
    while (true) {
        if (queue.empty()) {
            while (seed_cursor < dim && (!constrained[seed_cursor] || form[seed_cursor])) ++seed_cursor;
            if (seed_cursor == dim) break;
            seed(seed_cursor);
            continue;
        }
        u32 ci = queue.front();
        queue.pop();
        queued[ci] = 0;
        if (done[ci]) continue;
        const Triple& t = cons[ci];
        // net coefficient per distinct node of w_i + w_j - w_k
        std::vector<std::pair<u32, int>> terms;
        auto addc = [&](u32 node, int c) {
            for (auto& e : terms)
                if (e.first == node) {
                    e.second += c;
                    return;
                }
            terms.emplace_back(node, c);
        };
        addc(t.i, 1);
        addc(t.j, 1);
        addc(t.k, -1);
        u32 unknowns = 0;
        u32 unknown_node = 0;
        int unknown_coeff = 0;
        for (auto [node, c] : terms) {
            if (c == 0) continue;
            if (!form[node]) {
                ++unknowns;
                unknown_node = node;
                unknown_coeff = c;
            }
        }
        if (unknowns >= 2) continue; // parked; woken again when a node resolves
        if (unknowns == 1) {
            LinForm acc;
            for (auto [node, c] : terms) {
                if (c == 0 || node == unknown_node) continue;
                form_add(acc, *form[node], Rat(c));
            }
            LinForm derived;
            for (auto& e : acc) derived.emplace_back(e.first, Rat(0) - e.second / Rat(unknown_coeff));
            form[unknown_node] = std::move(derived);
            done[ci] = 1;
            wake_node(unknown_node);
            continue;
        }
        // all known: relation check
        LinForm acc;
        for (auto [node, c] : terms) {
            if (c == 0) continue;
            form_add(acc, *form[node], Rat(c));
        }
        done[ci] = 1;
        if (!acc.empty()) {
            eliminate(acc);
            // substitutions may invalidate nothing structurally; constraints
            // already marked done stay satisfied
        }
    }

    // final exactness audit of the symbolic solution
    for (const auto& t : cons) {
        LinForm acc;
        form_add(acc, *form[t.i], Rat(1));
        form_add(acc, *form[t.j], Rat(1));
        form_add(acc, *form[t.k], Rat(-1));
        if (!acc.empty()) throw std::logic_error("grading_solve: propagation left an unsatisfied constraint");
    }

    // space basis: one rational vector per surviving symbol
    std::sort(alive_symbols.begin(), alive_symbols.end());
    std::vector<std::vector<Rat>> vecs;
    for (u32 s : alive_symbols) {
        std::vector<Rat> v(dim, Rat(0));
        bool nonzero = false;
        for (u32 nd = 0; nd < dim; ++nd) {
            if (!form[nd]) continue;
            for (auto& e : *form[nd])
                if (e.first == s) {
                    v[nd] = e.second;
                    if (!e.second.is_zero()) nonzero = true;
                }
        }
        if (nonzero) vecs.push_back(std::move(v));
    }
    for (const auto& v : vecs) {
        auto iv = primitive_int(v);
        bool first_sign_fix = false;
        for (auto& x : iv) {
            if (!first_sign_fix && x != 0) {
                if (x < 0)
                    for (auto& y : iv) y = -y;
                first_sign_fix = true;
            }
        }
        res.space_basis.push_back(std::move(iv));
    }

    // canonical weights per component
    std::vector<u32> comp_of(dim);
    for (u32 nd = 0; nd < dim; ++nd) comp_of[nd] = dsu.find(nd);
    std::vector<u32> comp_ids;
    for (u32 nd = 0; nd < dim; ++nd)
        if (constrained[nd] && comp_of[nd] == nd) comp_ids.push_back(nd);

    res.found = true;
    for (u32 comp : comp_ids) {
        std::vector<u32> nodes;
        for (u32 nd = 0; nd < dim; ++nd)
            if (constrained[nd] && comp_of[nd] == comp) nodes.push_back(nd);
        // symbols active on this component
        std::vector<u32> syms;
        for (std::size_t sI = 0; sI < res.space_basis.size(); ++sI) {
            for (u32 nd : nodes)
                if (res.space_basis[sI][nd] != 0) {
                    syms.push_back(static_cast<u32>(sI));
                    break;
                }
        }
        if (syms.empty()) {
            // constrained component with only the zero grading
            res.found = false;
            continue;
        }
        const std::size_t k = syms.size();
        std::vector<std::vector<Rat>> G(k, std::vector<Rat>(k, Rat(0)));
        std::vector<Rat> bvec(k, Rat(0));
        for (std::size_t a = 0; a < k; ++a) {
            const auto& va = res.space_basis[syms[a]];
            i64 dot1 = 0;
            for (u32 nd : nodes) dot1 += va[nd];
            bvec[a] = Rat(dot1);
            for (std::size_t c = a; c < k; ++c) {
                const auto& vc = res.space_basis[syms[c]];
                i64 dot = 0;
                for (u32 nd : nodes) dot += static_cast<i64>(va[nd]) * vc[nd];
                G[a][c] = Rat(dot);
                G[c][a] = Rat(dot);
            }
        }
        auto lambda = solve_rational(G, bvec);
        std::vector<Rat> w(dim, Rat(0));
        bool nonzero = false;
        for (std::size_t a = 0; a < k; ++a) {
            if (lambda[a].is_zero()) continue;
            const auto& va = res.space_basis[syms[a]];
            for (u32 nd : nodes) {
                w[nd] = w[nd] + lambda[a] * Rat(va[nd]);
                if (!w[nd].is_zero()) nonzero = true;
            }
        }
        std::vector<int> wi;
        if (!nonzero) {
            // all-ones is orthogonal to the space; fall back to the first basis vector
            wi.assign(dim, 0);
            const auto& v0 = res.space_basis[syms[0]];
            for (u32 nd : nodes) wi[nd] = v0[nd];
        } else {
            wi = primitive_int(w);
        }
        // sign: make the most negative weight as shallow as possible
        int mn = 0, mx = 0;
        for (u32 nd : nodes) {
            mn = std::min(mn, wi[nd]);
            mx = std::max(mx, wi[nd]);
        }
        bool flip = false;
        if (-mx > mn) {
            // negation has shallower minimum? compare |min| of both signs
        }
        int min_pos = mn, min_neg = -mx;
        if (std::abs(min_neg) < std::abs(min_pos)) flip = true;
        else if (std::abs(min_neg) == std::abs(min_pos)) {
            i64 s = 0;
            for (u32 nd : nodes) s += wi[nd];
            if (s < 0) flip = true;
        }
        if (flip)
            for (u32 nd : nodes) res.weights[nd] = -wi[nd];
        else
            for (u32 nd : nodes) res.weights[nd] = wi[nd];
    }

    if (res.found && !is_valid_grading(L, res.weights))
        throw std::logic_error("grading_solve: canonical weights fail the homogeneity scan");
    return res;
}

} // namespace modlie
