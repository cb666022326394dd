#include "modlie/cochain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace modlie {

u64 triple_rank(u32 i, u32 j, u32 l) {
    auto c2 = [](u64 x) { return x * (x - 1) / 2; };
    auto c3 = [](u64 x) { return x * (x - 1) * (x - 2) / 6; };
    return c3(l) + c2(j) + i;
}

void decode_pair_rank(u64 pr, u32& i, u32& j) {
    j = static_cast<u32>((1 + std::sqrt(8.0 * static_cast<double>(pr) + 1)) / 2);
    while (static_cast<u64>(j) * (j - 1) / 2 > pr) --j;
    while (static_cast<u64>(j + 1) * j / 2 <= pr) ++j;
    i = static_cast<u32>(pr - static_cast<u64>(j) * (j - 1) / 2);
}

void decode_triple_rank(u64 tr, u32& i, u32& j, u32& l) {
    auto c3 = [](u64 x) { return x * (x - 1) * (x - 2) / 6; };
    l = 2;
    while (c3(l + 1) <= tr) ++l;
    u64 rem = tr - c3(l);
    decode_pair_rank(rem, i, j);
}

u64 cochain_id3(u32 i, u32 j, u32 l, u32 target, u32 dim) {
    return triple_rank(i, j, l) * dim + target;
}

Cochain::Cochain(AlgebraPtr L, u32 q) : L_(std::move(L)), q_(q) {
    if (q < 1 || q > 3) throw std::invalid_argument("Cochain: degree must be 1, 2 or 3");
}

void Cochain::add(u64 coord_id, u32 val) {
    val %= L_->p();
    if (!val) return;
    entries_.emplace_back(coord_id, val);
    finalized_ = false;
}

void Cochain::add1(u32 i, u32 target, u32 val) {
    if (q_ != 1) throw std::logic_error("Cochain::add1 on wrong degree");
    add(cochain_id1(i, target, L_->dim()), val);
}

void Cochain::add2(u32 i, u32 j, u32 target, u32 val) {
    if (q_ != 2) throw std::logic_error("Cochain::add2 on wrong degree");
    if (i == j) return;
    if (i < j) add(cochain_id2(i, j, target, L_->dim()), val);
    else add(cochain_id2(j, i, target, L_->dim()), (L_->p() - val % L_->p()) % L_->p());
}

void Cochain::finalize() {
    std::sort(entries_.begin(), entries_.end());
    std::vector<std::pair<u64, u32>> out;
    out.reserve(entries_.size());
    const u32 p = L_->p();
    for (std::size_t t = 0; t < entries_.size();) {
        u64 id = entries_[t].first;
        u64 acc = 0;
        while (t < entries_.size() && entries_[t].first == id) acc += entries_[t++].second;
        u32 v = static_cast<u32>(acc % p);
        if (v) out.emplace_back(id, v);
    }
    entries_.swap(out);
    finalized_ = true;
}

SparseRow Cochain::value_on(const std::vector<u32>& args) const {
    if (args.size() != q_) throw std::invalid_argument("Cochain::value_on: argument count");
    std::vector<u32> s = args;
    u32 sign = 0; // number of transpositions
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            if (s[a] == s[b]) return {};
            if (s[a] > s[b]) {
                std::swap(s[a], s[b]);
                ++sign;
            }
        }
    const u32 dim = L_->dim(), p = L_->p();
    u64 tr = q_ == 1 ? s[0] : (q_ == 2 ? LieAlgebra::pair_rank(s[0], s[1]) : triple_rank(s[0], s[1], s[2]));
    u64 lo = tr * dim, hi = lo + dim;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(lo, 0u));
    SparseRow out;
    for (; it != entries_.end() && it->first < hi; ++it) {
        u32 v = it->second;
        out.push_back({static_cast<u32>(it->first - lo), sign % 2 ? (p - v) : v});
    }
    return out;
}

Element Cochain::eval(const std::vector<Element>& args) const {
    if (args.size() != q_) throw std::invalid_argument("Cochain::eval: argument count");
    for (const auto& a : args)
        if (a.parent != L_) throw std::invalid_argument("Cochain::eval: parent mismatch");
    const u32 dim = L_->dim(), p = L_->p();
    Element out = L_->zero();
    for (const auto& [id, val] : entries_) {
        u32 target = static_cast<u32>(id % dim);
        u64 tr = id / dim;
        u32 coeff;
        if (q_ == 1) {
            coeff = args[0].coords[static_cast<u32>(tr)];
        } else if (q_ == 2) {
            // decode pair rank: largest j with j(j-1)/2 <= tr
            u32 j = static_cast<u32>((1 + std::sqrt(8.0 * static_cast<double>(tr) + 1)) / 2);
            while (LieAlgebra::pair_rank(0, j) > tr) --j;
            while (j + 1 < dim && LieAlgebra::pair_rank(0, j + 1) <= tr) ++j;
            u32 i = static_cast<u32>(tr - LieAlgebra::pair_rank(0, j));
            coeff = (args[0].coords[i] * args[1].coords[j] % p + p * p -
                     args[1].coords[i] * args[0].coords[j] % p) %
                    p;
        } else {
            u32 i, j, l;
            decode_triple_rank(tr, i, j, l);
            // 3x3 determinant of argument coordinates at rows (i,j,l)
            u32 a0 = args[0].coords[i], a1 = args[0].coords[j], a2 = args[0].coords[l];
            u32 b0 = args[1].coords[i], b1 = args[1].coords[j], b2 = args[1].coords[l];
            u32 c0 = args[2].coords[i], c1 = args[2].coords[j], c2 = args[2].coords[l];
            u64 pos = static_cast<u64>(a0) * b1 % p * c2 + static_cast<u64>(a1) * b2 % p * c0 +
                      static_cast<u64>(a2) * b0 % p * c1;
            u64 neg = static_cast<u64>(a2) * b1 % p * c0 + static_cast<u64>(a0) * b2 % p * c1 +
                      static_cast<u64>(a1) * b0 % p * c2;
            coeff = static_cast<u32>((pos % p + p - neg % p) % p);
        }
        if (coeff) out.coords[target] = (out.coords[target] + coeff * val) % p;
    }
    return out;
}

Cochain Cochain::scaled(u32 c) const {
    Cochain out(L_, q_);
    c %= L_->p();
    if (!c) return out;
    for (auto [id, v] : entries_) out.entries_.emplace_back(id, v * c % L_->p());
    return out;
}

Cochain operator+(const Cochain& a, const Cochain& b) {
    if (a.L_ != b.L_ || a.q_ != b.q_) throw std::invalid_argument("Cochain: mismatch");
    Cochain out(a.L_, a.q_);
    out.entries_ = a.entries_;
    for (auto [id, v] : b.entries_) out.entries_.emplace_back(id, v);
    out.finalize();
    return out;
}

Cochain operator-(const Cochain& a, const Cochain& b) { return a + b.scaled(a.L_->p() - 1); }

namespace {

// pair-indexed view of a 2-cochain for fast differential evaluation
struct PairView {
    const LieAlgebra& L;
    std::unordered_map<u64, SparseRow> by_pair;

    explicit PairView(const Cochain& c) : L(*c.parent()) {
        const u32 dim = L.dim();
        for (auto [id, v] : c.entries()) by_pair[id / dim].push_back({static_cast<u32>(id % dim), v});
    }
    // value of psi(e_a, e_b) for a != b, sign handled
    const SparseRow* lookup(u32 a, u32 b, bool& flip) const {
        flip = a > b;
        u64 pr = flip ? LieAlgebra::pair_rank(b, a) : LieAlgebra::pair_rank(a, b);
        auto it = by_pair.find(pr);
        return it == by_pair.end() ? nullptr : &it->second;
    }
};

Cochain differential1(const Cochain& c) {
    const auto& L = c.parent();
    const u32 dim = L->dim(), p = L->p();
    // phi as a column map i -> sparse image
    std::unordered_map<u32, SparseRow> phi;
    std::vector<u32> supp;
    for (auto [id, v] : c.entries()) {
        u32 i = static_cast<u32>(id / dim);
        if (phi.find(i) == phi.end()) supp.push_back(i);
        phi[i].push_back({static_cast<u32>(id % dim), v});
    }
    // candidate pairs
    std::vector<u64> cands;
    for (u32 i : supp)
        for (u32 b = 0; b < dim; ++b) {
            if (b == i) continue;
            cands.push_back(i < b ? LieAlgebra::pair_rank(i, b) : LieAlgebra::pair_rank(b, i));
        }
    for (u32 i : supp)
        for (auto [pr, cv] : L->producers(i)) {
            (void)cv;
            cands.push_back(pr);
        }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    Cochain out(L, 2);
    for (u64 pr : cands) {
        u32 a, b;
        decode_pair_rank(pr, a, b);
        // (d phi)(e_a, e_b) = [e_a, phi(e_b)] - [e_b, phi(e_a)] - phi([e_a, e_b])
        // with [e_a, phi(e_b)] = -[phi(e_b), e_a]
        SparseRow acc;
        auto ita = phi.find(a);
        auto itb = phi.find(b);
        if (itb != phi.end()) {
            SparseRow t = L->bracket_row_basis(itb->second, a);
            for (const auto& e : t) acc.push_back({e.col, (p - e.val) % p});
        }
        if (ita != phi.end()) {
            SparseRow t = L->bracket_row_basis(ita->second, b);
            for (const auto& e : t) acc.push_back({e.col, e.val});
        }
        for (const auto& e : L->bracket_basis(a, b)) {
            auto itt = phi.find(e.col);
            if (itt == phi.end()) continue;
            for (const auto& f : itt->second) acc.push_back({f.col, (p - e.val * f.val % p) % p});
        }
        normalize_row(acc, p);
        for (const auto& e : acc) out.add(cochain_id2(a, b, e.col, dim), e.val);
    }
    out.finalize();
    return out;
}

Cochain differential2(const Cochain& c) {
    const auto& L = c.parent();
    const u32 dim = L->dim(), p = L->p();
    PairView psi(c);

    std::vector<u64> cands; // triple ranks
    auto push_triple = [&](u32 x, u32 y, u32 z) {
        if (x == y || y == z || x == z) return;
        u32 a = x, b = y, l = z;
        if (a > b) std::swap(a, b);
        if (b > l) std::swap(b, l);
        if (a > b) std::swap(a, b);
        cands.push_back(triple_rank(a, b, l));
    };
    for (const auto& [pr, row] : psi.by_pair) {
        (void)row;
        u32 i, j;
        decode_pair_rank(pr, i, j);
        for (u32 l = 0; l < dim; ++l) push_triple(i, j, l);
        // pullback candidates: triples (x,y,i) and (x,y,j) over producers
        for (auto [ppr, cv] : L->producers(i)) {
            (void)cv;
            u32 x, y;
            decode_pair_rank(ppr, x, y);
            push_triple(x, y, j);
        }
        for (auto [ppr, cv] : L->producers(j)) {
            (void)cv;
            u32 x, y;
            decode_pair_rank(ppr, x, y);
            push_triple(x, y, i);
        }
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    Cochain out(L, 3);
    bool flip;
    for (u64 tr : cands) {
        u32 i, j, l;
        decode_triple_rank(tr, i, j, l);

        SparseRow acc;
        auto bracket_term = [&](u32 x, u32 y, u32 z, bool positive) {
            // +/- [e_x, psi(e_y, e_z)]
            const SparseRow* row = psi.lookup(y, z, flip);
            if (!row) return;
            for (const auto& e : *row) {
                if (e.col == x) continue;
                for (const auto& f : L->bracket_basis(x, e.col)) {
                    u32 v = f.val * e.val % p;
                    if (flip == positive) v = (p - v) % p;
                    acc.push_back({f.col, v});
                }
            }
        };
        auto pullback_term = [&](u32 x, u32 y, u32 z, bool positive) {
            // +/- psi([e_x, e_y], e_z)
            for (const auto& e : L->bracket_basis(x, y)) {
                if (e.col == z) continue;
                const SparseRow* row = psi.lookup(e.col, z, flip);
                if (!row) continue;
                for (const auto& f : *row) {
                    u32 v = f.val * e.val % p;
                    if (flip == positive) v = (p - v) % p;
                    acc.push_back({f.col, v});
                }
            }
        };
        bracket_term(i, j, l, true);
        bracket_term(j, i, l, false);
        bracket_term(l, i, j, true);
        pullback_term(i, j, l, false);
        pullback_term(i, l, j, true);
        pullback_term(j, l, i, false);
        normalize_row(acc, p);
        for (const auto& e : acc) out.add(cochain_id3(i, j, l, e.col, dim), e.val);
    }
    out.finalize();
    return out;
}

} // namespace

Cochain differential(const Cochain& c) {
    switch (c.degree()) {
        case 1: return differential1(c);
        case 2: return differential2(c);
        default: throw std::invalid_argument("differential: unsupported degree");
    }
}

CocycleCheck is_cocycle(const Cochain& c) {
    if (c.degree() != 2) throw std::invalid_argument("is_cocycle: degree 2 required");
    Cochain d = differential(c);
    if (d.is_zero()) return {true, 0, 0, 0};
    u64 tr = d.entries().front().first / c.parent()->dim();
    u32 i, j, l;
    decode_triple_rank(tr, i, j, l);
    return {false, i, j, l};
}

} // namespace modlie
