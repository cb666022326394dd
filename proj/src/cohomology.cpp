#include "modlie/cohomology.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "modlie/grading_solve.hpp"

namespace modlie {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// -- refinement gradings -------------------------------------------------------

// Independent integer gradings usable for block refinement; the attached
// Z-grading comes first. Independence is certified modulo a large prime,
// which can only under-report (harmless: refinement stays valid).
std::vector<std::vector<int>> refinement_gradings(const LieAlgebra& L, u32 max_count) {
    std::vector<std::vector<int>> out;
    if (!L.has_grading()) return out;
    out.push_back(L.grading());
    if (L.table_nnz() > 2000000) return out;
    GradingSolveResult gs;
    try {
        gs = grading_solve(L);
    } catch (const std::exception&) {
        return out;
    }
    const u32 q = 1000003;
    auto to_row = [&](const std::vector<int>& w) {
        SparseRow r;
        for (u32 i = 0; i < w.size(); ++i) {
            long v = w[i] % static_cast<long>(q);
            if (v < 0) v += q;
            if (v) r.push_back({i, static_cast<u32>(v)});
        }
        return r;
    };
    StreamEchelon indep(L.dim(), q);
    indep.insert(to_row(out[0]));
    for (const auto& g : gs.space_basis) {
        if (out.size() >= max_count) break;
        if (!is_valid_grading(L, g)) continue;
        if (indep.insert(to_row(g)) >= 0) out.push_back(g);
    }
    return out;
}

// -- packed weight keys ----------------------------------------------------------
//
// Up to four gradings are packed into 16-bit lanes of a u64. The coordinate
// key of (args -> target) encodes u_t = w_t(target) - sum w_t(args) as
// lane value u_t + 6144, so keys of matching blocks in C^{q-1}, C^q, C^{q+1}
// compare equal and the q=3 key is two u64 additions per row.
struct KeySpace {
    u32 g = 0;
    std::vector<u64> P;    // per basis index: sum_t (w_t + 1024) << 16t
    std::vector<int> z;    // attached Z-grading (lane 0), empty in dense mode
    u64 c0 = 0, c1 = 0, c2 = 0, c3 = 0;

    void build(const std::vector<std::vector<int>>& gradings, u32 dim) {
        g = static_cast<u32>(std::min<std::size_t>(gradings.size(), 4));
        P.assign(dim, 0);
        for (u32 t = 0; t < g; ++t)
            for (u32 b = 0; b < dim; ++b) {
                int w = gradings[t][b];
                if (w < -1000 || w > 1000) throw std::runtime_error("cohomology: grading weight out of range");
                P[b] += static_cast<u64>(w + 1024) << (16 * t);
            }
        for (u32 t = 0; t < g; ++t) {
            c0 += static_cast<u64>(6144 - 1024) << (16 * t);
            c1 += static_cast<u64>(6144 - 1024 + 1 * 1024) << (16 * t);
            c2 += static_cast<u64>(6144 - 1024 + 2 * 1024) << (16 * t);
            c3 += static_cast<u64>(6144 - 1024 + 3 * 1024) << (16 * t);
        }
        if (g) z = gradings[0];
    }
    int zweight(u64 key) const { return g ? static_cast<int>(key & 0xFFFF) - 6144 : 0; }
    u64 key0(u32 target) const { return P[target] + c0; }
    u64 key1(u32 target, u32 i) const { return P[target] + c1 - P[i]; }
    u64 key2(u32 target, u32 i, u32 j) const { return P[target] + c2 - P[i] - P[j]; }
};

// -- sparse row generators (global coordinate ids) -------------------------------

using IdRow = std::vector<std::pair<u64, u32>>;

void combine_idrow(IdRow& row, u32 p) {
    std::sort(row.begin(), row.end());
    IdRow out;
    out.reserve(row.size());
    for (std::size_t t = 0; t < row.size();) {
        u64 id = row[t].first;
        u64 acc = 0;
        while (t < row.size() && row[t].first == id) acc += row[t++].second;
        u32 v = static_cast<u32>(acc % p);
        if (v) out.emplace_back(id, v);
    }
    row.swap(out);
}

// image of the 1-cochain basis coordinate (i -> t) under d1, over C^2 ids
void d1_image_row(const LieAlgebra& L, u32 i, u32 t, IdRow& out) {
    const u32 dim = L.dim(), p = L.p();
    out.clear();
    for (u32 a = 0; a < dim; ++a) {
        if (a == i) continue;
        for (const auto& e : L.bracket_basis(a, t)) {
            if (a < i) out.emplace_back(cochain_id2(a, i, e.col, dim), e.val);
            else out.emplace_back(cochain_id2(i, a, e.col, dim), (p - e.val) % p);
        }
    }
    for (const auto& [pr, c] : L.producers(i)) out.emplace_back(pr * dim + t, (p - c) % p);
    combine_idrow(out, p);
}

// image of the 0-cochain basis coordinate (target k) under d0, over C^1 ids
void d0_image_row(const LieAlgebra& L, u32 k, IdRow& out) {
    const u32 dim = L.dim();
    out.clear();
    for (u32 i = 0; i < dim; ++i) {
        if (i == k) continue;
        for (const auto& e : L.bracket_basis(i, k)) out.emplace_back(cochain_id1(i, e.col, dim), e.val);
    }
    combine_idrow(out, L.p());
}

// row of d1 as a matrix: the C^2 coordinate ((a,b),k) as a functional on C^1
void d1_equation_row(const LieAlgebra& L, u32 a, u32 b, u32 k, IdRow& out) {
    const u32 dim = L.dim(), p = L.p();
    out.clear();
    for (const auto& e : L.ad_transpose(a, k)) out.emplace_back(cochain_id1(b, e.col, dim), e.val);
    for (const auto& e : L.ad_transpose(b, k)) out.emplace_back(cochain_id1(a, e.col, dim), (p - e.val) % p);
    for (const auto& e : L.bracket_basis(a, b)) out.emplace_back(cochain_id1(e.col, k, dim), (p - e.val) % p);
    combine_idrow(out, p);
}

// row of d2 as a matrix: the C^3 coordinate ((i,j,l),k) as a functional on C^2
void d2_row(const LieAlgebra& L, u32 i, u32 j, u32 l, u32 k, IdRow& out) {
    const u32 dim = L.dim(), p = L.p();
    out.clear();
    for (const auto& e : L.ad_transpose(i, k)) out.emplace_back(cochain_id2(j, l, e.col, dim), e.val);
    for (const auto& e : L.ad_transpose(j, k)) out.emplace_back(cochain_id2(i, l, e.col, dim), (p - e.val) % p);
    for (const auto& e : L.ad_transpose(l, k)) out.emplace_back(cochain_id2(i, j, e.col, dim), e.val);
    auto pull = [&](u32 x, u32 y, u32 zarg, bool positive) {
        for (const auto& e : L.bracket_basis(x, y)) {
            if (e.col == zarg) continue;
            bool flip = e.col > zarg;
            u64 id = flip ? cochain_id2(zarg, e.col, k, dim) : cochain_id2(e.col, zarg, k, dim);
            u32 v = e.val;
            if (flip == positive) v = (p - v) % p;
            out.emplace_back(id, v);
        }
    };
    pull(i, j, l, false);
    pull(i, l, j, true);
    pull(j, l, i, false);
    combine_idrow(out, p);
}

// -- block elimination state -----------------------------------------------------

struct JointState {
    u64 key = 0;
    u32 ncols = 0;
    std::vector<u64> col_global; // ascending global C^q coordinate ids
    std::unique_ptr<StreamEchelon> high;
    u32 rank_low = 0;
    u32 bound = 0;
    enum class Mode { Insert, Verify, Done } mode = Mode::Insert;
    u32 stall = 0, stall_limit = 256;
    std::vector<u8> K; // kernel, layout K[col * knum + t]
    u32 knum = 0;

    u32 local_col(u64 gid) const {
        auto it = std::lower_bound(col_global.begin(), col_global.end(), gid);
        if (it == col_global.end() || *it != gid)
            throw std::logic_error("cohomology: coordinate outside its weight block");
        return static_cast<u32>(it - col_global.begin());
    }

    void extract_kernel() {
        auto kv = high->kernel();
        knum = static_cast<u32>(kv.size());
        K.assign(static_cast<std::size_t>(ncols) * knum, 0);
        for (u32 t = 0; t < knum; ++t)
            for (u32 c = 0; c < ncols; ++c) K[static_cast<std::size_t>(c) * knum + t] = kv[t][c];
    }

    // feed one d_q row (local columns); returns after updating the mode
    void feed(const SparseRow& row, u32 p, u32 verify_cap) {
        if (mode == Mode::Done) return;
        if (mode == Mode::Verify) {
            // exact membership test: row must annihilate the kernel
            static thread_local std::vector<u32> acc;
            acc.assign(knum, 0);
            for (const auto& e : row) {
                const u8* kr = &K[static_cast<std::size_t>(e.col) * knum];
                for (u32 t = 0; t < knum; ++t) acc[t] += e.val * kr[t];
            }
            bool ortho = true;
            for (u32 t = 0; t < knum; ++t)
                if (acc[t] % p) {
                    ortho = false;
                    break;
                }
            if (ortho) return;
            long piv = high->insert(row);
            (void)piv;
            if (high->rank() >= bound) mode = Mode::Done;
            else extract_kernel();
            return;
        }
        long piv = high->insert(row);
        if (piv >= 0) stall = 0;
        else ++stall;
        if (high->rank() >= bound) {
            mode = Mode::Done;
            return;
        }
        if (stall > stall_limit && ncols - high->rank() <= verify_cap) {
            extract_kernel();
            mode = Mode::Verify;
        }
    }
};

struct ZBlockResult {
    BlockReport report;
    std::vector<std::pair<u64, SparseRow>> reps; // (block key, rep over global ids packed in col list)
    std::vector<std::vector<u64>> rep_cols;      // matching col_global per rep? stored per rep
};

// full machinery for one algebra
struct Engine {
    const AlgebraPtr& L;
    const CohomOptions& opts;
    KeySpace keys;
    u32 dim, p;
    int zmin = 0, zmax = 0;
    std::vector<std::vector<u32>> targets_by_z;                         // per z offset
    std::vector<std::vector<std::pair<u64, std::vector<u32>>>> groups;  // per z offset: (P value, targets)
    std::vector<u64> low_count, mid_count, high_count;                  // per block-weight offset
    int bw_min = 0, bw_max = 0;                                         // coordinate weight range

    Engine(const AlgebraPtr& alg, const CohomOptions& o) : L(alg), opts(o) {
        dim = L->dim();
        p = L->p();
        std::vector<std::vector<int>> gr;
        if (opts.mode == CohomMode::Graded) {
            if (!L->has_grading()) throw std::invalid_argument("h_dim: graded mode on an ungraded algebra");
            gr = refinement_gradings(*L, 4);
        }
        keys.build(gr, dim);
        if (keys.g) {
            zmin = *std::min_element(keys.z.begin(), keys.z.end());
            zmax = *std::max_element(keys.z.begin(), keys.z.end());
        }
        targets_by_z.assign(zmax - zmin + 1, {});
        for (u32 k = 0; k < dim; ++k) targets_by_z[zw(k) - zmin].push_back(k);
        groups.assign(zmax - zmin + 1, {});
        for (int v = zmin; v <= zmax; ++v) {
            std::unordered_map<u64, std::vector<u32>> m;
            for (u32 k : targets_by_z[v - zmin]) m[keys.P[k]].push_back(k);
            std::vector<std::pair<u64, std::vector<u32>>> list(m.begin(), m.end());
            std::sort(list.begin(), list.end());
            groups[v - zmin] = std::move(list);
        }
        count_dims();
    }

    int zw(u32 b) const { return keys.g ? keys.z[b] : 0; }

    // counts of C^{q-1}, C^q, C^{q+1} coordinates per coordinate weight
    void count_dims() {
        const u32 q = opts.q;
        bw_min = 0;
        bw_max = 0;
        if (keys.g) {
            for (u32 m = q - 1; m <= q + 1; ++m) {
                bw_min = std::min(bw_min, zmin - static_cast<int>(m) * zmax);
                bw_max = std::max(bw_max, zmax - static_cast<int>(m) * zmin);
            }
        }
        const std::size_t nb = static_cast<std::size_t>(bw_max - bw_min + 1);
        low_count.assign(nb, 0);
        mid_count.assign(nb, 0);
        high_count.assign(nb, 0);
        std::vector<u64> zcount(zmax - zmin + 1, 0);
        for (u32 k = 0; k < dim; ++k) ++zcount[zw(k) - zmin];
        auto bump = [&](std::vector<u64>& bins, int args_z, u64 mult) {
            for (int v = zmin; v <= zmax; ++v) {
                u64 c = zcount[v - zmin];
                if (c) bins[v - args_z - bw_min] += mult * c;
            }
        };
        const u32 q_ = opts.q;
        if (q_ == 1) {
            for (u32 k = 0; k < dim; ++k) ++low_count[zw(k) - bw_min]; // C^0: weight = z(target)
            for (u32 i = 0; i < dim; ++i) bump(mid_count, zw(i), 1);
            for (u32 i = 0; i < dim; ++i)
                for (u32 j = i + 1; j < dim; ++j) bump(high_count, zw(i) + zw(j), 1);
        } else {
            for (u32 i = 0; i < dim; ++i) bump(low_count, zw(i), 1);
            for (u32 i = 0; i < dim; ++i)
                for (u32 j = i + 1; j < dim; ++j) bump(mid_count, zw(i) + zw(j), 1);
            for (u32 i = 0; i < dim; ++i)
                for (u32 j = i + 1; j < dim; ++j)
                    for (u32 l = j + 1; l < dim; ++l) bump(high_count, zw(i) + zw(j) + zw(l), 1);
        }
    }

    // enumerate C^q coordinates of Z-weight w: cb(key, global id)
    template <typename F>
    void scan_mid(int w, F&& cb) const {
        const u32 q = opts.q;
        if (q == 1) {
            for (u32 i = 0; i < dim; ++i) {
                int need = w + zw(i);
                if (need < zmin || need > zmax) continue;
                for (u32 k : targets_by_z[need - zmin]) cb(keys.key1(k, i), cochain_id1(i, k, dim));
            }
        } else {
            for (u32 i = 0; i < dim; ++i)
                for (u32 j = i + 1; j < dim; ++j) {
                    int need = w + zw(i) + zw(j);
                    if (need < zmin || need > zmax) continue;
                    u64 base = LieAlgebra::pair_rank(i, j) * dim;
                    for (u32 k : targets_by_z[need - zmin]) cb(keys.key2(k, i, j), base + k);
                }
        }
    }

    // enumerate C^{q-1} coordinates of Z-weight w
    template <typename F>
    void scan_low(int w, F&& cb) const {
        if (opts.q == 1) {
            if (w < zmin || w > zmax) return;
            for (u32 k : targets_by_z[w - zmin]) cb(keys.key0(k), k);
        } else {
            for (u32 i = 0; i < dim; ++i) {
                int need = w + zw(i);
                if (need < zmin || need > zmax) continue;
                for (u32 k : targets_by_z[need - zmin]) cb(keys.key1(k, i), cochain_id1(i, k, dim));
            }
        }
    }

    ZBlockResult process_block(int w) const;
};

ZBlockResult Engine::process_block(int w) const {
    auto t0 = Clock::now();
    ZBlockResult out;
    out.report.weight = w;
    const std::size_t bo = static_cast<std::size_t>(w - bw_min);
    out.report.dim_low = low_count[bo];
    out.report.dim_mid = mid_count[bo];
    out.report.dim_high = high_count[bo];

    if (out.report.dim_mid + out.report.dim_high > opts.block_cap) {
        out.report.skipped_budget = true;
        return out;
    }
    if (out.report.dim_mid == 0) {
        out.report.completed = true;
        out.report.seconds = seconds_since(t0);
        return out;
    }

    // per-joint-key column counts
    std::unordered_map<u64, u64> key_count;
    scan_mid(w, [&](u64 key, u64) { ++key_count[key]; });
    std::vector<std::pair<u64, u64>> keys_sorted(key_count.begin(), key_count.end());
    std::sort(keys_sorted.begin(), keys_sorted.end());

    // batches of whole keys
    std::vector<std::vector<u64>> batches;
    {
        std::vector<u64> cur;
        u64 acc = 0;
        for (auto& [k, c] : keys_sorted) {
            if (!cur.empty() && acc + c > opts.batch_col_cap) {
                batches.push_back(std::move(cur));
                cur.clear();
                acc = 0;
            }
            cur.push_back(k);
            acc += c;
        }
        if (!cur.empty()) batches.push_back(std::move(cur));
    }

    const u32 verify_cap = 1024;
    IdRow scratch;
    std::vector<SparseEntry> local_row;

    for (const auto& batch : batches) {
        std::unordered_map<u64, u32> state_of_key;
        std::vector<JointState> states(batch.size());
        for (u32 s = 0; s < batch.size(); ++s) {
            states[s].key = batch[s];
            state_of_key.emplace(batch[s], s);
        }
        scan_mid(w, [&](u64 key, u64 gid) {
            auto it = state_of_key.find(key);
            if (it != state_of_key.end()) states[it->second].col_global.push_back(gid);
        });
        for (auto& st : states) {
            std::sort(st.col_global.begin(), st.col_global.end());
            st.ncols = static_cast<u32>(st.col_global.size());
            st.stall_limit = std::max<u32>(256, st.ncols / 4);
        }

        // --- rank of d_{q-1} into each block
        {
            std::vector<std::unique_ptr<StreamEchelon>> low(states.size());
            for (u32 s = 0; s < states.size(); ++s) low[s] = std::make_unique<StreamEchelon>(states[s].ncols, p);
            scan_low(w, [&](u64 key, u64 lowid) {
                auto it = state_of_key.find(key);
                if (it == state_of_key.end()) return;
                JointState& st = states[it->second];
                if (opts.q == 1) d0_image_row(*L, static_cast<u32>(lowid), scratch);
                else d1_image_row(*L, static_cast<u32>(lowid / dim), static_cast<u32>(lowid % dim), scratch);
                local_row.clear();
                for (auto& [gid, v] : scratch) local_row.push_back({st.local_col(gid), v});
                low[it->second]->insert(local_row);
            });
            for (u32 s = 0; s < states.size(); ++s) {
                states[s].rank_low = low[s]->rank();
                states[s].bound = states[s].ncols - states[s].rank_low;
                states[s].high = std::make_unique<StreamEchelon>(states[s].ncols, p);
                if (states[s].bound == 0) states[s].mode = JointState::Mode::Done;
            }
        }

        // --- stream the rows of d_q
        u32 active = 0;
        for (auto& st : states)
            if (st.mode != JointState::Mode::Done) ++active;
        auto feed_state = [&](JointState& st, const IdRow& row) {
            local_row.clear();
            for (auto& [gid, v] : row) local_row.push_back({st.local_col(gid), v});
            bool was_done = st.mode == JointState::Mode::Done;
            st.feed(local_row, p, verify_cap);
            if (!was_done && st.mode == JointState::Mode::Done) --active;
        };

        if (opts.q == 1) {
            for (u32 i = 0; i < dim && active; ++i)
                for (u32 j = i + 1; j < dim && active; ++j) {
                    int need = w + zw(i) + zw(j);
                    if (need < zmin || need > zmax) continue;
                    u64 S2 = keys.P[i] + keys.P[j];
                    for (const auto& [pk, tgts] : groups[need - zmin]) {
                        u64 key = pk + keys.c2 - S2;
                        auto it = state_of_key.find(key);
                        if (it == state_of_key.end()) continue;
                        JointState& st = states[it->second];
                        if (st.mode == JointState::Mode::Done) continue;
                        for (u32 k : tgts) {
                            d1_equation_row(*L, i, j, k, scratch);
                            if (!scratch.empty()) feed_state(st, scratch);
                            if (st.mode == JointState::Mode::Done) break;
                        }
                    }
                }
        } else {
            for (u32 i = 0; i < dim && active; ++i) {
                u64 Pi = keys.P[i];
                int zi = zw(i);
                for (u32 j = i + 1; j < dim && active; ++j) {
                    u64 Pij = Pi + keys.P[j];
                    int zij = zi + zw(j);
                    for (u32 l = j + 1; l < dim; ++l) {
                        int need = w + zij + zw(l);
                        if (need < zmin || need > zmax) continue;
                        u64 S3 = Pij + keys.P[l];
                        for (const auto& [pk, tgts] : groups[need - zmin]) {
                            u64 key = pk + keys.c3 - S3;
                            auto it = state_of_key.find(key);
                            if (it == state_of_key.end()) continue;
                            JointState& st = states[it->second];
                            if (st.mode == JointState::Mode::Done) continue;
                            for (u32 k : tgts) {
                                d2_row(*L, i, j, l, k, scratch);
                                if (!scratch.empty()) feed_state(st, scratch);
                                if (st.mode == JointState::Mode::Done) break;
                            }
                        }
                    }
                }
            }
        }

        // --- finalize the batch
        for (auto& st : states) {
            u32 rank_mid = st.high->rank();
            out.report.rank_low += st.rank_low;
            out.report.rank_mid += rank_mid;
            u64 h = st.ncols - rank_mid - st.rank_low;
            out.report.h += h;
            if (h > 0 && opts.want_representatives) {
                // kernel of d_q reduced modulo the image of d_{q-1}
                if (st.mode != JointState::Mode::Verify) st.extract_kernel();
                StreamEchelon quot(st.ncols, p);
                scan_low(w, [&](u64 key, u64 lowid) {
                    if (key != st.key) return;
                    if (opts.q == 1) d0_image_row(*L, static_cast<u32>(lowid), scratch);
                    else d1_image_row(*L, static_cast<u32>(lowid / dim), static_cast<u32>(lowid % dim), scratch);
                    local_row.clear();
                    for (auto& [gid, v] : scratch) local_row.push_back({st.local_col(gid), v});
                    quot.insert(local_row);
                });
                for (u32 t = 0; t < st.knum; ++t) {
                    SparseRow kv;
                    for (u32 c = 0; c < st.ncols; ++c) {
                        u8 v = st.K[static_cast<std::size_t>(c) * st.knum + t];
                        if (v) kv.push_back({c, v});
                    }
                    long piv = quot.insert(kv);
                    if (piv < 0) continue;
                    const SparseRow& red = quot.pivot_row(static_cast<u32>(piv));
                    SparseRow rep;
                    for (const auto& e : red) rep.push_back(e);
                    out.reps.emplace_back(st.key, rep);
                    out.rep_cols.push_back(st.col_global);
                }
            }
        }
    }
    out.report.completed = true;
    out.report.seconds = seconds_since(t0);
    return out;
}

} // namespace

std::vector<WeightBlockInfo> weight_blocks(const AlgebraPtr& L, u32 q) {
    if (!L->has_grading()) throw std::invalid_argument("weight_blocks: ungraded algebra");
    CohomOptions opts;
    opts.q = q;
    Engine eng(L, opts);
    std::vector<WeightBlockInfo> out;
    for (int w = eng.bw_min; w <= eng.bw_max; ++w) {
        u64 c = eng.mid_count[static_cast<std::size_t>(w - eng.bw_min)];
        if (c) out.push_back({w, c});
    }
    return out;
}

CohomologyReport h_dim(const AlgebraPtr& L, const CohomOptions& opts) {
    if (opts.q != 1 && opts.q != 2) throw std::invalid_argument("h_dim: q must be 1 or 2");
    auto t0 = Clock::now();
    Engine eng(L, opts);

    std::vector<int> block_weights;
    for (int w = eng.bw_min; w <= eng.bw_max; ++w) {
        std::size_t bo = static_cast<std::size_t>(w - eng.bw_min);
        if (eng.mid_count[bo] == 0 && eng.high_count[bo] == 0 && eng.low_count[bo] == 0) continue;
        if (!opts.restrict_weights.empty() &&
            std::find(opts.restrict_weights.begin(), opts.restrict_weights.end(), w) ==
                opts.restrict_weights.end())
            continue;
        block_weights.push_back(w);
    }

    std::vector<ZBlockResult> results(block_weights.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> out_of_time{false};
    auto worker = [&] {
        while (true) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= block_weights.size()) break;
            if (opts.time_cap_seconds > 0 && seconds_since(t0) > opts.time_cap_seconds) out_of_time.store(true);
            if (out_of_time.load()) {
                results[idx].report.weight = block_weights[idx];
                std::size_t bo = static_cast<std::size_t>(block_weights[idx] - eng.bw_min);
                results[idx].report.dim_low = eng.low_count[bo];
                results[idx].report.dim_mid = eng.mid_count[bo];
                results[idx].report.dim_high = eng.high_count[bo];
                results[idx].report.completed = false;
                continue;
            }
            results[idx] = eng.process_block(block_weights[idx]);
        }
    };
    u32 jobs = std::max(1u, opts.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (u32 t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    CohomologyReport rep;
    rep.q = opts.q;
    rep.graded = opts.mode == CohomMode::Graded;
    for (std::size_t t = 0; t < results.size(); ++t) {
        rep.blocks.push_back(results[t].report);
        if (results[t].report.completed) rep.total_h += results[t].report.h;
        else rep.complete = false;
        if (results[t].report.skipped_budget) rep.complete = false;
        for (std::size_t r = 0; r < results[t].reps.size(); ++r) {
            Cochain c(L, opts.q);
            const auto& cols = results[t].rep_cols[r];
            for (const auto& e : results[t].reps[r].second) c.add(cols[e.col], e.val);
            c.finalize();
            rep.representatives.push_back(std::move(c));
        }
    }
    rep.seconds = seconds_since(t0);
    return rep;
}

// -- coboundary solve and class span ----------------------------------------------

namespace {

struct KeyedColumns {
    std::unordered_map<u64, u32> state_of_key;
    std::vector<std::vector<u64>> cols; // per state, ascending global ids

    u32 require_state(u64 key) {
        auto it = state_of_key.find(key);
        if (it == state_of_key.end()) throw std::logic_error("cohomology: missing weight block");
        return it->second;
    }
};

// collect the C^2 columns of the given joint keys
KeyedColumns collect_c2_columns(const LieAlgebra& L, const KeySpace& ks, const std::vector<u64>& wanted) {
    KeyedColumns out;
    for (u64 k : wanted)
        if (!out.state_of_key.count(k)) {
            out.state_of_key.emplace(k, static_cast<u32>(out.cols.size()));
            out.cols.emplace_back();
        }
    const u32 dim = L.dim();
    for (u32 i = 0; i < dim; ++i)
        for (u32 j = i + 1; j < dim; ++j) {
            u64 base = LieAlgebra::pair_rank(i, j) * dim;
            for (u32 k = 0; k < dim; ++k) {
                u64 key = ks.key2(k, i, j);
                auto it = out.state_of_key.find(key);
                if (it != out.state_of_key.end()) out.cols[it->second].push_back(base + k);
            }
        }
    for (auto& c : out.cols) std::sort(c.begin(), c.end());
    return out;
}

KeySpace keyspace_for(const AlgebraPtr& L) {
    KeySpace ks;
    std::vector<std::vector<int>> gr;
    if (L->has_grading()) gr = refinement_gradings(*L, 4);
    ks.build(gr, L->dim());
    return ks;
}

} // namespace

CoboundaryResult coboundary_solve(const Cochain& c) {
    if (c.degree() != 2) throw std::invalid_argument("coboundary_solve: degree 2 required");
    const auto& L = c.parent();
    const u32 dim = L->dim(), p = L->p();
    KeySpace ks = keyspace_for(L);

    CoboundaryResult res{false, Cochain(L, 1), {}};
    if (c.entries().empty()) {
        res.is_coboundary = true;
        return res;
    }

    // split the target by joint key
    std::unordered_map<u64, std::vector<std::pair<u64, u32>>> by_key;
    std::vector<u64> keys_order;
    for (auto [id, v] : c.entries()) {
        u32 target = static_cast<u32>(id % dim);
        u32 i, j;
        decode_pair_rank(id / dim, i, j);
        u64 key = ks.key2(target, i, j);
        if (!by_key.count(key)) keys_order.push_back(key);
        by_key[key].emplace_back(id, v);
    }
    std::sort(keys_order.begin(), keys_order.end());

    for (u64 key : keys_order) {
        // unknowns: C^1 coordinates of this key
        std::vector<u64> unknowns;
        for (u32 i = 0; i < dim; ++i)
            for (u32 t = 0; t < dim; ++t)
                if (ks.key1(t, i) == key) unknowns.push_back(cochain_id1(i, t, dim));
        std::sort(unknowns.begin(), unknowns.end());
        auto ucol = [&](u64 gid) {
            auto it = std::lower_bound(unknowns.begin(), unknowns.end(), gid);
            if (it == unknowns.end() || *it != gid) throw std::logic_error("coboundary_solve: stray unknown");
            return static_cast<u32>(it - unknowns.begin());
        };
        const u32 nu = static_cast<u32>(unknowns.size());

        // equations: all C^2 coordinates of this key
        std::vector<u64> eq_ids;
        for (u32 i = 0; i < dim; ++i)
            for (u32 j = i + 1; j < dim; ++j) {
                u64 base = LieAlgebra::pair_rank(i, j) * dim;
                for (u32 k = 0; k < dim; ++k)
                    if (ks.key2(k, i, j) == key) eq_ids.push_back(base + k);
            }
        std::sort(eq_ids.begin(), eq_ids.end());
        std::unordered_map<u64, u32> cval;
        for (auto& [id, v] : by_key[key]) cval[id] = v;

        auto run = [&](bool with_prov) {
            StreamEchelon ech(nu + 1, p, 1, with_prov);
            IdRow scratch;
            SparseRow row;
            for (u64 eq : eq_ids) {
                u32 k = static_cast<u32>(eq % dim);
                u32 i, j;
                decode_pair_rank(eq / dim, i, j);
                d1_equation_row(*L, i, j, k, scratch);
                row.clear();
                for (auto& [gid, v] : scratch) row.push_back({ucol(gid), v});
                auto itv = cval.find(eq);
                if (itv != cval.end()) row.push_back({nu, itv->second});
                if (!row.empty()) ech.insert(row);
            }
            return ech;
        };

        StreamEchelon ech = run(false);
        if (!ech.inconsistency_rows().empty()) {
            // rebuild with provenance for the certificate
            StreamEchelon cert = run(true);
            SparseRow prov = cert.provenance_of_inconsistency(0);
            res.is_coboundary = false;
            res.certificate.clear();
            for (const auto& e : prov) res.certificate.emplace_back(eq_ids[e.col], e.val);
            res.phi = Cochain(L, 1);
            return res;
        }
        auto x = ech.solve(0);
        for (u32 t = 0; t < nu; ++t)
            if (x[t]) res.phi.add(unknowns[t], x[t]);
    }
    res.phi.finalize();
    res.is_coboundary = true;
    // exactness: d1(phi) must reproduce c
    if (!(differential(res.phi) == c)) throw std::logic_error("coboundary_solve: solution failed verification");
    return res;
}

u32 class_span_dim(const std::vector<Cochain>& cocycles) {
    if (cocycles.empty()) return 0;
    const auto& L = cocycles.front().parent();
    const u32 dim = L->dim(), p = L->p();
    for (const auto& c : cocycles) {
        if (c.parent() != L || c.degree() != 2) throw std::invalid_argument("class_span_dim: mixed inputs");
    }
    KeySpace ks = keyspace_for(L);

    // keys touched by any cocycle
    std::vector<u64> wanted;
    for (const auto& c : cocycles)
        for (auto [id, v] : c.entries()) {
            (void)v;
            u32 target = static_cast<u32>(id % dim);
            u32 i, j;
            decode_pair_rank(id / dim, i, j);
            wanted.push_back(ks.key2(target, i, j));
        }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    if (wanted.empty()) return 0;

    KeyedColumns kc = collect_c2_columns(*L, ks, wanted);
    // one combined column space
    std::vector<u64> all_cols;
    for (auto& c : kc.cols) all_cols.insert(all_cols.end(), c.begin(), c.end());
    std::sort(all_cols.begin(), all_cols.end());
    auto col_of = [&](u64 gid) {
        auto it = std::lower_bound(all_cols.begin(), all_cols.end(), gid);
        if (it == all_cols.end() || *it != gid) throw std::logic_error("class_span_dim: column lookup");
        return static_cast<u32>(it - all_cols.begin());
    };

    StreamEchelon ech(static_cast<u32>(all_cols.size()), p);
    // image of d1 restricted to these keys
    IdRow scratch;
    SparseRow row;
    for (u32 i = 0; i < dim; ++i)
        for (u32 t = 0; t < dim; ++t) {
            u64 key = ks.key1(t, i);
            if (!kc.state_of_key.count(key)) continue;
            d1_image_row(*L, i, t, scratch);
            row.clear();
            for (auto& [gid, v] : scratch) row.push_back({col_of(gid), v});
            if (!row.empty()) ech.insert(row);
        }
    u32 rank_im = ech.rank();
    for (const auto& c : cocycles) {
        row.clear();
        for (auto [id, v] : c.entries()) row.push_back({col_of(id), v});
        if (!row.empty()) ech.insert(row);
    }
    return ech.rank() - rank_im;
}

} // namespace modlie
