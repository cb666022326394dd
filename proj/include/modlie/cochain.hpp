#ifndef MODLIE_COCHAIN_HPP
#define MODLIE_COCHAIN_HPP

#include <optional>
#include <string>
#include <vector>

#include "modlie/lie_algebra.hpp"

namespace modlie {

/// Coordinate ids of the cochain spaces C^q = Hom(Lambda^q L, L).
/// A coordinate is a strictly increasing argument tuple plus a target basis
/// index; alternation is structural. Ids are tuple_rank * dim + target with
/// the combinatorial tuple ranks below.
inline u64 cochain_id1(u32 i, u32 target, u32 dim) { return static_cast<u64>(i) * dim + target; }
inline u64 cochain_id2(u32 i, u32 j, u32 target, u32 dim) {
    return LieAlgebra::pair_rank(i, j) * dim + target;
}
u64 triple_rank(u32 i, u32 j, u32 l); // i < j < l
void decode_pair_rank(u64 pr, u32& i, u32& j);
void decode_triple_rank(u64 tr, u32& i, u32& j, u32& l);
u64 cochain_id3(u32 i, u32 j, u32 l, u32 target, u32 dim);

/// Alternating q-cochain with values in the adjoint module, stored sparsely
/// on (sorted tuple, target) coordinates.
class Cochain {
public:
    Cochain(AlgebraPtr L, u32 q);

    u32 degree() const { return q_; }
    const AlgebraPtr& parent() const { return L_; }
    bool is_zero() const { return entries_.empty(); }

    /// Accumulate; call finalize() once after the last add.
    void add(u64 coord_id, u32 val);
    void add1(u32 i, u32 target, u32 val);
    void add2(u32 i, u32 j, u32 target, u32 val); // any i != j, sign handled
    void finalize();

    const std::vector<std::pair<u64, u32>>& entries() const { return entries_; }

    /// Value on q basis arguments (alternating extension), as a sparse row.
    SparseRow value_on(const std::vector<u32>& args) const;

    /// Multilinear alternating extension on arbitrary elements.
    Element eval(const std::vector<Element>& args) const;

    Cochain scaled(u32 c) const;
    friend Cochain operator+(const Cochain& a, const Cochain& b);
    friend Cochain operator-(const Cochain& a, const Cochain& b);
    friend bool operator==(const Cochain& a, const Cochain& b) {
        return a.L_ == b.L_ && a.q_ == b.q_ && a.entries_ == b.entries_;
    }

private:
    AlgebraPtr L_;
    u32 q_;
    bool finalized_ = true;
    std::vector<std::pair<u64, u32>> entries_; // sorted by coordinate id
};

/// Chevalley-Eilenberg differential for the adjoint module:
///   (d phi)(x,y)   = [x, phi(y)] - [y, phi(x)] - phi([x,y])
///   (d psi)(x,y,z) = [x, psi(y,z)] - [y, psi(x,z)] + [z, psi(x,y)]
///                    - psi([x,y], z) + psi([x,z], y) - psi([y,z], x)
/// Evaluation is support-driven, so sparse cochains on large algebras stay
/// cheap.
Cochain differential(const Cochain& c);

struct CocycleCheck {
    bool ok;
    u32 i = 0, j = 0, l = 0; // witness triple when not ok
};
CocycleCheck is_cocycle(const Cochain& c);

} // namespace modlie

#endif
