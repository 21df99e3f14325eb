#pragma once
#include <vector>

#include "btw/invariants.hpp"
#include "btw/moves.hpp"

namespace btw {

// Cellular map of dual spines T -> R.T: a tet goes to itself or, when
// removed, to the first created tet; a face class goes to a path through
// the created tets. Throws Error("InvalidTransit") for the 2-0 moves,
// which create no tetrahedra.
struct SpineMap {
    std::vector<int> vertex;                // per tet of T
    std::vector<std::vector<Int>> edge;     // per face class of T, chain on R.T
    std::vector<Int> push(const std::vector<Int>& chain) const;
};

SpineMap spine_map(const Triangulation& T, const Skeleton& S, const MoveResult& R, const Skeleton& S2);

// d1' f1 = f0 d1 and f1(im d2) inside im d2'.
bool is_chain_map(const SpineComplex& C, const SpineComplex& C2, const SpineMap& f);

// [f(w)] == [w'] in H1 of R.T.
bool omega_class_carried(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                         const MoveResult& R, const Skeleton& S2, const PreBranching& w2);

// Measure carried across a branched transit: persistent regions keep their
// weight, the others are solved from the switches of the target. Throws
// Error("InvalidTransit") when the result is not determined or violates a
// switch.
std::vector<Rat> transport(const Triangulation& T, const Skeleton& S, const MoveResult& R,
                           const Skeleton& S2, const Branching& b2, const std::vector<Rat>& z);

}  // namespace btw
