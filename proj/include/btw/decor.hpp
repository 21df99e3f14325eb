#pragma once
#include <array>
#include <string>
#include <vector>

#include "btw/triangulation.hpp"

namespace btw {

// Edge-class orientations: dir[e] = +1 runs along the class orientation
// (the first orbit entry a->b), -1 against it.
struct Branching {
    std::vector<int> dir;
    bool operator==(const Branching&) const = default;
    auto operator<=>(const Branching&) const = default;
};

// Transverse sides: side[F] = +1 when the co-orientation of face class F
// points into the representative side (tet, face), -1 into the other side.
struct PreBranching {
    std::vector<int> side;
    bool operator==(const PreBranching&) const = default;
    auto operator<=>(const PreBranching&) const = default;
};

// +1 when the edge a->b of tet t points a->b under b.
int edge_orientation(const Skeleton& S, const Branching& b, int t, int a, int b_);

// ---- branchings ----

enum class BranchError { CyclicTriangle, InconsistentEdgeClass, WrongSize };

struct BranchViolation {
    BranchError kind;
    int tet = -1;                 // CyclicTriangle
    std::array<int, 3> cycle{};  // local vertices u->v->w->u
    int edge = -1;                // InconsistentEdgeClass
};

struct BranchingReport {
    bool ok = false;
    std::vector<BranchViolation> violations;
    // per tet: order[t][k] = local vertex of rank k
    std::vector<std::array<int, 4>> order;
    // signs *_(tet,b), filled when T is orientable
    std::vector<int> signs;
};

BranchingReport validate_branching(const Triangulation& T, const Skeleton& S, const Branching& b);
bool is_branching(const Triangulation& T, const Skeleton& S, const Branching& b);

// rank[t][v] = position of local vertex v in the induced order of tet t.
TetLabels vertex_ranks(const Triangulation& T, const Skeleton& S, const Branching& b);

std::vector<Branching> enumerate_branchings(const Triangulation& T);
std::vector<Branching> enumerate_branchings(const Triangulation& T, const Skeleton& S);
bool has_branching(const Triangulation& T);

// ---- pre-branchings ----

struct PreBranchingReport {
    bool ok = false;
    std::vector<std::pair<int, int>> bad_degree;  // (tet, in-count)
};

// True when the co-orientation of face (t,f) points into t.
bool points_in(const Skeleton& S, const PreBranching& w, int t, int f);
TetLabels in_bits(const Triangulation& T, const Skeleton& S, const PreBranching& w);

PreBranchingReport validate_prebranching(const Triangulation& T, const Skeleton& S,
                                         const PreBranching& w);
bool is_prebranching(const Triangulation& T, const Skeleton& S, const PreBranching& w);
std::vector<PreBranching> enumerate_prebranchings(const Triangulation& T);

// The pre-branching omega_b induced by a branching (needs an orientation).
PreBranching induced_prebranching(const Triangulation& T, const Skeleton& S, const Branching& b,
                                  const std::vector<int>& eps);
PreBranching induced_prebranching(const Triangulation& T, const Branching& b);

// *_(tet,b) = sign of the b-order frame times eps.
std::vector<int> tet_signs(const Triangulation& T, const Skeleton& S, const Branching& b,
                           const std::vector<int>& eps);
std::vector<int> tet_signs(const Triangulation& T, const Branching& b);

// ---- ambiguous edges ----

bool is_ambiguous(const Triangulation& T, const Skeleton& S, const Branching& b, int e);
bool is_good_ambiguous(const Triangulation& T, const Skeleton& S, const Branching& b, int e);
std::vector<int> good_ambiguous_edges(const Triangulation& T, const Skeleton& S, const Branching& b);
// Throws Error("NotAmbiguous") unless e is good ambiguous.
Branching invert(const Triangulation& T, const Skeleton& S, const Branching& b, int e);

// ---- circuits ----

// A closed directed walk in the omega-oriented dual graph: faces[k] is a
// face class, entered into tets[k+1] (cyclically) from tets[k].
struct Circuit {
    std::vector<int> tets;
    std::vector<int> faces;
};

struct CircuitDecomposition {
    std::vector<Circuit> circuits;
    std::vector<int> circuit_of_face;
};

// Pairing at each tet: the in-face with the smaller local index is paired
// with the out-face with the smaller local index, and the other two together.
CircuitDecomposition circuits(const Triangulation& T, const Skeleton& S, const PreBranching& w);
// Same with a per-tet pairing choice: crossed[t] pairs the smaller in-face
// with the larger out-face instead.
CircuitDecomposition circuits(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                              const std::vector<bool>& crossed);
PreBranching circuit_move(const Triangulation& T, const Skeleton& S, const PreBranching& w, int id);
// Inverts the given set of dual edges; it must be a closed directed walk of w.
PreBranching circuit_move(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                          const Circuit& c);

}  // namespace btw
