#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "btw/decor.hpp"

namespace btw {

enum class MoveKind { M23, M32, M02Q, M20Q, M02T, M20T, M14, M41 };

std::string to_string(MoveKind k);
MoveKind move_kind_from_string(const std::string& s);  // throws Error("ParseError")
bool is_positive(MoveKind k);
bool is_ideal(MoveKind k);
int tet_delta(MoveKind k);
// Key names of the site vector, e.g. {"tet","face"} for M23.
const std::vector<std::string>& site_keys(MoveKind k);

// Sites:
//   M23  {tet, face}           the face class of (tet, face)
//   M32  {tet, a, b}           edge class of a->b in tet
//   M02Q {tet, a, b, i, j}     walk around a->b starting in tet (leaving
//                              first through the face opposite the smaller
//                              of the two other vertices); cut the faces
//                              crossed at steps i < j
//   M20Q {tet, a, b}           valence-2 edge inside the pillow
//   M02T {tet, face}
//   M20T {tet, v}              interior vertex of the pillow
//   M14  {tet}
//   M41  {tet, v}
struct Move {
    MoveKind kind = MoveKind::M23;
    std::vector<int> site;
    bool operator==(const Move&) const = default;
};

std::string to_string(const Move& m);

std::vector<Move> enumerate_sites(const Triangulation& T, MoveKind kind);
std::vector<Move> enumerate_sites(const Triangulation& T, const Skeleton& S, MoveKind kind);
// Throws Error("InvalidSite") with a reason when the site is not valid.
void check_site(const Triangulation& T, const Skeleton& S, const Move& m);

struct MoveResult {
    Triangulation T;
    std::vector<int> new_of_old;  // -1 for removed tets
    std::vector<int> old_of_new;  // -1 for created tets
    Move inverse;                 // undoes the move on T
    // Local vertex names of the rewritten ball. A created tet has a name
    // per local vertex; old tets touched by the move carry names on the
    // vertices they share with it (-1 elsewhere).
    std::vector<std::array<int, 4>> new_names;  // per tet of T; unused for persistent tets
    std::vector<std::pair<int, std::array<int, 4>>> removed_names;
    std::vector<std::pair<int, std::array<int, 4>>> side_names;
};

MoveResult apply(const Triangulation& T, const Move& m);

// Matching of decorated items across a move (T -> R.T).
struct Persistence {
    // per edge class of R.T: (edge class of T, relative orientation)
    std::vector<std::vector<std::pair<int, int>>> edge;
    // per face class of R.T: (tet of T, face, 1 when it matches the
    // representative side of the new class)
    std::vector<std::vector<std::array<int, 3>>> face;
};

Persistence persistence(const Triangulation& T, const Skeleton& S, const MoveResult& R,
                        const Skeleton& S2);

// All decorations of R.T that agree with the given one on the persistent
// part, in a fixed order.
std::vector<Branching> extend_branching(const Skeleton& S, const Branching& b, const MoveResult& R,
                                        const Skeleton& S2, const Persistence& P);
std::vector<PreBranching> extend_prebranching(const Skeleton& S, const PreBranching& w,
                                              const MoveResult& R, const Skeleton& S2,
                                              const Persistence& P);

template <class D>
struct DecoratedTransit {
    Move move;
    MoveResult result;
    D before, after;
    bool forced = false;
};

using BranchedTransit = DecoratedTransit<Branching>;
using PreBranchedTransit = DecoratedTransit<PreBranching>;

std::vector<BranchedTransit> enhance_positive(const Triangulation& T, const Move& m, const Branching& b);
std::vector<PreBranchedTransit> enhance_positive(const Triangulation& T, const Move& m,
                                                 const PreBranching& w);

template <class D>
struct NegativeOutcome {
    std::optional<DecoratedTransit<D>> transit;
    std::string witness;  // why the move is blocked
    bool blocked() const { return !transit.has_value(); }
};

NegativeOutcome<Branching> enhance_negative(const Triangulation& T, const Move& m, const Branching& b);
NegativeOutcome<PreBranching> enhance_negative(const Triangulation& T, const Move& m,
                                               const PreBranching& w);

// Decorated signatures, for comparing decorated triangulations up to isomorphism.
std::string decorated_signature(const Triangulation& T, const Branching& b);
std::string decorated_signature(const Triangulation& T, const PreBranching& w);

// ---- transit classification ----

enum class TransitClass { NonAmbiguous, ForcedAmbiguous, AmbiguousSliding, Bump };
std::string to_string(TransitClass c);

struct TransitType {
    std::array<std::array<int, 2>, 2> pair{};  // ((s1,a1),(s2,a2))
    TransitClass cls = TransitClass::NonAmbiguous;
    bool schaeffer = false;
    // cross-check data
    bool bump_rule = false;   // both apexes pits or both sources
    bool pb_forced = false;   // the induced pre-branched transit is forced
    bool b_forced = false;    // the branched transit is forced
    bool operator==(const TransitType&) const = default;
};

// Class of a 2->3 couple from the classification table.
TransitClass table_class_23(const std::array<std::array<int, 2>, 2>& pair);
bool is_schaeffer_23(const std::array<std::array<int, 2>, 2>& pair);

TransitType classify_23(const Triangulation& T, const Skeleton& S, const Branching& b, const Move& m);
TransitType classify_02q(const Triangulation& T, const Skeleton& S, const Branching& b, const Move& m);

// Abstract site: tau1 = (A,B,C,v1), tau2 = (A,B,C,v2) glued along ABC,
// doubled along its boundary. Names A,B,C,v1,v2 = 0..4 are local vertices
// 0,1,2,3 of tets 0 (tau1) and 1 (tau2); tets 2,3 are the mirror copies.
Triangulation abstract_site();
// Branching of abstract_site() induced by ranks of the five names.
Branching site_branching(const Triangulation& D, const Skeleton& S, const std::array<int, 5>& rank);
Move site_move_23();
Move site_move_02q(const Triangulation& D, const Skeleton& S);  // cuts ABv1 and ABv2

struct CensusRow {
    std::array<int, 5> rank{};  // ranks of A,B,C,v1,v2
    TransitType type;
    int new_edge = 0;           // +1 when the new edge runs v1 -> v2
};

struct Census {
    std::vector<CensusRow> rows;
    int n_types = 0;
    std::vector<int> type_of_row;
    int configs_per_type_min = 0, configs_per_type_max = 0;
    int na_types = 0, sliding_types = 0, forced_ambiguous_types = 0, bump_types = 0, schaeffer_types = 0;
    int table_vs_rules_mismatches = 0;
};

Census census_types();
// Same census for the quadrilateral move (orders of U,V,W1,W2 = A,B,v1,v2).
Census census_02q();

}  // namespace btw
