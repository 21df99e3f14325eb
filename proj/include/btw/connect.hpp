#pragma once
#include <optional>
#include <string>
#include <vector>

#include "btw/io.hpp"
#include "btw/moves.hpp"

namespace btw {

// ---- certificates ----

struct Step {
    Move move;
    int choice = 0;  // index into the positive enhancements; 0 for negative moves
    bool operator==(const Step&) const = default;
};

// decoration: "branching", "prebranching" or "none" (naked moves).
struct MoveSequence {
    std::string decoration = "branching";
    std::string start, end;  // decorated signatures
    std::vector<Step> steps;
    std::vector<std::string> notes;  // e.g. which undo path an arch took
};

template <class D>
struct Decorated {
    Triangulation T;
    D d;
};

struct Naked {
    bool operator==(const Naked&) const = default;
};

std::string state_signature(const Triangulation& T, const Branching& b);
std::string state_signature(const Triangulation& T, const PreBranching& w);
std::string state_signature(const Triangulation& T, const Naked&);

// Throws Error("ReplayFailure") when a step cannot be performed.
Decorated<Branching> replay(const Triangulation& T, const Branching& b, const MoveSequence& s);
Decorated<PreBranching> replay(const Triangulation& T, const PreBranching& w, const MoveSequence& s);
Triangulation replay(const Triangulation& T, const MoveSequence& s);

// Replays and compares both endpoint signatures.
bool verify(const Triangulation& T, const Branching& b, const MoveSequence& s);
bool verify(const Triangulation& T, const PreBranching& w, const MoveSequence& s);
bool verify(const Triangulation& T, const MoveSequence& s);

json sequence_to_json(const MoveSequence& s);
MoveSequence sequence_from_json(const json& j);

// Site of m carried along an isomorphism A -> B.
Move transfer(const Triangulation& A, const Move& m, const Triangulation& B, const Isomorphism& f);

// ---- good ambiguous edges ----

// Inverts the good ambiguous edge class e by ideal moves: 2-3 moves that
// shrink its star to two tetrahedra, a 2-0/0-2 quadrilateral pair, and
// the 3-2 moves undoing the first ones. Throws Error("NotGoodAmbiguous").
MoveSequence expand_good_inversion(const Triangulation& T, const Branching& b, int e);

// ---- refinement and completed connectivity ----

struct Refinement {
    Triangulation T;
    Branching b;
    MoveSequence seq;
    std::vector<int> original_edges;   // edge classes of T, as classes of the refined triangulation
    std::vector<int> added_vertices;   // vertex classes created by 1-4 moves
    std::vector<int> second_round;     // those created beside a face
};

Refinement refine_two_step(const Triangulation& T, const Branching& b);

MoveSequence connect_completed(const Triangulation& T, const Branching& b, const Branching& b2);

// ---- arches ----

// After a branched 1-4 move at `tet` with new vertex v, the triangle t is
// the internal face of the star spanned by v and the edge `edge` (index
// 0..5) of tet; e joins v to `end`, one of the two ends of that edge.
struct ArchMarking {
    int tet = 0;
    int edge = 0;
    int end = 0;  // local vertex of tet
    bool operator==(const ArchMarking&) const = default;
};

std::vector<ArchMarking> arch_markings(int tet);  // the 12 naked markings

// 1-4 with the new vertex a pit, as a decorated transit.
BranchedTransit pit_14(const Triangulation& T, const Branching& b, int tet);

struct ArchState {
    Triangulation T;
    Branching b;
    int arch_tet = -1;
    std::vector<int> local;       // tets of the star and the arch
    std::vector<int> new_of_old;  // tets of the input, -1 for the one replaced by the star
    std::string loop_orientation;  // "w->x" or "x->w" on the new valence-1 edge
};

// The arch inserted in the result of pit_14. Throws Error("NotAdmissible")
// when no branching extends across the arch.
ArchState insert_arch(const Triangulation& T, const Branching& b, const ArchMarking& m);

// Ideal moves from the arch state back to (T, b). Tries five moves ending
// with a 2-0 quadrilateral move first and falls back to a wider bounded
// search; notes[0] records "figure" or "search". Throws
// Error("InvalidConfiguration") when neither finds a path.
MoveSequence undo_bubble_arch(const Triangulation& T, const Branching& b, const ArchMarking& m);

// Ideal moves only. Throws Error("MarkingFailure") when the marking
// discipline cannot be met.
MoveSequence connect_ideal(const Triangulation& T, const Branching& b, const Branching& b2);

// ---- exploration ----

enum class Relation { FullB, Sliding, NA, PB, Naked };
std::string to_string(Relation r);
Relation relation_from_string(const std::string& s);

struct ExploreComponent {
    std::string fingerprint;
    int size = 0;
    std::string representative;
};

struct ExploreResult {
    Relation relation = Relation::FullB;
    std::vector<std::string> visited;       // state signatures
    std::vector<std::string> fingerprints;  // per visited state
    std::vector<int> component;             // per visited state
    std::vector<ExploreComponent> components;
    int edges = 0;
    bool exhausted = false;  // frontier emptied before the limits
    bool budget_exceeded = false;
    bool fingerprints_constant = true;
    // each visited state is reached from starts[root[k]] by paths[k]
    std::vector<int> root;
    std::vector<MoveSequence> paths;
};

// Breadth-first search over ideal transits from every start, up to `depth`
// moves and `budget` states, with at most max_tets tetrahedra. Branchings
// go with full-b, sliding and na; pre-branchings with pb; no decoration
// with naked. Throws Error("InvalidArgument") on a mismatch.
ExploreResult explore(const std::vector<Triangulation>& starts, const std::vector<Branching>& decorations,
                      Relation r, int depth, int budget, int max_tets);
ExploreResult explore(const std::vector<Triangulation>& starts, const std::vector<PreBranching>& decorations,
                      Relation r, int depth, int budget, int max_tets);
ExploreResult explore(const std::vector<Triangulation>& starts, Relation r, int depth, int budget, int max_tets);

// Positive 2-3 moves until some branching exists. Throws
// Error("BudgetExceeded").
struct Branchable {
    Triangulation T;
    MoveSequence seq;  // naked
};
Branchable make_branchable(const Triangulation& T, int budget = 100000);

}  // namespace btw
