#pragma once
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "btw/perm.hpp"

namespace btw {

// Raised for domain-level failures; `code` is the stable error name
// (NonOrientable, InvalidSite, Blocked, ...).
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg) : std::runtime_error(msg), code(std::move(c)) {}
};

// Face f of tetrahedron i is the face opposite vertex f. Vertex v of i is
// identified with vertex perm[v] of tet, face f with face perm[f].
struct Gluing {
    int tet = -1;
    Perm4 perm;
    bool operator==(const Gluing&) const = default;
};

struct Triangulation {
    std::string name;
    std::vector<std::array<Gluing, 4>> gluings;

    int size() const { return static_cast<int>(gluings.size()); }
    const Gluing& adj(int t, int f) const { return gluings[t][f]; }
    bool operator==(const Triangulation& o) const { return gluings == o.gluings; }
};

enum class TriError { NonInvolutive, SelfGluedFace, BadPermutation, Unglued };

struct TriViolation {
    TriError kind;
    int tet;
    int face;
};

std::string to_string(TriError e);

// Empty result means the table is a valid closed gluing.
std::vector<TriViolation> check_gluings(const Triangulation& T);
// Throws Error("InvalidTriangulation") listing the violations.
const Triangulation& validate(const Triangulation& T);

// ---- skeleta ----

// One wedge of an edge link. The edge is a->b inside `tet`; the walk
// enters through the face opposite d and leaves through the face opposite c.
// The opposite edge is {c,d}.
struct LinkStep {
    int tet, a, b, c, d;
    bool operator==(const LinkStep&) const = default;
};

struct EdgeOccurrence {
    int tet;
    int a, b;  // oriented like the class orientation (when consistent)
};

struct EdgeClass {
    std::vector<EdgeOccurrence> orbit;
    std::vector<LinkStep> link;  // closed walk; length == valence when consistent
    bool consistent = true;
    int valence() const { return static_cast<int>(orbit.size()); }
};

struct FaceClass {
    int tet, face;    // representative side (lexicographically smaller)
    int tet2, face2;  // the other side
};

struct VertexClass {
    std::vector<std::pair<int, int>> orbit;  // (tet, vertex)
};

struct Skeleton {
    std::vector<EdgeClass> edges;
    std::vector<FaceClass> faces;
    std::vector<VertexClass> vertices;
    std::vector<std::array<int, 6>> edge_of;  // class of local edge
    // +1 when local edge lo->hi runs along the class orientation
    std::vector<std::array<int, 6>> edge_sign;
    std::vector<std::array<int, 4>> face_of;
    std::vector<std::array<int, 4>> vertex_of;

    int edge_dir(int tet, int a, int b) const {
        int e = edge_index(a, b);
        int s = edge_sign[tet][e];
        return a < b ? s : -s;
    }
};

Skeleton skeleta(const Triangulation& T);

// The walk around the edge starting in `start`, until the state repeats.
std::vector<LinkStep> edge_walk(const Triangulation& T, LinkStep start);

// ---- orientation ----

struct Orientation {
    bool orientable = true;
    std::vector<int> eps;    // +1/-1 per tet; frame (0,1,2,3) has sign eps
    std::vector<int> cycle;  // tets along an orientation-reversing loop when not orientable
};

Orientation orientation(const Triangulation& T);
// Throws Error("NonOrientable") when there is no consistent orientation.
std::vector<int> orient(const Triangulation& T);

// ---- boundary ----

struct BoundaryComponent {
    int vertex_class = -1;
    int triangles = 0, edges = 0, vertices = 0;
    int euler = 0;
};

struct BoundarySurface {
    // link triangle of (tet, v) has index 4*tet+v
    std::vector<int> component_of;
    // corner class of link triangle (tet,v) toward w: corner[4*tet+v][w]
    std::vector<std::array<int, 4>> corner;
    int n_corners = 0;
    std::vector<BoundaryComponent> components;
    int euler = 0;
};

BoundarySurface boundary_surface(const Triangulation& T);

// chi(M) for the compact manifold: n_edge_classes - n_tets.
int euler_characteristic(const Triangulation& T);

// ---- signatures ----

// Per-tet decoration data indexed by local vertex or face, relabelled with
// the tetrahedron (branching ranks, pre-branching in-bits, ...).
using TetLabels = std::vector<std::array<int, 4>>;

std::string signature(const Triangulation& T, const TetLabels* deco = nullptr);

// Frames realising the canonical form: old tet and map new-label -> old-label.
struct Relabeling {
    std::vector<int> old_of_new;
    std::vector<Perm4> frame;
};

Relabeling canonical_relabeling(const Triangulation& T, const TetLabels* deco = nullptr);

// Tet t of A goes to tet[t] of B, local vertex v to perm[t][v].
struct Isomorphism {
    std::vector<int> tet;
    std::vector<Perm4> perm;
};
std::optional<Isomorphism> isomorphism(const Triangulation& A, const TetLabels* la, const Triangulation& B,
                                       const TetLabels* lb);

// Relabels T: new tet k is old tet old_of_new[k]; new vertex v is old frame[k][v].
Triangulation relabel(const Triangulation& T, const Relabeling& r);
TetLabels relabel_labels(const TetLabels& L, const Relabeling& r);

// Disjoint union, used by tests and the arch constructions.
Triangulation disjoint_union(const Triangulation& A, const Triangulation& B);

}  // namespace btw
