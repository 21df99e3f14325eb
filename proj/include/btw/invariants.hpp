#pragma once
#include <optional>
#include <string>
#include <vector>

#include "btw/decor.hpp"
#include "btw/linalg.hpp"

namespace btw {

// Cellular chain complex of the dual spine: 0-cells tets, 1-cells face
// classes, 2-cells edge classes. A 1-cell is oriented towards the
// representative side of its face class; a 2-cell follows the edge walk
// that starts the class (see Skeleton::edges[e].link).
struct SpineComplex {
    int n0 = 0, n1 = 0, n2 = 0;
    IntMatrix d1;  // n0 x n1
    IntMatrix d2;  // n1 x n2
};

SpineComplex spine_complex(const Triangulation& T, const Skeleton& S);
// Same complex with 1-cells re-oriented along w and 2-cells along the
// regions of b (needs the ambient orientation eps).
SpineComplex spine_complex(const Triangulation& T, const Skeleton& S, const PreBranching* w,
                           const Branching* b, const std::vector<int>* eps);

struct Group {
    int rank = 0;
    std::vector<Int> torsion;  // invariant factors > 1
    std::string str() const;
    bool operator==(const Group&) const = default;
};

struct Homology {
    int coefficients = 0;  // 0 for Z, 2 for Z/2
    Group h0, h1, h2;
};

Homology homology(const SpineComplex& C, int coefficients);

// 1-chain of w with respect to the reference orientations.
std::vector<Int> omega_chain(const Skeleton& S, const PreBranching& w);
// 2-chain of the regions oriented by b.
std::vector<Int> region_chain(const Triangulation& T, const Skeleton& S, const Branching& b,
                              const std::vector<int>& eps);

// Coordinates of a 1-cycle in C1 / im d2 (torsion parts reduced).
struct ClassCoords {
    std::vector<Int> coords;
    std::vector<Int> moduli;  // 0 for free coordinates
    bool is_zero() const;
    bool operator==(const ClassCoords&) const = default;
};

struct OmegaClass {
    ClassCoords cls;
    bool mod2_zero = false;
    bool even = false;
    std::vector<Int> alpha;  // 1-cycle with 2[alpha] = [w]
    ClassCoords alpha_cls;
};

struct H1Coordinates {
    SpineComplex C;
    SmithForm s2;
    ClassCoords coords(const std::vector<Int>& cycle) const;
};
H1Coordinates h1_coordinates(const Triangulation& T, const Skeleton& S);

OmegaClass omega_class(const Triangulation& T, const Skeleton& S, const PreBranching& w);
OmegaClass omega_class(const Triangulation& T, const PreBranching& w);

// Throws Error("NotFound") when no branching has omega_b = w.
Branching branching_from_prebranching(const Triangulation& T, const Skeleton& S, const PreBranching& w);

// Signed 3-chain and its boundary on b-oriented face classes.
struct FundamentalCycle {
    std::vector<int> coeff;
    std::vector<int> boundary;  // per face class; all zero for a cycle
    bool closed() const;
};
FundamentalCycle fundamental_cycle(const Triangulation& T, const Skeleton& S, const Branching& b);

// ---- boundary bicoloring ----

struct Region {
    int color = 0;  // 0 white, 1 black
    int component = -1;  // boundary component
    int euler = 0;
    int boundary_curves = 0;
};

struct Bicoloring {
    // per link triangle 4*tet+v: 0 White, 1 Black, 2 split (rank 1), 3 split (rank 2)
    std::vector<int> tile;
    int chi_white = 0, chi_black = 0;
    int x_components = 0;
    std::vector<Region> regions;
    // region adjacency along X: (white region, black region) per curve
    std::vector<std::pair<int, int>> curves;
    std::string fingerprint() const;
};

// A corner at the end v of edge vw is black iff the edge points into v.
Bicoloring bicoloring(const Triangulation& T, const Skeleton& S, const Branching& b);

// ---- boundary branching ----

// label[4*tet+v][w] in {0,1,2}: position of the corner toward w in the
// 2D branching of the link triangle of v. Needs an orientation.
struct BoundaryBranching {
    std::vector<std::array<int, 4>> label;
    std::string fingerprint(const Triangulation& T) const;
};
BoundaryBranching boundary_branching(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                                     const std::vector<int>& eps);

// ---- Euler cochain ----

// d(R) = 1 - t(R); t(R) is half the number of corners of R where exactly
// one of the two adjacent spine edges has R as its maw region.
struct EulerCochain {
    std::vector<int> d;
    int sum() const;
};
EulerCochain euler_cochain(const Triangulation& T, const Skeleton& S, const Branching& b);

// ---- transverse measures ----

// Unknowns z(e) per edge class; per face class with b-order u0<u1<u2 the
// switch z(u0u2) = z(u0u1) + z(u1u2) (u0u2 is dual to the maw region).
struct MeasureCone {
    RatMatrix switches;
    std::vector<std::vector<Rat>> basis;
    int dim = 0;
    bool positive = false;  // a strictly positive solution exists
    std::vector<Rat> positive_witness;
};
MeasureCone measure_cone(const Triangulation& T, const Skeleton& S, const Branching& b);
bool satisfies_switches(const MeasureCone& M, const std::vector<Rat>& z);

}  // namespace btw
