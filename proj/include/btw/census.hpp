#pragma once
#include "btw/triangulation.hpp"

namespace btw {

// Two-tetrahedron cusped census manifolds.
Triangulation census_m003();  // figure-eight sister
Triangulation census_m004();  // figure-eight knot complement

// One tetrahedron: face 0 glued to face p[0] by p, the first remaining
// face r to q[r] by q. Not validated.
Triangulation one_tet(Perm4 p, Perm4 q);

}  // namespace btw
