#include "btw/census.hpp"

#include "btw/io.hpp"

namespace btw {

Triangulation census_m003() {
    return parse_census(
        "1 0123 1 0231 1 3210 1 2013\n"
        "0 0123 0 3210 0 0312 0 1203\n",
        "m003");
}

Triangulation census_m004() {
    return parse_census(
        "1 0123 1 1203 1 1032 1 3021\n"
        "0 0123 0 1320 0 2013 0 1032\n",
        "m004");
}

Triangulation one_tet(Perm4 p, Perm4 q) {
    Triangulation T;
    T.gluings.resize(1);
    T.gluings[0][0] = {0, p};
    T.gluings[0][p[0]] = {0, p.inverse()};
    int r = 1;
    while (r == p[0]) ++r;
    T.gluings[0][r] = {0, q};
    T.gluings[0][q[r]] = {0, q.inverse()};
    return T;
}

}  // namespace btw
