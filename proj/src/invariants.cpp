#include "btw/invariants.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "union_find.hpp"

namespace btw {

using detail::UnionFind;

namespace {

bool is_rep(const FaceClass& F, int t, int f) { return F.tet == t && F.face == f; }

// Orientation of region e relative to the walk of its class, for branching b.
int region_sign(const Skeleton& S, const Branching& b, const std::vector<int>& eps, int e) {
    const LinkStep& st = S.edges[e].link[0];
    return b.dir[e] * -eps[st.tet] * sequence_sign(st.a, st.b, st.d, st.c);
}

std::array<int, 4> order_of(const TetLabels& rank, int t) {
    std::array<int, 4> ord{};
    for (int v = 0; v < 4; ++v) ord[rank[t][v]] = v;
    return ord;
}

}  // namespace

SpineComplex spine_complex(const Triangulation& T, const Skeleton& S) {
    SpineComplex C;
    C.n0 = T.size();
    C.n1 = static_cast<int>(S.faces.size());
    C.n2 = static_cast<int>(S.edges.size());
    C.d1 = IntMatrix(C.n0, C.n1);
    C.d2 = IntMatrix(C.n1, C.n2);
    for (int k = 0; k < C.n1; ++k) {
        C.d1(S.faces[k].tet, k) += 1;
        C.d1(S.faces[k].tet2, k) -= 1;
    }
    for (int e = 0; e < C.n2; ++e)
        for (const auto& st : S.edges[e].link) {
            const Gluing& g = T.adj(st.tet, st.c);
            int F = S.face_of[st.tet][st.c];
            C.d2(F, e) += is_rep(S.faces[F], g.tet, g.perm[st.c]) ? 1 : -1;
        }
    return C;
}

SpineComplex spine_complex(const Triangulation& T, const Skeleton& S, const PreBranching* w,
                           const Branching* b, const std::vector<int>* eps) {
    SpineComplex C = spine_complex(T, S);
    if (w)
        for (int k = 0; k < C.n1; ++k)
            if (w->side[k] < 0) {
                for (int i = 0; i < C.n0; ++i) C.d1(i, k) = -C.d1(i, k);
                for (int j = 0; j < C.n2; ++j) C.d2(k, j) = -C.d2(k, j);
            }
    if (b && eps)
        for (int e = 0; e < C.n2; ++e)
            if (region_sign(S, *b, *eps, e) < 0)
                for (int i = 0; i < C.n1; ++i) C.d2(i, e) = -C.d2(i, e);
    return C;
}

std::string Group::str() const {
    std::ostringstream os;
    bool first = true;
    if (rank > 0) {
        os << "Z";
        if (rank > 1) os << "^" << rank;
        first = false;
    }
    for (const auto& t : torsion) {
        os << (first ? "" : "+") << "Z/" << t;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

Homology homology(const SpineComplex& C, int coefficients) {
    Homology H;
    H.coefficients = coefficients;
    if (coefficients == 2) {
        int r1 = rank_mod2(C.d1), r2 = rank_mod2(C.d2);
        H.h0.rank = C.n0 - r1;
        H.h1.rank = C.n1 - r1 - r2;
        H.h2.rank = C.n2 - r2;
        return H;
    }
    SmithForm s1 = smith(C.d1), s2 = smith(C.d2);
    H.h0.rank = C.n0 - s1.rank();
    for (const auto& d : s1.diag)
        if (d > 1) H.h0.torsion.push_back(d);
    H.h1.rank = C.n1 - s1.rank() - s2.rank();
    for (const auto& d : s2.diag)
        if (d > 1) H.h1.torsion.push_back(d);
    H.h2.rank = C.n2 - s2.rank();
    return H;
}

std::vector<Int> omega_chain(const Skeleton& S, const PreBranching& w) {
    std::vector<Int> c(S.faces.size());
    for (std::size_t k = 0; k < S.faces.size(); ++k) c[k] = w.side[k];
    return c;
}

std::vector<Int> region_chain(const Triangulation& T, const Skeleton& S, const Branching& b,
                              const std::vector<int>& eps) {
    (void)T;
    std::vector<Int> c(S.edges.size());
    for (std::size_t e = 0; e < S.edges.size(); ++e) c[e] = region_sign(S, b, eps, static_cast<int>(e));
    return c;
}

bool ClassCoords::is_zero() const {
    for (const auto& c : coords)
        if (c != 0) return false;
    return true;
}

H1Coordinates h1_coordinates(const Triangulation& T, const Skeleton& S) {
    H1Coordinates H;
    H.C = spine_complex(T, S);
    H.s2 = smith(H.C.d2);
    return H;
}

ClassCoords H1Coordinates::coords(const std::vector<Int>& cycle) const {
    std::vector<Int> c = s2.P.apply(cycle);
    ClassCoords out;
    for (int i = 0; i < C.n1; ++i) {
        if (i < s2.rank()) {
            const Int& d = s2.diag[i];
            if (d == 1) continue;
            Int r = c[i] % d;
            if (r < 0) r += d;
            out.coords.push_back(r);
            out.moduli.push_back(d);
        } else {
            out.coords.push_back(c[i]);
            out.moduli.push_back(0);
        }
    }
    return out;
}

OmegaClass omega_class(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    H1Coordinates H = h1_coordinates(T, S);
    OmegaClass R;
    std::vector<Int> om = omega_chain(S, w);
    R.cls = H.coords(om);
    std::vector<int> bits(om.size());
    for (std::size_t k = 0; k < om.size(); ++k) bits[k] = 1;
    R.mod2_zero = solve_mod2(H.C.d2, bits).has_value();

    // 2 alpha + d2 x = w with d1 alpha = 0
    const int n1 = H.C.n1, n2 = H.C.n2, n0 = H.C.n0;
    IntMatrix A(n1 + n0, n1 + n2);
    for (int i = 0; i < n1; ++i) {
        A(i, i) = 2;
        for (int j = 0; j < n2; ++j) A(i, n1 + j) = H.C.d2(i, j);
    }
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) A(n1 + i, j) = H.C.d1(i, j);
    std::vector<Int> rhs(om);
    rhs.resize(static_cast<std::size_t>(n1 + n0));
    SmithForm SA = smith(A);
    if (auto sol = solve_integer(SA, A, rhs)) {
        R.even = true;
        R.alpha.assign(sol->begin(), sol->begin() + n1);
        R.alpha_cls = H.coords(R.alpha);
    }
    return R;
}

OmegaClass omega_class(const Triangulation& T, const PreBranching& w) { return omega_class(T, skeleta(T), w); }

Branching branching_from_prebranching(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    auto O = orientation(T);
    if (!O.orientable) throw Error("NotOrientable", "branching reconstruction needs an orientation");
    for (auto& e : S.edges)
        if (!e.consistent) throw Error("NotFound", "an edge class is orientation-inconsistent");
    SpineComplex C = spine_complex(T, S);
    SmithForm s2 = smith(C.d2);
    std::vector<Int> om = omega_chain(S, w);
    auto beta0 = solve_integer(s2, C.d2, om);
    if (!beta0) throw Error("NotFound", "w is not a boundary");
    auto K = kernel_basis(s2, C.d2);
    // all-odd solution: beta0 + K y = 1 mod 2
    IntMatrix KM(C.n2, static_cast<int>(K.size()));
    std::vector<int> rhs(C.n2);
    for (int i = 0; i < C.n2; ++i) {
        for (std::size_t j = 0; j < K.size(); ++j) KM(i, static_cast<int>(j)) = K[j][i];
        Int r = (*beta0)[i] % 2;
        rhs[i] = r == 0 ? 1 : 0;
    }
    auto y = solve_mod2(KM, rhs);
    if (!y) throw Error("NotFound", "parity obstruction: no solution with all coefficients odd");
    std::vector<Int> beta = *beta0;
    for (std::size_t j = 0; j < K.size(); ++j)
        if ((*y)[j])
            for (int i = 0; i < C.n2; ++i) beta[i] += K[j][i];

    auto matches = [&](const Branching& b) {
        return is_branching(T, S, b) && induced_prebranching(T, S, b, O.eps) == w;
    };
    Branching b;
    b.dir.resize(S.edges.size());
    for (int e = 0; e < C.n2; ++e) {
        const LinkStep& st = S.edges[e].link[0];
        int f = -O.eps[st.tet] * sequence_sign(st.a, st.b, st.d, st.c);
        b.dir[e] = (beta[e] > 0 ? 1 : -1) * f;
    }
    if (matches(b)) return b;
    for (const auto& c : enumerate_branchings(T, S))
        if (matches(c)) return c;
    throw Error("NotFound", "no branching induces w");
}

bool FundamentalCycle::closed() const {
    return std::all_of(boundary.begin(), boundary.end(), [](int x) { return x == 0; });
}

FundamentalCycle fundamental_cycle(const Triangulation& T, const Skeleton& S, const Branching& b) {
    auto eps = orient(T);
    FundamentalCycle Z;
    Z.coeff = tet_signs(T, S, b, eps);
    Z.boundary.assign(S.faces.size(), 0);
    TetLabels rank = vertex_ranks(T, S, b);
    for (int t = 0; t < T.size(); ++t)
        for (int f = 0; f < 4; ++f) Z.boundary[S.face_of[t][f]] += Z.coeff[t] * (rank[t][f] % 2 ? -1 : 1);
    return Z;
}

// ---- bicoloring ----

Bicoloring bicoloring(const Triangulation& T, const Skeleton& S, const Branching& b) {
    const int n = T.size();
    TetLabels rank = vertex_ranks(T, S, b);
    BoundarySurface B = boundary_surface(T);
    Bicoloring R;
    R.tile.assign(4 * n, 0);
    auto black = [&](int t, int v, int w) { return rank[t][w] < rank[t][v]; };

    // sides (t, v, k): side of link triangle (t,v) on face k
    auto sid = [](int t, int v, int k) { return 16 * t + 4 * v + k; };
    UnionFind side(16 * n);
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v)
            for (int k = 0; k < 4; ++k) {
                if (k == v) continue;
                const Gluing& g = T.adj(t, k);
                side.unite(sid(t, v, k), sid(g.tet, g.perm[v], g.perm[k]));
            }
    auto ends = [](int v, int k) { return complement_pair(v, k); };

    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) {
            int r = rank[t][v];
            R.tile[4 * t + v] = r == 0 ? 0 : r == 3 ? 1 : r + 1;
        }

    // pieces: 2*x white part, 2*x+1 black part of link triangle x
    UnionFind piece(8 * n);
    auto has = [&](int x, int col) {
        int tl = R.tile[x];
        return tl >= 2 || tl == col;
    };
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v)
            for (int k = 0; k < 4; ++k) {
                if (k == v) continue;
                const Gluing& g = T.adj(t, k);
                auto e = ends(v, k);
                bool b0 = black(t, v, e[0]), b1 = black(t, v, e[1]);
                int x = 4 * t + v, y = 4 * g.tet + g.perm[v];
                if (!b0 || !b1) piece.unite(2 * x, 2 * y);
                if (b0 || b1) piece.unite(2 * x + 1, 2 * y + 1);
            }
    std::map<int, int> region_of_root;
    auto region = [&](int x, int col) {
        int r = piece.find(2 * x + col);
        auto it = region_of_root.find(r);
        if (it != region_of_root.end()) return it->second;
        int id = static_cast<int>(R.regions.size());
        region_of_root[r] = id;
        Region g;
        g.color = col;
        g.component = B.component_of[x];
        R.regions.push_back(g);
        return id;
    };
    for (int x = 0; x < 4 * n; ++x)
        for (int col : {0, 1})
            if (has(x, col)) region(x, col);

    // cells, each counted once through its first occurrence
    std::set<int> seen_corner, seen_side;
    UnionFind xcurve(16 * n);
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) {
            int x = 4 * t + v;
            for (int col : {0, 1})
                if (has(x, col)) R.regions[region(x, col)].euler += 1;
            for (int w = 0; w < 4; ++w) {
                if (w == v) continue;
                if (!seen_corner.insert(B.corner[x][w]).second) continue;
                R.regions[region(x, black(t, v, w) ? 1 : 0)].euler += 1;
            }
            std::vector<int> split;
            for (int k = 0; k < 4; ++k) {
                if (k == v) continue;
                auto e = ends(v, k);
                bool b0 = black(t, v, e[0]), b1 = black(t, v, e[1]);
                if (b0 != b1) split.push_back(side.find(sid(t, v, k)));
                if (!seen_side.insert(side.find(sid(t, v, k))).second) continue;
                // a split side adds its midpoint and one half edge to each closure
                if (b0 == b1) R.regions[region(x, b0 ? 1 : 0)].euler -= 1;
            }
            if (split.size() == 2) {
                xcurve.unite(split[0], split[1]);
                // the arc lies in both closures
                for (int col : {0, 1}) R.regions[region(x, col)].euler -= 1;
            }
        }

    // X components and their adjacent regions
    std::map<int, int> curve_of_root;
    std::map<int, std::pair<int, int>> curve_regions;
    for (int x = 0; x < 4 * n; ++x) {
        if (R.tile[x] < 2) continue;
        int t = x / 4, v = x % 4;
        for (int k = 0; k < 4; ++k) {
            if (k == v) continue;
            auto e = ends(v, k);
            if (black(t, v, e[0]) == black(t, v, e[1])) continue;
            int r = xcurve.find(side.find(sid(t, v, k)));
            if (!curve_of_root.count(r)) {
                curve_of_root[r] = static_cast<int>(curve_of_root.size());
                curve_regions[r] = {region(x, 0), region(x, 1)};
            }
            break;
        }
    }
    R.x_components = static_cast<int>(curve_of_root.size());
    for (auto& [r, wb] : curve_regions) {
        R.curves.push_back(wb);
        R.regions[wb.first].boundary_curves++;
        R.regions[wb.second].boundary_curves++;
    }
    for (const auto& g : R.regions) (g.color ? R.chi_black : R.chi_white) += g.euler;
    return R;
}

std::string Bicoloring::fingerprint() const {
    const int N = static_cast<int>(regions.size());
    std::vector<std::string> lab(N);
    for (int i = 0; i < N; ++i) {
        std::ostringstream os;
        os << (regions[i].color ? 'B' : 'W') << regions[i].euler << '/' << regions[i].boundary_curves;
        lab[i] = os.str();
    }
    std::vector<std::vector<int>> nb(N);
    for (auto [w, b] : curves) {
        nb[w].push_back(b);
        nb[b].push_back(w);
    }
    for (int round = 0; round < 3; ++round) {
        std::vector<std::string> next(N);
        for (int i = 0; i < N; ++i) {
            std::vector<std::string> s;
            for (int j : nb[i]) s.push_back(lab[j]);
            std::sort(s.begin(), s.end());
            std::string h = lab[i] + "(";
            for (auto& x : s) h += x + ",";
            next[i] = std::to_string(std::hash<std::string>{}(h + ")"));
        }
        lab = std::move(next);
    }
    std::map<int, std::vector<std::string>> per_comp;
    for (int i = 0; i < N; ++i) per_comp[regions[i].component].push_back(lab[i]);
    std::vector<std::string> comps;
    for (auto& [c, v] : per_comp) {
        std::sort(v.begin(), v.end());
        std::string s;
        for (auto& x : v) s += x + ";";
        comps.push_back(s);
    }
    std::sort(comps.begin(), comps.end());
    std::ostringstream os;
    os << "w" << chi_white << "b" << chi_black << "x" << x_components << ":";
    for (auto& c : comps) os << '[' << c << ']';
    return os.str();
}

// ---- boundary branching ----

BoundaryBranching boundary_branching(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                                     const std::vector<int>& eps) {
    const int n = T.size();
    BoundaryBranching R;
    R.label.assign(4 * n, {-1, -1, -1, -1});
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) {
            int ins = 0;
            for (int k = 0; k < 4; ++k)
                if (k != v && points_in(S, w, t, k)) ++ins;
            // the side whose co-orientation differs from the other two is opposite the middle corner
            int mid = -1;
            for (int k = 0; k < 4; ++k)
                if (k != v && points_in(S, w, t, k) == (ins == 1)) mid = k;
            auto xy = complement_pair(v, mid);
            int x = xy[0], y = xy[1];
            bool pos = -eps[t] * sequence_sign(v, x, mid, y) > 0;
            bool want = ins == 2;
            auto& L = R.label[4 * t + v];
            L[mid] = 1;
            L[x] = pos == want ? 0 : 2;
            L[y] = 2 - L[x];
        }
    return R;
}

std::string BoundaryBranching::fingerprint(const Triangulation& T) const {
    BoundarySurface B = boundary_surface(T);
    std::vector<int> middle(B.n_corners, 0);
    for (int x = 0; x < 4 * T.size(); ++x)
        for (int w = 0; w < 4; ++w)
            if (w != x % 4 && label[x][w] == 1) middle[B.corner[x][w]]++;
    // index of a boundary vertex, doubled: 2 - (#corners where it is the middle one)
    std::vector<int> comp_of_corner(B.n_corners, -1);
    for (int x = 0; x < 4 * T.size(); ++x)
        for (int w = 0; w < 4; ++w)
            if (w != x % 4) comp_of_corner[B.corner[x][w]] = B.component_of[x];
    std::map<int, std::vector<int>> per;
    for (int c = 0; c < B.n_corners; ++c) {
        int idx = 2 - middle[c];
        per[comp_of_corner[c]];
        if (idx != 0) per[comp_of_corner[c]].push_back(idx);
    }
    std::vector<std::string> comps;
    for (auto& [c, v] : per) {
        std::sort(v.begin(), v.end());
        std::string s = "[";
        for (int i : v) s += std::to_string(i) + ",";
        comps.push_back(s + "]");
    }
    std::sort(comps.begin(), comps.end());
    std::string out;
    for (auto& s : comps) out += s;
    return out;
}

// ---- Euler cochain ----

int EulerCochain::sum() const {
    int s = 0;
    for (int x : d) s += x;
    return s;
}

EulerCochain euler_cochain(const Triangulation& T, const Skeleton& S, const Branching& b) {
    if (!orientation(T).orientable) throw Error("NotOrientable", "Euler cochain needs an orientation");
    TetLabels rank = vertex_ranks(T, S, b);
    std::vector<int> switches(S.edges.size(), 0);
    for (int t = 0; t < T.size(); ++t) {
        auto o = order_of(rank, t);
        // the maw status flips only at the corners of the regions dual to 02 and 13
        switches[S.edge_of[t][edge_index(o[0], o[2])]]++;
        switches[S.edge_of[t][edge_index(o[1], o[3])]]++;
    }
    EulerCochain E;
    for (int s : switches) {
        if (s % 2) throw Error("InvalidBranching", "odd switch count on a region");
        E.d.push_back(1 - s / 2);
    }
    return E;
}

// ---- transverse measures ----

MeasureCone measure_cone(const Triangulation& T, const Skeleton& S, const Branching& b) {
    TetLabels rank = vertex_ranks(T, S, b);
    const int F = static_cast<int>(S.faces.size()), E = static_cast<int>(S.edges.size());
    MeasureCone M;
    M.switches = RatMatrix(F, E);
    for (int k = 0; k < F; ++k) {
        int t = S.faces[k].tet, f = S.faces[k].face;
        std::array<int, 3> u{};
        for (int v = 0; v < 4; ++v)
            if (v != f) u[rank[t][v] - (rank[t][v] > rank[t][f] ? 1 : 0)] = v;
        M.switches(k, S.edge_of[t][edge_index(u[0], u[2])]) += 1;
        M.switches(k, S.edge_of[t][edge_index(u[0], u[1])]) -= 1;
        M.switches(k, S.edge_of[t][edge_index(u[1], u[2])]) -= 1;
    }
    M.basis = nullspace(M.switches);
    M.dim = static_cast<int>(M.basis.size());
    if (auto z = feasible_point(M.switches, std::vector<Rat>(F), std::vector<Rat>(E, Rat(1)))) {
        M.positive = true;
        M.positive_witness = *z;
    }
    (void)T;
    return M;
}

bool satisfies_switches(const MeasureCone& M, const std::vector<Rat>& z) {
    for (int i = 0; i < M.switches.rows; ++i) {
        Rat s = 0;
        for (int j = 0; j < M.switches.cols; ++j) s += M.switches(i, j) * z[j];
        if (s != 0) return false;
    }
    return true;
}

}  // namespace btw
