#include "btw/moves.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace btw {

namespace {

using Names = std::array<int, 4>;
constexpr Names kUnnamed{-1, -1, -1, -1};

[[noreturn]] void invalid(const std::string& why) { throw Error("InvalidSite", why); }

std::array<int, 3> others(int f) {
    std::array<int, 3> o{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
        if (v != f) o[static_cast<std::size_t>(k++)] = v;
    return o;
}

int local_of(const Names& nm, int n) {
    for (int v = 0; v < 4; ++v)
        if (nm[v] == n) return v;
    throw Error("InvalidSite", "name missing from tetrahedron");
}

Perm4 make_perm(const std::array<int, 4>& img) {
    Perm4 p(img[0], img[1], img[2], img[3]);
    if (!p.valid()) invalid("rewrite produced a non-bijective gluing");
    return p;
}

struct Slot {
    int tet = -1, face = -1;
    Names name = kUnnamed;
};

// Cut-and-paste of a ball: removed tets go away, created tets carry vertex
// names, and each created face is either glued to another created face or
// attached to a slot (a face of T on the boundary of the ball).
class Builder {
public:
    Builder(const Triangulation& T, const std::vector<int>& removed) : T_(T), removed_(T.size(), false) {
        for (int t : removed) {
            if (t < 0 || t >= T.size()) invalid("tetrahedron out of range");
            if (removed_[t]) invalid("tetrahedra of the site are not distinct");
            removed_[t] = true;
        }
    }

    int add(const Names& nm) {
        names_.push_back(nm);
        return static_cast<int>(names_.size()) - 1;
    }
    void name_removed(int t, const Names& nm) { removed_names_.push_back({t, nm}); }
    void name_side(int t, const Names& nm) { side_names_.push_back({t, nm}); }

    void attach(int k, int f, const Slot& s) { attach_.push_back({k, f, s}); }
    void glue(int k1, int f1, int k2, int f2) { glue_.push_back({k1, f1, k2, f2}); }
    // Glue the face of k1 opposite name n1 to the face of k2 opposite n2.
    void glue_opposite(int k1, int n1, int k2, int n2) {
        glue(k1, local_of(names_[k1], n1), k2, local_of(names_[k2], n2));
    }
    void join(const Slot& a, const Slot& b) { join_.push_back({a, b}); }

    MoveResult finish(const std::function<Move(const MoveResult&)>& inverse) {
        MoveResult R;
        const int n = T_.size();
        R.new_of_old.assign(n, -1);
        int base = 0;
        for (int t = 0; t < n; ++t)
            if (!removed_[t]) {
                R.new_of_old[t] = base++;
                R.old_of_new.push_back(t);
            }
        const int total = base + static_cast<int>(names_.size());
        R.old_of_new.resize(total, -1);
        R.T.name = T_.name;
        R.T.gluings.assign(total, {});
        R.new_names.assign(total, kUnnamed);
        for (std::size_t k = 0; k < names_.size(); ++k) R.new_names[base + k] = names_[k];

        for (int t = 0; t < n; ++t) {
            if (removed_[t]) continue;
            for (int f = 0; f < 4; ++f) {
                const Gluing& g = T_.adj(t, f);
                if (!removed_[g.tet]) R.T.gluings[R.new_of_old[t]][f] = {R.new_of_old[g.tet], g.perm};
            }
        }

        auto set = [&](int t, int f, int u, const Perm4& p) {
            R.T.gluings[t][f] = {u, p};
            R.T.gluings[u][p[f]] = {t, p.inverse()};
        };

        std::map<std::pair<int, int>, std::size_t> used;
        for (std::size_t i = 0; i < attach_.size(); ++i) {
            auto key = std::make_pair(attach_[i].s.tet, attach_[i].s.face);
            if (!used.emplace(key, i).second) invalid("a boundary face is used twice");
        }

        for (const auto& a : attach_) {
            const int K = base + a.k;
            const Names& nm = names_[a.k];
            std::array<int, 4> img{};
            int target;
            if (!removed_[a.s.tet]) {
                target = R.new_of_old[a.s.tet];
                for (int v = 0; v < 4; ++v) img[v] = v == a.f ? a.s.face : local_of(a.s.name, nm[v]);
            } else {
                const Gluing& g = T_.adj(a.s.tet, a.s.face);
                if (!removed_[g.tet]) {
                    target = R.new_of_old[g.tet];
                    for (int v = 0; v < 4; ++v)
                        img[v] = v == a.f ? g.perm[a.s.face] : g.perm[local_of(a.s.name, nm[v])];
                } else {
                    auto it = used.find({g.tet, g.perm[a.s.face]});
                    if (it == used.end()) invalid("boundary face glued to a removed face with no replacement");
                    const auto& b = attach_[it->second];
                    target = base + b.k;
                    for (int v = 0; v < 4; ++v) {
                        if (v == a.f) {
                            img[v] = b.f;
                            continue;
                        }
                        int n2 = b.s.name[g.perm[local_of(a.s.name, nm[v])]];
                        img[v] = local_of(names_[b.k], n2);
                    }
                }
            }
            set(K, a.f, target, make_perm(img));
        }

        for (const auto& g : glue_) {
            std::array<int, 4> img{};
            for (int v = 0; v < 4; ++v)
                img[v] = v == g[1] ? g[3] : local_of(names_[g[2]], names_[g[0]][v]);
            set(base + g[0], g[1], base + g[2], make_perm(img));
        }

        for (const auto& [a, b] : join_) {
            const Gluing& ga = T_.adj(a.tet, a.face);
            const Gluing& gb = T_.adj(b.tet, b.face);
            if (removed_[ga.tet] || removed_[gb.tet]) invalid("outer faces of the region are glued to each other");
            const int fa = ga.perm[a.face], fb = gb.perm[b.face];
            const Perm4 ia = ga.perm.inverse();
            std::array<int, 4> img{};
            for (int x = 0; x < 4; ++x)
                img[x] = x == fa ? fb : gb.perm[local_of(b.name, a.name[ia[x]])];
            set(R.new_of_old[ga.tet], fa, R.new_of_old[gb.tet], make_perm(img));
        }

        if (!check_gluings(R.T).empty()) invalid("rewrite produced an invalid gluing table");
        R.removed_names = removed_names_;
        R.side_names = side_names_;
        R.inverse = inverse(R);
        return R;
    }

private:
    struct Attach {
        int k, f;
        Slot s;
    };
    const Triangulation& T_;
    std::vector<bool> removed_;
    std::vector<Names> names_;
    std::vector<std::pair<int, Names>> removed_names_, side_names_;
    std::vector<Attach> attach_;
    std::vector<std::array<int, 4>> glue_;
    std::vector<std::pair<Slot, Slot>> join_;
};

void need(const Move& m, std::size_t n, int ntets) {
    if (m.site.size() != n) invalid("wrong number of site coordinates for " + to_string(m.kind));
    if (m.site[0] < 0 || m.site[0] >= ntets) invalid("tetrahedron out of range");
    for (std::size_t i = 1; i < n; ++i)
        if (m.site[i] < 0) invalid("negative site coordinate");
}

void need_vertex(int v) {
    if (v < 0 || v > 3) invalid("local vertex out of range");
}

std::vector<LinkStep> site_walk(const Triangulation& T, const Skeleton& S, int t, int a, int b) {
    need_vertex(a);
    need_vertex(b);
    if (a == b) invalid("degenerate edge");
    const EdgeClass& ec = S.edges[S.edge_of[t][edge_index(a, b)]];
    if (!ec.consistent) invalid("edge class is glued to itself with reversed orientation");
    auto cd = complement_pair(a, b);
    return edge_walk(T, {t, a, b, cd[0], cd[1]});
}


// Names: A,B,C = 0,1,2 on the common face, v1 = 3, v2 = 4.
MoveResult apply_23(const Triangulation& T, const Move& m) {
    need(m, 2, T.size());
    const int t1 = m.site[0], f0 = m.site[1];
    need_vertex(f0);
    const Gluing& g = T.adj(t1, f0);
    const int t2 = g.tet;
    if (t2 == t1) invalid("the face bounds a single tetrahedron");
    Names n1{}, n2{};
    auto o = others(f0);
    for (int k = 0; k < 3; ++k) n1[o[k]] = k;
    n1[f0] = 3;
    for (int v = 0; v < 4; ++v) n2[g.perm[v]] = v == f0 ? 4 : n1[v];

    Builder B(T, {t1, t2});
    B.name_removed(t1, n1);
    B.name_removed(t2, n2);
    std::array<int, 3> sig{};
    for (int k = 0; k < 3; ++k) {
        int x = k == 0 ? 1 : 0, y = k == 2 ? 1 : 2;
        sig[k] = B.add({x, y, 3, 4});
        B.attach(sig[k], 3, {t1, local_of(n1, k), n1});
        B.attach(sig[k], 2, {t2, local_of(n2, k), n2});
    }
    for (int k = 0; k < 3; ++k)
        for (int x = k + 1; x < 3; ++x) B.glue_opposite(sig[k], x, sig[x], k);
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M32, {R.T.size() - 3, 2, 3}}; });
}

// Names: X_k = 0,1,2 around the edge, P = 3, Q = 4 its ends.
MoveResult apply_32(const Triangulation& T, const Skeleton& S, const Move& m) {
    need(m, 3, T.size());
    auto w = site_walk(T, S, m.site[0], m.site[1], m.site[2]);
    if (w.size() != 3) invalid("edge does not have valence 3");
    std::vector<int> tets{w[0].tet, w[1].tet, w[2].tet};
    Builder B(T, tets);
    std::array<Names, 3> nm{};
    for (int k = 0; k < 3; ++k) {
        nm[k][w[k].a] = 3;
        nm[k][w[k].b] = 4;
        nm[k][w[k].c] = k;
        nm[k][w[k].d] = (k + 1) % 3;
        B.name_removed(w[k].tet, nm[k]);
    }
    int tp = B.add({0, 1, 2, 3}), tq = B.add({0, 1, 2, 4});
    for (int k = 0; k < 3; ++k) {
        int j = (k + 1) % 3;
        B.attach(tp, k, {w[j].tet, w[j].b, nm[j]});
        B.attach(tq, k, {w[j].tet, w[j].a, nm[j]});
    }
    B.glue(tp, 3, tq, 3);
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M23, {R.T.size() - 2, 3}}; });
}

// Names: U,V = 0,1 on the common edge, W1 = 2, W2 = 3.
MoveResult apply_02q(const Triangulation& T, const Skeleton& S, const Move& m) {
    need(m, 5, T.size());
    auto w = site_walk(T, S, m.site[0], m.site[1], m.site[2]);
    const int n = static_cast<int>(w.size()), i = m.site[3], j = m.site[4];
    if (!(i < j && j < n)) invalid("need 0 <= i < j < valence");
    auto face_class = [&](int k) { return S.face_of[w[k].tet][w[k].c]; };
    if (face_class(i) == face_class(j)) invalid("the two faces are the same face class");
    const LinkStep &si = w[i], &sj = w[j], &si1 = w[(i + 1) % n], &sj1 = w[(j + 1) % n];
    auto names = [](const LinkStep& s, int third_local, int third_name) {
        Names nm = kUnnamed;
        nm[s.a] = 0;
        nm[s.b] = 1;
        nm[third_local] = third_name;
        return nm;
    };
    Names a1 = names(si, si.d, 2), b1 = names(si1, si1.c, 2);
    Names a2 = names(sj, sj.d, 3), b2 = names(sj1, sj1.c, 3);
    Builder B(T, {});
    B.name_side(si.tet, a1);
    B.name_side(si1.tet, b1);
    B.name_side(sj.tet, a2);
    B.name_side(sj1.tet, b2);
    int x = B.add({0, 1, 2, 3}), y = B.add({0, 1, 2, 3});
    B.attach(x, 3, {si1.tet, si1.d, b1});
    B.attach(x, 2, {sj.tet, sj.c, a2});
    B.attach(y, 3, {si.tet, si.c, a1});
    B.attach(y, 2, {sj1.tet, sj1.d, b2});
    B.glue(x, 0, y, 0);
    B.glue(x, 1, y, 1);
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M20Q, {R.T.size() - 2, 2, 3}}; });
}

MoveResult apply_20q(const Triangulation& T, const Skeleton& S, const Move& m) {
    need(m, 3, T.size());
    auto w = site_walk(T, S, m.site[0], m.site[1], m.site[2]);
    if (w.size() != 2) invalid("edge does not have valence 2");
    const LinkStep &sx = w[0], &sy = w[1];
    if (sx.tet == sy.tet) invalid("pillow tetrahedra coincide");
    Names nx{}, ny{};
    nx[sx.a] = 2, nx[sx.b] = 3, nx[sx.c] = 0, nx[sx.d] = 1;
    ny[sy.a] = 2, ny[sy.b] = 3, ny[sy.c] = 1, ny[sy.d] = 0;
    for (auto [t, f] : {std::pair{sx.tet, sx.a}, {sx.tet, sx.b}, {sy.tet, sy.a}, {sy.tet, sy.b}}) {
        int u = T.adj(t, f).tet;
        if (u == sx.tet || u == sy.tet) invalid("outer faces of the pillow are glued to the pillow");
    }
    if (S.edge_of[sx.tet][edge_index(sx.c, sx.d)] == S.edge_of[sy.tet][edge_index(sy.c, sy.d)])
        invalid("the edges opposite the pillow edge coincide");
    Builder B(T, {sx.tet, sy.tet});
    B.name_removed(sx.tet, nx);
    B.name_removed(sy.tet, ny);
    B.join({sx.tet, sx.b, nx}, {sy.tet, sy.b, ny});
    B.join({sx.tet, sx.a, nx}, {sy.tet, sy.a, ny});
    const Gluing g1 = T.adj(sx.tet, sx.b), g2 = T.adj(sx.tet, sx.a);
    return B.finish([&](const MoveResult& R) {
        // the inverse cuts exactly the two rejoined faces at this edge
        const int o1 = R.new_of_old[g1.tet], o2 = R.new_of_old[g2.tet];
        const int u = g1.perm[sx.c], v = g1.perm[sx.d], fa = g1.perm[sx.b];
        const int u2 = g2.perm[sx.c], v2 = g2.perm[sx.d], fb = g2.perm[sx.a];
        const Gluing& h = R.T.adj(o2, fb);
        const int u3 = h.perm[u2], v3 = h.perm[v2], fc = h.perm[fb];
        auto cd = complement_pair(u, v);
        auto walk = edge_walk(R.T, {o1, u, v, cd[0], cd[1]});
        const int n = static_cast<int>(walk.size());
        int i = cd[0] == fa ? 0 : n - 1, j = -1;
        for (int k = 0; k < n; ++k) {
            const auto& st = walk[k];
            if ((st.tet == o2 && st.c == fb && st.a == u2 && st.b == v2) ||
                (st.tet == h.tet && st.c == fc && st.a == u3 && st.b == v3))
                j = k;
        }
        if (i > j) std::swap(i, j);
        return Move{MoveKind::M02Q, {o1, u, v, i, j}};
    });
}

// Names: the face is P,Q,R = 0,1,2; the new vertex N = 3.
MoveResult apply_02t(const Triangulation& T, const Move& m) {
    need(m, 2, T.size());
    const int t = m.site[0], f = m.site[1];
    need_vertex(f);
    const Gluing& g = T.adj(t, f);
    Names na = kUnnamed, nb = kUnnamed;
    auto o = others(f);
    for (int k = 0; k < 3; ++k) {
        na[o[k]] = k;
        nb[g.perm[o[k]]] = k;
    }
    Builder B(T, {});
    B.name_side(t, na);
    B.name_side(g.tet, nb);
    int x = B.add({0, 1, 2, 3}), y = B.add({0, 1, 2, 3});
    B.attach(x, 3, {t, f, na});
    B.attach(y, 3, {g.tet, g.perm[f], nb});
    for (int k = 0; k < 3; ++k) B.glue(x, k, y, k);
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M20T, {R.T.size() - 2, 3}}; });
}

MoveResult apply_20t(const Triangulation& T, const Move& m) {
    need(m, 2, T.size());
    const int x = m.site[0], v = m.site[1];
    need_vertex(v);
    Names nx{}, ny = kUnnamed;
    auto o = others(v);
    for (int k = 0; k < 3; ++k) nx[o[k]] = k;
    nx[v] = 3;
    int y = -1, wv = -1;
    for (int u : o) {
        const Gluing& g = T.adj(x, u);
        if (y < 0) y = g.tet, wv = g.perm[v];
        if (g.tet != y || g.tet == x || g.perm[v] != wv) invalid("not a pillow around an interior vertex");
        for (int q = 0; q < 4; ++q) {
            if (q == u) continue;
            int& slot = ny[g.perm[q]];
            if (slot >= 0 && slot != nx[q]) invalid("pillow faces are not glued in the standard pattern");
            slot = nx[q];
        }
    }
    if (std::count(ny.begin(), ny.end(), -1) != 0) invalid("pillow faces are not glued in the standard pattern");
    for (int q = 0; q < 4; ++q)
        if (q != wv) {
            const Gluing& g = T.adj(y, q);
            if (g.tet != x) invalid("not a pillow around an interior vertex");
        }
    for (auto [t, f] : {std::pair{x, v}, {y, wv}}) {
        int u = T.adj(t, f).tet;
        if (u == x || u == y) invalid("outer faces of the pillow are glued to the pillow");
    }
    Builder B(T, {x, y});
    B.name_removed(x, nx);
    B.name_removed(y, ny);
    B.join({x, v, nx}, {y, wv, ny});
    const Gluing ga = T.adj(x, v);
    return B.finish([&](const MoveResult& R) {
        return Move{MoveKind::M02T, {R.new_of_old[ga.tet], ga.perm[v]}};
    });
}

// Names: old vertices 0..3 as local labels, the new vertex N = 4.
MoveResult apply_14(const Triangulation& T, const Move& m) {
    need(m, 1, T.size());
    const int t = m.site[0];
    const Names id{0, 1, 2, 3};
    Builder B(T, {t});
    B.name_removed(t, id);
    std::array<int, 4> star{};
    for (int i = 0; i < 4; ++i) {
        Names nm = id;
        nm[i] = 4;
        star[i] = B.add(nm);
        B.attach(star[i], i, {t, i, id});
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) B.glue(star[i], j, star[j], i);
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M41, {R.T.size() - 4, 0}}; });
}

MoveResult apply_41(const Triangulation& T, const Move& m) {
    need(m, 2, T.size());
    const int t0 = m.site[0], v0 = m.site[1];
    need_vertex(v0);
    // star[i] is the tetrahedron missing outer name i
    std::array<int, 4> star{t0, -1, -1, -1};
    std::array<Names, 4> nm{};
    auto o = others(v0);
    nm[0][v0] = 4;
    for (int k = 0; k < 3; ++k) nm[0][o[k]] = k + 1;
    for (int u : o) {
        const Gluing& g = T.adj(t0, u);
        int j = nm[0][u];
        Names& nj = nm[j];
        nj = kUnnamed;
        for (int q = 0; q < 4; ++q)
            if (q != u) nj[g.perm[q]] = nm[0][q];
        nj[g.perm[u]] = 0;
        star[j] = g.tet;
    }
    std::set<int> distinct(star.begin(), star.end());
    if (distinct.size() != 4) invalid("vertex star is not four distinct tetrahedra");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            int f = local_of(nm[i], j);
            const Gluing& g = T.adj(star[i], f);
            if (g.tet != star[j]) invalid("vertex star is not a standard 1-4 pattern");
            for (int q = 0; q < 4; ++q)
                if (q != f && nm[j][g.perm[q]] != nm[i][q]) invalid("vertex star is not a standard 1-4 pattern");
        }
    Builder B(T, {star[0], star[1], star[2], star[3]});
    for (int i = 0; i < 4; ++i) B.name_removed(star[i], nm[i]);
    int k = B.add({0, 1, 2, 3});
    for (int i = 0; i < 4; ++i) B.attach(k, i, {star[i], local_of(nm[i], 4), nm[i]});
    return B.finish([](const MoveResult& R) { return Move{MoveKind::M14, {R.T.size() - 1}}; });
}

TetLabels labels_of(const Triangulation& T, const Skeleton& S, const Branching& b) {
    return vertex_ranks(T, S, b);
}
TetLabels labels_of(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    return in_bits(T, S, w);
}

}  // namespace

std::string to_string(MoveKind k) {
    switch (k) {
        case MoveKind::M23: return "M23";
        case MoveKind::M32: return "M32";
        case MoveKind::M02Q: return "M02Q";
        case MoveKind::M20Q: return "M20Q";
        case MoveKind::M02T: return "M02T";
        case MoveKind::M20T: return "M20T";
        case MoveKind::M14: return "M14";
        case MoveKind::M41: return "M41";
    }
    return "?";
}

MoveKind move_kind_from_string(const std::string& s) {
    for (auto k : {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q, MoveKind::M02T,
                   MoveKind::M20T, MoveKind::M14, MoveKind::M41})
        if (to_string(k) == s) return k;
    throw Error("ParseError", "unknown move kind '" + s + "'");
}

bool is_positive(MoveKind k) {
    return k == MoveKind::M23 || k == MoveKind::M02Q || k == MoveKind::M02T || k == MoveKind::M14;
}

bool is_ideal(MoveKind k) {
    return k == MoveKind::M23 || k == MoveKind::M32 || k == MoveKind::M02Q || k == MoveKind::M20Q;
}

int tet_delta(MoveKind k) {
    switch (k) {
        case MoveKind::M23: return 1;
        case MoveKind::M32: return -1;
        case MoveKind::M02Q:
        case MoveKind::M02T: return 2;
        case MoveKind::M20Q:
        case MoveKind::M20T: return -2;
        case MoveKind::M14: return 3;
        case MoveKind::M41: return -3;
    }
    return 0;
}

const std::vector<std::string>& site_keys(MoveKind k) {
    static const std::vector<std::string> tf{"tet", "face"}, tab{"tet", "a", "b"},
        q{"tet", "a", "b", "i", "j"}, tv{"tet", "v"}, t{"tet"};
    switch (k) {
        case MoveKind::M23:
        case MoveKind::M02T: return tf;
        case MoveKind::M32:
        case MoveKind::M20Q: return tab;
        case MoveKind::M02Q: return q;
        case MoveKind::M20T:
        case MoveKind::M41: return tv;
        case MoveKind::M14: return t;
    }
    return t;
}

std::string to_string(const Move& m) {
    std::string s = to_string(m.kind) + "(";
    for (std::size_t i = 0; i < m.site.size(); ++i) s += (i ? "," : "") + std::to_string(m.site[i]);
    return s + ")";
}

MoveResult apply(const Triangulation& T, const Move& m) {
    if (m.site.empty()) invalid("empty site");
    switch (m.kind) {
        case MoveKind::M23: return apply_23(T, m);
        case MoveKind::M02T: return apply_02t(T, m);
        case MoveKind::M20T: return apply_20t(T, m);
        case MoveKind::M14: return apply_14(T, m);
        case MoveKind::M41: return apply_41(T, m);
        default: break;
    }
    if (m.site[0] < 0 || m.site[0] >= T.size()) invalid("tetrahedron out of range");
    Skeleton S = skeleta(T);
    switch (m.kind) {
        case MoveKind::M32: return apply_32(T, S, m);
        case MoveKind::M02Q: return apply_02q(T, S, m);
        case MoveKind::M20Q: return apply_20q(T, S, m);
        default: break;
    }
    invalid("unknown move");
}

void check_site(const Triangulation& T, const Skeleton&, const Move& m) { (void)apply(T, m); }

std::vector<Move> enumerate_sites(const Triangulation& T, MoveKind kind) {
    return enumerate_sites(T, skeleta(T), kind);
}

std::vector<Move> enumerate_sites(const Triangulation& T, const Skeleton& S, MoveKind kind) {
    std::vector<Move> cand;
    switch (kind) {
        case MoveKind::M23:
            for (const auto& F : S.faces)
                if (F.tet != F.tet2) cand.push_back({kind, {F.tet, F.face}});
            return cand;
        case MoveKind::M02T:
            for (const auto& F : S.faces) cand.push_back({kind, {F.tet, F.face}});
            return cand;
        case MoveKind::M14:
            for (int t = 0; t < T.size(); ++t) cand.push_back({kind, {t}});
            return cand;
        case MoveKind::M32:
        case MoveKind::M20Q: {
            const int val = kind == MoveKind::M32 ? 3 : 2;
            for (const auto& ec : S.edges) {
                if (!ec.consistent || ec.valence() != val) continue;
                std::set<int> tets;
                for (const auto& st : ec.link) tets.insert(st.tet);
                if (static_cast<int>(tets.size()) != val) continue;
                cand.push_back({kind, {ec.link[0].tet, ec.link[0].a, ec.link[0].b}});
            }
            break;
        }
        case MoveKind::M02Q:
            for (const auto& ec : S.edges) {
                if (!ec.consistent) continue;
                const int n = static_cast<int>(ec.link.size());
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const auto &si = ec.link[i], &sj = ec.link[j];
                        if (S.face_of[si.tet][si.c] == S.face_of[sj.tet][sj.c]) continue;
                        cand.push_back({kind, {ec.link[0].tet, ec.link[0].a, ec.link[0].b, i, j}});
                    }
            }
            return cand;
        case MoveKind::M20T:
        case MoveKind::M41: {
            const std::size_t val = kind == MoveKind::M20T ? 2 : 4;
            for (const auto& vc : S.vertices)
                if (vc.orbit.size() == val) cand.push_back({kind, {vc.orbit[0].first, vc.orbit[0].second}});
            break;
        }
    }
    std::vector<Move> out;
    for (auto& m : cand) {
        try {
            (void)apply(T, m);
            out.push_back(std::move(m));
        } catch (const Error& e) {
            if (e.code != "InvalidSite") throw;
        }
    }
    return out;
}

// ---- persistence ----

Persistence persistence(const Triangulation&, const Skeleton& S, const MoveResult& R, const Skeleton& S2) {
    Persistence P;
    P.edge.resize(S2.edges.size());
    P.face.resize(S2.faces.size());

    auto find_edge = [&](int n1, int n2, int& ot, int& oa, int& ob) {
        for (const auto* list : {&R.removed_names, &R.side_names})
            for (const auto& [t, nm] : *list) {
                int u1 = -1, u2 = -1;
                for (int v = 0; v < 4; ++v) {
                    if (nm[v] == n1) u1 = v;
                    if (nm[v] == n2) u2 = v;
                }
                if (u1 >= 0 && u2 >= 0) {
                    ot = t, oa = u1, ob = u2;
                    return true;
                }
            }
        return false;
    };
    auto find_face = [&](const Names& nm, int f, int& ot, int& of) {
        for (const auto& [t, rn] : R.removed_names) {
            int miss = -1, hits = 0;
            for (int v = 0; v < 4; ++v) {
                bool in = false;
                for (int q = 0; q < 4; ++q)
                    if (q != f && nm[q] == rn[v]) in = true;
                if (in)
                    ++hits;
                else
                    miss = v;
            }
            if (hits == 3) {
                ot = t, of = miss;
                return true;
            }
        }
        return false;
    };

    for (int x = 0; x < R.T.size(); ++x) {
        const int old = R.old_of_new[x];
        for (int le = 0; le < 6; ++le) {
            const int a = kEdgeVerts[le][0], b = kEdgeVerts[le][1];
            int ot = old, oa = a, ob = b;
            if (old < 0 && !find_edge(R.new_names[x][a], R.new_names[x][b], ot, oa, ob)) continue;
            const int e = S.edge_of[ot][edge_index(oa, ob)];
            const int rel = S.edge_dir(ot, oa, ob) * S2.edge_dir(x, a, b);
            auto& lst = P.edge[S2.edge_of[x][le]];
            if (std::find(lst.begin(), lst.end(), std::pair{e, rel}) == lst.end()) lst.push_back({e, rel});
        }
    }
    for (std::size_t F = 0; F < S2.faces.size(); ++F) {
        const auto& fc = S2.faces[F];
        for (int side = 0; side < 2; ++side) {
            const int x = side == 0 ? fc.tet : fc.tet2, f = side == 0 ? fc.face : fc.face2;
            int ot = R.old_of_new[x], of = f;
            if (ot < 0 && !find_face(R.new_names[x], f, ot, of)) continue;
            P.face[F].push_back({ot, of, side == 0 ? 1 : 0});
        }
    }
    return P;
}

namespace {

std::vector<Branching> extend_b(const Skeleton& S, const Branching& b, const MoveResult& R, const Skeleton& S2,
                                const Persistence& P, std::string* why) {
    std::vector<int> fixed(S2.edges.size(), 0);
    for (std::size_t e = 0; e < fixed.size(); ++e)
        for (auto [old, rel] : P.edge[e]) {
            int v = b.dir[old] * rel;
            if (fixed[e] != 0 && fixed[e] != v) {
                if (why) *why = "persistent edges merged into edge " + std::to_string(e) + " disagree";
                return {};
            }
            fixed[e] = v;
        }
    (void)S;
    std::vector<int> free;
    for (std::size_t e = 0; e < fixed.size(); ++e)
        if (fixed[e] == 0) free.push_back(static_cast<int>(e));
    if (free.size() > 16) throw Error("InvalidSite", "too many new edges");
    std::vector<Branching> out;
    for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
        Branching c{fixed};
        for (std::size_t k = 0; k < free.size(); ++k) c.dir[free[k]] = (mask >> k) & 1u ? -1 : 1;
        if (is_branching(R.T, S2, c)) out.push_back(std::move(c));
    }
    if (out.empty() && why) *why = "no branching of the result agrees with the persistent edges";
    return out;
}

std::vector<PreBranching> extend_w(const Skeleton& S, const PreBranching& w, const MoveResult& R,
                                   const Skeleton& S2, const Persistence& P, std::string* why) {
    std::vector<int> fixed(S2.faces.size(), 0);
    for (std::size_t F = 0; F < fixed.size(); ++F)
        for (const auto& c : P.face[F]) {
            bool in = points_in(S, w, c[0], c[1]);
            int v = in == (c[2] == 1) ? 1 : -1;
            if (fixed[F] != 0 && fixed[F] != v) {
                if (why) *why = "persistent faces merged into face " + std::to_string(F) + " disagree";
                return {};
            }
            fixed[F] = v;
        }
    std::vector<int> free;
    for (std::size_t F = 0; F < fixed.size(); ++F)
        if (fixed[F] == 0) free.push_back(static_cast<int>(F));
    if (free.size() > 16) throw Error("InvalidSite", "too many new faces");
    std::vector<PreBranching> out;
    for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
        PreBranching c{fixed};
        for (std::size_t k = 0; k < free.size(); ++k) c.side[free[k]] = (mask >> k) & 1u ? -1 : 1;
        if (is_prebranching(R.T, S2, c)) out.push_back(std::move(c));
    }
    if (out.empty() && why) *why = "no pre-branching of the result agrees with the persistent faces";
    return out;
}

template <class D>
std::vector<D> extend_any(const Skeleton& S, const D& d, const MoveResult& R, const Skeleton& S2,
                          const Persistence& P, std::string* why) {
    if constexpr (std::is_same_v<D, Branching>)
        return extend_b(S, d, R, S2, P, why);
    else
        return extend_w(S, d, R, S2, P, why);
}

template <class D>
void check_decoration(const Triangulation& T, const Skeleton& S, const D& d) {
    bool ok;
    if constexpr (std::is_same_v<D, Branching>)
        ok = d.dir.size() == S.edges.size() && is_branching(T, S, d);
    else
        ok = d.side.size() == S.faces.size() && is_prebranching(T, S, d);
    if (!ok) throw Error("InvalidDecoration", "decoration is not valid on the triangulation");
}

template <class D>
std::vector<DecoratedTransit<D>> positive(const Triangulation& T, const Move& m, const D& d) {
    if (!is_positive(m.kind)) invalid(to_string(m.kind) + " is not a positive move");
    Skeleton S = skeleta(T);
    check_decoration(T, S, d);
    MoveResult R = apply(T, m);
    Skeleton S2 = skeleta(R.T);
    Persistence P = persistence(T, S, R, S2);
    auto outs = extend_any(S, d, R, S2, P, nullptr);
    std::vector<DecoratedTransit<D>> res;
    for (auto& o : outs) res.push_back({m, R, d, std::move(o), outs.size() == 1});
    return res;
}

template <class D>
NegativeOutcome<D> negative(const Triangulation& T, const Move& m, const D& d) {
    if (is_positive(m.kind)) invalid(to_string(m.kind) + " is not a negative move");
    Skeleton S = skeleta(T);
    check_decoration(T, S, d);
    MoveResult R = apply(T, m);
    Skeleton S2 = skeleta(R.T);
    Persistence P = persistence(T, S, R, S2);
    NegativeOutcome<D> out;
    auto outs = extend_any(S, d, R, S2, P, &out.witness);
    if (!outs.empty()) out.transit = DecoratedTransit<D>{m, std::move(R), d, outs.front(), outs.size() == 1};
    return out;
}

}  // namespace

std::vector<Branching> extend_branching(const Skeleton& S, const Branching& b, const MoveResult& R,
                                        const Skeleton& S2, const Persistence& P) {
    return extend_b(S, b, R, S2, P, nullptr);
}

std::vector<PreBranching> extend_prebranching(const Skeleton& S, const PreBranching& w, const MoveResult& R,
                                              const Skeleton& S2, const Persistence& P) {
    return extend_w(S, w, R, S2, P, nullptr);
}

std::vector<BranchedTransit> enhance_positive(const Triangulation& T, const Move& m, const Branching& b) {
    return positive(T, m, b);
}
std::vector<PreBranchedTransit> enhance_positive(const Triangulation& T, const Move& m, const PreBranching& w) {
    return positive(T, m, w);
}
NegativeOutcome<Branching> enhance_negative(const Triangulation& T, const Move& m, const Branching& b) {
    return negative(T, m, b);
}
NegativeOutcome<PreBranching> enhance_negative(const Triangulation& T, const Move& m, const PreBranching& w) {
    return negative(T, m, w);
}

std::string decorated_signature(const Triangulation& T, const Branching& b) {
    Skeleton S = skeleta(T);
    TetLabels L = labels_of(T, S, b);
    return signature(T, &L);
}

std::string decorated_signature(const Triangulation& T, const PreBranching& w) {
    Skeleton S = skeleta(T);
    TetLabels L = labels_of(T, S, w);
    return signature(T, &L);
}

// ---- classification ----

std::string to_string(TransitClass c) {
    switch (c) {
        case TransitClass::NonAmbiguous: return "NonAmbiguous";
        case TransitClass::ForcedAmbiguous: return "ForcedAmbiguous";
        case TransitClass::AmbiguousSliding: return "AmbiguousSliding";
        case TransitClass::Bump: return "Bump";
    }
    return "?";
}

namespace {

using Pair = std::array<std::array<int, 2>, 2>;

struct TableRow {
    Pair pair;
    TransitClass cls;
    bool schaeffer;
};

// One entry per listed couple; the swapped couple has the same class.
const std::vector<TableRow>& table_23() {
    using C = TransitClass;
    static const std::vector<TableRow> rows = {
        {{{{-1, 1}, {-1, 0}}}, C::NonAmbiguous, false},
        {{{{+1, 1}, {+1, 0}}}, C::NonAmbiguous, false},
        {{{{+1, 2}, {+1, 3}}}, C::NonAmbiguous, false},
        {{{{-1, 2}, {-1, 3}}}, C::NonAmbiguous, false},
        {{{{+1, 2}, {-1, 0}}}, C::NonAmbiguous, false},
        {{{{-1, 3}, {+1, 1}}}, C::NonAmbiguous, false},
        {{{{-1, 2}, {+1, 0}}}, C::NonAmbiguous, false},
        {{{{+1, 3}, {-1, 1}}}, C::NonAmbiguous, false},
        {{{{+1, 2}, {+1, 1}}}, C::NonAmbiguous, true},
        {{{{-1, 2}, {-1, 1}}}, C::NonAmbiguous, true},
        {{{{-1, 1}, {+1, 1}}}, C::AmbiguousSliding, false},
        {{{{+1, 1}, {-1, 1}}}, C::AmbiguousSliding, false},
        {{{{+1, 2}, {-1, 2}}}, C::AmbiguousSliding, false},
        {{{{-1, 2}, {+1, 2}}}, C::AmbiguousSliding, false},
        {{{{-1, 3}, {-1, 0}}}, C::ForcedAmbiguous, false},
        {{{{+1, 3}, {+1, 0}}}, C::ForcedAmbiguous, false},
        {{{{+1, 0}, {-1, 0}}}, C::Bump, false},
        {{{{-1, 0}, {+1, 0}}}, C::Bump, false},
        {{{{+1, 3}, {-1, 3}}}, C::Bump, false},
        {{{{-1, 3}, {+1, 3}}}, C::Bump, false},
    };
    return rows;
}

const TableRow& table_lookup(const Pair& p) {
    Pair sw{p[1], p[0]};
    for (const auto& r : table_23())
        if (r.pair == p || r.pair == sw) return r;
    throw Error("InvalidSite", "couple not present in the 2-3 table");
}

TransitClass derived_class(bool bump_rule, bool pb_forced, bool b_forced) {
    if (pb_forced) return TransitClass::NonAmbiguous;
    if (bump_rule) return TransitClass::Bump;
    return b_forced ? TransitClass::ForcedAmbiguous : TransitClass::AmbiguousSliding;
}

struct SiteData {
    Triangulation D;
    Skeleton S;
    std::vector<int> eps;
    Move m23, m02q;
};

const SiteData& site_data() {
    static const SiteData data = [] {
        SiteData d;
        d.D = abstract_site();
        d.S = skeleta(d.D);
        d.eps = orient(d.D);
        if (d.eps[0] < 0)
            for (int& e : d.eps) e = -e;
        d.m23 = site_move_23();
        d.m02q = site_move_02q(d.D, d.S);
        return d;
    }();
    return data;
}

int below(const std::array<int, 5>& rank, int name, std::initializer_list<int> base) {
    int c = 0;
    for (int x : base) c += rank[x] < rank[name] ? 1 : 0;
    return c;
}

// Sign of the permutation putting the three names in increasing rank.
int triangle_sign(const std::array<int, 5>& rank, int p, int q, int r) {
    std::array<int, 3> idx{0, 1, 2};
    std::array<int, 3> nm{p, q, r};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return rank[nm[i]] < rank[nm[j]]; });
    return sequence_sign(idx[0], idx[1], idx[2], 3);
}

TransitType local_type(const std::array<int, 5>& rank, bool quad) {
    const SiteData& sd = site_data();
    Branching b = site_branching(sd.D, sd.S, rank);
    TransitType tt;
    if (quad) {
        tt.pair[0] = {triangle_sign(rank, 0, 1, 3), below(rank, 3, {0, 1})};
        tt.pair[1] = {-triangle_sign(rank, 0, 1, 4), below(rank, 4, {0, 1})};
        tt.bump_rule = tt.pair[0][1] == tt.pair[1][1] && (tt.pair[0][1] == 0 || tt.pair[0][1] == 2);
    } else {
        auto s = tet_signs(sd.D, sd.S, b, sd.eps);
        tt.pair[0] = {s[0], below(rank, 3, {0, 1, 2})};
        tt.pair[1] = {s[1], below(rank, 4, {0, 1, 2})};
        tt.bump_rule = tt.pair[0][1] == tt.pair[1][1] && (tt.pair[0][1] == 0 || tt.pair[0][1] == 3);
    }
    const Move& m = quad ? sd.m02q : sd.m23;
    tt.b_forced = enhance_positive(sd.D, m, b).size() == 1;
    PreBranching w = induced_prebranching(sd.D, sd.S, b, sd.eps);
    tt.pb_forced = enhance_positive(sd.D, m, w).size() == 1;
    return tt;
}

// Total order of the five names from the two apex positions over an
// ordered base.
std::array<int, 5> merge_ranks(std::vector<int> base, int a1, int a2, bool c_on_top = false) {
    base.insert(base.begin() + a1, 3);
    base.insert(base.begin() + a2 + (a1 <= a2 ? 1 : 0), 4);
    if (c_on_top) base.push_back(2);
    std::array<int, 5> rank{};
    for (std::size_t i = 0; i < base.size(); ++i) rank[base[i]] = static_cast<int>(i);
    return rank;
}

}  // namespace

TransitClass table_class_23(const Pair& pair) { return table_lookup(pair).cls; }
bool is_schaeffer_23(const Pair& pair) { return table_lookup(pair).schaeffer; }

Triangulation abstract_site() {
    Triangulation D;
    D.name = "abstract 2-3 site";
    const Perm4 id;
    D.gluings.assign(4, {});
    auto glue = [&](int t, int f, int u) {
        D.gluings[t][f] = {u, id};
        D.gluings[u][f] = {t, id};
    };
    glue(0, 3, 1);
    glue(2, 3, 3);
    for (int k = 0; k < 3; ++k) {
        glue(0, k, 2);
        glue(1, k, 3);
    }
    return D;
}

Branching site_branching(const Triangulation& D, const Skeleton& S, const std::array<int, 5>& rank) {
    static const std::array<Names, 4> names{{{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 3}, {0, 1, 2, 4}}};
    (void)D;
    Branching b;
    for (const auto& ec : S.edges) {
        const auto& o = ec.orbit[0];
        b.dir.push_back(rank[names[o.tet][o.a]] < rank[names[o.tet][o.b]] ? 1 : -1);
    }
    return b;
}

Move site_move_23() { return {MoveKind::M23, {0, 3}}; }

Move site_move_02q(const Triangulation& D, const Skeleton& S) {
    auto w = edge_walk(D, {0, 0, 1, 2, 3});
    const int f1 = S.face_of[0][2], f2 = S.face_of[1][2];
    int i = -1, j = -1;
    for (int k = 0; k < static_cast<int>(w.size()); ++k) {
        int F = S.face_of[w[k].tet][w[k].c];
        if (F == f1 && i < 0) i = k;
        if (F == f2 && j < 0) j = k;
    }
    if (i > j) std::swap(i, j);
    return {MoveKind::M02Q, {0, 0, 1, i, j}};
}

TransitType classify_23(const Triangulation& T, const Skeleton& S, const Branching& b, const Move& m) {
    if (m.kind != MoveKind::M23 || m.site.size() != 2) invalid("not a 2-3 site");
    const int t1 = m.site[0], f0 = m.site[1];
    if (t1 < 0 || t1 >= T.size()) invalid("tetrahedron out of range");
    need_vertex(f0);
    const Gluing& g = T.adj(t1, f0);
    if (g.tet == t1) invalid("the face bounds a single tetrahedron");
    const int t2 = g.tet, f2 = g.perm[f0];
    TetLabels rk = vertex_ranks(T, S, b);
    auto sgn = [&](int t) {
        std::array<int, 4> ord{};
        for (int v = 0; v < 4; ++v) ord[rk[t][v]] = v;
        return sequence_sign(ord[0], ord[1], ord[2], ord[3]);
    };
    const int a1 = rk[t1][f0], a2 = rk[t2][f2];
    TransitType tt;
    tt.pair = {{{sgn(t1), a1}, {-g.perm.sign() * sgn(t2), a2}}};

    std::vector<int> base;
    for (int v : others(f0)) base.push_back(v);
    std::sort(base.begin(), base.end(), [&](int x, int y) { return rk[t1][x] < rk[t1][y]; });
    auto o = others(f0);
    for (int& v : base) v = static_cast<int>(std::find(o.begin(), o.end(), v) - o.begin());
    TransitType loc = local_type(merge_ranks(base, a1, a2), false);
    tt.bump_rule = a1 == a2 && (a1 == 0 || a1 == 3);
    tt.pb_forced = loc.pb_forced;
    tt.b_forced = loc.b_forced;
    const TableRow& row = table_lookup(tt.pair);
    tt.cls = row.cls;
    tt.schaeffer = row.schaeffer;
    return tt;
}

TransitType classify_02q(const Triangulation& T, const Skeleton& S, const Branching& b, const Move& m) {
    if (m.kind != MoveKind::M02Q || m.site.size() != 5) invalid("not a quadrilateral 0-2 site");
    (void)apply(T, m);
    auto cd = complement_pair(m.site[1], m.site[2]);
    auto w = edge_walk(T, {m.site[0], m.site[1], m.site[2], cd[0], cd[1]});
    const LinkStep &si = w[m.site[3]], &sj = w[m.site[4]];
    TetLabels rk = vertex_ranks(T, S, b);
    // names U=0, V=1, W1=3, W2=4 as on the abstract site
    std::array<int, 5> r1{}, r2{};
    r1[0] = rk[si.tet][si.a], r1[1] = rk[si.tet][si.b], r1[3] = rk[si.tet][si.d];
    r2[0] = rk[sj.tet][sj.a], r2[1] = rk[sj.tet][sj.b], r2[4] = rk[sj.tet][sj.d];
    const int a1 = below(r1, 3, {0, 1}), a2 = below(r2, 4, {0, 1});
    TransitType tt;
    tt.pair = {{{triangle_sign(r1, 0, 1, 3), a1}, {-triangle_sign(r2, 0, 1, 4), a2}}};
    std::vector<int> base = r1[0] < r1[1] ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
    auto rank = merge_ranks(base, a1, a2, true);
    TransitType loc = local_type(rank, true);
    tt.bump_rule = a1 == a2 && (a1 == 0 || a1 == 2);
    tt.pb_forced = loc.pb_forced;
    tt.b_forced = loc.b_forced;
    tt.cls = derived_class(tt.bump_rule, tt.pb_forced, tt.b_forced);
    return tt;
}

namespace {

Census run_census(bool quad) {
    Census c;
    std::array<int, 5> rank{0, 1, 2, 3, 4};
    std::map<std::pair<Pair, int>, int> type_id;
    std::vector<int> type_size;
    std::vector<TransitClass> type_cls;
    std::vector<bool> type_sch;
    do {
        if (quad && rank[2] != 4) continue;
        CensusRow row;
        row.rank = rank;
        row.type = local_type(rank, quad);
        row.new_edge = rank[3] < rank[4] ? 1 : -1;
        const auto& p = row.type.pair;
        TransitClass derived = derived_class(row.type.bump_rule, row.type.pb_forced, row.type.b_forced);
        if (quad) {
            row.type.cls = derived;
            if (row.type.pb_forced && !row.type.b_forced) ++c.table_vs_rules_mismatches;
        } else {
            const TableRow& tr = table_lookup(p);
            row.type.cls = tr.cls;
            row.type.schaeffer = tr.schaeffer;
            if (tr.cls != derived) ++c.table_vs_rules_mismatches;
            if ((tr.cls == TransitClass::Bump) != row.type.bump_rule) ++c.table_vs_rules_mismatches;
            if ((tr.cls == TransitClass::NonAmbiguous) != row.type.pb_forced) ++c.table_vs_rules_mismatches;
        }
        auto key = std::make_pair(p, p[0][1] == p[1][1] ? row.new_edge : 0);
        auto [it, fresh] = type_id.emplace(key, static_cast<int>(type_size.size()));
        if (fresh) {
            type_size.push_back(0);
            type_cls.push_back(row.type.cls);
            type_sch.push_back(row.type.schaeffer);
        } else if (type_cls[it->second] != row.type.cls) {
            ++c.table_vs_rules_mismatches;
        }
        ++type_size[it->second];
        c.type_of_row.push_back(it->second);
        c.rows.push_back(row);
    } while (std::next_permutation(rank.begin(), rank.end()));

    c.n_types = static_cast<int>(type_size.size());
    c.configs_per_type_min = *std::min_element(type_size.begin(), type_size.end());
    c.configs_per_type_max = *std::max_element(type_size.begin(), type_size.end());
    for (int t = 0; t < c.n_types; ++t) {
        switch (type_cls[t]) {
            case TransitClass::NonAmbiguous: ++c.na_types; break;
            case TransitClass::ForcedAmbiguous:
                ++c.forced_ambiguous_types;
                ++c.sliding_types;
                break;
            case TransitClass::AmbiguousSliding: ++c.sliding_types; break;
            case TransitClass::Bump: ++c.bump_types; break;
        }
        if (type_sch[t]) ++c.schaeffer_types;
    }
    return c;
}

}  // namespace

Census census_types() { return run_census(false); }
Census census_02q() { return run_census(true); }

}  // namespace btw
