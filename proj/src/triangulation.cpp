#include "btw/triangulation.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "union_find.hpp"

namespace btw {

using detail::UnionFind;

std::string to_string(TriError e) {
    switch (e) {
        case TriError::NonInvolutive: return "NonInvolutive";
        case TriError::SelfGluedFace: return "SelfGluedFace";
        case TriError::BadPermutation: return "BadPermutation";
        case TriError::Unglued: return "Unglued";
    }
    return "?";
}

std::vector<TriViolation> check_gluings(const Triangulation& T) {
    std::vector<TriViolation> out;
    const int n = T.size();
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.adj(t, f);
            if (g.tet < 0 || g.tet >= n) {
                out.push_back({TriError::Unglued, t, f});
                continue;
            }
            if (!g.perm.valid()) {
                out.push_back({TriError::BadPermutation, t, f});
                continue;
            }
            int g2 = g.perm[f];
            if (g.tet == t && g2 == f) {
                out.push_back({TriError::SelfGluedFace, t, f});
                continue;
            }
            const Gluing& back = T.adj(g.tet, g2);
            if (back.tet != t || !back.perm.valid() || back.perm != g.perm.inverse())
                out.push_back({TriError::NonInvolutive, t, f});
        }
    }
    return out;
}

const Triangulation& validate(const Triangulation& T) {
    auto v = check_gluings(T);
    if (!v.empty()) {
        std::ostringstream os;
        os << "invalid gluing table:";
        for (auto& x : v) os << ' ' << to_string(x.kind) << '(' << x.tet << ',' << x.face << ')';
        throw Error("InvalidTriangulation", os.str());
    }
    return T;
}

std::vector<LinkStep> edge_walk(const Triangulation& T, LinkStep start) {
    std::vector<LinkStep> walk;
    LinkStep s = start;
    do {
        walk.push_back(s);
        const Gluing& g = T.adj(s.tet, s.c);
        const Perm4& p = g.perm;
        s = {g.tet, p[s.a], p[s.b], p[s.d], p[s.c]};
        if (walk.size() > 24u * static_cast<std::size_t>(T.size()) + 8)
            throw Error("InvalidTriangulation", "edge walk does not close");
    } while (!(s == start));
    return walk;
}

Skeleton skeleta(const Triangulation& T) {
    const int n = T.size();
    Skeleton S;
    S.edge_of.assign(n, {-1, -1, -1, -1, -1, -1});
    S.edge_sign.assign(n, {0, 0, 0, 0, 0, 0});
    S.face_of.assign(n, {-1, -1, -1, -1});
    S.vertex_of.assign(n, {-1, -1, -1, -1});

    for (int t = 0; t < n; ++t) {
        for (int e = 0; e < 6; ++e) {
            if (S.edge_of[t][e] >= 0) continue;
            int a = kEdgeVerts[e][0], b = kEdgeVerts[e][1];
            auto cd = complement_pair(a, b);
            EdgeClass cls;
            int id = static_cast<int>(S.edges.size());
            cls.link = edge_walk(T, {t, a, b, cd[0], cd[1]});
            for (const auto& st : cls.link) {
                int le = edge_index(st.a, st.b);
                int sg = st.a < st.b ? 1 : -1;
                if (S.edge_of[st.tet][le] < 0) {
                    S.edge_of[st.tet][le] = id;
                    S.edge_sign[st.tet][le] = sg;
                    cls.orbit.push_back({st.tet, st.a, st.b});
                } else if (S.edge_sign[st.tet][le] != sg) {
                    cls.consistent = false;
                }
            }
            S.edges.push_back(std::move(cls));
        }
    }

    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
            if (S.face_of[t][f] >= 0) continue;
            const Gluing& g = T.adj(t, f);
            int id = static_cast<int>(S.faces.size());
            S.faces.push_back({t, f, g.tet, g.perm[f]});
            S.face_of[t][f] = id;
            S.face_of[g.tet][g.perm[f]] = id;
        }
    }

    UnionFind uf(4 * n);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.adj(t, f);
            for (int v = 0; v < 4; ++v)
                if (v != f) uf.unite(4 * t + v, 4 * g.tet + g.perm[v]);
        }
    std::vector<int> cls_of_root(4 * n, -1);
    for (int x = 0; x < 4 * n; ++x) {
        int r = uf.find(x);
        if (cls_of_root[r] < 0) {
            cls_of_root[r] = static_cast<int>(S.vertices.size());
            S.vertices.emplace_back();
        }
        int id = cls_of_root[r];
        S.vertices[id].orbit.emplace_back(x / 4, x % 4);
        S.vertex_of[x / 4][x % 4] = id;
    }
    return S;
}

Orientation orientation(const Triangulation& T) {
    const int n = T.size();
    Orientation O;
    O.eps.assign(n, 0);
    std::vector<int> parent(n, -1);
    for (int root = 0; root < n; ++root) {
        if (O.eps[root] != 0) continue;
        O.eps[root] = 1;
        std::deque<int> q{root};
        while (!q.empty()) {
            int t = q.front();
            q.pop_front();
            for (int f = 0; f < 4; ++f) {
                const Gluing& g = T.adj(t, f);
                int need = -g.perm.sign() * O.eps[t];
                if (O.eps[g.tet] == 0) {
                    O.eps[g.tet] = need;
                    parent[g.tet] = t;
                    q.push_back(g.tet);
                } else if (O.eps[g.tet] != need && O.orientable) {
                    O.orientable = false;
                    // loop: root..t, then u..root reversed
                    std::vector<int> up, vp;
                    for (int x = t; x >= 0; x = parent[x]) up.push_back(x);
                    for (int x = g.tet; x >= 0; x = parent[x]) vp.push_back(x);
                    while (up.size() > 1 && vp.size() > 1 && up[up.size() - 2] == vp[vp.size() - 2]) {
                        up.pop_back();
                        vp.pop_back();
                    }
                    std::reverse(up.begin(), up.end());
                    O.cycle = up;
                    for (int x : vp) O.cycle.push_back(x);
                }
            }
        }
    }
    return O;
}

std::vector<int> orient(const Triangulation& T) {
    auto O = orientation(T);
    if (!O.orientable) {
        std::ostringstream os;
        os << "orientation-reversing loop through tets";
        for (int x : O.cycle) os << ' ' << x;
        throw Error("NonOrientable", os.str());
    }
    return O.eps;
}

BoundarySurface boundary_surface(const Triangulation& T) {
    const int n = T.size();
    BoundarySurface B;
    UnionFind tri(4 * n), corner(16 * n);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const Gluing& g = T.adj(t, f);
            const Perm4& p = g.perm;
            for (int v = 0; v < 4; ++v) {
                if (v == f) continue;
                tri.unite(4 * t + v, 4 * g.tet + p[v]);
                for (int w = 0; w < 4; ++w)
                    if (w != f && w != v) corner.unite(16 * t + 4 * v + w, 16 * g.tet + 4 * p[v] + p[w]);
            }
        }
    Skeleton S = skeleta(T);
    B.component_of.assign(4 * n, -1);
    B.corner.assign(4 * n, {-1, -1, -1, -1});
    std::vector<int> comp_of_root(4 * n, -1), corner_id(16 * n, -1);
    for (int x = 0; x < 4 * n; ++x) {
        int r = tri.find(x);
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = static_cast<int>(B.components.size());
            BoundaryComponent c;
            c.vertex_class = S.vertex_of[x / 4][x % 4];
            B.components.push_back(c);
        }
        B.component_of[x] = comp_of_root[r];
        B.components[comp_of_root[r]].triangles++;
    }
    for (int x = 0; x < 4 * n; ++x) {
        for (int w = 0; w < 4; ++w) {
            if (w == x % 4) continue;
            int r = corner.find(16 * (x / 4) + 4 * (x % 4) + w);
            if (corner_id[r] < 0) {
                corner_id[r] = B.n_corners++;
                B.components[B.component_of[x]].vertices++;
            }
            B.corner[x][w] = corner_id[r];
        }
    }
    for (auto& c : B.components) {
        c.edges = 3 * c.triangles / 2;
        c.euler = c.vertices - c.edges + c.triangles;
        B.euler += c.euler;
    }
    return B;
}

int euler_characteristic(const Triangulation& T) {
    return static_cast<int>(skeleta(T).edges.size()) - T.size();
}

// ---- signatures ----

namespace {

struct Frames {
    std::vector<int> new_of_old;
    std::vector<int> order;
    std::vector<Perm4> frame;  // indexed by old tet
};

// Breadth-first relabelling of the component of `start`, appending its code.
// Gives up (returns false) once the code is known to exceed `best`.
bool bfs_code(const Triangulation& T, int start, Perm4 f0, const TetLabels* deco,
              std::vector<int>& code, Frames& fr, const std::vector<int>* best) {
    fr.order.clear();
    std::fill(fr.new_of_old.begin(), fr.new_of_old.end(), -1);
    fr.order.push_back(start);
    fr.new_of_old[start] = 0;
    fr.frame[start] = f0;
    bool below = best == nullptr;
    auto put = [&](int x) {
        if (!below) {
            const int y = (*best)[code.size()];
            if (x > y) return false;
            below = x < y;
        }
        code.push_back(x);
        return true;
    };
    for (std::size_t k = 0; k < fr.order.size(); ++k) {
        int o = fr.order[k];
        const Perm4 phi = fr.frame[o];
        for (int nf = 0; nf < 4; ++nf) {
            const Gluing& g = T.adj(o, phi[nf]);
            if (fr.new_of_old[g.tet] < 0) {
                fr.new_of_old[g.tet] = static_cast<int>(fr.order.size());
                fr.order.push_back(g.tet);
                fr.frame[g.tet] = g.perm * phi;
            }
            Perm4 tau = fr.frame[g.tet].inverse() * g.perm * phi;
            if (!put(fr.new_of_old[g.tet]) || !put(tau.index())) return false;
        }
    }
    if (deco) {
        for (int o : fr.order)
            for (int v = 0; v < 4; ++v)
                if (!put((*deco)[o][fr.frame[o][v]])) return false;
    }
    return true;
}

struct CompCanon {
    std::vector<int> code;
    std::vector<int> order;
    std::vector<Perm4> frames;
};

std::vector<CompCanon> canonical_components(const Triangulation& T, const TetLabels* deco) {
    const int n = T.size();
    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int t = 0; t < n; ++t) {
        if (comp[t] >= 0) continue;
        std::deque<int> q{t};
        comp[t] = nc;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int f = 0; f < 4; ++f) {
                int y = T.adj(x, f).tet;
                if (comp[y] < 0) {
                    comp[y] = nc;
                    q.push_back(y);
                }
            }
        }
        ++nc;
    }
    std::vector<CompCanon> out(nc);
    std::vector<bool> have(nc, false);
    Frames fr;
    fr.new_of_old.assign(n, -1);
    fr.frame.assign(n, Perm4());
    std::vector<int> code;
    for (int t = 0; t < n; ++t) {
        for (const Perm4& p : Perm4::all()) {
            code.clear();
            int c = comp[t];
            if (!bfs_code(T, t, p, deco, code, fr, have[c] ? &out[c].code : nullptr)) continue;
            if (!have[c] || code < out[c].code) {
                have[c] = true;
                out[c].code = code;
                out[c].order = fr.order;
                out[c].frames.clear();
                for (int o : fr.order) out[c].frames.push_back(fr.frame[o]);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const CompCanon& a, const CompCanon& b) {
        if (a.order.size() != b.order.size()) return a.order.size() < b.order.size();
        return a.code < b.code;
    });
    return out;
}

const char kDigits[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";

void put_int(std::string& s, long v, int width) {
    std::string tmp;
    for (int i = 0; i < width; ++i) {
        tmp.push_back(kDigits[v % 64]);
        v /= 64;
    }
    s += tmp;
}

}  // namespace

std::string signature(const Triangulation& T, const TetLabels* deco) {
    auto comps = canonical_components(T, deco);
    int maxv = std::max(T.size(), 24);
    if (deco)
        for (auto& a : *deco)
            for (int x : a) maxv = std::max(maxv, x);
    int width = 1;
    for (long cap = 64; cap <= maxv; cap *= 64) ++width;
    std::string s;
    put_int(s, width, 1);
    put_int(s, static_cast<long>(comps.size()), width);
    for (auto& c : comps) {
        put_int(s, static_cast<long>(c.order.size()), width);
        for (int x : c.code) put_int(s, x, width);
    }
    return s;
}

Relabeling canonical_relabeling(const Triangulation& T, const TetLabels* deco) {
    Relabeling r;
    for (auto& c : canonical_components(T, deco)) {
        r.old_of_new.insert(r.old_of_new.end(), c.order.begin(), c.order.end());
        r.frame.insert(r.frame.end(), c.frames.begin(), c.frames.end());
    }
    return r;
}

std::optional<Isomorphism> isomorphism(const Triangulation& A, const TetLabels* la, const Triangulation& B,
                                       const TetLabels* lb) {
    if (A.size() != B.size() || signature(A, la) != signature(B, lb)) return std::nullopt;
    Relabeling ra = canonical_relabeling(A, la), rb = canonical_relabeling(B, lb);
    Isomorphism f;
    f.tet.assign(A.size(), -1);
    f.perm.assign(A.size(), Perm4());
    for (int k = 0; k < A.size(); ++k) {
        f.tet[ra.old_of_new[k]] = rb.old_of_new[k];
        f.perm[ra.old_of_new[k]] = rb.frame[k] * ra.frame[k].inverse();
    }
    return f;
}

Triangulation relabel(const Triangulation& T, const Relabeling& r) {
    const int n = T.size();
    std::vector<int> new_of_old(n, -1);
    for (int k = 0; k < n; ++k) new_of_old[r.old_of_new[k]] = k;
    Triangulation out;
    out.name = T.name;
    out.gluings.resize(n);
    for (int k = 0; k < n; ++k) {
        int o = r.old_of_new[k];
        const Perm4& phi = r.frame[k];
        for (int nf = 0; nf < 4; ++nf) {
            const Gluing& g = T.adj(o, phi[nf]);
            int k2 = new_of_old[g.tet];
            out.gluings[k][nf] = {k2, r.frame[k2].inverse() * g.perm * phi};
        }
    }
    return out;
}

TetLabels relabel_labels(const TetLabels& L, const Relabeling& r) {
    TetLabels out(L.size());
    for (std::size_t k = 0; k < L.size(); ++k)
        for (int v = 0; v < 4; ++v) out[k][v] = L[r.old_of_new[k]][r.frame[k][v]];
    return out;
}

Triangulation disjoint_union(const Triangulation& A, const Triangulation& B) {
    Triangulation out = A;
    int off = A.size();
    for (auto row : B.gluings) {
        for (auto& g : row) g.tet += off;
        out.gluings.push_back(row);
    }
    return out;
}

}  // namespace btw
