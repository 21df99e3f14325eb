#include "btw/decor.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace btw {

int edge_orientation(const Skeleton& S, const Branching& b, int t, int a, int b_) {
    return S.edge_dir(t, a, b_) * b.dir[S.edge_of[t][edge_index(a, b_)]];
}

namespace {

// ranks from in-degrees; returns false if the tournament is not transitive
bool tet_ranks(const Skeleton& S, const Branching& b, int t, std::array<int, 4>& rank) {
    rank = {0, 0, 0, 0};
    for (int e = 0; e < 6; ++e) {
        int x = kEdgeVerts[e][0], y = kEdgeVerts[e][1];
        if (edge_orientation(S, b, t, x, y) > 0)
            rank[y]++;
        else
            rank[x]++;
    }
    unsigned seen = 0;
    for (int r : rank) seen |= 1u << r;
    return seen == 0xF;
}

bool cyclic(const Skeleton& S, const Branching& b, int t, int x, int y, int z) {
    int d1 = edge_orientation(S, b, t, x, y);
    int d2 = edge_orientation(S, b, t, y, z);
    int d3 = edge_orientation(S, b, t, z, x);
    return d1 == d2 && d2 == d3;
}

}  // namespace

BranchingReport validate_branching(const Triangulation& T, const Skeleton& S, const Branching& b) {
    BranchingReport R;
    const int n = T.size();
    if (b.dir.size() != S.edges.size()) {
        R.violations.push_back({BranchError::WrongSize});
        return R;
    }
    for (int e = 0; e < static_cast<int>(S.edges.size()); ++e)
        if (!S.edges[e].consistent) {
            BranchViolation v{BranchError::InconsistentEdgeClass};
            v.edge = e;
            R.violations.push_back(v);
        }
    if (!R.violations.empty()) return R;
    R.order.assign(n, {0, 1, 2, 3});
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> tri{};
            int k = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) tri[k++] = v;
            if (cyclic(S, b, t, tri[0], tri[1], tri[2])) {
                BranchViolation v{BranchError::CyclicTriangle};
                v.tet = t;
                if (edge_orientation(S, b, t, tri[0], tri[1]) > 0)
                    v.cycle = tri;
                else
                    v.cycle = {tri[0], tri[2], tri[1]};
                R.violations.push_back(v);
            }
        }
        std::array<int, 4> rank{};
        if (tet_ranks(S, b, t, rank))
            for (int v = 0; v < 4; ++v) R.order[t][rank[v]] = v;
    }
    R.ok = R.violations.empty();
    if (R.ok) {
        auto O = orientation(T);
        if (O.orientable) R.signs = tet_signs(T, S, b, O.eps);
    }
    return R;
}

bool is_branching(const Triangulation& T, const Skeleton& S, const Branching& b) {
    if (b.dir.size() != S.edges.size()) return false;
    for (auto& e : S.edges)
        if (!e.consistent) return false;
    std::array<int, 4> r{};
    for (int t = 0; t < T.size(); ++t)
        if (!tet_ranks(S, b, t, r)) return false;
    return true;
}

TetLabels vertex_ranks(const Triangulation& T, const Skeleton& S, const Branching& b) {
    TetLabels out(T.size());
    for (int t = 0; t < T.size(); ++t) tet_ranks(S, b, t, out[t]);
    return out;
}

std::vector<Branching> enumerate_branchings(const Triangulation& T, const Skeleton& S) {
    std::vector<Branching> out;
    const int E = static_cast<int>(S.edges.size());
    for (auto& e : S.edges)
        if (!e.consistent) return out;
    // each local triangle is checked once its last edge class is assigned
    struct Tri {
        int tet, x, y, z;
    };
    std::vector<std::vector<Tri>> due(E);
    for (int t = 0; t < T.size(); ++t)
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> v{};
            int k = 0;
            for (int u = 0; u < 4; ++u)
                if (u != f) v[k++] = u;
            int last = std::max({S.edge_of[t][edge_index(v[0], v[1])], S.edge_of[t][edge_index(v[0], v[2])],
                                 S.edge_of[t][edge_index(v[1], v[2])]});
            due[last].push_back({t, v[0], v[1], v[2]});
        }
    Branching b;
    b.dir.assign(E, 1);
    std::function<void(int)> rec = [&](int e) {
        if (e == E) {
            out.push_back(b);
            return;
        }
        for (int d : {1, -1}) {
            b.dir[e] = d;
            bool ok = true;
            for (auto& tr : due[e])
                if (cyclic(S, b, tr.tet, tr.x, tr.y, tr.z)) {
                    ok = false;
                    break;
                }
            if (ok) rec(e + 1);
        }
        b.dir[e] = 1;
    };
    rec(0);
    return out;
}

std::vector<Branching> enumerate_branchings(const Triangulation& T) {
    return enumerate_branchings(T, skeleta(T));
}

bool has_branching(const Triangulation& T) { return !enumerate_branchings(T).empty(); }

// ---- pre-branchings ----

bool points_in(const Skeleton& S, const PreBranching& w, int t, int f) {
    const FaceClass& F = S.faces[S.face_of[t][f]];
    bool rep = F.tet == t && F.face == f;
    return (w.side[S.face_of[t][f]] > 0) == rep;
}

TetLabels in_bits(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    TetLabels out(T.size());
    for (int t = 0; t < T.size(); ++t)
        for (int f = 0; f < 4; ++f) out[t][f] = points_in(S, w, t, f) ? 1 : 0;
    return out;
}

PreBranchingReport validate_prebranching(const Triangulation& T, const Skeleton& S,
                                         const PreBranching& w) {
    PreBranchingReport R;
    if (w.side.size() != S.faces.size()) {
        R.bad_degree.emplace_back(-1, -1);
        return R;
    }
    for (int t = 0; t < T.size(); ++t) {
        int in = 0;
        for (int f = 0; f < 4; ++f) in += points_in(S, w, t, f) ? 1 : 0;
        if (in != 2) R.bad_degree.emplace_back(t, in);
    }
    R.ok = R.bad_degree.empty();
    return R;
}

bool is_prebranching(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    return validate_prebranching(T, S, w).ok;
}

std::vector<PreBranching> enumerate_prebranchings(const Triangulation& T) {
    Skeleton S = skeleta(T);
    const int F = static_cast<int>(S.faces.size());
    const int n = T.size();
    std::vector<PreBranching> out;
    std::vector<int> in(n, 0), out_deg(n, 0);
    // faces of each tet whose class is decided last
    std::vector<int> last_class(n, -1);
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) last_class[t] = std::max(last_class[t], S.face_of[t][f]);
    PreBranching w;
    w.side.assign(F, 1);
    std::function<void(int)> rec = [&](int k) {
        if (k == F) {
            out.push_back(w);
            return;
        }
        const FaceClass& fc = S.faces[k];
        for (int s : {1, -1}) {
            w.side[k] = s;
            int tin = s > 0 ? fc.tet : fc.tet2;
            int tout = s > 0 ? fc.tet2 : fc.tet;
            in[tin]++;
            out_deg[tout]++;
            if (in[tin] <= 2 && out_deg[tout] <= 2) rec(k + 1);
            in[tin]--;
            out_deg[tout]--;
        }
        w.side[k] = 1;
    };
    rec(0);
    return out;
}

PreBranching induced_prebranching(const Triangulation& T, const Skeleton& S, const Branching& b,
                                  const std::vector<int>& eps) {
    PreBranching w;
    w.side.assign(S.faces.size(), 1);
    for (std::size_t k = 0; k < S.faces.size(); ++k) {
        int t = S.faces[k].tet, f = S.faces[k].face;
        std::array<int, 4> rank{};
        if (!tet_ranks(S, b, t, rank)) throw Error("InvalidBranching", "not a branching");
        std::array<int, 3> u{};
        for (int v = 0; v < 4; ++v)
            if (v != f) u[rank[v] - (rank[v] > rank[f] ? 1 : 0)] = v;
        bool into = eps[t] * sequence_sign(u[0], u[1], u[2], f) > 0;
        w.side[k] = into ? 1 : -1;
    }
    (void)T;
    return w;
}

PreBranching induced_prebranching(const Triangulation& T, const Branching& b) {
    auto O = orientation(T);
    if (!O.orientable) throw Error("NotOrientable", "induced pre-branching needs an orientation");
    return induced_prebranching(T, skeleta(T), b, O.eps);
}

std::vector<int> tet_signs(const Triangulation& T, const Skeleton& S, const Branching& b,
                           const std::vector<int>& eps) {
    std::vector<int> out(T.size());
    for (int t = 0; t < T.size(); ++t) {
        std::array<int, 4> rank{}, ord{};
        if (!tet_ranks(S, b, t, rank)) throw Error("InvalidBranching", "not a branching");
        for (int v = 0; v < 4; ++v) ord[rank[v]] = v;
        out[t] = sequence_sign(ord[0], ord[1], ord[2], ord[3]) * eps[t];
    }
    return out;
}

std::vector<int> tet_signs(const Triangulation& T, const Branching& b) {
    auto O = orientation(T);
    if (!O.orientable) throw Error("NotOrientable", "tet signs need an orientation");
    return tet_signs(T, skeleta(T), b, O.eps);
}

// ---- ambiguous edges ----

bool is_ambiguous(const Triangulation& T, const Skeleton& S, const Branching& b, int e) {
    Branching c = b;
    c.dir[e] = -c.dir[e];
    return is_branching(T, S, c);
}

bool is_good_ambiguous(const Triangulation& T, const Skeleton& S, const Branching& b, int e) {
    if (!is_ambiguous(T, S, b, e)) return false;
    const EdgeClass& E = S.edges[e];
    std::set<int> tets;
    for (auto& o : E.orbit)
        if (!tets.insert(o.tet).second) return false;
    // the opposite edges c->d around the link all pointing the same way make
    // L(e) a coherently oriented circle
    int first = 0;
    bool coherent = true;
    for (auto& st : E.link) {
        int d = edge_orientation(S, b, st.tet, st.c, st.d);
        if (first == 0)
            first = d;
        else if (d != first)
            coherent = false;
    }
    return !coherent;
}

std::vector<int> good_ambiguous_edges(const Triangulation& T, const Skeleton& S, const Branching& b) {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(S.edges.size()); ++e)
        if (is_good_ambiguous(T, S, b, e)) out.push_back(e);
    return out;
}

Branching invert(const Triangulation& T, const Skeleton& S, const Branching& b, int e) {
    if (e < 0 || e >= static_cast<int>(S.edges.size()) || !is_good_ambiguous(T, S, b, e))
        throw Error("NotAmbiguous", "edge class " + std::to_string(e) + " is not good ambiguous");
    Branching c = b;
    c.dir[e] = -c.dir[e];
    return c;
}

// ---- circuits ----

CircuitDecomposition circuits(const Triangulation& T, const Skeleton& S, const PreBranching& w) {
    return circuits(T, S, w, std::vector<bool>(T.size(), false));
}

CircuitDecomposition circuits(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                              const std::vector<bool>& crossed) {
    const int n = T.size();
    // next_out[t][f_in] = out-face paired with in-face f_in
    std::vector<std::array<int, 4>> next_out(n, {-1, -1, -1, -1});
    for (int t = 0; t < n; ++t) {
        std::vector<int> ins, outs;
        for (int f = 0; f < 4; ++f) (points_in(S, w, t, f) ? ins : outs).push_back(f);
        if (ins.size() != 2) throw Error("InvalidPreBranching", "tet without 2-in/2-out");
        int x = crossed[t] ? 1 : 0;
        next_out[t][ins[0]] = outs[x];
        next_out[t][ins[1]] = outs[1 - x];
    }
    CircuitDecomposition D;
    D.circuit_of_face.assign(S.faces.size(), -1);
    for (std::size_t k = 0; k < S.faces.size(); ++k) {
        if (D.circuit_of_face[k] >= 0) continue;
        int id = static_cast<int>(D.circuits.size());
        Circuit c;
        // start from the tet the dual edge leaves
        const FaceClass& F = S.faces[k];
        int t = points_in(S, w, F.tet, F.face) ? F.tet2 : F.tet;
        int f = points_in(S, w, F.tet, F.face) ? F.face2 : F.face;
        int start_t = t, start_f = f;
        do {
            int cls = S.face_of[t][f];
            D.circuit_of_face[cls] = id;
            c.tets.push_back(t);
            c.faces.push_back(cls);
            const Gluing& g = T.adj(t, f);
            int fin = g.perm[f];
            t = g.tet;
            f = next_out[t][fin];
        } while (!(t == start_t && f == start_f));
        D.circuits.push_back(std::move(c));
    }
    return D;
}

PreBranching circuit_move(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                          const Circuit& c) {
    std::vector<int> balance(T.size(), 0);
    std::set<int> faces(c.faces.begin(), c.faces.end());
    if (faces.size() != c.faces.size()) throw Error("UnknownCircuit", "circuit repeats a face");
    for (int k : faces) {
        if (k < 0 || k >= static_cast<int>(S.faces.size())) throw Error("UnknownCircuit", "bad face");
        const FaceClass& F = S.faces[k];
        bool in_rep = points_in(S, w, F.tet, F.face);
        balance[in_rep ? F.tet : F.tet2]++;
        balance[in_rep ? F.tet2 : F.tet]--;
    }
    for (int x : balance)
        if (x != 0) throw Error("UnknownCircuit", "face set is not a union of directed cycles");
    PreBranching out = w;
    for (int k : faces) out.side[k] = -out.side[k];
    return out;
}

PreBranching circuit_move(const Triangulation& T, const Skeleton& S, const PreBranching& w, int id) {
    auto D = circuits(T, S, w);
    if (id < 0 || id >= static_cast<int>(D.circuits.size()))
        throw Error("UnknownCircuit", "no circuit " + std::to_string(id));
    return circuit_move(T, S, w, D.circuits[id]);
}

}  // namespace btw
