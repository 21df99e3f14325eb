#include "btw/transport.hpp"

#include <deque>

namespace btw {

namespace {

[[noreturn]] void invalid_transit(const std::string& why) { throw Error("InvalidTransit", why); }

// Chain of the dual edge crossing side (t, f), oriented into t.
void add_crossing(std::vector<Int>& c, const Skeleton& S2, int t, int f, int sign) {
    const int F = S2.face_of[t][f];
    const auto& fc = S2.faces[F];
    c[F] += (fc.tet == t && fc.face == f) ? sign : -sign;
}

}  // namespace

std::vector<Int> SpineMap::push(const std::vector<Int>& chain) const {
    std::vector<Int> out;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        if (chain[k] == 0) continue;
        if (out.empty()) out.assign(edge[k].size(), 0);
        for (std::size_t j = 0; j < edge[k].size(); ++j) out[j] += chain[k] * edge[k][j];
    }
    if (out.empty() && !edge.empty()) out.assign(edge[0].size(), 0);
    return out;
}

SpineMap spine_map(const Triangulation& T, const Skeleton& S, const MoveResult& R, const Skeleton& S2) {
    int kept = 0;
    for (int x : R.old_of_new) kept += x >= 0 ? 1 : 0;
    if (kept == R.T.size()) invalid_transit("no created tetrahedra");
    const int anchor = kept;  // first created tet

    SpineMap f;
    f.vertex.resize(T.size());
    for (int t = 0; t < T.size(); ++t) f.vertex[t] = R.new_of_old[t] >= 0 ? R.new_of_old[t] : anchor;

    // side of T -> side of R.T bounding the same triangle; -1 for faces
    // inside the rewritten ball
    std::vector<std::array<int, 2>> side(4 * T.size(), {-1, -1});
    for (int t = 0; t < T.size(); ++t)
        if (R.new_of_old[t] >= 0)
            for (int g = 0; g < 4; ++g) side[4 * t + g] = {R.new_of_old[t], g};
    Persistence P = persistence(T, S, R, S2);
    for (std::size_t F = 0; F < S2.faces.size(); ++F)
        for (const auto& [ot, of, rep] : P.face[F]) {
            const auto& fc = S2.faces[F];
            side[4 * ot + of] = rep ? std::array{fc.tet, fc.face} : std::array{fc.tet2, fc.face2};
        }
    // BFS tree of the created tets through faces inside the ball, rooted at the anchor
    const int n2 = R.T.size();
    std::vector<char> outer(4 * n2, 0);
    for (const auto& [x, g] : side)
        if (x >= 0) outer[4 * x + g] = 1;
    std::vector<std::pair<int, int>> up(n2, {-1, -1});  // side (tet, face) crossed towards the root
    std::vector<char> seen(n2, 0);
    std::deque<int> q{anchor};
    seen[anchor] = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int g = 0; g < 4; ++g) {
            const auto& h = R.T.adj(x, g);
            if (outer[4 * x + g] || R.old_of_new[h.tet] >= 0 || seen[h.tet]) continue;
            seen[h.tet] = 1;
            up[h.tet] = {x, g};
            q.push_back(h.tet);
        }
    }
    // chain from created tet x to the anchor
    auto to_root = [&](int x, std::vector<Int>& c, int sign) {
        while (x != anchor) {
            if (!seen[x]) invalid_transit("created tetrahedra are not connected");
            auto [p, g] = up[x];
            add_crossing(c, S2, p, g, sign);
            x = p;
        }
    };

    auto path = [&](int from, int to, std::vector<Int>& c) {
        to_root(from, c, 1);
        to_root(to, c, -1);
    };

    f.edge.resize(S.faces.size());
    for (std::size_t F = 0; F < S.faces.size(); ++F) {
        const auto& fc = S.faces[F];
        std::vector<Int> c(S2.faces.size(), 0);
        const auto tail = side[4 * fc.tet2 + fc.face2], head = side[4 * fc.tet + fc.face];
        int at = f.vertex[fc.tet2];
        bool crossed = false;
        if (tail[0] >= 0) {
            if (tail[0] != at) path(at, tail[0], c);
            const auto& g = R.T.adj(tail[0], tail[1]);
            add_crossing(c, S2, g.tet, g.perm[tail[1]], 1);
            at = g.tet;
            crossed = head[0] >= 0 && at == head[0] && g.perm[tail[1]] == head[1];
        }
        if (head[0] >= 0 && !crossed) {
            const auto& g = R.T.adj(head[0], head[1]);
            if (g.tet != at) path(at, g.tet, c);
            add_crossing(c, S2, head[0], head[1], 1);
            at = head[0];
        }
        if (at != f.vertex[fc.tet]) path(at, f.vertex[fc.tet], c);
        f.edge[F] = std::move(c);
    }
    return f;
}

bool is_chain_map(const SpineComplex& C, const SpineComplex& C2, const SpineMap& f) {
    for (int k = 0; k < C.n1; ++k) {
        std::vector<Int> lhs(C2.n0, 0), rhs(C2.n0, 0);
        for (int j = 0; j < C2.n1; ++j)
            for (int i = 0; i < C2.n0; ++i) lhs[i] += C2.d1(i, j) * f.edge[k][j];
        for (int i = 0; i < C.n0; ++i) rhs[f.vertex[i]] += C.d1(i, k);
        if (lhs != rhs) return false;
    }
    SmithForm s2 = smith(C2.d2);
    for (int r = 0; r < C.n2; ++r) {
        std::vector<Int> col(C.n1);
        for (int k = 0; k < C.n1; ++k) col[k] = C.d2(k, r);
        if (!solve_integer(s2, C2.d2, f.push(col))) return false;
    }
    return true;
}

bool omega_class_carried(const Triangulation& T, const Skeleton& S, const PreBranching& w,
                         const MoveResult& R, const Skeleton& S2, const PreBranching& w2) {
    SpineMap f = spine_map(T, S, R, S2);
    std::vector<Int> diff = f.push(omega_chain(S, w));
    std::vector<Int> c2 = omega_chain(S2, w2);
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= c2[j];
    SpineComplex C2 = spine_complex(R.T, S2);
    return solve_integer(smith(C2.d2), C2.d2, diff).has_value();
}

std::vector<Rat> transport(const Triangulation& T, const Skeleton& S, const MoveResult& R,
                           const Skeleton& S2, const Branching& b2, const std::vector<Rat>& z) {
    Persistence P = persistence(T, S, R, S2);
    MeasureCone M = measure_cone(R.T, S2, b2);
    const int n = static_cast<int>(S2.edges.size());
    std::vector<int> free;
    std::vector<Rat> out(n, 0);
    for (int e = 0; e < n; ++e) {
        if (P.edge[e].empty()) {
            free.push_back(e);
            continue;
        }
        out[e] = z[P.edge[e][0].first];
        for (auto [old, rel] : P.edge[e])
            if (z[old] != out[e]) invalid_transit("merged regions carry different weights");
    }
    if (!free.empty()) {
        // switches restricted to the free unknowns: A y = -(A fixed)
        RatMatrix A(M.switches.rows, static_cast<int>(free.size()));
        std::vector<Rat> rhs(M.switches.rows, 0);
        for (int i = 0; i < M.switches.rows; ++i) {
            for (int e = 0; e < n; ++e) rhs[i] -= M.switches(i, e) * out[e];
            for (std::size_t k = 0; k < free.size(); ++k) A(i, static_cast<int>(k)) = M.switches(i, free[k]);
        }
        if (rank(A) != static_cast<int>(free.size())) invalid_transit("new regions are not determined");
        // solve by elimination on the augmented system
        RatMatrix Aug(A.rows, A.cols + 1);
        for (int i = 0; i < A.rows; ++i) {
            for (int j = 0; j < A.cols; ++j) Aug(i, j) = A(i, j);
            Aug(i, A.cols) = rhs[i];
        }
        auto ns = nullspace(Aug);
        bool done = false;
        for (const auto& v : ns)
            if (v[A.cols] != 0) {
                for (std::size_t k = 0; k < free.size(); ++k) out[free[k]] = -v[k] / v[A.cols];
                done = true;
                break;
            }
        if (!done) invalid_transit("switches cannot be met");
    }
    if (!satisfies_switches(M, out)) invalid_transit("switches cannot be met");
    return out;
}

}  // namespace btw
