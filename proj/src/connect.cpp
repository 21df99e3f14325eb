#include "btw/connect.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <tuple>
#include <set>
#include <unordered_set>

#include "walker.hpp"

namespace btw {

using detail::need_iso;
using detail::Rec;
using detail::sig;
using detail::walk_back;
using detail::walk_forward;
using detail::Walker;

std::string state_signature(const Triangulation& T, const Branching& b) { return decorated_signature(T, b); }
std::string state_signature(const Triangulation& T, const PreBranching& w) { return decorated_signature(T, w); }
std::string state_signature(const Triangulation& T, const Naked&) { return signature(T); }

// ---- replay ----

namespace {

template <class D>
Walker<D> run(const Triangulation& T, const D& d, const MoveSequence& s) {
    if (s.decoration != detail::decoration_name<D>())
        detail::replay_failure("sequence decoration is " + s.decoration);
    Walker<D> w(T, d);
    w.keep_path = false;
    for (std::size_t k = 0; k < s.steps.size(); ++k) {
        const DecoratedTransit<D>* tr = nullptr;
        try {
            tr = w.step(s.steps[k]);
        } catch (const Error& e) {
            if (e.code != "InvalidSite" && e.code != "InvalidDecoration") throw;
            detail::replay_failure("step " + std::to_string(k) + ": " + e.what());
        }
        if (!tr) detail::replay_failure("step " + std::to_string(k) + " (" + to_string(s.steps[k].move) + ") cannot be performed");
    }
    return w;
}

template <class D>
bool verify_impl(const Triangulation& T, const D& d, const MoveSequence& s) {
    if (sig(T, d) != s.start) return false;
    try {
        auto w = run(T, d, s);
        return sig(w.T, w.d) == s.end;
    } catch (const Error& e) {
        if (e.code == "ReplayFailure") return false;
        throw;
    }
}

}  // namespace

Decorated<Branching> replay(const Triangulation& T, const Branching& b, const MoveSequence& s) {
    auto w = run(T, b, s);
    return {std::move(w.T), std::move(w.d)};
}
Decorated<PreBranching> replay(const Triangulation& T, const PreBranching& w, const MoveSequence& s) {
    auto r = run(T, w, s);
    return {std::move(r.T), std::move(r.d)};
}
Triangulation replay(const Triangulation& T, const MoveSequence& s) { return run(T, Naked{}, s).T; }

bool verify(const Triangulation& T, const Branching& b, const MoveSequence& s) { return verify_impl(T, b, s); }
bool verify(const Triangulation& T, const PreBranching& w, const MoveSequence& s) { return verify_impl(T, w, s); }
bool verify(const Triangulation& T, const MoveSequence& s) { return verify_impl(T, Naked{}, s); }

json sequence_to_json(const MoveSequence& s) {
    json steps = json::array();
    for (const auto& st : s.steps) {
        json site = json::object();
        const auto& keys = site_keys(st.move.kind);
        for (std::size_t k = 0; k < keys.size(); ++k) site[keys[k]] = st.move.site[k];
        steps.push_back({{"kind", to_string(st.move.kind)}, {"site", site}, {"choice", st.choice}});
    }
    return {{"format", "btw-moves/1"}, {"decoration", s.decoration}, {"start", s.start},
            {"end", s.end},           {"steps", steps},            {"notes", s.notes}};
}

MoveSequence sequence_from_json(const json& j) {
    try {
        if (j.at("format") != "btw-moves/1") throw Error("ParseError", "unknown move sequence format");
        MoveSequence s;
        s.decoration = j.at("decoration").get<std::string>();
        s.start = j.at("start").get<std::string>();
        s.end = j.at("end").get<std::string>();
        if (j.contains("notes")) s.notes = j.at("notes").get<std::vector<std::string>>();
        for (const auto& st : j.at("steps")) {
            Step x;
            x.move.kind = move_kind_from_string(st.at("kind").get<std::string>());
            for (const auto& key : site_keys(x.move.kind)) x.move.site.push_back(st.at("site").at(key).get<int>());
            x.choice = st.value("choice", 0);
            s.steps.push_back(std::move(x));
        }
        return s;
    } catch (const json::exception& e) {
        throw Error("ParseError", std::string("move sequence: ") + e.what());
    }
}

Move transfer(const Triangulation& A, const Move& m, const Triangulation&, const Isomorphism& f) {
    Move out = m;
    const int t = m.site[0];
    const Perm4& p = f.perm[t];
    out.site[0] = f.tet[t];
    switch (m.kind) {
        case MoveKind::M23:
        case MoveKind::M02T:
        case MoveKind::M20T:
        case MoveKind::M41: out.site[1] = p[m.site[1]]; break;
        case MoveKind::M32:
        case MoveKind::M20Q:
            out.site[1] = p[m.site[1]];
            out.site[2] = p[m.site[2]];
            break;
        case MoveKind::M14: break;
        case MoveKind::M02Q: {
            const int a = m.site[1], b = m.site[2];
            out.site[1] = p[a];
            out.site[2] = p[b];
            auto cd = complement_pair(a, b);
            if (p[cd[0]] > p[cd[1]]) {
                // the walk on the image runs the other way round
                const int n = static_cast<int>(edge_walk(A, {t, a, b, cd[0], cd[1]}).size());
                out.site[3] = n - 1 - m.site[4];
                out.site[4] = n - 1 - m.site[3];
            }
            break;
        }
    }
    return out;
}

// ---- good ambiguous edges ----

namespace {

struct Occ {
    int tet, a, b;
};

std::optional<Occ> carry_edge(const Skeleton& S, const MoveResult& R, Occ o) {
    if (R.new_of_old[o.tet] >= 0) return Occ{R.new_of_old[o.tet], o.a, o.b};
    const int dir = S.edge_dir(o.tet, o.a, o.b);
    for (const auto& x : S.edges[S.edge_of[o.tet][edge_index(o.a, o.b)]].orbit) {
        const int nt = R.new_of_old[x.tet];
        if (nt >= 0) return dir > 0 ? Occ{nt, x.a, x.b} : Occ{nt, x.b, x.a};
    }
    return std::nullopt;
}

std::optional<std::pair<int, int>> carry_vertex(const Skeleton& S, const MoveResult& R, std::pair<int, int> o) {
    if (R.new_of_old[o.first] >= 0) return std::pair{R.new_of_old[o.first], o.second};
    for (auto [t, v] : S.vertices[S.vertex_of[o.first][o.second]].orbit)
        if (R.new_of_old[t] >= 0) return std::pair{R.new_of_old[t], v};
    return std::nullopt;
}

int class_of(const Skeleton& S, Occ o) { return S.edge_of[o.tet][edge_index(o.a, o.b)]; }

using BWalker = Walker<Branching>;

// Depth-first over the 2-3 moves in the star of the tracked edge; the
// classes vector holds the tracked class before every recorded step.
std::optional<BWalker> expand_rec(const BWalker& w, Occ occ, std::vector<int>& classes) {
    Skeleton S = skeleta(w.T);
    const int e = class_of(S, occ);
    if (!is_good_ambiguous(w.T, S, w.d, e)) return std::nullopt;
    const EdgeClass& ec = S.edges[e];
    if (ec.valence() == 2) {
        BWalker x = w;
        try {
            if (!x.negative_step({MoveKind::M20Q, {occ.tet, occ.a, occ.b}})) return std::nullopt;
            const std::string target = sig(w.T, invert(w.T, S, w.d, e));
            const Move back = x.path.back().tr.result.inverse;
            if (!x.positive(back, [&](const BranchedTransit& t) { return sig(t.result.T, t.after) == target; }))
                return std::nullopt;
            std::vector<Branching> expected;
            for (std::size_t k = 0; k < w.path.size(); ++k) {
                const auto& r = w.path[k];
                expected.push_back(invert(r.before, skeleta(r.before), r.dbefore, classes[k]));
            }
            walk_back(x, w.path, invert(w.T, S, w.d, e), &expected);
        } catch (const Error& err) {
            if (err.code != "InvalidSite" && err.code != "ReplayFailure") throw;
            return std::nullopt;
        }
        return x;
    }
    // faces of the star, those between conflicting link edges first
    const int n = static_cast<int>(ec.link.size());
    std::vector<std::pair<int, int>> faces;
    for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < n; ++k) {
            const LinkStep &s = ec.link[k], &t = ec.link[(k + 1) % n];
            const bool conflict = edge_orientation(S, w.d, s.tet, s.c, s.d) != edge_orientation(S, w.d, t.tet, t.c, t.d);
            if (conflict != (pass == 0)) continue;
            if (s.tet == t.tet) continue;
            faces.emplace_back(s.tet, s.c);
        }
    std::set<int> seen;
    for (auto [t, f] : faces) {
        if (!seen.insert(S.face_of[t][f]).second) continue;
        std::vector<BranchedTransit> outs;
        try {
            outs = enhance_positive(w.T, {MoveKind::M23, {t, f}}, w.d);
        } catch (const Error& err) {
            if (err.code != "InvalidSite") throw;
            continue;
        }
        for (std::size_t k = 0; k < outs.size(); ++k) {
            auto next = carry_edge(S, outs[k].result, occ);
            if (!next) continue;
            BWalker y = w;
            y.take(outs[k], static_cast<int>(k));
            classes.push_back(e);
            if (auto r = expand_rec(y, *next, classes)) return r;
            classes.pop_back();
        }
    }
    return std::nullopt;
}

// Appends the inversion of edge class e to w.
void expand_into(BWalker& w, int e) {
    Skeleton S = skeleta(w.T);
    if (e < 0 || e >= static_cast<int>(S.edges.size()) || !is_good_ambiguous(w.T, S, w.d, e))
        throw Error("NotGoodAmbiguous", "edge " + std::to_string(e) + " is not good ambiguous");
    const auto& o = S.edges[e].orbit.front();
    BWalker fresh(w.T, w.d);
    std::vector<int> classes;
    auto r = expand_rec(fresh, {o.tet, o.a, o.b}, classes);
    if (!r) throw Error("NotFound", "no ideal expansion found for the inversion of edge " + std::to_string(e));
    w.append(*r);
}

}  // namespace

MoveSequence expand_good_inversion(const Triangulation& T, const Branching& b, int e) {
    BWalker w(T, b);
    expand_into(w, e);
    return detail::to_sequence(w, sig(T, b));
}

// ---- arches ----

namespace {

bool new_vertex_pit(const BranchedTransit& t) {
    const auto& R = t.result;
    const int base = R.T.size() - 4;
    auto rk = vertex_ranks(R.T, skeleta(R.T), t.after);
    for (int k = 0; k < 4; ++k)
        if (rk[base + k][k] != 3) return false;
    return true;
}

}  // namespace

std::vector<ArchMarking> arch_markings(int tet) {
    std::vector<ArchMarking> out;
    for (int k = 0; k < 6; ++k)
        for (int end : kEdgeVerts[k]) out.push_back({tet, k, end});
    return out;
}

BranchedTransit pit_14(const Triangulation& T, const Branching& b, int tet) {
    for (auto& t : enhance_positive(T, {MoveKind::M14, {tet}}, b))
        if (new_vertex_pit(t)) return t;
    throw Error("NotFound", "no 1-4 enhancement makes the new vertex a pit");
}

ArchState insert_arch(const Triangulation& T, const Branching& b, const ArchMarking& m) {
    if (m.edge < 0 || m.edge > 5 || (m.end != kEdgeVerts[m.edge][0] && m.end != kEdgeVerts[m.edge][1]))
        throw Error("InvalidSite", "bad arch marking");
    BranchedTransit tr = pit_14(T, b, m.tet);
    const Triangulation& T2 = tr.result.T;
    const int base = T2.size() - 4;
    const int u = m.end, x = m.end == kEdgeVerts[m.edge][0] ? kEdgeVerts[m.edge][1] : kEdgeVerts[m.edge][0];
    auto ij = complement_pair(x, u);
    const int i = ij[0], j = ij[1];

    // arch vertices: 0 = x, 1 = u, 2 = the new vertex, 3 = the apex glued to x
    Triangulation T3 = T2;
    const int W = T3.size();
    T3.gluings.push_back({});
    auto glue = [&](int t1, int f1, int t2, const Perm4& p) {
        T3.gluings[t1][f1] = {t2, p};
        T3.gluings[t2][p[f1]] = {t1, p.inverse()};
    };
    glue(W, 3, base + i, Perm4(x, u, i, j));
    glue(W, 0, base + j, Perm4(i, u, j, x));
    T3.gluings[W][2] = {W, Perm4(0, 2, 1, 3)};
    T3.gluings[W][1] = {W, Perm4(0, 2, 1, 3)};
    validate(T3);

    // persistent edges keep their orientation; only the loop is free
    Skeleton S2 = skeleta(T2), S3 = skeleta(T3);
    const int ne = static_cast<int>(S3.edges.size());
    std::vector<int> dir(ne, 0);
    bool clash = false;
    for (int t = 0; t < W; ++t)
        for (int k = 0; k < 6; ++k) {
            const int a = kEdgeVerts[k][0], c = kEdgeVerts[k][1];
            const int want = edge_orientation(S2, tr.after, t, a, c) * S3.edge_dir(t, a, c);
            int& d = dir[S3.edge_of[t][k]];
            if (d != 0 && d != want) clash = true;
            d = want;
        }
    if (clash) throw Error("NotAdmissible", "the arch identifies edges with opposite orientations");
    std::vector<int> free;
    for (int e = 0; e < ne; ++e)
        if (dir[e] == 0) free.push_back(e);
    for (int mask = 0; mask < (1 << free.size()); ++mask) {
        Branching b3{dir};
        for (std::size_t k = 0; k < free.size(); ++k) b3.dir[free[k]] = (mask >> k) & 1 ? -1 : 1;
        if (!is_branching(T3, S3, b3)) continue;
        ArchState out{T3, b3, W, {}, tr.result.new_of_old, ""};
        for (int k = 0; k < 4; ++k) out.local.push_back(base + k);
        out.local.push_back(W);
        out.loop_orientation = edge_orientation(S3, b3, W, 3, 0) > 0 ? "w->x" : "x->w";
        return out;
    }
    throw Error("NotAdmissible", "no branching extends across the arch");
}

namespace {

struct LocalState {
    Triangulation T;
    Branching b;
    std::vector<char> local;
};

std::string local_key(const LocalState& s) {
    Skeleton S = skeleta(s.T);
    TetLabels L = vertex_ranks(s.T, S, s.b);
    for (int t = 0; t < s.T.size(); ++t)
        if (s.local[t])
            for (auto& x : L[t]) x += 8;
    return signature(s.T, &L);
}

struct LocalMove {
    BranchedTransit tr;
    int choice;
};

// Candidate sites all of whose tetrahedra are local; not yet validated.
std::vector<Move> local_sites(const LocalState& s, const Skeleton& S, MoveKind k) {
    std::vector<Move> out;
    auto all_local = [&](const std::vector<int>& ts) {
        return std::all_of(ts.begin(), ts.end(), [&](int t) { return s.local[t] != 0; });
    };
    switch (k) {
        case MoveKind::M23:
            for (const auto& F : S.faces)
                if (F.tet != F.tet2 && s.local[F.tet] && s.local[F.tet2]) out.push_back({k, {F.tet, F.face}});
            break;
        case MoveKind::M32:
        case MoveKind::M20Q: {
            const int val = k == MoveKind::M32 ? 3 : 2;
            for (const auto& ec : S.edges) {
                if (!ec.consistent || ec.valence() != val) continue;
                std::vector<int> ts;
                for (const auto& st : ec.link) ts.push_back(st.tet);
                if (all_local(ts)) out.push_back({k, {ec.link[0].tet, ec.link[0].a, ec.link[0].b}});
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
                        if (!all_local({si.tet, ec.link[(i + 1) % n].tet, sj.tet, ec.link[(j + 1) % n].tet})) continue;
                        out.push_back({k, {ec.link[0].tet, ec.link[0].a, ec.link[0].b, i, j}});
                    }
            }
            break;
        default: break;
    }
    return out;
}

std::vector<LocalMove> local_moves(const LocalState& s, const std::vector<MoveKind>& kinds, int max_tets) {
    Skeleton S = skeleta(s.T);
    std::vector<LocalMove> out;
    for (MoveKind k : kinds) {
        if (s.T.size() + tet_delta(k) > max_tets) continue;
        for (const Move& m : local_sites(s, S, k)) {
            try {
                if (is_positive(k)) {
                    auto outs = enhance_positive(s.T, m, s.b);
                    for (std::size_t c = 0; c < outs.size(); ++c) out.push_back({std::move(outs[c]), static_cast<int>(c)});
                } else {
                    auto o = enhance_negative(s.T, m, s.b);
                    if (!o.blocked()) out.push_back({std::move(*o.transit), 0});
                }
            } catch (const Error& e) {
                if (e.code != "InvalidSite") throw;
            }
        }
    }
    return out;
}

LocalState advance(const LocalState& s, const BranchedTransit& tr) {
    LocalState n{tr.result.T, tr.after, std::vector<char>(static_cast<std::size_t>(tr.result.T.size()), 0)};
    for (int t = 0; t < n.T.size(); ++t) {
        const int o = tr.result.old_of_new[t];
        n.local[t] = o < 0 ? 1 : s.local[o];
    }
    return n;
}

const std::vector<MoveKind> kIdealKinds = {MoveKind::M32, MoveKind::M20Q, MoveKind::M23, MoveKind::M02Q};

// The five-move pattern read off the pictures: two 3-2 moves, two 2-3
// moves, then a negative sliding lune (2-0 quadrilateral).
const std::vector<MoveKind> kFigure = {MoveKind::M32, MoveKind::M32, MoveKind::M23, MoveKind::M23, MoveKind::M20Q};

bool figure_dfs(const LocalState& s, std::size_t k, const std::string& target, BWalker& w) {
    if (k == kFigure.size()) return sig(s.T, s.b) == target;
    for (auto& lm : local_moves(s, {kFigure[k]}, 1 << 20)) {
        if (kFigure[k] == MoveKind::M20Q) {
            // the lune must be a sliding transit
            Skeleton S2 = skeleta(lm.tr.result.T);
            if (classify_02q(lm.tr.result.T, S2, lm.tr.after, lm.tr.result.inverse).cls == TransitClass::Bump)
                continue;
        }
        LocalState n = advance(s, lm.tr);
        BWalker saved = w;
        w.take(lm.tr, lm.choice);
        if (figure_dfs(n, k + 1, target, w)) return true;
        w = std::move(saved);
    }
    return false;
}

int figure_balance() {
    int d = 0;
    for (MoveKind k : kFigure) d += tet_delta(k);
    return d;
}

struct UndoResult {
    BWalker w;
    std::string how;
};

UndoResult undo_walk(const ArchState& X, const std::string& target, int original_size) {
    LocalState s0{X.T, X.b, std::vector<char>(static_cast<std::size_t>(X.T.size()), 0)};
    for (int t : X.local) s0.local[t] = 1;

    if (figure_balance() == original_size - X.T.size()) {
        BWalker w(X.T, X.b);
        if (figure_dfs(s0, 0, target, w)) return {std::move(w), "figure"};
    }

    // bounded best-first search over local ideal moves; a move removes at
    // most two tetrahedra, which gives an admissible distance estimate
    const int max_tets = X.T.size() + 1, max_depth = 8, budget = 50000;
    struct Node {
        LocalState s;
        int parent;
        Step step;
        int depth;
    };
    auto h = [&](const LocalState& n) { return std::max(0, (n.T.size() - original_size + 1) / 2); };
    std::vector<Node> nodes;
    std::unordered_set<std::string> seen{local_key(s0)};
    nodes.push_back({s0, -1, {}, 0});
    using Key = std::tuple<int, int, int>;  // (estimate, remaining, order)
    std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
    open.push({h(s0), h(s0), 0});
    while (!open.empty() && static_cast<int>(nodes.size()) < budget) {
        const std::size_t q = static_cast<std::size_t>(std::get<2>(open.top()));
        open.pop();
        if (nodes[q].depth >= max_depth) continue;
        auto moves = local_moves(nodes[q].s, kIdealKinds, max_tets);
        for (auto& lm : moves) {
            LocalState n = advance(nodes[q].s, lm.tr);
            if (!seen.insert(local_key(n)).second) continue;
            const bool hit = sig(n.T, n.b) == target;
            const int d = nodes[q].depth + 1, hn = h(n);
            nodes.push_back({std::move(n), static_cast<int>(q), {lm.tr.move, lm.choice}, d});
            if (hit) {
                std::vector<Step> steps;
                for (int k = static_cast<int>(nodes.size()) - 1; k > 0; k = nodes[static_cast<std::size_t>(k)].parent)
                    steps.push_back(nodes[static_cast<std::size_t>(k)].step);
                std::reverse(steps.begin(), steps.end());
                BWalker w(X.T, X.b);
                for (const auto& st : steps)
                    if (!w.step(st)) detail::replay_failure("local search path does not replay");
                return {std::move(w), "search"};
            }
            open.push({d + hn, hn, static_cast<int>(nodes.size()) - 1});
        }
    }
    throw Error("InvalidConfiguration", "no local ideal path undoes the arch");
}

}  // namespace

MoveSequence undo_bubble_arch(const Triangulation& T, const Branching& b, const ArchMarking& m) {
    ArchState X = insert_arch(T, b, m);
    UndoResult r = undo_walk(X, sig(T, b), T.size());
    MoveSequence s = detail::to_sequence(r.w, sig(X.T, X.b));
    s.notes.push_back(r.how);
    return s;
}

// ---- refinement pipelines ----

namespace {

// The logical state follows the naked plan with fixed numbering; the
// walker holds the state actually reached, isomorphic to it.
struct Side {
    BWalker w;
    Triangulation TL;
    Branching dL;
    std::vector<std::string> notes;

    Side(const Triangulation& T, const Branching& b) : w(T, b), TL(T), dL(b) {}

    template <class Pred>
    BranchedTransit logical(const Move& m, Pred pred) {
        for (auto& o : enhance_positive(TL, m, dL)) {
            if (!pred(o)) continue;
            Isomorphism f = need_iso(TL, dL, w.T, w.d);
            w.matching(transfer(TL, m, w.T, f), sig(o.result.T, o.after), &o.result.T, &o.after);
            TL = o.result.T;
            dL = o.after;
            return o;
        }
        throw Error("NotFound", "no enhancement of " + to_string(m) + " fits the plan");
    }

    // Ideal replacement of the pit 1-4 at tet: the arch state is reached
    // by running its undo path backwards.
    std::vector<int> arch(const ArchMarking& m) {
        ArchState X = insert_arch(TL, dL, m);
        UndoResult u = undo_walk(X, sig(TL, dL), TL.size());
        notes.push_back(u.how);
        walk_back(w, u.w.path, u.w.d);
        TL = X.T;
        dL = X.b;
        return X.new_of_old;
    }

    void invert_edge(int c) {
        Skeleton SL = skeleta(TL);
        const auto& o = SL.edges[c].orbit.front();
        Isomorphism f = need_iso(TL, dL, w.T, w.d);
        Skeleton SA = skeleta(w.T);
        expand_into(w, SA.edge_of[f.tet[o.tet]][edge_index(f.perm[o.tet][o.a], f.perm[o.tet][o.b])]);
        dL = invert(TL, SL, dL, c);
    }
};

void remap(std::vector<int>& v, const std::vector<int>& new_of_old) {
    for (int& x : v)
        if (x >= 0) x = new_of_old[x];
}

struct Plan {
    bool ideal = false;
    const Branching* other = nullptr;  // the decoration of the twin pipeline
};

void run_refine(Side& s, const Triangulation& T0, const Plan& plan) {
    const int n = T0.size();
    Skeleton S0 = skeleta(T0);
    std::vector<int> cur(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cur[i] = i;
    std::vector<int> star(static_cast<std::size_t>(4 * n), -1);

    auto after_14 = [&](const std::vector<int>& new_of_old, int base, int slot) {
        remap(cur, new_of_old);
        remap(star, new_of_old);
        for (int k = 0; k < 4; ++k) star[4 * slot + k] = base + k;
    };

    for (int i = 0; i < n; ++i) {
        const int tet = cur[i];
        const int base = s.TL.size() - 1;
        if (!plan.ideal) {
            auto tr = s.logical({MoveKind::M14, {tet}}, new_vertex_pit);
            after_14(tr.result.new_of_old, base, i);
            continue;
        }
        // an edge of the tet where both decorations agree, e from its head
        Skeleton SL = skeleta(s.TL);
        int edge = -1, head = -1;
        for (int k = 0; k < 6 && edge < 0; ++k) {
            const int a = kEdgeVerts[k][0], c = kEdgeVerts[k][1];
            const int o = edge_orientation(SL, s.dL, tet, a, c);
            if (o == edge_orientation(S0, *plan.other, i, a, c)) edge = k, head = o > 0 ? c : a;
        }
        if (edge < 0)
            throw Error("MarkingFailure", "the two branchings disagree on every edge of tetrahedron " + std::to_string(i));
        after_14(s.arch({tet, edge, head}), base, i);
    }
    // second round: beside every face, in the cone on its representative side
    std::vector<int> face_tet(S0.faces.size(), -1);
    for (std::size_t f = 0; f < S0.faces.size(); ++f) {
        const int t0 = S0.faces[f].tet, f0 = S0.faces[f].face;
        const int cone = star[static_cast<std::size_t>(4 * t0 + f0)];
        const int base = s.TL.size() - 1;
        std::vector<int> new_of_old;
        if (!plan.ideal) {
            new_of_old = s.logical({MoveKind::M14, {cone}}, new_vertex_pit).result.new_of_old;
        } else {
            const int x = f0 == 0 ? 1 : 0;
            new_of_old = s.arch({cone, edge_index(std::min(x, f0), std::max(x, f0)), f0});
        }
        remap(cur, new_of_old);
        remap(star, new_of_old);
        remap(face_tet, new_of_old);
        face_tet[f] = base + f0;
    }
    // kill every original face; the new edge points into the newer vertex
    for (std::size_t f = 0; f < S0.faces.size(); ++f) {
        auto tr = s.logical({MoveKind::M23, {face_tet[f], S0.faces[f].face}}, [](const BranchedTransit& t) {
            const int base = t.result.T.size() - 3;
            return edge_orientation(skeleta(t.result.T), t.after, base, 3, 2) > 0;
        });
        remap(face_tet, tr.result.new_of_old);
        remap(star, tr.result.new_of_old);
    }
}

std::vector<int> differing_edges(const Side& l, const Side& r) {
    if (!(l.TL == r.TL)) throw Error("ReplayFailure", "the two pipelines diverged");
    std::vector<int> out;
    for (std::size_t e = 0; e < l.dL.dir.size(); ++e)
        if (l.dL.dir[e] != r.dL.dir[e]) out.push_back(static_cast<int>(e));
    return out;
}

BWalker connect_walk(const Triangulation& T, const Branching& b, const Branching& b2, bool ideal,
                     std::vector<std::string>* notes) {
    Side L(T, b), R(T, b2);
    run_refine(L, T, {ideal, &b2});
    run_refine(R, T, {ideal, &b});
    for (int e : differing_edges(L, R)) L.invert_edge(e);
    walk_back(L.w, R.w.path, R.w.d);
    if (notes) {
        notes->insert(notes->end(), L.notes.begin(), L.notes.end());
        notes->insert(notes->end(), R.notes.begin(), R.notes.end());
    }
    return std::move(L.w);
}

}  // namespace

Refinement refine_two_step(const Triangulation& T, const Branching& b) {
    Side s(T, b);
    run_refine(s, T, {});
    Refinement out{s.w.T, s.w.d, detail::to_sequence(s.w, sig(T, b)), {}, {}, {}};

    // carry the original edges and the new vertices along the recorded path
    Skeleton S0 = skeleta(T);
    std::vector<Occ> edges;
    for (const auto& ec : S0.edges) edges.push_back({ec.orbit[0].tet, ec.orbit[0].a, ec.orbit[0].b});
    std::vector<std::pair<int, int>> verts;
    std::vector<bool> second;
    int n14 = 0;
    for (const auto& r : s.w.path) {
        Skeleton S = skeleta(r.before);
        for (auto& o : edges) o = *carry_edge(S, r.tr.result, o);
        for (auto& v : verts) v = *carry_vertex(S, r.tr.result, v);
        if (r.tr.move.kind == MoveKind::M14) {
            verts.emplace_back(r.tr.result.T.size() - 4, 0);
            second.push_back(n14++ >= T.size());
        }
    }
    Skeleton S = skeleta(out.T);
    for (auto o : edges) out.original_edges.push_back(class_of(S, o));
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const int v = S.vertex_of[verts[k].first][verts[k].second];
        out.added_vertices.push_back(v);
        if (second[k]) out.second_round.push_back(v);
    }
    return out;
}

MoveSequence connect_completed(const Triangulation& T, const Branching& b, const Branching& b2) {
    const std::string start = sig(T, b);
    if (b == b2) return {"branching", start, start, {}, {}};
    BWalker w = connect_walk(T, b, b2, false, nullptr);
    return detail::to_sequence(w, start);
}

namespace {

// Branchings b, b2 admit the twin marking discipline when they agree on
// some edge of every tetrahedron.
bool markable(const Triangulation& T, const Skeleton& S, const Branching& b, const Branching& b2) {
    for (int t = 0; t < T.size(); ++t) {
        bool ok = false;
        for (int k = 0; k < 6 && !ok; ++k) {
            const int a = kEdgeVerts[k][0], c = kEdgeVerts[k][1];
            ok = edge_orientation(S, b, t, a, c) == edge_orientation(S, b2, t, a, c);
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace

MoveSequence connect_ideal(const Triangulation& T, const Branching& b, const Branching& b2) {
    const std::string start = sig(T, b);
    if (b == b2) return {"branching", start, start, {}, {}};
    Skeleton S = skeleta(T);
    std::vector<std::string> notes;
    if (markable(T, S, b, b2)) {
        BWalker w = connect_walk(T, b, b2, true, &notes);
        MoveSequence s = detail::to_sequence(w, start);
        s.notes.push_back("direct");
        return s;
    }
    // route through intermediate branchings, each leg markable
    auto all = enumerate_branchings(T, S);
    std::map<Branching, Branching> parent;
    std::deque<Branching> q{b};
    parent.emplace(b, b);
    while (!q.empty() && !parent.count(b2)) {
        Branching x = q.front();
        q.pop_front();
        for (const auto& y : all)
            if (!parent.count(y) && markable(T, S, x, y)) {
                parent.emplace(y, x);
                q.push_back(y);
            }
    }
    if (!parent.count(b2))
        throw Error("MarkingFailure", "no chain of branchings admits twin markings on every tetrahedron");
    std::vector<Branching> chain{b2};
    while (!(chain.back() == b)) chain.push_back(parent.at(chain.back()));
    std::reverse(chain.begin(), chain.end());
    BWalker w(T, b);
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        BWalker leg = connect_walk(T, chain[k], chain[k + 1], true, &notes);
        walk_forward(w, leg.path);
    }
    MoveSequence s = detail::to_sequence(w, start);
    s.notes.push_back("via " + std::to_string(chain.size() - 2) + " intermediate branching(s)");
    return s;
}

// ---- make_branchable ----

Branchable make_branchable(const Triangulation& T, int budget) {
    Walker<Naked> start(T, Naked{});
    if (has_branching(T)) return {T, detail::to_sequence(start, signature(T))};
    struct Node {
        Triangulation T;
        int parent;
        Step step;
    };
    std::vector<Node> nodes{{T, -1, {}}};
    std::unordered_set<std::string> seen{signature(T)};
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        for (const Move& m : enumerate_sites(nodes[q].T, MoveKind::M23)) {
            MoveResult R = apply(nodes[q].T, m);
            if (!seen.insert(signature(R.T)).second) continue;
            const bool done = has_branching(R.T);
            nodes.push_back({std::move(R.T), static_cast<int>(q), {m, 0}});
            if (done) {
                std::vector<Step> steps;
                for (int k = static_cast<int>(nodes.size()) - 1; k > 0; k = nodes[static_cast<std::size_t>(k)].parent)
                    steps.push_back(nodes[static_cast<std::size_t>(k)].step);
                std::reverse(steps.begin(), steps.end());
                MoveSequence s{"none", signature(T), signature(nodes.back().T), steps, {}};
                return {nodes.back().T, std::move(s)};
            }
            if (static_cast<int>(nodes.size()) >= budget) throw Error("BudgetExceeded", "no branchable triangulation within budget");
        }
    }
    throw Error("BudgetExceeded", "positive 2-3 moves exhausted without a branching");
}

}  // namespace btw
