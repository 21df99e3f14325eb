#include <chrono>
#include <map>
#include <random>
#include <set>

#include "btw/census.hpp"
#include "btw/connect.hpp"
#include "btw/invariants.hpp"
#include "doctest.h"
#include "walks.hpp"

using namespace btw;

namespace {

Triangulation doubled_tet() {
    Triangulation T;
    T.gluings.resize(2);
    for (int f = 0; f < 4; ++f) {
        T.gluings[0][f] = {1, Perm4()};
        T.gluings[1][f] = {0, Perm4()};
    }
    return T;
}

Triangulation h2_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(0, 1, 3, 2)); }

Triangulation random_relabel(const Triangulation& T, std::mt19937& rng, Relabeling& r) {
    r.old_of_new.resize(T.size());
    std::iota(r.old_of_new.begin(), r.old_of_new.end(), 0);
    std::shuffle(r.old_of_new.begin(), r.old_of_new.end(), rng);
    r.frame.clear();
    for (int k = 0; k < T.size(); ++k) r.frame.push_back(Perm4::from_index(static_cast<int>(rng() % 24)));
    return relabel(T, r);
}

bool ideal_only(const MoveSequence& s) {
    for (const auto& st : s.steps)
        if (!is_ideal(st.move.kind)) return false;
    return true;
}

}  // namespace

TEST_CASE("moves carried along isomorphisms give isomorphic results") {
    std::mt19937 rng(3);
    std::vector<Triangulation> base{census_m003(), census_m004(), h2_tet(), doubled_tet()};
    for (const auto& m : enumerate_sites(census_m004(), MoveKind::M23)) base.push_back(apply(census_m004(), m).T);
    int checked = 0;
    for (const auto& A : base) {
        for (int rep = 0; rep < 3; ++rep) {
            Relabeling r;
            Triangulation B = random_relabel(A, rng, r);
            auto f = isomorphism(A, nullptr, B, nullptr);
            REQUIRE(f);
            for (auto k : {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q, MoveKind::M02T,
                           MoveKind::M20T, MoveKind::M14, MoveKind::M41})
                for (const auto& m : enumerate_sites(A, k)) {
                    Move m2 = transfer(A, m, B, *f);
                    CHECK(signature(apply(A, m).T) == signature(apply(B, m2).T));
                    ++checked;
                }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("sequences replay and round trip through json") {
    Triangulation T = census_m004();
    auto bs = enumerate_branchings(T);
    REQUIRE(!bs.empty());
    std::mt19937 rng(8);
    MoveSequence s{"branching", state_signature(T, bs[0]), "", {}, {}};
    Triangulation cur = T;
    Branching b = bs[0];
    for (int k = 0; k < 12; ++k) {
        auto tr = walks::random_ideal_transit(cur, b, rng, 5);
        if (!tr) continue;
        int choice = 0;
        if (is_positive(tr->move.kind)) {
            auto outs = enhance_positive(cur, tr->move, b);
            for (std::size_t c = 0; c < outs.size(); ++c)
                if (outs[c].after == tr->after) choice = static_cast<int>(c);
        }
        s.steps.push_back({tr->move, choice});
        cur = tr->result.T;
        b = tr->after;
    }
    s.end = state_signature(cur, b);
    CHECK(verify(T, bs[0], s));
    MoveSequence back = sequence_from_json(json::parse(sequence_to_json(s).dump()));
    CHECK(back.steps == s.steps);
    CHECK(verify(T, bs[0], back));
    MoveSequence bad = s;
    bad.end = state_signature(T, bs[0]);
    if (!s.steps.empty()) CHECK(!verify(T, bs[0], bad));
    CHECK_THROWS_AS(sequence_from_json(json{{"format", "other"}}), Error);
}

TEST_CASE("refinement") {
    for (const auto& T : {census_m004(), doubled_tet()}) {
        for (const auto& b : enumerate_branchings(T)) {
            Refinement r = refine_two_step(T, b);
            CHECK(r.T.size() == 12 * T.size());
            CHECK(verify(T, b, r.seq));
            Skeleton S = skeleta(r.T);
            Skeleton S0 = skeleta(T);
            for (std::size_t k = 0; k < r.original_edges.size(); ++k) {
                const int e = r.original_edges[k];
                CHECK(is_good_ambiguous(r.T, S, r.b, e));
                // orientation kept: compare along a carried occurrence
            }
            CHECK(static_cast<int>(r.added_vertices.size()) == T.size() + static_cast<int>(S0.faces.size()));
            auto ranks = vertex_ranks(r.T, S, r.b);
            for (int v : r.second_round)
                for (auto [t, lv] : S.vertices[v].orbit) CHECK(ranks[t][lv] == 3);
        }
    }
}

TEST_CASE("inverting a good ambiguous edge") {
    Triangulation T0 = census_m004();
    auto bs = enumerate_branchings(T0);
    Skeleton S0 = skeleta(T0);
    for (int e = 0; e < static_cast<int>(S0.edges.size()); ++e)
        if (!is_good_ambiguous(T0, S0, bs[0], e))
            try {
                expand_good_inversion(T0, bs[0], e);
                FAIL("expected NotGoodAmbiguous");
            } catch (const Error& x) {
                CHECK(x.code == "NotGoodAmbiguous");
            }

    // valence two: created by a positive quadrilateral move
    int seen2 = 0;
    for (const auto& m : enumerate_sites(T0, MoveKind::M02Q))
        for (const auto& tr : enhance_positive(T0, m, bs[0])) {
            Skeleton S = skeleta(tr.result.T);
            for (int e : good_ambiguous_edges(tr.result.T, S, tr.after)) {
                if (S.edges[e].valence() != 2) continue;
                ++seen2;
                MoveSequence s = expand_good_inversion(tr.result.T, tr.after, e);
                REQUIRE(s.steps.size() == 2);
                CHECK(s.steps[0].move.kind == MoveKind::M20Q);
                CHECK(s.steps[1].move.kind == MoveKind::M02Q);
                CHECK(s.end == state_signature(tr.result.T, invert(tr.result.T, S, tr.after, e)));
            }
        }
    CHECK(seen2 > 0);

    Refinement r = refine_two_step(T0, bs[0]);
    Skeleton S = skeleta(r.T);
    for (int e : r.original_edges) {
        const int k = S.edges[e].valence();
        MoveSequence s = expand_good_inversion(r.T, r.b, e);
        CHECK(static_cast<int>(s.steps.size()) == 2 * (k - 2) + 2);
        int pos23 = 0;
        for (const auto& st : s.steps) pos23 += st.move.kind == MoveKind::M23;
        CHECK(pos23 == k - 2);
        CHECK(ideal_only(s));
        CHECK(verify(r.T, r.b, s));
        Branching inv = invert(r.T, S, r.b, e);
        CHECK(s.end == state_signature(r.T, inv));
        // and back again
        MoveSequence back = expand_good_inversion(r.T, inv, e);
        CHECK(back.end == state_signature(r.T, r.b));
    }
}

TEST_CASE("completed connectivity") {
    Triangulation T = census_m004();
    auto bs = enumerate_branchings(T);
    REQUIRE(bs.size() == 4);
    CHECK(connect_completed(T, bs[1], bs[1]).steps.empty());
    for (std::size_t j = 1; j < bs.size(); ++j) {
        MoveSequence s = connect_completed(T, bs[0], bs[j]);
        CHECK(verify(T, bs[0], s));
        CHECK(s.end == state_signature(T, bs[j]));
        bool ideal = true;
        for (const auto& st : s.steps) ideal = ideal && (is_ideal(st.move.kind) || st.move.kind == MoveKind::M14 ||
                                                         st.move.kind == MoveKind::M41);
        CHECK(ideal);
    }
}

TEST_CASE("arches") {
    for (const auto& T : {doubled_tet(), census_m004()}) {
        const auto bs = enumerate_branchings(T);
        for (std::size_t bi = 0; bi < bs.size(); ++bi) {
            int admissible = 0;
            for (const auto& m : arch_markings(0)) {
                ArchState X;
                try {
                    X = insert_arch(T, bs[bi], m);
                } catch (const Error& e) {
                    CHECK(e.code == "NotAdmissible");
                    continue;
                }
                ++admissible;
                CHECK(X.T.size() == T.size() + 4);
                CHECK_NOTHROW(validate(X.T));
                CHECK(orientation(X.T).orientable);
                CHECK(is_branching(X.T, skeleta(X.T), X.b));
                if (bi == 0) {
                    MoveSequence u = undo_bubble_arch(T, bs[bi], m);
                    REQUIRE(!u.notes.empty());
                    CHECK((u.notes[0] == "figure" || u.notes[0] == "search"));
                    CHECK(ideal_only(u));
                    CHECK(verify(X.T, X.b, u));
                    CHECK(u.end == state_signature(T, bs[bi]));
                }
            }
            CHECK(admissible == 6);
        }
    }
}

TEST_CASE("ideal connectivity") {
    Triangulation T = census_m004();
    auto bs = enumerate_branchings(T);
    CHECK(connect_ideal(T, bs[2], bs[2]).steps.empty());
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 3}}) {
        MoveSequence s = connect_ideal(T, bs[i], bs[j]);
        CHECK(ideal_only(s));
        CHECK(verify(T, bs[i], s));
        CHECK(s.end == state_signature(T, bs[j]));
    }
}

TEST_CASE("making a triangulation branchable") {
    Triangulation T = census_m003();
    REQUIRE(!has_branching(T));
    Branchable r = make_branchable(T);
    CHECK(!r.seq.steps.empty());
    CHECK(has_branching(r.T));
    CHECK(verify(T, r.seq));
    for (const auto& st : r.seq.steps) CHECK(st.move.kind == MoveKind::M23);
    auto h1 = [](const Triangulation& X) { return homology(spine_complex(X, skeleta(X)), 0).h1; };
    CHECK(h1(r.T) == h1(T));
    CHECK(make_branchable(census_m004()).seq.steps.empty());
    CHECK_THROWS_AS(make_branchable(T, 2), Error);
}

namespace {

int node_of(const ExploreResult& R, const std::string& s) {
    auto it = std::find(R.visited.begin(), R.visited.end(), s);
    return it == R.visited.end() ? -1 : static_cast<int>(it - R.visited.begin());
}

void check_paths(const ExploreResult& R, const std::vector<Triangulation>& starts, const std::vector<Branching>& bs) {
    for (std::size_t k = 0; k < R.visited.size(); k += 7) {
        const auto s = static_cast<std::size_t>(R.root[k]);
        CHECK(verify(starts[s], bs[s], R.paths[k]));
    }
}

}  // namespace

TEST_CASE("exploring full-b reaches a non-isomorphic branching") {
    Triangulation T = apply(census_m004(), enumerate_sites(census_m004(), MoveKind::M23)[0]).T;
    auto bs = enumerate_branchings(T);
    REQUIRE(bs.size() == 4);
    ExploreResult R = explore({T}, {bs[0]}, Relation::FullB, 3, 100000, 5);
    CHECK(R.fingerprints_constant);
    CHECK(R.components.size() == 1);
    int reached = 0;
    for (const auto& b : bs) {
        if (state_signature(T, b) == state_signature(T, bs[0])) continue;
        const int k = node_of(R, state_signature(T, b));
        REQUIRE(k >= 0);
        CHECK(verify(T, bs[0], R.paths[static_cast<std::size_t>(k)]));
        ++reached;
    }
    CHECK(reached > 0);
    check_paths(R, {T}, {bs[0]});
}

TEST_CASE("exploring pre-branchings keeps the omega classes apart") {
    Triangulation T = census_m004();
    auto ws = enumerate_prebranchings(T);
    std::vector<Triangulation> starts(ws.size(), T);
    ExploreResult R = explore(starts, ws, Relation::PB, 3, 100000, 5);
    CHECK(R.fingerprints_constant);
    std::map<std::string, std::set<int>> comps_of_fp;
    for (std::size_t k = 0; k < R.visited.size(); ++k) comps_of_fp[R.fingerprints[k]].insert(R.component[k]);
    CHECK(comps_of_fp.size() >= 2);
    for (std::size_t a = 0; a < ws.size(); ++a)
        for (std::size_t b = 0; b < ws.size(); ++b) {
            const int ka = node_of(R, state_signature(T, ws[a])), kb = node_of(R, state_signature(T, ws[b]));
            if (R.fingerprints[static_cast<std::size_t>(ka)] != R.fingerprints[static_cast<std::size_t>(kb)])
                CHECK(R.component[static_cast<std::size_t>(ka)] != R.component[static_cast<std::size_t>(kb)]);
        }
}

TEST_CASE("restricted explorations keep their fingerprints") {
    Triangulation T = census_m004();
    auto bs = enumerate_branchings(T);
    for (Relation r : {Relation::Sliding, Relation::NA}) {
        ExploreResult R = explore({T}, {bs[0]}, r, 3, 100000, 5);
        CHECK(R.fingerprints_constant);
        check_paths(R, {T}, {bs[0]});
    }
    ExploreResult small = explore({T}, {bs[0]}, Relation::FullB, 4, 50, 6);
    CHECK(small.budget_exceeded);
    CHECK(small.visited.size() == 50);
    CHECK_THROWS_AS(explore({T}, {bs[0]}, Relation::PB, 1, 10, 4), Error);
    ExploreResult naked = explore({T}, Relation::Naked, 2, 1000, 4);
    CHECK(naked.fingerprints_constant);
    CHECK(verify(T, naked.paths.back()));
}
