#include <map>
#include <random>
#include <set>

#include "btw/census.hpp"
#include "btw/moves.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace btw;

namespace {

Triangulation lens_tet() { return one_tet(Perm4(1, 2, 3, 0), Perm4(1, 2, 3, 0)); }
Triangulation sphere_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(1, 2, 3, 0)); }
Triangulation h2_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(0, 1, 3, 2)); }

std::vector<Triangulation> corpus() {
    return {census_m003(), census_m004(), lens_tet(), sphere_tet(), h2_tet(), abstract_site()};
}

const std::vector<MoveKind> kAll{MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q,
                                 MoveKind::M02T, MoveKind::M20T, MoveKind::M14, MoveKind::M41};
const std::vector<MoveKind> kPositive{MoveKind::M23, MoveKind::M02Q, MoveKind::M02T, MoveKind::M14};

std::vector<std::array<int, 5>> all_ranks() {
    std::vector<std::array<int, 5>> out;
    std::array<int, 5> r{0, 1, 2, 3, 4};
    do out.push_back(r);
    while (std::next_permutation(r.begin(), r.end()));
    return out;
}

// Orientation of R.T agreeing with eps on some persistent tet.
std::vector<int> carried_orientation(const MoveResult& R, const std::vector<int>& eps) {
    std::vector<int> e2 = orient(R.T);
    for (std::size_t t = 0; t < eps.size(); ++t)
        if (R.new_of_old[t] >= 0) {
            if (e2[R.new_of_old[t]] != eps[t])
                for (int& x : e2) x = -x;
            break;
        }
    return e2;
}

}  // namespace

TEST_CASE("site enumeration against a direct scan") {
    for (const auto& T : corpus()) {
        int scan = 0;
        for (int t = 0; t < T.size(); ++t)
            for (int f = 0; f < 4; ++f)
                if (T.adj(t, f).tet != t) ++scan;
        CHECK(enumerate_sites(T, MoveKind::M23).size() == static_cast<std::size_t>(scan / 2));
        CHECK(enumerate_sites(T, MoveKind::M14).size() == static_cast<std::size_t>(T.size()));
    }
    // m004: every face bounds the two distinct tets
    CHECK(enumerate_sites(census_m004(), MoveKind::M23).size() == 4);
    CHECK(enumerate_sites(lens_tet(), MoveKind::M23).empty());
    CHECK(enumerate_sites(census_m004(), MoveKind::M32).empty());
}

TEST_CASE("every move yields a valid triangulation with the expected size") {
    for (const auto& T0 : corpus()) {
        std::vector<Triangulation> states{T0};
        for (auto k : kPositive)
            for (const auto& m : enumerate_sites(T0, k)) states.push_back(apply(T0, m).T);
        for (const auto& T : states)
            for (auto k : kAll)
                for (const auto& m : enumerate_sites(T, k)) {
                    MoveResult R = apply(T, m);
                    CHECK(check_gluings(R.T).empty());
                    CHECK(R.T.size() == T.size() + tet_delta(k));
                    int dv = oracle::vertex_class_count(R.T) - oracle::vertex_class_count(T);
                    if (k == MoveKind::M02T || k == MoveKind::M14) CHECK(dv == 1);
                    if (k == MoveKind::M20T || k == MoveKind::M41) CHECK(dv == -1);
                    if (is_ideal(k)) CHECK_MESSAGE(dv == 0, to_string(m), " n=", T.size());
                    // untouched gluings are kept verbatim
                    for (int t = 0; t < T.size(); ++t) {
                        int nt = R.new_of_old[t];
                        if (nt < 0) continue;
                        for (int f = 0; f < 4; ++f) {
                            const auto& g = T.adj(t, f);
                            if (R.new_of_old[g.tet] < 0) continue;
                            const auto& h = R.T.adj(nt, f);
                            if (h.tet >= 0 && R.old_of_new[h.tet] >= 0) {
                                bool touched = false;
                                for (const auto& [st, nm] : R.side_names)
                                    if (st == t || st == g.tet) touched = true;
                                if (!touched) {
                                    CHECK(h.tet == R.new_of_old[g.tet]);
                                    CHECK(h.perm == g.perm);
                                }
                            }
                        }
                    }
                }
    }
}

TEST_CASE("inverse moves undo positive and negative moves") {
    int checked = 0;
    for (const auto& T : corpus())
        for (auto k : kPositive)
            for (const auto& m : enumerate_sites(T, k)) {
                MoveResult R = apply(T, m);
                CHECK(!is_positive(R.inverse.kind));
                MoveResult back = apply(R.T, R.inverse);
                CHECK(signature(back.T) == signature(T));
                if (T.size() <= 2) CHECK(oracle::isomorphic(back.T, T));
                // and the positive inverse of the negative move
                MoveResult again = apply(back.T, back.inverse);
                CHECK(signature(again.T) == signature(R.T));
                ++checked;
            }
    CHECK(checked > 50);
}

TEST_CASE("local structure of the rewrites") {
    // 2-3 on the abstract site: the three new tets meet the rest in 6 faces
    Triangulation D = abstract_site();
    MoveResult R = apply(D, site_move_23());
    int outer = 0;
    for (int t = 0; t < R.T.size(); ++t)
        if (R.old_of_new[t] < 0)
            for (int f = 0; f < 4; ++f)
                if (R.old_of_new[R.T.adj(t, f).tet] >= 0) ++outer;
    CHECK(outer == 6);
    Skeleton S2 = skeleta(R.T);
    CHECK(S2.edges.size() == skeleta(D).edges.size() + 1);

    // 1-4: a new vertex of valence 4 and four new edge classes
    for (const auto& T : corpus()) {
        Skeleton S = skeleta(T);
        MoveResult Q = apply(T, {MoveKind::M14, {0}});
        Skeleton SQ = skeleta(Q.T);
        CHECK(SQ.edges.size() == S.edges.size() + 4);
        CHECK(SQ.vertices.size() == S.vertices.size() + 1);
        bool found = false;
        for (const auto& vc : SQ.vertices)
            if (vc.orbit.size() == 4) found = true;
        CHECK(found);
        // 0-2 triangular creates a removable pillow
        MoveResult P = apply(T, {MoveKind::M02T, {0, 0}});
        CHECK(!enumerate_sites(P.T, MoveKind::M20T).empty());
    }
}

TEST_CASE("2-3 census") {
    Census c = census_types();
    CHECK(c.rows.size() == 120);
    CHECK(c.n_types == 40);
    CHECK(c.configs_per_type_min == 3);
    CHECK(c.configs_per_type_max == 3);
    CHECK(c.na_types == 20);
    CHECK(c.sliding_types == 12);
    CHECK(c.forced_ambiguous_types == 4);
    CHECK(c.bump_types == 8);
    CHECK(c.schaeffer_types == 4);
    CHECK(c.table_vs_rules_mismatches == 0);
    // the three configurations of a type are a cyclic orbit on A,B,C
    std::map<int, std::set<std::array<int, 5>>> by_type;
    for (std::size_t i = 0; i < c.rows.size(); ++i) by_type[c.type_of_row[i]].insert(c.rows[i].rank);
    for (const auto& [t, rows] : by_type) {
        auto r = *rows.begin();
        std::array<int, 5> r1{r[2], r[0], r[1], r[3], r[4]}, r2{r[1], r[2], r[0], r[3], r[4]};
        CHECK(rows.count(r1) == 1);
        CHECK(rows.count(r2) == 1);
    }
}

TEST_CASE("table examples") {
    using P = std::array<std::array<int, 2>, 2>;
    CHECK(table_class_23(P{{{+1, 2}, {+1, 1}}}) == TransitClass::NonAmbiguous);
    CHECK(is_schaeffer_23(P{{{+1, 2}, {+1, 1}}}));
    CHECK(table_class_23(P{{{-1, 3}, {-1, 0}}}) == TransitClass::ForcedAmbiguous);
    CHECK(table_class_23(P{{{+1, 0}, {-1, 0}}}) == TransitClass::Bump);
    CHECK(table_class_23(P{{{-1, 0}, {+1, 0}}}) == TransitClass::Bump);
    CHECK_THROWS_AS(table_class_23(P{{{+1, 0}, {+1, 0}}}), Error);
}

TEST_CASE("quadrilateral census is consistent") {
    Census c = census_02q();
    CHECK(c.rows.size() == 24);
    CHECK(c.table_vs_rules_mismatches == 0);
    for (const auto& row : c.rows) {
        bool both_src = row.type.pair[0][1] == 0 && row.type.pair[1][1] == 0;
        if (both_src) CHECK(row.type.cls == TransitClass::Bump);
        if (row.type.cls == TransitClass::NonAmbiguous) {
            CHECK(row.type.pb_forced);
            CHECK(row.type.b_forced);
            CHECK(!row.type.bump_rule);
        }
    }
    // frozen from the run: every class occurs
    CHECK(c.na_types == 8);
    CHECK(c.forced_ambiguous_types == 4);
    CHECK(c.bump_types == 8);
}

TEST_CASE("classification on real triangulations agrees with the enhancement counts") {
    Triangulation T = census_m004();
    Skeleton S = skeleta(T);
    auto eps = orient(T);
    int seen = 0;
    for (const auto& b : enumerate_branchings(T, S)) {
        PreBranching w = induced_prebranching(T, S, b, eps);
        for (const auto& m : enumerate_sites(T, S, MoveKind::M23)) {
            TransitType tt = classify_23(T, S, b, m);
            CHECK((tt.cls == TransitClass::Bump) == tt.bump_rule);
            CHECK((tt.cls == TransitClass::NonAmbiguous) == tt.pb_forced);
            CHECK((enhance_positive(T, m, b).size() == 1) == tt.b_forced);
            CHECK((enhance_positive(T, m, w).size() == 1) == tt.pb_forced);
            ++seen;
        }
        for (const auto& m : enumerate_sites(T, S, MoveKind::M02Q)) {
            TransitType tt = classify_02q(T, S, b, m);
            CHECK((enhance_positive(T, m, b).size() == 1) == tt.b_forced);
            CHECK((enhance_positive(T, m, w).size() == 1) == tt.pb_forced);
            ++seen;
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("positive enhancements exist and keep the persistent part") {
    for (const auto& T : corpus()) {
        Skeleton S = skeleta(T);
        auto bs = enumerate_branchings(T, S);
        auto ws = enumerate_prebranchings(T);
        for (auto k : kPositive)
            for (const auto& m : enumerate_sites(T, S, k)) {
                for (const auto& b : bs) {
                    auto out = enhance_positive(T, m, b);
                    REQUIRE(!out.empty());
                    if (k == MoveKind::M23 || k == MoveKind::M02Q) CHECK(out.size() <= 2);
                    for (const auto& tr : out) {
                        Skeleton S2 = skeleta(tr.result.T);
                        CHECK(is_branching(tr.result.T, S2, tr.after));
                        Persistence P = persistence(T, S, tr.result, S2);
                        for (std::size_t e = 0; e < P.edge.size(); ++e)
                            for (auto [old, rel] : P.edge[e]) CHECK(tr.after.dir[e] == b.dir[old] * rel);
                    }
                }
                for (const auto& w : ws) {
                    auto out = enhance_positive(T, m, w);
                    REQUIRE(!out.empty());
                    if (k == MoveKind::M23 || k == MoveKind::M02Q) CHECK(out.size() <= 2);
                    for (const auto& tr : out) {
                        Skeleton S2 = skeleta(tr.result.T);
                        CHECK(is_prebranching(tr.result.T, S2, tr.after));
                        Persistence P = persistence(T, S, tr.result, S2);
                        for (std::size_t F = 0; F < P.face.size(); ++F)
                            for (const auto& c : P.face[F]) {
                                bool in_old = points_in(S, w, c[0], c[1]);
                                bool in_new = (tr.after.side[F] == 1) == (c[2] == 1);
                                CHECK(in_old == in_new);
                            }
                    }
                }
            }
    }
}

TEST_CASE("Schaeffer sites are forced") {
    Triangulation D = abstract_site();
    Skeleton S = skeleta(D);
    int n = 0;
    for (const auto& r : all_ranks()) {
        Branching b = site_branching(D, S, r);
        TransitType tt = classify_23(D, S, b, site_move_23());
        if (!tt.schaeffer) continue;
        CHECK(enhance_positive(D, site_move_23(), b).size() == 1);
        ++n;
    }
    CHECK(n == 12);
}

TEST_CASE("triangular 0-2 admits a pit at the new vertex") {
    for (const auto& T : corpus()) {
        Skeleton S = skeleta(T);
        for (const auto& b : enumerate_branchings(T, S))
            for (const auto& m : enumerate_sites(T, S, MoveKind::M02T)) {
                bool pit = false;
                for (const auto& tr : enhance_positive(T, m, b)) {
                    Skeleton S2 = skeleta(tr.result.T);
                    auto rk = vertex_ranks(tr.result.T, S2, tr.after);
                    int x = tr.result.T.size() - 2;
                    if (rk[x][3] == 3 && rk[x + 1][3] == 3) pit = true;
                }
                CHECK(pit);
            }
    }
}

TEST_CASE("decorated round trip on the abstract site") {
    Triangulation D = abstract_site();
    Skeleton S = skeleta(D);
    auto eps = orient(D);
    std::vector<Move> moves{site_move_23(), site_move_02q(D, S), Move{MoveKind::M14, {0}},
                            Move{MoveKind::M02T, {0, 3}}};
    int n = 0;
    for (const auto& r : all_ranks()) {
        Branching b = site_branching(D, S, r);
        PreBranching w = induced_prebranching(D, S, b, eps);
        for (const auto& m : moves) {
            for (const auto& tr : enhance_positive(D, m, b)) {
                auto neg = enhance_negative(tr.result.T, tr.result.inverse, tr.after);
                REQUIRE(!neg.blocked());
                CHECK(decorated_signature(neg.transit->result.T, neg.transit->after) == decorated_signature(D, b));
                ++n;
            }
            for (const auto& tr : enhance_positive(D, m, w)) {
                auto neg = enhance_negative(tr.result.T, tr.result.inverse, tr.after);
                REQUIRE(!neg.blocked());
                CHECK(decorated_signature(neg.transit->result.T, neg.transit->after) == decorated_signature(D, w));
                ++n;
            }
        }
    }
    CHECK(n > 500);
}

TEST_CASE("naturality of the induced pre-branching") {
    Triangulation D = abstract_site();
    Skeleton S = skeleta(D);
    auto eps = orient(D);
    for (const Move& m : {site_move_23(), site_move_02q(D, S)}) {
        for (const auto& r : all_ranks()) {
            Branching b = site_branching(D, S, r);
            PreBranching w = induced_prebranching(D, S, b, eps);
            auto pb_out = enhance_positive(D, m, w);
            std::set<PreBranching> targets;
            for (const auto& tr : pb_out) targets.insert(tr.after);
            for (const auto& tr : enhance_positive(D, m, b)) {
                auto e2 = carried_orientation(tr.result, eps);
                PreBranching w2 = induced_prebranching(tr.result.T, skeleta(tr.result.T), tr.after, e2);
                CHECK(targets.count(w2) == 1);
            }
        }
    }
}

// Three tets around an edge v1v2 (names A,B,C = 0,1,2, v1 = 3, v2 = 4),
// doubled along the boundary of the star; the triangle ABC is not a face.
Triangulation doubled_star() {
    const std::array<std::array<int, 4>, 3> nm{{{1, 2, 3, 4}, {0, 2, 3, 4}, {0, 1, 3, 4}}};
    auto loc = [&](int k, int n) { return static_cast<int>(std::find(nm[k].begin(), nm[k].end(), n) - nm[k].begin()); };
    Triangulation T;
    T.gluings.assign(6, {});
    for (int copy = 0; copy < 2; ++copy)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) {
                if (j == k) continue;
                std::array<int, 4> img{};
                for (int v = 0; v < 4; ++v) img[v] = v == loc(k, j) ? loc(j, k) : loc(j, nm[k][v]);
                T.gluings[3 * copy + k][loc(k, j)] = {3 * copy + j, Perm4(img[0], img[1], img[2], img[3])};
            }
    for (int k = 0; k < 3; ++k)
        for (int f : {2, 3}) {
            T.gluings[k][f] = {k + 3, Perm4()};
            T.gluings[k + 3][f] = {k, Perm4()};
        }
    return T;
}

TEST_CASE("blocked 3-2 moves") {
    Triangulation T = doubled_star();
    REQUIRE(check_gluings(T).empty());
    Skeleton S = skeleta(T);
    Move m{MoveKind::M32, {0, 2, 3}};
    MoveResult R = apply(T, m);
    Skeleton SR = skeleta(R.T);
    // oracle: every positive output from every branching of the 2-tet side
    std::set<std::string> outputs;
    for (const auto& b : enumerate_branchings(R.T, SR))
        for (const auto& tr : enhance_positive(R.T, R.inverse, b))
            outputs.insert(decorated_signature(tr.result.T, tr.after));
    auto eps = orient(T);
    int blocked = 0, total = 0;
    for (const auto& b : enumerate_branchings(T, S)) {
        auto neg = enhance_negative(T, m, b);
        CHECK(neg.blocked() == (outputs.count(decorated_signature(T, b)) == 0));
        if (neg.blocked()) CHECK(!neg.witness.empty());
        auto negw = enhance_negative(T, m, induced_prebranching(T, S, b, eps));
        CHECK(neg.blocked() == negw.blocked());
        blocked += neg.blocked() ? 1 : 0;
        ++total;
    }
    CHECK(blocked > 0);
    CHECK(blocked < total);
}

TEST_CASE("random decorated round trips on real triangulations") {
    std::mt19937 rng(7);
    std::vector<Triangulation> bases{census_m004(), sphere_tet(), h2_tet()};
    int done = 0;
    for (int it = 0; it < 60; ++it) {
        Triangulation T = bases[it % bases.size()];
        Skeleton S = skeleta(T);
        auto bs = enumerate_branchings(T, S);
        if (bs.empty()) continue;
        Branching b = bs[rng() % bs.size()];
        MoveKind k = kPositive[rng() % kPositive.size()];
        auto sites = enumerate_sites(T, S, k);
        if (sites.empty()) continue;
        Move m = sites[rng() % sites.size()];
        auto out = enhance_positive(T, m, b);
        const auto& tr = out[rng() % out.size()];
        auto neg = enhance_negative(tr.result.T, tr.result.inverse, tr.after);
        REQUIRE(!neg.blocked());
        CHECK(decorated_signature(neg.transit->result.T, neg.transit->after) == decorated_signature(T, b));
        ++done;
    }
    CHECK(done > 30);
}

TEST_CASE("invalid sites") {
    Triangulation T = census_m004();
    CHECK_THROWS_AS(apply(T, {MoveKind::M32, {0, 0, 1}}), Error);
    CHECK_THROWS_AS(apply(lens_tet(), {MoveKind::M23, {0, 0}}), Error);
    CHECK_THROWS_AS(apply(T, {MoveKind::M41, {0, 0}}), Error);
    CHECK_THROWS_AS(apply(T, {MoveKind::M23, {5, 0}}), Error);
    CHECK_THROWS_AS(apply(T, {MoveKind::M02Q, {0, 0, 1, 2, 2}}), Error);
    try {
        apply(T, {MoveKind::M20T, {0, 0}});
        FAIL("expected InvalidSite");
    } catch (const Error& e) {
        CHECK(e.code == "InvalidSite");
    }
}
