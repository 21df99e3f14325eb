#include <random>

#include "btw/census.hpp"
#include "btw/transport.hpp"
#include "doctest.h"
#include "walks.hpp"

using namespace btw;

namespace {

Triangulation h2_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(0, 1, 3, 2)); }
Triangulation sphere_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(1, 2, 3, 0)); }

// Nonnegative solutions with z(e) >= 1, one per region where possible.
std::vector<std::vector<Rat>> nonnegative_samples(const MeasureCone& M) {
    std::vector<std::vector<Rat>> out;
    const int n = M.switches.cols;
    for (int e = 0; e < n; ++e) {
        std::vector<Rat> lower(n, 0);
        lower[e] = 1;
        if (auto z = feasible_point(M.switches, std::vector<Rat>(M.switches.rows, 0), lower)) out.push_back(*z);
    }
    return out;
}

}  // namespace

TEST_CASE("spine maps are chain maps") {
    int n = 0;
    for (const auto& T : {census_m003(), census_m004(), h2_tet(), sphere_tet(), abstract_site()}) {
        Skeleton S = skeleta(T);
        SpineComplex C = spine_complex(T, S);
        for (auto k : {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M02T, MoveKind::M14, MoveKind::M41})
            for (const auto& m : enumerate_sites(T, S, k)) {
                MoveResult R = apply(T, m);
                Skeleton S2 = skeleta(R.T);
                SpineMap f = spine_map(T, S, R, S2);
                CHECK(is_chain_map(C, spine_complex(R.T, S2), f));
                ++n;
            }
        for (const auto& m : enumerate_sites(T, S, MoveKind::M20Q))
            CHECK_THROWS_AS(spine_map(T, S, apply(T, m), skeleta(apply(T, m).T)), Error);
    }
    CHECK(n > 40);
}

TEST_CASE("the class of a pre-branching survives ideal transits") {
    std::mt19937 rng(7);
    int checked = 0, negative = 0;
    for (const auto& T0 : {census_m003(), census_m004(), h2_tet()}) {
        auto all = enumerate_prebranchings(T0);
        REQUIRE(!all.empty());
        for (int run = 0; run < 4; ++run) {
            Triangulation T = T0;
            PreBranching w = all[rng() % all.size()];
            for (int step = 0; step < 25; ++step) {
                auto tr = walks::random_ideal_transit(T, w, rng, 6);
                if (!tr) continue;
                Skeleton S = skeleta(T), S2 = skeleta(tr->result.T);
                if (tr->move.kind == MoveKind::M20Q) {
                    auto back = walks::positive_return(T, w, *tr);
                    REQUIRE(back.has_value());
                    CHECK(omega_class_carried(tr->result.T, S2, tr->after, back->result, skeleta(back->result.T),
                                              back->after));
                    ++negative;
                } else {
                    CHECK(is_chain_map(spine_complex(T, S), spine_complex(tr->result.T, S2),
                                       spine_map(T, S, tr->result, S2)));
                    CHECK_MESSAGE(omega_class_carried(T, S, w, tr->result, S2, tr->after), to_string(tr->move));
                }
                // evenness is kept too
                CHECK(omega_class(tr->result.T, S2, tr->after).even);
                T = tr->result.T;
                w = tr->after;
                ++checked;
            }
        }
    }
    CHECK(checked > 100);
    CHECK(negative > 0);
}

TEST_CASE("different classes are told apart") {
    // m004 carries pre-branchings with distinct classes; the carried class of one
    // never matches the other after a move
    Triangulation T = census_m004();
    Skeleton S = skeleta(T);
    auto all = enumerate_prebranchings(T);
    const auto& w0 = all[0];
    auto c0 = omega_class(T, S, w0).cls;
    for (const auto& w1 : all) {
        if (omega_class(T, S, w1).cls == c0) continue;
        for (const auto& m : enumerate_sites(T, S, MoveKind::M23))
            for (const auto& tr : enhance_positive(T, m, w1)) {
                Skeleton S2 = skeleta(tr.result.T);
                CHECK(!omega_class_carried(T, S, w0, tr.result, S2, tr.after));
            }
    }
}

TEST_CASE("measures move along non-ambiguous transits") {
    std::mt19937 rng(11);
    int transits = 0;
    std::vector<Triangulation> start{h2_tet()};
    for (const auto& m : enumerate_sites(h2_tet(), MoveKind::M23)) start.push_back(apply(h2_tet(), m).T);
    for (const auto& T0 : start) {
        Skeleton S0 = skeleta(T0);
        for (const auto& b0 : enumerate_branchings(T0, S0)) {
            Triangulation T = T0;
            Branching b = b0;
            for (int step = 0; step < 12; ++step) {
                auto tr = walks::random_ideal_transit(T, b, rng, 5);
                if (!tr) continue;
                Skeleton S = skeleta(T), S2 = skeleta(tr->result.T);
                const auto eps = orient(T);
                const PreBranching w = induced_prebranching(T, S, b, eps);
                const bool na = is_positive(tr->move.kind)
                                    ? enhance_positive(T, tr->move, w).size() == 1
                                    : !enhance_negative(T, tr->move, w).blocked();
                auto M = measure_cone(T, S, b);
                auto M2 = measure_cone(tr->result.T, S2, tr->after);
                CHECK(M.dim == M2.dim);
                if (na && is_positive(tr->move.kind)) {
                    for (const auto& z : nonnegative_samples(M)) {
                        auto z2 = transport(T, S, tr->result, S2, tr->after, z);
                        for (const auto& x : z2) CHECK(x >= 0);
                        // and back along the inverse
                        auto back = enhance_negative(tr->result.T, tr->result.inverse, tr->after);
                        REQUIRE(back.transit.has_value());
                        const auto& R3 = back.transit->result;
                        Skeleton S3 = skeleta(R3.T);
                        auto z3 = transport(tr->result.T, S2, R3, S3, back.transit->after, z2);
                        for (const auto& x : z3) CHECK(x >= 0);
                        auto P2 = persistence(tr->result.T, S2, R3, S3);
                        auto P1 = persistence(T, S, tr->result, S2);
                        for (std::size_t e = 0; e < S3.edges.size(); ++e)
                            for (auto [mid, r1] : P2.edge[e])
                                for (auto [old, r0] : P1.edge[mid]) CHECK(z3[e] == z[old]);
                    }
                    for (const auto& z2 : nonnegative_samples(M2)) {
                        auto back = enhance_negative(tr->result.T, tr->result.inverse, tr->after);
                        auto z3 = transport(tr->result.T, S2, back.transit->result, skeleta(back.transit->result.T),
                                            back.transit->after, z2);
                        for (const auto& x : z3) CHECK(x >= 0);
                    }
                    ++transits;
                }
                T = tr->result.T;
                b = tr->after;
            }
        }
    }
    MESSAGE("non-ambiguous transits checked: " << transits);
    CHECK(transits > 10);
}
