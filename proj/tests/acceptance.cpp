// Acceptance checks, one line per criterion. `acceptance N` runs only N.
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "btw/census.hpp"
#include "btw/connect.hpp"
#include "btw/invariants.hpp"
#include "btw/io.hpp"
#include "btw/transport.hpp"
#include "oracle.hpp"
#include "walks.hpp"

using namespace btw;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Triangulation from_data(const std::string& name) { return validate(read_triangulation(std::string(BTW_DATA_DIR) + "/" + name)); }

Triangulation sphere_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(1, 2, 3, 0)); }
Triangulation h2_tet() { return one_tet(Perm4(1, 0, 2, 3), Perm4(0, 1, 3, 2)); }
Triangulation lens_tet() { return one_tet(Perm4(1, 2, 3, 0), Perm4(1, 2, 3, 0)); }

// Two tetrahedra glued along all faces by the identity.
Triangulation doubled_tet() {
    Triangulation T;
    T.gluings.resize(2);
    for (int f = 0; f < 4; ++f) {
        T.gluings[0][f] = {1, Perm4()};
        T.gluings[1][f] = {0, Perm4()};
    }
    return T;
}

// Branched instances: the census files, one-tet examples, the neighbours of
// m004 under 2-3 moves and the branchable descendant of m003.
std::vector<Triangulation> branched_corpus() {
    Triangulation m004 = from_data("m004.txt");
    std::vector<Triangulation> out{m004, sphere_tet(), h2_tet()};
    for (const auto& m : enumerate_sites(m004, MoveKind::M23)) out.push_back(apply(m004, m).T);
    out.push_back(make_branchable(from_data("m003.txt")).T);
    return out;
}

using P = std::array<std::array<int, 2>, 2>;

// Reference rows; each couple also stands for its swapped twin.
std::map<P, TransitClass> reference_rows() {
    std::map<P, TransitClass> m;
    auto put = [&](TransitClass c, std::initializer_list<P> ps) {
        for (const auto& p : ps) {
            m[p] = c;
            m[P{p[1], p[0]}] = c;
        }
    };
    put(TransitClass::NonAmbiguous,
        {P{{{-1, 1}, {-1, 0}}}, P{{{+1, 1}, {+1, 0}}}, P{{{+1, 2}, {+1, 3}}}, P{{{-1, 2}, {-1, 3}}},
         P{{{+1, 2}, {-1, 0}}}, P{{{-1, 3}, {+1, 1}}}, P{{{-1, 2}, {+1, 0}}}, P{{{+1, 3}, {-1, 1}}},
         P{{{+1, 2}, {+1, 1}}}, P{{{-1, 2}, {-1, 1}}}});
    put(TransitClass::AmbiguousSliding, {P{{{-1, 1}, {+1, 1}}}, P{{{+1, 1}, {-1, 1}}}, P{{{+1, 2}, {-1, 2}}},
                                         P{{{-1, 2}, {+1, 2}}}});
    put(TransitClass::ForcedAmbiguous, {P{{{-1, 3}, {-1, 0}}}, P{{{+1, 3}, {+1, 0}}}});
    put(TransitClass::Bump, {P{{{+1, 0}, {-1, 0}}}, P{{{-1, 0}, {+1, 0}}}, P{{{+1, 3}, {-1, 3}}}, P{{{-1, 3}, {+1, 3}}}});
    return m;
}

Outcome criterion_1() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    Census c = census_types();
    const double secs = seconds_since(t0);
    o.require(c.rows.size() == 120, "120 configurations");
    o.require(c.n_types == 40, "40 types");
    o.require(c.configs_per_type_min == 3 && c.configs_per_type_max == 3, "3 configurations per type");
    o.require(c.na_types == 20, "20 non-ambiguous types");
    o.require(c.schaeffer_types == 4, "4 Schaeffer types");
    o.require(c.sliding_types == 12, "12 ambiguous sliding types");
    o.require(c.forced_ambiguous_types == 4, "4 forced ambiguous types");
    o.require(c.bump_types == 8, "8 bump types");
    const auto rows = reference_rows();
    int matched = 0;
    for (const auto& r : c.rows) {
        auto it = rows.find(r.type.pair);
        o.require(it != rows.end(), "couple listed");
        if (it == rows.end()) continue;
        // forced ambiguous types are sliding too
        const TransitClass want = it->second;
        o.require(r.type.cls == want, "class of a listed couple");
        const bool schaeffer = r.type.pair == P{{{+1, 2}, {+1, 1}}} || r.type.pair == P{{{+1, 1}, {+1, 2}}} ||
                               r.type.pair == P{{{-1, 2}, {-1, 1}}} || r.type.pair == P{{{-1, 1}, {-1, 2}}};
        o.require(r.type.schaeffer == schaeffer, "Schaeffer flag");
        ++matched;
    }
    o.require(secs < 1.0, "runtime under 1 s");
    o.detail << matched << "/120 rows match the reference lists; types " << c.n_types << " (NA " << c.na_types
             << ", sliding " << c.sliding_types << " incl. forced " << c.forced_ambiguous_types << ", bump "
             << c.bump_types << "); " << secs << " s";
    return o;
}

Outcome criterion_2() {
    Outcome o;
    Census c = census_types();
    int agree = 0;
    for (const auto& r : c.rows) {
        const bool table_bump = r.type.cls == TransitClass::Bump;
        const bool table_na = r.type.cls == TransitClass::NonAmbiguous;
        const bool ok = table_bump == r.type.bump_rule && table_na == r.type.pb_forced &&
                        table_class_23(r.type.pair) == r.type.cls;
        agree += ok;
    }
    o.require(agree == 120, "all rows agree");
    o.require(c.table_vs_rules_mismatches == 0, "census mismatch counter");
    // the same rules read on an actual triangulation
    Triangulation D = abstract_site();
    Skeleton S = skeleta(D);
    int site_agree = 0;
    for (const auto& r : c.rows) {
        Branching b = site_branching(D, S, r.rank);
        TransitType t = classify_23(D, S, b, site_move_23());
        site_agree += t.cls == r.type.cls && t.bump_rule == r.type.bump_rule && t.pb_forced == r.type.pb_forced;
    }
    o.require(site_agree == 120, "abstract site classification");
    o.detail << agree << "/120 table = pit/source = pb-forced; " << site_agree << "/120 on the abstract site";
    return o;
}

Outcome criterion_3() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    Triangulation m003 = from_data("m003.txt"), m004 = from_data("m004.txt");
    const auto b3 = enumerate_branchings(m003);
    const auto b4 = enumerate_branchings(m004);
    o.require(b3.empty(), "m003 has no branching");
    o.require(oracle::count_branchings(m003) == 0, "oracle on m003");
    // frozen from the exhaustive oracle
    o.require(b4.size() == 4, "m004 has 4 branchings");
    o.require(static_cast<int>(b4.size()) == oracle::count_branchings(m004), "oracle on m004");
    Skeleton S = skeleta(m004);
    const auto eps = orient(m004);
    int null = 0;
    for (const auto& b : b4) {
        OmegaClass c = omega_class(m004, S, induced_prebranching(m004, S, b, eps));
        null += c.cls.is_zero() && c.mod2_zero;
    }
    o.require(null == static_cast<int>(b4.size()), "[omega_b] = 0 and [omega_b]_2 = 0");
    const double secs = seconds_since(t0);
    o.require(secs < 1.0, "runtime under 1 s");
    o.detail << "m003: " << b3.size() << " branchings; m004: " << b4.size() << " (oracle "
             << oracle::count_branchings(m004) << "), null classes " << null << "; " << secs << " s";
    return o;
}

Outcome criterion_4() {
    Outcome o;
    std::mt19937 rng(2024);
    std::vector<Triangulation> corpus{from_data("m003.txt"), from_data("m004.txt"), h2_tet()};
    int transits = 0, negatives = 0, attempts = 0;
    while (transits < 1000 && attempts < 20000) {
        const Triangulation& T0 = corpus[static_cast<std::size_t>(attempts++ % 3)];
        auto all = enumerate_prebranchings(T0);
        Triangulation T = T0;
        PreBranching w = all[rng() % all.size()];
        for (int step = 0; step < 20 && transits < 1000; ++step) {
            auto tr = walks::random_ideal_transit(T, w, rng, 6);
            if (!tr) continue;
            Skeleton S = skeleta(T), S2 = skeleta(tr->result.T);
            bool kept;
            if (tr->move.kind == MoveKind::M20Q) {
                // the 2-0 move has no spine map; read it on the positive return
                auto back = walks::positive_return(T, w, *tr);
                kept = back && omega_class_carried(tr->result.T, S2, tr->after, back->result,
                                                   skeleta(back->result.T), back->after);
                ++negatives;
            } else {
                kept = omega_class_carried(T, S, w, tr->result, S2, tr->after);
            }
            o.require(kept, "class carried by " + to_string(tr->move));
            OmegaClass c = omega_class(tr->result.T, S2, tr->after);
            auto H = h1_coordinates(tr->result.T, S2);
            auto om = omega_chain(S2, tr->after);
            std::vector<Int> diff(c.alpha.size());
            for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = 2 * c.alpha[k] - om[k];
            o.require(c.even && H.C.d1.apply(c.alpha) == std::vector<Int>(static_cast<std::size_t>(H.C.n0)) && H.coords(diff).is_zero(),
                      "even with witness 2 alpha = omega");
            T = tr->result.T;
            w = tr->after;
            ++transits;
        }
    }
    o.require(transits == 1000, "1000 transits generated");
    o.detail << transits << " pb-transits (" << negatives << " via the positive return), class kept and even";
    return o;
}

Outcome criterion_5() {
    Outcome o;
    int instances = 0;
    for (const auto& T : branched_corpus()) {
        Skeleton S = skeleta(T);
        const int chi = euler_characteristic(T), bchi = boundary_surface(T).euler;
        for (const auto& b : enumerate_branchings(T, S)) {
            Bicoloring c = bicoloring(T, S, b);
            o.require(c.chi_white == chi && c.chi_black == chi && 2 * chi == bchi, "chi identities");
            ++instances;
        }
    }
    std::mt19937 rng(5);
    int sliding = 0, bumps = 0, bump_changes = 0;
    std::vector<Triangulation> starts{from_data("m004.txt"), sphere_tet(), h2_tet()};
    for (int run = 0; run < 400 && (sliding < 200 || bump_changes == 0); ++run) {
        Triangulation T = starts[static_cast<std::size_t>(run) % starts.size()];
        auto bs = enumerate_branchings(T);
        Branching b = bs[rng() % bs.size()];
        for (int step = 0; step < 10; ++step) {
            auto tr = walks::random_ideal_transit(T, b, rng, 6);
            if (!tr) continue;
            TransitClass cls;
            if (is_positive(tr->move.kind)) {
                Skeleton S = skeleta(T);
                cls = tr->move.kind == MoveKind::M23 ? classify_23(T, S, b, tr->move).cls
                                                     : classify_02q(T, S, b, tr->move).cls;
            } else {
                Skeleton S2 = skeleta(tr->result.T);
                cls = tr->move.kind == MoveKind::M32
                          ? classify_23(tr->result.T, S2, tr->after, tr->result.inverse).cls
                          : classify_02q(tr->result.T, S2, tr->after, tr->result.inverse).cls;
            }
            Bicoloring c1 = bicoloring(T, skeleta(T), b);
            Bicoloring c2 = bicoloring(tr->result.T, skeleta(tr->result.T), tr->after);
            if (cls != TransitClass::Bump) {
                if (sliding < 200) {
                    o.require(c1.fingerprint() == c2.fingerprint(), "sliding keeps the bicoloring");
                    ++sliding;
                }
            } else {
                ++bumps;
                o.require(c1.chi_white == c2.chi_white && c1.chi_black == c2.chi_black, "bump keeps both chi");
                bump_changes += c1.fingerprint() != c2.fingerprint();
            }
            T = tr->result.T;
            b = tr->after;
        }
    }
    o.require(sliding == 200, "200 sliding transits");
    o.require(bump_changes > 0, "some bump changes the bicoloring");
    o.detail << instances << " branched instances satisfy the chi identities; " << sliding
             << " sliding transits keep the bicoloring; " << bump_changes << " of " << bumps
             << " bump transits change it";
    return o;
}

Outcome criterion_6() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    Triangulation T = from_data("m004.txt");
    auto bs = enumerate_branchings(T);
    int pairs = 0;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < bs.size(); ++i)
        for (std::size_t j = 0; j < bs.size(); ++j) {
            const std::string end = state_signature(T, bs[j]);
            MoveSequence c = connect_completed(T, bs[i], bs[j]);
            o.require(verify(T, bs[i], c) && c.end == end, "completed certificate");
            MoveSequence s = connect_ideal(T, bs[i], bs[j]);
            o.require(verify(T, bs[i], s) && s.end == end, "ideal certificate");
            for (const auto& st : s.steps) o.require(is_ideal(st.move.kind), "ideal kinds only");
            longest = std::max(longest, s.steps.size());
            ++pairs;
        }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime under 60 s");
    o.detail << pairs << " ordered pairs, both certificates replay; longest ideal " << longest << " moves; " << secs
             << " s";
    return o;
}

Outcome criterion_7() {
    Outcome o;
    Triangulation T = doubled_tet();
    auto bs = enumerate_branchings(T);
    o.require(bs.size() == 24, "24 branched configurations");
    int configs = 0, undone = 0;
    std::map<std::string, int> how;
    for (const auto& b : bs) {
        int admissible = 0;
        for (const auto& m : arch_markings(0)) {
            ArchState X;
            try {
                X = insert_arch(T, b, m);
            } catch (const Error& e) {
                o.require(e.code == "NotAdmissible", "only NotAdmissible");
                continue;
            }
            ++admissible;
            bool valid = check_gluings(X.T).empty() && is_branching(X.T, skeleta(X.T), X.b);
            o.require(valid, "arch output validates");
            MoveSequence u = undo_bubble_arch(T, b, m);
            o.require(!u.notes.empty(), "undo path recorded");
            if (!u.notes.empty()) ++how[u.notes[0]];
            const bool back = verify(X.T, X.b, u) && u.end == state_signature(T, b);
            o.require(back, "undo returns the branched tetrahedron");
            undone += back;
        }
        o.require(admissible == 6, "6 of 12 admissible");
        ++configs;
    }
    o.detail << configs << " configurations with 6/12 admissible markings; " << undone << " arches undone (";
    for (auto& [k, v] : how) o.detail << k << ": " << v << " ";
    o.detail << ")";
    return o;
}

Outcome criterion_8() {
    Outcome o;
    int instances = 0, torus = 0;
    for (const auto& T : branched_corpus()) {
        if (!orientation(T).orientable) continue;
        Skeleton S = skeleta(T);
        BoundarySurface B = boundary_surface(T);
        bool all_tori = !B.components.empty();
        for (const auto& c : B.components) all_tori = all_tori && c.euler == 0;
        for (const auto& b : enumerate_branchings(T, S)) {
            const int sum = euler_cochain(T, S, b).sum();
            o.require(sum == euler_characteristic(T), "sum equals chi");
            if (all_tori) {
                o.require(sum == 0, "zero on torus boundary");
                ++torus;
            }
            ++instances;
        }
    }
    o.detail << instances << " branched orientable instances (" << torus << " with torus boundary)";
    return o;
}

// Nonnegative solutions with z(e) >= 1 for one region at a time.
std::vector<std::vector<Rat>> nonnegative_samples(const MeasureCone& M) {
    std::vector<std::vector<Rat>> out{std::vector<Rat>(static_cast<std::size_t>(M.switches.cols), 0)};
    for (int e = 0; e < M.switches.cols; ++e) {
        std::vector<Rat> lower(static_cast<std::size_t>(M.switches.cols), 0);
        lower[static_cast<std::size_t>(e)] = 1;
        if (auto z = feasible_point(M.switches, std::vector<Rat>(static_cast<std::size_t>(M.switches.rows), 0), lower))
            out.push_back(*z);
    }
    return out;
}

Outcome criterion_9() {
    Outcome o;
    int instances = 0;
    for (const auto& T : branched_corpus()) {
        Skeleton S = skeleta(T);
        const int h2 = homology(spine_complex(T, S), 0).h2.rank;
        for (const auto& b : enumerate_branchings(T, S)) {
            o.require(measure_cone(T, S, b).dim == h2, "dimension equals rank H2");
            ++instances;
        }
    }
    std::mt19937 rng(9);
    int na = 0, nontrivial = 0;
    std::vector<Triangulation> starts{h2_tet(), from_data("m004.txt"), sphere_tet()};
    for (const auto& m : enumerate_sites(h2_tet(), MoveKind::M23)) starts.push_back(apply(h2_tet(), m).T);
    for (int run = 0; run < 2000 && na < 100; ++run) {
        Triangulation T = starts[static_cast<std::size_t>(run) % starts.size()];
        auto bs = enumerate_branchings(T);
        Branching b = bs[rng() % bs.size()];
        for (int step = 0; step < 10 && na < 100; ++step) {
            auto tr = walks::random_ideal_transit(T, b, rng, 5);
            if (!tr) continue;
            if (is_positive(tr->move.kind)) {
                Skeleton S = skeleta(T), S2 = skeleta(tr->result.T);
                const PreBranching w = induced_prebranching(T, S, b, orient(T));
                if (enhance_positive(T, tr->move, w).size() == 1) {
                    auto back = enhance_negative(tr->result.T, tr->result.inverse, tr->after);
                    o.require(back.transit.has_value(), "inverse of an NA transit");
                    if (back.transit) {
                        const auto& R3 = back.transit->result;
                        Skeleton S3 = skeleta(R3.T);
                        auto fwd = nonnegative_samples(measure_cone(T, S, b));
                        auto bwd = nonnegative_samples(measure_cone(tr->result.T, S2, tr->after));
                        nontrivial += fwd.size() > 1;
                        for (const auto& z : fwd)
                            for (const auto& x : transport(T, S, tr->result, S2, tr->after, z))
                                o.require(x >= 0, "forward transport nonnegative");
                        for (const auto& z : bwd)
                            for (const auto& x : transport(tr->result.T, S2, R3, S3, back.transit->after, z))
                                o.require(x >= 0, "backward transport nonnegative");
                    }
                    ++na;
                }
            }
            T = tr->result.T;
            b = tr->after;
        }
    }
    o.require(na == 100, "100 NA transits");
    o.detail << instances << " branched instances with dim = rank H2; " << na << " NA transits transported both ways ("
             << nontrivial << " with nonzero measures)";
    return o;
}

// Ranks on the tets that persist through both moves.
bool persistent_ranks_agree(const Triangulation& T, const Branching& b, const MoveResult& R1, const MoveResult& R2,
                            const Branching& b2) {
    auto r0 = vertex_ranks(T, skeleta(T), b);
    auto r2 = vertex_ranks(R2.T, skeleta(R2.T), b2);
    for (int t = 0; t < R2.T.size(); ++t) {
        const int mid = R2.old_of_new[static_cast<std::size_t>(t)];
        if (mid < 0) continue;
        const int old = R1.old_of_new[static_cast<std::size_t>(mid)];
        if (old >= 0 && r2[static_cast<std::size_t>(t)] != r0[static_cast<std::size_t>(old)]) return false;
    }
    return true;
}

Outcome criterion_10() {
    Outcome o;
    std::mt19937 rng(10);
    const std::vector<MoveKind> kinds{MoveKind::M23, MoveKind::M02Q, MoveKind::M02T, MoveKind::M14};
    std::vector<Triangulation> branched{from_data("m004.txt"), sphere_tet(), h2_tet()};
    std::vector<Triangulation> pre{from_data("m003.txt"), from_data("m004.txt"), lens_tet(), h2_tet()};
    int done_b = 0, done_w = 0, tries = 0;
    while ((done_b < 250 || done_w < 250) && tries++ < 10000) {
        const MoveKind k = kinds[rng() % kinds.size()];
        if (done_b < 250) {
            const Triangulation& T = branched[rng() % branched.size()];
            Skeleton S = skeleta(T);
            auto bs = enumerate_branchings(T, S);
            auto sites = enumerate_sites(T, S, k);
            if (!sites.empty()) {
                const Branching& b = bs[rng() % bs.size()];
                auto outs = enhance_positive(T, sites[rng() % sites.size()], b);
                const auto& tr = outs[rng() % outs.size()];
                auto neg = enhance_negative(tr.result.T, tr.result.inverse, tr.after);
                const bool ok = !neg.blocked() &&
                                decorated_signature(neg.transit->result.T, neg.transit->after) ==
                                    decorated_signature(T, b) &&
                                persistent_ranks_agree(T, b, tr.result, neg.transit->result, neg.transit->after);
                o.require(ok, "branched round trip of " + to_string(tr.move));
                ++done_b;
            }
        }
        if (done_w < 250) {
            const Triangulation& T = pre[rng() % pre.size()];
            Skeleton S = skeleta(T);
            auto ws = enumerate_prebranchings(T);
            auto sites = enumerate_sites(T, S, k);
            if (!sites.empty()) {
                const PreBranching& w = ws[rng() % ws.size()];
                auto outs = enhance_positive(T, sites[rng() % sites.size()], w);
                const auto& tr = outs[rng() % outs.size()];
                auto neg = enhance_negative(tr.result.T, tr.result.inverse, tr.after);
                const bool ok = !neg.blocked() && decorated_signature(neg.transit->result.T, neg.transit->after) ==
                                                      decorated_signature(T, w);
                o.require(ok, "pre-branched round trip of " + to_string(tr.move));
                ++done_w;
            }
        }
    }
    o.require(done_b + done_w == 500, "500 round trips");
    o.detail << done_b << " branched and " << done_w << " pre-branched positive moves undone exactly";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> all{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    } else {
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    }
    int failed = 0;
    for (int n : which) {
        if (n < 1 || n > 10) {
            std::cerr << "no criterion " << n << "\n";
            return 64;
        }
        Outcome o;
        try {
            o = all[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
