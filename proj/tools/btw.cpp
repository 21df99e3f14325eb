// Command-line front end: one JSON document per invocation on stdout.
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "btw/census.hpp"
#include "btw/connect.hpp"
#include "btw/invariants.hpp"
#include "btw/io.hpp"
#include "btw/moves.hpp"

using namespace btw;

namespace {

// exit codes
constexpr int kOk = 0, kFailed = 1, kOutcome = 2, kUsage = 64;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    std::string file, branching, prebranching, kind, relation = "full", out, from, to, format = "auto";
    std::string site;
    bool classify = false, ideal = false, pre = false, quad = false;
    int depth = 8, budget = 100000, max_tets = -1, choice = 0, sample = 0;
    unsigned seed = 1;
};

int emit(const json& j, const Opts& o, int code = kOk) {
    const std::string text = j.dump(2) + "\n";
    if (!o.out.empty()) {
        write_file(o.out, text);
    } else {
        std::cout << text;
    }
    return code;
}

json error_json(const std::string& code, const std::string& msg) { return {{"error", {{"code", code}, {"message", msg}}}}; }

int exit_for(const std::string& code) {
    return code == "Blocked" || code == "NotFound" || code == "BudgetExceeded" || code == "MarkingFailure" ? kOutcome
                                                                                                          : kFailed;
}

std::string to_string(BranchError e) {
    switch (e) {
        case BranchError::CyclicTriangle: return "CyclicTriangle";
        case BranchError::InconsistentEdgeClass: return "InconsistentEdgeClass";
        case BranchError::WrongSize: return "WrongSize";
    }
    return "?";
}

json int_list(const std::vector<Int>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.str());
    return a;
}

json group_json(const Group& g) { return {{"rank", g.rank}, {"torsion", int_list(g.torsion)}, {"str", g.str()}}; }

Triangulation load(const Opts& o) { return validate(read_triangulation(o.file)); }

Branching load_branching(const Triangulation& T, const Skeleton& S, const std::string& path) {
    Branching b = branching_from_json(S, json::parse(read_file(path)));
    auto rep = validate_branching(T, S, b);
    if (!rep.ok) {
        std::string why = rep.violations.empty() ? "invalid" : to_string(rep.violations.front().kind);
        throw Error("InvalidBranching", path + " is not a branching of the triangulation (" + why + ")");
    }
    return b;
}

PreBranching load_prebranching(const Triangulation& T, const Skeleton& S, const std::string& path) {
    PreBranching w = prebranching_from_json(S, json::parse(read_file(path)));
    if (!is_prebranching(T, S, w)) throw Error("InvalidPreBranching", path + " is not a pre-branching");
    return w;
}

void one_decoration(const Opts& o) {
    if (!o.branching.empty() && !o.prebranching.empty())
        throw Usage("--branching and --prebranching are exclusive");
}

std::vector<int> parse_site(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Usage("bad --site entry '" + tok + "'");
        }
    }
    return out;
}

MoveKind parse_kind(const std::string& k) {
    try {
        return move_kind_from_string(k);
    } catch (const Error&) {
        throw Usage("unknown move kind '" + k + "'");
    }
}

json move_json(const Move& m) {
    json site = json::object();
    const auto& keys = site_keys(m.kind);
    for (std::size_t k = 0; k < keys.size() && k < m.site.size(); ++k) site[keys[k]] = m.site[k];
    return {{"kind", to_string(m.kind)}, {"site", site}};
}

json type_json(const TransitType& t) {
    return {{"pair", {{t.pair[0][0], t.pair[0][1]}, {t.pair[1][0], t.pair[1][1]}}},
            {"class", to_string(t.cls)},
            {"schaeffer", t.schaeffer},
            {"bump_rule", t.bump_rule},
            {"pb_forced", t.pb_forced},
            {"b_forced", t.b_forced}};
}

// ---- subcommands ----

int cmd_validate(const Opts& o) {
    Triangulation T = read_triangulation(o.file);
    auto bad = check_gluings(T);
    json v = json::array();
    for (const auto& x : bad) v.push_back({{"kind", to_string(x.kind)}, {"tet", x.tet}, {"face", x.face}});
    json j = {{"valid", bad.empty()}, {"name", T.name}, {"tetrahedra", T.size()}, {"violations", v}};
    if (bad.empty()) {
        Orientation ori = orientation(T);
        j["orientable"] = ori.orientable;
        j["signature"] = signature(T);
    }
    return emit(j, o, bad.empty() ? kOk : kFailed);
}

int cmd_skeleta(const Opts& o) {
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    json edges = json::array(), faces = json::array(), verts = json::array();
    for (const auto& e : S.edges) {
        json orbit = json::array();
        for (const auto& x : e.orbit) orbit.push_back({x.tet, x.a, x.b});
        edges.push_back({{"valence", e.valence()}, {"consistent", e.consistent}, {"orbit", orbit}});
    }
    for (const auto& f : S.faces) faces.push_back({{"tet", f.tet}, {"face", f.face}, {"tet2", f.tet2}, {"face2", f.face2}});
    for (const auto& v : S.vertices) {
        json orbit = json::array();
        for (auto [t, lv] : v.orbit) orbit.push_back({t, lv});
        verts.push_back({{"orbit", orbit}});
    }
    return emit({{"tetrahedra", T.size()},
                 {"edges", edges},
                 {"faces", faces},
                 {"vertices", verts},
                 {"euler_characteristic", euler_characteristic(T)}},
                o);
}

int cmd_enumerate(const Opts& o) {
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    json list = json::array();
    if (o.pre) {
        for (const auto& w : enumerate_prebranchings(T)) list.push_back(prebranching_to_json(S, w));
        return emit({{"kind", "prebranchings"}, {"count", list.size()}, {"items", list}}, o);
    }
    for (const auto& b : enumerate_branchings(T, S)) list.push_back(branching_to_json(S, b));
    return emit({{"kind", "branchings"}, {"count", list.size()}, {"items", list}}, o);
}

json omega_json(const OmegaClass& c) {
    return {{"zero", c.cls.is_zero()},
            {"mod2_zero", c.mod2_zero},
            {"even", c.even},
            {"coords", int_list(c.cls.coords)},
            {"moduli", int_list(c.cls.moduli)},
            {"alpha", int_list(c.alpha)}};
}

int cmd_invariants(const Opts& o) {
    one_decoration(o);
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    SpineComplex C = spine_complex(T, S);
    Orientation ori = orientation(T);
    BoundarySurface B = boundary_surface(T);
    json j = {{"tetrahedra", T.size()},
              {"orientable", ori.orientable},
              {"euler_characteristic", euler_characteristic(T)},
              {"boundary_euler", B.euler},
              {"H1", group_json(homology(C, 0).h1)},
              {"H2", group_json(homology(C, 0).h2)},
              {"H1_mod2", group_json(homology(C, 2).h1)},
              {"branchable", has_branching(T)}};
    if (!o.branching.empty()) {
        Branching b = load_branching(T, S, o.branching);
        json bj = {{"measure_cone_dim", measure_cone(T, S, b).dim},
                   {"measure_cone_positive", measure_cone(T, S, b).positive},
                   {"good_ambiguous_edges", good_ambiguous_edges(T, S, b)}};
        Bicoloring bc = bicoloring(T, S, b);
        bj["chi_white"] = bc.chi_white;
        bj["chi_black"] = bc.chi_black;
        if (ori.orientable) {
            bj["euler_cochain_sum"] = euler_cochain(T, S, b).sum();
            bj["fundamental_cycle_closed"] = fundamental_cycle(T, S, b).closed();
            bj["omega_b"] = omega_json(omega_class(T, S, induced_prebranching(T, S, b, ori.eps)));
        }
        j["branching"] = bj;
    }
    if (!o.prebranching.empty()) {
        PreBranching w = load_prebranching(T, S, o.prebranching);
        j["prebranching"] = {{"omega", omega_json(omega_class(T, S, w))},
                             {"circuits", circuits(T, S, w).circuits.size()}};
    }
    return emit(j, o);
}

template <class D>
json enhancement_json(const Triangulation& T, const Move& m, const D& d) {
    if (is_positive(m.kind)) {
        auto outs = enhance_positive(T, m, d);
        return {{"enhancements", outs.size()}, {"forced", outs.size() == 1}};
    }
    auto neg = enhance_negative(T, m, d);
    if (neg.blocked()) return {{"blocked", true}, {"witness", neg.witness}};
    return {{"blocked", false}};
}

int cmd_transits(const Opts& o) {
    one_decoration(o);
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    std::vector<MoveKind> kinds;
    if (o.kind.empty()) {
        kinds = {MoveKind::M23, MoveKind::M32, MoveKind::M02Q, MoveKind::M20Q,
                 MoveKind::M02T, MoveKind::M20T, MoveKind::M14, MoveKind::M41};
    } else {
        kinds = {parse_kind(o.kind)};
    }
    std::optional<Branching> b;
    std::optional<PreBranching> w;
    if (!o.branching.empty()) b = load_branching(T, S, o.branching);
    if (!o.prebranching.empty()) w = load_prebranching(T, S, o.prebranching);
    if (o.classify && !b) throw Usage("--classify needs --branching");

    std::vector<Move> sites;
    for (MoveKind k : kinds)
        for (auto& m : enumerate_sites(T, S, k)) sites.push_back(m);
    if (o.sample > 0 && o.sample < static_cast<int>(sites.size())) {
        std::mt19937 rng(o.seed);
        std::shuffle(sites.begin(), sites.end(), rng);
        sites.resize(static_cast<std::size_t>(o.sample));
    }
    json list = json::array();
    for (const auto& m : sites) {
        json x = move_json(m);
        if (b) x["branched"] = enhancement_json(T, m, *b);
        if (w) x["prebranched"] = enhancement_json(T, m, *w);
        if (o.classify) {
            if (m.kind == MoveKind::M23) x["type"] = type_json(classify_23(T, S, *b, m));
            if (m.kind == MoveKind::M02Q) x["type"] = type_json(classify_02q(T, S, *b, m));
        }
        list.push_back(x);
    }
    return emit({{"count", list.size()}, {"sites", list}}, o);
}

int cmd_apply(const Opts& o) {
    one_decoration(o);
    if (o.kind.empty() || o.site.empty()) throw Usage("apply needs --kind and --site");
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    Move m{parse_kind(o.kind), parse_site(o.site)};
    check_site(T, S, m);
    json j = {{"move", move_json(m)}};
    auto finish = [&](const auto& tr, const auto& to_json_fn, const char* key, int count) {
        Skeleton S2 = skeleta(tr.result.T);
        j["triangulation"] = triangulation_to_json(tr.result.T);
        j[key] = to_json_fn(S2, tr.after);
        j["inverse"] = move_json(tr.result.inverse);
        j["enhancements"] = count;
        j["forced"] = tr.forced;
    };
    auto run = [&](const auto& d, const auto& to_json_fn, const char* key) -> int {
        if (is_positive(m.kind)) {
            auto outs = enhance_positive(T, m, d);
            if (outs.empty()) throw Error("NotFound", "no enhancement of " + to_string(m));
            if (o.choice < 0 || o.choice >= static_cast<int>(outs.size()))
                throw Usage("--choice must be below " + std::to_string(outs.size()));
            finish(outs[static_cast<std::size_t>(o.choice)], to_json_fn, key, static_cast<int>(outs.size()));
            return emit(j, o);
        }
        auto neg = enhance_negative(T, m, d);
        if (neg.blocked()) {
            j["blocked"] = true;
            j["witness"] = neg.witness;
            return emit(j, o, kOutcome);
        }
        finish(*neg.transit, to_json_fn, key, 1);
        return emit(j, o);
    };
    if (!o.branching.empty())
        return run(load_branching(T, S, o.branching), branching_to_json, "branching");
    if (!o.prebranching.empty())
        return run(load_prebranching(T, S, o.prebranching), prebranching_to_json, "prebranching");
    MoveResult R = apply(T, m);
    j["triangulation"] = triangulation_to_json(R.T);
    j["inverse"] = move_json(R.inverse);
    return emit(j, o);
}

int cmd_connect(const Opts& o) {
    if (o.from.empty() || o.to.empty()) throw Usage("connect needs --from and --to");
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    Branching b = load_branching(T, S, o.from), b2 = load_branching(T, S, o.to);
    MoveSequence s = o.ideal ? connect_ideal(T, b, b2) : connect_completed(T, b, b2);
    if (!verify(T, b, s)) return emit(error_json("ReplayFailure", "certificate does not replay"), o, kFailed);
    return emit(sequence_to_json(s), o);
}

int cmd_explore(const Opts& o) {
    one_decoration(o);
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    Relation r;
    try {
        r = relation_from_string(o.relation);
    } catch (const Error&) {
        throw Usage("unknown relation '" + o.relation + "'");
    }
    const int max_tets = o.max_tets > 0 ? o.max_tets : T.size() + 4;
    ExploreResult R;
    std::size_t n_starts = 1;
    if (r == Relation::PB) {
        std::vector<PreBranching> ws;
        if (!o.prebranching.empty()) ws.push_back(load_prebranching(T, S, o.prebranching));
        else ws = enumerate_prebranchings(T);
        n_starts = ws.size();
        R = explore(std::vector<Triangulation>(ws.size(), T), ws, r, o.depth, o.budget, max_tets);
    } else if (r == Relation::Naked) {
        R = explore({T}, r, o.depth, o.budget, max_tets);
    } else {
        std::vector<Branching> bs;
        if (!o.branching.empty()) bs.push_back(load_branching(T, S, o.branching));
        else bs = enumerate_branchings(T, S);
        n_starts = bs.size();
        R = explore(std::vector<Triangulation>(bs.size(), T), bs, r, o.depth, o.budget, max_tets);
    }
    json comps = json::array();
    for (const auto& c : R.components)
        comps.push_back({{"fingerprint", c.fingerprint}, {"size", c.size}, {"representative_signature", c.representative}});
    json j = {{"relation", to_string(r)},
              {"starts", n_starts},
              {"depth", o.depth},
              {"budget", o.budget},
              {"max_tets", max_tets},
              {"visited", R.visited.size()},
              {"components", comps},
              {"edges", R.edges},
              {"exhausted", R.exhausted},
              {"budget_exceeded", R.budget_exceeded},
              {"fingerprints_constant", R.fingerprints_constant}};
    if (!R.fingerprints_constant) return emit(j, o, kFailed);
    return emit(j, o, R.budget_exceeded ? kOutcome : kOk);
}

int cmd_boundary(const Opts& o) {
    Triangulation T = load(o);
    Skeleton S = skeleta(T);
    BoundarySurface B = boundary_surface(T);
    json comps = json::array();
    for (const auto& c : B.components)
        comps.push_back({{"vertex_class", c.vertex_class},
                         {"triangles", c.triangles},
                         {"edges", c.edges},
                         {"vertices", c.vertices},
                         {"euler", c.euler}});
    json j = {{"components", comps}, {"euler", B.euler}, {"euler_characteristic", euler_characteristic(T)}};
    if (!o.branching.empty()) {
        Branching b = load_branching(T, S, o.branching);
        Bicoloring bc = bicoloring(T, S, b);
        json regions = json::array();
        for (const auto& rg : bc.regions)
            regions.push_back({{"color", rg.color ? "black" : "white"},
                               {"component", rg.component},
                               {"euler", rg.euler},
                               {"boundary_curves", rg.boundary_curves}});
        j["bicoloring"] = {{"chi_white", bc.chi_white},
                           {"chi_black", bc.chi_black},
                           {"x_components", bc.x_components},
                           {"regions", regions},
                           {"fingerprint", bc.fingerprint()}};
        Orientation ori = orientation(T);
        if (ori.orientable)
            j["boundary_branching"] =
                boundary_branching(T, S, induced_prebranching(T, S, b, ori.eps), ori.eps).fingerprint(T);
    }
    return emit(j, o);
}

int cmd_census_import(const Opts& o) {
    const std::string text = read_file(o.file);
    Triangulation T;
    std::string fmt = o.format;
    if (fmt == "auto") {
        auto p = text.find_first_not_of(" \t\r\n");
        fmt = p != std::string::npos && text[p] == '{' ? "btw-tri" : "plain";
    }
    if (fmt == "btw-tri") {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error("ParseError", e.what());
        }
        T = triangulation_from_json(j);
    } else if (fmt == "plain" || fmt == "plain-gluing-table") {
        T = parse_census(text, std::filesystem::path(o.file).stem().string());
    } else {
        throw Usage("unknown format '" + o.format + "'");
    }
    validate(T);
    Triangulation N = relabel(T, canonical_relabeling(T));
    N.name = T.name;
    return emit(triangulation_to_json(N), o);
}

int cmd_census_types(const Opts& o) {
    auto t0 = std::chrono::steady_clock::now();
    Census c = o.quad ? census_02q() : census_types();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json rows = json::array();
    for (std::size_t k = 0; k < c.rows.size(); ++k) {
        const auto& r = c.rows[k];
        json x = type_json(r.type);
        x["rank"] = r.rank;
        x["type"] = c.type_of_row[k];
        x["new_edge"] = r.new_edge;
        rows.push_back(x);
    }
    return emit({{"move", o.quad ? "0-2 quadrilateral" : "2-3"},
                 {"configurations", c.rows.size()},
                 {"types", c.n_types},
                 {"configurations_per_type", {c.configs_per_type_min, c.configs_per_type_max}},
                 {"non_ambiguous_types", c.na_types},
                 {"ambiguous_sliding_types", c.sliding_types},
                 {"forced_ambiguous_types", c.forced_ambiguous_types},
                 {"bump_types", c.bump_types},
                 {"schaeffer_types", c.schaeffer_types},
                 {"table_vs_rules_mismatches", c.table_vs_rules_mismatches},
                 {"seconds", secs},
                 {"rows", rows}},
                o, c.table_vs_rules_mismatches == 0 ? kOk : kFailed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"branched triangulation workbench"};
    app.require_subcommand(1);
    Opts o;
    auto out_opt = [&](CLI::App* s) { s->add_option("--out", o.out, "write the JSON here instead of stdout"); };
    auto file = [&](CLI::App* s) { s->add_option("file", o.file, "triangulation (btw-tri/1 JSON or plain table)")->required(); };
    auto deco = [&](CLI::App* s) {
        s->add_option("--branching", o.branching, "btw-branching/1 file");
        s->add_option("--prebranching", o.prebranching, "btw-pb/1 file");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check the gluing table");
    file(validate_cmd), out_opt(validate_cmd);
    auto* skeleta_cmd = app.add_subcommand("skeleta", "edge, face and vertex classes");
    file(skeleta_cmd), out_opt(skeleta_cmd);
    auto* enumerate_cmd = app.add_subcommand("enumerate", "all branchings (or pre-branchings)");
    file(enumerate_cmd), out_opt(enumerate_cmd);
    enumerate_cmd->add_flag("--pre", o.pre, "enumerate pre-branchings");
    auto* inv_cmd = app.add_subcommand("invariants", "homology and decoration invariants");
    file(inv_cmd), deco(inv_cmd), out_opt(inv_cmd);
    auto* transits_cmd = app.add_subcommand("transits", "move sites and their enhancements");
    file(transits_cmd), deco(transits_cmd), out_opt(transits_cmd);
    transits_cmd->add_option("--kind", o.kind, "M23 M32 M02Q M20Q M02T M20T M14 M41");
    transits_cmd->add_flag("--classify", o.classify, "add the transit type of 2-3 and 0-2q sites");
    transits_cmd->add_option("--sample", o.sample, "keep this many random sites");
    transits_cmd->add_option("--seed", o.seed, "seed for --sample");
    auto* apply_cmd = app.add_subcommand("apply", "perform one move");
    file(apply_cmd), deco(apply_cmd), out_opt(apply_cmd);
    apply_cmd->add_option("--kind", o.kind, "M23 M32 M02Q M20Q M02T M20T M14 M41")->required();
    apply_cmd->add_option("--site", o.site, "comma separated site, e.g. 0,3")->required();
    apply_cmd->add_option("--choice", o.choice, "index of the positive enhancement");
    auto* connect_cmd = app.add_subcommand("connect", "certificate joining two branchings");
    file(connect_cmd), out_opt(connect_cmd);
    connect_cmd->add_option("--from", o.from)->required();
    connect_cmd->add_option("--to", o.to)->required();
    connect_cmd->add_flag("--ideal", o.ideal, "ideal moves only");
    auto* explore_cmd = app.add_subcommand("explore", "bounded search of a transit graph");
    file(explore_cmd), deco(explore_cmd), out_opt(explore_cmd);
    explore_cmd->add_option("--relation", o.relation)->check(CLI::IsMember({"full", "full-b", "sliding", "na", "pb", "naked"}));
    explore_cmd->add_option("--depth", o.depth)->check(CLI::NonNegativeNumber);
    explore_cmd->add_option("--budget", o.budget)->check(CLI::PositiveNumber);
    explore_cmd->add_option("--max-tets", o.max_tets, "default: input size + 4");
    auto* boundary_cmd = app.add_subcommand("boundary", "boundary surface and bicoloring");
    file(boundary_cmd), deco(boundary_cmd), out_opt(boundary_cmd);
    auto* import_cmd = app.add_subcommand("census-import", "normalize a census file to btw-tri/1");
    file(import_cmd), out_opt(import_cmd);
    import_cmd->add_option("--format", o.format)->check(CLI::IsMember({"auto", "btw-tri", "plain", "plain-gluing-table"}));
    auto* types_cmd = app.add_subcommand("census-types", "classification of branched transits");
    out_opt(types_cmd);
    types_cmd->add_flag("--quad", o.quad, "the 0-2 quadrilateral census instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(o);
        if (*skeleta_cmd) return cmd_skeleta(o);
        if (*enumerate_cmd) return cmd_enumerate(o);
        if (*inv_cmd) return cmd_invariants(o);
        if (*transits_cmd) return cmd_transits(o);
        if (*apply_cmd) return cmd_apply(o);
        if (*connect_cmd) return cmd_connect(o);
        if (*explore_cmd) return cmd_explore(o);
        if (*boundary_cmd) return cmd_boundary(o);
        if (*import_cmd) return cmd_census_import(o);
        if (*types_cmd) return cmd_census_types(o);
    } catch (const Usage& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cout << error_json(e.code, e.what()).dump(2) << "\n";
        return exit_for(e.code);
    } catch (const json::exception& e) {
        std::cout << error_json("ParseError", e.what()).dump(2) << "\n";
        return kFailed;
    }
    return kUsage;
}
