#include "btw/io.hpp"

#include <fstream>
#include <sstream>

namespace btw {

json triangulation_to_json(const Triangulation& T) {
    json g = json::array();
    for (int t = 0; t < T.size(); ++t) {
        json row = json::array();
        for (int f = 0; f < 4; ++f) {
            const Gluing& x = T.adj(t, f);
            row.push_back({{"tet", x.tet}, {"perm", {x.perm[0], x.perm[1], x.perm[2], x.perm[3]}}});
        }
        g.push_back(row);
    }
    return {{"format", "btw-tri/1"}, {"name", T.name}, {"tetrahedra", T.size()}, {"gluings", g}};
}

Triangulation triangulation_from_json(const json& j) {
    if (j.value("format", "") != "btw-tri/1") throw Error("ParseError", "expected format btw-tri/1");
    Triangulation T;
    T.name = j.value("name", "");
    int n = j.at("tetrahedra").get<int>();
    const json& g = j.at("gluings");
    if (!g.is_array() || static_cast<int>(g.size()) != n)
        throw Error("ParseError", "gluings must list every tetrahedron");
    T.gluings.resize(n);
    for (int t = 0; t < n; ++t) {
        if (!g[t].is_array() || g[t].size() != 4) throw Error("ParseError", "each tetrahedron needs 4 gluings");
        for (int f = 0; f < 4; ++f) {
            const json& e = g[t][f];
            auto p = e.at("perm").get<std::vector<int>>();
            if (p.size() != 4) throw Error("ParseError", "perm needs 4 entries");
            for (int v : p)
                if (v < 0 || v > 3) throw Error("ParseError", "perm entry out of range");
            T.gluings[t][f] = {e.at("tet").get<int>(), Perm4(p[0], p[1], p[2], p[3])};
        }
    }
    return T;
}

Triangulation parse_census(const std::string& text, const std::string& name) {
    Triangulation T;
    T.name = name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](std::size_t col, const std::string& msg) {
        throw Error("ParseError", "line " + std::to_string(lineno) + " column " + std::to_string(col + 1) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::vector<std::pair<std::string, std::size_t>> tok;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t s = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > s) tok.emplace_back(line.substr(s, i - s), s);
        }
        if (tok.empty()) continue;
        if (tok.size() != 8) fail(0, "expected four 'tet perm' pairs");
        std::array<Gluing, 4> row;
        for (int f = 0; f < 4; ++f) {
            auto& [ts, tc] = tok[2 * f];
            auto& [ps, pc] = tok[2 * f + 1];
            for (char c : ts)
                if (!std::isdigit(static_cast<unsigned char>(c))) fail(tc, "bad tetrahedron index '" + ts + "'");
            if (ps.size() != 4) fail(pc, "bad permutation token '" + ps + "'");
            Perm4 p;
            for (int k = 0; k < 4; ++k) {
                if (ps[k] < '0' || ps[k] > '3') fail(pc + k, "bad permutation token '" + ps + "'");
                p.img[k] = static_cast<std::uint8_t>(ps[k] - '0');
            }
            if (!p.valid()) fail(pc, "permutation token '" + ps + "' is not a bijection");
            row[f] = {std::stoi(ts), p};
        }
        T.gluings.push_back(row);
    }
    return T;
}

std::string census_text(const Triangulation& T) {
    std::ostringstream os;
    for (int t = 0; t < T.size(); ++t) {
        for (int f = 0; f < 4; ++f) {
            if (f) os << ' ';
            os << T.adj(t, f).tet << ' ' << T.adj(t, f).perm.str();
        }
        os << '\n';
    }
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IOError", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IOError", "cannot write " + path);
    out << data;
}

Triangulation read_triangulation(const std::string& path) {
    std::string s = read_file(path);
    auto p = s.find_first_not_of(" \t\r\n");
    if (p != std::string::npos && s[p] == '{') {
        json j;
        try {
            j = json::parse(s);
        } catch (const json::parse_error& e) {
            throw Error("ParseError", e.what());
        }
        return triangulation_from_json(j);
    }
    std::string name = path;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    auto dot = name.find('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_census(s, name);
}

json branching_to_json(const Skeleton& S, const Branching& b) {
    json edges = json::array();
    for (std::size_t e = 0; e < S.edges.size(); ++e) {
        const auto& o = S.edges[e].orbit[0];
        bool fwd = b.dir[e] > 0;
        edges.push_back({{"tet", o.tet}, {"tail", fwd ? o.a : o.b}, {"head", fwd ? o.b : o.a}});
    }
    return {{"format", "btw-branching/1"}, {"edges", edges}};
}

Branching branching_from_json(const Skeleton& S, const json& j) {
    if (j.value("format", "") != "btw-branching/1") throw Error("ParseError", "expected format btw-branching/1");
    Branching b;
    b.dir.assign(S.edges.size(), 0);
    for (const json& e : j.at("edges")) {
        int t = e.at("tet"), a = e.at("tail"), h = e.at("head");
        if (t < 0 || t >= static_cast<int>(S.edge_of.size()) || a < 0 || a > 3 || h < 0 || h > 3 || a == h)
            throw Error("ParseError", "bad edge record");
        int cls = S.edge_of[t][edge_index(a, h)];
        int d = S.edge_dir(t, a, h);
        if (b.dir[cls] != 0 && b.dir[cls] != d) throw Error("ParseError", "conflicting orientations for an edge class");
        b.dir[cls] = d;
    }
    for (int d : b.dir)
        if (d == 0) throw Error("ParseError", "branching misses an edge class");
    return b;
}

json prebranching_to_json(const Skeleton& S, const PreBranching& w) {
    json faces = json::array();
    for (std::size_t k = 0; k < S.faces.size(); ++k) {
        const FaceClass& F = S.faces[k];
        if (w.side[k] > 0)
            faces.push_back({{"tet", F.tet}, {"face", F.face}});
        else
            faces.push_back({{"tet", F.tet2}, {"face", F.face2}});
    }
    return {{"format", "btw-pb/1"}, {"faces", faces}};
}

PreBranching prebranching_from_json(const Skeleton& S, const json& j) {
    if (j.value("format", "") != "btw-pb/1") throw Error("ParseError", "expected format btw-pb/1");
    PreBranching w;
    w.side.assign(S.faces.size(), 0);
    for (const json& e : j.at("faces")) {
        int t = e.at("tet"), f = e.at("face");
        if (t < 0 || t >= static_cast<int>(S.face_of.size()) || f < 0 || f > 3) throw Error("ParseError", "bad face record");
        int k = S.face_of[t][f];
        const FaceClass& F = S.faces[k];
        int s = (F.tet == t && F.face == f) ? 1 : -1;
        if (w.side[k] != 0 && w.side[k] != s) throw Error("ParseError", "conflicting sides for a face class");
        w.side[k] = s;
    }
    for (int s : w.side)
        if (s == 0) throw Error("ParseError", "pre-branching misses a face class");
    return w;
}

}  // namespace btw
