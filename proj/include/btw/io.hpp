#pragma once
#include <string>

#include "btw/decor.hpp"
#include "json.hpp"

namespace btw {

using json = nlohmann::json;

json triangulation_to_json(const Triangulation& T);
Triangulation triangulation_from_json(const json& j);

// Plain census text: one line per tetrahedron, four "tet p0p1p2p3" tokens.
// Throws Error("ParseError") with line and column.
Triangulation parse_census(const std::string& text, const std::string& name = "");
std::string census_text(const Triangulation& T);

// Reads either format (JSON when the first non-blank char is '{').
Triangulation read_triangulation(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

json branching_to_json(const Skeleton& S, const Branching& b);
Branching branching_from_json(const Skeleton& S, const json& j);
json prebranching_to_json(const Skeleton& S, const PreBranching& w);
PreBranching prebranching_from_json(const Skeleton& S, const json& j);

}  // namespace btw
