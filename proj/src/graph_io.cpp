#include "seedset/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seedset/error.hpp"

namespace seedset {

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::string json_label(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InputError("graph JSON: vertex labels must be strings or integers");
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::vector<std::string> vertices;
  std::vector<std::string> seen;
  Pairs edges;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.front() == "@vertices") {
      vertices.insert(vertices.end(), tok.begin() + 1, tok.end());
      continue;
    }
    if (tok.size() != 2)
      throw InputError(line_error(lineno, "expected 'u v', got " + std::to_string(tok.size()) +
                                              " fields"));
    if (tok[0] == tok[1]) throw InputError(line_error(lineno, "self-loop on '" + tok[0] + "'"));
    seen.push_back(tok[0]);
    seen.push_back(tok[1]);
    edges.emplace_back(tok[0], tok[1]);
  }
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw InputError("@vertices declares a vertex twice");
  for (auto& s : seen)
    if (!std::binary_search(vertices.begin(), vertices.end(), s)) {
      vertices.insert(std::lower_bound(vertices.begin(), vertices.end(), s), s);
    }
  return build_graph(std::move(vertices), edges);
}

Graph parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array())
    throw InputError("graph JSON: missing \"vertices\" array");
  std::vector<std::string> vertices;
  for (const auto& v : doc["vertices"]) vertices.push_back(json_label(v));
  Pairs edges;
  if (doc.contains("edges")) {
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw InputError("graph JSON: every edge must be a two-element array");
      edges.emplace_back(json_label(e[0]), json_label(e[1]));
    }
  }
  const bool directed = doc.value("directed", false);
  return directed ? moralize(std::move(vertices), edges) : build_graph(std::move(vertices), edges);
}

Graph parse_graph(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_graph_json(text);
  return parse_edge_list(text);
}

Graph read_graph_file(const std::string& path) { return parse_graph(read_text_file(path)); }

std::string to_edge_list(const Graph& g) {
  std::string out = "@vertices";
  for (const auto& l : g.labels()) out += " " + l;
  out += "\n";
  for (auto [u, v] : g.edges()) out += g.label(u) + " " + g.label(v) + "\n";
  return out;
}

std::string to_graph_json(const Graph& g) {
  nlohmann::json doc;
  doc["vertices"] = g.labels();
  doc["edges"] = nlohmann::json::array();
  for (auto [u, v] : g.edges()) doc["edges"].push_back({g.label(u), g.label(v)});
  doc["directed"] = false;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
}

}  // namespace seedset
