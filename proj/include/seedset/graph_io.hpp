#pragma once

#include <string>
#include <string_view>

#include "seedset/graph.hpp"

namespace seedset {

/// Edge-list text: one "u v" pair per line, '#' starts a comment, and an
/// optional "@vertices a b c ..." line declares vertices (needed for isolated
/// nodes). Errors carry the 1-based line number.
Graph parse_edge_list(std::string_view text);

/// {"vertices": [...], "edges": [[u, v], ...], "directed": false}.
/// A directed graph is moralized on load.
Graph parse_graph_json(std::string_view text);

/// Dispatches on content: a document starting with '{' is JSON.
Graph parse_graph(std::string_view text);
Graph read_graph_file(const std::string& path);

std::string to_edge_list(const Graph& g);
std::string to_graph_json(const Graph& g);

/// Whole-file read; throws InputError when the file cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace seedset
