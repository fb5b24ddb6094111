#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "seedset/graph.hpp"
#include "seedset/numerics.hpp"
#include "seedset/report.hpp"

namespace seedset {

enum class ComponentMode { Largest, All, Error };
ComponentMode parse_component_mode(const std::string& text);
std::string to_string(ComponentMode m);

struct AnalyzeOptions {
  InferenceOptions inference;
  bool triangulate = false;
  ComponentMode components = ComponentMode::Largest;
};

/// Checks the data against the graph, triangulates or rejects a
/// non-decomposable graph, and runs inference per selected component.
/// Every component is analyzed with the same seed.
SeedSetReport analyze(const Graph& g, const DataMatrix& x1, const DataMatrix& x2,
                      const AnalyzeOptions& options);

/// Worker cap from SEEDSET_THREADS; 0 when unset (OpenMP default).
int threads_from_environment();

/// Command-line entry point. Returns the process exit code: 0 on success,
/// 2 for invalid input, 3 when a maximum likelihood estimate does not exist.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seedset
