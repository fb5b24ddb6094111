#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seedset/graph.hpp"
#include "seedset/inference.hpp"

namespace seedset {

/// Analysis of one connected component.
struct ComponentReport {
  Graph graph;                                            // as analyzed (after any triangulation)
  std::vector<std::pair<std::string, std::string>> added; // fill edges, by label
  std::size_t n1 = 0, n2 = 0;
  InferenceResult result;
  double seconds = 0.0;
};

struct ReportSettings {
  double alpha = 0.05;
  std::size_t permutations = 1000;
  Method method = Method::MinP;
  std::uint64_t seed = 1;
  std::string component_mode = "largest";
};

struct SeedSetReport {
  ReportSettings settings;
  std::vector<ComponentReport> components;
  std::vector<std::string> estimate;  // union of the component estimates
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

/// Estimate with vertices spelled as labels, the form stored in reports.
struct LabelledEstimate {
  std::vector<std::string> variables;
  std::vector<std::vector<std::string>> unions;
  double alpha = 0.05;
  Method method = Method::MinP;
  std::size_t permutations = 0;

  friend bool operator==(const LabelledEstimate&, const LabelledEstimate&) = default;
};

LabelledEstimate label_estimate(const SeedSetEstimate& e, const Graph& g);

/// JSON document ("schema": "seedset-report/1"). Timings are left out unless
/// asked for, which keeps reruns byte-identical.
std::string report_json(const SeedSetReport& report, bool include_timing = false);

/// Per-component estimates read back from a report.
std::vector<LabelledEstimate> read_report_estimates(std::string_view json_text);

/// Terminal rendering; rejected hypotheses carry a '*' in the first column.
std::string report_table(const SeedSetReport& report);

}  // namespace seedset
