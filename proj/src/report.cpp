#include "seedset/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "seedset/error.hpp"

namespace seedset {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> labels_of(const Graph& g, const VertexSet& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (Vertex v : s) out.push_back(g.label(v));
  return out;
}

std::string braces(const std::vector<std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ',';
    out += labels[i];
  }
  return out + "}";
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::size_t max_clique_size(const std::vector<Decomposition>& decomps) {
  std::size_t m = 0;
  if (!decomps.empty())
    for (const auto& c : decomps.front().cliques) m = std::max(m, c.size());
  return m;
}

std::size_t separator_count(const std::vector<Decomposition>& decomps) {
  return decomps.empty() ? 0 : decomps.front().size() - 1;
}

}  // namespace

LabelledEstimate label_estimate(const SeedSetEstimate& e, const Graph& g) {
  LabelledEstimate out;
  out.variables = labels_of(g, e.variables);
  for (const auto& u : e.unions) out.unions.push_back(labels_of(g, u));
  out.alpha = e.alpha;
  out.method = e.method;
  out.permutations = e.permutations;
  return out;
}

std::string report_json(const SeedSetReport& report, bool include_timing) {
  ordered_json doc;
  doc["schema"] = "seedset-report/1";
  doc["settings"] = {{"alpha", report.settings.alpha},
                     {"permutations", report.settings.permutations},
                     {"method", to_string(report.settings.method)},
                     {"seed", report.settings.seed},
                     {"component_mode", report.settings.component_mode}};
  doc["components"] = ordered_json::array();
  for (const auto& c : report.components) {
    const InferenceResult& r = c.result;
    ordered_json comp;
    ordered_json added = ordered_json::array();
    for (const auto& [u, v] : c.added) added.push_back({u, v});
    comp["graph"] = {{"p", c.graph.size()},
                     {"edges", c.graph.edge_count()},
                     {"k", r.decompositions.empty() ? 0 : r.decompositions.front().size()},
                     {"max_clique", max_clique_size(r.decompositions)},
                     {"separators", separator_count(r.decompositions)},
                     {"vertices", c.graph.labels()},
                     {"triangulation_added", added}};
    comp["samples"] = {{"n1", c.n1}, {"n2", c.n2}};
    comp["global_test"] = {{"statistic", r.global.statistic}, {"df", r.global.df}, {"p_value", r.global_p}};
    comp["streaming"] = r.streaming;

    ordered_json hyps = ordered_json::array();
    for (std::size_t h = 0; h < r.results.size(); ++h) {
      const TestResult& t = r.results[h];
      const Hypothesis& hyp = r.family.hypotheses[h];
      ordered_json row;
      row["key"] = t.key;
      row["target"] = labels_of(c.graph, hyp.target);
      row["given"] = labels_of(c.graph, hyp.given);
      row["statistic"] = t.statistic;
      row["df"] = t.df;
      row["asymptotic_p"] = t.asymptotic_p;
      row["permutation_p"] = t.permutation_p ? ordered_json(*t.permutation_p) : ordered_json(nullptr);
      row["adjusted_p"] = t.adjusted_p;
      row["rejected"] = t.rejected;
      hyps.push_back(std::move(row));
    }
    comp["hypotheses"] = std::move(hyps);

    ordered_json decs = ordered_json::array();
    for (std::size_t i = 0; i < r.decompositions.size(); ++i) {
      const Decomposition& d = r.decompositions[i];
      ordered_json cl = ordered_json::array(), sp = ordered_json::array();
      for (const auto& s : d.cliques) cl.push_back(labels_of(c.graph, s));
      for (const auto& s : d.separators) sp.push_back(labels_of(c.graph, s));
      decs.push_back({{"root", format_set(c.graph, d.cliques.front())},
                      {"cliques", cl},
                      {"separators", sp},
                      {"union", labels_of(c.graph, r.estimate.unions.at(i))}});
    }
    comp["decompositions"] = std::move(decs);
    comp["estimate"] = labels_of(c.graph, r.estimate.variables);
    if (include_timing) comp["timing_seconds"] = c.seconds;
    doc["components"].push_back(std::move(comp));
  }
  doc["estimate"] = report.estimate;
  doc["warnings"] = report.warnings;
  if (include_timing) doc["timing_seconds"] = report.seconds;
  return doc.dump(2) + "\n";
}

std::vector<LabelledEstimate> read_report_estimates(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("report: ") + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != "seedset-report/1")
      throw InputError("report: unsupported schema '" + doc.at("schema").get<std::string>() + "'");
    const json& s = doc.at("settings");
    std::vector<LabelledEstimate> out;
    for (const auto& comp : doc.at("components")) {
      LabelledEstimate e;
      e.alpha = s.at("alpha").get<double>();
      e.method = parse_method(s.at("method").get<std::string>());
      e.permutations = s.at("permutations").get<std::size_t>();
      e.variables = comp.at("estimate").get<std::vector<std::string>>();
      for (const auto& d : comp.at("decompositions"))
        e.unions.push_back(d.at("union").get<std::vector<std::string>>());
      out.push_back(std::move(e));
    }
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("report: ") + e.what());
  }
}

std::string report_table(const SeedSetReport& report) {
  std::ostringstream out;
  const ReportSettings& s = report.settings;
  out << "method " << to_string(s.method) << ", alpha " << s.alpha << ", permutations "
      << (s.method == Method::Bonferroni ? std::size_t{0} : s.permutations) << ", seed " << s.seed << "\n";
  for (std::size_t ci = 0; ci < report.components.size(); ++ci) {
    const ComponentReport& c = report.components[ci];
    const InferenceResult& r = c.result;
    out << "\ncomponent " << ci + 1 << ": p=" << c.graph.size()
        << " k=" << (r.decompositions.empty() ? 0 : r.decompositions.front().size())
        << " max_clique=" << max_clique_size(r.decompositions)
        << " separators=" << separator_count(r.decompositions) << " n1=" << c.n1 << " n2=" << c.n2
        << "\n";
    if (!c.added.empty()) {
      out << "triangulation added " << c.added.size() << " edge(s):";
      for (const auto& [u, v] : c.added) out << ' ' << u << '-' << v;
      out << '\n';
    }
    out << "global test: statistic " << fmt("%.4f", r.global.statistic) << ", df " << r.global.df
        << ", p " << fmt("%.3g", r.global_p) << "\n\n";

    std::size_t key_width = 10;
    for (const auto& t : r.results) key_width = std::max(key_width, t.key.size());
    char line[512];
    std::snprintf(line, sizeof line, "  %-*s %12s %5s %11s %11s %11s\n", static_cast<int>(key_width),
                  "hypothesis", "statistic", "df", "asympt_p", "perm_p", "adjusted_p");
    out << line;
    for (const auto& t : r.results) {
      std::snprintf(line, sizeof line, "%c %-*s %12.4f %5d %11.4g %11s %11.4g\n", t.rejected ? '*' : ' ',
                    static_cast<int>(key_width), t.key.c_str(), t.statistic, t.df, t.asymptotic_p,
                    t.permutation_p ? fmt("%.4g", *t.permutation_p).c_str() : "-", t.adjusted_p);
      out << line;
    }
    out << "\nunions:";
    for (const auto& u : r.estimate.unions) out << ' ' << braces(labels_of(c.graph, u));
    out << "\nestimate: " << braces(labels_of(c.graph, r.estimate.variables)) << "\n";
  }
  if (report.components.size() > 1) out << "\ncombined estimate: " << braces(report.estimate) << "\n";
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << "elapsed " << fmt("%.3f", report.seconds) << " s\n";
  return out.str();
}

}  // namespace seedset
