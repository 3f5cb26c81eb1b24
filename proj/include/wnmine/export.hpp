#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wnmine/diagnostics.hpp"
#include "wnmine/interest.hpp"
#include "wnmine/simulator.hpp"
#include "wnmine/workflow_net.hpp"

namespace wnmine {

using nlohmann::json;

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string strength_color(double strength) {
  if (strength < 0.25) return "gray30";
  if (strength < 1.0) return "darkorange";
  return "red3";
}

}  // namespace detail

/// Graphviz rendering: transitions as labeled boxes, places as circles, arcs
/// colored by dependency strength and dashed when they come from a synthetic edge.
inline std::string to_dot(const WorkflowNet& net, const std::string& comment = {}) {
  std::ostringstream out;
  if (!comment.empty()) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);) out << "// " << line << '\n';
  }
  out << "digraph workflow_net {\n";
  out << "  rankdir=LR;\n";
  for (const auto& p : net.places) {
    std::string label = p == net.source ? "i" : p == net.sink ? "o" : "";
    out << "  " << detail::dot_quote(p) << " [shape=circle, label=" << detail::dot_quote(label) << "];\n";
  }
  for (const auto& [id, t] : net.transitions) {
    out << "  " << detail::dot_quote(id) << " [shape=box, label=" << detail::dot_quote(t.label.value_or("")) << "];\n";
  }
  for (const auto& a : net.arcs) {
    out << "  " << detail::dot_quote(a.from) << " -> " << detail::dot_quote(a.to);
    if (auto s = net.arc_stats.find(a); s != net.arc_stats.end()) {
      out << " [color=" << detail::dot_quote(detail::strength_color(s->second.strength));
      if (s->second.synthetic) out << ", style=dashed";
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

/// Minimal PNML: one page with places (source marked), named transitions and arcs.
inline std::string to_pnml(const WorkflowNet& net, const std::string& comment = {}) {
  std::map<std::string, std::string> ids;
  std::size_t np = 0, nt = 0, na = 0;
  for (const auto& p : net.places) ids[p] = "p" + std::to_string(np++);
  for (const auto& [id, _] : net.transitions) ids[id] = "t" + std::to_string(nt++);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!comment.empty()) {
    std::string safe = comment;
    for (std::size_t pos; (pos = safe.find("--")) != std::string::npos;) safe.replace(pos, 2, "- -");
    out << "<!-- " << safe << " -->\n";
  }
  out << "<pnml>\n";
  out << "  <net id=\"workflow_net\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
  out << "    <page id=\"page0\">\n";
  for (const auto& p : net.places) {
    std::string name = p == net.source ? "i" : p == net.sink ? "o" : p;
    out << "      <place id=\"" << ids[p] << "\"><name><text>" << detail::xml_escape(name) << "</text></name>";
    if (p == net.source) out << "<initialMarking><text>1</text></initialMarking>";
    out << "</place>\n";
  }
  for (const auto& [id, t] : net.transitions) {
    out << "      <transition id=\"" << ids[id] << "\"><name><text>" << detail::xml_escape(t.label.value_or(""))
        << "</text></name></transition>\n";
  }
  for (const auto& a : net.arcs) {
    out << "      <arc id=\"a" << na++ << "\" source=\"" << ids[a.from] << "\" target=\"" << ids[a.to] << "\"/>\n";
  }
  out << "    </page>\n  </net>\n</pnml>\n";
  return out.str();
}

inline json to_json(const WorkflowNet& net) {
  json places = json::array();
  for (const auto& p : net.places) places.push_back(p);
  json transitions = json::array();
  for (const auto& [id, t] : net.transitions) {
    transitions.push_back({{"id", id}, {"label", t.label ? json(*t.label) : json(nullptr)}});
  }
  json arcs = json::array();
  for (const auto& a : net.arcs) {
    json arc = {{"from", a.from}, {"to", a.to}};
    if (auto s = net.arc_stats.find(a); s != net.arc_stats.end()) {
      arc["f"] = s->second.f;
      arc["confidence"] = s->second.confidence;
      arc["strength"] = s->second.strength;
      arc["synthetic"] = s->second.synthetic;
    }
    arcs.push_back(std::move(arc));
  }
  return {{"source", net.source}, {"sink", net.sink}, {"places", places}, {"transitions", transitions}, {"arcs", arcs}};
}

inline WorkflowNet net_from_json(const json& j) {
  WorkflowNet net;
  net.source = j.at("source").get<std::string>();
  net.sink = j.at("sink").get<std::string>();
  for (const auto& p : j.at("places")) net.places.insert(p.get<std::string>());
  for (const auto& t : j.at("transitions")) {
    Transition tr{t.at("id").get<std::string>(), std::nullopt};
    if (t.contains("label") && !t.at("label").is_null()) tr.label = t.at("label").get<std::string>();
    net.transitions.emplace(tr.id, tr);
  }
  for (const auto& a : j.at("arcs")) {
    Arc arc{a.at("from").get<std::string>(), a.at("to").get<std::string>()};
    if (a.contains("f")) {
      net.arc_stats[arc] = ArcStats{a.at("f").get<double>(), a.at("confidence").get<double>(),
                                    a.at("strength").get<double>(), a.at("synthetic").get<bool>()};
    }
    net.arcs.insert(std::move(arc));
  }
  return net;
}

inline json to_json(const DependencyEdge& e) {
  return {{"from", e.from},           {"to", e.to},         {"f", e.f},           {"confidence", e.confidence},
          {"strength", e.strength}, {"count", e.count}, {"synthetic", e.synthetic}};
}

inline json to_json(const DependencyGraph& g) {
  json edges = json::array();
  for (const auto& [_, e] : g.edges) edges.push_back(to_json(e));
  return {{"nodes", g.nodes}, {"edges", edges}};
}

inline json to_json(const LoopReport& r) {
  return {{"activity", r.activity},
          {"score", r.score},
          {"signal", r.signal},
          {"flagged", r.flagged},
          {"oracle_repeats", r.oracle_repeats}};
}

inline json to_json(const DelayReport& r) {
  return {{"edge", {r.from, r.to}}, {"mean_wait", r.mean_wait}, {"max_wait", r.max_wait}, {"count", r.count}};
}

inline json to_json(const ErrorReport& r) {
  return {{"ape", r.ape},
          {"false_positive_edges", r.false_positive_edges},
          {"false_negative_edges", r.false_negative_edges},
          {"gt_edges", r.gt_edges},
          {"runtime_ms", r.runtime_ms}};
}

inline json to_json(const DurationSpec& d) {
  switch (d.kind) {
    case DurationSpec::Kind::constant: return {{"distribution", "constant"}, {"value", d.a}};
    case DurationSpec::Kind::uniform: return {{"distribution", "uniform"}, {"lo", d.a}, {"hi", d.b}};
    case DurationSpec::Kind::lognormal: return {{"distribution", "lognormal"}, {"mu", d.a}, {"sigma", d.b}};
  }
  return {};
}

inline DurationSpec duration_from_json(const json& j) {
  const auto kind = j.at("distribution").get<std::string>();
  if (kind == "constant") return DurationSpec::constant(j.at("value").get<double>());
  if (kind == "uniform") return DurationSpec::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "lognormal") return DurationSpec::lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
  throw SimulationError("unknown duration distribution '" + kind + "'");
}

inline json to_json(const GroundTruthModel& m) {
  json profile = json::object();
  for (const auto& [label, d] : m.durations) profile[label] = to_json(d);
  json loops = json::object();
  for (const auto& [label, p] : m.loop_activities) loops[label] = p;
  return {{"net", to_json(m.net)},
          {"duration_profile", profile},
          {"loop_activities", loops},
          {"arc_count", m.net.arcs.size()},
          {"transition_count", m.net.transitions.size()}};
}

inline GroundTruthModel model_from_json(const json& j) {
  GroundTruthModel m;
  m.net = net_from_json(j.at("net"));
  for (const auto& [label, d] : j.at("duration_profile").items()) m.durations[label] = duration_from_json(d);
  if (j.contains("loop_activities")) {
    for (const auto& [label, p] : j.at("loop_activities").items()) m.loop_activities[label] = p.get<double>();
  }
  return m;
}

}  // namespace wnmine
