#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wnmine/event_log.hpp"

namespace wnmine {

struct Transition {
  std::string id;
  /// Empty for silent transitions.
  std::optional<ActivityLabel> label;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Arc {
  std::string from;
  std::string to;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Dependency statistics carried by arcs that realize a dependency edge.
struct ArcStats {
  double f = 1.0;
  double confidence = 0.0;
  double strength = 0.0;
  bool synthetic = false;

  friend bool operator==(const ArcStats&, const ArcStats&) = default;
};

/// Preference used when two arcs with stats collapse into one: observed over
/// synthetic, then stronger, then smaller f. Independent of argument order.
inline const ArcStats& preferred(const ArcStats& a, const ArcStats& b) {
  auto key = [](const ArcStats& s) { return std::make_tuple(s.synthetic, -s.strength, s.f, -s.confidence); };
  return key(b) < key(a) ? b : a;
}

/// Petri net with one source place and one sink place. Ids are plain strings;
/// containers are ordered so iteration (and therefore every export) is deterministic.
struct WorkflowNet {
  std::string source = "i";
  std::string sink = "o";
  std::set<std::string> places;
  std::map<std::string, Transition> transitions;
  std::set<Arc> arcs;
  std::map<Arc, ArcStats> arc_stats;

  bool is_place(const std::string& id) const { return places.contains(id); }
  bool is_transition(const std::string& id) const { return transitions.contains(id); }

  std::vector<std::string> preset(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& a : arcs) {
      if (a.to == node) out.push_back(a.from);
    }
    return out;
  }

  std::vector<std::string> postset(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& a : arcs) {
      if (a.from == node) out.push_back(a.to);
    }
    return out;
  }

  std::set<ActivityLabel> labels() const {
    std::set<ActivityLabel> out;
    for (const auto& [_, t] : transitions) {
      if (t.label) out.insert(*t.label);
    }
    return out;
  }

  friend bool operator==(const WorkflowNet&, const WorkflowNet&) = default;
};

namespace detail {

inline std::string escape_id_part(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == '>' || c == ',') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string transition_id(const ActivityLabel& label) { return "t:" + label; }

/// Place id for a place fed by `pre` and feeding `post` (transition labels).
inline std::string place_id(const std::set<ActivityLabel>& pre, const std::set<ActivityLabel>& post) {
  std::string id = "p:";
  bool first = true;
  for (const auto& l : pre) {
    if (!first) id += ',';
    id += detail::escape_id_part(l);
    first = false;
  }
  id += '>';
  first = true;
  for (const auto& l : post) {
    if (!first) id += ',';
    id += detail::escape_id_part(l);
    first = false;
  }
  return id;
}

inline std::string place_id(const ActivityLabel& from, const ActivityLabel& to) {
  return place_id(std::set<ActivityLabel>{from}, std::set<ActivityLabel>{to});
}

/// Lists every violated well-formedness condition; empty means the net is a
/// structurally valid Workflow Net.
inline std::vector<std::string> validate_wfnet(const WorkflowNet& net) {
  std::vector<std::string> violations;
  if (!net.is_place(net.source)) violations.push_back("source place missing: " + net.source);
  if (!net.is_place(net.sink)) violations.push_back("sink place missing: " + net.sink);
  if (net.source == net.sink) violations.push_back("source and sink coincide: " + net.source);
  for (const auto& id : net.places) {
    if (net.is_transition(id)) violations.push_back("id used by place and transition: " + id);
  }

  std::map<std::string, std::vector<std::string>> fwd, bwd;
  for (const auto& a : net.arcs) {
    const bool from_place = net.is_place(a.from), from_trans = net.is_transition(a.from);
    const bool to_place = net.is_place(a.to), to_trans = net.is_transition(a.to);
    if ((!from_place && !from_trans) || (!to_place && !to_trans)) {
      violations.push_back("dangling arc: " + a.from + " -> " + a.to);
      continue;
    }
    if (from_place == to_place) violations.push_back("non-bipartite arc: " + a.from + " -> " + a.to);
    if (a.to == net.source) violations.push_back("source has incoming arc: " + a.from + " -> " + a.to);
    if (a.from == net.sink) violations.push_back("sink has outgoing arc: " + a.from + " -> " + a.to);
    fwd[a.from].push_back(a.to);
    bwd[a.to].push_back(a.from);
  }

  auto closure = [](const std::string& start, std::map<std::string, std::vector<std::string>>& adj) {
    std::set<std::string> seen{start};
    std::vector<std::string> stack{start};
    while (!stack.empty()) {
      auto node = stack.back();
      stack.pop_back();
      for (const auto& next : adj[node]) {
        if (seen.insert(next).second) stack.push_back(next);
      }
    }
    return seen;
  };
  const auto from_source = closure(net.source, fwd);
  const auto to_sink = closure(net.sink, bwd);

  auto check_node = [&](const std::string& id) {
    if (!from_source.contains(id)) {
      violations.push_back("node unreachable: " + id);
    } else if (!to_sink.contains(id)) {
      violations.push_back("node cannot reach sink: " + id);
    }
  };
  for (const auto& id : net.places) check_node(id);
  for (const auto& [id, _] : net.transitions) check_node(id);
  return violations;
}

/// Labeled directly-follows pairs of a net: (x, y) such that some place is in
/// the postset of a transition labeled x and the preset of one labeled y.
inline std::set<std::pair<ActivityLabel, ActivityLabel>> directly_follows_pairs(const WorkflowNet& net) {
  std::map<std::string, std::vector<ActivityLabel>> place_in, place_out;
  for (const auto& a : net.arcs) {
    if (auto t = net.transitions.find(a.from); t != net.transitions.end() && t->second.label) {
      if (net.is_place(a.to)) place_in[a.to].push_back(*t->second.label);
    }
    if (auto t = net.transitions.find(a.to); t != net.transitions.end() && t->second.label) {
      if (net.is_place(a.from)) place_out[a.from].push_back(*t->second.label);
    }
  }
  std::set<std::pair<ActivityLabel, ActivityLabel>> pairs;
  for (const auto& [place, ins] : place_in) {
    auto it = place_out.find(place);
    if (it == place_out.end()) continue;
    for (const auto& x : ins) {
      for (const auto& y : it->second) pairs.emplace(x, y);
    }
  }
  return pairs;
}

/// Labels whose transitions are fed directly by the source place.
inline std::set<ActivityLabel> start_labels(const WorkflowNet& net) {
  std::set<ActivityLabel> out;
  for (const auto& a : net.arcs) {
    if (a.from != net.source) continue;
    if (auto t = net.transitions.find(a.to); t != net.transitions.end() && t->second.label) out.insert(*t->second.label);
  }
  return out;
}

/// Labels whose transitions feed the sink place directly.
inline std::set<ActivityLabel> end_labels(const WorkflowNet& net) {
  std::set<ActivityLabel> out;
  for (const auto& a : net.arcs) {
    if (a.to != net.sink) continue;
    if (auto t = net.transitions.find(a.from); t != net.transitions.end() && t->second.label) {
      out.insert(*t->second.label);
    }
  }
  return out;
}

}  // namespace wnmine
