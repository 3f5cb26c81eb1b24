#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "wnmine/event_log.hpp"

namespace wnmine {

/// Normalized duration assigned to activities whose mean duration is zero.
inline constexpr double kZeroDurationFloor = 1e-6;

/// Activity -> mean duration divided by the global mean event duration.
using NormalizedDurations = std::map<ActivityLabel, double>;

/// Normalizes mean activity durations by the global mean so the interest factor
/// is dimensionless and equals 1 on uniform logs. If every event is instantaneous
/// the log is uniform and every activity maps to 1.
inline NormalizedDurations normalize_durations(const EventLog& log) {
  auto totals = activity_totals(log);
  std::size_t events = 0;
  double seconds = 0.0;
  for (const auto& [_, t] : totals) {
    events += t.count;
    seconds += t.total_seconds;
  }
  if (events == 0) throw LogError("cannot normalize durations of a log without events");
  const double global_mean = seconds / static_cast<double>(events);

  NormalizedDurations norm;
  for (const auto& [label, t] : totals) {
    if (global_mean == 0.0) {
      norm[label] = 1.0;
      continue;
    }
    const double mean = t.total_seconds / static_cast<double>(t.count);
    norm[label] = mean > 0.0 ? mean / global_mean : kZeroDurationFloor;
  }
  return norm;
}

inline double normalized_duration(const NormalizedDurations& norm, const ActivityLabel& label) {
  if (is_virtual(label)) return 1.0;
  auto it = norm.find(label);
  if (it == norm.end()) throw LogError("no normalized duration for activity '" + label + "'");
  return it->second;
}

/// Interest factor of `act` between its antecedent `pred` and consequent `succ`:
/// the activity's time divided by the product of its neighbours' times.
inline double interest_factor(const NormalizedDurations& norm, const ActivityLabel& pred, const ActivityLabel& act,
                              const ActivityLabel& succ) {
  return normalized_duration(norm, act) / (normalized_duration(norm, pred) * normalized_duration(norm, succ));
}

/// One observed (antecedent, activity, consequent) triple with its multiplicity.
struct TripleObservation {
  ActivityLabel predecessor;
  ActivityLabel activity;
  ActivityLabel successor;
  std::size_t count = 0;
  double f = 1.0;
};

struct DependencyEdge {
  ActivityLabel from;
  ActivityLabel to;
  double f = 1.0;
  double confidence = 0.0;
  double strength = 0.0;
  /// Directly-follows count of from -> to.
  std::size_t count = 0;
  /// Added by pruning to keep every activity connected to the boundary.
  bool synthetic = false;
};

inline double strength(const DependencyEdge& edge) { return std::abs(edge.f - 1.0); }

using EdgeKey = std::pair<ActivityLabel, ActivityLabel>;

/// Activities plus the virtual source and sink, with at most one edge per ordered pair.
struct DependencyGraph {
  std::set<ActivityLabel> nodes;
  std::map<EdgeKey, DependencyEdge> edges;

  const DependencyEdge* find(const ActivityLabel& from, const ActivityLabel& to) const {
    auto it = edges.find({from, to});
    return it == edges.end() ? nullptr : &it->second;
  }
};

/// Enumerates every (previous, current, next) triple of the log. Each trace is
/// read as source, events..., sink; the sink's own consequent is the sink.
inline std::vector<TripleObservation> enumerate_triples(const EventLog& log, const NormalizedDurations& norm) {
  std::map<std::tuple<ActivityLabel, ActivityLabel, ActivityLabel>, std::size_t> counts;
  for (const auto& trace : log.traces()) {
    const auto& ev = trace.events;
    const std::size_t n = ev.size();
    auto label_at = [&](std::size_t padded) -> const ActivityLabel& {
      if (padded == 0) return kSource;
      if (padded > n) return kSink;
      return ev[padded - 1].activity;
    };
    for (std::size_t k = 1; k <= n + 1; ++k) {
      ++counts[{label_at(k - 1), label_at(k), label_at(k + 1)}];
    }
  }
  std::vector<TripleObservation> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    const auto& [p, a, s] = key;
    out.push_back({p, a, s, count, interest_factor(norm, p, a, s)});
  }
  return out;
}

/// Builds the dependency graph. Edge p -> a carries the count-weighted geometric
/// mean of f over triples (p, a, *) and the directly-follows confidence
/// count(p -> a) / occurrences(p), where the source occurs once per trace.
inline DependencyGraph build_graph(const EventLog& log) {
  if (log.empty()) throw LogError("cannot build a dependency graph from an empty log");
  const auto norm = normalize_durations(log);

  struct Accumulator {
    std::size_t count = 0;
    double log_f_sum = 0.0;
  };
  std::map<EdgeKey, Accumulator> acc;
  std::map<ActivityLabel, std::size_t> occurrences;
  occurrences[kSource] = log.traces().size();
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) ++occurrences[e.activity];
  }

  for (const auto& t : enumerate_triples(log, norm)) {
    auto& a = acc[{t.predecessor, t.activity}];
    a.count += t.count;
    a.log_f_sum += static_cast<double>(t.count) * std::log(t.f);
  }

  DependencyGraph graph;
  graph.nodes = log.alphabet();
  graph.nodes.insert(kSource);
  graph.nodes.insert(kSink);
  for (const auto& [key, a] : acc) {
    DependencyEdge edge;
    edge.from = key.first;
    edge.to = key.second;
    edge.count = a.count;
    edge.f = std::exp(a.log_f_sum / static_cast<double>(a.count));
    edge.confidence = static_cast<double>(a.count) / static_cast<double>(occurrences.at(key.first));
    edge.strength = strength(edge);
    graph.edges.emplace(key, std::move(edge));
  }
  return graph;
}

namespace detail {

inline std::set<ActivityLabel> reachable(const DependencyGraph& g, const ActivityLabel& start, bool forward) {
  std::map<ActivityLabel, std::vector<ActivityLabel>> adj;
  for (const auto& [key, _] : g.edges) {
    if (forward) {
      adj[key.first].push_back(key.second);
    } else {
      adj[key.second].push_back(key.first);
    }
  }
  std::set<ActivityLabel> seen{start};
  std::vector<ActivityLabel> stack{start};
  while (!stack.empty()) {
    auto node = std::move(stack.back());
    stack.pop_back();
    for (const auto& next : adj[node]) {
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return seen;
}

inline void add_repair_edge(DependencyGraph& g, const ActivityLabel& from, const ActivityLabel& to, double theta) {
  DependencyEdge edge;
  edge.from = from;
  edge.to = to;
  edge.f = theta;
  edge.confidence = 0.0;
  edge.strength = strength(edge);
  edge.synthetic = true;
  g.edges.emplace(EdgeKey{from, to}, std::move(edge));
}

}  // namespace detail

/// Keeps the edges with f >= theta (and confidence >= min_confidence), then
/// reconnects stranded activities with synthetic boundary edges: first by
/// degree (no incoming -> from source, no outgoing -> to sink), then by
/// reachability so every activity lies on a source-to-sink path.
inline DependencyGraph prune(const DependencyGraph& graph, double theta, double min_confidence = 0.0) {
  if (!(theta > 0.0)) throw std::invalid_argument("pruning threshold must be positive");
  DependencyGraph out;
  out.nodes = graph.nodes;
  for (const auto& [key, edge] : graph.edges) {
    if (edge.synthetic) continue;
    if (edge.f >= theta && edge.confidence >= min_confidence) out.edges.emplace(key, edge);
  }

  std::set<ActivityLabel> has_in, has_out;
  for (const auto& [key, _] : out.edges) {
    has_out.insert(key.first);
    has_in.insert(key.second);
  }
  for (const auto& node : out.nodes) {
    if (is_virtual(node)) continue;
    if (!has_in.contains(node)) detail::add_repair_edge(out, kSource, node, theta);
    if (!has_out.contains(node)) detail::add_repair_edge(out, node, kSink, theta);
  }

  // Cycles cut off from the boundary keep their degrees but stay unreachable.
  for (;;) {
    auto fwd = detail::reachable(out, kSource, true);
    auto it = std::find_if(out.nodes.begin(), out.nodes.end(),
                           [&](const auto& n) { return !fwd.contains(n) && n != kSink; });
    if (it == out.nodes.end()) break;
    detail::add_repair_edge(out, kSource, *it, theta);
  }
  for (;;) {
    auto bwd = detail::reachable(out, kSink, false);
    auto it = std::find_if(out.nodes.begin(), out.nodes.end(),
                           [&](const auto& n) { return !bwd.contains(n) && n != kSource; });
    if (it == out.nodes.end()) break;
    detail::add_repair_edge(out, *it, kSink, theta);
  }
  return out;
}

/// Edges ordered by strength, strongest first; ties by endpoint labels.
inline std::vector<DependencyEdge> rank_by_strength(const DependencyGraph& graph) {
  std::vector<DependencyEdge> out;
  out.reserve(graph.edges.size());
  for (const auto& [_, e] : graph.edges) out.push_back(e);
  std::stable_sort(out.begin(), out.end(), [](const DependencyEdge& a, const DependencyEdge& b) {
    return a.strength > b.strength;
  });
  return out;
}

}  // namespace wnmine
