#pragma once

#include <functional>
#include <future>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wnmine/event_log.hpp"
#include "wnmine/interest.hpp"
#include "wnmine/workflow_net.hpp"

namespace wnmine {

inline constexpr double kDefaultTheta = 0.05;
inline constexpr std::size_t kDefaultMaxSubsetSize = 64;

struct PartitionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class PartitionStrategy { windowed };

struct DiscoveryConfig {
  double theta = kDefaultTheta;
  /// Explicit activity subsets; unset selects the automatic strategy.
  std::optional<std::vector<Alphabet>> partition;
  PartitionStrategy strategy = PartitionStrategy::windowed;
  std::size_t max_subset_size = kDefaultMaxSubsetSize;
  /// Secondary filter on directly-follows confidence; 0 disables it.
  double min_confidence = 0.0;
  /// Discover subnets concurrently. Never changes the result.
  bool parallel = false;
};

/// Splits the sorted alphabet into windows of at most `max_subset_size` labels,
/// consecutive windows sharing one label.
inline std::vector<Alphabet> partition_activities(const Alphabet& alphabet,
                                                  PartitionStrategy strategy = PartitionStrategy::windowed,
                                                  std::size_t max_subset_size = kDefaultMaxSubsetSize) {
  (void)strategy;
  if (max_subset_size < 2) throw PartitionError("max subset size must be at least 2");
  if (alphabet.empty()) throw PartitionError("cannot partition an empty alphabet");
  std::vector<ActivityLabel> labels(alphabet.begin(), alphabet.end());
  std::vector<Alphabet> out;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t end = std::min(begin + max_subset_size, labels.size());
    out.emplace_back(labels.begin() + static_cast<std::ptrdiff_t>(begin), labels.begin() + static_cast<std::ptrdiff_t>(end));
    if (end == labels.size()) break;
    begin = end - 1;
  }
  return out;
}

/// Throws PartitionError naming missing and unknown labels unless the subsets cover `alphabet` exactly.
inline void validate_partition(const Alphabet& alphabet, const std::vector<Alphabet>& partition) {
  Alphabet covered;
  for (const auto& subset : partition) covered.insert(subset.begin(), subset.end());
  std::vector<ActivityLabel> missing, extra;
  std::set_difference(alphabet.begin(), alphabet.end(), covered.begin(), covered.end(), std::back_inserter(missing));
  std::set_difference(covered.begin(), covered.end(), alphabet.begin(), alphabet.end(), std::back_inserter(extra));
  if (missing.empty() && extra.empty()) return;
  std::string msg = "partition does not cover the log alphabet;";
  if (!missing.empty()) {
    msg += " missing:";
    for (const auto& m : missing) msg += " '" + m + "'";
    if (!extra.empty()) msg += ";";
  }
  if (!extra.empty()) {
    msg += " unknown:";
    for (const auto& e : extra) msg += " '" + e + "'";
  }
  throw PartitionError(msg);
}

/// One labeled transition per activity and one place per edge between
/// activities; edges from the source or into the sink attach to those places.
inline WorkflowNet net_from_graph(const DependencyGraph& graph) {
  WorkflowNet net;
  net.places = {net.source, net.sink};
  for (const auto& node : graph.nodes) {
    if (is_virtual(node)) continue;
    net.transitions.emplace(transition_id(node), Transition{transition_id(node), node});
  }
  auto add_arc = [&](std::string from, std::string to, const DependencyEdge& e) {
    Arc arc{std::move(from), std::move(to)};
    net.arc_stats[arc] = ArcStats{e.f, e.confidence, e.strength, e.synthetic};
    net.arcs.insert(std::move(arc));
  };
  for (const auto& [key, edge] : graph.edges) {
    const auto& [from, to] = key;
    if (from == kSource && to == kSink) continue;
    if (from == kSource) {
      add_arc(net.source, transition_id(to), edge);
    } else if (to == kSink) {
      add_arc(transition_id(from), net.sink, edge);
    } else {
      auto place = place_id(from, to);
      net.places.insert(place);
      add_arc(transition_id(from), place, edge);
      add_arc(place, transition_id(to), edge);
    }
  }
  return net;
}

/// Prunes the dependency graph of an (already projected) log and maps it to a net.
inline WorkflowNet discover_subnet(const EventLog& projected_log, double theta, double min_confidence = 0.0) {
  if (projected_log.empty()) throw LogError("cannot discover a net from an empty log");
  return net_from_graph(prune(build_graph(projected_log), theta, min_confidence));
}

/// Union of nets: transitions fuse by label, sources and sinks fuse, and inner
/// places with the same labeled preset and postset collapse into one.
inline WorkflowNet merge(const std::vector<WorkflowNet>& nets) {
  if (nets.empty()) throw std::invalid_argument("merge needs at least one net");
  WorkflowNet out;
  out.places = {out.source, out.sink};

  for (std::size_t k = 0; k < nets.size(); ++k) {
    const auto& net = nets[k];
    std::map<std::string, std::string> rename;
    std::map<std::string, std::string> name_in_place_id;
    for (const auto& [id, t] : net.transitions) {
      if (t.label) {
        rename[id] = transition_id(*t.label);
        name_in_place_id[id] = *t.label;
        out.transitions.emplace(rename[id], Transition{rename[id], t.label});
      } else {
        rename[id] = "tau:" + std::to_string(k) + ":" + id;
        name_in_place_id[id] = rename[id];
        out.transitions.emplace(rename[id], Transition{rename[id], std::nullopt});
      }
    }
    for (const auto& place : net.places) {
      if (place == net.source) {
        rename[place] = out.source;
      } else if (place == net.sink) {
        rename[place] = out.sink;
      } else {
        std::set<ActivityLabel> pre, post;
        for (const auto& n : net.preset(place)) {
          if (auto it = name_in_place_id.find(n); it != name_in_place_id.end()) pre.insert(it->second);
        }
        for (const auto& n : net.postset(place)) {
          if (auto it = name_in_place_id.find(n); it != name_in_place_id.end()) post.insert(it->second);
        }
        rename[place] = place_id(pre, post);
      }
      out.places.insert(rename[place]);
    }
    for (const auto& arc : net.arcs) {
      Arc mapped{rename.at(arc.from), rename.at(arc.to)};
      if (auto s = net.arc_stats.find(arc); s != net.arc_stats.end()) {
        auto [it, inserted] = out.arc_stats.emplace(mapped, s->second);
        if (!inserted) it->second = preferred(it->second, s->second);
      }
      out.arcs.insert(std::move(mapped));
    }
  }
  return out;
}

/// Directly-follows pairs of the log that no single subset contains, and which
/// decomposed discovery therefore cannot observe.
inline std::vector<EdgeKey> coverage_gaps(const EventLog& log, const std::vector<Alphabet>& partition) {
  std::set<EdgeKey> pairs;
  for (const auto& trace : log.traces()) {
    for (std::size_t k = 1; k < trace.events.size(); ++k) {
      pairs.emplace(trace.events[k - 1].activity, trace.events[k].activity);
    }
  }
  std::vector<EdgeKey> gaps;
  for (const auto& p : pairs) {
    bool covered = std::any_of(partition.begin(), partition.end(), [&](const Alphabet& s) {
      return s.contains(p.first) && s.contains(p.second);
    });
    if (!covered) gaps.push_back(p);
  }
  return gaps;
}

/// The effective partition for `config` on `log`, validated.
inline std::vector<Alphabet> resolve_partition(const EventLog& log, const DiscoveryConfig& config) {
  if (config.partition) {
    validate_partition(log.alphabet(), *config.partition);
    return *config.partition;
  }
  return partition_activities(log.alphabet(), config.strategy, config.max_subset_size);
}

struct SubsetDiscovery {
  Alphabet activities;
  /// Pruned dependency graph of the projected log.
  DependencyGraph graph;
  WorkflowNet net;
};

struct DiscoveryResult {
  WorkflowNet net;
  std::vector<SubsetDiscovery> subsets;
};

/// Decomposed discovery keeping the per-subset graphs and nets.
inline DiscoveryResult discover_detailed(const EventLog& log, const DiscoveryConfig& config = {}) {
  if (log.empty()) throw LogError("cannot discover a net from an empty log");
  if (!(config.theta > 0.0)) throw std::invalid_argument("theta must be positive");

  DiscoveryResult result;
  for (auto& s : resolve_partition(log, config)) {
    if (!s.empty()) result.subsets.push_back(SubsetDiscovery{std::move(s), {}, {}});
  }
  auto run = [&](SubsetDiscovery& sub) {
    sub.graph = prune(build_graph(project(log, sub.activities)), config.theta, config.min_confidence);
    sub.net = net_from_graph(sub.graph);
  };
  if (config.parallel && result.subsets.size() > 1) {
    std::vector<std::future<void>> pending;
    pending.reserve(result.subsets.size());
    for (auto& sub : result.subsets) pending.push_back(std::async(std::launch::async, run, std::ref(sub)));
    for (auto& f : pending) f.get();
  } else {
    for (auto& sub : result.subsets) run(sub);
  }

  std::vector<WorkflowNet> nets;
  nets.reserve(result.subsets.size());
  for (const auto& sub : result.subsets) nets.push_back(sub.net);
  result.net = merge(nets);
  return result;
}

/// Decomposed discovery: project the log onto each activity subset, discover a
/// subnet per projection and merge the results.
inline WorkflowNet discover(const EventLog& log, const DiscoveryConfig& config = {}) {
  return discover_detailed(log, config).net;
}

}  // namespace wnmine
