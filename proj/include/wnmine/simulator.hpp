#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnmine/discovery.hpp"
#include "wnmine/event_log.hpp"
#include "wnmine/workflow_net.hpp"

namespace wnmine {

struct SimulationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Activity duration distribution, in seconds.
struct DurationSpec {
  enum class Kind { constant, uniform, lognormal };
  Kind kind = Kind::lognormal;
  /// constant: value; uniform: lo; lognormal: mu (log-seconds).
  double a = 0.0;
  /// uniform: hi; lognormal: sigma. Unused for constant.
  double b = 0.0;

  static DurationSpec constant(double seconds) { return {Kind::constant, seconds, 0.0}; }
  static DurationSpec uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  static DurationSpec lognormal(double mu, double sigma) { return {Kind::lognormal, mu, sigma}; }

  double mean() const {
    switch (kind) {
      case Kind::constant: return a;
      case Kind::uniform: return 0.5 * (a + b);
      case Kind::lognormal: return std::exp(a + 0.5 * b * b);
    }
    return 0.0;
  }

  template <typename Rng>
  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::constant: return a;
      case Kind::uniform: return std::uniform_real_distribution<double>(a, b)(rng);
      case Kind::lognormal: return std::lognormal_distribution<double>(a, b)(rng);
    }
    return 0.0;
  }

  friend bool operator==(const DurationSpec&, const DurationSpec&) = default;
};

inline const char* to_string(DurationSpec::Kind kind) {
  switch (kind) {
    case DurationSpec::Kind::constant: return "constant";
    case DurationSpec::Kind::uniform: return "uniform";
    case DurationSpec::Kind::lognormal: return "lognormal";
  }
  return "?";
}

struct GroundTruthModel {
  WorkflowNet net;
  std::map<ActivityLabel, DurationSpec> durations;
  /// Activity -> probability of immediately repeating after each execution.
  std::map<ActivityLabel, double> loop_activities;

  friend bool operator==(const GroundTruthModel&, const GroundTruthModel&) = default;
};

struct SimulationConfig {
  std::size_t num_traces = 100;
  /// Fraction of traces receiving one random insertion, deletion or swap.
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
};

struct SimulatedLog {
  EventLog log;
  /// Walks that hit the step cap and were discarded.
  std::size_t aborted_traces = 0;
};

struct ErrorReport {
  double ape = 0.0;
  std::size_t false_positive_edges = 0;
  std::size_t false_negative_edges = 0;
  std::size_t gt_edges = 0;
  std::int64_t runtime_ms = 0;
};

inline const TimePoint kSimulationEpoch = std::chrono::sys_days{std::chrono::year{2024} / 1 / 1};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Independent sub-seed for (seed, stream, index); trace i of a log always
/// draws from the same generator whatever order traces are produced in.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ stream) ^ index);
}

/// Smallest arc count of a generated model: the chain source -> a1 -> ... -> an -> sink.
inline std::size_t min_model_arcs(std::size_t num_activities) { return 2 * num_activities; }

/// Random ground-truth model: a chain of activities with extra forward edges
/// (each adding two arcs) and, for odd remainders, one extra boundary edge.
/// Extra edges span at most the smallest window that can hold them, so every
/// edge stays likely enough to be observed. Durations are lognormal around one
/// hour with a per-activity scale.
inline GroundTruthModel generate_model(std::size_t num_activities, std::size_t target_arcs, std::uint64_t seed) {
  if (num_activities < 3) throw SimulationError("a model needs at least 3 activities");
  if (target_arcs < min_model_arcs(num_activities)) {
    throw SimulationError("target of " + std::to_string(target_arcs) + " arcs is below the " +
                          std::to_string(min_model_arcs(num_activities)) + " needed to connect " +
                          std::to_string(num_activities) + " activities");
  }
  const std::size_t n = num_activities;
  const std::size_t extra = target_arcs - min_model_arcs(n);
  const std::size_t internal_needed = extra / 2;
  const bool boundary_needed = extra % 2 == 1;

  // Forward pairs (i, j) with 2 <= j - i <= window.
  std::size_t window = 1;
  auto capacity = [n](std::size_t w) {
    std::size_t c = 0;
    for (std::size_t d = 2; d <= w && d < n; ++d) c += n - d;
    return c;
  };
  while (capacity(window) < internal_needed) {
    if (window >= n - 1) {
      throw SimulationError("target of " + std::to_string(target_arcs) + " arcs exceeds what " +
                            std::to_string(n) + " activities can hold");
    }
    ++window;
  }

  std::mt19937_64 rng(derive_seed(seed, 0x6d6f64656cULL, 0));
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 2; d <= window && i + d < n; ++d) candidates.emplace_back(i, i + d);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(internal_needed);
  std::sort(candidates.begin(), candidates.end());

  const std::size_t width = std::to_string(n).size();
  std::vector<ActivityLabel> labels;
  for (std::size_t i = 0; i < n; ++i) {
    auto digits = std::to_string(i + 1);
    labels.push_back("a" + std::string(width - digits.size(), '0') + digits);
  }

  DependencyGraph graph;
  graph.nodes.insert(labels.begin(), labels.end());
  graph.nodes.insert(kSource);
  graph.nodes.insert(kSink);
  auto add = [&](const ActivityLabel& from, const ActivityLabel& to) {
    graph.edges.emplace(EdgeKey{from, to}, DependencyEdge{from, to, 1.0, 1.0, 0.0, 1, false});
  };
  add(kSource, labels.front());
  add(labels.back(), kSink);
  for (std::size_t i = 0; i + 1 < n; ++i) add(labels[i], labels[i + 1]);
  for (const auto& [i, j] : candidates) add(labels[i], labels[j]);
  if (boundary_needed) {
    // Alternative entry point somewhere after the first activity.
    std::uniform_int_distribution<std::size_t> pick(1, n - 1);
    add(kSource, labels[pick(rng)]);
  }

  GroundTruthModel model;
  model.net = net_from_graph(graph);
  model.net.arc_stats.clear();
  std::uniform_real_distribution<double> scale(-0.5, 0.5);
  for (const auto& l : labels) model.durations[l] = DurationSpec::lognormal(std::log(3600.0) + scale(rng), 0.5);
  return model;
}

/// Marks `count` activities, picked by a seeded shuffle, as rework loops that
/// repeat immediately with `probability` after each execution.
inline void add_loops(GroundTruthModel& model, std::size_t count, double probability, std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) throw SimulationError("loop probability outside [0, 1]");
  auto labels = model.net.labels();
  if (count > labels.size()) throw SimulationError("more loop activities than activities");
  std::vector<ActivityLabel> pool(labels.begin(), labels.end());
  std::mt19937_64 rng(derive_seed(seed, 3, 0));
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t k = 0; k < count; ++k) model.loop_activities[pool[k]] = probability;
}

/// Throws SimulationError if the model cannot drive a simulation.
inline void validate_model(const GroundTruthModel& model) {
  auto violations = validate_wfnet(model.net);
  if (!violations.empty()) throw SimulationError("ground-truth net is not a workflow net: " + violations.front());
  for (const auto& label : model.net.labels()) {
    auto it = model.durations.find(label);
    if (it == model.durations.end()) throw SimulationError("no duration profile for '" + label + "'");
    const auto& d = it->second;
    bool ok = d.kind == DurationSpec::Kind::constant    ? d.a >= 0.0
              : d.kind == DurationSpec::Kind::uniform   ? d.a >= 0.0 && d.b >= d.a
                                                        : d.b > 0.0;
    if (!ok) throw SimulationError("invalid duration parameters for '" + label + "'");
  }
  for (const auto& [label, p] : model.loop_activities) {
    if (!model.net.labels().contains(label)) throw SimulationError("loop activity '" + label + "' not in the net");
    if (!(p >= 0.0 && p <= 1.0)) throw SimulationError("loop probability of '" + label + "' outside [0, 1]");
  }
}

/// Walk view of a net: each transition passes control to one of its output
/// places, chosen uniformly, and each place to one of its output transitions.
class NetWalker {
 public:
  explicit NetWalker(const WorkflowNet& net) : net_(net) {
    for (const auto& a : net.arcs) out_[a.from].push_back(a.to);
  }

  const std::vector<std::string>& next(const std::string& node) const {
    static const std::vector<std::string> none;
    auto it = out_.find(node);
    return it == out_.end() ? none : it->second;
  }

  const WorkflowNet& net() const { return net_; }

 private:
  const WorkflowNet& net_;
  std::map<std::string, std::vector<std::string>> out_;
};

/// True if `labels` is the label sequence of some source-to-sink walk of the net.
inline bool replays(const WorkflowNet& net, const std::vector<ActivityLabel>& labels) {
  NetWalker walker(net);
  std::set<std::string> places{net.source};
  for (const auto& label : labels) {
    std::set<std::string> after;
    for (const auto& p : places) {
      for (const auto& t : walker.next(p)) {
        auto it = net.transitions.find(t);
        if (it == net.transitions.end() || it->second.label != label) continue;
        const auto& outs = walker.next(t);
        after.insert(outs.begin(), outs.end());
      }
    }
    if (after.empty()) return false;
    places = std::move(after);
  }
  return places.contains(net.sink);
}

namespace detail {

template <typename Rng>
std::size_t uniform_index(Rng& rng, std::size_t size) {
  return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
}

// Returns false when the walk exceeds the step cap.
template <typename Rng>
bool random_walk(const NetWalker& walker, const GroundTruthModel& model, std::size_t step_cap, Rng& rng,
                 std::vector<ActivityLabel>& out) {
  const auto& net = walker.net();
  std::string place = net.source;
  while (place != net.sink) {
    const auto& transitions = walker.next(place);
    if (transitions.empty()) return false;
    const std::string& t = transitions[uniform_index(rng, transitions.size())];
    const auto& label = *net.transitions.at(t).label;
    out.push_back(label);
    if (auto loop = model.loop_activities.find(label); loop != model.loop_activities.end()) {
      while (out.size() <= step_cap && std::bernoulli_distribution(loop->second)(rng)) out.push_back(label);
    }
    if (out.size() > step_cap) return false;
    const auto& places = walker.next(t);
    if (places.empty()) return false;
    place = places[uniform_index(rng, places.size())];
  }
  return true;
}

template <typename Rng>
void apply_noise(std::vector<ActivityLabel>& seq, const std::vector<ActivityLabel>& alphabet, Rng& rng) {
  int op = std::uniform_int_distribution<int>(0, 2)(rng);
  if (op == 1 && seq.size() < 2) op = 0;
  if (op == 2 && seq.size() < 2) op = 0;
  switch (op) {
    case 0: {
      auto pos = std::uniform_int_distribution<std::size_t>(0, seq.size())(rng);
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(pos), alphabet[uniform_index(rng, alphabet.size())]);
      break;
    }
    case 1:
      seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, seq.size())));
      break;
    default: {
      auto pos = uniform_index(rng, seq.size() - 1);
      std::swap(seq[pos], seq[pos + 1]);
      break;
    }
  }
}

inline TimePoint to_time(TimePoint base, double seconds) {
  return base + std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
}

}  // namespace detail

/// Simulates `config.num_traces` source-to-sink walks with timed events. The
/// first ceil(noise_rate * num_traces) traces of a seeded shuffle get one noise
/// operation. Every trace draws from its own sub-seed.
inline SimulatedLog generate_log(const GroundTruthModel& model, const SimulationConfig& config) {
  validate_model(model);
  if (config.num_traces == 0) throw SimulationError("num_traces must be positive");
  if (!(config.noise_rate >= 0.0 && config.noise_rate <= 1.0)) throw SimulationError("noise_rate outside [0, 1]");

  const NetWalker walker(model.net);
  const std::size_t step_cap = 10 * model.net.transitions.size();
  const auto labels = model.net.labels();
  const std::vector<ActivityLabel> alphabet(labels.begin(), labels.end());

  const auto noisy_count = static_cast<std::size_t>(
      std::ceil(config.noise_rate * static_cast<double>(config.num_traces) - 1e-9));
  std::vector<std::size_t> order(config.num_traces);
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::mt19937_64 noise_pick(derive_seed(config.seed, 1, 0));
  std::shuffle(order.begin(), order.end(), noise_pick);
  std::vector<bool> noisy(config.num_traces, false);
  for (std::size_t k = 0; k < noisy_count; ++k) noisy[order[k]] = true;

  const std::size_t width = std::to_string(config.num_traces).size();
  SimulatedLog result;
  std::vector<Trace> traces;
  traces.reserve(config.num_traces);
  for (std::size_t i = 0; i < config.num_traces; ++i) {
    std::mt19937_64 rng(derive_seed(config.seed, 2, i));
    std::vector<ActivityLabel> seq;
    if (!detail::random_walk(walker, model, step_cap, rng, seq)) {
      ++result.aborted_traces;
      continue;
    }
    if (noisy[i]) detail::apply_noise(seq, alphabet, rng);

    auto digits = std::to_string(i + 1);
    Trace trace{"case_" + std::string(width - digits.size(), '0') + digits, {}};
    double clock = 3600.0 * static_cast<double>(i);
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const auto& spec = model.durations.at(seq[k]);
      if (k > 0) clock += std::uniform_real_distribution<double>(0.0, spec.mean())(rng);
      const double duration = std::max(0.0, spec.sample(rng));
      TimePoint start = detail::to_time(kSimulationEpoch, clock);
      clock += duration;
      TimePoint end = detail::to_time(kSimulationEpoch, clock);
      trace.events.push_back(Event{trace.case_id, seq[k], start, end});
    }
    traces.push_back(std::move(trace));
  }
  result.log = EventLog(std::move(traces));
  return result;
}

/// Compares the labeled directly-follows pairs of the two nets.
inline ErrorReport measure_error(const GroundTruthModel& ground_truth, const WorkflowNet& discovered) {
  const auto truth = directly_follows_pairs(ground_truth.net);
  if (truth.empty()) throw SimulationError("ground truth has no directly-follows edges");
  const auto found = directly_follows_pairs(discovered);
  ErrorReport r;
  r.gt_edges = truth.size();
  for (const auto& p : found) {
    if (!truth.contains(p)) ++r.false_positive_edges;
  }
  for (const auto& p : truth) {
    if (!found.contains(p)) ++r.false_negative_edges;
  }
  r.ape = 100.0 * static_cast<double>(r.false_positive_edges + r.false_negative_edges) / static_cast<double>(r.gt_edges);
  return r;
}

struct BenchOptions {
  double noise_rate = 0.1;
  DiscoveryConfig discovery;
};

struct BenchResult {
  ErrorReport report;
  std::size_t events = 0;
  std::size_t model_arcs = 0;
  std::size_t aborted_traces = 0;
};

/// Process CPU time in milliseconds.
inline std::int64_t cpu_time_ms() {
  return static_cast<std::int64_t>(1000.0 * static_cast<double>(std::clock()) / CLOCKS_PER_SEC);
}

/// Generate a model, simulate a log, discover a net and score it. runtime_ms
/// is the CPU time of the discovery call alone.
inline BenchResult bench(std::size_t num_activities, std::size_t target_arcs, std::size_t num_traces, std::uint64_t seed,
                         const BenchOptions& options = {}) {
  auto model = generate_model(num_activities, target_arcs, seed);
  auto sim = generate_log(model, SimulationConfig{num_traces, options.noise_rate, seed});
  const auto started = cpu_time_ms();
  auto net = discover(sim.log, options.discovery);
  const auto elapsed = cpu_time_ms() - started;
  BenchResult result;
  result.report = measure_error(model, net);
  result.report.runtime_ms = std::max<std::int64_t>(0, elapsed);
  result.events = sim.log.event_count();
  result.model_arcs = model.net.arcs.size();
  result.aborted_traces = sim.aborted_traces;
  return result;
}

}  // namespace wnmine
