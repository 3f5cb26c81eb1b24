#pragma once

// Test-only generators and oracles. Nothing here calls into the code paths the
// oracles are used to check.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wnmine/event_log.hpp"
#include "wnmine/workflow_net.hpp"

namespace wnmine::testing {

inline std::string fixture(const std::string& name) { return std::string(WNMINE_FIXTURES) + "/" + name; }

inline TimePoint at_seconds(double s) {
  return TimePoint{} + std::chrono::milliseconds(static_cast<long long>(std::llround(s * 1000.0)));
}

/// Builds a log from label sequences; every event lasts `duration` seconds and
/// follows its predecessor immediately.
inline EventLog log_of(const std::vector<std::vector<std::string>>& sequences, double duration = 60.0) {
  std::vector<Trace> traces;
  for (std::size_t c = 0; c < sequences.size(); ++c) {
    Trace t{"c" + std::to_string(c), {}};
    double clock = 0.0;
    for (const auto& a : sequences[c]) {
      t.events.push_back(Event{t.case_id, a, at_seconds(clock), at_seconds(clock + duration)});
      clock += duration;
    }
    traces.push_back(std::move(t));
  }
  return EventLog(std::move(traces));
}

struct RandomLogShape {
  std::size_t max_traces = 50;
  std::size_t max_activities = 10;
  std::size_t max_length = 12;
  /// Probability that an event is instantaneous.
  double zero_duration = 0.05;
  bool uniform_durations = false;
};

inline EventLog random_log(std::mt19937_64& rng, const RandomLogShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> n_traces(1, shape.max_traces);
  std::uniform_int_distribution<std::size_t> n_acts(1, shape.max_activities);
  std::uniform_int_distribution<std::size_t> len(1, shape.max_length);
  std::uniform_real_distribution<double> dur(1.0, 7200.0);
  std::bernoulli_distribution instant(shape.zero_duration);

  const std::size_t activities = n_acts(rng);
  std::uniform_int_distribution<std::size_t> pick(0, activities - 1);
  std::vector<Trace> traces;
  const std::size_t count = n_traces(rng);
  for (std::size_t c = 0; c < count; ++c) {
    Trace t{"case" + std::to_string(c), {}};
    double clock = 1000.0 * static_cast<double>(c);
    const std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k) {
      std::string label = "act" + std::to_string(pick(rng));
      double d = shape.uniform_durations ? 60.0 : (instant(rng) ? 0.0 : std::round(dur(rng)));
      t.events.push_back(Event{t.case_id, label, at_seconds(clock), at_seconds(clock + d)});
      clock += d + 1.0;
    }
    traces.push_back(std::move(t));
  }
  return EventLog(std::move(traces));
}

/// Interest factor of every edge, recomputed occurrence by occurrence: the
/// normalized duration of the current activity over the product of its padded
/// neighbours', aggregated per (previous, current) by a geometric mean.
inline std::map<std::pair<std::string, std::string>, double> brute_force_edge_f(const EventLog& log) {
  std::map<std::string, double> sum;
  std::map<std::string, double> n;
  double total = 0.0, events = 0.0;
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events) {
      const double d = std::chrono::duration<double>(e.end - e.start).count();
      sum[e.activity] += d;
      n[e.activity] += 1.0;
      total += d;
      events += 1.0;
    }
  }
  const double global = total / events;
  auto nd = [&](const std::string& a) {
    if (a == "^" || a == "$") return 1.0;
    if (global == 0.0) return 1.0;
    const double m = sum.at(a) / n.at(a);
    return m > 0.0 ? m / global : 1e-6;
  };

  std::map<std::pair<std::string, std::string>, std::vector<double>> samples;
  for (const auto& t : log.traces()) {
    std::vector<std::string> padded{"^"};
    for (const auto& e : t.events) padded.push_back(e.activity);
    padded.push_back("$");
    padded.push_back("$");
    for (std::size_t k = 1; k + 1 < padded.size(); ++k) {
      const double f = nd(padded[k]) / (nd(padded[k - 1]) * nd(padded[k + 1]));
      samples[{padded[k - 1], padded[k]}].push_back(f);
    }
  }
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [key, fs] : samples) {
    double log_sum = 0.0;
    for (double f : fs) log_sum += std::log(f);
    auto from = key.first == "^" ? kSource : key.first;
    auto to = key.second == "$" ? kSink : key.second;
    out[{from, to}] = std::exp(log_sum / static_cast<double>(fs.size()));
  }
  return out;
}

/// Label-level description of a net with uniquely labeled transitions: every
/// arc rewritten with places replaced by their (preset labels, postset labels)
/// signature. Two such nets are isomorphic iff their descriptions are equal.
inline std::multiset<std::tuple<std::string, std::string>> label_structure(const WorkflowNet& net) {
  std::map<std::string, std::string> name;
  for (const auto& [id, t] : net.transitions) name[id] = "T(" + t.label.value_or("tau") + ")";
  for (const auto& p : net.places) {
    if (p == net.source) {
      name[p] = "SOURCE";
      continue;
    }
    if (p == net.sink) {
      name[p] = "SINK";
      continue;
    }
    std::multiset<std::string> pre, post;
    for (const auto& a : net.arcs) {
      if (a.to == p) pre.insert(name.count(a.from) ? name[a.from] : a.from);
      if (a.from == p) post.insert(name.count(a.to) ? name[a.to] : a.to);
    }
    std::string sig = "P[";
    for (const auto& s : pre) sig += s + ";";
    sig += "|";
    for (const auto& s : post) sig += s + ";";
    name[p] = sig + "]";
  }
  std::multiset<std::tuple<std::string, std::string>> out;
  for (const auto& a : net.arcs) out.emplace(name.at(a.from), name.at(a.to));
  return out;
}

inline bool isomorphic(const WorkflowNet& a, const WorkflowNet& b) {
  return a.places.size() == b.places.size() && a.transitions.size() == b.transitions.size() &&
         label_structure(a) == label_structure(b);
}

}  // namespace wnmine::testing
