#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wnmine/event_log.hpp"

namespace wnmine {

/// Identifies one position of a trace padded with source and sink:
/// position 0 is the source, 1..n the events, n + 1 the sink.
struct Occurrence {
  std::size_t trace = 0;
  std::size_t position = 0;

  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

// Loop score
// ----------
// For activity a over occurrence sets
//   O = occurrences of a
//   P = occurrences directly preceding some occurrence of a (source included)
//   S = occurrences directly following some occurrence of a (sink included)
// the score is |(O u P) \ (O u S)| / |P|. Predecessors that are themselves a,
// or that also follow an a, are rework evidence; a loop-free activity scores 1.
// The loop signal 1 - score grows with rework and is what gets thresholded.

/// Occurrence-set evaluation of the loop score. Throws if `activity` is absent.
inline double loop_score(const EventLog& log, const ActivityLabel& activity) {
  std::set<Occurrence> own, pred, succ;
  const auto& traces = log.traces();
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& ev = traces[t].events;
    for (std::size_t k = 0; k < ev.size(); ++k) {
      if (ev[k].activity != activity) continue;
      const std::size_t pos = k + 1;
      own.insert({t, pos});
      pred.insert({t, pos - 1});
      succ.insert({t, pos + 1});
    }
  }
  if (own.empty()) throw LogError("activity '" + activity + "' does not occur in the log");

  std::set<Occurrence> lhs = own, rhs = own;
  lhs.insert(pred.begin(), pred.end());
  rhs.insert(succ.begin(), succ.end());
  std::vector<Occurrence> diff;
  std::set_difference(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(diff));
  return static_cast<double>(diff.size()) / static_cast<double>(pred.size());
}

/// Number of traces in which `activity` occurs at least twice.
inline std::size_t brute_force_repeats(const EventLog& log, const ActivityLabel& activity) {
  std::size_t n = 0;
  for (const auto& trace : log.traces()) {
    std::size_t seen = 0;
    for (const auto& e : trace.events) {
      if (e.activity == activity && ++seen == 2) {
        ++n;
        break;
      }
    }
  }
  return n;
}

struct LoopReport {
  ActivityLabel activity;
  double score = 0.0;
  /// 1 - score; compared against the threshold.
  double signal = 0.0;
  bool flagged = false;
  std::size_t oracle_repeats = 0;
};

namespace detail {

struct LoopCounts {
  std::size_t occurrences = 0;
  std::size_t clean_predecessors = 0;
  std::size_t repeats = 0;
};

// Single pass: each occurrence of a has exactly one predecessor, so |P| = |O|,
// and a predecessor survives the set difference iff it is not an a and is not
// itself preceded by an a.
inline std::map<ActivityLabel, LoopCounts> loop_counts(const EventLog& log) {
  std::map<ActivityLabel, LoopCounts> out;
  for (const auto& trace : log.traces()) {
    const auto& ev = trace.events;
    std::map<ActivityLabel, std::size_t> per_trace;
    for (std::size_t k = 0; k < ev.size(); ++k) {
      const auto& a = ev[k].activity;
      auto& c = out[a];
      ++c.occurrences;
      ++per_trace[a];
      bool clean = true;
      if (k >= 1 && ev[k - 1].activity == a) clean = false;
      if (k >= 2 && ev[k - 2].activity == a) clean = false;
      if (clean) ++c.clean_predecessors;
    }
    for (const auto& [a, n] : per_trace) {
      if (n >= 2) ++out[a].repeats;
    }
  }
  return out;
}

}  // namespace detail

/// Loop report for every activity of the log, flagged when the loop signal
/// exceeds `tau`; ordered by signal descending, then label.
inline std::vector<LoopReport> detect_loops(const EventLog& log, double tau) {
  std::vector<LoopReport> out;
  for (const auto& [label, c] : detail::loop_counts(log)) {
    LoopReport r;
    r.activity = label;
    r.score = static_cast<double>(c.clean_predecessors) / static_cast<double>(c.occurrences);
    r.signal = 1.0 - r.score;
    r.flagged = r.signal > tau;
    r.oracle_repeats = c.repeats;
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const LoopReport& a, const LoopReport& b) {
    if (a.signal != b.signal) return a.signal > b.signal;
    return a.activity < b.activity;
  });
  return out;
}

inline constexpr double kLoopCalibrationMargin = 0.05;

struct LoopCalibration {
  double tau = kLoopCalibrationMargin;
  std::size_t baseline_traces = 0;
  double baseline_max_signal = 0.0;
};

/// Threshold from a loop-free baseline: the traces in which no activity repeats.
/// tau is the baseline's largest loop signal plus a fixed margin.
inline LoopCalibration calibrate_loop_threshold(const EventLog& log) {
  std::vector<Trace> baseline;
  for (const auto& trace : log.traces()) {
    std::set<ActivityLabel> seen;
    bool repeats = false;
    for (const auto& e : trace.events) {
      if (!seen.insert(e.activity).second) {
        repeats = true;
        break;
      }
    }
    if (!repeats) baseline.push_back(trace);
  }
  LoopCalibration cal;
  cal.baseline_traces = baseline.size();
  if (!baseline.empty()) {
    for (const auto& r : detect_loops(EventLog(std::move(baseline)), std::numeric_limits<double>::infinity())) {
      cal.baseline_max_signal = std::max(cal.baseline_max_signal, r.signal);
    }
  }
  cal.tau = cal.baseline_max_signal + kLoopCalibrationMargin;
  return cal;
}

struct DelayReport {
  ActivityLabel from;
  ActivityLabel to;
  double mean_wait = 0.0;
  double max_wait = 0.0;
  std::size_t count = 0;
};

/// Waiting time on every directly-follows pair: start of the follower minus end
/// of its predecessor, clamped at zero. Returns all pairs ordered by mean wait
/// descending, then by labels.
inline std::vector<DelayReport> all_delays(const EventLog& log) {
  struct Acc {
    double sum = 0.0;
    double max = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<ActivityLabel, ActivityLabel>, Acc> acc;
  for (const auto& trace : log.traces()) {
    const auto& ev = trace.events;
    for (std::size_t k = 1; k < ev.size(); ++k) {
      const double wait = std::max(0.0, seconds_between(ev[k - 1].end, ev[k].start));
      auto& a = acc[{ev[k - 1].activity, ev[k].activity}];
      a.sum += wait;
      a.max = std::max(a.max, wait);
      ++a.count;
    }
  }
  std::vector<DelayReport> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    out.push_back({key.first, key.second, a.sum / static_cast<double>(a.count), a.max, a.count});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DelayReport& a, const DelayReport& b) { return a.mean_wait > b.mean_wait; });
  return out;
}

/// The `top_k` directly-follows pairs with the longest mean wait.
inline std::vector<DelayReport> detect_delays(const EventLog& log, std::size_t top_k) {
  if (top_k < 1) throw std::invalid_argument("top_k must be at least 1");
  auto all = all_delays(log);
  if (all.size() > top_k) all.resize(top_k);
  return all;
}

}  // namespace wnmine
