#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wnmine/time.hpp"

namespace wnmine {

/// Activity names are compared by exact text equality.
using ActivityLabel = std::string;
using Alphabet = std::set<ActivityLabel>;

/// Virtual boundary activities. They never appear in a log; the parser rejects them.
inline const ActivityLabel kSource = "[source]";
inline const ActivityLabel kSink = "[sink]";

inline bool is_virtual(const ActivityLabel& label) { return label == kSource || label == kSink; }

struct LogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Event {
  std::string case_id;
  ActivityLabel activity;
  TimePoint start;
  TimePoint end;

  double duration_seconds() const { return seconds_between(start, end); }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Total order used inside a trace: start, then end, then activity name.
inline bool event_order(const Event& a, const Event& b) {
  return std::tie(a.start, a.end, a.activity) < std::tie(b.start, b.end, b.activity);
}

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// A multiset of traces keyed by case id. Immutable once built; construction
/// sorts each trace and enforces the log invariants.
class EventLog {
 public:
  EventLog() = default;

  explicit EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
    std::unordered_set<std::string> seen;
    for (auto& trace : traces_) {
      if (trace.events.empty()) throw LogError("trace '" + trace.case_id + "' has no events");
      if (!seen.insert(trace.case_id).second) throw LogError("duplicate case id '" + trace.case_id + "'");
      for (const auto& e : trace.events) {
        if (e.case_id != trace.case_id) {
          throw LogError("event with case id '" + e.case_id + "' placed in trace '" + trace.case_id + "'");
        }
        if (e.activity.empty()) throw LogError("empty activity label in case '" + trace.case_id + "'");
        if (is_virtual(e.activity)) throw LogError("reserved activity label '" + e.activity + "'");
        if (e.end < e.start) {
          throw LogError("event '" + e.activity + "' in case '" + trace.case_id + "' ends before it starts");
        }
        alphabet_.insert(e.activity);
      }
      std::stable_sort(trace.events.begin(), trace.events.end(), event_order);
    }
  }

  const std::vector<Trace>& traces() const { return traces_; }
  const Alphabet& alphabet() const { return alphabet_; }
  bool empty() const { return traces_.empty(); }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& t : traces_) n += t.size();
    return n;
  }

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  std::vector<Trace> traces_;
  Alphabet alphabet_;
};

inline Alphabet alphabet_of(const EventLog& log) { return log.alphabet(); }

/// Keeps only events whose activity is in `subset`, preserving order. Traces left
/// without events are dropped.
inline EventLog project(const EventLog& log, const Alphabet& subset) {
  std::vector<ActivityLabel> unknown;
  std::set_difference(subset.begin(), subset.end(), log.alphabet().begin(), log.alphabet().end(),
                      std::back_inserter(unknown));
  if (!unknown.empty()) {
    std::string msg = "projection onto unknown activities:";
    for (const auto& u : unknown) msg += " '" + u + "'";
    throw LogError(msg);
  }

  std::vector<Trace> kept;
  for (const auto& trace : log.traces()) {
    Trace out{trace.case_id, {}};
    for (const auto& e : trace.events) {
      if (subset.contains(e.activity)) out.events.push_back(e);
    }
    if (!out.events.empty()) kept.push_back(std::move(out));
  }
  return EventLog(std::move(kept));
}

/// Mean duration in seconds over every occurrence of `activity`.
inline double mean_duration(const EventLog& log, const ActivityLabel& activity) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      if (e.activity == activity) {
        total += e.duration_seconds();
        ++count;
      }
    }
  }
  if (count == 0) throw LogError("activity '" + activity + "' does not occur in the log");
  return total / static_cast<double>(count);
}

/// Per-activity occurrence counts and summed durations in one pass.
struct ActivityTotals {
  std::size_t count = 0;
  double total_seconds = 0.0;
};

inline std::map<ActivityLabel, ActivityTotals> activity_totals(const EventLog& log) {
  std::map<ActivityLabel, ActivityTotals> totals;
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      auto& t = totals[e.activity];
      ++t.count;
      t.total_seconds += e.duration_seconds();
    }
  }
  return totals;
}

/// The activity sequence of a trace.
inline std::vector<ActivityLabel> labels_of(const Trace& trace) {
  std::vector<ActivityLabel> out;
  out.reserve(trace.events.size());
  for (const auto& e : trace.events) out.push_back(e.activity);
  return out;
}

}  // namespace wnmine
