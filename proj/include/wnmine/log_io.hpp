#pragma once

#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "wnmine/event_log.hpp"

namespace wnmine {

/// Column names used to read a CSV log.
struct CsvSchema {
  std::string case_id = "case_id";
  std::string activity = "activity";
  std::string start = "start";
  std::string end = "end";
};

struct ParseOptions {
  CsvSchema schema;
  /// Offset applied to timestamps that carry none. Unset means such timestamps are rejected.
  std::optional<std::chrono::minutes> default_offset;
};

namespace detail {

// RFC 4180 record splitter: quoted fields may hold commas, quotes ("") and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::string text) : text_(std::move(text)) {
    if (text_.rfind("\xEF\xBB\xBF", 0) == 0) pos_ = 3;
  }

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    while (pos_ < text_.size()) {
      if (text_[pos_] == '\n' || text_[pos_] == '\r') {
        ++pos_;  // skip blank lines
        continue;
      }
      break;
    }
    if (pos_ >= text_.size()) return false;

    std::string field;
    bool quoted = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field += '"';
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        break;
      } else {
        field += c;
      }
    }
    if (quoted) throw LogError("unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

inline std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Groups events by case id, keeping traces in order of first appearance.
class TraceBuilder {
 public:
  void add(Event e) {
    auto [it, inserted] = index_.try_emplace(e.case_id, traces_.size());
    if (inserted) traces_.push_back(Trace{e.case_id, {}});
    traces_[it->second].events.push_back(std::move(e));
  }

  EventLog build() && { return EventLog(std::move(traces_)); }

 private:
  std::vector<Trace> traces_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace detail

/// Reads a CSV event log with a header row. Row numbers in errors count data rows from 1.
inline EventLog parse_csv(std::istream& source, const ParseOptions& options = {}) {
  detail::CsvReader reader(detail::read_all(source));
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw LogError("empty file");

  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (fields[k] == name) return k;
    }
    throw LogError("missing column '" + name + "'");
  };
  const auto& schema = options.schema;
  const std::size_t c_case = column(schema.case_id);
  const std::size_t c_act = column(schema.activity);
  const std::size_t c_start = column(schema.start);
  const std::size_t c_end = column(schema.end);
  const std::size_t width = std::max({c_case, c_act, c_start, c_end}) + 1;

  detail::TraceBuilder builder;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    auto where = [&] { return "row " + std::to_string(row) + ": "; };
    if (fields.size() < width) throw LogError(where() + "too few fields");
    Event e;
    e.case_id = fields[c_case];
    e.activity = fields[c_act];
    if (e.case_id.empty()) throw LogError(where() + "empty case id");
    if (e.activity.empty()) throw LogError(where() + "empty activity");
    if (is_virtual(e.activity)) throw LogError(where() + "reserved activity label '" + e.activity + "'");
    try {
      e.start = parse_timestamp(fields[c_start], options.default_offset);
      e.end = parse_timestamp(fields[c_end], options.default_offset);
    } catch (const TimestampError& err) {
      throw LogError(where() + err.what());
    }
    if (e.end < e.start) throw LogError(where() + "end is before start");
    builder.add(std::move(e));
  }
  if (row == 0) throw LogError("no data rows");
  return std::move(builder).build();
}

inline EventLog parse_csv_string(const std::string& text, const ParseOptions& options = {}) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

/// Writes the default CSV schema. Parsing the output yields an equal log.
inline void write_csv(const EventLog& log, std::ostream& out) {
  out << "case_id,activity,start,end\n";
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      out << detail::csv_quote(e.case_id) << ',' << detail::csv_quote(e.activity) << ','
          << format_timestamp(e.start) << ',' << format_timestamp(e.end) << '\n';
    }
  }
}

inline std::string to_csv_string(const EventLog& log) {
  std::ostringstream out;
  write_csv(log, out);
  return out.str();
}

/// Reads the XES subset: `trace` elements holding `event` elements with
/// `concept:name`, `time:timestamp` and optionally `lifecycle:transition`
/// (start|complete). A start pairs with the next complete of the same activity
/// in the same trace; a lone complete becomes a zero-duration event.
inline EventLog parse_xes_subset(std::istream& source, const ParseOptions& options = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(source, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& err) {
    throw LogError(std::string("malformed XML: ") + err.what());
  }
  auto root = tree.get_child_optional("log");
  if (!root) throw LogError("missing <log> root element");

  auto attribute = [](const pt::ptree& node, const std::string& key) -> std::optional<std::string> {
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>") continue;
      if (child.get<std::string>("<xmlattr>.key", "") == key) {
        return child.get<std::string>("<xmlattr>.value", "");
      }
    }
    return std::nullopt;
  };

  detail::TraceBuilder builder;
  std::size_t trace_index = 0;
  for (const auto& [tag, trace_node] : *root) {
    if (tag != "trace") continue;
    ++trace_index;
    std::string case_id = attribute(trace_node, "concept:name").value_or("trace_" + std::to_string(trace_index));

    std::map<ActivityLabel, std::deque<TimePoint>> pending;
    std::size_t event_index = 0;
    for (const auto& [etag, event_node] : trace_node) {
      if (etag != "event") continue;
      ++event_index;
      auto where = [&] { return "trace '" + case_id + "' event " + std::to_string(event_index) + ": "; };
      auto name = attribute(event_node, "concept:name");
      auto stamp = attribute(event_node, "time:timestamp");
      if (!name || name->empty()) throw LogError(where() + "missing concept:name");
      if (!stamp) throw LogError(where() + "missing time:timestamp");
      if (is_virtual(*name)) throw LogError(where() + "reserved activity label '" + *name + "'");
      TimePoint when;
      try {
        when = parse_timestamp(*stamp, options.default_offset);
      } catch (const TimestampError& err) {
        throw LogError(where() + err.what());
      }
      std::string transition = attribute(event_node, "lifecycle:transition").value_or("complete");
      if (transition == "start") {
        pending[*name].push_back(when);
      } else if (transition == "complete") {
        auto& queue = pending[*name];
        TimePoint started = when;
        if (!queue.empty()) {
          started = queue.front();
          queue.pop_front();
        }
        if (when < started) throw LogError(where() + "complete precedes its start");
        builder.add(Event{case_id, *name, started, when});
      } else {
        throw LogError(where() + "unsupported lifecycle transition '" + transition + "'");
      }
    }
    for (const auto& [activity, queue] : pending) {
      if (!queue.empty()) {
        throw LogError("trace '" + case_id + "': start of '" + activity + "' has no matching complete");
      }
    }
  }
  return std::move(builder).build();
}

inline EventLog parse_xes_string(const std::string& text, const ParseOptions& options = {}) {
  std::istringstream in(text);
  return parse_xes_subset(in, options);
}

}  // namespace wnmine
