#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "wnmine/diagnostics.hpp"
#include "wnmine/discovery.hpp"
#include "wnmine/export.hpp"
#include "wnmine/log_io.hpp"
#include "wnmine/simulator.hpp"

namespace wnmine::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes.
enum Exit : int { ok = 0, input_error = 1, usage_error = 2, invariant_violation = 3 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

/// Shortest text that parses back to the same double.
inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool color = false;

  void status(const std::string& msg) const {
    if (color) {
      err << "\x1b[32mok\x1b[0m " << msg << '\n';
    } else {
      err << "ok " << msg << '\n';
    }
  }
  void error(const std::string& msg) const {
    if (color) {
      err << "\x1b[31merror\x1b[0m " << msg << '\n';
    } else {
      err << "error " << msg << '\n';
    }
  }
};

/// Everything needed to reproduce a run: the command, its effective arguments
/// (outputs excluded) and digests of the inputs it read.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  json parameters = json::object();
  std::vector<std::pair<std::string, std::string>> inputs;

  json to_json() const {
    json in = json::array();
    for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
    return {{"command", command},
            {"tool_version", kToolVersion},
            {"arguments", arguments},
            {"parameters", parameters},
            {"inputs", in}};
  }
};

namespace detail {

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::optional<std::chrono::minutes> parse_offset(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    auto tp = parse_timestamp("1970-01-01T00:00:00" + text);
    return std::chrono::duration_cast<std::chrono::minutes>(TimePoint{} - tp);
  } catch (const TimestampError&) {
    throw UsageError("invalid --default-offset '" + text + "' (expected +HH:MM, -HH:MM or Z)");
  }
}

struct LoadedLog {
  EventLog log;
  std::string digest;
};

inline LoadedLog load_log(const std::string& path, std::string format, const std::string& default_offset) {
  if (format.empty()) {
    format = path.size() >= 4 && path.compare(path.size() - 4, 4, ".xes") == 0 ? "xes" : "csv";
  }
  ParseOptions options;
  options.default_offset = parse_offset(default_offset);
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  LoadedLog loaded;
  loaded.digest = sha256_hex(bytes);
  if (format == "csv") {
    loaded.log = parse_csv(in, options);
  } else if (format == "xes") {
    loaded.log = parse_xes_subset(in, options);
  } else {
    throw UsageError("unknown --format '" + format + "'");
  }
  return loaded;
}

inline std::vector<Alphabet> read_partition(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("partition file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw UsageError("partition file must hold an array of label arrays");
  std::vector<Alphabet> out;
  for (const auto& subset : j) {
    if (!subset.is_array()) throw UsageError("partition file must hold an array of label arrays");
    Alphabet s;
    for (const auto& label : subset) s.insert(label.get<std::string>());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// discover -------------------------------------------------------------------

struct DiscoverOptions {
  std::string log_path;
  std::string format;
  std::string default_offset;
  double theta = kDefaultTheta;
  std::string partition = "auto";
  std::size_t max_subset_size = kDefaultMaxSubsetSize;
  double min_confidence = 0.0;
  std::vector<std::string> out_formats;
  std::string output;
  bool parallel = false;
};

inline int cmd_discover(const DiscoverOptions& opt, const Console& console) {
  if (!(opt.theta > 0.0)) throw UsageError("--theta must be positive");
  if (opt.max_subset_size < 2) throw UsageError("--max-subset-size must be at least 2");
  auto formats = opt.out_formats.empty() ? std::vector<std::string>{"json"} : opt.out_formats;
  for (const auto& f : formats) {
    if (f != "dot" && f != "json" && f != "pnml") throw UsageError("unknown --out format '" + f + "'");
  }
  if (formats.size() > 1 && opt.output.empty()) throw UsageError("--output is required with several --out formats");

  auto loaded = detail::load_log(opt.log_path, opt.format, opt.default_offset);
  RunManifest manifest;
  manifest.command = "discover";
  manifest.inputs.emplace_back(opt.log_path, loaded.digest);

  DiscoveryConfig config;
  config.theta = opt.theta;
  config.max_subset_size = opt.max_subset_size;
  config.min_confidence = opt.min_confidence;
  config.parallel = opt.parallel;
  if (opt.partition != "auto") {
    const std::string bytes = read_file(opt.partition);
    manifest.inputs.emplace_back(opt.partition, sha256_hex(bytes));
    config.partition = detail::read_partition(opt.partition);
  }

  manifest.arguments = {opt.log_path,        "--theta",          exact(opt.theta),
                        "--partition",       opt.partition,      "--max-subset-size",
                        std::to_string(opt.max_subset_size), "--min-confidence", exact(opt.min_confidence)};
  if (!opt.format.empty()) manifest.arguments.insert(manifest.arguments.end(), {"--format", opt.format});
  if (!opt.default_offset.empty()) {
    manifest.arguments.insert(manifest.arguments.end(), {"--default-offset", opt.default_offset});
  }
  for (const auto& f : formats) manifest.arguments.insert(manifest.arguments.end(), {"--out", f});
  if (opt.parallel) manifest.arguments.push_back("--parallel");
  manifest.parameters = {{"theta", opt.theta},
                         {"partition", opt.partition},
                         {"max_subset_size", opt.max_subset_size},
                         {"min_confidence", opt.min_confidence},
                         {"formats", formats},
                         {"parallel", opt.parallel}};

  const auto partition = resolve_partition(loaded.log, config);
  const auto result = discover_detailed(loaded.log, config);
  const auto violations = validate_wfnet(result.net);

  const std::string manifest_text = manifest.to_json().dump();
  for (const auto& f : formats) {
    std::string content;
    if (f == "dot") {
      content = to_dot(result.net, "manifest: " + manifest_text);
    } else if (f == "pnml") {
      content = to_pnml(result.net, "manifest: " + manifest_text);
    } else {
      json subsets = json::array();
      for (const auto& sub : result.subsets) {
        json edges = json::array();
        for (const auto& [_, e] : sub.graph.edges) edges.push_back(to_json(e));
        subsets.push_back({{"activities", sub.activities}, {"edges", edges}});
      }
      json gaps = json::array();
      for (const auto& [a, b] : coverage_gaps(loaded.log, partition)) gaps.push_back({a, b});
      json report = {{"manifest", manifest.to_json()},
                     {"traces", loaded.log.traces().size()},
                     {"events", loaded.log.event_count()},
                     {"alphabet", loaded.log.alphabet()},
                     {"subsets", subsets},
                     {"coverage_gaps", gaps},
                     {"net", to_json(result.net)},
                     {"violations", violations}};
      content = detail::dump(report);
    }
    if (opt.output.empty()) {
      console.out << content;
    } else {
      write_file(formats.size() > 1 ? opt.output + "." + f : opt.output, content);
    }
  }

  if (!violations.empty()) {
    for (const auto& v : violations) console.error("invariant violated: " + v);
    return invariant_violation;
  }
  console.status("discovered " + std::to_string(result.net.transitions.size()) + " transitions, " +
                 std::to_string(result.net.places.size()) + " places, " + std::to_string(result.net.arcs.size()) +
                 " arcs from " + std::to_string(result.subsets.size()) + " subset(s)");
  return ok;
}

// diagnose -------------------------------------------------------------------

struct DiagnoseOptions {
  std::string log_path;
  std::string format;
  std::string default_offset;
  std::string tau = "auto";
  std::size_t top_k = 10;
  std::string output;
};

inline int cmd_diagnose(const DiagnoseOptions& opt, const Console& console) {
  if (opt.top_k < 1) throw UsageError("--top-k must be at least 1");
  std::optional<double> fixed_tau;
  if (opt.tau != "auto") {
    try {
      std::size_t used = 0;
      fixed_tau = std::stod(opt.tau, &used);
      if (used != opt.tau.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--tau must be a real number or 'auto'");
    }
  }

  auto loaded = detail::load_log(opt.log_path, opt.format, opt.default_offset);
  RunManifest manifest;
  manifest.command = "diagnose";
  manifest.inputs.emplace_back(opt.log_path, loaded.digest);
  manifest.arguments = {opt.log_path, "--tau", opt.tau, "--top-k", std::to_string(opt.top_k)};
  if (!opt.format.empty()) manifest.arguments.insert(manifest.arguments.end(), {"--format", opt.format});
  if (!opt.default_offset.empty()) {
    manifest.arguments.insert(manifest.arguments.end(), {"--default-offset", opt.default_offset});
  }
  manifest.parameters = {{"tau", opt.tau}, {"top_k", opt.top_k}};

  json report = {{"manifest", manifest.to_json()}};
  double tau = 0.0;
  if (fixed_tau) {
    tau = *fixed_tau;
  } else {
    auto cal = calibrate_loop_threshold(loaded.log);
    tau = cal.tau;
    report["calibration"] = {{"tau", cal.tau},
                             {"baseline_traces", cal.baseline_traces},
                             {"baseline_max_signal", cal.baseline_max_signal},
                             {"margin", kLoopCalibrationMargin}};
  }
  report["tau"] = tau;

  json loops = json::array();
  std::size_t flagged = 0;
  for (const auto& r : detect_loops(loaded.log, tau)) {
    loops.push_back(to_json(r));
    if (r.flagged) ++flagged;
  }
  json delays = json::array();
  for (const auto& r : detect_delays(loaded.log, opt.top_k)) delays.push_back(to_json(r));
  report["loops"] = loops;
  report["delays"] = delays;

  const auto content = detail::dump(report);
  if (opt.output.empty()) {
    console.out << content;
  } else {
    write_file(opt.output, content);
  }
  console.status(std::to_string(flagged) + " loop activit" + (flagged == 1 ? "y" : "ies") + " flagged at tau " +
                 exact(tau));
  return ok;
}

// simulate -------------------------------------------------------------------

struct SimulateOptions {
  std::size_t activities = 10;
  std::size_t arcs = 30;
  std::size_t traces = 100;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t loop_activities = 0;
  double loop_probability = 0.3;
  std::string log_out;
  std::string model_out;
};

inline int cmd_simulate(const SimulateOptions& opt, const Console& console) {
  if (opt.log_out.empty()) throw UsageError("--log-out is required");
  if (!(opt.noise >= 0.0 && opt.noise <= 1.0)) throw UsageError("--noise must lie in [0, 1]");
  if (opt.traces < 1) throw UsageError("--traces must be positive");

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.arguments = {"--activities", std::to_string(opt.activities), "--arcs",  std::to_string(opt.arcs),
                        "--traces",     std::to_string(opt.traces),     "--noise", exact(opt.noise),
                        "--seed",       std::to_string(opt.seed),       "--loop-activities",
                        std::to_string(opt.loop_activities),            "--loop-probability",
                        exact(opt.loop_probability)};
  manifest.parameters = {{"activities", opt.activities},
                         {"arcs", opt.arcs},
                         {"traces", opt.traces},
                         {"noise", opt.noise},
                         {"seed", opt.seed},
                         {"loop_activities", opt.loop_activities},
                         {"loop_probability", opt.loop_probability}};

  GroundTruthModel model;
  try {
    model = generate_model(opt.activities, opt.arcs, opt.seed);
    add_loops(model, opt.loop_activities, opt.loop_probability, opt.seed);
  } catch (const SimulationError& e) {
    throw UsageError(e.what());
  }
  auto sim = generate_log(model, SimulationConfig{opt.traces, opt.noise, opt.seed});
  write_file(opt.log_out, to_csv_string(sim.log));
  if (!opt.model_out.empty()) {
    json doc = to_json(model);
    doc["manifest"] = manifest.to_json();
    doc["aborted_traces"] = sim.aborted_traces;
    write_file(opt.model_out, detail::dump(doc));
  }
  console.status("simulated " + std::to_string(sim.log.traces().size()) + " traces (" +
                 std::to_string(sim.log.event_count()) + " events) on a " + std::to_string(model.net.arcs.size()) +
                 "-arc model");
  return ok;
}

// bench ----------------------------------------------------------------------

struct BenchCliOptions {
  std::size_t activities = 500;
  std::size_t arcs = 2000;
  std::size_t traces = 1000;
  double noise = 0.1;
  double theta = kDefaultTheta;
  std::size_t max_subset_size = kDefaultMaxSubsetSize;
  std::uint64_t seed = 0;
  std::string output;
  bool parallel = false;
};

inline int cmd_bench(const BenchCliOptions& opt, const Console& console) {
  if (!(opt.theta > 0.0)) throw UsageError("--theta must be positive");
  if (!(opt.noise >= 0.0 && opt.noise <= 1.0)) throw UsageError("--noise must lie in [0, 1]");
  if (opt.max_subset_size < 2) throw UsageError("--max-subset-size must be at least 2");

  RunManifest manifest;
  manifest.command = "bench";
  manifest.arguments = {"--activities", std::to_string(opt.activities),     "--arcs",  std::to_string(opt.arcs),
                        "--traces",     std::to_string(opt.traces),         "--noise", exact(opt.noise),
                        "--theta",      exact(opt.theta),                   "--max-subset-size",
                        std::to_string(opt.max_subset_size),                "--seed",  std::to_string(opt.seed)};
  if (opt.parallel) manifest.arguments.push_back("--parallel");
  manifest.parameters = {{"activities", opt.activities}, {"arcs", opt.arcs},   {"traces", opt.traces},
                         {"noise", opt.noise},           {"theta", opt.theta}, {"max_subset_size", opt.max_subset_size},
                         {"seed", opt.seed},             {"parallel", opt.parallel}};

  BenchOptions options;
  options.noise_rate = opt.noise;
  options.discovery.theta = opt.theta;
  options.discovery.max_subset_size = opt.max_subset_size;
  options.discovery.parallel = opt.parallel;
  BenchResult result;
  try {
    result = bench(opt.activities, opt.arcs, opt.traces, opt.seed, options);
  } catch (const SimulationError& e) {
    throw UsageError(e.what());
  }

  json report = {{"manifest", manifest.to_json()},
                 {"report", to_json(result.report)},
                 {"ape", result.report.ape},
                 {"runtime_ms", result.report.runtime_ms},
                 {"events", result.events},
                 {"model_arcs", result.model_arcs},
                 {"aborted_traces", result.aborted_traces}};
  const auto content = detail::dump(report);
  if (opt.output.empty()) {
    console.out << content;
  } else {
    write_file(opt.output, content);
  }
  console.status("ape " + exact(result.report.ape) + "% over " + std::to_string(result.report.gt_edges) +
                 " edges, discovery " + std::to_string(result.report.runtime_ms) + " ms CPU");
  return ok;
}

// entry point ----------------------------------------------------------------

int run(const std::vector<std::string>& args, const Console& console);

namespace detail {

inline int rerun(const std::string& report_path, const std::vector<std::string>& extra, const Console& console) {
  json doc;
  try {
    doc = json::parse(read_file(report_path));
  } catch (const json::parse_error& e) {
    throw InputError("'" + report_path + "' is not valid JSON: " + e.what());
  }
  const json* manifest = doc.contains("manifest") ? &doc.at("manifest") : &doc;
  if (!manifest->contains("command") || !manifest->contains("arguments")) {
    throw InputError("'" + report_path + "' holds no run manifest");
  }
  for (const auto& input : manifest->value("inputs", json::array())) {
    const auto path = input.at("path").get<std::string>();
    if (sha256_hex(read_file(path)) != input.at("sha256").get<std::string>()) {
      throw InputError("input '" + path + "' changed since the recorded run");
    }
  }
  std::vector<std::string> args{manifest->at("command").get<std::string>()};
  for (const auto& a : manifest->at("arguments")) args.push_back(a.get<std::string>());
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args, console);
}

}  // namespace detail

/// Runs one command line (without the program name) and returns its exit code.
inline int run(const std::vector<std::string>& args, const Console& console) {
  CLI::App app{"Workflow-net discovery, loop and delay diagnostics, and log simulation", "wnmine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  DiscoverOptions discover_opt;
  auto* discover = app.add_subcommand("discover", "Discover a workflow net from an event log");
  discover->add_option("log", discover_opt.log_path, "Event log (CSV or XES)")->required();
  discover->add_option("--format", discover_opt.format, "Input format; inferred from the extension when omitted")
      ->check(CLI::IsMember({"csv", "xes"}));
  discover->add_option("--default-offset", discover_opt.default_offset, "UTC offset for timestamps without one");
  discover->add_option("--theta", discover_opt.theta, "Minimum interest factor kept by pruning")
      ->capture_default_str();
  discover->add_option("--partition", discover_opt.partition, "'auto' or a JSON file of activity subsets")
      ->capture_default_str();
  discover->add_option("--max-subset-size", discover_opt.max_subset_size, "Window size of the automatic partition")
      ->capture_default_str();
  discover->add_option("--min-confidence", discover_opt.min_confidence, "Secondary directly-follows confidence filter")
      ->capture_default_str();
  discover->add_option("--out", discover_opt.out_formats, "Output format(s): dot, json, pnml")->delimiter(',');
  discover->add_option("--output", discover_opt.output, "Output path (a prefix when several formats are requested)");
  discover->add_flag("--parallel", discover_opt.parallel, "Discover subnets concurrently");

  DiagnoseOptions diagnose_opt;
  auto* diagnose = app.add_subcommand("diagnose", "Report rework loops and waiting-time bottlenecks");
  diagnose->add_option("log", diagnose_opt.log_path, "Event log (CSV or XES)")->required();
  diagnose->add_option("--format", diagnose_opt.format, "Input format")->check(CLI::IsMember({"csv", "xes"}));
  diagnose->add_option("--default-offset", diagnose_opt.default_offset, "UTC offset for timestamps without one");
  diagnose->add_option("--tau", diagnose_opt.tau, "Loop threshold or 'auto'")->capture_default_str();
  diagnose->add_option("--top-k", diagnose_opt.top_k, "Number of delay edges to report")->capture_default_str();
  diagnose->add_option("--output", diagnose_opt.output, "Output path (stdout when omitted)");

  SimulateOptions simulate_opt;
  auto* simulate = app.add_subcommand("simulate", "Generate a ground-truth model and a simulated log");
  simulate->add_option("--activities", simulate_opt.activities)->required();
  simulate->add_option("--arcs", simulate_opt.arcs)->required();
  simulate->add_option("--traces", simulate_opt.traces)->required();
  simulate->add_option("--noise", simulate_opt.noise)->capture_default_str();
  simulate->add_option("--seed", simulate_opt.seed)->capture_default_str();
  simulate->add_option("--loop-activities", simulate_opt.loop_activities)->capture_default_str();
  simulate->add_option("--loop-probability", simulate_opt.loop_probability)->capture_default_str();
  simulate->add_option("--log-out", simulate_opt.log_out, "CSV log path")->required();
  simulate->add_option("--model-out", simulate_opt.model_out, "Model JSON path");

  BenchCliOptions bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "Simulate, discover and score against the ground truth");
  bench_cmd->add_option("--activities", bench_opt.activities)->capture_default_str();
  bench_cmd->add_option("--arcs", bench_opt.arcs)->capture_default_str();
  bench_cmd->add_option("--traces", bench_opt.traces)->capture_default_str();
  bench_cmd->add_option("--noise", bench_opt.noise)->capture_default_str();
  bench_cmd->add_option("--theta", bench_opt.theta)->capture_default_str();
  bench_cmd->add_option("--max-subset-size", bench_opt.max_subset_size)->capture_default_str();
  bench_cmd->add_option("--seed", bench_opt.seed)->capture_default_str();
  bench_cmd->add_option("--output", bench_opt.output, "Output path (stdout when omitted)");
  bench_cmd->add_flag("--parallel", bench_opt.parallel);

  std::string rerun_path;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from the manifest embedded in its JSON output");
  rerun->add_option("report", rerun_path, "JSON report or model file")->required();
  rerun->allow_extras();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    console.out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    console.out << kToolVersion << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    console.error(e.what());
    return usage_error;
  }

  try {
    if (*discover) return cmd_discover(discover_opt, console);
    if (*diagnose) return cmd_diagnose(diagnose_opt, console);
    if (*simulate) return cmd_simulate(simulate_opt, console);
    if (*bench_cmd) return cmd_bench(bench_opt, console);
    if (*rerun) return detail::rerun(rerun_path, rerun->remaining(), console);
  } catch (const UsageError& e) {
    console.error(e.what());
    return usage_error;
  } catch (const PartitionError& e) {
    console.error(e.what());
    return usage_error;
  } catch (const LogError& e) {
    console.error(e.what());
    return input_error;
  } catch (const InputError& e) {
    console.error(e.what());
    return input_error;
  } catch (const SimulationError& e) {
    console.error(e.what());
    return input_error;
  } catch (const json::exception& e) {
    console.error(e.what());
    return input_error;
  }
  return usage_error;
}

/// Colors are used only on a terminal and never when NO_COLOR is set.
inline bool use_color(bool is_terminal) {
  const char* no_color = std::getenv("NO_COLOR");
  return is_terminal && (no_color == nullptr || no_color[0] == '\0');
}

}  // namespace wnmine::cli
