// Discovers a net from a handful of campaign-setup cases and prints it as DOT,
// followed by the loop and delay diagnostics.

#include <iostream>

#include "wnmine/wnmine.hpp"

using namespace wnmine;

namespace {

const char* kLog =
    "case_id,activity,start,end\n"
    "io-1001,receive_insertion_order,2024-03-01T09:00:00+01:00,2024-03-01T09:20:00+01:00\n"
    "io-1001,ad_tag_setup,2024-03-01T10:00:00+01:00,2024-03-01T11:00:00+01:00\n"
    "io-1001,creative_delivery,2024-03-01T11:30:00+01:00,2024-03-01T12:00:00+01:00\n"
    "io-1001,campaign_launch,2024-03-01T14:00:00+01:00,2024-03-01T14:10:00+01:00\n"
    "io-1002,receive_insertion_order,2024-03-02T09:00:00+01:00,2024-03-02T09:15:00+01:00\n"
    "io-1002,ad_tag_setup,2024-03-02T09:30:00+01:00,2024-03-02T10:40:00+01:00\n"
    "io-1002,creative_delivery,2024-03-02T11:00:00+01:00,2024-03-02T11:20:00+01:00\n"
    "io-1002,ad_tag_setup,2024-03-02T13:00:00+01:00,2024-03-02T13:50:00+01:00\n"
    "io-1002,creative_delivery,2024-03-02T14:00:00+01:00,2024-03-02T14:30:00+01:00\n"
    "io-1002,campaign_launch,2024-03-02T16:00:00+01:00,2024-03-02T16:05:00+01:00\n"
    "io-1003,receive_insertion_order,2024-03-03T09:00:00+01:00,2024-03-03T09:25:00+01:00\n"
    "io-1003,creative_delivery,2024-03-03T09:30:00+01:00,2024-03-03T10:00:00+01:00\n"
    "io-1003,ad_tag_setup,2024-03-03T10:10:00+01:00,2024-03-03T11:15:00+01:00\n"
    "io-1003,campaign_launch,2024-03-03T12:00:00+01:00,2024-03-03T12:10:00+01:00\n";

}  // namespace

int main() {
  const EventLog log = parse_csv_string(kLog);

  DiscoveryConfig config;
  config.theta = 0.01;
  const WorkflowNet net = discover(log, config);
  std::cout << to_dot(net);

  const double tau = calibrate_loop_threshold(log).tau;
  std::cout << "\n// loops (tau " << tau << ")\n";
  for (const auto& r : detect_loops(log, tau)) {
    std::cout << "//   " << r.activity << " score=" << r.score << " repeats=" << r.oracle_repeats
              << (r.flagged ? " FLAGGED" : "") << '\n';
  }
  std::cout << "// longest waits\n";
  for (const auto& d : detect_delays(log, 3)) {
    std::cout << "//   " << d.from << " -> " << d.to << " mean " << d.mean_wait / 60.0 << " min\n";
  }
  return 0;
}
