#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "wnmine/cli.hpp"

namespace {

using namespace wnmine;
using wnmine::testing::fixture;
namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  cli::Console console{out, err, false};
  int code = cli::run(args, console);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("wnmine_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, cli::usage_error);
  EXPECT_EQ(run({"frobnicate"}).code, cli::usage_error);
  EXPECT_EQ(run({"discover", fixture("sequence.csv"), "--theta", "0"}).code, cli::usage_error);
  EXPECT_EQ(run({"discover", fixture("sequence.csv"), "--out", "svg"}).code, cli::usage_error);
  EXPECT_EQ(run({"diagnose", fixture("rework.csv"), "--tau", "high"}).code, cli::usage_error);
  EXPECT_EQ(run({"simulate", "--activities", "2", "--arcs", "4", "--traces", "3", "--log-out", path("x.csv")}).code,
            cli::usage_error);
}

TEST_F(CliTest, InputErrors) {
  auto missing = run({"discover", path("nope.csv")});
  EXPECT_EQ(missing.code, cli::input_error);
  EXPECT_NE(missing.err.find("cannot read"), std::string::npos);
  auto bad = run({"discover", fixture("bad_order.csv")});
  EXPECT_EQ(bad.code, cli::input_error);
  EXPECT_NE(bad.err.find("row 2"), std::string::npos) << bad.err;
}

TEST_F(CliTest, DiscoverSequenceDot) {
  auto r = run({"discover", fixture("sequence.csv"), "--theta", "1e-300", "--out", "dot"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count(r.out, "shape=box"), 3u);
  EXPECT_EQ(count(r.out, "shape=circle"), 4u);
  EXPECT_EQ(count(r.out, " -> "), 6u);
  EXPECT_EQ(r.out.rfind("// manifest: ", 0), 0u);
  EXPECT_EQ(run({"discover", fixture("sequence.csv"), "--theta", "1e-300", "--out", "dot"}).out, r.out);
}

TEST_F(CliTest, DiscoverJsonReport) {
  auto r = run({"discover", fixture("ten_cases.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["traces"], 10);
  EXPECT_EQ(j["events"], 100);
  EXPECT_TRUE(j["violations"].empty());
  EXPECT_EQ(j["manifest"]["command"], "discover");
  EXPECT_EQ(j["manifest"]["inputs"][0]["sha256"], cli::sha256_hex(cli::read_file(fixture("ten_cases.csv"))));
  auto net = net_from_json(j["net"]);
  EXPECT_EQ(net.labels().size(), 8u);
  EXPECT_TRUE(validate_wfnet(net).empty());
}

TEST_F(CliTest, DiscoverSeveralFormats) {
  auto prefix = path("net");
  auto r = run({"discover", fixture("twin.xes"), "--out", "dot,pnml,json", "--output", prefix});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* ext : {".dot", ".pnml", ".json"}) EXPECT_TRUE(fs::exists(prefix + ext)) << ext;
  auto pnml = cli::read_file(prefix + ".pnml");
  EXPECT_NE(pnml.find("<initialMarking>"), std::string::npos);
  EXPECT_EQ(run({"discover", fixture("twin.xes"), "--out", "dot,json"}).code, cli::usage_error);
}

TEST_F(CliTest, PartitionMustCoverAlphabet) {
  auto r = run({"discover", fixture("sequence.csv"), "--partition", fixture("partition_missing.json")});
  EXPECT_EQ(r.code, cli::usage_error);
  EXPECT_NE(r.err.find("'z'"), std::string::npos) << r.err;
  EXPECT_EQ(run({"discover", fixture("sequence.csv"), "--partition", fixture("partition_overlap.json")}).code, 0);
}

TEST_F(CliTest, DiagnoseFixtures) {
  auto rework = run({"diagnose", fixture("rework.csv")});
  ASSERT_EQ(rework.code, 0) << rework.err;
  auto j = json::parse(rework.out);
  std::set<std::string> flagged;
  for (const auto& l : j["loops"])
    if (l["flagged"].get<bool>()) flagged.insert(l["activity"].get<std::string>());
  EXPECT_EQ(flagged, (std::set<std::string>{"a", "b"}));

  auto delay = json::parse(run({"diagnose", fixture("delay.csv"), "--top-k", "1"}).out);
  ASSERT_EQ(delay["delays"].size(), 1u);
  EXPECT_EQ(delay["delays"][0]["edge"], json::array({"x", "y"}));
  EXPECT_DOUBLE_EQ(delay["delays"][0]["mean_wait"].get<double>(), 1800.0);

  auto loop_free = json::parse(run({"diagnose", fixture("loop_free.csv")}).out);
  for (const auto& l : loop_free["loops"]) EXPECT_FALSE(l["flagged"].get<bool>());
}

TEST_F(CliTest, SimulateIsDeterministic) {
  for (const char* tag : {"a", "b"}) {
    auto r = run({"simulate", "--activities", "12", "--arcs", "30", "--traces", "50", "--noise", "0.1", "--seed",
                  "4", "--loop-activities", "2", "--log-out", path(std::string(tag) + ".csv"), "--model-out",
                  path(std::string(tag) + ".json")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(cli::read_file(path("a.csv")), cli::read_file(path("b.csv")));
  EXPECT_EQ(cli::read_file(path("a.json")), cli::read_file(path("b.json")));
  auto model = model_from_json(json::parse(cli::read_file(path("a.json"))));
  EXPECT_EQ(model.net.arcs.size(), 30u);
  EXPECT_EQ(model.loop_activities.size(), 2u);
}

TEST_F(CliTest, RerunReproducesOutput) {
  auto first = path("first.json");
  ASSERT_EQ(run({"discover", fixture("ten_cases.csv"), "--theta", "0.2", "--output", first}).code, 0);
  auto second = path("second.json");
  auto r = run({"rerun", first, "--output", second});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli::read_file(first), cli::read_file(second));

  auto tampered = path("tampered.json");
  auto doc = json::parse(cli::read_file(first));
  auto copy = path("copy.csv");
  fs::copy_file(fixture("ten_cases.csv"), copy);
  doc["manifest"]["inputs"][0]["path"] = copy;
  cli::write_file(copy, "case_id,activity,start,end\n");
  cli::write_file(tampered, doc.dump());
  auto bad = run({"rerun", tampered});
  EXPECT_EQ(bad.code, cli::input_error);
  EXPECT_NE(bad.err.find("changed"), std::string::npos) << bad.err;
}

TEST(CliColor, HonorsNoColor) {
  ::setenv("NO_COLOR", "1", 1);
  EXPECT_FALSE(cli::use_color(true));
  ::unsetenv("NO_COLOR");
  EXPECT_TRUE(cli::use_color(true));
  EXPECT_FALSE(cli::use_color(false));
}

}  // namespace
