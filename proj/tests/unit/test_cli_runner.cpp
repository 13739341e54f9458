#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "doctest.h"
#include "dfindex/cli_runner.hpp"
#include "support.hpp"

using namespace dfindex;
using testing_support::throws_kind;
namespace fs = std::filesystem;

namespace {

// runs the front end with stdout captured
int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "dfindex");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream buf;
  auto* old = std::cout.rdbuf(buf.rdbuf());
  int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  if (out) *out = buf.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("dfindex_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config_text("# comment\ndomain = worm\nbeta=3.2\neta=0.5, 0.9\nmesh=800\nseed=7\n");
  CHECK(c.domain == "worm");
  CHECK(c.domain_params.at("beta") == 3.2);
  CHECK(c.eta == std::vector<double>{0.5, 0.9});
  CHECK(c.mesh == 800);
  CHECK(c.seed == 7);
  CHECK(throws_kind([] { parse_config_text("colour=blue\n"); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { parse_config_text("mesh\n"); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { parse_config_text("mesh=abc\n"); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { parse_config_text("mesh=4\n"); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { parse_config_text("beta=1.5x\n"); }, ErrorKind::ConfigInvalid));

  RunConfig v;
  v.command = "certify";
  CHECK_NOTHROW(v.validate());
  v.eta = {1.2};
  CHECK(throws_kind([&] { v.validate(); }, ErrorKind::ConfigInvalid));
  v.eta = {};
  v.slack = -1.0;
  CHECK(throws_kind([&] { v.validate(); }, ErrorKind::ConfigInvalid));
  v.slack.reset();
  v.command = "launch";
  CHECK(throws_kind([&] { v.validate(); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { load_config_file("/nonexistent/cfg.txt"); }, ErrorKind::ConfigInvalid));
}

TEST_CASE("canonical form ignores the output path") {
  RunConfig a, b;
  a.command = b.command = "scan";
  a.out = "/tmp/x";
  b.out = "/tmp/y";
  CHECK(a.canonical() == b.canonical());
  b.seed = 2;
  CHECK(a.canonical() != b.canonical());
}

TEST_CASE("blob hash matches git") {
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");

  fs::path d = scratch_dir("hash");
  fs::create_directories(d);
  fs::path cfg = d / "run.cfg";
  std::ofstream(cfg, std::ios::binary) << "domain=ball\neta=0.99\nmesh=600\n";
  std::string cmd = "git hash-object " + cfg.string();
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[128] = {0};
  REQUIRE(fgets(buf, sizeof buf, p) != nullptr);
  pclose(p);
  std::string git = std::string(buf).substr(0, 40);
  CHECK(git_blob_sha1(slurp(cfg)) == git);

  std::string out;
  CHECK(cli({"scan", "--config", cfg.string(), "--out", (d / "o").string()}, &out) == 0);
  auto j = nlohmann::json::parse(slurp(d / "o" / "scan.json"));
  CHECK(j["config_hash"] == git);
  CHECK(j["config_hash_source"] == "file");
  CHECK(j["seed"] == 1);
  fs::remove_all(d);
}

TEST_CASE("JSON dump is canonical") {
  nlohmann::json j;
  j["b"] = 1.5;
  j["a"] = {{"z", -0.0}, {"y", std::nan("")}};
  j["c"] = nlohmann::json::array({1, 2});
  std::string s = dump_json(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"y\"") < s.find("\"z\""));
  CHECK(s.find("1.5000000000e+00") != std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(s.find("-0.0") == std::string::npos);
  CHECK(s.back() == '\n');
}

TEST_CASE("reports are byte-identical across reruns") {
  fs::path d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  std::vector<std::string> args = {"certify", "--domain", "ball", "--eta", "0.99", "--mesh", "800", "--seed", "3"};
  auto a1 = args, a2 = args;
  a1.insert(a1.end(), {"--out", d1.string()});
  a2.insert(a2.end(), {"--out", d2.string()});
  std::string o1, o2;
  CHECK(cli(a1, &o1) == 0);
  CHECK(cli(a2, &o2) == 0);
  CHECK(o1 == o2);
  CHECK(slurp(d1 / "certify.json") == slurp(d2 / "certify.json"));
  CHECK(slurp(d1 / "certify_lhs.csv") == slurp(d2 / "certify_lhs.csv"));
  auto j = nlohmann::json::parse(o1);
  CHECK(j["certificate"]["bound"].get<double>() >= 0.99);
  CHECK(j["seed"] == 3);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("exit-code contract") {
  std::string out;
  CHECK(cli({"certify", "--domain", "worm", "--eta", "0.99", "--mesh", "1500"}, &out) == 2);
  CHECK(out.find("Obstructed") != std::string::npos);
  CHECK(cli({"period", "--domain", "worm", "--beta", "3.1416", "--loop", "core", "--mesh", "800"}, &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["verdict"]["classification"] == "Obstructed");
  CHECK(cli({"curve", "--domain", "quartic", "--mesh", "800"}, &out) == 0);
  CHECK(cli({"curve", "--domain", "ball", "--mesh", "800"}, &out) == 1);
  CHECK(nlohmann::json::parse(out)["error"]["kind"] == "NotACurve");
  CHECK(cli({"caccioppoli", "--n", "4", "--function", "pos_square"}, &out) == 1);
  CHECK(cli({"scan", "--domain", "nowhere"}, &out) == 1);
  CHECK(nlohmann::json::parse(out)["error"]["kind"] == "ConfigInvalid");
  CHECK(cli({"scan", "--mesh", "600", "--set", "resolution=1"}, &out) == 1);
  CHECK(cli({"zoo", "list"}, &out) == 0);
  CHECK(out.find("fattened_ball3") != std::string::npos);
}

TEST_CASE("unusable output path is an IoFailure") {
  fs::path d = scratch_dir("io");
  fs::create_directories(d);
  fs::path blocker = d / "file";
  std::ofstream(blocker) << "x";
  std::string out;
  CHECK(cli({"scan", "--mesh", "600", "--out", (blocker / "sub").string()}, &out) == 1);
  CHECK(nlohmann::json::parse(out)["error"]["kind"] == "IoFailure");

  RunConfig c;
  c.command = "scan";
  c.out = (blocker / "x").string();
  CHECK(throws_kind([&] { emit_report(c, RunResult{}); }, ErrorKind::IoFailure));
  fs::remove_all(d);
}
