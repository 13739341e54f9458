#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dfindex {

struct RunConfig {
  std::string command;
  std::string domain = "ball";
  std::map<std::string, double> domain_params;  // beta, r, radius, power, amplitude
  size_t mesh = 4000;
  std::vector<double> eta;  // empty: default grid
  std::optional<double> threshold;
  std::optional<double> slack;
  std::string loop;
  std::string chart;
  std::string out;  // output directory; empty writes nothing
  std::uint64_t seed = 1;
  int resolution = 16;
  int leaves = 8;
  int n = 4;                            // caccioppoli scale
  std::string function = "neg_square";  // caccioppoli f: neg_square, pos_square, const
  std::string zoo_id;                   // zoo describe target

  std::string config_text;  // raw bytes of --config, if given
  std::string config_path;

  void set(const std::string& key, const std::string& value);  // ConfigInvalid on bad keys/values
  void validate() const;
  std::string canonical() const;  // sorted key=value lines
  nlohmann::json to_json() const;
};

const std::vector<std::string>& pipeline_commands();

RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// SHA-1 of "blob <size>\0" + bytes, hex
std::string git_blob_sha1(const std::string& bytes);

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
  std::vector<std::pair<std::string, std::function<void(const std::string&)>>> grids;  // file name, writer
};

RunResult run_pipeline(const RunConfig& config);

// sorted keys, fixed float formatting, non-finite numbers as null
std::string dump_json(const nlohmann::json& j);

// writes <out>/<command>.json and the CSV grids; IoFailure on unusable paths
void emit_report(const RunConfig& config, const RunResult& result);

// whole front end: parse, run, emit, print the report; returns the exit code
int run_cli(int argc, const char* const* argv);

}  // namespace dfindex
