#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rdf/cli/config.hpp"
#include "rdf/cli/render.hpp"
#include "rdf/net/mlp.hpp"

namespace rdf::cli {

/// gen-dataset: <out>/dataset.rdf1 and <out>/manifest.json.
void cmd_gen_dataset(const RunConfig& config, std::ostream& log);
/// train: <out>/model.mlp1, <out>/metrics.csv and <out>/manifest.json.
void cmd_train(const RunConfig& config, std::ostream& log);
/// eval: <out>/eval.csv.
void cmd_eval(const RunConfig& config, std::ostream& log);
/// plan: <out>/scenarios.json, results.csv, summary.json and timing.csv.
void cmd_plan(const RunConfig& config, std::ostream& log);
/// render: SVG at <out> (a file path).
void cmd_render(const RunConfig& config, std::ostream& log);

/// Scene layers from a render section.
SceneRender build_scene(const RunConfig& config);

/// FNV-1a hash of a file's bytes.
std::uint64_t file_hash(const std::filesystem::path& path);

/// Loads a model directory written by train after checking its manifest
/// against the robot spec (ConfigError on mismatch).
net::MlpModel load_model_dir(const std::filesystem::path& dir, const arm::RobotSpec& spec);

/// Full command line: parses flags, runs the subcommand, maps errors to exit
/// codes (0 ok, 1 config error, 2 runtime failure).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rdf::cli
