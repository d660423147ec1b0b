#pragma once

// Configuration-driven pipelines behind the command line tool.
//
// A run evaluates every check of its mode, records value, tolerance and
// verdict for each, and stops at the first hard failure (remaining checks
// are listed as skipped). Reports contain no timings or other
// run-to-run varying data.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinflat/hyperbolic.hpp"
#include "spinflat/integrate.hpp"
#include "spinflat/mesh.hpp"
#include "spinflat/tolerances.hpp"

namespace spinflat {

enum class Mode { GenFlat, GenFlatPsi, GenH3, Analyze, Converge };

std::optional<Mode> parse_mode(const std::string& name);
std::string mode_name(Mode m);

struct OutputConfig {
  std::filesystem::path dir = ".";
  std::string prefix = "mesh";
  std::vector<std::string> formats = {"csv", "json", "obj"};
};

struct RunConfig {
  Mode mode = Mode::GenFlat;
  Mode pipeline = Mode::GenFlat;  // what `converge` refines
  GridDomain domain;
  std::map<std::string, std::string> data;  // expression sources by name
  std::array<double, 8> g0{1, 0, 0, 0, 0, 0, 0, 0};
  MinkVec F0;
  std::array<double, 8> B0{1, 0, 0, 0, 0, 0, 1, 0};  // row-major re/im pairs
  std::string base = "origin";                        // origin | corner
  std::optional<BaseNode> base_node;                  // explicit [j, k]
  Quadrature quadrature = Quadrature::Cubic;
  Tolerances tol;
  // Closed form to compare with: x0..x3 (real expressions) or, for H^3, the
  // Hermitian entries a, b, d.
  std::map<std::string, std::string> reference;
  bool align = true;
  std::optional<std::filesystem::path> analyze_mesh;  // CSV input for analyze
  std::map<std::string, std::string> analyze_surface; // x0..x3 for analyze
  std::map<std::string, double> expect;               // analyze: K, K_N, integral_K, ...
  bool expect_flat = false;
  std::size_t levels = 3;
  bool dump_nodes = false;
  OutputConfig output;
  nlohmann::ordered_json echo;
};

// Throws ConfigError (also for unparsable expressions and invalid grids).
RunConfig parse_config(const nlohmann::json& doc, Mode mode);
RunConfig load_config(const std::filesystem::path& path, Mode mode);

struct RunResult {
  int status = 0;  // 0 pass, 1 check failure
  std::string first_failure;
  nlohmann::ordered_json report;
  std::optional<SurfaceMesh> mesh;
  std::optional<H3Mesh> h3;
};

// Runs the configured mode; files are not written.
RunResult run(const RunConfig& config);

// Writes mesh files and report.json into config.output.dir. Throws IOError.
void write_outputs(const RunConfig& config, const RunResult& result);

}  // namespace spinflat
