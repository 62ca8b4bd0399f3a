#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scatsize/estimator.hpp"

namespace scatsize {

/// One (w, v) pair for a ladder/estimate run.
struct DirectionPair {
  RealDirection w = e1();
  RealDirection v = e2();
};

struct SweepSpec {
  Vec3 axis1{1, 0, 0};
  Vec3 axis2{0, 1, 0};
  int count = 8;
};

struct BGridSpec {
  double min = 6.0;
  double max = 36.0;
  int count = 12;
  bool log_spacing = false;

  std::vector<double> build() const;
};

enum class ScattererKind { SphereObstacle, AnalyticPotentialKind, VoxelFile };

/// Parsed run configuration.  The file format is JSON; see docs/config.md.
struct RunConfig {
  double k = 1.0;
  RealDirection alpha = e1();

  ScattererKind kind = ScattererKind::AnalyticPotentialKind;
  SphereObstacle sphere;                 // SphereObstacle
  AnalyticPotential analytic;            // AnalyticPotentialKind
  std::string grid_path;                 // VoxelFile
  AmplitudeRoute route = AmplitudeRoute::Born;

  std::vector<DirectionPair> directions;
  std::optional<SweepSpec> sweep;
  BGridSpec b_grid;
  LsOptions solver;
  std::string prefix = "run";

  /// Builds the estimator-facing model (loads the voxel grid if needed).
  ScattererModel model() const;
  bool has_analytic_truth() const { return kind != ScattererKind::VoxelFile; }
  ShapeSpec truth_shape() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Exit codes shared by the command layer: 0 success, 1 selftest failure,
/// 2 config error, 3 solver/numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSelfTest = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct CommandOptions {
  std::string out_dir = ".";
  int threads = 1;
  bool verbose = false;
};

int cmd_ladder(const RunConfig& config, const CommandOptions& opt, std::ostream& err);
int cmd_estimate(const RunConfig& config, const CommandOptions& opt, std::ostream& err);
int cmd_oracle(const RunConfig& config, const CommandOptions& opt, std::ostream& err);
int cmd_sweep(const RunConfig& config, const CommandOptions& opt, std::ostream& err);

}  // namespace scatsize
