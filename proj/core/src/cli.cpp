#include "scatsize/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "scatsize/errors.hpp"
#include "scatsize/grid_io.hpp"

namespace scatsize {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(std::string(what) + " must be an array of 3 numbers");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

RealDirection parse_direction(const json& j, const char* what) {
  Vec3 v = parse_vec3(j, what);
  try {
    return RealDirection::normalized(v);
  } catch (const Error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

ShapeSpec parse_shape(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("shape needs a type field");
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball") {
    return Ball{parse_vec3(j.at("center"), "ball center"), j.at("radius").get<double>()};
  }
  if (type == "box") {
    return AxisBox{parse_vec3(j.at("lower"), "box lower"),
                   parse_vec3(j.at("sides"), "box sides")};
  }
  if (type == "union_of_balls") {
    UnionOfBalls u;
    for (const auto& bj : j.at("balls"))
      u.balls.push_back(
          Ball{parse_vec3(bj.at("center"), "ball center"), bj.at("radius").get<double>()});
    return u;
  }
  throw ConfigError("unknown shape type: " + type);
}

json shape_json(const ShapeSpec& shape) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return json{{"type", "ball"}, {"center", vec3_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return json{{"type", "box"}, {"lower", vec3_json(s.lower)}, {"sides", vec3_json(s.sides)}};
        } else {
          json balls = json::array();
          for (const auto& b : s.balls)
            balls.push_back(json{{"center", vec3_json(b.center)}, {"radius", b.radius}});
          return json{{"type", "union_of_balls"}, {"balls", balls}};
        }
      },
      shape);
}

AmplitudeRoute parse_route(const std::string& name) {
  if (name == "mie_series") return AmplitudeRoute::MieSeries;
  if (name == "surface_integral") return AmplitudeRoute::SurfaceIntegral;
  if (name == "born") return AmplitudeRoute::Born;
  if (name == "lippmann_schwinger") return AmplitudeRoute::LippmannSchwinger;
  throw ConfigError("unknown method: " + name);
}

std::string route_name(AmplitudeRoute r) {
  switch (r) {
    case AmplitudeRoute::MieSeries: return "mie_series";
    case AmplitudeRoute::SurfaceIntegral: return "surface_integral";
    case AmplitudeRoute::Born: return "born";
    case AmplitudeRoute::LippmannSchwinger: return "lippmann_schwinger";
  }
  return "born";
}

// Deterministic per-index work with an optional thread fan-out; results land
// in preassigned slots so output order never depends on scheduling.
template <typename Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  const int nw = (int)std::min<size_t>((size_t)threads, n);
  std::vector<std::future<void>> pool;
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
}

int run_guarded(std::ostream& err, const char* what, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << what << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << what << ": io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << what << ": " << e.what() << "\n";
    return kExitSolver;
  }
}

std::ofstream open_out(const CommandOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  fs::path p = fs::path(opt.out_dir) / name;
  std::ofstream f(p);
  if (!f) throw IoError("cannot open output file: " + p.string());
  return f;
}

json estimate_json(const RunConfig& config, const DirectionPair& dir, const WidthEstimate& we) {
  auto fit_json = [](const SizeEstimate& e) {
    return json{{"d_hat", e.d_hat},
                {"slope", e.slope},
                {"log_coeff", e.log_coeff},
                {"intercept", e.intercept},
                {"residual_rms", e.residual_rms},
                {"pairwise_slopes", e.pairwise_slopes},
                {"pairwise_median", e.pairwise_median},
                {"warnings", e.warnings}};
  };
  json out{{"w", vec3_json(dir.w.vec())},
           {"v", vec3_json(dir.v.vec())},
           {"d_hat_plus", we.plus.d_hat},
           {"d_hat_minus", we.minus.d_hat},
           {"width_hat", we.width_hat},
           {"fit_plus", fit_json(we.plus)},
           {"fit_minus", fit_json(we.minus)}};
  if (config.has_analytic_truth()) {
    ShapeSpec shape = config.truth_shape();
    const double tp = support_extent(shape, dir.v);
    const double tm = support_extent(shape, -dir.v);
    const double tw = tp + tm;
    out["truth"] = json{{"extent_plus", tp},
                        {"extent_minus", tm},
                        {"width", tw},
                        {"rel_error_width", std::abs(we.width_hat - tw) / std::abs(tw)}};
  }
  return out;
}

}  // namespace

std::vector<double> BGridSpec::build() const {
  return log_spacing ? log_b_grid(min, max, count) : linear_b_grid(min, max, count);
}

ScattererModel RunConfig::model() const {
  switch (kind) {
    case ScattererKind::SphereObstacle: {
      SphereObstacle s = sphere;
      s.k = k;
      return ScattererModel::obstacle(s, route);
    }
    case ScattererKind::AnalyticPotentialKind: {
      ScattererModel m;
      m.potential = PotentialSpec{analytic};
      m.route = route;
      m.ls = solver;
      return m;
    }
    case ScattererKind::VoxelFile: {
      ScattererModel m;
      m.potential = PotentialSpec{read_voxel_grid(grid_path)};
      m.route = route;
      m.ls = solver;
      return m;
    }
  }
  throw ConfigError("invalid scatterer kind");
}

ShapeSpec RunConfig::truth_shape() const {
  if (kind == ScattererKind::SphereObstacle) return Ball{sphere.center, sphere.radius};
  if (kind == ScattererKind::AnalyticPotentialKind) return analytic.shape;
  throw ConfigError("voxel-file scatterers carry no analytic truth");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    RunConfig c;
    c.k = j.at("k").get<double>();
    if (!(c.k > 0.0)) throw ConfigError("k must be > 0");
    c.alpha = parse_direction(j.at("alpha"), "alpha");

    const json& sc = j.at("scatterer");
    const std::string kind = sc.at("kind").get<std::string>();
    if (kind == "sphere_obstacle") {
      c.kind = ScattererKind::SphereObstacle;
      c.sphere.radius = sc.at("radius").get<double>();
      c.sphere.center = sc.contains("center") ? parse_vec3(sc["center"], "center") : Vec3{};
      c.sphere.k = c.k;
      if (!(c.sphere.radius > 0.0)) throw ConfigError("sphere radius must be > 0");
      c.route = sc.contains("method") ? parse_route(sc["method"].get<std::string>())
                                      : AmplitudeRoute::MieSeries;
      if (c.route != AmplitudeRoute::MieSeries && c.route != AmplitudeRoute::SurfaceIntegral)
        throw ConfigError("sphere obstacles use mie_series or surface_integral");
    } else if (kind == "potential") {
      c.kind = ScattererKind::AnalyticPotentialKind;
      c.analytic.shape = parse_shape(sc.at("shape"));
      c.analytic.q0 = sc.at("q0").get<double>();
      if (sc.contains("profile")) {
        const json& pj = sc["profile"];
        if (pj.at("type").get<std::string>() != "gaussian")
          throw ConfigError("unknown profile type");
        c.analytic.profile = RadialProfile{RadialProfile::Kind::Gaussian,
                                           pj.at("sigma").get<double>()};
      }
      c.route = sc.contains("method") ? parse_route(sc["method"].get<std::string>())
                                      : AmplitudeRoute::Born;
      if (c.route != AmplitudeRoute::Born && c.route != AmplitudeRoute::LippmannSchwinger)
        throw ConfigError("potentials use born or lippmann_schwinger");
      try {
        validate(PotentialSpec{c.analytic});
      } catch (const Error& e) {
        throw ConfigError(std::string("invalid potential: ") + e.what());
      }
    } else if (kind == "voxel_file") {
      c.kind = ScattererKind::VoxelFile;
      c.grid_path = sc.at("path").get<std::string>();
      c.route = sc.contains("method") ? parse_route(sc["method"].get<std::string>())
                                      : AmplitudeRoute::Born;
      if (c.route != AmplitudeRoute::Born && c.route != AmplitudeRoute::LippmannSchwinger)
        throw ConfigError("potentials use born or lippmann_schwinger");
    } else {
      throw ConfigError("unknown scatterer kind: " + kind);
    }

    if (j.contains("directions")) {
      for (const auto& dj : j["directions"]) {
        DirectionPair d{parse_direction(dj.at("w"), "w"), parse_direction(dj.at("v"), "v")};
        if (std::abs(dot(d.w, d.v)) > kOrthoTol)
          throw ConfigError("direction pair is not orthogonal");
        c.directions.push_back(d);
      }
    }
    if (j.contains("sweep")) {
      const json& sj = j["sweep"];
      SweepSpec s;
      s.axis1 = parse_vec3(sj.at("axis1"), "sweep axis1");
      s.axis2 = parse_vec3(sj.at("axis2"), "sweep axis2");
      s.count = sj.at("count").get<int>();
      if (s.count < 1) throw ConfigError("sweep count must be >= 1");
      c.sweep = s;
    }
    if (c.directions.empty() && !c.sweep)
      throw ConfigError("config needs directions or a sweep");

    const json& bg = j.at("b_grid");
    c.b_grid.min = bg.at("min").get<double>();
    c.b_grid.max = bg.at("max").get<double>();
    c.b_grid.count = bg.at("count").get<int>();
    if (bg.contains("spacing")) {
      const std::string sp = bg["spacing"].get<std::string>();
      if (sp != "linear" && sp != "log") throw ConfigError("b_grid spacing: linear or log");
      c.b_grid.log_spacing = sp == "log";
    }
    if (!(c.b_grid.min > 0.0) || !(c.b_grid.max > c.b_grid.min))
      throw ConfigError("b_grid needs b_max > b_min > 0");
    if (c.b_grid.count < 3) throw ConfigError("b_grid count must be >= 3");

    if (j.contains("solver")) {
      const json& so = j["solver"];
      if (so.contains("tol")) c.solver.tol = so["tol"].get<double>();
      if (so.contains("spacing")) c.solver.spacing = so["spacing"].get<double>();
      if (so.contains("max_iterations"))
        c.solver.max_iterations = so["max_iterations"].get<int>();
      if (!(c.solver.tol > 0.0)) throw ConfigError("solver tol must be > 0");
    }
    if (j.contains("output") && j["output"].contains("prefix"))
      c.prefix = j["output"]["prefix"].get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["k"] = c.k;
  j["alpha"] = vec3_json(c.alpha.vec());
  json sc;
  switch (c.kind) {
    case ScattererKind::SphereObstacle:
      sc["kind"] = "sphere_obstacle";
      sc["radius"] = c.sphere.radius;
      sc["center"] = vec3_json(c.sphere.center);
      break;
    case ScattererKind::AnalyticPotentialKind:
      sc["kind"] = "potential";
      sc["shape"] = shape_json(c.analytic.shape);
      sc["q0"] = c.analytic.q0;
      if (c.analytic.profile)
        sc["profile"] = json{{"type", "gaussian"}, {"sigma", c.analytic.profile->sigma}};
      break;
    case ScattererKind::VoxelFile:
      sc["kind"] = "voxel_file";
      sc["path"] = c.grid_path;
      break;
  }
  sc["method"] = route_name(c.route);
  j["scatterer"] = sc;
  if (!c.directions.empty()) {
    json dirs = json::array();
    for (const auto& d : c.directions)
      dirs.push_back(json{{"w", vec3_json(d.w.vec())}, {"v", vec3_json(d.v.vec())}});
    j["directions"] = dirs;
  }
  if (c.sweep)
    j["sweep"] = json{{"axis1", vec3_json(c.sweep->axis1)},
                      {"axis2", vec3_json(c.sweep->axis2)},
                      {"count", c.sweep->count}};
  j["b_grid"] = json{{"min", c.b_grid.min},
                     {"max", c.b_grid.max},
                     {"count", c.b_grid.count},
                     {"spacing", c.b_grid.log_spacing ? "log" : "linear"}};
  j["solver"] = json{{"tol", c.solver.tol},
                     {"spacing", c.solver.spacing},
                     {"max_iterations", c.solver.max_iterations}};
  j["output"] = json{{"prefix", c.prefix}};
  return j.dump(2) + "\n";
}

int cmd_ladder(const RunConfig& config, const CommandOptions& opt, std::ostream& err) {
  return run_guarded(err, "ladder", [&] {
    if (config.directions.empty()) throw ConfigError("ladder needs explicit direction pairs");
    const std::vector<double> grid = config.b_grid.build();
    ScattererModel model = config.model();

    std::vector<AmplitudeLadder> ladders(config.directions.size());
    AmplitudeEvaluator eval(model, config.alpha, config.k);
    parallel_for(config.directions.size(), opt.threads, [&](size_t i) {
      const auto& d = config.directions[i];
      ladders[i] = compute_ladder(eval, config.alpha, d.w, d.v, grid, config.k);
    });

    for (size_t i = 0; i < ladders.size(); ++i) {
      const auto& lad = ladders[i];
      auto f = open_out(opt, config.prefix + "_ladder_pair" + std::to_string(i) + ".csv");
      f << "b,logmag,logmag_over_bk,pairwise_slope\n";
      for (size_t r = 0; r < lad.b_grid.size(); ++r) {
        f << fmt17(lad.b_grid[r]) << "," << fmt17(lad.logmag[r]) << ","
          << fmt17(lad.logmag[r] / (lad.b_grid[r] * lad.k)) << ",";
        if (r > 0) {
          const double slope = (lad.logmag[r] - lad.logmag[r - 1]) /
                               (lad.k * (lad.b_grid[r] - lad.b_grid[r - 1]));
          f << fmt17(slope);
        }
        f << "\n";
      }
      if (opt.verbose) err << "ladder: wrote pair " << i << "\n";
    }
  });
}

int cmd_estimate(const RunConfig& config, const CommandOptions& opt, std::ostream& err) {
  return run_guarded(err, "estimate", [&] {
    if (config.directions.empty()) throw ConfigError("estimate needs explicit direction pairs");
    const std::vector<double> grid = config.b_grid.build();
    ScattererModel model = config.model();

    AmplitudeEvaluator eval(model, config.alpha, config.k);
    std::vector<WidthEstimate> results(config.directions.size());
    parallel_for(config.directions.size(), opt.threads, [&](size_t i) {
      const auto& d = config.directions[i];
      results[i] = estimate_width(eval, config.alpha, d.w, d.v, grid, config.k);
    });

    json out;
    out["k"] = config.k;
    out["alpha"] = vec3_json(config.alpha.vec());
    out["source"] = to_string(config.route);
    json dirs = json::array();
    for (size_t i = 0; i < results.size(); ++i)
      dirs.push_back(estimate_json(config, config.directions[i], results[i]));
    out["directions"] = dirs;

    auto f = open_out(opt, config.prefix + "_estimate.json");
    f << out.dump(2) << "\n";
    if (opt.verbose) err << "estimate: wrote " << results.size() << " directions\n";
  });
}

int cmd_oracle(const RunConfig& config, const CommandOptions& opt, std::ostream& err) {
  return run_guarded(err, "oracle", [&] {
    if (config.directions.empty()) throw ConfigError("oracle needs a direction pair (uses v)");
    if (!config.has_analytic_truth())
      throw ConfigError("oracle needs an analytic shape");
    ShapeSpec shape = config.truth_shape();
    if (!std::holds_alternative<Ball>(shape) && !std::holds_alternative<UnionOfBalls>(shape))
      throw ConfigError("oracle shapes must be balls or unions of balls");

    const RealDirection v = config.directions.front().v;
    const std::vector<double> grid = config.b_grid.build();
    auto f = open_out(opt, config.prefix + "_oracle.csv");
    f << "b,lnJ,lnJ_over_bk\n";
    for (double b : grid) {
      const double lnJ = surface_growth_oracle(shape, v, b, config.k);
      f << fmt17(b) << "," << fmt17(lnJ) << "," << fmt17(lnJ / (b * config.k)) << "\n";
    }
    if (opt.verbose) err << "oracle: wrote " << grid.size() << " rows\n";
  });
}

int cmd_sweep(const RunConfig& config, const CommandOptions& opt, std::ostream& err) {
  return run_guarded(err, "sweep", [&] {
    if (!config.sweep) throw ConfigError("sweep needs a sweep block");
    const SweepSpec& sw = *config.sweep;
    Vec3 a1 = sw.axis1, a2 = sw.axis2;
    const double n1 = norm(a1), n2 = norm(a2);
    if (n1 == 0.0 || n2 == 0.0) throw ConfigError("sweep axes must be nonzero");
    a1 = (1.0 / n1) * a1;
    a2 = (1.0 / n2) * a2;
    // Gram-Schmidt so the sweep plane is well defined even for sloppy axes.
    a2 = a2 - dot(a1, a2) * a1;
    if (norm(a2) < 1e-12) throw ConfigError("sweep axes are collinear");
    a2 = (1.0 / norm(a2)) * a2;
    const RealDirection wn = RealDirection::normalized(cross(a1, a2));

    const std::vector<double> grid = config.b_grid.build();
    ScattererModel model = config.model();

    struct Row {
      Vec3 v;
      double width = 0.0, plus = 0.0, minus = 0.0;
    };
    AmplitudeEvaluator eval(model, config.alpha, config.k);
    std::vector<Row> rows(sw.count);
    parallel_for((size_t)sw.count, opt.threads, [&](size_t i) {
      const double th = 2.0 * M_PI * (double)i / sw.count;
      RealDirection v =
          RealDirection::normalized(std::cos(th) * a1 + std::sin(th) * a2);
      WidthEstimate we = estimate_width(eval, config.alpha, wn, v, grid, config.k);
      rows[i] = Row{v.vec(), we.width_hat, we.plus.d_hat, we.minus.d_hat};
    });

    auto f = open_out(opt, config.prefix + "_sweep.csv");
    f << "vx,vy,vz,width_hat,extent_plus,extent_minus\n";
    for (const auto& r : rows)
      f << fmt17(r.v.x) << "," << fmt17(r.v.y) << "," << fmt17(r.v.z) << "," << fmt17(r.width)
        << "," << fmt17(r.plus) << "," << fmt17(r.minus) << "\n";
    if (opt.verbose) err << "sweep: wrote " << rows.size() << " directions\n";
  });
}

}  // namespace scatsize
