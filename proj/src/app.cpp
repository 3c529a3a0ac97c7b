#include "creve/app.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "creve/version.hpp"

namespace creve {
namespace {

using ordered_json = nlohmann::ordered_json;

void write_manifest(const std::filesystem::path& out_dir, ordered_json j) {
  std::filesystem::create_directories(out_dir);
  ordered_json manifest;
  manifest["version"] = {{"project", kProjectVersion}, {"git", kGitRevision}};
  for (auto& [key, value] : j.items()) manifest[key] = std::move(value);
  std::ofstream out(out_dir / "manifest.json");
  if (!out) {
    throw IoError("cannot write manifest in " + out_dir.string());
  }
  out << manifest.dump(2) << '\n';
}

// Linear interpolation of the ground-truth position, clamped to the ends.
Vec3 interpolate_position(const std::vector<PoseSample>& poses, double t) {
  if (t <= poses.front().timestamp) return poses.front().position;
  if (t >= poses.back().timestamp) return poses.back().position;
  const auto it = std::lower_bound(
      poses.begin(), poses.end(), t,
      [](const PoseSample& p, double time) { return p.timestamp < time; });
  const PoseSample& hi = *it;
  const PoseSample& lo = *(it - 1);
  const double u = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return lo.position + u * (hi.position - lo.position);
}

}  // namespace

void cmd_simulate(const AppConfig& config,
                  const std::filesystem::path& out_dir) {
  config.validate();
  const Scenario scenario = generate(config.scenario);
  const Dataset dataset = to_dataset(scenario, out_dir.filename().string());
  save_dataset(dataset, out_dir);

  ordered_json j;
  j["command"] = "simulate";
  j["seed"] = config.scenario.rng_seed;
  j["config"] = ordered_json::parse(config_to_json(config));
  j["targets"] = {{"clean", scenario.mix.clean},
                  {"outliers", scenario.mix.outliers},
                  {"ghosts", scenario.mix.ghosts},
                  {"dynamic", scenario.mix.dynamic}};
  write_manifest(out_dir, std::move(j));
}

void cmd_estimate(const std::filesystem::path& dataset_dir,
                  const AppConfig& config, Method method,
                  const std::filesystem::path& out_dir) {
  config.validate();
  const Dataset dataset = load_dataset(dataset_dir);
  const RunResult result = run_estimation(dataset, config.pipeline, method);

  std::filesystem::create_directories(out_dir);
  write_estimates(result.estimates, out_dir / "estimates.csv");

  ordered_json j;
  j["command"] = "estimate";
  j["dataset"] = dataset_dir.string();
  j["method"] = to_string(method);
  j["seed"] = config.pipeline.ransac.rng_seed;
  j["config"] = ordered_json::parse(config_to_json(config));
  j["timing"] = {{"mean_ms", result.stats.mean_ms},
                 {"p95_ms", result.stats.p95_ms},
                 {"max_ms", result.stats.max_ms},
                 {"scans", result.stats.scans}};
  j["skipped"] = {
      {"before_alignment", result.stats.skipped_before_alignment},
      {"no_attitude", result.stats.skipped_no_attitude},
      {"no_imu", result.stats.skipped_no_imu},
      {"insufficient_targets", result.stats.skipped_insufficient_targets}};
  j["epochs"] = {{"constrained", result.stats.constrained_epochs},
                 {"zero_velocity", result.stats.zero_velocity_epochs},
                 {"degenerate", result.stats.degenerate_epochs}};
  write_manifest(out_dir, std::move(j));
}

void cmd_evaluate(const std::filesystem::path& estimates_path,
                  const std::filesystem::path& dataset_dir,
                  Alignment alignment, const AppConfig& config,
                  const std::filesystem::path& out_dir) {
  config.validate();
  const std::vector<VelocityEstimate> estimates =
      read_estimates(estimates_path);
  if (estimates.empty()) {
    throw InsufficientDataError("evaluate: estimates file has no rows");
  }
  const Dataset dataset = load_dataset(dataset_dir);
  const double max_dt = config.evaluation.max_dt;

  EvaluationReport report;
  report.estimate_count = estimates.size();

  if (dataset.has_truth_velocity()) {
    std::vector<TimedVec3> est_series;
    est_series.reserve(estimates.size());
    for (const VelocityEstimate& e : estimates) {
      est_series.push_back({e.timestamp, e.velocity_radar});
    }
    report.velocity_rmse_radar =
        rmse_per_axis(est_series, dataset.truth_velocity_radar, max_dt);
    report.has_velocity_rmse = true;
  } else {
    report.velocity_rmse_note =
        "dataset has no ground_truth_velocity.csv; velocity RMSE skipped";
  }

  std::filesystem::create_directories(out_dir);
  if (dataset.has_truth()) {
    // Integration starts one nominal period before the first estimate.
    std::vector<double> gaps;
    for (std::size_t i = 1; i < estimates.size(); ++i) {
      gaps.push_back(estimates[i].timestamp - estimates[i - 1].timestamp);
    }
    double period = 0.0;
    if (!gaps.empty()) {
      std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2,
                       gaps.end());
      period = gaps[gaps.size() / 2];
    }
    const Vec3 p0 = interpolate_position(
        dataset.truth, estimates.front().timestamp - period);
    const Trajectory est_traj = integrate_positions(estimates, p0);
    Trajectory gt_traj;
    gt_traj.samples.reserve(dataset.truth.size());
    for (const PoseSample& p : dataset.truth) {
      gt_traj.samples.push_back({p.timestamp, p.position, p.attitude});
    }
    report.ate = ate(est_traj, gt_traj, alignment, max_dt);
    report.has_ate = true;

    // Plot-ready aligned trajectory.
    Trajectory aligned = est_traj;
    if (alignment == Alignment::pos_yaw) {
      const PosYawTransform t = align_pos_yaw(est_traj, gt_traj, max_dt);
      for (auto& s : aligned.samples) s.position = t.apply(s.position);
    } else if (alignment == Alignment::se3) {
      const Se3Transform t = align_umeyama(est_traj, gt_traj, max_dt);
      for (auto& s : aligned.samples) s.position = t.apply(s.position);
    }
    std::vector<AlignedTrajectoryRow> rows;
    std::size_t j = 0;
    for (const TrajectorySample& s : aligned.samples) {
      while (j + 1 < gt_traj.samples.size() &&
             std::abs(gt_traj.samples[j + 1].timestamp - s.timestamp) <=
                 std::abs(gt_traj.samples[j].timestamp - s.timestamp)) {
        ++j;
      }
      if (std::abs(gt_traj.samples[j].timestamp - s.timestamp) <= max_dt) {
        const Vec3& gt_pos = gt_traj.samples[j].position;
        rows.push_back({s.timestamp, s.position, gt_pos,
                        (s.position - gt_pos).norm()});
      }
    }
    write_aligned_trajectory(rows, out_dir / "aligned_trajectory.csv");
  } else {
    report.ate_note = "dataset has no ground_truth.csv; ATE skipped";
  }

  write_report(report, out_dir / "report.json");

  ordered_json j;
  j["command"] = "evaluate";
  j["dataset"] = dataset_dir.string();
  j["estimates"] = estimates_path.string();
  j["alignment"] = to_string(alignment);
  j["seed"] = 0;
  j["config"] = ordered_json::parse(config_to_json(config));
  write_manifest(out_dir, std::move(j));
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const ParseError&) {
    return kExitIo;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const DegenerateGeometryError&) {
    return kExitNumerical;
  } catch (const ConvergenceError&) {
    return kExitNumerical;
  } catch (const InsufficientDataError&) {
    return kExitNumerical;
  } catch (const InsufficientOverlapError&) {
    return kExitNumerical;
  } catch (const OutOfRangeError&) {
    return kExitNumerical;
  } catch (const InvalidInputError&) {
    return kExitConfig;
  } catch (...) {
    return kExitFailure;
  }
}

}  // namespace creve
