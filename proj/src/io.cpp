#include "creve/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace creve {
namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing or unreadable file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path.string());
  return out;
}

// One CSV file with a mandatory header; rows are parsed strictly (column
// count and numeric format) and reported with their line number.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, const std::string& header)
      : path_(path.string()), in_(open_input(path)) {
    std::string first;
    if (!std::getline(in_, first)) {
      throw ParseError(path_, 1, "empty file, expected header '" + header + "'");
    }
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header) {
      throw ParseError(path_, 1, "bad header '" + first + "', expected '" +
                                     header + "'");
    }
    line_ = 1;
  }

  // Next data row into `fields`; false at EOF. Blank lines are rejected.
  bool next(std::vector<double>& fields, std::size_t expected) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string token = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      fields.push_back(parse_number(token));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != expected) {
      std::ostringstream msg;
      msg << "expected " << expected << " columns, got " << fields.size();
      throw ParseError(path_, line_, msg.str());
    }
    return true;
  }

  long line() const { return line_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_, line_, what);
  }

 private:
  double parse_number(const std::string& token) {
    if (token.empty()) fail("empty field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE) {
      fail("not a number: '" + token + "'");
    }
    if (!std::isfinite(v)) fail("non-finite value: '" + token + "'");
    return v;
  }

  std::string path_;
  std::ifstream in_;
  long line_ = 0;
};

void write_row(std::ofstream& out, std::initializer_list<double> values) {
  bool first = true;
  for (const double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Dataset to_dataset(const Scenario& scenario, const std::string& name) {
  Dataset d;
  d.radar = scenario.radar;
  d.imu = scenario.imu;
  d.truth = scenario.truth;
  d.truth_velocity_radar = scenario.truth_velocity_radar;
  d.truth_velocity_nav = scenario.truth_velocity_nav;
  d.calib = scenario.calib;
  d.metadata = {name, "simulator", scenario.config.rng_seed};
  return d;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto out = open_output(dir / "radar.csv");
    out << "scan_id,t,px,py,pz,doppler\n";
    for (std::size_t k = 0; k < dataset.radar.size(); ++k) {
      const RadarScan& scan = dataset.radar[k];
      for (const RadarTarget& target : scan.targets) {
        out << k << ',' << format_double(scan.timestamp) << ','
            << format_double(target.position.x()) << ','
            << format_double(target.position.y()) << ','
            << format_double(target.position.z()) << ','
            << format_double(target.doppler) << '\n';
      }
    }
  }
  {
    auto out = open_output(dir / "imu.csv");
    out << "t,fx,fy,fz,wx,wy,wz\n";
    for (const ImuSample& s : dataset.imu) {
      write_row(out, {s.timestamp, s.specific_force.x(), s.specific_force.y(),
                      s.specific_force.z(), s.angular_rate.x(),
                      s.angular_rate.y(), s.angular_rate.z()});
    }
  }
  if (dataset.has_truth()) {
    auto out = open_output(dir / "ground_truth.csv");
    out << "t,px,py,pz,qw,qx,qy,qz\n";
    for (const PoseSample& p : dataset.truth) {
      write_row(out, {p.timestamp, p.position.x(), p.position.y(),
                      p.position.z(), p.attitude.w(), p.attitude.x(),
                      p.attitude.y(), p.attitude.z()});
    }
  }
  if (dataset.has_truth_velocity()) {
    auto out = open_output(dir / "ground_truth_velocity.csv");
    out << "t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n\n";
    for (std::size_t i = 0; i < dataset.truth_velocity_radar.size(); ++i) {
      const TimedVec3& r = dataset.truth_velocity_radar[i];
      const TimedVec3& n = dataset.truth_velocity_nav[i];
      write_row(out, {r.timestamp, r.value.x(), r.value.y(), r.value.z(),
                      n.value.x(), n.value.y(), n.value.z()});
    }
  }
  {
    ordered_json j;
    j["format_version"] = kDatasetFormatVersion;
    j["q_rb"] = {dataset.calib.rot_radar_to_body.w(),
                 dataset.calib.rot_radar_to_body.x(),
                 dataset.calib.rot_radar_to_body.y(),
                 dataset.calib.rot_radar_to_body.z()};
    j["p_rb"] = {dataset.calib.lever_arm.x(), dataset.calib.lever_arm.y(),
                 dataset.calib.lever_arm.z()};
    j["gravity"] = dataset.calib.gravity;
    j["metadata"] = {{"name", dataset.metadata.name},
                     {"source", dataset.metadata.source},
                     {"seed", dataset.metadata.seed}};
    auto out = open_output(dir / "calib.json");
    out << j.dump(2) << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;

  {
    CsvReader csv(dir / "radar.csv", "scan_id,t,px,py,pz,doppler");
    std::vector<double> f;
    long current_id = -1;
    while (csv.next(f, 6)) {
      const long id = static_cast<long>(f[0]);
      RadarTarget target{Vec3(f[2], f[3], f[4]), f[5]};
      if (!(target.position.norm() > 0.0)) {
        csv.fail("zero-range target");
      }
      if (id == current_id) {
        RadarScan& scan = d.radar.back();
        if (f[1] != scan.timestamp) {
          csv.fail("timestamp differs within scan " + std::to_string(id));
        }
        scan.targets.push_back(target);
      } else {
        if (id != current_id + 1) {
          csv.fail("scan_id must increase by 1, got " + std::to_string(id));
        }
        if (!d.radar.empty() && f[1] <= d.radar.back().timestamp) {
          csv.fail("non-monotonic scan timestamp");
        }
        d.radar.push_back({f[1], {target}});
        current_id = id;
      }
    }
  }
  {
    CsvReader csv(dir / "imu.csv", "t,fx,fy,fz,wx,wy,wz");
    std::vector<double> f;
    while (csv.next(f, 7)) {
      if (!d.imu.empty() && f[0] <= d.imu.back().timestamp) {
        csv.fail("non-monotonic timestamp");
      }
      d.imu.push_back({f[0], Vec3(f[1], f[2], f[3]), Vec3(f[4], f[5], f[6])});
    }
  }
  if (std::filesystem::exists(dir / "ground_truth.csv")) {
    CsvReader csv(dir / "ground_truth.csv", "t,px,py,pz,qw,qx,qy,qz");
    std::vector<double> f;
    while (csv.next(f, 8)) {
      if (!d.truth.empty() && f[0] <= d.truth.back().timestamp) {
        csv.fail("non-monotonic timestamp");
      }
      try {
        d.truth.push_back(
            {f[0], Vec3(f[1], f[2], f[3]), Rotation(f[4], f[5], f[6], f[7])});
      } catch (const InvalidInputError& e) {
        csv.fail(e.what());
      }
    }
  }
  if (std::filesystem::exists(dir / "ground_truth_velocity.csv")) {
    CsvReader csv(dir / "ground_truth_velocity.csv",
                  "t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n");
    std::vector<double> f;
    while (csv.next(f, 7)) {
      if (!d.truth_velocity_radar.empty() &&
          f[0] <= d.truth_velocity_radar.back().timestamp) {
        csv.fail("non-monotonic timestamp");
      }
      d.truth_velocity_radar.push_back({f[0], Vec3(f[1], f[2], f[3])});
      d.truth_velocity_nav.push_back({f[0], Vec3(f[4], f[5], f[6])});
    }
  }
  {
    const auto path = dir / "calib.json";
    auto in = open_input(path);
    ordered_json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), 0, e.what());
    }
    const auto require = [&](const char* key) -> const ordered_json& {
      if (!j.contains(key)) {
        throw ParseError(path.string(), 0,
                         std::string("missing key '") + key + "'");
      }
      return j.at(key);
    };
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (key != "format_version" && key != "q_rb" && key != "p_rb" &&
          key != "gravity" && key != "metadata") {
        throw ParseError(path.string(), 0, "unknown key '" + key + "'");
      }
    }
    if (require("format_version").get<int>() != kDatasetFormatVersion) {
      throw ParseError(path.string(), 0, "unsupported format_version");
    }
    const auto q = require("q_rb").get<std::vector<double>>();
    const auto p = require("p_rb").get<std::vector<double>>();
    if (q.size() != 4 || p.size() != 3) {
      throw ParseError(path.string(), 0, "q_rb must have 4 and p_rb 3 values");
    }
    try {
      d.calib.rot_radar_to_body = Rotation(q[0], q[1], q[2], q[3]);
    } catch (const InvalidInputError& e) {
      throw ParseError(path.string(), 0, e.what());
    }
    d.calib.lever_arm = Vec3(p[0], p[1], p[2]);
    d.calib.gravity = require("gravity").get<double>();
    if (!(d.calib.gravity > 0.0)) {
      throw ParseError(path.string(), 0, "gravity must be > 0");
    }
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      d.metadata.name = m.value("name", "");
      d.metadata.source = m.value("source", "");
      d.metadata.seed = m.value("seed", std::uint64_t{0});
    }
  }
  return d;
}

void write_estimates(std::span<const VelocityEstimate> estimates,
                     const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n,inlier_ratio,"
         "gamma_x,gamma_y,gamma_z,constrained,zero_velocity\n";
  for (const VelocityEstimate& e : estimates) {
    out << format_double(e.timestamp) << ','
        << format_double(e.velocity_radar.x()) << ','
        << format_double(e.velocity_radar.y()) << ','
        << format_double(e.velocity_radar.z()) << ','
        << format_double(e.velocity_nav.x()) << ','
        << format_double(e.velocity_nav.y()) << ','
        << format_double(e.velocity_nav.z()) << ','
        << format_double(e.inlier_ratio) << ','
        << format_double(e.gamma_used.x()) << ','
        << format_double(e.gamma_used.y()) << ','
        << format_double(e.gamma_used.z()) << ','
        << (e.constrained ? 1 : 0) << ',' << (e.zero_velocity ? 1 : 0) << '\n';
  }
}

std::vector<VelocityEstimate> read_estimates(
    const std::filesystem::path& path) {
  CsvReader csv(path,
                "t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n,inlier_ratio,"
                "gamma_x,gamma_y,gamma_z,constrained,zero_velocity");
  std::vector<VelocityEstimate> estimates;
  std::vector<double> f;
  while (csv.next(f, 13)) {
    if (!estimates.empty() && f[0] <= estimates.back().timestamp) {
      csv.fail("non-monotonic timestamp");
    }
    VelocityEstimate e;
    e.timestamp = f[0];
    e.velocity_radar = Vec3(f[1], f[2], f[3]);
    e.velocity_nav = Vec3(f[4], f[5], f[6]);
    e.inlier_ratio = f[7];
    e.gamma_used = Vec3(f[8], f[9], f[10]);
    e.constrained = f[11] != 0.0;
    e.zero_velocity = f[12] != 0.0;
    estimates.push_back(e);
  }
  return estimates;
}

void write_report(const EvaluationReport& report,
                  const std::filesystem::path& path) {
  ordered_json j;
  j["metadata"] = {{"headline_metric", "rmse"},
                   {"estimate_count", report.estimate_count}};
  if (report.has_velocity_rmse) {
    j["velocity_rmse_radar"] = {{"x", report.velocity_rmse_radar.x()},
                                {"y", report.velocity_rmse_radar.y()},
                                {"z", report.velocity_rmse_radar.z()}};
  } else {
    j["velocity_rmse_radar"] = {{"skipped", report.velocity_rmse_note}};
  }
  if (report.has_ate) {
    j["ate"] = {{"alignment", to_string(report.ate.alignment)},
                {"rmse", report.ate.rmse},
                {"mean", report.ate.mean},
                {"median", report.ate.median},
                {"min", report.ate.min},
                {"max", report.ate.max},
                {"matched_pairs", report.ate.matched_pairs},
                {"per_timestamp_errors", report.ate.per_timestamp_errors}};
  } else {
    j["ate"] = {{"skipped", report.ate_note}};
  }
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_aligned_trajectory(std::span<const AlignedTrajectoryRow> rows,
                              const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "t,est_x,est_y,est_z,gt_x,gt_y,gt_z,error_norm\n";
  for (const AlignedTrajectoryRow& r : rows) {
    write_row(out, {r.timestamp, r.est.x(), r.est.y(), r.est.z(), r.gt.x(),
                    r.gt.y(), r.gt.z(), r.error_norm});
  }
}

}  // namespace creve
