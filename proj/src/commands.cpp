#include "radar_odom/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "radar_odom/dataset_io.hpp"
#include "radar_odom/errors.hpp"
#include "radar_odom/eval_bench.hpp"
#include "radar_odom/radar_sim.hpp"

namespace radar_odom {
namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void ensure_output_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (!fs::is_directory(config.output_dir)) throw InvalidConfig("cannot create output directory " + config.output_dir);
}

std::string output_path(const RunConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

void write_trajectories(const TrajectoryEstimate& traj, const RunConfig& config, const std::string& stem,
                        std::ostream& out) {
  for (TrajectoryFormat f : config.formats) {
    const std::string path =
        output_path(config, f == TrajectoryFormat::kNative ? stem + ".txt" : stem + "_kitti.txt");
    write_trajectory(traj, path, f);
    out << "wrote " << path << '\n';
  }
}

std::string diagnostics_csv(const std::vector<FrameDiagnostics>& diags) {
  std::string csv = "frame,stage_filter_ms,stage_surface_ms,stage_register_ms,total_ms,iterations,correspondences,keyframe_id\n";
  for (const FrameDiagnostics& d : diags) {
    csv += std::to_string(d.frame) + ',' + fixed(d.stage_filter_ms) + ',' + fixed(d.stage_surface_ms) + ',' +
           fixed(d.stage_register_ms) + ',' + fixed(d.total_ms) + ',' + std::to_string(d.iterations) + ',' +
           std::to_string(d.correspondences) + ',' + std::to_string(d.keyframe_id) + '\n';
  }
  return csv;
}

std::string mean_sd(const std::vector<FrameDiagnostics>& diags, double FrameDiagnostics::*field) {
  if (diags.empty()) return "n/a";
  double sum = 0.0, sq = 0.0;
  for (const auto& d : diags) sum += d.*field;
  const double mean = sum / static_cast<double>(diags.size());
  for (const auto& d : diags) sq += (d.*field - mean) * (d.*field - mean);
  const double sd = std::sqrt(sq / static_cast<double>(diags.size()));
  return fixed(mean, 2) + " +/- " + fixed(sd, 2) + " ms";
}

// A directory is read as Oxford polar PNGs, anything else as a scan archive.
ScanArchive load_scans(const std::string& path) {
  return fs::is_directory(path) ? read_oxford_polar(path) : read_scan_archive(path);
}

World2D load_world(const std::string& source) {
  if (source == "builtin:corridor") return make_corridor_world();
  if (source == "builtin:sparse") return make_sparse_world();
  return read_world(source);
}

// Number of fields on the first data line; 12 means KITTI.
std::optional<TrajectoryFormat> sniff_format(const std::string& path) {
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::size_t count = 0;
    for (std::string tok; ss >> tok;) ++count;
    if (count == 12) return TrajectoryFormat::kKitti;
    if (count > 0) return TrajectoryFormat::kNative;
  }
  return std::nullopt;
}

void restamp_by_index(TrajectoryEstimate& t) {
  for (std::size_t i = 0; i < t.entries.size(); ++i) t.entries[i].timestamp = static_cast<double>(i);
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace

std::size_t thread_budget() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RADAR_ODOM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) hw = std::min<std::size_t>(hw, static_cast<std::size_t>(v));
  }
  return hw;
}

int cmd_odometry(const std::string& archive_path, const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScanArchive archive = load_scans(archive_path);
    ensure_output_dir(config);
    const OdometryRun run = run_odometry(archive, config.odometry);
    write_trajectories(run.trajectory, config, "trajectory", out);
    const std::string diag_path = output_path(config, "diagnostics.csv");
    write_file_atomic(diag_path, diagnostics_csv(run.diagnostics));
    out << "wrote " << diag_path << '\n';

    std::size_t failed = 0;
    for (const auto& d : run.diagnostics) failed += d.registration_failed ? 1 : 0;
    out << "frames: " << run.diagnostics.size() << " (dead-reckoned: " << failed << ")\n"
        << "total:    " << mean_sd(run.diagnostics, &FrameDiagnostics::total_ms) << '\n'
        << "filter:   " << mean_sd(run.diagnostics, &FrameDiagnostics::stage_filter_ms) << '\n'
        << "surface:  " << mean_sd(run.diagnostics, &FrameDiagnostics::stage_surface_ms) << '\n'
        << "register: " << mean_sd(run.diagnostics, &FrameDiagnostics::stage_register_ms) << '\n';
    return kExitOk;
  });
}

int cmd_simulate(const std::string& world_path, const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const World2D world = load_world(world_path);
    ensure_output_dir(config);
    const Trajectory trajectory = constant_velocity_trajectory({}, {config.speed, 0.0, config.yaw_rate});
    const SimSequence seq = render_sequence(world, trajectory, config.scans, config.sim, 0.0, thread_budget());
    const std::string archive_path = output_path(config, "scans.radar");
    write_scan_archive({seq.scans}, archive_path);
    out << "wrote " << archive_path << " (" << seq.scans.size() << " scans)\n";
    write_trajectories(seq.ground_truth, config, "ground_truth", out);
    return kExitOk;
  });
}

int cmd_evaluate(const std::string& estimate_path, const std::string& truth_path, const RunConfig& config,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TrajectoryEstimate estimate = read_trajectory(estimate_path);
    TrajectoryEstimate truth = read_trajectory(truth_path);
    if (sniff_format(estimate_path) == TrajectoryFormat::kKitti || sniff_format(truth_path) == TrajectoryFormat::kKitti) {
      restamp_by_index(estimate);
      restamp_by_index(truth);
    }
    ensure_output_dir(config);
    const AlignedTrajectories aligned = align_trajectories(estimate, truth);

    std::string csv = "scope,trans_err_pct,rot_err_deg_per_100m,rpe_m,segments\n";
    std::optional<double> rpe;
    try {
      rpe = relative_pose_error(aligned);
    } catch (const PathTooShort& e) {
      out << "relative pose error: unavailable (" << e.what() << ")\n";
    }
    const std::string rpe_text = rpe ? format_double(*rpe) : "";
    try {
      const OdomErrorReport report = kitti_odometry_error(aligned);
      out << "translation error: " << fixed(report.translation_error_percent) << " %\n"
          << "rotation error:    " << fixed(report.rotation_error_deg_per_100m) << " deg/100m\n";
      for (const LengthError& e : report.per_length) {
        csv += format_double(e.length) + ',' + format_double(e.translation_error_percent) + ',' +
               format_double(e.rotation_error_deg_per_100m) + ",," + std::to_string(e.segments) + '\n';
      }
      csv += "all," + format_double(report.translation_error_percent) + ',' +
             format_double(report.rotation_error_deg_per_100m) + ',' + rpe_text + ',' +
             std::to_string(report.segments) + '\n';
      if (report.path_too_short) out << "note: path shorter than 800 m; only available lengths were scored\n";
    } catch (const PathTooShort& e) {
      out << "translation/rotation error: unavailable (" << e.what() << ")\n";
      csv += "all,,," + rpe_text + ",0\n";
    }
    if (rpe) out << "relative pose error: " << fixed(*rpe, 6) << " m\n";
    const std::string csv_path = output_path(config, "evaluation.csv");
    write_file_atomic(csv_path, csv);
    out << "wrote " << csv_path << '\n';
    return kExitOk;
  });
}

int cmd_sweep(const std::string& archive_path, const std::string& truth_path, const std::vector<double>& resolutions,
              const std::vector<Metric>& metrics, const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScanArchive archive = load_scans(archive_path);
    const TrajectoryEstimate truth = read_trajectory(truth_path);
    ensure_output_dir(config);
    const std::vector<SweepRow> rows =
        resolution_sweep(archive, truth, resolutions, metrics, config.odometry, thread_budget());
    const std::string csv = format_sweep_csv(rows);
    const std::string csv_path = output_path(config, "sweep.csv");
    write_file_atomic(csv_path, csv);
    out << csv << "wrote " << csv_path << '\n';

    std::size_t ok = 0;
    for (const SweepRow& row : rows) {
      if (row.failed) {
        err << "cell r=" << row.resolution << ' ' << to_string(row.metric) << " failed: " << row.error << '\n';
      } else {
        ++ok;
      }
    }
    return ok > 0 ? kExitOk : kExitInputError;
  });
}

namespace {

const std::map<std::string, std::string>& flag_help() {
  static const std::map<std::string, std::string> help = {
      {"k", "returns kept per azimuth"},
      {"z-min", "power threshold for kept returns"},
      {"resolution", "surface grid resolution r [m]"},
      {"metric", "p2l or p2p"},
      {"keyframe-distance", "travel before a new keyframe [m]"},
      {"max-iterations", "registration iteration cap"},
      {"huber-delta", "Huber threshold [m], inf for plain least squares"},
      {"min-neighbors", "points needed to form a surface point"},
      {"seed", "simulator noise seed"},
      {"output", "output directory"},
      {"format", "trajectory formats: native,kitti"},
      {"azimuths", "simulated azimuths per sweep"},
      {"bins", "simulated range bins"},
      {"range-resolution", "simulated bin size [m]"},
      {"sweep-period", "simulated sweep period [s]"},
      {"noise-mean", "simulated noise floor mean"},
      {"noise-sd", "simulated noise floor deviation"},
      {"peak-power", "simulated return power"},
      {"peak-width", "simulated return width [bins]"},
      {"dropout", "probability an azimuth is blanked"},
      {"speed", "simulated forward speed [m/s]"},
      {"yaw-rate", "simulated yaw rate [rad/s]"},
      {"scans", "number of simulated scans"},
  };
  return help;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radar odometry: k-strongest filtering, oriented surface points, point-to-line registration"};
  app.name("radar_odom");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key=value config file; flags override it");
  std::map<std::string, std::string> flag_storage;
  std::map<std::string, CLI::Option*> flag_options;
  const RunConfig defaults;
  for (const std::string& key : config_keys()) {
    const auto text = flag_help().find(key);
    const std::string help = text == flag_help().end() ? std::string() : text->second;
    flag_options[key] = app.add_option("--" + key, flag_storage[key], help + " [" + config_value(defaults, key) + "]");
  }

  std::string archive, world, estimate, truth;
  std::vector<double> resolutions{2.0, 3.0, 4.0};
  std::vector<std::string> metric_names{"p2l", "p2p"};

  CLI::App* odometry = app.add_subcommand("odometry", "Run odometry on a scan archive");
  odometry->add_option("archive", archive, "Scan archive, or a directory of Oxford polar PNGs")->required();
  CLI::App* simulate = app.add_subcommand("simulate", "Render a simulated scan archive and ground truth");
  simulate->add_option("world", world, "World file, or builtin:corridor / builtin:sparse")->required();
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score an estimated trajectory against ground truth");
  evaluate->add_option("estimate", estimate, "Estimated trajectory (native or KITTI)")->required();
  evaluate->add_option("truth", truth, "Reference trajectory")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "Error versus resolution for each metric");
  sweep->add_option("archive", archive, "Scan archive, or a directory of Oxford polar PNGs")->required();
  sweep->add_option("truth", truth, "Reference trajectory")->required();
  sweep->add_option("--resolutions", resolutions, "Comma-separated grid resolutions [m]")->delimiter(',');
  sweep->add_option("--metrics", metric_names, "Comma-separated metrics")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig config;
  std::vector<Metric> metrics;
  try {
    Settings file_settings;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw InvalidConfig("cannot read config file " + config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      file_settings = parse_config_text(ss.str());
    }
    Settings flags;
    for (const auto& [key, opt] : flag_options) {
      if (opt->count() > 0) flags[key] = flag_storage[key];
    }
    config = resolve_config(file_settings, flags);
    for (const std::string& name : metric_names) metrics.push_back(parse_metric(name));
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (odometry->parsed()) return cmd_odometry(archive, config, out, err);
  if (simulate->parsed()) return cmd_simulate(world, config, out, err);
  if (evaluate->parsed()) return cmd_evaluate(estimate, truth, config, out, err);
  return cmd_sweep(archive, truth, resolutions, metrics, config, out, err);
}

}  // namespace radar_odom
