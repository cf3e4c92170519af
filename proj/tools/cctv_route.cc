#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fmt/core.h"
#include "fmt/ostream.h"
#include "json.hpp"

#include "cctv/camera.h"
#include "cctv/coverage_graph.h"
#include "cctv/error.h"
#include "cctv/experiment.h"
#include "cctv/geojson.h"
#include "cctv/io.h"
#include "cctv/osm.h"
#include "cctv/route.h"
#include "cctv/service.h"
#include "cctv/synth.h"

namespace fs = std::filesystem;
using namespace cctv;

namespace {

constexpr auto const kExitOk = 0;
constexpr auto const kExitInput = 2;
constexpr auto const kExitNoRoute = 3;

std::atomic<bool> interrupted{false};

extern "C" void on_signal(int) { interrupted = true; }

geo_point parse_lat_lon(std::string const& s, std::string_view flag) {
  auto const fail = [&]() -> geo_point {
    throw error{error_kind::kValidation,
                fmt::format("{}: expected LAT,LON, got '{}'", flag, s)};
  };
  auto const comma = s.find(',');
  if (comma == std::string::npos) {
    return fail();
  }
  auto p = geo_point{};
  auto const* b = s.data();
  auto const* e = s.data() + s.size();
  auto const r1 = std::from_chars(b, b + comma, p.lat_);
  auto const r2 = std::from_chars(b + comma + 1, e, p.lon_);
  if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} || r2.ptr != e) {
    return fail();
  }
  if (!is_valid(p)) {
    throw error{error_kind::kValidation,
                fmt::format("{}: coordinate out of range: {}", flag, s)};
  }
  return p;
}

surveillance_task task_or_throw(std::string const& name) {
  auto const t = parse_task(name);
  if (!t.has_value()) {
    throw error{error_kind::kValidation, fmt::format("unknown task '{}'", name)};
  }
  return *t;
}

std::vector<camera> load_cameras_opt(std::string const& path) {
  return path.empty() ? std::vector<camera>{} : load_cameras_file(path);
}

struct dataset_flags {
  void add(CLI::App& app) {
    app.add_option("--osm", osm_, "OSM XML extract")->required();
    app.add_option("--cameras", cameras_, "camera GeoJSON file");
    app.add_option("--task", task_, "surveillance task for derived radii");
    app.add_option("--highways", highways_, "pedestrian highway classes (comma separated)")
        ->delimiter(',');
  }

  pedestrian_filter filter() const {
    if (highways_.empty()) {
      return pedestrian_filter::defaults();
    }
    return {{begin(highways_), end(highways_)}};
  }

  std::string osm_;
  std::string cameras_;
  std::vector<std::string> highways_;
  std::string task_{"recognition"};
};

int cmd_ingest(dataset_flags const& ds, std::vector<double> const& radii,
               std::string const& dump_graph) {
  auto const net = load_osm_file(ds.osm_, ds.filter());
  auto const cams = load_cameras_opt(ds.cameras_);
  auto const task = task_or_throw(ds.task_);
  auto const stats = compute_stats(net);
  fmt::print("nodes {}\nways {}\nlength_m {:.1f}\ncameras {}\n", stats.nodes_,
             stats.ways_, stats.total_length_m_, cams.size());
  for (auto const r : radii) {
    auto const g = coverage_graph::build(net, cams, make_coverage_config(task, r));
    auto const covered = g.covered_length();
    auto const total = g.total_length();
    fmt::print("radius {}m: graph_nodes {} graph_edges {} covered_m {:.1f} ({:.1f}%)\n", r,
               g.nodes().size(), g.edges().size(), covered,
               total > 0.0 ? 100.0 * covered / total : 0.0);
    if (!dump_graph.empty()) {
      auto path = fs::path{dump_graph};
      if (radii.size() > 1U) {
        path.replace_filename(fmt::format("{}_{}m{}", path.stem().string(), r,
                                          path.extension().string()));
      }
      write_file(path, graph_to_geojson(g));
    }
  }
  return kExitOk;
}

struct route_flags {
  std::string from_, to_;
  std::vector<std::string> via_;
  std::string mode_{"privacy"};
  double radius_{10.0};
  double beta_{kDefaultSafetyBeta};
  double snap_gap_max_{kDefaultSnapGapMax};
  double complete_gap_{kDefaultCompleteGap};
};

int cmd_route(dataset_flags const& ds, route_flags const& f, fs::path const& out) {
  auto req = route_request{};
  req.origin_ = parse_lat_lon(f.from_, "--from");
  req.destination_ = parse_lat_lon(f.to_, "--to");
  for (auto const& v : f.via_) {
    req.via_.push_back(parse_lat_lon(v, "--via"));
  }
  auto const mode = parse_mode(f.mode_);
  if (!mode.has_value()) {
    throw error{error_kind::kValidation, fmt::format("unknown mode '{}'", f.mode_)};
  }
  req.mode_ = *mode;
  req.beta_ = f.beta_;
  req.snap_gap_max_m_ = f.snap_gap_max_;
  req.complete_gap_m_ = f.complete_gap_;
  validate(req);

  auto const net = load_osm_file(ds.osm_, ds.filter());
  auto const cams = load_cameras_opt(ds.cameras_);
  auto const g = coverage_graph::build(
      net, cams, make_coverage_config(task_or_throw(ds.task_), f.radius_));
  auto const res = route(req, g);

  auto const file = out / fmt::format("route_{}_{}m.geojson", to_str(req.mode_), f.radius_);
  write_file(file, nlohmann::json{{"type", "FeatureCollection"},
                                  {"features", {route_feature(res)}}}
                       .dump(2));

  auto const overhead = res.overhead_vs_baseline_.has_value()
                            ? fmt::format("{:.1f}", *res.overhead_vs_baseline_)
                            : std::string{"-"};
  fmt::print("{} {:.0f} {:.0f} {}\n", to_str(res.status_), res.length_m_, res.exposure_m_,
             overhead);
  return res.status_ == route_status::kNoRoute ? kExitNoRoute : kExitOk;
}

int cmd_experiment(dataset_flags const& ds, std::string const& spec_path,
                   run_options opt, fs::path const& out) {
  auto const spec = parse_experiment_spec(read_file(spec_path));
  auto const net = load_osm_file(ds.osm_, ds.filter());
  auto const cams = load_cameras_opt(ds.cameras_);
  opt.task_ = task_or_throw(ds.task_);
  auto const table = run_matrix(spec, net, cams, opt);
  write_report(table, out);
  std::cout << report_text(table);
  return kExitOk;
}

int cmd_serve(dataset_flags const& ds, std::string const& listen,
              std::vector<double> const& radii, double const beta,
              double const snap_gap_max) {
  auto const colon = listen.rfind(':');
  auto port = -1;
  if (colon != std::string::npos) {
    auto const* b = listen.data() + colon + 1;
    auto const* e = listen.data() + listen.size();
    auto const [ptr, ec] = std::from_chars(b, e, port);
    if (ec != std::errc{} || ptr != e) {
      port = -1;
    }
  }
  if (port < 0 || port > 65535) {
    throw error{error_kind::kValidation,
                fmt::format("--listen: expected HOST:PORT, got '{}'", listen)};
  }
  auto const host = listen.substr(0U, colon);

  auto cfg = service_config{};
  cfg.radii_ = radii;
  cfg.task_ = task_or_throw(ds.task_);
  cfg.filter_ = ds.filter();
  cfg.beta_ = beta;
  cfg.snap_gap_max_m_ = snap_gap_max;
  auto svc = route_service{cfg};
  svc.load({ds.osm_, ds.cameras_});

  auto server = http_server{svc};
  auto const bound = server.bind(host, port);
  if (bound < 0) {
    fmt::print(std::cerr, "cannot listen on {}\n", listen);
    return kExitInput;
  }
  fmt::print("listening on {}:{}\n", host, bound);
  std::cout.flush();

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto watcher = std::thread{[&]() {
    while (!interrupted) {
      std::this_thread::sleep_for(std::chrono::milliseconds{50});
    }
    server.stop();
  }};
  server.run();
  interrupted = true;
  watcher.join();
  fmt::print("stopped\n");
  return kExitOk;
}

int cmd_synth(std::string const& name, fs::path const& out, double const offset,
              std::uint64_t const seed, std::size_t const camera_count) {
  auto net_and_cams = [&]() -> std::pair<ped_network, std::vector<camera>> {
    if (name == "two_route") {
      auto f = synth::two_route_fixture();
      return {std::move(f.fx_.net_), std::move(f.fx_.cameras_)};
    } else if (name == "safety_longer") {
      auto f = synth::safety_longer_fixture();
      return {std::move(f.fx_.net_), std::move(f.fx_.cameras_)};
    } else if (name == "ring") {
      auto f = synth::ring_fixture(offset);
      return {std::move(f.fx_.net_), std::move(f.fx_.cameras_)};
    } else if (name == "city") {
      auto net = synth::city(seed);
      auto cams = synth::street_cameras(net, camera_count, seed + 1U);
      return {std::move(net), std::move(cams)};
    }
    throw error{error_kind::kValidation, fmt::format("unknown fixture '{}'", name)};
  }();
  write_file(out / fmt::format("{}.osm", name), to_osm_xml(net_and_cams.first));
  write_file(out / fmt::format("{}_cameras.geojson", name),
             cameras_to_geojson(net_and_cams.second));
  fmt::print("wrote {} and {}\n", (out / (name + ".osm")).string(),
             (out / (name + "_cameras.geojson")).string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"CCTV-aware pedestrian routing"};
  app.require_subcommand(1);
  auto out = std::string{"./out"};
  app.add_option("--out", out, "output directory")->capture_default_str();

  auto ds = dataset_flags{};

  auto* ingest = app.add_subcommand("ingest", "print network and coverage statistics");
  ds.add(*ingest);
  auto ingest_radii = std::vector<double>{10.0, 15.0, 25.0};
  auto dump_graph = std::string{};
  ingest->add_option("--radius", ingest_radii, "coverage radii in meters")
      ->capture_default_str();
  ingest->add_option("--dump-graph", dump_graph, "write the split graph as GeoJSON");

  auto* route_cmd = app.add_subcommand("route", "route one origin/destination pair");
  ds.add(*route_cmd);
  auto rf = route_flags{};
  route_cmd->add_option("--from", rf.from_, "LAT,LON")->required();
  route_cmd->add_option("--to", rf.to_, "LAT,LON")->required();
  route_cmd->add_option("--via", rf.via_, "LAT,LON (repeatable)");
  route_cmd->add_option("--mode", rf.mode_, "privacy | safety | baseline")
      ->capture_default_str();
  route_cmd->add_option("--radius", rf.radius_, "coverage radius in meters")
      ->capture_default_str();
  route_cmd->add_option("--beta", rf.beta_, "safety discount")->capture_default_str();
  route_cmd->add_option("--snap-gap-max", rf.snap_gap_max_)->capture_default_str();
  route_cmd->add_option("--complete-gap", rf.complete_gap_)->capture_default_str();

  auto* experiment = app.add_subcommand("experiment", "run an experiment spec");
  ds.add(*experiment);
  auto spec_path = std::string{};
  auto opt = run_options{};
  experiment->add_option("--spec", spec_path, "experiment spec JSON")->required();
  experiment->add_option("--beta", opt.beta_)->capture_default_str();
  experiment->add_option("--snap-gap-max", opt.snap_gap_max_m_)->capture_default_str();
  experiment->add_option("--complete-gap", opt.complete_gap_m_)->capture_default_str();

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  ds.add(*serve);
  auto listen = std::string{"127.0.0.1:8080"};
  auto serve_radii = std::vector<double>{10.0, 15.0, 25.0};
  auto serve_beta = kDefaultSafetyBeta;
  auto serve_gap = kDefaultSnapGapMax;
  serve->add_option("--listen", listen, "HOST:PORT")->capture_default_str();
  serve->add_option("--radius", serve_radii, "prebuilt radii")->capture_default_str();
  serve->add_option("--beta", serve_beta)->capture_default_str();
  serve->add_option("--snap-gap-max", serve_gap)->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic fixture");
  auto fixture = std::string{};
  auto offset = 80.0;
  auto seed = std::uint64_t{1};
  auto camera_count = std::size_t{450};
  synth_cmd->add_option("fixture", fixture, "two_route | safety_longer | ring | city")
      ->required();
  synth_cmd->add_option("--offset", offset, "ring camera offset")->capture_default_str();
  synth_cmd->add_option("--seed", seed)->capture_default_str();
  synth_cmd->add_option("--camera-count", camera_count)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(ds, ingest_radii, dump_graph);
    } else if (route_cmd->parsed()) {
      return cmd_route(ds, rf, out);
    } else if (experiment->parsed()) {
      return cmd_experiment(ds, spec_path, opt, out);
    } else if (serve->parsed()) {
      return cmd_serve(ds, listen, serve_radii, serve_beta, serve_gap);
    } else if (synth_cmd->parsed()) {
      return cmd_synth(fixture, out, offset, seed, camera_count);
    }
  } catch (error const& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitInput;
  } catch (std::exception const& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return kExitOk;
}
