#include "cctv/camera.h"

#include <cmath>
#include <numbers>
#include <set>

#include "fmt/core.h"
#include "json.hpp"

#include "cctv/error.h"
#include "cctv/io.h"

namespace cctv {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_fail(std::size_t const feature, std::string_view field,
                              std::string_view what) {
  throw error{error_kind::kValidation,
              fmt::format("feature {}: field '{}': {}", feature, field, what)};
}

double positive_number(json const& j, std::size_t const feature,
                       std::string_view field) {
  if (!j.is_number()) {
    schema_fail(feature, field, "expected a number");
  }
  auto const v = j.get<double>();
  if (!std::isfinite(v) || v <= 0.0) {
    schema_fail(feature, field, "must be positive");
  }
  return v;
}

fov_spec parse_fov(json const& props, std::size_t const idx) {
  auto const it = props.find("fov");
  if (it == props.end() || (it->is_string() && it->get<std::string>() == "omni")) {
    return fov_spec::omni();
  }
  if (!it->is_object()) {
    schema_fail(idx, "fov", "expected \"omni\" or {bearing_deg, angle_deg}");
  }
  auto const b = it->find("bearing_deg");
  auto const a = it->find("angle_deg");
  if (b == it->end() || !b->is_number()) {
    schema_fail(idx, "fov.bearing_deg", "missing or not a number");
  }
  if (a == it->end() || !a->is_number()) {
    schema_fail(idx, "fov.angle_deg", "missing or not a number");
  }
  try {
    return fov_spec::sector(b->get<double>(), a->get<double>());
  } catch (error const& e) {
    schema_fail(idx, "fov", e.what());
  }
}

camera parse_feature(json const& f, std::size_t const idx) {
  if (!f.is_object() || f.value("type", "") != "Feature") {
    schema_fail(idx, "type", "expected \"Feature\"");
  }

  auto const geom = f.find("geometry");
  if (geom == f.end() || !geom->is_object() || geom->value("type", "") != "Point") {
    schema_fail(idx, "geometry", "expected a Point geometry");
  }
  auto const coords = geom->find("coordinates");
  if (coords == geom->end() || !coords->is_array() || coords->size() < 2U ||
      !(*coords)[0].is_number() || !(*coords)[1].is_number()) {
    schema_fail(idx, "geometry.coordinates", "expected [lon, lat]");
  }
  auto const pos = geo_point{(*coords)[1].get<double>(), (*coords)[0].get<double>()};
  if (!is_valid(pos)) {
    schema_fail(idx, "geometry.coordinates", "out of WGS84 range");
  }

  auto const props = f.find("properties");
  if (props == f.end() || !props->is_object()) {
    schema_fail(idx, "properties", "missing or not an object");
  }
  auto const id = props->find("id");
  if (id == props->end() || !id->is_string() || id->get<std::string>().empty()) {
    schema_fail(idx, "properties.id", "missing or not a non-empty string");
  }

  auto cam = camera{id->get<std::string>(), pos, parse_fov(*props, idx), {}, {}};

  if (auto const r = props->find("radius_m"); r != props->end()) {
    if (!r->is_object()) {
      schema_fail(idx, "radius_m", "expected {task: meters}");
    }
    for (auto const& [task_name, meters] : r->items()) {
      auto const task = parse_task(task_name);
      if (!task.has_value()) {
        schema_fail(idx, "radius_m." + task_name, "unknown surveillance task");
      }
      cam.radius_m_[*task] = positive_number(meters, idx, "radius_m." + task_name);
    }
  }

  if (auto const o = props->find("optics"); o != props->end()) {
    if (!o->is_object()) {
      schema_fail(idx, "optics", "expected {h_res_px, hfov_deg}");
    }
    auto const h = o->find("h_res_px");
    if (h == o->end() || !h->is_number_integer() || h->get<std::int64_t>() <= 0) {
      schema_fail(idx, "optics.h_res_px", "expected a positive integer");
    }
    auto const hfov = o->find("hfov_deg");
    if (hfov == o->end()) {
      schema_fail(idx, "optics.hfov_deg", "missing");
    }
    auto const deg = positive_number(*hfov, idx, "optics.hfov_deg");
    if (deg >= 180.0) {
      schema_fail(idx, "optics.hfov_deg", "must be below 180");
    }
    cam.optics_ = optics_spec{h->get<int>(), deg};
  }
  return cam;
}

}  // namespace

int task_ppm(surveillance_task const t) {
  switch (t) {
    case surveillance_task::kIdentification: return 250;
    case surveillance_task::kRecognition: return 125;
    case surveillance_task::kObservation: return 62;
    case surveillance_task::kDetection: return 25;
    case surveillance_task::kMonitoring: return 12;
  }
  return 0;
}

std::string_view to_str(surveillance_task const t) {
  switch (t) {
    case surveillance_task::kIdentification: return "identification";
    case surveillance_task::kRecognition: return "recognition";
    case surveillance_task::kObservation: return "observation";
    case surveillance_task::kDetection: return "detection";
    case surveillance_task::kMonitoring: return "monitoring";
  }
  return "";
}

std::optional<surveillance_task> parse_task(std::string_view const s) {
  for (auto const t : kAllTasks) {
    if (to_str(t) == s) {
      return t;
    }
  }
  return std::nullopt;
}

fov_spec fov_spec::sector(double const bearing_deg, double const angle_deg) {
  if (!std::isfinite(bearing_deg) || !std::isfinite(angle_deg) ||
      angle_deg <= 0.0 || angle_deg >= 360.0) {
    throw error{error_kind::kValidation,
                fmt::format("sector angle must be in (0, 360), got {}", angle_deg)};
  }
  auto f = fov_spec{};
  f.kind_ = kind::kSector;
  f.bearing_deg_ = std::fmod(bearing_deg, 360.0);
  if (f.bearing_deg_ < 0.0) {
    f.bearing_deg_ += 360.0;
  }
  f.angle_deg_ = angle_deg;
  return f;
}

coverage_config make_coverage_config(surveillance_task const task,
                                     std::optional<double> const global_radius_m) {
  if (global_radius_m.has_value() &&
      !(*global_radius_m > 0.0 &&
        *global_radius_m <= coverage_config::kMaxGlobalRadius)) {
    throw error{error_kind::kConfiguration,
                fmt::format("global radius must be in (0, {}], got {}",
                            coverage_config::kMaxGlobalRadius, *global_radius_m)};
  }
  return {task, global_radius_m};
}

std::vector<camera> parse_cameras(std::string_view const text) {
  auto doc = json{};
  try {
    doc = json::parse(text);
  } catch (json::parse_error const& e) {
    throw error{error_kind::kParse, fmt::format("camera file: {}", e.what())};
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw error{error_kind::kValidation,
                "camera file: expected a FeatureCollection"};
  }
  auto const features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    throw error{error_kind::kValidation, "camera file: missing 'features' array"};
  }

  auto cams = std::vector<camera>{};
  cams.reserve(features->size());
  auto ids = std::set<std::string, std::less<>>{};
  for (auto i = 0U; i < features->size(); ++i) {
    auto cam = parse_feature((*features)[i], i);
    if (!ids.insert(cam.id_).second) {
      schema_fail(i, "properties.id", fmt::format("duplicate id '{}'", cam.id_));
    }
    cams.push_back(std::move(cam));
  }
  return cams;
}

std::vector<camera> load_cameras_file(std::string const& path) {
  return parse_cameras(read_file(path));
}

std::string cameras_to_geojson(std::span<camera const> cams) {
  auto features = json::array();
  for (auto const& c : cams) {
    auto props = json{{"id", c.id_}};
    if (c.fov_.is_omni()) {
      props["fov"] = "omni";
    } else {
      props["fov"] = {{"bearing_deg", c.fov_.bearing_deg()},
                      {"angle_deg", c.fov_.angle_deg()}};
    }
    if (!c.radius_m_.empty()) {
      auto r = json::object();
      for (auto const& [task, meters] : c.radius_m_) {
        r[std::string{to_str(task)}] = meters;
      }
      props["radius_m"] = std::move(r);
    }
    if (c.optics_.has_value()) {
      props["optics"] = {{"h_res_px", c.optics_->h_res_px_},
                         {"hfov_deg", c.optics_->hfov_deg_}};
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"}, {"coordinates", {c.pos_.lon_, c.pos_.lat_}}}},
         {"properties", std::move(props)}});
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}
      .dump(2);
}

double optics_radius(optics_spec const& o, surveillance_task const task) {
  auto const half_fov = o.hfov_deg_ / 2.0 * std::numbers::pi / 180.0;
  return static_cast<double>(o.h_res_px_) /
         (2.0 * task_ppm(task) * std::tan(half_fov));
}

double coverage_radius(camera const& cam, coverage_config const& cfg) {
  if (cfg.global_radius_m_.has_value()) {
    return *cfg.global_radius_m_;
  }
  if (auto const it = cam.radius_m_.find(cfg.task_); it != end(cam.radius_m_)) {
    return it->second;
  }
  if (cam.optics_.has_value()) {
    return optics_radius(*cam.optics_, cfg.task_);
  }
  throw error{error_kind::kConfiguration,
              fmt::format("camera '{}': no radius for task {} (no override, no "
                          "optics, no global radius)",
                          cam.id_, to_str(cfg.task_))};
}

bool covers(fov_spec const& fov, local_xy const p, local_xy const cam_xy,
            double const r) {
  if (distance(p, cam_xy) > r) {
    return false;
  }
  if (fov.is_omni() || p == cam_xy) {
    return true;
  }
  return angular_difference(bearing(cam_xy, p), fov.bearing_deg()) <=
         fov.angle_deg() / 2.0;
}

bool covers(camera const& cam, local_xy const p, local_xy const cam_xy,
            double const r) {
  return covers(cam.fov_, p, cam_xy, r);
}

}  // namespace cctv
