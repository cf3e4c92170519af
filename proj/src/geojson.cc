#include "cctv/geojson.h"

#include <array>
#include <cmath>

#include "fmt/core.h"

#include "cctv/error.h"

namespace cctv {

namespace {

using json = nlohmann::json;

json finite_or_null(double const v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_geojson_point(geo_point const p) {
  return {{"type", "Point"}, {"coordinates", {p.lon_, p.lat_}}};
}

json to_geojson_line(std::span<geo_point const> pts) {
  auto coords = json::array();
  for (auto const& p : pts) {
    coords.push_back({p.lon_, p.lat_});
  }
  return {{"type", "LineString"}, {"coordinates", std::move(coords)}};
}

geo_point geo_point_from_json(json const& j, std::string const& field) {
  auto const fail = [&](std::string_view what) -> geo_point {
    throw error{error_kind::kValidation, fmt::format("{}: {}", field, what)};
  };
  if (!j.is_object()) {
    return fail("expected {\"lat\", \"lon\"} or a Point geometry");
  }
  auto lat = json{};
  auto lon = json{};
  if (j.contains("coordinates")) {
    auto const& c = j["coordinates"];
    if (j.value("type", "") != "Point" || !c.is_array() || c.size() < 2U) {
      return fail("expected a Point geometry with [lon, lat]");
    }
    lon = c[0];
    lat = c[1];
  } else {
    lat = j.value("lat", json{});
    lon = j.value("lon", json{});
  }
  if (!lat.is_number() || !lon.is_number()) {
    return fail("lat/lon missing or not numbers");
  }
  auto const p = geo_point{lat.get<double>(), lon.get<double>()};
  if (!is_valid(p)) {
    return fail("coordinate out of range");
  }
  return p;
}

json route_feature(route_result const& r) {
  auto props = json{{"status", to_str(r.status_)},
                    {"length_m", r.length_m_},
                    {"exposure_m", r.exposure_m_},
                    {"gap_origin_m", finite_or_null(r.gap_origin_m_)},
                    {"gap_destination_m", finite_or_null(r.gap_destination_m_)},
                    {"gap_via_max_m", finite_or_null(r.gap_via_max_m_)}};
  props["overhead_vs_baseline"] = r.overhead_vs_baseline_.has_value()
                                      ? json(*r.overhead_vs_baseline_)
                                      : json(nullptr);
  if (r.achieved_destination_.has_value()) {
    props["achieved_destination"] = to_geojson_point(*r.achieved_destination_);
  }
  return {{"type", "Feature"},
          {"geometry", to_geojson_line(r.polyline_)},
          {"properties", std::move(props)}};
}

std::string graph_to_geojson(coverage_graph const& g) {
  auto features = json::array();
  for (auto i = 0U; i < g.edges().size(); ++i) {
    auto const& e = g.edges()[i];
    auto const pts = std::array{g.geo(e.a_), g.geo(e.b_)};
    features.push_back({{"type", "Feature"},
                        {"geometry", to_geojson_line(pts)},
                        {"properties",
                         {{"edge", i},
                          {"a", e.a_},
                          {"b", e.b_},
                          {"covered", e.covered_},
                          {"length_m", e.length_m_},
                          {"cameras", g.covering_camera_ids(e)}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}
      .dump();
}

}  // namespace cctv
