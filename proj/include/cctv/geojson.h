#pragma once

#include <span>
#include <string>

#include "json.hpp"

#include "cctv/coverage_graph.h"
#include "cctv/geo.h"
#include "cctv/route.h"

namespace cctv {

// Coordinates are written lon, lat.
nlohmann::json to_geojson_point(geo_point);
nlohmann::json to_geojson_line(std::span<geo_point const>);

// Accepts {"lat": .., "lon": ..} or a GeoJSON Point geometry.
// Throws kValidation naming `field`.
geo_point geo_point_from_json(nlohmann::json const&, std::string const& field);

// LineString feature with status, lengths, gaps and overhead as properties.
nlohmann::json route_feature(route_result const&);

// One LineString feature per edge with `covered`, `length_m`, `cameras`.
std::string graph_to_geojson(coverage_graph const&);

}  // namespace cctv
