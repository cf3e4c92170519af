#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cctv/camera.h"
#include "cctv/geo.h"
#include "cctv/osm.h"

namespace cctv::synth {

// Jyvaskyla downtown, the area spanned by the evaluated routes.
constexpr auto const kDowntownMin = geo_point{62.230, 25.735};
constexpr auto const kDowntownMax = geo_point{62.248, 25.760};
constexpr auto const kDowntownCenter = geo_point{62.239, 25.7475};

struct fixture {
  geo_point to_geo(local_xy) const;

  ped_network net_;
  std::vector<camera> cameras_;
  geo_point anchor_;
  local_xy shift_;  // added to builder coordinates before unprojecting
};

// Collects nodes, ways and cameras in a local frame. build() shifts
// everything so the node bounding-box center lands on `anchor`, which makes
// the network's projection origin coincide with the builder frame.
class fixture_builder {
public:
  explicit fixture_builder(geo_point anchor = kDowntownCenter);

  osm_id node(local_xy);
  void way(std::vector<osm_id> refs, std::string highway = "footway");
  void omni_camera(local_xy);
  void camera(cctv::camera c, local_xy);

  fixture build() const;

private:
  geo_point anchor_;
  std::vector<std::pair<osm_id, local_xy>> nodes_;
  std::vector<osm_way> ways_;
  std::vector<std::pair<cctv::camera, local_xy>> cameras_;
};

// Direct street A(0,0) -> B(200,0) fully covered by ten omni cameras of
// radius 10 m; clear 400 m detour A -> (-37.5,50) -> (237.5,50) -> B.
struct two_route {
  fixture fx_;
  geo_point a_, b_;
};
two_route two_route_fixture();

// Clear 200 m direct street plus a 300 m southern loop that is mostly
// covered: the safety route is longer than the privacy route.
two_route safety_longer_fixture();

// Destination at the hub of four 200 m spokes joined by an outer square.
// One omni camera sits on each spoke `camera_offset` meters from the hub, so
// a privacy route from the outer corner ends camera_offset + r from the hub.
struct ring {
  fixture fx_;
  geo_point origin_, destination_;
};
ring ring_fixture(double camera_offset);

struct grid_params {
  int cols_{5};
  int rows_{5};
  double spacing_m_{40.0};
  double jitter_m_{5.0};
  double drop_edge_probability_{0.1};
  int cameras_{10};
  double sector_probability_{0.25};
};

// Jittered grid with random dropped edges and cameras. `grid_nodes_` holds
// the geo position of every grid vertex (row major).
struct grid_instance {
  fixture fx_;
  std::vector<geo_point> grid_nodes_;
};
grid_instance random_grid(std::mt19937_64&, grid_params const&);

struct city_params {
  geo_point min_{kDowntownMin};
  geo_point max_{kDowntownMax};
  double block_m_{45.0};
  int nodes_per_block_{5};
  double jitter_m_{2.0};
  double drop_block_probability_{0.06};
  double diagonal_probability_{0.05};
};

// Street grid covering the bounding box, with a few non-pedestrian and
// foot=no ways mixed in.
ped_network city(std::uint64_t seed, city_params const& = {});

// Omni cameras a few meters off randomly chosen way segments.
std::vector<cctv::camera> street_cameras(ped_network const&, std::size_t count,
                                         std::uint64_t seed);

}  // namespace cctv::synth
