#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cctv/camera.h"
#include "cctv/geo.h"
#include "cctv/osm.h"

namespace cctv {

using node_idx_t = std::uint32_t;
using edge_idx_t = std::uint32_t;
using camera_idx_t = std::uint32_t;

enum class route_mode : std::uint8_t { kPrivacy, kSafety, kBaseline };

std::string_view to_str(route_mode);
std::optional<route_mode> parse_mode(std::string_view);

constexpr auto const kDefaultSafetyBeta = 0.5;

// Camera projected into the graph's local frame with its resolved radius.
struct placed_camera {
  camera_idx_t idx_{};
  local_xy pos_;
  fov_spec fov_;
  double radius_{};
};

struct sub_segment {
  local_xy a_, b_;
  double t0_{}, t1_{};
  bool covered_{};
  std::vector<camera_idx_t> cameras_;
};

// Cuts `s` wherever a coverage boundary crosses it: circle intersections
// for every camera plus the two bounding radii of sector cameras. Cuts
// closer than 1e-6 m to each other or to an endpoint are merged. Each piece
// is classified by the cameras covering its midpoint.
std::vector<sub_segment> split_edge(segment const& s,
                                    std::span<placed_camera const> cameras);

struct graph_node {
  node_idx_t id_{};
  local_xy pos_;
  std::optional<osm_id> osm_id_;
};

struct graph_edge {
  node_idx_t a_{}, b_{};
  double length_m_{};
  bool covered_{};
  std::vector<camera_idx_t> cameras_;
};

struct adjacent {
  node_idx_t node_{};
  edge_idx_t edge_{};
};

// nullopt = forbidden. beta discounts covered edges in safety mode.
std::optional<double> edge_weight(graph_edge const&, route_mode,
                                  double beta = kDefaultSafetyBeta);

class coverage_graph {
public:
  // Projects network and cameras around the network origin, splits every
  // way segment with split_edge and merges shared OSM nodes. Cameras too far
  // from the origin to be projected cannot touch the network and are left
  // out. Throws kConfiguration when a camera has no derivable radius.
  static coverage_graph build(ped_network const&, std::span<camera const>,
                              coverage_config const&);

  coverage_graph(coverage_graph&&) noexcept;
  coverage_graph& operator=(coverage_graph&&) noexcept;
  ~coverage_graph();

  std::vector<graph_node> const& nodes() const { return nodes_; }
  std::vector<graph_edge> const& edges() const { return edges_; }
  std::span<adjacent const> neighbors(node_idx_t) const;

  geo_point origin() const { return origin_; }
  coverage_config const& config() const { return cfg_; }
  std::vector<camera> const& cameras() const { return cameras_; }
  std::vector<placed_camera> const& placed_cameras() const { return placed_; }
  std::size_t ignored_cameras() const { return ignored_cameras_; }

  geo_point geo(node_idx_t) const;
  std::vector<std::string> covering_camera_ids(graph_edge const&) const;

  // True when at least one incident edge is clear.
  bool has_clear_edge(node_idx_t) const;

  // Nearest node by planar distance; ties go to the smaller id.
  std::optional<node_idx_t> nearest_node(local_xy, bool clear_only) const;

  double total_length() const;
  double covered_length() const;

private:
  struct spatial_index;

  coverage_graph();

  geo_point origin_;
  coverage_config cfg_;
  std::vector<camera> cameras_;
  std::vector<placed_camera> placed_;
  std::size_t ignored_cameras_{0U};
  std::vector<graph_node> nodes_;
  std::vector<graph_edge> edges_;
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<adjacent> adj_;
  std::vector<bool> clear_incident_;
  std::unique_ptr<spatial_index> index_;
};

}  // namespace cctv
