#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cctv/coverage_graph.h"
#include "cctv/geo.h"

namespace cctv {

enum class route_status : std::uint8_t { kComplete, kTruncated, kNoRoute };

std::string_view to_str(route_status);

constexpr auto const kDefaultCompleteGap = 25.0;
constexpr auto const kDefaultSnapGapMax = 100.0;

// The coverage configuration is the one the graph was built with.
struct route_request {
  geo_point origin_;
  geo_point destination_;
  std::vector<geo_point> via_;
  route_mode mode_{route_mode::kBaseline};
  double beta_{kDefaultSafetyBeta};
  double complete_gap_m_{kDefaultCompleteGap};
  double snap_gap_max_m_{kDefaultSnapGapMax};
  bool with_baseline_overhead_{true};
};

// Throws kValidation for non-positive thresholds, beta outside (0, 1) or
// invalid coordinates.
void validate(route_request const&);

struct snap_result {
  node_idx_t node_{};
  double gap_m_{};
};

// Nearest node; in privacy mode only nodes with a clear incident edge.
std::optional<snap_result> snap(geo_point, coverage_graph const&, route_mode);

struct path {
  std::vector<node_idx_t> nodes_;
  std::vector<edge_idx_t> edges_;
  double weight_{};
};

// Label-setting search over edge_weight; queue ordered by (weight, node id).
std::optional<path> shortest_path(coverage_graph const&, node_idx_t from,
                                  node_idx_t to, route_mode,
                                  double beta = kDefaultSafetyBeta);

double path_length(coverage_graph const&, std::vector<edge_idx_t> const&);
double exposure(coverage_graph const&, std::vector<edge_idx_t> const&);

struct route_result {
  route_status status_{route_status::kNoRoute};
  std::vector<geo_point> polyline_;
  std::vector<node_idx_t> nodes_;
  std::vector<edge_idx_t> edges_;
  double length_m_{};
  double exposure_m_{};
  double gap_origin_m_{};
  double gap_destination_m_{};
  double gap_via_max_m_{};
  std::optional<geo_point> achieved_origin_;
  std::optional<geo_point> achieved_destination_;
  std::optional<double> overhead_vs_baseline_;
};

// Legs are routed one after another through the via points. When a leg
// target cannot be reached the leg ends at the reachable node nearest to it
// and the residual distance becomes a gap. Status: every gap within
// complete_gap_m -> complete, within snap_gap_max_m -> truncated, else
// no_route (empty polyline, zero length).
route_result route(route_request const&, coverage_graph const&);

}  // namespace cctv
