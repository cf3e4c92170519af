#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cctv/camera.h"
#include "cctv/coverage_graph.h"
#include "cctv/osm.h"
#include "cctv/route.h"

namespace cctv {

struct od_pair {
  std::string name_;
  geo_point origin_;
  geo_point destination_;
  std::vector<geo_point> via_;
};

struct mode_spec {
  friend bool operator==(mode_spec const&, mode_spec const&) = default;

  std::string label() const;  // e.g. "Privacy [15m]"

  route_mode mode_{};
  double radius_m_{};
};

struct experiment_spec {
  // Safety 10 m, Privacy 10 m, Privacy 15 m, Privacy 25 m.
  static std::vector<mode_spec> default_modes();

  std::vector<od_pair> pairs_;
  std::vector<mode_spec> modes_;
};

// JSON: {"pairs": [{"name", "origin": {"lat","lon"}, "destination", "via": [...]}],
//        "modes": [{"mode": "safety", "radius_m": 10}, ...]}.
// Missing "modes" selects the defaults. Throws kValidation on schema errors,
// duplicate pair names or an empty pair list.
experiment_spec parse_experiment_spec(std::string_view json);

double round_half_up(double v, int decimals);

// len / ref rounded half-up to one decimal. Throws kValidation if ref <= 0.
double overhead_factor(double len_m, double ref_len_m);

// Below 1 km: nearest 10 m ("860m"). Otherwise km at 0.01 km granularity
// with trailing zeros dropped ("1.28km", "4.3km").
std::string format_distance(double meters);
std::string format_factor(double factor);  // "1.4x"

struct cell_result {
  route_status status_{route_status::kNoRoute};
  double length_m_{};
  double exposure_m_{};
  double gap_origin_m_{};
  double gap_destination_m_{};
  std::optional<double> overhead_;  // vs the reference mode of the same pair
  std::optional<double> overhead_vs_baseline_;
  std::vector<geo_point> polyline_;
};

struct summary_row {
  od_pair pair_;
  std::vector<cell_result> cells_;  // one per mode, same order as the spec
};

struct mode_average {
  std::optional<double> mean_length_m_;  // unrounded
  std::optional<double> factor_;         // vs the reference mode average
  std::size_t included_{};
  std::size_t excluded_no_route_{};
};

struct summary_table {
  std::vector<mode_spec> modes_;
  std::vector<summary_row> rows_;
  std::vector<mode_average> averages_;
  std::optional<std::size_t> reference_mode_;
};

// First safety mode, or nullopt when the list has none.
std::optional<std::size_t> reference_mode(std::span<mode_spec const>);

// No-route cells are excluded from a mode's mean; truncated cells count.
// The factor divides the mode mean by the reference mean taken over every
// routable reference cell, rounded to one decimal.
std::vector<mode_average> summarize(std::span<summary_row const>,
                                    std::size_t mode_count,
                                    std::optional<std::size_t> reference);

struct run_options {
  surveillance_task task_{surveillance_task::kRecognition};
  double beta_{kDefaultSafetyBeta};
  double complete_gap_m_{kDefaultCompleteGap};
  double snap_gap_max_m_{kDefaultSnapGapMax};
};

// Builds one graph per distinct radius and routes every pair in every mode.
// Graph build failures are rethrown naming the offending mode.
summary_table run_matrix(experiment_spec const&, ped_network const&,
                         std::span<camera const>, run_options const& = {});

std::string report_json(summary_table const&);
std::string report_text(summary_table const&);

// report.json, report.txt and routes/<pair>__<mode>_<radius>m.geojson.
void write_report(summary_table const&, std::filesystem::path const& out_dir);

std::string cell_file_name(od_pair const&, mode_spec const&);

}  // namespace cctv
