#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cctv/geo.h"

namespace cctv {

// Surveillance tasks ordered by required image detail (EN 62676-4).
enum class surveillance_task : std::uint8_t {
  kIdentification,
  kRecognition,
  kObservation,
  kDetection,
  kMonitoring
};

constexpr auto const kAllTasks = std::array{
    surveillance_task::kIdentification, surveillance_task::kRecognition,
    surveillance_task::kObservation, surveillance_task::kDetection,
    surveillance_task::kMonitoring};

// Minimum pixels per meter for the task: 250 / 125 / 62 / 25 / 12.
int task_ppm(surveillance_task);

std::string_view to_str(surveillance_task);
std::optional<surveillance_task> parse_task(std::string_view);

class fov_spec {
public:
  enum class kind : std::uint8_t { kOmni, kSector };

  static fov_spec omni() { return fov_spec{}; }

  // bearing normalized into [0, 360); angle must lie in (0, 360).
  static fov_spec sector(double bearing_deg, double angle_deg);

  kind type() const { return kind_; }
  bool is_omni() const { return kind_ == kind::kOmni; }
  double bearing_deg() const { return bearing_deg_; }
  double angle_deg() const { return angle_deg_; }

  friend bool operator==(fov_spec const&, fov_spec const&) = default;

private:
  kind kind_{kind::kOmni};
  double bearing_deg_{0.0};
  double angle_deg_{360.0};
};

struct optics_spec {
  friend bool operator==(optics_spec const&, optics_spec const&) = default;

  int h_res_px_{};
  double hfov_deg_{};
};

struct camera {
  friend bool operator==(camera const&, camera const&) = default;

  std::string id_;
  geo_point pos_;
  fov_spec fov_;
  std::map<surveillance_task, double> radius_m_;
  std::optional<optics_spec> optics_;
};

struct coverage_config {
  static constexpr auto const kMaxGlobalRadius = 500.0;

  friend bool operator==(coverage_config const&, coverage_config const&) = default;

  surveillance_task task_{surveillance_task::kRecognition};

  // Overrides every per-camera source when set, in (0, 500].
  std::optional<double> global_radius_m_;
};

coverage_config make_coverage_config(surveillance_task,
                                     std::optional<double> global_radius_m);

// Camera interchange file: GeoJSON FeatureCollection of Point features.
std::vector<camera> parse_cameras(std::string_view json);
std::vector<camera> load_cameras_file(std::string const& path);
std::string cameras_to_geojson(std::span<camera const>);

// Pinhole relation: h_res / (2 * ppm * tan(hfov / 2)).
double optics_radius(optics_spec const&, surveillance_task);

// Precedence: global radius, per-task override, optics. Throws
// kConfiguration naming the camera when none applies.
double coverage_radius(camera const&, coverage_config const&);

// Inside the closed disc of radius r and (for sectors) within half the
// opening angle of the camera bearing, boundary inclusive.
bool covers(camera const&, local_xy p, local_xy cam_xy, double r);
bool covers(fov_spec const&, local_xy p, local_xy cam_xy, double r);

}  // namespace cctv
