#pragma once

#include <vector>

namespace cctv {

constexpr auto const kEarthRadius = 6'371'000.0;

// Maximum latitude / longitude offset from the projection origin.
constexpr auto const kMaxProjectionOffsetDeg = 0.5;

struct geo_point {
  friend bool operator==(geo_point const&, geo_point const&) = default;

  double lat_{};
  double lon_{};
};

// Throws error_kind::kValidation when outside WGS84 bounds or not finite.
geo_point make_geo_point(double lat, double lon);
bool is_valid(geo_point);

// Meters east / north of a projection origin.
struct local_xy {
  friend bool operator==(local_xy const&, local_xy const&) = default;

  local_xy operator+(local_xy const o) const { return {x_ + o.x_, y_ + o.y_}; }
  local_xy operator-(local_xy const o) const { return {x_ - o.x_, y_ - o.y_}; }
  local_xy operator*(double const s) const { return {x_ * s, y_ * s}; }

  double x_{};
  double y_{};
};

double dot(local_xy, local_xy);
double cross(local_xy, local_xy);
double norm(local_xy);
double distance(local_xy, local_xy);

// Straight piece of a polyline. Construction rejects a == b.
class segment {
public:
  segment(local_xy a, local_xy b);

  local_xy a() const { return a_; }
  local_xy b() const { return b_; }
  double length() const { return norm(b_ - a_); }
  local_xy at(double t) const { return a_ + (b_ - a_) * t; }

private:
  local_xy a_, b_;
};

// Equirectangular projection around `origin`:
//   x = R * dlon * cos(origin.lat), y = R * dlat   (radians)
local_xy project(geo_point p, geo_point origin);
geo_point unproject(local_xy p, geo_point origin);

double haversine_distance(geo_point a, geo_point b);

double point_segment_distance(local_xy p, segment const& s);

// Segment parameters t in [0, 1] at which |s.at(t) - center| == r, ascending.
// Grazing contact (squared half-chord <= 1e-12) yields no intersection.
std::vector<double> circle_segment_params(local_xy center, double r,
                                          segment const& s);

std::vector<local_xy> circle_segment_intersections(local_xy center, double r,
                                                   segment const& s);

// Parameter t in [0, 1] where s crosses the ray piece from `from` to `to`,
// or a negative value when they do not cross (parallel counts as no cross).
double segment_crossing_param(segment const& s, local_xy from, local_xy to);

// Compass bearing in [0, 360): 0 = north, 90 = east.
double bearing(local_xy a, local_xy b);

// Smallest absolute difference between two bearings, in [0, 180].
double angular_difference(double a_deg, double b_deg);

}  // namespace cctv
