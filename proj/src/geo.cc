#include "cctv/geo.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmt/core.h"

#include "cctv/error.h"

namespace cctv {

namespace {

constexpr auto const kDegToRad = std::numbers::pi / 180.0;
constexpr auto const kRadToDeg = 180.0 / std::numbers::pi;
constexpr auto const kTangentEpsilon = 1e-12;
constexpr auto const kParamEpsilon = 1e-12;

}  // namespace

bool is_valid(geo_point const p) {
  return std::isfinite(p.lat_) && std::isfinite(p.lon_) && p.lat_ >= -90.0 &&
         p.lat_ <= 90.0 && p.lon_ >= -180.0 && p.lon_ <= 180.0;
}

geo_point make_geo_point(double const lat, double const lon) {
  auto const p = geo_point{lat, lon};
  if (!is_valid(p)) {
    throw error{error_kind::kValidation,
                fmt::format("coordinate out of range: lat={} lon={}", lat, lon)};
  }
  return p;
}

double dot(local_xy const a, local_xy const b) {
  return a.x_ * b.x_ + a.y_ * b.y_;
}

double cross(local_xy const a, local_xy const b) {
  return a.x_ * b.y_ - a.y_ * b.x_;
}

double norm(local_xy const a) { return std::hypot(a.x_, a.y_); }

double distance(local_xy const a, local_xy const b) { return norm(b - a); }

segment::segment(local_xy const a, local_xy const b) : a_{a}, b_{b} {
  if (a == b) {
    throw error{error_kind::kInvalidGeometry,
                fmt::format("zero-length segment at ({}, {})", a.x_, a.y_)};
  }
}

local_xy project(geo_point const p, geo_point const origin) {
  auto const dlat = p.lat_ - origin.lat_;
  auto const dlon = p.lon_ - origin.lon_;
  if (!(std::abs(dlat) <= kMaxProjectionOffsetDeg &&
        std::abs(dlon) <= kMaxProjectionOffsetDeg)) {
    throw error{error_kind::kProjectionOutOfRange,
                fmt::format("({}, {}) is more than {} deg from origin ({}, {})",
                            p.lat_, p.lon_, kMaxProjectionOffsetDeg,
                            origin.lat_, origin.lon_)};
  }
  return {kEarthRadius * dlon * kDegToRad * std::cos(origin.lat_ * kDegToRad),
          kEarthRadius * dlat * kDegToRad};
}

geo_point unproject(local_xy const p, geo_point const origin) {
  return {origin.lat_ + p.y_ / kEarthRadius * kRadToDeg,
          origin.lon_ + p.x_ / (kEarthRadius * std::cos(origin.lat_ * kDegToRad)) *
                            kRadToDeg};
}

double haversine_distance(geo_point const a, geo_point const b) {
  auto const phi1 = a.lat_ * kDegToRad;
  auto const phi2 = b.lat_ * kDegToRad;
  auto const sin_dphi = std::sin((phi2 - phi1) / 2.0);
  auto const sin_dlambda = std::sin((b.lon_ - a.lon_) * kDegToRad / 2.0);
  auto const h = sin_dphi * sin_dphi +
                 std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

double point_segment_distance(local_xy const p, segment const& s) {
  auto const d = s.b() - s.a();
  auto const t = std::clamp(dot(p - s.a(), d) / dot(d, d), 0.0, 1.0);
  return distance(p, s.at(t));
}

std::vector<double> circle_segment_params(local_xy const center,
                                          double const r, segment const& s) {
  auto const len = s.length();
  auto const u = (s.b() - s.a()) * (1.0 / len);
  auto const rel = center - s.a();
  auto const along = dot(rel, u);
  auto const off = cross(u, rel);
  auto const rem = r * r - off * off;
  if (rem <= kTangentEpsilon) {
    return {};
  }

  auto const half = std::sqrt(rem);
  auto out = std::vector<double>{};
  for (auto const t : {(along - half) / len, (along + half) / len}) {
    if (t >= -kParamEpsilon && t <= 1.0 + kParamEpsilon) {
      out.push_back(std::clamp(t, 0.0, 1.0));
    }
  }
  return out;
}

std::vector<local_xy> circle_segment_intersections(local_xy const center,
                                                   double const r,
                                                   segment const& s) {
  auto out = std::vector<local_xy>{};
  for (auto const t : circle_segment_params(center, r, s)) {
    out.push_back(s.at(t));
  }
  return out;
}

double segment_crossing_param(segment const& s, local_xy const from,
                              local_xy const to) {
  auto const d = s.b() - s.a();
  auto const e = to - from;
  auto const denom = cross(d, e);
  if (std::abs(denom) < 1e-12 * norm(d) * norm(e)) {
    return -1.0;
  }
  auto const w = from - s.a();
  auto const t = cross(w, e) / denom;
  auto const u = cross(w, d) / denom;
  if (t < -kParamEpsilon || t > 1.0 + kParamEpsilon || u < -kParamEpsilon ||
      u > 1.0 + kParamEpsilon) {
    return -1.0;
  }
  return std::clamp(t, 0.0, 1.0);
}

double bearing(local_xy const a, local_xy const b) {
  if (a == b) {
    throw error{error_kind::kUndefinedBearing,
                fmt::format("bearing between identical points ({}, {})", a.x_,
                            a.y_)};
  }
  auto const deg = std::atan2(b.x_ - a.x_, b.y_ - a.y_) * kRadToDeg;
  auto const normalized = deg < 0.0 ? deg + 360.0 : deg;
  return normalized >= 360.0 ? 0.0 : normalized;
}

double angular_difference(double const a_deg, double const b_deg) {
  auto const d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace cctv
