#include "cctv/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fmt/core.h"

namespace cctv::synth {

namespace {

double uniform(std::mt19937_64& rng, double const lo, double const hi) {
  return std::uniform_real_distribution<double>{lo, hi}(rng);
}

bool chance(std::mt19937_64& rng, double const p) { return uniform(rng, 0.0, 1.0) < p; }

}  // namespace

geo_point fixture::to_geo(local_xy const p) const { return unproject(p + shift_, anchor_); }

fixture_builder::fixture_builder(geo_point const anchor) : anchor_{anchor} {}

osm_id fixture_builder::node(local_xy const p) {
  auto const id = static_cast<osm_id>(nodes_.size() + 1U);
  nodes_.emplace_back(id, p);
  return id;
}

void fixture_builder::way(std::vector<osm_id> refs, std::string highway) {
  auto w = osm_way{};
  w.id_ = static_cast<osm_id>(ways_.size() + 1U);
  w.node_refs_ = std::move(refs);
  w.tags_.emplace("highway", std::move(highway));
  ways_.push_back(std::move(w));
}

void fixture_builder::omni_camera(local_xy const p) {
  auto c = cctv::camera{};
  c.id_ = fmt::format("cam-{}", cameras_.size() + 1U);
  c.fov_ = fov_spec::omni();
  cameras_.emplace_back(std::move(c), p);
}

void fixture_builder::camera(cctv::camera c, local_xy const p) {
  if (c.id_.empty()) {
    c.id_ = fmt::format("cam-{}", cameras_.size() + 1U);
  }
  cameras_.emplace_back(std::move(c), p);
}

fixture fixture_builder::build() const {
  auto min = local_xy{std::numeric_limits<double>::max(),
                      std::numeric_limits<double>::max()};
  auto max = local_xy{std::numeric_limits<double>::lowest(),
                      std::numeric_limits<double>::lowest()};
  for (auto const& [_, p] : nodes_) {
    min = {std::min(min.x_, p.x_), std::min(min.y_, p.y_)};
    max = {std::max(max.x_, p.x_), std::max(max.y_, p.y_)};
  }

  auto const shift = local_xy{-(min.x_ + max.x_) / 2.0, -(min.y_ + max.y_) / 2.0};
  auto const to_geo = [&](local_xy const p) { return unproject(p + shift, anchor_); };

  auto nodes = std::vector<osm_node>{};
  for (auto const& [id, p] : nodes_) {
    nodes.push_back({id, to_geo(p)});
  }
  auto cams = std::vector<cctv::camera>{};
  for (auto const& [c, p] : cameras_) {
    auto placed = c;
    placed.pos_ = to_geo(p);
    cams.push_back(std::move(placed));
  }
  auto fx = fixture{ped_network::from_elements(std::move(nodes), ways_),
                    std::move(cams), anchor_, shift};
  return fx;
}

two_route two_route_fixture() {
  auto b = fixture_builder{};
  auto const a = b.node({0.0, 0.0});
  auto const bb = b.node({200.0, 0.0});
  auto const c = b.node({-37.5, 50.0});
  auto const d = b.node({237.5, 50.0});
  b.way({a, bb}, "residential");
  b.way({a, c, d, bb}, "footway");
  for (auto x = 10.0; x < 200.0; x += 20.0) {
    b.omni_camera({x, 0.0});
  }
  auto fx = b.build();
  auto const ga = fx.to_geo({0.0, 0.0});
  auto const gb = fx.to_geo({200.0, 0.0});
  return {std::move(fx), ga, gb};
}

two_route safety_longer_fixture() {
  auto b = fixture_builder{};
  auto const a = b.node({0.0, 0.0});
  auto const bb = b.node({200.0, 0.0});
  auto const s1 = b.node({0.0, -50.0});
  auto const s2 = b.node({200.0, -50.0});
  b.way({a, bb}, "residential");
  b.way({a, s1, s2, bb}, "footway");
  for (auto x = 10.0; x < 200.0; x += 20.0) {
    b.omni_camera({x, -50.0});
  }
  for (auto const x : {0.0, 200.0}) {
    b.omni_camera({x, -22.0});
    b.omni_camera({x, -40.0});
  }
  auto fx = b.build();
  auto const ga = fx.to_geo({0.0, 0.0});
  auto const gb = fx.to_geo({200.0, 0.0});
  return {std::move(fx), ga, gb};
}

ring ring_fixture(double const camera_offset) {
  auto b = fixture_builder{};
  auto const hub = b.node({0.0, 0.0});
  auto const n = b.node({0.0, 200.0});
  auto const e = b.node({200.0, 0.0});
  auto const s = b.node({0.0, -200.0});
  auto const w = b.node({-200.0, 0.0});
  auto const ne = b.node({200.0, 200.0});
  auto const se = b.node({200.0, -200.0});
  auto const sw = b.node({-200.0, -200.0});
  auto const nw = b.node({-200.0, 200.0});
  for (auto const spoke : {n, e, s, w}) {
    b.way({hub, spoke}, "footway");
  }
  b.way({sw, s, se, e, ne, n, nw, w, sw}, "residential");
  b.omni_camera({0.0, camera_offset});
  b.omni_camera({camera_offset, 0.0});
  b.omni_camera({0.0, -camera_offset});
  b.omni_camera({-camera_offset, 0.0});
  auto fx = b.build();
  auto const o = fx.to_geo({-200.0, -200.0});
  auto const d = fx.to_geo({0.0, 0.0});
  return {std::move(fx), o, d};
}

grid_instance random_grid(std::mt19937_64& rng, grid_params const& p) {
  auto b = fixture_builder{};
  auto ids = std::vector<osm_id>{};
  auto pos = std::vector<local_xy>{};
  for (auto r = 0; r < p.rows_; ++r) {
    for (auto c = 0; c < p.cols_; ++c) {
      auto const xy = local_xy{c * p.spacing_m_ + uniform(rng, -p.jitter_m_, p.jitter_m_),
                               r * p.spacing_m_ + uniform(rng, -p.jitter_m_, p.jitter_m_)};
      ids.push_back(b.node(xy));
      pos.push_back(xy);
    }
  }
  auto const at = [&](int const r, int const c) {
    return static_cast<std::size_t>(r * p.cols_ + c);
  };
  for (auto r = 0; r < p.rows_; ++r) {
    for (auto c = 0; c < p.cols_; ++c) {
      if (c + 1 < p.cols_ && !chance(rng, p.drop_edge_probability_)) {
        b.way({ids[at(r, c)], ids[at(r, c + 1)]});
      }
      if (r + 1 < p.rows_ && !chance(rng, p.drop_edge_probability_)) {
        b.way({ids[at(r, c)], ids[at(r + 1, c)]});
      }
    }
  }

  auto const extent_x = (p.cols_ - 1) * p.spacing_m_;
  auto const extent_y = (p.rows_ - 1) * p.spacing_m_;
  for (auto i = 0; i < p.cameras_; ++i) {
    auto const xy = local_xy{uniform(rng, -10.0, extent_x + 10.0),
                             uniform(rng, -10.0, extent_y + 10.0)};
    auto cam = cctv::camera{};
    cam.fov_ = chance(rng, p.sector_probability_)
                   ? fov_spec::sector(uniform(rng, 0.0, 360.0), uniform(rng, 30.0, 270.0))
                   : fov_spec::omni();
    b.camera(std::move(cam), xy);
  }

  auto inst = grid_instance{b.build(), {}};
  for (auto const& xy : pos) {
    inst.grid_nodes_.push_back(inst.fx_.to_geo(xy));
  }
  return inst;
}

ped_network city(std::uint64_t const seed, city_params const& p) {
  auto rng = std::mt19937_64{seed};
  auto const center = geo_point{(p.min_.lat_ + p.max_.lat_) / 2.0,
                                (p.min_.lon_ + p.max_.lon_) / 2.0};
  auto const lo = project(p.min_, center);
  auto const hi = project(p.max_, center);
  auto const cols = static_cast<int>((hi.x_ - lo.x_) / p.block_m_) + 1;
  auto const rows = static_cast<int>((hi.y_ - lo.y_) / p.block_m_) + 1;

  auto nodes = std::vector<osm_node>{};
  auto ways = std::vector<osm_way>{};
  auto next_node = osm_id{1000000};
  auto next_way = osm_id{5000000};
  auto const add_node = [&](local_xy const xy) {
    nodes.push_back({next_node, unproject(xy, center)});
    return next_node++;
  };

  auto corner = std::vector<osm_id>{};
  auto corner_xy = std::vector<local_xy>{};
  for (auto r = 0; r < rows; ++r) {
    for (auto c = 0; c < cols; ++c) {
      auto const xy = local_xy{lo.x_ + c * p.block_m_ + uniform(rng, -p.jitter_m_, p.jitter_m_),
                               lo.y_ + r * p.block_m_ + uniform(rng, -p.jitter_m_, p.jitter_m_)};
      corner.push_back(add_node(xy));
      corner_xy.push_back(xy);
    }
  }

  auto const pick_highway = [&]() -> std::pair<std::string, bool> {
    auto const roll = uniform(rng, 0.0, 1.0);
    auto const foot_no = chance(rng, 0.02);
    if (roll < 0.40) return {"residential", foot_no};
    if (roll < 0.65) return {"footway", false};
    if (roll < 0.75) return {"service", foot_no};
    if (roll < 0.85) return {"tertiary", foot_no};
    if (roll < 0.90) return {"pedestrian", false};
    if (roll < 0.93) return {"living_street", false};
    if (roll < 0.96) return {"unclassified", foot_no};
    if (roll < 0.97) return {"steps", false};
    return {"motorway", false};
  };

  auto const add_block = [&](std::size_t const from, std::size_t const to) {
    if (chance(rng, p.drop_block_probability_)) {
      return;
    }
    auto w = osm_way{};
    w.id_ = next_way++;
    auto const a = corner_xy[from];
    auto const b = corner_xy[to];
    auto const d = b - a;
    auto const normal = local_xy{-d.y_, d.x_} * (1.0 / norm(d));
    w.node_refs_.push_back(corner[from]);
    for (auto k = 1; k < p.nodes_per_block_; ++k) {
      auto const t = static_cast<double>(k) / p.nodes_per_block_;
      w.node_refs_.push_back(
          add_node(a + d * t + normal * uniform(rng, -p.jitter_m_, p.jitter_m_)));
    }
    w.node_refs_.push_back(corner[to]);
    auto const [highway, foot_no] = pick_highway();
    w.tags_.emplace("highway", highway);
    if (foot_no) {
      w.tags_.emplace("foot", "no");
    }
    ways.push_back(std::move(w));
  };

  auto const at = [&](int const r, int const c) {
    return static_cast<std::size_t>(r * cols + c);
  };
  for (auto r = 0; r < rows; ++r) {
    for (auto c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        add_block(at(r, c), at(r, c + 1));
      }
      if (r + 1 < rows) {
        add_block(at(r, c), at(r + 1, c));
      }
      if (r + 1 < rows && c + 1 < cols && chance(rng, p.diagonal_probability_)) {
        add_block(at(r, c), at(r + 1, c + 1));
      }
    }
  }
  return ped_network::from_elements(std::move(nodes), std::move(ways));
}

std::vector<cctv::camera> street_cameras(ped_network const& net,
                                         std::size_t const count,
                                         std::uint64_t const seed) {
  auto rng = std::mt19937_64{seed};
  auto const& ways = net.ways();
  auto cams = std::vector<cctv::camera>{};
  cams.reserve(count);
  auto pick = std::uniform_int_distribution<std::size_t>{0U, ways.size() - 1U};
  for (auto i = 0U; i < count; ++i) {
    auto const& w = ways[pick(rng)];
    auto const seg = std::uniform_int_distribution<std::size_t>{
        1U, w.node_refs_.size() - 1U}(rng);
    auto const a = project(net.pos(w.node_refs_[seg - 1U]), net.origin());
    auto const b = project(net.pos(w.node_refs_[seg]), net.origin());
    auto const d = b - a;
    auto const len = norm(d);
    auto const normal = len > 0.0 ? local_xy{-d.y_, d.x_} * (1.0 / len) : local_xy{};
    auto const side = chance(rng, 0.5) ? 1.0 : -1.0;
    auto const xy = a + d * uniform(rng, 0.0, 1.0) + normal * (side * uniform(rng, 2.0, 8.0));

    auto c = cctv::camera{};
    c.id_ = fmt::format("cam-{:04}", i + 1U);
    c.pos_ = unproject(xy, net.origin());
    c.fov_ = fov_spec::omni();
    cams.push_back(std::move(c));
  }
  return cams;
}

}  // namespace cctv::synth
