#include "cctv/coverage_graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>
#include <utility>

#include "boost/geometry.hpp"
#include "boost/geometry/index/rtree.hpp"

#include "cctv/error.h"

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace cctv {

namespace {

using bg_point = bg::model::point<double, 2, bg::cs::cartesian>;
using bg_box = bg::model::box<bg_point>;
using point_value = std::pair<bg_point, node_idx_t>;
using box_value = std::pair<bg_box, std::size_t>;
using point_tree = bgi::rtree<point_value, bgi::rstar<16>>;
using box_tree = bgi::rtree<box_value, bgi::rstar<16>>;

constexpr auto const kCutMergeDistance = 1e-6;

bg_point to_bg(local_xy const p) { return {p.x_, p.y_}; }

local_xy ray_end(local_xy const from, double const bearing_deg, double const r) {
  auto const rad = bearing_deg * std::numbers::pi / 180.0;
  return {from.x_ + r * std::sin(rad), from.y_ + r * std::cos(rad)};
}

}  // namespace

struct coverage_graph::spatial_index {
  point_tree all_;
  point_tree clear_;
};

std::string_view to_str(route_mode const m) {
  switch (m) {
    case route_mode::kPrivacy: return "privacy";
    case route_mode::kSafety: return "safety";
    case route_mode::kBaseline: return "baseline";
  }
  return "";
}

std::optional<route_mode> parse_mode(std::string_view const s) {
  for (auto const m :
       {route_mode::kPrivacy, route_mode::kSafety, route_mode::kBaseline}) {
    if (to_str(m) == s) {
      return m;
    }
  }
  return std::nullopt;
}

std::vector<sub_segment> split_edge(segment const& s,
                                    std::span<placed_camera const> cameras) {
  auto cuts = std::vector<double>{};
  for (auto const& c : cameras) {
    auto const params = circle_segment_params(c.pos_, c.radius_, s);
    cuts.insert(end(cuts), begin(params), end(params));
    if (!c.fov_.is_omni()) {
      auto const half = c.fov_.angle_deg() / 2.0;
      for (auto const b : {c.fov_.bearing_deg() - half, c.fov_.bearing_deg() + half}) {
        auto const t = segment_crossing_param(s, c.pos_, ray_end(c.pos_, b, c.radius_));
        if (t >= 0.0) {
          cuts.push_back(t);
        }
      }
    }
  }
  std::sort(begin(cuts), end(cuts));

  auto const len = s.length();
  auto ts = std::vector<double>{0.0};
  for (auto const t : cuts) {
    if ((t - ts.back()) * len > kCutMergeDistance &&
        (1.0 - t) * len > kCutMergeDistance) {
      ts.push_back(t);
    }
  }
  ts.push_back(1.0);

  auto out = std::vector<sub_segment>{};
  out.reserve(ts.size() - 1U);
  for (auto i = 1U; i < ts.size(); ++i) {
    auto sub = sub_segment{};
    sub.t0_ = ts[i - 1U];
    sub.t1_ = ts[i];
    sub.a_ = i == 1U ? s.a() : s.at(sub.t0_);
    sub.b_ = i + 1U == ts.size() ? s.b() : s.at(sub.t1_);
    auto const mid = s.at((sub.t0_ + sub.t1_) / 2.0);
    for (auto const& c : cameras) {
      if (covers(c.fov_, mid, c.pos_, c.radius_)) {
        sub.cameras_.push_back(c.idx_);
      }
    }
    sub.covered_ = !sub.cameras_.empty();
    out.push_back(std::move(sub));
  }
  return out;
}

std::optional<double> edge_weight(graph_edge const& e, route_mode const mode,
                                  double const beta) {
  switch (mode) {
    case route_mode::kBaseline: return e.length_m_;
    case route_mode::kPrivacy:
      return e.covered_ ? std::nullopt : std::optional{e.length_m_};
    case route_mode::kSafety:
      return e.covered_ ? e.length_m_ * beta : e.length_m_;
  }
  return std::nullopt;
}

coverage_graph::coverage_graph() = default;
coverage_graph::coverage_graph(coverage_graph&&) noexcept = default;
coverage_graph& coverage_graph::operator=(coverage_graph&&) noexcept = default;
coverage_graph::~coverage_graph() = default;

coverage_graph coverage_graph::build(ped_network const& net,
                                     std::span<camera const> cams,
                                     coverage_config const& cfg) {
  auto g = coverage_graph{};
  g.origin_ = net.origin();
  g.cfg_ = cfg;
  g.cameras_.assign(begin(cams), end(cams));

  // Cameras.
  auto camera_boxes = std::vector<box_value>{};
  for (auto i = 0U; i < cams.size(); ++i) {
    auto const r = coverage_radius(cams[i], cfg);
    auto pos = local_xy{};
    try {
      pos = project(cams[i].pos_, g.origin_);
    } catch (error const& e) {
      if (e.kind() != error_kind::kProjectionOutOfRange) {
        throw;
      }
      ++g.ignored_cameras_;
      continue;
    }
    camera_boxes.emplace_back(
        bg_box{{pos.x_ - r, pos.y_ - r}, {pos.x_ + r, pos.y_ + r}},
        g.placed_.size());
    g.placed_.push_back({i, pos, cams[i].fov_, r});
  }
  auto const camera_tree = box_tree{camera_boxes};

  // OSM nodes; coincident positions share one graph node.
  auto osm_to_node = std::unordered_map<osm_id, node_idx_t>{};
  osm_to_node.reserve(net.nodes().size());
  auto by_pos = std::map<std::pair<double, double>, node_idx_t>{};
  for (auto const& [id, n] : net.nodes()) {
    auto const key = std::pair{n.pos_.lat_, n.pos_.lon_};
    auto const it = by_pos.find(key);
    if (it != end(by_pos)) {
      osm_to_node.emplace(id, it->second);
      continue;
    }
    auto const idx = static_cast<node_idx_t>(g.nodes_.size());
    g.nodes_.push_back({idx, project(n.pos_, g.origin_), id});
    by_pos.emplace(key, idx);
    osm_to_node.emplace(id, idx);
  }

  // Way segments.
  auto seen = std::set<std::pair<node_idx_t, node_idx_t>>{};
  auto candidates = std::vector<box_value>{};
  auto local_cams = std::vector<placed_camera>{};
  for (auto const& w : net.ways()) {
    for (auto i = 1U; i < w.node_refs_.size(); ++i) {
      auto const from = osm_to_node.at(w.node_refs_[i - 1U]);
      auto const to = osm_to_node.at(w.node_refs_[i]);
      if (from == to || !seen.emplace(std::minmax(from, to)).second) {
        continue;
      }

      auto const seg = segment{g.nodes_[from].pos_, g.nodes_[to].pos_};
      auto const box = bg_box{
          {std::min(seg.a().x_, seg.b().x_), std::min(seg.a().y_, seg.b().y_)},
          {std::max(seg.a().x_, seg.b().x_), std::max(seg.a().y_, seg.b().y_)}};
      candidates.clear();
      camera_tree.query(bgi::intersects(box), std::back_inserter(candidates));
      std::sort(begin(candidates), end(candidates),
                [](auto const& a, auto const& b) { return a.second < b.second; });
      local_cams.clear();
      for (auto const& [_, placed_idx] : candidates) {
        auto const& c = g.placed_[placed_idx];
        if (point_segment_distance(c.pos_, seg) <= c.radius_) {
          local_cams.push_back(c);
        }
      }

      auto const parts = split_edge(seg, local_cams);
      auto prev = from;
      for (auto j = 0U; j < parts.size(); ++j) {
        auto next = to;
        if (j + 1U != parts.size()) {
          next = static_cast<node_idx_t>(g.nodes_.size());
          g.nodes_.push_back({next, parts[j].b_, std::nullopt});
        }
        g.edges_.push_back({prev, next,
                            distance(g.nodes_[prev].pos_, g.nodes_[next].pos_),
                            parts[j].covered_, parts[j].cameras_});
        prev = next;
      }
    }
  }

  // Adjacency (CSR, neighbors sorted by id).
  g.adj_offsets_.assign(g.nodes_.size() + 1U, 0U);
  for (auto const& e : g.edges_) {
    ++g.adj_offsets_[e.a_ + 1U];
    ++g.adj_offsets_[e.b_ + 1U];
  }
  for (auto i = 1U; i < g.adj_offsets_.size(); ++i) {
    g.adj_offsets_[i] += g.adj_offsets_[i - 1U];
  }
  g.adj_.resize(g.adj_offsets_.back());
  auto fill = std::vector<std::uint32_t>(begin(g.adj_offsets_),
                                         std::prev(end(g.adj_offsets_)));
  for (auto e = 0U; e < g.edges_.size(); ++e) {
    auto const& edge = g.edges_[e];
    g.adj_[fill[edge.a_]++] = {edge.b_, e};
    g.adj_[fill[edge.b_]++] = {edge.a_, e};
  }
  for (auto n = 0U; n < g.nodes_.size(); ++n) {
    std::sort(begin(g.adj_) + g.adj_offsets_[n], begin(g.adj_) + g.adj_offsets_[n + 1U],
              [](adjacent const& a, adjacent const& b) {
                return std::pair{a.node_, a.edge_} < std::pair{b.node_, b.edge_};
              });
  }

  g.clear_incident_.assign(g.nodes_.size(), false);
  for (auto const& e : g.edges_) {
    if (!e.covered_) {
      g.clear_incident_[e.a_] = true;
      g.clear_incident_[e.b_] = true;
    }
  }

  auto all_points = std::vector<point_value>{};
  auto clear_points = std::vector<point_value>{};
  all_points.reserve(g.nodes_.size());
  for (auto const& n : g.nodes_) {
    if (g.adj_offsets_[n.id_] == g.adj_offsets_[n.id_ + 1U]) {
      continue;
    }
    all_points.emplace_back(to_bg(n.pos_), n.id_);
    if (g.clear_incident_[n.id_]) {
      clear_points.emplace_back(to_bg(n.pos_), n.id_);
    }
  }
  g.index_ = std::make_unique<spatial_index>(
      spatial_index{point_tree{all_points}, point_tree{clear_points}});
  return g;
}

std::span<adjacent const> coverage_graph::neighbors(node_idx_t const n) const {
  return {adj_.data() + adj_offsets_[n], adj_offsets_[n + 1U] - adj_offsets_[n]};
}

geo_point coverage_graph::geo(node_idx_t const n) const {
  return unproject(nodes_[n].pos_, origin_);
}

std::vector<std::string> coverage_graph::covering_camera_ids(
    graph_edge const& e) const {
  auto ids = std::vector<std::string>{};
  ids.reserve(e.cameras_.size());
  for (auto const c : e.cameras_) {
    ids.push_back(cameras_[c].id_);
  }
  return ids;
}

bool coverage_graph::has_clear_edge(node_idx_t const n) const {
  return clear_incident_[n];
}

std::optional<node_idx_t> coverage_graph::nearest_node(
    local_xy const p, bool const clear_only) const {
  auto const& tree = clear_only ? index_->clear_ : index_->all_;
  auto hit = std::vector<point_value>{};
  tree.query(bgi::nearest(to_bg(p), 1U), std::back_inserter(hit));
  if (hit.empty()) {
    return std::nullopt;
  }

  // Resolve ties by id.
  auto const best = distance(p, nodes_[hit.front().second].pos_);
  auto const slack = best * 1e-12 + 1e-9;
  auto ring = std::vector<point_value>{};
  tree.query(bgi::intersects(bg_box{{p.x_ - best - slack, p.y_ - best - slack},
                                    {p.x_ + best + slack, p.y_ + best + slack}}),
             std::back_inserter(ring));
  auto result = hit.front().second;
  for (auto const& [pt, id] : ring) {
    if (distance(p, nodes_[id].pos_) == best && id < result) {
      result = id;
    }
  }
  return result;
}

double coverage_graph::total_length() const {
  auto sum = 0.0;
  for (auto const& e : edges_) {
    sum += e.length_m_;
  }
  return sum;
}

double coverage_graph::covered_length() const {
  auto sum = 0.0;
  for (auto const& e : edges_) {
    if (e.covered_) {
      sum += e.length_m_;
    }
  }
  return sum;
}

}  // namespace cctv
