#include "cctv/route.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "fmt/core.h"

#include "cctv/error.h"

namespace cctv {

namespace {

constexpr auto const kInf = std::numeric_limits<double>::infinity();
constexpr auto const kTieTolerance = 1e-9;
constexpr auto const kNoEdge = std::numeric_limits<edge_idx_t>::max();

struct search_tree {
  std::vector<double> dist_;
  std::vector<edge_idx_t> pred_;
  std::vector<node_idx_t> settled_;
};

// Runs until `target` is settled (if given) or the component is exhausted.
search_tree run_search(coverage_graph const& g, node_idx_t const from,
                       std::optional<node_idx_t> const target,
                       route_mode const mode, double const beta) {
  auto t = search_tree{};
  t.dist_.assign(g.nodes().size(), kInf);
  t.pred_.assign(g.nodes().size(), kNoEdge);
  auto done = std::vector<bool>(g.nodes().size(), false);

  using entry = std::pair<double, node_idx_t>;
  auto pq = std::priority_queue<entry, std::vector<entry>, std::greater<>>{};
  t.dist_[from] = 0.0;
  pq.emplace(0.0, from);
  while (!pq.empty()) {
    auto const [d, n] = pq.top();
    pq.pop();
    if (done[n]) {
      continue;
    }
    done[n] = true;
    t.settled_.push_back(n);
    if (target == n) {
      break;
    }
    for (auto const& adj : g.neighbors(n)) {
      if (done[adj.node_]) {
        continue;
      }
      auto const w = edge_weight(g.edges()[adj.edge_], mode, beta);
      if (!w.has_value()) {
        continue;
      }
      auto const nd = d + *w;
      if (nd < t.dist_[adj.node_]) {
        t.dist_[adj.node_] = nd;
        t.pred_[adj.node_] = adj.edge_;
        pq.emplace(nd, adj.node_);
      }
    }
  }
  return t;
}

path extract_path(coverage_graph const& g, search_tree const& t,
                  node_idx_t const from, node_idx_t const to) {
  auto p = path{};
  p.weight_ = t.dist_[to];
  auto n = to;
  p.nodes_.push_back(n);
  while (n != from) {
    auto const e = t.pred_[n];
    auto const& edge = g.edges()[e];
    n = edge.a_ == n ? edge.b_ : edge.a_;
    p.edges_.push_back(e);
    p.nodes_.push_back(n);
  }
  std::reverse(begin(p.nodes_), end(p.nodes_));
  std::reverse(begin(p.edges_), end(p.edges_));
  return p;
}

std::optional<local_xy> try_project(geo_point const p, geo_point const origin) {
  try {
    return project(p, origin);
  } catch (error const& e) {
    if (e.kind() == error_kind::kProjectionOutOfRange) {
      return std::nullopt;
    }
    throw;
  }
}

struct leg_result {
  path path_;
  node_idx_t end_{};
  double gap_m_{};
};

std::optional<leg_result> route_leg(coverage_graph const& g,
                                    node_idx_t const from,
                                    geo_point const target_pos,
                                    route_mode const mode, double const beta) {
  auto const target = snap(target_pos, g, mode);
  if (!target.has_value()) {
    return std::nullopt;
  }
  auto const t = run_search(g, from, target->node_, mode, beta);
  if (t.dist_[target->node_] != kInf) {
    return leg_result{extract_path(g, t, from, target->node_), target->node_,
                      target->gap_m_};
  }

  // Unreachable: end at the settled node closest to the target point.
  // Equidistant candidates resolve to the cheaper path, then the smaller id.
  auto const xy = project(target_pos, g.origin());
  auto best = t.settled_.front();
  auto best_d = distance(xy, g.nodes()[best].pos_);
  for (auto const n : t.settled_) {
    auto const d = distance(xy, g.nodes()[n].pos_);
    auto const tie = std::abs(d - best_d) <= kTieTolerance;
    if ((!tie && d < best_d) ||
        (tie && std::pair{t.dist_[n], n} < std::pair{t.dist_[best], best})) {
      best = n;
      best_d = d;
    }
  }
  return leg_result{extract_path(g, t, from, best), best,
                    haversine_distance(target_pos, g.geo(best))};
}

}  // namespace

std::string_view to_str(route_status const s) {
  switch (s) {
    case route_status::kComplete: return "complete";
    case route_status::kTruncated: return "truncated";
    case route_status::kNoRoute: return "no_route";
  }
  return "";
}

void validate(route_request const& r) {
  auto const check_point = [](geo_point const p, std::string_view what) {
    if (!is_valid(p)) {
      throw error{error_kind::kValidation,
                  fmt::format("{} coordinate out of range: {}, {}", what,
                              p.lat_, p.lon_)};
    }
  };
  check_point(r.origin_, "origin");
  check_point(r.destination_, "destination");
  for (auto const& v : r.via_) {
    check_point(v, "via");
  }
  if (!(r.beta_ > 0.0 && r.beta_ < 1.0)) {
    throw error{error_kind::kValidation,
                fmt::format("beta must be in (0, 1), got {}", r.beta_)};
  }
  if (!(r.snap_gap_max_m_ > 0.0) || !(r.complete_gap_m_ > 0.0)) {
    throw error{error_kind::kValidation, "gap thresholds must be positive"};
  }
}

std::optional<snap_result> snap(geo_point const p, coverage_graph const& g,
                                route_mode const mode) {
  auto const xy = try_project(p, g.origin());
  if (!xy.has_value()) {
    return std::nullopt;
  }
  auto const n = g.nearest_node(*xy, mode == route_mode::kPrivacy);
  if (!n.has_value()) {
    return std::nullopt;
  }
  return snap_result{*n, haversine_distance(p, g.geo(*n))};
}

std::optional<path> shortest_path(coverage_graph const& g,
                                  node_idx_t const from, node_idx_t const to,
                                  route_mode const mode, double const beta) {
  auto const t = run_search(g, from, to, mode, beta);
  if (t.dist_[to] == kInf) {
    return std::nullopt;
  }
  return extract_path(g, t, from, to);
}

double path_length(coverage_graph const& g, std::vector<edge_idx_t> const& edges) {
  auto sum = 0.0;
  for (auto const e : edges) {
    sum += g.edges()[e].length_m_;
  }
  return sum;
}

double exposure(coverage_graph const& g, std::vector<edge_idx_t> const& edges) {
  auto sum = 0.0;
  for (auto const e : edges) {
    if (g.edges()[e].covered_) {
      sum += g.edges()[e].length_m_;
    }
  }
  return sum;
}

route_result route(route_request const& req, coverage_graph const& g) {
  validate(req);

  auto res = route_result{};
  auto const no_route = [&]() {
    res.status_ = route_status::kNoRoute;
    res.polyline_.clear();
    res.nodes_.clear();
    res.edges_.clear();
    res.length_m_ = 0.0;
    res.exposure_m_ = 0.0;
    res.overhead_vs_baseline_.reset();
    return res;
  };

  auto const start = snap(req.origin_, g, req.mode_);
  if (!start.has_value()) {
    res.gap_origin_m_ = kInf;
    return no_route();
  }
  res.gap_origin_m_ = start->gap_m_;
  res.nodes_.push_back(start->node_);

  auto targets = req.via_;
  targets.push_back(req.destination_);
  auto at = start->node_;
  for (auto i = 0U; i < targets.size(); ++i) {
    auto const leg = route_leg(g, at, targets[i], req.mode_, req.beta_);
    auto const is_last = i + 1U == targets.size();
    if (!leg.has_value()) {
      (is_last ? res.gap_destination_m_ : res.gap_via_max_m_) = kInf;
      return no_route();
    }
    res.nodes_.insert(end(res.nodes_), std::next(begin(leg->path_.nodes_)),
                      end(leg->path_.nodes_));
    res.edges_.insert(end(res.edges_), begin(leg->path_.edges_),
                      end(leg->path_.edges_));
    if (is_last) {
      res.gap_destination_m_ = leg->gap_m_;
    } else {
      res.gap_via_max_m_ = std::max(res.gap_via_max_m_, leg->gap_m_);
    }
    at = leg->end_;
  }

  auto const max_gap = std::max(
      {res.gap_origin_m_, res.gap_via_max_m_, res.gap_destination_m_});
  if (!(max_gap <= req.snap_gap_max_m_)) {
    return no_route();
  }
  res.status_ = max_gap <= std::min(req.complete_gap_m_, req.snap_gap_max_m_)
                    ? route_status::kComplete
                    : route_status::kTruncated;

  res.polyline_.reserve(res.nodes_.size());
  for (auto const n : res.nodes_) {
    res.polyline_.push_back(g.geo(n));
  }
  res.achieved_origin_ = res.polyline_.front();
  res.achieved_destination_ = res.polyline_.back();
  res.length_m_ = path_length(g, res.edges_);
  res.exposure_m_ = exposure(g, res.edges_);

  if (req.mode_ == route_mode::kBaseline) {
    if (res.length_m_ > 0.0) {
      res.overhead_vs_baseline_ = 1.0;
    }
  } else if (req.with_baseline_overhead_) {
    auto base_req = req;
    base_req.mode_ = route_mode::kBaseline;
    base_req.with_baseline_overhead_ = false;
    auto const base = route(base_req, g);
    if (base.status_ != route_status::kNoRoute && base.length_m_ > 0.0) {
      res.overhead_vs_baseline_ = res.length_m_ / base.length_m_;
    }
  }
  return res;
}

}  // namespace cctv
