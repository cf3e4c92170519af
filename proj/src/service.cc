#include "cctv/service.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>

#include "fmt/core.h"
#include "httplib.h"
#include "json.hpp"

#include "cctv/error.h"
#include "cctv/geojson.h"

namespace cctv {

namespace {

using json = nlohmann::json;

http_response reply(int const status, json const& body, std::uint64_t const snap = 0U) {
  return {status, body.dump(), snap};
}

http_response fail(int const status, std::string_view msg, std::uint64_t const snap = 0U) {
  return reply(status, json{{"error", msg}}, snap);
}

std::string utc_now() {
  auto const t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  auto tm = std::tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json radii_json(dataset_snapshot const& s) {
  auto radii = json::array();
  for (auto const& [r, _] : s.graphs_) {
    radii.push_back(r);
  }
  return radii;
}

struct field_errors {
  void add(std::string field, std::string msg) {
    list_.push_back({{"field", std::move(field)}, {"message", std::move(msg)}});
  }

  json list_ = json::array();
};

std::optional<geo_point> read_point(json const& body, std::string const& field,
                                    field_errors& errs) {
  if (!body.contains(field)) {
    errs.add(field, "missing");
    return std::nullopt;
  }
  try {
    return geo_point_from_json(body[field], field);
  } catch (error const& e) {
    errs.add(field, e.what());
    return std::nullopt;
  }
}

std::optional<double> read_positive(json const& body, std::string const& field,
                                    field_errors& errs) {
  auto const it = body.find(field);
  if (it == body.end()) {
    return std::nullopt;
  }
  if (!it->is_number() || !(it->get<double>() > 0.0)) {
    errs.add(field, "expected a positive number");
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<std::array<double, 4>> parse_bbox(std::string_view s) {
  auto out = std::array<double, 4>{};
  for (auto i = 0U; i < 4U; ++i) {
    auto const comma = s.find(',');
    auto const part = s.substr(0U, comma);
    auto const [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out[i]);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
      return std::nullopt;
    }
    if ((comma == std::string_view::npos) != (i == 3U)) {
      return std::nullopt;
    }
    s.remove_prefix(comma == std::string_view::npos ? s.size() : comma + 1U);
  }
  return out;
}

}  // namespace

route_service::route_service(service_config cfg) : cfg_{std::move(cfg)} {
  if (cfg_.radii_.empty()) {
    throw error{error_kind::kConfiguration, "no radii configured"};
  }
}

std::shared_ptr<dataset_snapshot const> route_service::snapshot() const {
  return std::atomic_load(&snapshot_);
}

std::shared_ptr<dataset_snapshot const> route_service::build(
    ped_network const& net, std::vector<camera> cams, dataset_paths paths) {
  auto s = std::make_shared<dataset_snapshot>();
  s->build_timestamp_ = utc_now();
  s->paths_ = std::move(paths);
  s->cameras_ = std::move(cams);
  for (auto const r : cfg_.radii_) {
    if (!s->graphs_.contains(r)) {
      s->graphs_.emplace(
          r, coverage_graph::build(net, s->cameras_, make_coverage_config(cfg_.task_, r)));
    }
  }
  return s;
}

std::uint64_t route_service::publish(ped_network const& net, std::vector<camera> cams,
                                     dataset_paths paths) {
  auto const lock = std::lock_guard{reload_mutex_};
  auto s = std::const_pointer_cast<dataset_snapshot>(
      build(net, std::move(cams), std::move(paths)));
  s->id_ = next_id_++;
  auto const id = s->id_;
  std::atomic_store(&snapshot_, std::shared_ptr<dataset_snapshot const>{std::move(s)});
  return id;
}

std::uint64_t route_service::load(dataset_paths const& paths) {
  auto const net = load_osm_file(paths.osm_, cfg_.filter_);
  auto cams = paths.cameras_.empty() ? std::vector<camera>{}
                                     : load_cameras_file(paths.cameras_);
  return publish(net, std::move(cams), paths);
}

http_response route_service::handle_route(std::string_view const body) const {
  auto const s = snapshot();
  if (!s) {
    return fail(503, "no dataset loaded");
  }

  auto doc = json{};
  try {
    doc = json::parse(body);
  } catch (json::parse_error const& e) {
    return fail(400, fmt::format("malformed JSON: {}", e.what()), s->id_);
  }
  if (!doc.is_object()) {
    return fail(400, "request body must be a JSON object", s->id_);
  }

  auto errs = field_errors{};
  auto req = route_request{};
  req.beta_ = cfg_.beta_;
  req.complete_gap_m_ = cfg_.complete_gap_m_;
  req.snap_gap_max_m_ = cfg_.snap_gap_max_m_;

  auto const origin = read_point(doc, "origin", errs);
  auto const destination = read_point(doc, "destination", errs);
  if (auto const via = doc.find("via"); via != doc.end()) {
    if (!via->is_array()) {
      errs.add("via", "expected an array of points");
    } else {
      for (auto i = 0U; i < via->size(); ++i) {
        try {
          req.via_.push_back(geo_point_from_json((*via)[i], fmt::format("via[{}]", i)));
        } catch (error const& e) {
          errs.add(fmt::format("via[{}]", i), e.what());
        }
      }
    }
  }

  auto const mode_it = doc.find("mode");
  if (mode_it == doc.end() || !mode_it->is_string()) {
    errs.add("mode", "expected one of privacy, safety, baseline");
  } else if (auto const m = parse_mode(mode_it->get<std::string>()); m.has_value()) {
    req.mode_ = *m;
  } else {
    errs.add("mode", fmt::format("unknown mode '{}'", mode_it->get<std::string>()));
  }

  auto radius = std::optional<double>{};
  if (auto const r = doc.find("radius_m"); r == doc.end() || !r->is_number()) {
    errs.add("radius_m", "expected a number");
  } else {
    radius = r->get<double>();
  }

  if (auto const g = read_positive(doc, "snap_gap_max_m", errs); g.has_value()) {
    req.snap_gap_max_m_ = *g;
  }
  if (auto const b = doc.find("beta"); b != doc.end()) {
    if (!b->is_number() || !(b->get<double>() > 0.0 && b->get<double>() < 1.0)) {
      errs.add("beta", "expected a number in (0, 1)");
    } else {
      req.beta_ = b->get<double>();
    }
  }

  if (!errs.list_.empty()) {
    return reply(400, json{{"error", "invalid request"}, {"fields", errs.list_}}, s->id_);
  }

  auto const g = s->graphs_.find(*radius);
  if (g == s->graphs_.end()) {
    auto available = std::string{};
    for (auto const& [r, _] : s->graphs_) {
      available += fmt::format("{}{}", available.empty() ? "" : ", ", r);
    }
    return reply(400,
                 json{{"error", fmt::format("radius {} is not available; built radii: {}",
                                            *radius, available)},
                      {"field", "radius_m"},
                      {"available_radii", radii_json(*s)}},
                 s->id_);
  }

  req.origin_ = *origin;
  req.destination_ = *destination;
  auto const res = route(req, g->second);

  auto const feature = route_feature(res);
  auto out = feature["properties"];
  out["mode"] = to_str(req.mode_);
  out["radius_m"] = *radius;
  out["route"] = feature;
  return reply(200, out, s->id_);
}

http_response route_service::handle_cameras(std::string_view const bbox_query) const {
  auto const s = snapshot();
  if (!s) {
    return fail(503, "no dataset loaded");
  }

  auto box = std::optional<std::array<double, 4>>{};
  if (!bbox_query.empty()) {
    box = parse_bbox(bbox_query);
    if (!box.has_value()) {
      return fail(400, "bbox must be minLon,minLat,maxLon,maxLat", s->id_);
    }
    auto const [min_lon, min_lat, max_lon, max_lat] = *box;
    if (min_lon > max_lon || min_lat > max_lat) {
      return fail(400, "inverted bbox", s->id_);
    }
  }

  auto features = json::array();
  for (auto const& c : s->cameras_) {
    if (box.has_value()) {
      auto const [min_lon, min_lat, max_lon, max_lat] = *box;
      if (c.pos_.lon_ < min_lon || c.pos_.lon_ > max_lon || c.pos_.lat_ < min_lat ||
          c.pos_.lat_ > max_lat) {
        continue;
      }
    }
    auto radii = json::object();
    for (auto const& [r, g] : s->graphs_) {
      radii[fmt::format("{}", r)] = coverage_radius(c, g.config());
    }
    auto props = json{{"id", c.id_}, {"radius_m", std::move(radii)}};
    if (c.fov_.is_omni()) {
      props["fov"] = {{"type", "omni"}};
    } else {
      props["fov"] = {{"type", "sector"},
                      {"bearing_deg", c.fov_.bearing_deg()},
                      {"angle_deg", c.fov_.angle_deg()}};
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", to_geojson_point(c.pos_)},
                        {"properties", std::move(props)}});
  }
  return reply(200, json{{"type", "FeatureCollection"}, {"features", std::move(features)}},
               s->id_);
}

http_response route_service::handle_health() const {
  auto const s = snapshot();
  if (!s) {
    return reply(503, json{{"status", "loading"}});
  }
  return reply(200,
               json{{"status", "ok"},
                    {"snapshot", s->id_},
                    {"build_timestamp", s->build_timestamp_},
                    {"radii", radii_json(*s)},
                    {"cameras", s->cameras_.size()}},
               s->id_);
}

http_response route_service::handle_reload(std::string_view const body) {
  auto doc = json::object();
  if (!body.empty()) {
    try {
      doc = json::parse(body);
    } catch (json::parse_error const& e) {
      return fail(400, fmt::format("malformed JSON: {}", e.what()));
    }
  }
  if (!doc.is_object()) {
    return fail(400, "request body must be a JSON object");
  }

  auto paths = dataset_paths{};
  if (auto const cur = snapshot(); cur) {
    paths = cur->paths_;
  }
  for (auto const& [field, target] :
       {std::pair{"osm", &paths.osm_}, std::pair{"cameras", &paths.cameras_}}) {
    if (auto const it = doc.find(field); it != doc.end()) {
      if (!it->is_string()) {
        return reply(400, json{{"error", "expected a file path"}, {"field", field}});
      }
      *target = it->get<std::string>();
    }
  }
  if (paths.osm_.empty()) {
    return reply(400, json{{"error", "missing OSM path"}, {"field", "osm"}});
  }

  try {
    auto const id = load(paths);
    return reply(200, json{{"snapshot", id}}, id);
  } catch (std::exception const& e) {
    auto const cur = snapshot();
    return fail(500, e.what(), cur ? cur->id_ : 0U);
  }
}

struct http_server::impl {
  explicit impl(route_service& svc) : svc_{svc} {
    auto const send = [](httplib::Response& res, http_response const& r) {
      res.status = r.status_;
      if (r.snapshot_ != 0U) {
        res.set_header("X-Snapshot", std::to_string(r.snapshot_));
      }
      res.set_content(r.body_, "application/json");
    };
    server_.Post("/route", [this, send](httplib::Request const& req, httplib::Response& res) {
      send(res, svc_.handle_route(req.body));
    });
    server_.Get("/cameras", [this, send](httplib::Request const& req, httplib::Response& res) {
      send(res, svc_.handle_cameras(req.get_param_value("bbox")));
    });
    server_.Get("/health", [this, send](httplib::Request const&, httplib::Response& res) {
      send(res, svc_.handle_health());
    });
    server_.Post("/reload", [this, send](httplib::Request const& req, httplib::Response& res) {
      send(res, svc_.handle_reload(req.body));
    });
    server_.set_exception_handler(
        [](httplib::Request const&, httplib::Response& res, std::exception_ptr ep) {
          auto msg = std::string{"internal error"};
          try {
            std::rethrow_exception(ep);
          } catch (std::exception const& e) {
            msg = e.what();
          } catch (...) {
          }
          res.status = 500;
          res.set_content(json{{"error", msg}}.dump(), "application/json");
        });
  }

  route_service& svc_;
  httplib::Server server_;
};

http_server::http_server(route_service& svc) : impl_{std::make_unique<impl>(svc)} {}

http_server::~http_server() = default;

int http_server::bind(std::string const& host, int const port) {
  if (port == 0) {
    return impl_->server_.bind_to_any_port(host);
  }
  return impl_->server_.bind_to_port(host, port) ? port : -1;
}

void http_server::run() { impl_->server_.listen_after_bind(); }

void http_server::stop() { impl_->server_.stop(); }

}  // namespace cctv
