#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cctv/camera.h"
#include "cctv/coverage_graph.h"
#include "cctv/osm.h"
#include "cctv/route.h"

namespace cctv {

struct service_config {
  std::vector<double> radii_{10.0, 15.0, 25.0};
  surveillance_task task_{surveillance_task::kRecognition};
  double beta_{kDefaultSafetyBeta};
  double complete_gap_m_{kDefaultCompleteGap};
  double snap_gap_max_m_{kDefaultSnapGapMax};
  pedestrian_filter filter_{pedestrian_filter::defaults()};
};

struct dataset_paths {
  std::string osm_;
  std::string cameras_;
};

// Immutable once published.
struct dataset_snapshot {
  std::uint64_t id_{};
  std::string build_timestamp_;
  dataset_paths paths_;
  std::vector<camera> cameras_;
  std::map<double, coverage_graph> graphs_;
};

struct http_response {
  int status_{200};
  std::string body_;
  std::uint64_t snapshot_{};  // 0 when no snapshot served the request
};

class route_service {
public:
  explicit route_service(service_config = {});

  service_config const& config() const { return cfg_; }

  // Builds a snapshot and publishes it. Throws on any load or build error,
  // leaving the current snapshot in place.
  std::uint64_t load(dataset_paths const&);
  std::uint64_t publish(ped_network const&, std::vector<camera>,
                        dataset_paths paths = {});

  std::shared_ptr<dataset_snapshot const> snapshot() const;

  // POST /route
  http_response handle_route(std::string_view body) const;

  // GET /cameras?bbox=minLon,minLat,maxLon,maxLat (empty = everything)
  http_response handle_cameras(std::string_view bbox) const;

  // GET /health
  http_response handle_health() const;

  // POST /reload {"osm": path, "cameras": path}; missing paths keep the
  // current ones.
  http_response handle_reload(std::string_view body);

private:
  std::shared_ptr<dataset_snapshot const> build(ped_network const&,
                                                std::vector<camera>,
                                                dataset_paths);

  service_config cfg_;
  std::shared_ptr<dataset_snapshot const> snapshot_;
  std::mutex reload_mutex_;
  std::uint64_t next_id_{1U};
};

// HTTP front end for a route_service.
class http_server {
public:
  explicit http_server(route_service&);
  ~http_server();

  http_server(http_server const&) = delete;
  http_server& operator=(http_server const&) = delete;

  // Returns the bound port, or -1 when binding fails. Port 0 picks a free one.
  int bind(std::string const& host, int port);

  // Blocks until stop(). Requests already accepted are answered first.
  void run();
  void stop();

private:
  struct impl;
  std::unique_ptr<impl> impl_;
};

}  // namespace cctv
