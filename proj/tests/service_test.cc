#include <algorithm>
#include <atomic>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include "fmt/core.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"

#include "cctv/io.h"
#include "cctv/service.h"
#include "cctv/synth.h"

using namespace cctv;
using json = nlohmann::json;

namespace {

json point(geo_point const p) { return {{"lat", p.lat_}, {"lon", p.lon_}}; }

std::string route_body(geo_point const a, geo_point const b, std::string const& mode,
                       double const r) {
  return json{{"origin", point(a)}, {"destination", point(b)}, {"mode", mode}, {"radius_m", r}}
      .dump();
}

struct temp_dataset {
  explicit temp_dataset(std::string const& name)
      : dir_{std::filesystem::temp_directory_path() / name} {
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~temp_dataset() { std::filesystem::remove_all(dir_); }

  dataset_paths write(synth::fixture const& fx) const {
    auto const p = dataset_paths{(dir_ / "net.osm").string(), (dir_ / "cams.geojson").string()};
    write_file(p.osm_, to_osm_xml(fx.net_));
    write_file(p.cameras_, cameras_to_geojson(fx.cameras_));
    return p;
  }

  std::filesystem::path dir_;
};

struct two_route_service : ::testing::Test {
  synth::two_route f_ = synth::two_route_fixture();
  route_service svc_;

  void SetUp() override { svc_.publish(f_.fx_.net_, f_.fx_.cameras_); }
};

}  // namespace

TEST(service, no_snapshot_is_unavailable) {
  auto const svc = route_service{};
  EXPECT_EQ(svc.handle_health().status_, 503);
  EXPECT_EQ(json::parse(svc.handle_health().body_)["status"], "loading");
  EXPECT_EQ(svc.handle_route("{}").status_, 503);
  EXPECT_EQ(svc.handle_cameras("").status_, 503);
}

TEST_F(two_route_service, privacy_route) {
  auto const res = svc_.handle_route(route_body(f_.a_, f_.b_, "privacy", 10.0));
  ASSERT_EQ(res.status_, 200) << res.body_;
  EXPECT_EQ(res.snapshot_, 1U);
  auto const doc = json::parse(res.body_);
  EXPECT_EQ(doc["status"], "complete");
  EXPECT_EQ(doc["mode"], "privacy");
  EXPECT_NEAR(doc["length_m"].get<double>(), 400.0, 1e-6);
  EXPECT_EQ(doc["exposure_m"].get<double>(), 0.0);
  EXPECT_NEAR(doc["overhead_vs_baseline"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(doc["route"]["geometry"]["type"], "LineString");
  EXPECT_EQ(doc["route"]["geometry"]["coordinates"].size(), 4U);
}

TEST_F(two_route_service, baseline_and_radius_selection) {
  auto const base = json::parse(svc_.handle_route(route_body(f_.a_, f_.b_, "baseline", 15.0)).body_);
  EXPECT_NEAR(base["length_m"].get<double>(), 200.0, 1e-6);
  EXPECT_NEAR(base["exposure_m"].get<double>(), 200.0, 1e-6);
  EXPECT_EQ(base["radius_m"].get<double>(), 15.0);
}

TEST_F(two_route_service, unknown_radius_lists_available) {
  auto const res = svc_.handle_route(route_body(f_.a_, f_.b_, "privacy", 13.0));
  EXPECT_EQ(res.status_, 400);
  auto const doc = json::parse(res.body_);
  EXPECT_EQ(doc["error"], "radius 13 is not available; built radii: 10, 15, 25");
  EXPECT_EQ(doc["available_radii"], (json{10.0, 15.0, 25.0}));
}

TEST_F(two_route_service, invalid_fields_are_listed) {
  auto const res = svc_.handle_route(
      R"({"origin":{"lat":95,"lon":0},"mode":"sneaky","radius_m":"10","beta":2})");
  EXPECT_EQ(res.status_, 400);
  auto const doc = json::parse(res.body_);
  EXPECT_EQ(doc["error"], "invalid request");
  auto fields = std::set<std::string>{};
  for (auto const& f : doc["fields"]) {
    fields.insert(f["field"].get<std::string>());
  }
  EXPECT_EQ(fields,
            (std::set<std::string>{"origin", "destination", "mode", "radius_m", "beta"}));
  EXPECT_EQ(svc_.handle_route("{oops").status_, 400);
  EXPECT_EQ(svc_.handle_route("[]").status_, 400);
}

TEST(service, no_route_is_a_normal_answer) {
  auto const f = synth::ring_fixture(140.0);
  auto svc = route_service{};
  svc.publish(f.fx_.net_, f.fx_.cameras_);
  auto const res = svc.handle_route(route_body(f.origin_, f.destination_, "privacy", 10.0));
  ASSERT_EQ(res.status_, 200);
  auto const doc = json::parse(res.body_);
  EXPECT_EQ(doc["status"], "no_route");
  EXPECT_TRUE(doc["route"]["geometry"]["coordinates"].empty());
}

TEST(service, camera_bbox_matches_brute_force) {
  auto const net = synth::city(3U);
  auto const cams = synth::street_cameras(net, 1000U, 9U);
  auto svc = route_service{service_config{{10.0}}};
  svc.publish(net, cams);

  auto rng = std::mt19937_64{5U};
  auto lat = std::uniform_real_distribution<double>{synth::kDowntownMin.lat_,
                                                    synth::kDowntownMax.lat_};
  auto lon = std::uniform_real_distribution<double>{synth::kDowntownMin.lon_,
                                                    synth::kDowntownMax.lon_};
  for (auto i = 0; i < 20; ++i) {
    auto la = std::minmax(lat(rng), lat(rng));
    auto lo = std::minmax(lon(rng), lon(rng));
    auto const bbox = fmt::format("{},{},{},{}", lo.first, la.first, lo.second, la.second);
    auto const res = svc.handle_cameras(bbox);
    ASSERT_EQ(res.status_, 200);
    auto got = std::set<std::string>{};
    for (auto const& f : json::parse(res.body_)["features"]) {
      got.insert(f["properties"]["id"].get<std::string>());
    }
    auto expected = std::set<std::string>{};
    for (auto const& c : cams) {
      if (c.pos_.lon_ >= lo.first && c.pos_.lon_ <= lo.second && c.pos_.lat_ >= la.first &&
          c.pos_.lat_ <= la.second) {
        expected.insert(c.id_);
      }
    }
    EXPECT_EQ(got, expected) << bbox;
  }
  EXPECT_EQ(json::parse(svc.handle_cameras("").body_)["features"].size(), 1000U);
}

TEST_F(two_route_service, camera_properties_and_bad_bbox) {
  auto const doc = json::parse(svc_.handle_cameras("").body_);
  ASSERT_EQ(doc["features"].size(), 10U);
  auto const& props = doc["features"][0]["properties"];
  EXPECT_EQ(props["fov"]["type"], "omni");
  EXPECT_EQ(props["radius_m"]["25"].get<double>(), 25.0);
  EXPECT_EQ(svc_.handle_cameras("26,62,25,63").status_, 400);
  EXPECT_EQ(svc_.handle_cameras("1,2,3").status_, 400);
  EXPECT_EQ(svc_.handle_cameras("1,2,3,x").status_, 400);
}

TEST_F(two_route_service, health_reports_snapshot) {
  auto const res = svc_.handle_health();
  ASSERT_EQ(res.status_, 200);
  auto const doc = json::parse(res.body_);
  EXPECT_EQ(doc["status"], "ok");
  EXPECT_EQ(doc["snapshot"], 1U);
  EXPECT_EQ(doc["cameras"], 10U);
  EXPECT_EQ(doc["radii"].size(), 3U);
}

TEST(service, reload_swaps_or_keeps_snapshot) {
  auto const tmp = temp_dataset{"cctv_service_reload"};
  auto const f = synth::two_route_fixture();
  auto const paths = tmp.write(f.fx_);
  auto svc = route_service{};
  EXPECT_EQ(svc.handle_reload("{}").status_, 400);
  EXPECT_EQ(svc.load(paths), 1U);

  auto const again = svc.handle_reload("");
  ASSERT_EQ(again.status_, 200) << again.body_;
  EXPECT_EQ(json::parse(again.body_)["snapshot"], 2U);

  write_file(paths.cameras_, "{\"type\":\"FeatureCollection\",\"features\":[");
  auto const broken = svc.handle_reload("{}");
  EXPECT_EQ(broken.status_, 500);
  EXPECT_EQ(svc.snapshot()->id_, 2U);
  EXPECT_EQ(svc.handle_route(route_body(f.a_, f.b_, "privacy", 10.0)).status_, 200);

  EXPECT_EQ(svc.handle_reload(R"({"osm":7})").status_, 400);
  EXPECT_EQ(svc.handle_reload("nope").status_, 400);
  EXPECT_EQ(svc.handle_reload(R"({"osm":"/nonexistent.osm"})").status_, 500);
}

TEST(service, requests_during_reload_see_one_snapshot) {
  auto const tmp = temp_dataset{"cctv_service_storm"};
  auto const f = synth::two_route_fixture();
  auto const paths = tmp.write(f.fx_);
  auto svc = route_service{};
  svc.load(paths);

  auto stop = std::atomic<bool>{false};
  auto errors = std::atomic<int>{0};
  auto served = std::atomic<int>{0};
  auto workers = std::vector<std::thread>{};
  for (auto t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      for (auto n = 0; !stop.load() || n < 20; ++n) {
        auto const res = svc.handle_route(route_body(f.a_, f.b_, "privacy", 10.0));
        auto const doc = json::parse(res.body_);
        if (res.status_ != 200 || res.snapshot_ == 0U ||
            std::abs(doc["length_m"].get<double>() - 400.0) > 1e-6) {
          ++errors;
        }
        ++served;
      }
    });
  }
  while (served.load() < 4) {
    std::this_thread::yield();
  }
  for (auto i = 0; i < 10; ++i) {
    EXPECT_EQ(svc.handle_reload("{}").status_, 200);
    std::this_thread::yield();
  }
  stop = true;
  for (auto& w : workers) {
    w.join();
  }
  EXPECT_EQ(errors.load(), 0);
  EXPECT_GE(served.load(), 80);
  EXPECT_EQ(svc.snapshot()->id_, 11U);
}

TEST(http, serves_over_the_wire) {
  auto const f = synth::two_route_fixture();
  auto svc = route_service{};
  svc.publish(f.fx_.net_, f.fx_.cameras_);
  auto server = http_server{svc};
  auto const port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  auto runner = std::thread{[&] { server.run(); }};

  auto client = httplib::Client{"127.0.0.1", port};
  auto health = client.Get("/health");
  for (auto i = 0; !health && i < 50; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds{20});
    health = client.Get("/health");
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("X-Snapshot"), "1");

  auto const route = client.Post("/route", route_body(f.a_, f.b_, "privacy", 10.0),
                                 "application/json");
  ASSERT_TRUE(route);
  EXPECT_EQ(route->status, 200);
  EXPECT_EQ(json::parse(route->body)["status"], "complete");

  auto const bad = client.Post("/route", "{}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto const cams = client.Get("/cameras?bbox=0,0,1,1");
  ASSERT_TRUE(cams);
  EXPECT_TRUE(json::parse(cams->body)["features"].empty());

  server.stop();
  runner.join();
}
