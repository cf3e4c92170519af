#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gtest/gtest.h"

#include "cctv/camera.h"
#include "cctv/error.h"

#include "support/oracle.h"

using namespace cctv;

namespace {

template <typename Fn>
error expect_error(Fn&& fn) {
  try {
    fn();
  } catch (error const& e) {
    return e;
  }
  ADD_FAILURE() << "no cctv::error thrown";
  return error{error_kind::kIo, ""};
}

std::string one_feature(std::string const& props) {
  return R"({"type":"FeatureCollection","features":[{"type":"Feature",
    "geometry":{"type":"Point","coordinates":[25.75,62.24]},"properties":)" +
         props + "}]}";
}

}  // namespace

TEST(camera, task_pixel_densities) {
  EXPECT_EQ(task_ppm(surveillance_task::kIdentification), 250);
  EXPECT_EQ(task_ppm(surveillance_task::kRecognition), 125);
  EXPECT_EQ(task_ppm(surveillance_task::kObservation), 62);
  EXPECT_EQ(task_ppm(surveillance_task::kDetection), 25);
  EXPECT_EQ(task_ppm(surveillance_task::kMonitoring), 12);
  for (auto const t : kAllTasks) {
    EXPECT_EQ(parse_task(to_str(t)), t);
  }
  EXPECT_FALSE(parse_task("spotting").has_value());
}

TEST(camera, optics_radius_from_footprint) {
  // A 1920 px sensor with 90 deg hfov sees 2r meters at distance r, so
  // 125 px/m holds up to r = 1920 / 250 = 7.68 m.
  auto const o = optics_spec{1920, 90.0};
  EXPECT_NEAR(optics_radius(o, surveillance_task::kRecognition), 7.68, 1e-9);
  EXPECT_NEAR(optics_radius(o, surveillance_task::kIdentification), 3.84, 1e-9);
}

TEST(camera, optics_radius_non_increasing_with_density) {
  auto rng = std::mt19937_64{3};
  auto res = std::uniform_int_distribution<int>{320, 7680};
  auto fov = std::uniform_real_distribution<double>{10.0, 170.0};
  for (auto i = 0; i < 200; ++i) {
    auto const o = optics_spec{res(rng), fov(rng)};
    for (auto k = 1U; k < kAllTasks.size(); ++k) {
      EXPECT_LE(optics_radius(o, kAllTasks[k - 1U]), optics_radius(o, kAllTasks[k]));
    }
  }
}

TEST(camera, radius_precedence) {
  auto c = camera{};
  c.id_ = "c1";
  c.optics_ = optics_spec{1920, 90.0};
  auto const rec = make_coverage_config(surveillance_task::kRecognition, std::nullopt);
  EXPECT_NEAR(coverage_radius(c, rec), 7.68, 1e-9);
  c.radius_m_[surveillance_task::kRecognition] = 12.0;
  EXPECT_DOUBLE_EQ(coverage_radius(c, rec), 12.0);
  EXPECT_DOUBLE_EQ(coverage_radius(c, make_coverage_config(surveillance_task::kRecognition, 25.0)),
                   25.0);

  auto bare = camera{};
  bare.id_ = "lonely";
  auto const e = expect_error([&] { coverage_radius(bare, rec); });
  EXPECT_EQ(e.kind(), error_kind::kConfiguration);
  EXPECT_NE(std::string{e.what()}.find("lonely"), std::string::npos);
}

TEST(camera, global_radius_range) {
  EXPECT_EQ(expect_error([] { make_coverage_config(surveillance_task::kRecognition, 0.0); })
                .kind(),
            error_kind::kConfiguration);
  EXPECT_EQ(expect_error([] { make_coverage_config(surveillance_task::kRecognition, 500.5); })
                .kind(),
            error_kind::kConfiguration);
  EXPECT_NO_THROW(make_coverage_config(surveillance_task::kRecognition, 500.0));
}

TEST(camera, sector_normalization) {
  EXPECT_DOUBLE_EQ(fov_spec::sector(-90.0, 60.0).bearing_deg(), 270.0);
  EXPECT_DOUBLE_EQ(fov_spec::sector(725.0, 60.0).bearing_deg(), 5.0);
  EXPECT_THROW(fov_spec::sector(0.0, 0.0), error);
  EXPECT_THROW(fov_spec::sector(0.0, 360.0), error);
}

TEST(camera, covers_boundaries) {
  auto const o = fov_spec::omni();
  EXPECT_TRUE(covers(o, {10.0, 0.0}, {0.0, 0.0}, 10.0));
  EXPECT_FALSE(covers(o, {10.000001, 0.0}, {0.0, 0.0}, 10.0));
  EXPECT_TRUE(covers(o, {0.0, 0.0}, {0.0, 0.0}, 10.0));

  auto const east = fov_spec::sector(90.0, 90.0);
  EXPECT_TRUE(covers(east, {5.0, 0.0}, {0.0, 0.0}, 10.0));
  EXPECT_TRUE(covers(east, {5.0, 5.0}, {0.0, 0.0}, 10.0));   // on the 45 deg edge
  EXPECT_FALSE(covers(east, {4.0, 5.0}, {0.0, 0.0}, 10.0));
  EXPECT_FALSE(covers(east, {-5.0, 0.0}, {0.0, 0.0}, 10.0));
  EXPECT_TRUE(covers(east, {0.0, 0.0}, {0.0, 0.0}, 10.0));

  auto const north_wide = fov_spec::sector(0.0, 300.0);
  EXPECT_TRUE(covers(north_wide, {0.0, 5.0}, {0.0, 0.0}, 10.0));
  EXPECT_FALSE(covers(north_wide, {0.0, -5.0}, {0.0, 0.0}, 10.0));
}

TEST(camera, covers_agrees_with_margin_oracle) {
  auto rng = std::mt19937_64{17};
  auto u = std::uniform_real_distribution<double>{-30.0, 30.0};
  auto ang = std::uniform_real_distribution<double>{1.0, 359.0};
  for (auto i = 0; i < 20000; ++i) {
    auto const fov = i % 2 == 0 ? fov_spec::omni() : fov_spec::sector(ang(rng), ang(rng));
    auto const p = local_xy{u(rng), u(rng)};
    auto const m = oracle::coverage_margin(p, {0.0, 0.0}, fov, 20.0);
    if (std::abs(m) < 1e-9) {
      continue;
    }
    EXPECT_EQ(covers(fov, p, {0.0, 0.0}, 20.0), m > 0.0);
  }
}

TEST(camera, coverage_is_nested_in_radius) {
  auto rng = std::mt19937_64{23};
  auto u = std::uniform_real_distribution<double>{-40.0, 40.0};
  auto ang = std::uniform_real_distribution<double>{1.0, 359.0};
  for (auto i = 0; i < 5000; ++i) {
    auto const fov = fov_spec::sector(ang(rng), ang(rng));
    auto const p = local_xy{u(rng), u(rng)};
    if (covers(fov, p, {0.0, 0.0}, 10.0)) {
      EXPECT_TRUE(covers(fov, p, {0.0, 0.0}, 15.0));
      EXPECT_TRUE(covers(fov, p, {0.0, 0.0}, 25.0));
    }
  }
}

TEST(camera, parse_full_feature) {
  auto const cams = parse_cameras(one_feature(
      R"({"id":"a","fov":{"bearing_deg":45,"angle_deg":90},
          "radius_m":{"recognition":8.5},"optics":{"h_res_px":1920,"hfov_deg":60}})"));
  ASSERT_EQ(cams.size(), 1U);
  auto const& c = cams[0];
  EXPECT_EQ(c.id_, "a");
  EXPECT_DOUBLE_EQ(c.pos_.lat_, 62.24);
  EXPECT_DOUBLE_EQ(c.pos_.lon_, 25.75);
  EXPECT_FALSE(c.fov_.is_omni());
  EXPECT_DOUBLE_EQ(c.fov_.bearing_deg(), 45.0);
  EXPECT_DOUBLE_EQ(c.radius_m_.at(surveillance_task::kRecognition), 8.5);
  ASSERT_TRUE(c.optics_.has_value());
  EXPECT_EQ(c.optics_->h_res_px_, 1920);
}

TEST(camera, missing_fov_is_omni) {
  auto const cams = parse_cameras(one_feature(R"({"id":"a"})"));
  EXPECT_TRUE(cams.at(0).fov_.is_omni());
}

TEST(camera, schema_errors_name_the_field) {
  auto const msg = [](std::string const& props) {
    return std::string{expect_error([&] { parse_cameras(one_feature(props)); }).what()};
  };
  EXPECT_NE(msg(R"({"fov":"omni"})").find("field 'properties.id'"), std::string::npos);
  EXPECT_NE(msg(R"({"id":"a","fov":{"bearing_deg":0,"angle_deg":400}})").find("field 'fov'"),
            std::string::npos);
  EXPECT_NE(msg(R"({"id":"a","radius_m":{"recognition":-1}})")
                .find("field 'radius_m.recognition'"),
            std::string::npos);
  EXPECT_NE(msg(R"({"id":"a","radius_m":{"staring":3}})").find("unknown surveillance task"),
            std::string::npos);
  EXPECT_NE(msg(R"({"id":"a","optics":{"h_res_px":0,"hfov_deg":60}})")
                .find("optics.h_res_px"),
            std::string::npos);
  EXPECT_EQ(expect_error([] { parse_cameras("{not json"); }).kind(), error_kind::kParse);
}

TEST(camera, duplicate_ids_rejected) {
  auto const json = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"Point","coordinates":[25.75,62.24]},"properties":{"id":"x"}},
    {"type":"Feature","geometry":{"type":"Point","coordinates":[25.76,62.24]},"properties":{"id":"x"}}]})";
  EXPECT_EQ(expect_error([&] { parse_cameras(json); }).kind(), error_kind::kValidation);
}

TEST(camera, geojson_round_trip) {
  auto cams = std::vector<camera>{};
  cams.push_back({"o", {62.24, 25.75}, fov_spec::omni(), {}, {}});
  cams.push_back({"s",
                  {62.241, 25.751},
                  fov_spec::sector(300.0, 70.0),
                  {{surveillance_task::kDetection, 40.0}},
                  optics_spec{2560, 75.0}});
  EXPECT_EQ(parse_cameras(cameras_to_geojson(cams)), cams);
}
