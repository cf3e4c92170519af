#include <filesystem>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"

#include "cctv/error.h"
#include "cctv/experiment.h"
#include "cctv/io.h"
#include "cctv/synth.h"

using namespace cctv;

namespace {

std::string pair_json(std::string const& name, geo_point const a, geo_point const b) {
  return nlohmann::json{{"name", name},
                        {"origin", {{"lat", a.lat_}, {"lon", a.lon_}}},
                        {"destination", {{"lat", b.lat_}, {"lon", b.lon_}}}}
      .dump();
}

cell_result cell(double const len, route_status const s = route_status::kComplete) {
  auto c = cell_result{};
  c.status_ = s;
  c.length_m_ = s == route_status::kNoRoute ? 0.0 : len;
  return c;
}

}  // namespace

TEST(rounding, half_up) {
  EXPECT_DOUBLE_EQ(round_half_up(1.45, 1), 1.5);
  EXPECT_DOUBLE_EQ(round_half_up(1.44, 1), 1.4);
  EXPECT_DOUBLE_EQ(round_half_up(2.25, 1), 2.3);
  EXPECT_DOUBLE_EQ(round_half_up(194.5, 0), 195.0);
  EXPECT_DOUBLE_EQ(round_half_up(0.0, 2), 0.0);
}

TEST(rounding, overhead_factor) {
  EXPECT_DOUBLE_EQ(overhead_factor(1100.0, 760.0), 1.4);
  EXPECT_DOUBLE_EQ(overhead_factor(790.0, 800.0), 1.0);
  EXPECT_DOUBLE_EQ(overhead_factor(400.0, 200.0), 2.0);
  EXPECT_THROW(overhead_factor(10.0, 0.0), error);
}

TEST(formatting, distances) {
  EXPECT_EQ(format_distance(5180.0 / 6.0), "860m");
  EXPECT_EQ(format_distance(1280.0), "1.28km");
  EXPECT_EQ(format_distance(1945.0), "1.95km");
  EXPECT_EQ(format_distance(4300.0), "4.3km");
  EXPECT_EQ(format_distance(2200.0), "2.2km");
  EXPECT_EQ(format_distance(994.9), "990m");
  EXPECT_EQ(format_distance(995.0), "1km");
  EXPECT_EQ(format_distance(0.0), "0m");
  EXPECT_EQ(format_factor(2.0), "2.0x");
  EXPECT_EQ(format_factor(1.45), "1.5x");
}

TEST(summary, no_route_excluded_truncated_included) {
  auto rows = std::vector<summary_row>{};
  rows.push_back({{}, {cell(100.0), cell(300.0)}});
  rows.push_back({{}, {cell(200.0), cell(0.0, route_status::kNoRoute)}});
  rows.push_back({{}, {cell(300.0), cell(500.0, route_status::kTruncated)}});
  auto const avg = summarize(rows, 2U, 0U);
  ASSERT_EQ(avg.size(), 2U);
  EXPECT_DOUBLE_EQ(*avg[0].mean_length_m_, 200.0);
  EXPECT_DOUBLE_EQ(*avg[1].mean_length_m_, 400.0);
  EXPECT_EQ(avg[1].included_, 2U);
  EXPECT_EQ(avg[1].excluded_no_route_, 1U);
  EXPECT_DOUBLE_EQ(*avg[0].factor_, 1.0);
  EXPECT_DOUBLE_EQ(*avg[1].factor_, 2.0);
}

TEST(summary, all_no_route_has_no_mean) {
  auto rows = std::vector<summary_row>{{{}, {cell(100.0), cell(0.0, route_status::kNoRoute)}}};
  auto const avg = summarize(rows, 2U, 0U);
  EXPECT_FALSE(avg[1].mean_length_m_.has_value());
  EXPECT_FALSE(avg[1].factor_.has_value());
}

TEST(summary, reference_is_first_safety_mode) {
  auto const modes = std::vector<mode_spec>{{route_mode::kPrivacy, 10.0},
                                            {route_mode::kSafety, 15.0},
                                            {route_mode::kSafety, 10.0}};
  EXPECT_EQ(reference_mode(modes), 1U);
  EXPECT_FALSE(reference_mode(std::vector<mode_spec>{{route_mode::kPrivacy, 10.0}}));
}

TEST(spec, defaults_and_labels) {
  auto const spec =
      parse_experiment_spec(R"({"pairs":[)" + pair_json("a", {62.24, 25.75}, {62.241, 25.751}) +
                            "]}");
  ASSERT_EQ(spec.modes_.size(), 4U);
  EXPECT_EQ(spec.modes_[0].label(), "Safety [10m]");
  EXPECT_EQ(spec.modes_[3].label(), "Privacy [25m]");
  EXPECT_TRUE(spec.pairs_[0].via_.empty());
}

TEST(spec, bundled_pairs) {
  auto const spec = parse_experiment_spec(
      read_file((std::filesystem::path{CCTV_DATA_DIR} / "jyvaskyla_pairs.json").string()));
  ASSERT_EQ(spec.pairs_.size(), 6U);
  EXPECT_EQ(spec.modes_, experiment_spec::default_modes());
  EXPECT_DOUBLE_EQ(spec.pairs_[0].origin_.lat_, 62.240541);
  EXPECT_DOUBLE_EQ(spec.pairs_[5].destination_.lon_, 25.755215);
  ASSERT_EQ(spec.pairs_[5].via_.size(), 1U);
  EXPECT_DOUBLE_EQ(spec.pairs_[5].via_[0].lat_, 62.241531);
}

TEST(spec, schema_violations) {
  auto const p = pair_json("a", {62.24, 25.75}, {62.241, 25.751});
  auto const kind = [](std::string const& text) {
    try {
      parse_experiment_spec(text);
    } catch (error const& e) {
      return e.kind();
    }
    return error_kind::kIo;
  };
  EXPECT_EQ(kind(R"({"pairs":[)" + p + "," + p + "]}"), error_kind::kValidation);
  EXPECT_EQ(kind(R"({"pairs":[]})"), error_kind::kValidation);
  EXPECT_EQ(kind(R"({"pairs":[)" + p + R"(],"modes":[{"mode":"stealth","radius_m":10}]})"),
            error_kind::kValidation);
  EXPECT_EQ(kind(R"({"pairs":[)" + p + R"(],"modes":[{"mode":"privacy","radius_m":0}]})"),
            error_kind::kValidation);
  EXPECT_EQ(kind(R"({"pairs":[{"name":"x","origin":{"lat":1}}]})"), error_kind::kValidation);
  EXPECT_EQ(kind("[1,2"), error_kind::kParse);
}

TEST(run_matrix, two_route_row) {
  auto const f = synth::two_route_fixture();
  auto spec = experiment_spec{};
  spec.pairs_.push_back({"two", f.a_, f.b_, {}});
  spec.modes_ = {{route_mode::kSafety, 10.0}, {route_mode::kPrivacy, 10.0}};
  auto const t = run_matrix(spec, f.fx_.net_, f.fx_.cameras_);
  ASSERT_EQ(t.rows_.size(), 1U);
  auto const& cells = t.rows_[0].cells_;
  EXPECT_NEAR(cells[0].length_m_, 200.0, 1e-6);
  EXPECT_NEAR(cells[1].length_m_, 400.0, 1e-6);
  EXPECT_EQ(cells[1].overhead_, 2.0);
  EXPECT_EQ(t.averages_[1].factor_, 2.0);
  EXPECT_EQ(t.reference_mode_, 0U);
}

TEST(run_matrix, ring_report_markers) {
  auto const f = synth::ring_fixture(80.0);
  auto spec = experiment_spec{};
  spec.pairs_.push_back({"ring", f.origin_, f.destination_, {}});
  spec.modes_ = experiment_spec::default_modes();
  auto const t = run_matrix(spec, f.fx_.net_, f.fx_.cameras_);
  auto const& cells = t.rows_[0].cells_;
  EXPECT_EQ(cells[0].status_, route_status::kComplete);
  EXPECT_EQ(cells[1].status_, route_status::kTruncated);  // gap 90
  EXPECT_EQ(cells[2].status_, route_status::kTruncated);  // gap 95
  EXPECT_EQ(cells[3].status_, route_status::kNoRoute);    // gap 105

  auto const text = report_text(t);
  EXPECT_NE(text.find("(0.8x) [1]"), std::string::npos) << text;
  EXPECT_NE(text.find("no route (N/A) [3]"), std::string::npos) << text;
  EXPECT_NE(text.find("[1] route not complete"), std::string::npos);
  EXPECT_NE(text.find("[4] no-route results are excluded"), std::string::npos);
  EXPECT_EQ(text.find("[2]"), std::string::npos);
}

TEST(run_matrix, build_error_names_mode) {
  auto const f = synth::two_route_fixture();
  auto spec = experiment_spec{};
  spec.pairs_.push_back({"two", f.a_, f.b_, {}});
  spec.modes_ = {{route_mode::kPrivacy, 600.0}};
  try {
    run_matrix(spec, f.fx_.net_, f.fx_.cameras_);
    FAIL();
  } catch (error const& e) {
    EXPECT_NE(std::string{e.what()}.find("Privacy [600m]"), std::string::npos);
  }
}

TEST(report, files_written) {
  auto const f = synth::two_route_fixture();
  auto spec = experiment_spec{};
  spec.pairs_.push_back({"two route", f.a_, f.b_, {}});
  spec.modes_ = experiment_spec::default_modes();
  auto const t = run_matrix(spec, f.fx_.net_, f.fx_.cameras_);
  auto const dir = std::filesystem::temp_directory_path() / "cctv_report_test";
  std::filesystem::remove_all(dir);
  write_report(t, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.txt"));
  EXPECT_EQ(cell_file_name(spec.pairs_[0], spec.modes_[2]), "two_route__privacy_15m.geojson");
  EXPECT_TRUE(std::filesystem::exists(dir / "routes" / "two_route__privacy_15m.geojson"));

  auto const doc = nlohmann::json::parse(read_file((dir / "report.json").string()));
  EXPECT_EQ(doc["rows"].size(), 1U);
  EXPECT_EQ(doc["rows"][0]["cells"].size(), 4U);
  EXPECT_EQ(doc["rows"][0]["cells"][1]["status"], "complete");
  EXPECT_NEAR(doc["rows"][0]["cells"][1]["length_m"].get<double>(), 400.0, 1e-6);
  std::filesystem::remove_all(dir);
}
