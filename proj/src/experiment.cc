#include "cctv/experiment.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "fmt/core.h"
#include "json.hpp"

#include "cctv/error.h"
#include "cctv/geojson.h"
#include "cctv/io.h"

namespace cctv {

namespace {

using json = nlohmann::json;

// Footnote markers of the text report.
constexpr auto const kMarkNotComplete = "[1]";
constexpr auto const kMarkVia = "[2]";
constexpr auto const kMarkNoRoute = "[3]";
constexpr auto const kMarkAverage = "[4]";

[[noreturn]] void spec_fail(std::string const& msg) {
  throw error{error_kind::kValidation, "experiment spec: " + msg};
}

std::string capitalized(std::string_view s) {
  auto out = std::string{s};
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::string format_radius(double const r) {
  return r == std::floor(r) ? fmt::format("{}", static_cast<long long>(r))
                            : fmt::format("{}", r);
}

std::string format_point(geo_point const p) {
  return fmt::format("{:.6f}, {:.6f}", p.lat_, p.lon_);
}

json point_json(geo_point const p) { return {{"lat", p.lat_}, {"lon", p.lon_}}; }

json optional_json(std::optional<double> const& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

json finite_json(double const v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string sanitize(std::string_view s) {
  auto out = std::string{};
  for (auto const c : s) {
    out += std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' ? c : '_';
  }
  return out;
}

}  // namespace

std::string mode_spec::label() const {
  return fmt::format("{} [{}m]", capitalized(to_str(mode_)), format_radius(radius_m_));
}

std::vector<mode_spec> experiment_spec::default_modes() {
  return {{route_mode::kSafety, 10.0},
          {route_mode::kPrivacy, 10.0},
          {route_mode::kPrivacy, 15.0},
          {route_mode::kPrivacy, 25.0}};
}

experiment_spec parse_experiment_spec(std::string_view const text) {
  auto doc = json{};
  try {
    doc = json::parse(text);
  } catch (json::parse_error const& e) {
    throw error{error_kind::kParse, fmt::format("experiment spec: {}", e.what())};
  }
  if (!doc.is_object()) {
    spec_fail("expected an object");
  }

  auto spec = experiment_spec{};
  auto const pairs = doc.find("pairs");
  if (pairs == doc.end() || !pairs->is_array() || pairs->empty()) {
    spec_fail("'pairs' must be a non-empty array");
  }
  auto names = std::set<std::string>{};
  for (auto i = 0U; i < pairs->size(); ++i) {
    auto const& p = (*pairs)[i];
    auto const field = fmt::format("pairs[{}]", i);
    if (!p.is_object() || !p.contains("name") || !p["name"].is_string()) {
      spec_fail(field + ".name: missing or not a string");
    }
    auto pair = od_pair{};
    pair.name_ = p["name"].get<std::string>();
    if (!names.insert(pair.name_).second) {
      spec_fail(fmt::format("duplicate pair name '{}'", pair.name_));
    }
    pair.origin_ = geo_point_from_json(p.value("origin", json{}), field + ".origin");
    pair.destination_ =
        geo_point_from_json(p.value("destination", json{}), field + ".destination");
    if (auto const via = p.find("via"); via != p.end()) {
      if (!via->is_array()) {
        spec_fail(field + ".via: expected an array");
      }
      for (auto j = 0U; j < via->size(); ++j) {
        pair.via_.push_back(
            geo_point_from_json((*via)[j], fmt::format("{}.via[{}]", field, j)));
      }
    }
    spec.pairs_.push_back(std::move(pair));
  }

  auto const modes = doc.find("modes");
  if (modes == doc.end()) {
    spec.modes_ = experiment_spec::default_modes();
    return spec;
  }
  if (!modes->is_array() || modes->empty()) {
    spec_fail("'modes' must be a non-empty array");
  }
  for (auto i = 0U; i < modes->size(); ++i) {
    auto const& m = (*modes)[i];
    auto const field = fmt::format("modes[{}]", i);
    auto const mode = m.is_object() && m.contains("mode") && m["mode"].is_string()
                          ? parse_mode(m["mode"].get<std::string>())
                          : std::nullopt;
    if (!mode.has_value()) {
      spec_fail(field + ".mode: expected privacy, safety or baseline");
    }
    auto const r = m.find("radius_m");
    if (r == m.end() || !r->is_number() || !(r->get<double>() > 0.0) ||
        r->get<double>() > coverage_config::kMaxGlobalRadius) {
      spec_fail(field + ".radius_m: expected a number in (0, 500]");
    }
    spec.modes_.push_back({*mode, r->get<double>()});
  }
  return spec;
}

double round_half_up(double const v, int const decimals) {
  auto const scale = std::pow(10.0, decimals);
  return std::floor(v * scale + 0.5 + 1e-9) / scale;
}

double overhead_factor(double const len_m, double const ref_len_m) {
  if (!(ref_len_m > 0.0)) {
    throw error{error_kind::kValidation,
                fmt::format("overhead reference length must be positive, got {}",
                            ref_len_m)};
  }
  return round_half_up(len_m / ref_len_m, 1);
}

std::string format_distance(double const meters) {
  auto const rounded = round_half_up(meters / 10.0, 0) * 10.0;
  if (rounded < 1000.0) {
    return fmt::format("{}m", static_cast<long long>(rounded));
  }
  auto km = fmt::format("{:.2f}", rounded / 1000.0);
  while (km.back() == '0') {
    km.pop_back();
  }
  if (km.back() == '.') {
    km.pop_back();
  }
  return km + "km";
}

std::string format_factor(double const factor) {
  return fmt::format("{:.1f}x", round_half_up(factor, 1));
}

std::optional<std::size_t> reference_mode(std::span<mode_spec const> modes) {
  for (auto i = 0U; i < modes.size(); ++i) {
    if (modes[i].mode_ == route_mode::kSafety) {
      return i;
    }
  }
  return std::nullopt;
}

std::vector<mode_average> summarize(std::span<summary_row const> rows,
                                    std::size_t const mode_count,
                                    std::optional<std::size_t> const reference) {
  auto out = std::vector<mode_average>(mode_count);
  for (auto m = 0U; m < mode_count; ++m) {
    auto sum = 0.0;
    for (auto const& row : rows) {
      auto const& c = row.cells_.at(m);
      if (c.status_ == route_status::kNoRoute) {
        ++out[m].excluded_no_route_;
      } else {
        sum += c.length_m_;
        ++out[m].included_;
      }
    }
    if (out[m].included_ != 0U) {
      out[m].mean_length_m_ = sum / static_cast<double>(out[m].included_);
    }
  }
  if (reference.has_value() && out[*reference].mean_length_m_.has_value() &&
      *out[*reference].mean_length_m_ > 0.0) {
    for (auto& avg : out) {
      if (avg.mean_length_m_.has_value()) {
        avg.factor_ =
            overhead_factor(*avg.mean_length_m_, *out[*reference].mean_length_m_);
      }
    }
  }
  return out;
}

summary_table run_matrix(experiment_spec const& spec, ped_network const& net,
                         std::span<camera const> cams, run_options const& opt) {
  if (spec.pairs_.empty() || spec.modes_.empty()) {
    spec_fail("needs at least one pair and one mode");
  }

  auto graphs = std::map<double, coverage_graph>{};
  for (auto const& m : spec.modes_) {
    if (graphs.contains(m.radius_m_)) {
      continue;
    }
    try {
      graphs.emplace(m.radius_m_,
                     coverage_graph::build(
                         net, cams, make_coverage_config(opt.task_, m.radius_m_)));
    } catch (error const& e) {
      throw error{e.kind(), fmt::format("{}: {}", m.label(), e.what())};
    }
  }

  auto table = summary_table{};
  table.modes_ = spec.modes_;
  table.reference_mode_ = reference_mode(spec.modes_);
  for (auto const& pair : spec.pairs_) {
    auto row = summary_row{pair, {}};
    for (auto const& m : spec.modes_) {
      auto req = route_request{};
      req.origin_ = pair.origin_;
      req.destination_ = pair.destination_;
      req.via_ = pair.via_;
      req.mode_ = m.mode_;
      req.beta_ = opt.beta_;
      req.complete_gap_m_ = opt.complete_gap_m_;
      req.snap_gap_max_m_ = opt.snap_gap_max_m_;
      auto r = route(req, graphs.at(m.radius_m_));
      row.cells_.push_back({r.status_, r.length_m_, r.exposure_m_, r.gap_origin_m_,
                            r.gap_destination_m_, std::nullopt,
                            r.overhead_vs_baseline_, std::move(r.polyline_)});
    }
    if (table.reference_mode_.has_value()) {
      auto const& ref = row.cells_[*table.reference_mode_];
      if (ref.status_ != route_status::kNoRoute && ref.length_m_ > 0.0) {
        for (auto& c : row.cells_) {
          if (c.status_ != route_status::kNoRoute) {
            c.overhead_ = overhead_factor(c.length_m_, ref.length_m_);
          }
        }
      }
    }
    table.rows_.push_back(std::move(row));
  }
  table.averages_ =
      summarize(table.rows_, table.modes_.size(), table.reference_mode_);
  return table;
}

std::string cell_file_name(od_pair const& p, mode_spec const& m) {
  return fmt::format("{}__{}_{}m.geojson", sanitize(p.name_), to_str(m.mode_),
                     format_radius(m.radius_m_));
}

std::string report_json(summary_table const& t) {
  auto modes = json::array();
  for (auto const& m : t.modes_) {
    modes.push_back(
        {{"mode", to_str(m.mode_)}, {"radius_m", m.radius_m_}, {"label", m.label()}});
  }

  auto rows = json::array();
  for (auto const& row : t.rows_) {
    auto via = json::array();
    for (auto const& v : row.pair_.via_) {
      via.push_back(point_json(v));
    }
    auto cells = json::array();
    for (auto m = 0U; m < t.modes_.size(); ++m) {
      auto const& c = row.cells_[m];
      cells.push_back({{"mode", to_str(t.modes_[m].mode_)},
                       {"radius_m", t.modes_[m].radius_m_},
                       {"status", to_str(c.status_)},
                       {"length_m", c.length_m_},
                       {"exposure_m", c.exposure_m_},
                       {"gap_origin_m", finite_json(c.gap_origin_m_)},
                       {"gap_destination_m", finite_json(c.gap_destination_m_)},
                       {"overhead", optional_json(c.overhead_)},
                       {"overhead_vs_baseline", optional_json(c.overhead_vs_baseline_)},
                       {"route_file", "routes/" + cell_file_name(row.pair_, t.modes_[m])}});
    }
    rows.push_back({{"name", row.pair_.name_},
                    {"origin", point_json(row.pair_.origin_)},
                    {"destination", point_json(row.pair_.destination_)},
                    {"via", std::move(via)},
                    {"cells", std::move(cells)}});
  }

  auto averages = json::array();
  for (auto m = 0U; m < t.modes_.size(); ++m) {
    auto const& a = t.averages_[m];
    averages.push_back(
        {{"mode", to_str(t.modes_[m].mode_)},
         {"radius_m", t.modes_[m].radius_m_},
         {"mean_length_m", optional_json(a.mean_length_m_)},
         {"rendered", a.mean_length_m_.has_value() ? format_distance(*a.mean_length_m_)
                                                   : "N/A"},
         {"factor", optional_json(a.factor_)},
         {"included", a.included_},
         {"excluded_no_route", a.excluded_no_route_}});
  }

  return json{{"modes", std::move(modes)},
              {"reference_mode", t.reference_mode_.has_value()
                                     ? json(*t.reference_mode_)
                                     : json(nullptr)},
              {"rows", std::move(rows)},
              {"averages", std::move(averages)}}
             .dump(2);
}

std::string report_text(summary_table const& t) {
  auto table = std::vector<std::vector<std::string>>{};

  auto header = std::vector<std::string>{"Route ID", "Departure point (GPS)",
                                         "Arrival point (GPS)"};
  for (auto m = 0U; m < t.modes_.size(); ++m) {
    header.push_back(t.reference_mode_ == m ? t.modes_[m].label()
                                            : t.modes_[m].label() + " (overhead)");
  }
  table.push_back(std::move(header));

  auto used = std::set<std::string_view>{};
  for (auto const& row : t.rows_) {
    auto line = std::vector<std::string>{row.pair_.name_, format_point(row.pair_.origin_),
                                         format_point(row.pair_.destination_)};
    for (auto m = 0U; m < t.modes_.size(); ++m) {
      auto const& c = row.cells_[m];
      auto cell = std::string{};
      if (c.status_ == route_status::kNoRoute) {
        cell = fmt::format("no route (N/A) {}", kMarkNoRoute);
        used.insert(kMarkNoRoute);
      } else {
        cell = format_distance(c.length_m_);
        if (t.reference_mode_ != m && c.overhead_.has_value()) {
          cell += " (" + format_factor(*c.overhead_) + ")";
        }
        if (c.status_ == route_status::kTruncated) {
          cell += fmt::format(" {}", kMarkNotComplete);
          used.insert(kMarkNotComplete);
        }
      }
      if (!row.pair_.via_.empty()) {
        cell += fmt::format(" {}", kMarkVia);
        used.insert(kMarkVia);
      }
      line.push_back(std::move(cell));
    }
    table.push_back(std::move(line));
  }

  auto avg = std::vector<std::string>{"--", "--", "Average"};
  for (auto m = 0U; m < t.modes_.size(); ++m) {
    auto const& a = t.averages_[m];
    auto cell = a.mean_length_m_.has_value() ? format_distance(*a.mean_length_m_)
                                             : std::string{"N/A"};
    if (t.reference_mode_ != m && a.factor_.has_value()) {
      cell += " (" + format_factor(*a.factor_) + ")";
    }
    if (a.excluded_no_route_ != 0U) {
      cell += fmt::format(" {}", kMarkAverage);
      used.insert(kMarkAverage);
    }
    avg.push_back(std::move(cell));
  }
  table.push_back(std::move(avg));

  auto widths = std::vector<std::size_t>(table.front().size(), 0U);
  for (auto const& line : table) {
    for (auto i = 0U; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], line[i].size());
    }
  }

  auto out = std::string{};
  auto const rule = [&]() {
    for (auto i = 0U; i < widths.size(); ++i) {
      out += std::string(widths[i] + 2U, '-');
      out += i + 1U == widths.size() ? "\n" : "+";
    }
  };
  for (auto l = 0U; l < table.size(); ++l) {
    if (l == 1U || l + 1U == table.size()) {
      rule();
    }
    for (auto i = 0U; i < table[l].size(); ++i) {
      out += fmt::format(" {:<{}} ", table[l][i], widths[i]);
      out += i + 1U == table[l].size() ? "\n" : "|";
    }
  }

  if (!used.empty()) {
    out += "\n";
  }
  if (used.contains(kMarkNotComplete)) {
    out += fmt::format(
        "{} route not complete: the final distance could not be covered "
        "without entering camera coverage\n",
        kMarkNotComplete);
  }
  if (used.contains(kMarkVia)) {
    out += fmt::format("{} routed through an intermediate stop-point\n", kMarkVia);
  }
  if (used.contains(kMarkNoRoute)) {
    out += fmt::format(
        "{} no route: no privacy-preserving route reaches the arrival point "
        "within the allowed gap\n",
        kMarkNoRoute);
  }
  if (used.contains(kMarkAverage)) {
    out += fmt::format("{} no-route results are excluded from the average\n",
                       kMarkAverage);
  }
  return out;
}

void write_report(summary_table const& t, std::filesystem::path const& out_dir) {
  write_file(out_dir / "report.json", report_json(t));
  write_file(out_dir / "report.txt", report_text(t));
  for (auto const& row : t.rows_) {
    for (auto m = 0U; m < t.modes_.size(); ++m) {
      auto const& c = row.cells_[m];
      auto const feature = json{
          {"type", "Feature"},
          {"geometry", to_geojson_line(c.polyline_)},
          {"properties",
           {{"pair", row.pair_.name_},
            {"mode", to_str(t.modes_[m].mode_)},
            {"radius_m", t.modes_[m].radius_m_},
            {"status", to_str(c.status_)},
            {"length_m", c.length_m_},
            {"exposure_m", c.exposure_m_}}}};
      write_file(out_dir / "routes" / cell_file_name(row.pair_, t.modes_[m]),
                 json{{"type", "FeatureCollection"}, {"features", {feature}}}.dump());
    }
  }
}

}  // namespace cctv
