#include "cctv/osm.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <exception>
#include <memory>
#include <limits>
#include <optional>
#include <unordered_map>

#include "expat.h"
#include "fmt/core.h"

#include "cctv/error.h"
#include "cctv/io.h"

namespace cctv {

namespace {

template <typename T>
std::optional<T> parse_number(char const* s) {
  auto const len = std::strlen(s);
  auto v = T{};
  auto const [ptr, ec] = std::from_chars(s, s + len, v);
  if (ec != std::errc{} || ptr != s + len) {
    return std::nullopt;
  }
  return v;
}

char const* find_attr(char const** attrs, char const* name) {
  for (auto i = 0U; attrs[i] != nullptr; i += 2U) {
    if (std::strcmp(attrs[i], name) == 0) {
      return attrs[i + 1U];
    }
  }
  return nullptr;
}

struct xml_state {
  enum class in { kNone, kNode, kWay };

  std::uint64_t line() const { return XML_GetCurrentLineNumber(parser_); }

  [[noreturn]] void fail(std::string const& msg) const {
    throw parse_error{line(), msg};
  }

  char const* required(char const** attrs, char const* elem,
                       char const* name) const {
    auto const v = find_attr(attrs, name);
    if (v == nullptr) {
      fail(fmt::format("<{}> without '{}' attribute", elem, name));
    }
    return v;
  }

  template <typename T>
  T required_number(char const** attrs, char const* elem,
                    char const* name) const {
    auto const raw = required(attrs, elem, name);
    auto const v = parse_number<T>(raw);
    if (!v.has_value()) {
      fail(fmt::format("<{}> attribute '{}' is not a number: '{}'", elem, name,
                       raw));
    }
    return *v;
  }

  void start(char const* name, char const** attrs) {
    if (std::strcmp(name, "node") == 0) {
      auto const id = required_number<osm_id>(attrs, "node", "id");
      auto const lat = required_number<double>(attrs, "node", "lat");
      auto const lon = required_number<double>(attrs, "node", "lon");
      auto const pos = geo_point{lat, lon};
      if (!is_valid(pos)) {
        fail(fmt::format("node {} has out-of-range coordinates", id));
      }
      nodes_.push_back({id, pos});
      current_ = in::kNode;
    } else if (std::strcmp(name, "way") == 0) {
      way_ = osm_way{};
      way_.id_ = required_number<osm_id>(attrs, "way", "id");
      current_ = in::kWay;
    } else if (current_ == in::kWay && std::strcmp(name, "nd") == 0) {
      way_.node_refs_.push_back(required_number<osm_id>(attrs, "nd", "ref"));
    } else if (current_ == in::kWay && std::strcmp(name, "tag") == 0) {
      way_.tags_.emplace(required(attrs, "tag", "k"), required(attrs, "tag", "v"));
    }
  }

  void end(char const* name) {
    if (std::strcmp(name, "way") == 0 && current_ == in::kWay) {
      ways_.push_back(std::move(way_));
      way_ = osm_way{};
      current_ = in::kNone;
    } else if (std::strcmp(name, "node") == 0 && current_ == in::kNode) {
      current_ = in::kNone;
    }
  }

  XML_Parser parser_{nullptr};
  std::exception_ptr pending_;
  in current_{in::kNone};
  osm_way way_;
  std::vector<osm_node> nodes_;
  std::vector<osm_way> ways_;
};

// Exceptions must not unwind through expat's C frames.
void XMLCALL on_start(void* user, char const* name, char const** attrs) {
  auto const state = static_cast<xml_state*>(user);
  try {
    state->start(name, attrs);
  } catch (...) {
    state->pending_ = std::current_exception();
    XML_StopParser(state->parser_, XML_FALSE);
  }
}

void XMLCALL on_end(void* user, char const* name) {
  static_cast<xml_state*>(user)->end(name);
}

struct parser_deleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

std::string escape_xml(std::string_view s) {
  auto out = std::string{};
  out.reserve(s.size());
  for (auto const c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view osm_way::tag(std::string_view const key) const {
  auto const it = tags_.find(key);
  return it == end(tags_) ? std::string_view{} : std::string_view{it->second};
}

pedestrian_filter pedestrian_filter::defaults() {
  return {{"footway", "path", "pedestrian", "steps", "living_street",
           "residential", "service", "track", "unclassified", "tertiary",
           "secondary", "primary", "cycleway"}};
}

bool is_pedestrian(osm_way const& w, pedestrian_filter const& filter) {
  auto const highway = w.tag("highway");
  return !highway.empty() && filter.highway_.contains(highway) &&
         w.tag("foot") != "no" && w.tag("access") != "private";
}

ped_network ped_network::from_elements(std::vector<osm_node> nodes,
                                       std::vector<osm_way> ways,
                                       pedestrian_filter const& filter) {
  auto by_id = std::unordered_map<osm_id, geo_point>{};
  by_id.reserve(nodes.size());
  for (auto const& n : nodes) {
    if (!by_id.emplace(n.id_, n.pos_).second) {
      throw error{error_kind::kIntegrity,
                  fmt::format("duplicate node id {}", n.id_)};
    }
  }

  auto net = ped_network{};
  for (auto& w : ways) {
    if (!is_pedestrian(w, filter)) {
      continue;
    }
    auto& refs = w.node_refs_;
    refs.erase(std::unique(begin(refs), end(refs)), end(refs));
    if (refs.size() < 2U) {
      continue;
    }
    for (auto const ref : refs) {
      auto const it = by_id.find(ref);
      if (it == end(by_id)) {
        throw error{error_kind::kIntegrity,
                    fmt::format("way {} references missing node {}", w.id_, ref)};
      }
      net.nodes_.emplace(ref, osm_node{ref, it->second});
    }
    net.ways_.push_back(std::move(w));
  }

  if (net.ways_.empty()) {
    throw error{error_kind::kEmptyNetwork, "no pedestrian ways in input"};
  }

  std::stable_sort(begin(net.ways_), end(net.ways_),
                   [](auto const& a, auto const& b) { return a.id_ < b.id_; });
  for (auto i = 1U; i < net.ways_.size(); ++i) {
    if (net.ways_[i - 1U].id_ == net.ways_[i].id_) {
      throw error{error_kind::kIntegrity,
                  fmt::format("duplicate way id {}", net.ways_[i].id_)};
    }
  }

  auto min_lat = std::numeric_limits<double>::max();
  auto max_lat = std::numeric_limits<double>::lowest();
  auto min_lon = min_lat;
  auto max_lon = max_lat;
  for (auto const& [id, n] : net.nodes_) {
    min_lat = std::min(min_lat, n.pos_.lat_);
    max_lat = std::max(max_lat, n.pos_.lat_);
    min_lon = std::min(min_lon, n.pos_.lon_);
    max_lon = std::max(max_lon, n.pos_.lon_);
  }
  net.origin_ = {(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0};
  return net;
}

ped_network parse_osm(std::string_view const xml,
                      pedestrian_filter const& filter) {
  auto parser = std::unique_ptr<XML_ParserStruct, parser_deleter>{
      XML_ParserCreate(nullptr)};
  auto state = xml_state{};
  state.parser_ = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);

  if (xml.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw error{error_kind::kParse, "input too large"};
  }
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()),
                XML_TRUE) == XML_STATUS_ERROR) {
    if (state.pending_) {
      std::rethrow_exception(state.pending_);
    }
    throw parse_error{XML_GetCurrentLineNumber(parser.get()),
                      XML_ErrorString(XML_GetErrorCode(parser.get()))};
  }

  return ped_network::from_elements(std::move(state.nodes_),
                                    std::move(state.ways_), filter);
}

ped_network load_osm_file(std::string const& path,
                          pedestrian_filter const& filter) {
  return parse_osm(read_file(path), filter);
}

std::string to_osm_xml(ped_network const& net) {
  auto out = std::string{
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<osm version=\"0.6\" generator=\"cctv-route\">\n"};
  for (auto const& [id, n] : net.nodes()) {
    out += fmt::format("  <node id=\"{}\" lat=\"{}\" lon=\"{}\"/>\n", id,
                       n.pos_.lat_, n.pos_.lon_);
  }
  for (auto const& w : net.ways()) {
    out += fmt::format("  <way id=\"{}\">\n", w.id_);
    for (auto const ref : w.node_refs_) {
      out += fmt::format("    <nd ref=\"{}\"/>\n", ref);
    }
    for (auto const& [k, v] : w.tags_) {
      out += fmt::format("    <tag k=\"{}\" v=\"{}\"/>\n", escape_xml(k),
                         escape_xml(v));
    }
    out += "  </way>\n";
  }
  out += "</osm>\n";
  return out;
}

double way_length(ped_network const& net, osm_way const& w) {
  auto len = 0.0;
  for (auto i = 1U; i < w.node_refs_.size(); ++i) {
    len += haversine_distance(net.pos(w.node_refs_[i - 1U]),
                              net.pos(w.node_refs_[i]));
  }
  return len;
}

network_stats compute_stats(ped_network const& net) {
  auto s = network_stats{net.nodes().size(), net.ways().size(), 0.0};
  for (auto const& w : net.ways()) {
    s.total_length_m_ += way_length(net, w);
  }
  return s;
}

}  // namespace cctv
