#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cctv/geo.h"

namespace cctv {

using osm_id = std::int64_t;

struct osm_node {
  friend bool operator==(osm_node const&, osm_node const&) = default;

  osm_id id_{};
  geo_point pos_;
};

struct osm_way {
  friend bool operator==(osm_way const&, osm_way const&) = default;

  std::string_view tag(std::string_view key) const;

  osm_id id_{};
  std::vector<osm_id> node_refs_;
  std::map<std::string, std::string, std::less<>> tags_;
};

struct pedestrian_filter {
  static pedestrian_filter defaults();

  std::set<std::string, std::less<>> highway_;
};

// highway in the whitelist, foot != no, access != private.
bool is_pedestrian(osm_way const&,
                   pedestrian_filter const& = pedestrian_filter::defaults());

// Pedestrian ways plus exactly the nodes they reference. Ways are sorted by
// id; the projection origin is the centroid of the node bounding box.
class ped_network {
public:
  // Filters `ways` through `filter`, collapses repeated consecutive refs and
  // drops ways left with fewer than two refs. Throws kIntegrity for a
  // dangling ref in a retained way, kEmptyNetwork when nothing is retained.
  static ped_network from_elements(
      std::vector<osm_node> nodes, std::vector<osm_way> ways,
      pedestrian_filter const& = pedestrian_filter::defaults());

  std::map<osm_id, osm_node> const& nodes() const { return nodes_; }
  std::vector<osm_way> const& ways() const { return ways_; }
  geo_point origin() const { return origin_; }

  geo_point pos(osm_id const id) const { return nodes_.at(id).pos_; }

  friend bool operator==(ped_network const&, ped_network const&) = default;

private:
  ped_network() = default;

  std::map<osm_id, osm_node> nodes_;
  std::vector<osm_way> ways_;
  geo_point origin_;
};

// Parses OSM XML. Relations and unknown elements are skipped.
ped_network parse_osm(std::string_view xml,
                      pedestrian_filter const& = pedestrian_filter::defaults());

ped_network load_osm_file(std::string const& path,
                          pedestrian_filter const& = pedestrian_filter::defaults());

std::string to_osm_xml(ped_network const&);

struct network_stats {
  std::size_t nodes_{};
  std::size_t ways_{};
  double total_length_m_{};
};

double way_length(ped_network const&, osm_way const&);
network_stats compute_stats(ped_network const&);

}  // namespace cctv
