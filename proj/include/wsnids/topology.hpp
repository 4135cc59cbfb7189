#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsnids/types.hpp"

namespace wsnids {

// Axial hex coordinates, pointy-top orientation. radius is the circumradius
// (center to corner) in meters.
struct HexCell {
  int axial_q = 0;
  int axial_r = 0;
  Position center;
  double radius = 0.0;
};

struct TopologyConfig {
  int regions = 1;
  int cells_per_region = 1;
  int sensors_per_cell = 1;
  double cell_radius = 50.0;
  std::uint64_t rng_seed = 1;
  // Disk-model radio reach of a sensor-tier transmitter, meters. Upper tiers
  // scale this by their role boost.
  double radio_range = 125.0;
  // Range multipliers per transmitter role; monitors ship with more radio.
  double cluster_range_boost = 3.0;
  double regional_range_boost = 6.0;
  double base_range_boost = 8.0;
};

struct NodeInfo {
  NodeId id = kInvalidNode;
  NodeRole role = NodeRole::Sensor;
  Position pos;
  int cell_index = -1;    // owning cell, -1 for regional/base
  int region_index = -1;  // -1 for base
};

// The built network: hex cells, the sensor->cluster->regional->base chain,
// and the adjacency/routing maps. Immutable after build; safe to share
// read-only across threads.
class Topology {
 public:
  const TopologyConfig& config() const { return cfg_; }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const NodeInfo& node(NodeId id) const;
  bool has_node(NodeId id) const;

  const std::vector<HexCell>& cells() const { return cells_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int region_count() const { return cfg_.regions; }

  NodeId base_station() const { return base_; }
  int region_of_cell(int cell_index) const { return cell_index / cfg_.cells_per_region; }
  NodeId regional_of_region(int region_index) const;
  NodeId cluster_of_cell(int cell_index) const;
  const std::vector<NodeId>& sensors_of_cell(int cell_index) const;
  const std::vector<int>& cells_of_region(int region_index) const;

  // Parent links: sensor -> cluster node, cluster node -> regional node.
  NodeId cluster_of(NodeId sensor) const;
  NodeId region_of(NodeId cluster) const;

  const std::set<int>& neighbor_cells(int cell_index) const;
  const std::set<int>& neighbor_regions(int region_index) const;

  // Effective transmit reach for a node (sensor range x role boost).
  double range_of(NodeId id) const;

  // Cell index containing a position (nearest hex center; exact ties go to
  // the lexicographically lowest (q, r)).
  int cell_at(const Position& p) const;

  // One node per line: id, role, x, y, cell, region.
  std::string dump() const;

  friend Topology build_topology(const TopologyConfig& cfg);

 private:
  TopologyConfig cfg_;
  std::vector<NodeInfo> nodes_;
  std::vector<HexCell> cells_;
  NodeId base_ = kInvalidNode;
  std::vector<NodeId> regionals_;                 // by region index
  std::vector<NodeId> cluster_by_cell_;           // by cell index
  std::vector<std::vector<NodeId>> sensors_by_cell_;
  std::vector<std::vector<int>> cells_by_region_;
  std::vector<std::set<int>> cell_neighbors_;
  std::vector<std::set<int>> region_neighbors_;
};

// Builds the four-tier network. Cells are laid out in a hex spiral from the
// origin and assigned to regions in consecutive runs of cells_per_region.
// Cluster nodes sit at cell centers, regional nodes at the centroid of their
// cells, the base station at the global centroid. Sensor positions are drawn
// uniformly inside their cell from rng_seed, so the same config always
// produces the same network. Throws std::invalid_argument on zero counts or
// non-positive radius/range.
Topology build_topology(const TopologyConfig& cfg);

// Nearest alive neighbor of a failed cluster or regional node: minimum
// center distance, ties broken by lowest NodeId. alive(id) must answer for
// every candidate. Returns nullopt when every neighbor is down.
std::optional<NodeId> neighbor_of(const Topology& topo, NodeId failed,
                                  const std::vector<bool>& alive);

// Minimum-hop path from src to dst over the directed disk graph
// (edge a->b iff distance <= range_of(a)), restricted to alive nodes.
// Among equal-hop paths returns the lexicographically smallest NodeId
// sequence. Returns nullopt when dst is unreachable.
std::optional<std::vector<NodeId>> expected_route(const Topology& topo, NodeId src,
                                                  NodeId dst,
                                                  const std::vector<bool>& alive);

// Convenience overload with every node alive.
std::optional<std::vector<NodeId>> expected_route(const Topology& topo, NodeId src,
                                                  NodeId dst);

}  // namespace wsnids
