#include "wsnids/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <random>
#include <stdexcept>

namespace wsnids {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Axial direction order used for ring walks; fixed so cell numbering is
// reproducible.
constexpr int kAxialDirs[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};

Position hex_center(int q, int r, double radius) {
  return Position{radius * kSqrt3 * (q + r / 2.0), radius * 1.5 * r};
}

// Pointy-top hexagon with circumradius R centered at the origin.
bool point_in_hex(double x, double y, double radius) {
  const double in_r = radius * kSqrt3 / 2.0;
  if (std::abs(x) > in_r) return false;
  return std::abs(y) <= radius - std::abs(x) / kSqrt3;
}

// Cells in spiral order: origin, then concentric rings.
std::vector<std::pair<int, int>> spiral_cells(int count) {
  std::vector<std::pair<int, int>> out;
  out.reserve(count);
  out.emplace_back(0, 0);
  for (int ring = 1; static_cast<int>(out.size()) < count; ++ring) {
    int q = -ring;
    int r = ring;
    for (int side = 0; side < 6; ++side) {
      for (int step = 0; step < ring; ++step) {
        if (static_cast<int>(out.size()) >= count) return out;
        out.emplace_back(q, r);
        q += kAxialDirs[side][0];
        r += kAxialDirs[side][1];
      }
    }
  }
  out.resize(count);
  return out;
}

}  // namespace

const NodeInfo& Topology::node(NodeId id) const {
  if (!has_node(id)) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

bool Topology::has_node(NodeId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
}

NodeId Topology::regional_of_region(int region_index) const {
  return regionals_.at(static_cast<std::size_t>(region_index));
}

NodeId Topology::cluster_of_cell(int cell_index) const {
  return cluster_by_cell_.at(static_cast<std::size_t>(cell_index));
}

const std::vector<NodeId>& Topology::sensors_of_cell(int cell_index) const {
  return sensors_by_cell_.at(static_cast<std::size_t>(cell_index));
}

const std::vector<int>& Topology::cells_of_region(int region_index) const {
  return cells_by_region_.at(static_cast<std::size_t>(region_index));
}

NodeId Topology::cluster_of(NodeId sensor) const {
  const NodeInfo& n = node(sensor);
  if (n.role != NodeRole::Sensor) throw std::invalid_argument("cluster_of: not a sensor");
  return cluster_of_cell(n.cell_index);
}

NodeId Topology::region_of(NodeId cluster) const {
  const NodeInfo& n = node(cluster);
  if (n.role != NodeRole::ClusterNode)
    throw std::invalid_argument("region_of: not a cluster node");
  return regional_of_region(n.region_index);
}

const std::set<int>& Topology::neighbor_cells(int cell_index) const {
  return cell_neighbors_.at(static_cast<std::size_t>(cell_index));
}

const std::set<int>& Topology::neighbor_regions(int region_index) const {
  return region_neighbors_.at(static_cast<std::size_t>(region_index));
}

double Topology::range_of(NodeId id) const {
  switch (node(id).role) {
    case NodeRole::Sensor: return cfg_.radio_range;
    case NodeRole::ClusterNode: return cfg_.radio_range * cfg_.cluster_range_boost;
    case NodeRole::RegionalNode: return cfg_.radio_range * cfg_.regional_range_boost;
    case NodeRole::BaseStation: return cfg_.radio_range * cfg_.base_range_boost;
  }
  return cfg_.radio_range;
}

int Topology::cell_at(const Position& p) const {
  int best = -1;
  double best_dist = 0.0;
  for (int i = 0; i < cell_count(); ++i) {
    const HexCell& c = cells_[static_cast<std::size_t>(i)];
    const double d = distance(p, c.center);
    if (best < 0 || d < best_dist) {
      best = i;
      best_dist = d;
    } else if (d == best_dist) {
      const HexCell& b = cells_[static_cast<std::size_t>(best)];
      if (std::pair{c.axial_q, c.axial_r} < std::pair{b.axial_q, b.axial_r}) best = i;
    }
  }
  return best;
}

std::string Topology::dump() const {
  std::string out;
  char line[160];
  for (const NodeInfo& n : nodes_) {
    std::snprintf(line, sizeof(line), "%d %s %.3f %.3f %d %d\n", n.id, to_string(n.role),
                  n.pos.x, n.pos.y, n.cell_index, n.region_index);
    out += line;
  }
  return out;
}

Topology build_topology(const TopologyConfig& cfg) {
  if (cfg.regions < 1 || cfg.cells_per_region < 1 || cfg.sensors_per_cell < 1)
    throw std::invalid_argument("topology counts must be >= 1");
  if (cfg.cell_radius <= 0.0) throw std::invalid_argument("cell_radius must be > 0");
  if (cfg.radio_range <= 0.0) throw std::invalid_argument("radio_range must be > 0");
  if (cfg.cluster_range_boost < 1.0 || cfg.regional_range_boost < 1.0 ||
      cfg.base_range_boost < 1.0)
    throw std::invalid_argument("range boosts must be >= 1");

  Topology topo;
  topo.cfg_ = cfg;

  const int total_cells = cfg.regions * cfg.cells_per_region;
  const auto coords = spiral_cells(total_cells);
  topo.cells_.reserve(static_cast<std::size_t>(total_cells));
  for (const auto& [q, r] : coords)
    topo.cells_.push_back(HexCell{q, r, hex_center(q, r, cfg.cell_radius), cfg.cell_radius});

  topo.cells_by_region_.assign(static_cast<std::size_t>(cfg.regions), {});
  for (int i = 0; i < total_cells; ++i)
    topo.cells_by_region_[static_cast<std::size_t>(i / cfg.cells_per_region)].push_back(i);

  // Cell adjacency: hex edge neighbors that exist in the layout.
  topo.cell_neighbors_.assign(static_cast<std::size_t>(total_cells), {});
  std::map<std::pair<int, int>, int> by_coord;
  for (int i = 0; i < total_cells; ++i) by_coord[{coords[i].first, coords[i].second}] = i;
  for (int i = 0; i < total_cells; ++i) {
    for (const auto& d : kAxialDirs) {
      auto it = by_coord.find({coords[i].first + d[0], coords[i].second + d[1]});
      if (it != by_coord.end()) topo.cell_neighbors_[static_cast<std::size_t>(i)].insert(it->second);
    }
  }

  // Regions form a complete neighbor graph; regional nodes are few and all
  // reachable from the base station.
  topo.region_neighbors_.assign(static_cast<std::size_t>(cfg.regions), {});
  for (int a = 0; a < cfg.regions; ++a)
    for (int b = 0; b < cfg.regions; ++b)
      if (a != b) topo.region_neighbors_[static_cast<std::size_t>(a)].insert(b);

  // Node ids: base 0, then regionals, clusters, sensors.
  NodeId next_id = 0;
  auto add_node = [&](NodeRole role, Position pos, int cell, int region) {
    NodeInfo n;
    n.id = next_id++;
    n.role = role;
    n.pos = pos;
    n.cell_index = cell;
    n.region_index = region;
    topo.nodes_.push_back(n);
    return n.id;
  };

  Position global{0.0, 0.0};
  for (const HexCell& c : topo.cells_) {
    global.x += c.center.x;
    global.y += c.center.y;
  }
  global.x /= total_cells;
  global.y /= total_cells;
  topo.base_ = add_node(NodeRole::BaseStation, global, -1, -1);

  for (int g = 0; g < cfg.regions; ++g) {
    Position centroid{0.0, 0.0};
    for (int ci : topo.cells_by_region_[static_cast<std::size_t>(g)]) {
      centroid.x += topo.cells_[static_cast<std::size_t>(ci)].center.x;
      centroid.y += topo.cells_[static_cast<std::size_t>(ci)].center.y;
    }
    centroid.x /= cfg.cells_per_region;
    centroid.y /= cfg.cells_per_region;
    topo.regionals_.push_back(add_node(NodeRole::RegionalNode, centroid, -1, g));
  }

  topo.cluster_by_cell_.resize(static_cast<std::size_t>(total_cells));
  for (int i = 0; i < total_cells; ++i) {
    const int region = i / cfg.cells_per_region;
    topo.cluster_by_cell_[static_cast<std::size_t>(i)] =
        add_node(NodeRole::ClusterNode, topo.cells_[static_cast<std::size_t>(i)].center, i, region);
  }

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  topo.sensors_by_cell_.assign(static_cast<std::size_t>(total_cells), {});
  const double in_r = cfg.cell_radius * kSqrt3 / 2.0;
  for (int i = 0; i < total_cells; ++i) {
    const HexCell& c = topo.cells_[static_cast<std::size_t>(i)];
    for (int s = 0; s < cfg.sensors_per_cell; ++s) {
      double dx = 0.0, dy = 0.0;
      do {
        dx = unit(rng) * in_r;
        dy = unit(rng) * cfg.cell_radius;
      } while (!point_in_hex(dx, dy, cfg.cell_radius));
      const int region = i / cfg.cells_per_region;
      topo.sensors_by_cell_[static_cast<std::size_t>(i)].push_back(
          add_node(NodeRole::Sensor, Position{c.center.x + dx, c.center.y + dy}, i, region));
    }
  }

  return topo;
}

std::optional<NodeId> neighbor_of(const Topology& topo, NodeId failed,
                                  const std::vector<bool>& alive) {
  const NodeInfo& f = topo.node(failed);
  std::vector<NodeId> candidates;
  if (f.role == NodeRole::ClusterNode) {
    for (int c : topo.neighbor_cells(f.cell_index)) candidates.push_back(topo.cluster_of_cell(c));
  } else if (f.role == NodeRole::RegionalNode) {
    for (int g : topo.neighbor_regions(f.region_index))
      candidates.push_back(topo.regional_of_region(g));
  } else {
    throw std::invalid_argument("neighbor_of: node is not a cluster or regional node");
  }

  std::optional<NodeId> best;
  double best_dist = 0.0;
  for (NodeId cand : candidates) {
    if (static_cast<std::size_t>(cand) < alive.size() && !alive[static_cast<std::size_t>(cand)])
      continue;
    const double d = distance(topo.node(cand).pos, f.pos);
    if (!best || d < best_dist || (d == best_dist && cand < *best)) {
      best = cand;
      best_dist = d;
    }
  }
  return best;
}

std::optional<std::vector<NodeId>> expected_route(const Topology& topo, NodeId src, NodeId dst,
                                                  const std::vector<bool>& alive) {
  const auto usable = [&](NodeId id) {
    return static_cast<std::size_t>(id) >= alive.size() || alive[static_cast<std::size_t>(id)];
  };
  if (!topo.has_node(src) || !topo.has_node(dst)) return std::nullopt;
  if (!usable(src) || !usable(dst)) return std::nullopt;
  if (src == dst) return std::vector<NodeId>{src};

  const auto& nodes = topo.nodes();
  const int n = static_cast<int>(nodes.size());

  // Hops-to-dst over reverse edges; an edge a->b needs b within a's reach.
  constexpr int kUnreached = -1;
  std::vector<int> dist(static_cast<std::size_t>(n), kUnreached);
  dist[static_cast<std::size_t>(dst)] = 0;
  std::deque<NodeId> frontier{dst};
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (v == u || dist[static_cast<std::size_t>(v)] != kUnreached || !usable(v)) continue;
      if (distance(nodes[static_cast<std::size_t>(v)].pos, nodes[static_cast<std::size_t>(u)].pos) <=
          topo.range_of(v)) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  if (dist[static_cast<std::size_t>(src)] == kUnreached) return std::nullopt;

  // Greedy walk toward dst taking the lowest-id node that stays on a
  // shortest path; this yields the lexicographically smallest sequence.
  std::vector<NodeId> path{src};
  NodeId cur = src;
  while (cur != dst) {
    const int want = dist[static_cast<std::size_t>(cur)] - 1;
    NodeId next = kInvalidNode;
    for (NodeId v = 0; v < n; ++v) {
      if (v == cur || dist[static_cast<std::size_t>(v)] != want || !usable(v)) continue;
      if (distance(nodes[static_cast<std::size_t>(cur)].pos,
                   nodes[static_cast<std::size_t>(v)].pos) <= topo.range_of(cur)) {
        next = v;
        break;  // ids scanned in ascending order
      }
    }
    if (next == kInvalidNode) return std::nullopt;
    path.push_back(next);
    cur = next;
  }
  return path;
}

std::optional<std::vector<NodeId>> expected_route(const Topology& topo, NodeId src, NodeId dst) {
  return expected_route(topo, src, dst, {});
}

}  // namespace wsnids
