#include "fogcache/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fogcache/numeric.hpp"

namespace fogcache::netmodel {

int Topology::index_of(int node_id) const {
  auto it = std::find(nodes.begin(), nodes.end(), node_id);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

bool Topology::is_cdc(int node_id) const {
  return std::find(cdc_nodes.begin(), cdc_nodes.end(), node_id) !=
         cdc_nodes.end();
}

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

// Adjacency as (neighbor id, link index), sorted by neighbor id so that
// traversals are deterministic.
std::vector<std::vector<std::pair<int, int>>> adjacency(const Topology& t) {
  std::vector<std::vector<std::pair<int, int>>> adj(t.nodes.size());
  for (size_t l = 0; l < t.links.size(); ++l) {
    int ia = t.index_of(t.links[l].a);
    int ib = t.index_of(t.links[l].b);
    adj[ia].push_back({t.links[l].b, static_cast<int>(l)});
    adj[ib].push_back({t.links[l].a, static_cast<int>(l)});
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

std::vector<int> unreachable_from_first(const Topology& t) {
  if (t.nodes.empty()) return {};
  auto adj = adjacency(t);
  std::vector<bool> seen(t.nodes.size(), false);
  std::vector<int> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [nid, lnk] : adj[u]) {
      int v = t.index_of(nid);
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> missing;
  for (size_t i = 0; i < t.nodes.size(); ++i)
    if (!seen[i]) missing.push_back(t.nodes[i]);
  return missing;
}

}  // namespace

void validate(const Topology& topo) {
  if (topo.nodes.empty())
    throw std::invalid_argument("topology: node list is empty");
  std::set<int> ids(topo.nodes.begin(), topo.nodes.end());
  if (ids.size() != topo.nodes.size())
    throw std::invalid_argument("topology: duplicate node ids");
  for (const Link& l : topo.links) {
    if (!ids.count(l.a) || !ids.count(l.b))
      throw std::invalid_argument("topology: link " + std::to_string(l.a) +
                                  "-" + std::to_string(l.b) +
                                  " references an unknown node");
    if (l.a == l.b)
      throw std::invalid_argument("topology: self-loop at node " +
                                  std::to_string(l.a));
    if (!(l.length_km > 0.0))
      throw std::invalid_argument("topology: link " + std::to_string(l.a) +
                                  "-" + std::to_string(l.b) +
                                  " has non-positive length");
  }
  std::set<std::pair<int, int>> seen;
  for (const Link& l : topo.links) {
    auto key = std::minmax(l.a, l.b);
    if (!seen.insert({key.first, key.second}).second)
      throw std::invalid_argument("topology: duplicate link " +
                                  std::to_string(l.a) + "-" +
                                  std::to_string(l.b));
  }
  if (topo.cdc_nodes.empty())
    throw std::invalid_argument("topology: CDC set is empty");
  std::set<int> cdc(topo.cdc_nodes.begin(), topo.cdc_nodes.end());
  if (cdc.size() != topo.cdc_nodes.size())
    throw std::invalid_argument("topology: duplicate CDC ids");
  for (int c : topo.cdc_nodes)
    if (!ids.count(c))
      throw std::invalid_argument("topology: CDC node " + std::to_string(c) +
                                  " is not in the node list");
  std::vector<int> missing = unreachable_from_first(topo);
  if (!missing.empty())
    throw std::invalid_argument(
        "topology: disconnected graph, nodes {" + join_ids(missing) +
        "} unreachable from node " + std::to_string(topo.nodes.front()));
}

Topology build_nsfnet() {
  Topology t;
  t.nodes.resize(14);
  for (int i = 0; i < 14; ++i) t.nodes[i] = i + 1;
  t.links = {
      {1, 2, 1100},  {1, 3, 1600},  {1, 8, 2800}, {2, 3, 600},
      {2, 4, 1000},  {3, 6, 2000},  {4, 5, 600},  {4, 11, 2400},
      {5, 6, 1100},  {5, 7, 800},   {6, 10, 1200}, {6, 13, 2000},
      {7, 8, 700},   {8, 9, 700},   {9, 10, 900}, {9, 12, 500},
      {10, 13, 500}, {11, 12, 800}, {11, 14, 800}, {12, 14, 300},
      {13, 14, 300},
  };
  t.cdc_nodes = {2, 3, 7, 8, 9};
  validate(t);
  return t;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  Topology t;
  int declared_nodes = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;  // blank line
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               msg);
    };
    if (word == "nodes") {
      if (!(ls >> declared_nodes) || declared_nodes <= 0)
        fail("expected a positive node count");
      t.nodes.resize(declared_nodes);
      for (int i = 0; i < declared_nodes; ++i) t.nodes[i] = i + 1;
    } else if (word == "cdc") {
      int id;
      while (ls >> id) t.cdc_nodes.push_back(id);
      if (t.cdc_nodes.empty()) fail("cdc directive lists no nodes");
    } else if (word == "link") {
      Link l;
      std::string km;
      if (!(ls >> l.a >> l.b >> km)) fail("expected: link a b length_km");
      if (!parse_double(km, l.length_km)) fail("bad link length '" + km + "'");
      t.links.push_back(l);
    } else {
      fail("unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  if (declared_nodes < 0)
    throw std::runtime_error(path + ": missing 'nodes' directive");
  validate(t);
  return t;
}

PathTable::PathTable(std::vector<int> cloud_ids, std::vector<int> node_ids,
                     std::vector<PathInfo> paths)
    : cloud_ids_(std::move(cloud_ids)),
      node_ids_(std::move(node_ids)),
      paths_(std::move(paths)) {}

const PathInfo& PathTable::path(int cloud_id, int dest_id) const {
  auto c = std::find(cloud_ids_.begin(), cloud_ids_.end(), cloud_id);
  auto n = std::find(node_ids_.begin(), node_ids_.end(), dest_id);
  if (c == cloud_ids_.end())
    throw std::out_of_range("path table: unknown cloud node " +
                            std::to_string(cloud_id));
  if (n == node_ids_.end())
    throw std::out_of_range("path table: unknown destination node " +
                            std::to_string(dest_id));
  size_t ci = c - cloud_ids_.begin();
  size_t ni = n - node_ids_.begin();
  return paths_[ci * node_ids_.size() + ni];
}

namespace {

// Dijkstra label with the full tie-break key. Smaller is better.
struct Label {
  double km = std::numeric_limits<double>::infinity();
  int hops = 0;
  std::vector<int> seq;       // node ids from the source
  std::vector<int> link_ids;

  bool better_than(const Label& o) const {
    if (km != o.km) return km < o.km;
    if (hops != o.hops) return hops < o.hops;
    return seq < o.seq;
  }
};

}  // namespace

PathTable shortest_paths(const Topology& topo) {
  validate(topo);
  auto adj = adjacency(topo);
  const int n = topo.node_count();
  std::vector<PathInfo> all;
  all.reserve(topo.cdc_nodes.size() * n);

  for (int cloud : topo.cdc_nodes) {
    std::vector<Label> label(n);
    std::vector<bool> done(n, false);
    int src = topo.index_of(cloud);
    label[src].km = 0.0;
    label[src].seq = {cloud};
    // O(V^2) selection is plenty at this scale and keeps the tie-break exact.
    for (int round = 0; round < n; ++round) {
      int u = -1;
      for (int i = 0; i < n; ++i) {
        if (done[i] || std::isinf(label[i].km)) continue;
        if (u < 0 || label[i].better_than(label[u])) u = i;
      }
      if (u < 0) break;  // remaining nodes unreachable
      done[u] = true;
      for (auto [nid, lnk] : adj[u]) {
        int v = topo.index_of(nid);
        if (done[v]) continue;
        Label cand;
        cand.km = label[u].km + topo.links[lnk].length_km;
        cand.hops = label[u].hops + 1;
        cand.seq = label[u].seq;
        cand.seq.push_back(nid);
        cand.link_ids = label[u].link_ids;
        cand.link_ids.push_back(lnk);
        if (cand.better_than(label[v])) label[v] = std::move(cand);
      }
    }
    std::vector<int> missing;
    for (int i = 0; i < n; ++i)
      if (std::isinf(label[i].km)) missing.push_back(topo.nodes[i]);
    if (!missing.empty())
      throw std::runtime_error("shortest_paths: nodes {" + join_ids(missing) +
                               "} unreachable from CDC node " +
                               std::to_string(cloud));
    for (int i = 0; i < n; ++i) {
      PathInfo p;
      p.node_seq = label[i].seq;
      p.link_ids = label[i].link_ids;
      for (int l : p.link_ids)
        p.link_lengths_km.push_back(topo.links[l].length_km);
      p.total_km = label[i].km;
      all.push_back(std::move(p));
    }
  }
  return PathTable(topo.cdc_nodes, topo.nodes, std::move(all));
}

}  // namespace fogcache::netmodel
