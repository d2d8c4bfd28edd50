#pragma once

#include <string>
#include <vector>

namespace fogcache::netmodel {

struct Link {
  int a = 0;
  int b = 0;
  double length_km = 0.0;
};

// Undirected core topology. Node ids are the 1-based ids from the data file.
// Every node hosts an OLT with a co-located fog data centre; the nodes in
// cdc_nodes additionally host a cloud data centre attached to the core node.
struct Topology {
  std::vector<int> nodes;
  std::vector<Link> links;
  std::vector<int> cdc_nodes;

  int index_of(int node_id) const;  // position in `nodes`, -1 when unknown
  bool is_cdc(int node_id) const;
  int node_count() const { return static_cast<int>(nodes.size()); }
};

// Throws std::invalid_argument naming the offending node or link when the
// topology is malformed: duplicate ids, unknown link endpoints, non-positive
// lengths, an empty or alien CDC set, or a disconnected graph (the message
// lists the unreachable nodes).
void validate(const Topology& topo);

// The bundled 14-node / 21-link NSFNET instance with CDCs at {2,3,7,8,9}.
// data/nsfnet.topo carries the same table in file form.
Topology build_nsfnet();

// Reads the documented .topo format:
//   nodes N
//   cdc id id ...
//   link a b length_km      (one line per link)
// '#' starts a comment; unknown directives are errors. The result is
// validated before being returned.
Topology load_topology(const std::string& path);

// One cloud-to-destination route.
struct PathInfo {
  std::vector<int> node_seq;  // [cloud, ..., dest]; single entry when equal
  std::vector<int> link_ids;  // indices into Topology::links
  std::vector<double> link_lengths_km;  // aligned with link_ids
  double total_km = 0.0;
  int hops() const { return static_cast<int>(link_ids.size()); }
  bool empty() const { return link_ids.empty(); }
};

// Fixed shortest routes (by km) from every CDC to every node. Ties break by
// fewer hops, then by lexicographically smallest node sequence, so the table
// is deterministic for a given topology.
class PathTable {
 public:
  PathTable() = default;
  PathTable(std::vector<int> cloud_ids, std::vector<int> node_ids,
            std::vector<PathInfo> paths);

  const PathInfo& path(int cloud_id, int dest_id) const;
  const std::vector<int>& cloud_ids() const { return cloud_ids_; }
  const std::vector<int>& node_ids() const { return node_ids_; }

 private:
  std::vector<int> cloud_ids_;
  std::vector<int> node_ids_;
  std::vector<PathInfo> paths_;  // cloud-major order
};

// Builds the table with a deterministic Dijkstra per CDC. Throws when some
// node is unreachable from a CDC, naming the unreachable component.
PathTable shortest_paths(const Topology& topo);

}  // namespace fogcache::netmodel
