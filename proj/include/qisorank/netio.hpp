#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qisorank {

/// Undirected simple graph with labelled nodes. Node order is the order of
/// first appearance in the input, which later fixes the basis-state
/// assignment of the quantum registers; everything downstream relies on it
/// being stable. Immutable after construction.
struct Network {
    std::string name;
    std::vector<std::string> nodes;                  // label per index
    std::unordered_map<std::string, int> index;      // label -> index
    std::vector<std::vector<int>> adjacency_list;    // sorted neighbour indices
    std::vector<std::pair<int, int>> edges;          // as first parsed, u < v not enforced
    bool connected = false;

    int size() const { return static_cast<int>(nodes.size()); }
    bool has_edge(int u, int v) const;
    int degree(int i) const;
};

/// Build a Network from explicit labels and label pairs. Used by tests and
/// by programmatic callers; applies the same validation as parsing except
/// that isolated nodes are representable here.
Network make_network(std::string name, std::vector<std::string> labels,
                     const std::vector<std::pair<std::string, std::string>>& edges);

/// Parse a whitespace-separated edge list ("u v" per line, '#' comments,
/// blank lines ignored, CRLF tolerated). Duplicate edges collapse; self
/// loops and empty graphs are rejected.
Network parse_edge_list(const std::string& text, const std::string& name);

/// Inverse of parse_edge_list: one line per stored edge, tab separated.
std::string serialize_edge_list(const Network& net);

/// Neighbour indices of node i (sorted ascending).
const std::vector<int>& neighbors(const Network& net, int i);

/// Partition of node indices into connected components, each sorted, the
/// list ordered by smallest contained index.
std::vector<std::vector<int>> connected_components(const Network& net);

/// Read a file into a Network; the network name is the file stem.
Network load_network(const std::string& path);

} // namespace qisorank
