#include "qisorank/netio.hpp"

#include "qisorank/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qisorank {

namespace {

void mark_connectivity(Network& net) {
    if (net.nodes.empty()) {
        net.connected = false;
        return;
    }
    std::vector<char> seen(net.nodes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : net.adjacency_list[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    net.connected = reached == net.nodes.size();
}

int intern_node(Network& net, const std::string& label) {
    auto it = net.index.find(label);
    if (it != net.index.end())
        return it->second;
    int id = net.size();
    net.index.emplace(label, id);
    net.nodes.push_back(label);
    net.adjacency_list.emplace_back();
    return id;
}

// Adds the edge unless already present; keeps adjacency lists sorted.
bool add_edge(Network& net, int u, int v) {
    auto& row = net.adjacency_list[u];
    auto pos = std::lower_bound(row.begin(), row.end(), v);
    if (pos != row.end() && *pos == v)
        return false;
    row.insert(pos, v);
    auto& col = net.adjacency_list[v];
    col.insert(std::lower_bound(col.begin(), col.end(), u), u);
    net.edges.emplace_back(u, v);
    return true;
}

} // namespace

bool Network::has_edge(int u, int v) const {
    const auto& row = adjacency_list.at(static_cast<std::size_t>(u));
    return std::binary_search(row.begin(), row.end(), v);
}

int Network::degree(int i) const {
    return static_cast<int>(adjacency_list.at(static_cast<std::size_t>(i)).size());
}

Network make_network(std::string name, std::vector<std::string> labels,
                     const std::vector<std::pair<std::string, std::string>>& edges) {
    Network net;
    net.name = std::move(name);
    for (const auto& label : labels)
        intern_node(net, label);
    if (net.nodes.empty())
        throw ValidationError("network '" + net.name + "' has no nodes");
    for (const auto& [a, b] : edges) {
        auto ia = net.index.find(a), ib = net.index.find(b);
        if (ia == net.index.end() || ib == net.index.end())
            throw ValidationError("edge endpoint not in node list: " + a + " -- " + b);
        if (ia->second == ib->second)
            throw ValidationError("self-loop on node '" + a + "'");
        add_edge(net, ia->second, ib->second);
    }
    mark_connectivity(net);
    return net;
}

Network parse_edge_list(const std::string& text, const std::string& name) {
    Network net;
    net.name = name;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a))
            continue; // blank line
        if (a.front() == '#')
            continue;
        if (!(fields >> b))
            throw ParseError("expected two node labels, got one", lineno);
        if (fields >> extra)
            throw ParseError("expected two node labels, got more", lineno);
        if (a == b)
            throw ValidationError("line " + std::to_string(lineno) +
                                  ": self-loop on node '" + a + "'");
        int u = intern_node(net, a);
        int v = intern_node(net, b);
        add_edge(net, u, v);
    }
    if (net.edges.empty())
        throw ValidationError("network '" + name + "' is empty");
    mark_connectivity(net);
    return net;
}

std::string serialize_edge_list(const Network& net) {
    std::string out;
    for (const auto& [u, v] : net.edges) {
        out += net.nodes[u];
        out += '\t';
        out += net.nodes[v];
        out += '\n';
    }
    return out;
}

const std::vector<int>& neighbors(const Network& net, int i) {
    if (i < 0 || i >= net.size())
        throw RangeError("node index " + std::to_string(i) + " out of range for '" +
                         net.name + "' (|V|=" + std::to_string(net.size()) + ")");
    return net.adjacency_list[static_cast<std::size_t>(i)];
}

std::vector<std::vector<int>> connected_components(const Network& net) {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(net.nodes.size(), 0);
    for (int start = 0; start < net.size(); ++start) {
        if (seen[start])
            continue;
        std::vector<int> comp;
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int v : net.adjacency_list[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), std::filesystem::path(path).stem().string());
}

} // namespace qisorank
