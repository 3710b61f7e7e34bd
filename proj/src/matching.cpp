#include "qisorank/matching.hpp"

#include "qisorank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qisorank {

namespace {

// Scores within this of each other count as tied, so ties resolve by index
// instead of floating-point noise.
constexpr double kTieEps = 1e-12;

struct TupleScores {
    std::vector<double> joint;       // ranking mass per global tuple
    std::vector<double> conditional; // reported score per global tuple
    std::vector<char> from_first;    // positive mass in setting 1
    std::vector<char> from_second;   // positive mass in setting 2 / reverse
};

std::size_t tuple_count(const std::vector<Network>& nets) {
    std::size_t n = 1;
    for (const auto& net : nets)
        n *= static_cast<std::size_t>(net.size());
    return n;
}

std::vector<int> decode_tuple(std::size_t g, const std::vector<Network>& nets) {
    std::vector<int> digits(nets.size(), 0);
    for (std::size_t k = nets.size(); k-- > 0;) {
        auto base = static_cast<std::size_t>(nets[k].size());
        digits[k] = static_cast<int>(g % base);
        g /= base;
    }
    return digits;
}

void check_setting(const GroupedTables& setting, const std::vector<Network>& nets) {
    const int m = static_cast<int>(nets.size());
    if (setting.alone < 0 || setting.alone >= m)
        throw ValidationError("measurement setting references register " +
                              std::to_string(setting.alone));
    std::vector<int> expected;
    for (int r = 0; r < m; ++r)
        if (r != setting.alone)
            expected.push_back(r);
    if (setting.rest != expected)
        throw ValidationError("inconsistent register order in measurement setting: rest "
                              "registers must be the ascending complement of the alone one");
    if (setting.tables.size() !=
        static_cast<std::size_t>(nets[static_cast<std::size_t>(setting.alone)].size()))
        throw ValidationError(
            "measurement setting has " + std::to_string(setting.tables.size()) +
            " tables for a " +
            std::to_string(nets[static_cast<std::size_t>(setting.alone)].size()) +
            "-node register");
}

// Joint mass per global tuple: marginal(alone value) * conditional(rest tuple).
void accumulate_setting(const GroupedTables& setting, const std::vector<Network>& nets,
                        std::vector<double>& joint, std::vector<double>& conditional) {
    const std::size_t n = joint.size();
    for (std::size_t g = 0; g < n; ++g) {
        auto digits = decode_tuple(g, nets);
        const auto& table = setting.tables[static_cast<std::size_t>(
            digits[static_cast<std::size_t>(setting.alone)])];
        if (table.probabilities.empty())
            continue;
        std::size_t rest_idx = 0;
        for (std::size_t k = 0; k < setting.rest.size(); ++k)
            rest_idx =
                rest_idx * static_cast<std::size_t>(setting.rest_sizes[k]) +
                static_cast<std::size_t>(digits[static_cast<std::size_t>(setting.rest[k])]);
        conditional[g] = table.probabilities[rest_idx];
        joint[g] = table.marginal * table.probabilities[rest_idx];
    }
}

void merge_second_setting(TupleScores& scores, const GroupedTables& setting,
                          const std::vector<Network>& nets) {
    const std::size_t n = scores.joint.size();
    std::vector<double> joint2(n, 0.0), cond2(n, 0.0);
    accumulate_setting(setting, nets, joint2, cond2);
    for (std::size_t g = 0; g < n; ++g) {
        bool p1 = scores.from_first[g] != 0;
        bool p2 = joint2[g] > 0.0;
        scores.from_second[g] = p2 ? 1 : 0;
        scores.joint[g] = 0.5 * (scores.joint[g] + joint2[g]);
        if (p1 && p2)
            scores.conditional[g] = 0.5 * (scores.conditional[g] + cond2[g]);
        else if (p2)
            scores.conditional[g] = cond2[g];
    }
}

// Components of the matched subgraph: two tuples are adjacent when every
// network has an edge between their respective nodes.
std::vector<int> component_sizes(const std::vector<std::vector<int>>& matched,
                                 const std::vector<Network>& nets) {
    const std::size_t k = matched.size();
    std::vector<std::vector<std::size_t>> adj(k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            bool preserved = true;
            for (std::size_t net = 0; net < nets.size() && preserved; ++net)
                preserved = nets[net].has_edge(matched[a][net], matched[b][net]);
            if (preserved) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
        }
    std::vector<char> seen(k, 0);
    std::vector<int> sizes;
    for (std::size_t start = 0; start < k; ++start) {
        if (seen[start])
            continue;
        int size = 0;
        std::vector<std::size_t> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            ++size;
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        sizes.push_back(size);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

Alignment greedy_align(const std::vector<GroupedTables>& settings,
                       const std::vector<Network>& nets, const MatchConfig& cfg,
                       bool combine_upfront) {
    if (settings.empty() || settings.front().tables.empty())
        throw ValidationError("matching needs at least one measurement setting with tables");
    if (nets.size() < 2)
        throw ValidationError("matching needs at least two networks");
    for (const auto& setting : settings)
        check_setting(setting, nets);

    const std::size_t n = tuple_count(nets);
    TupleScores scores;
    scores.joint.assign(n, 0.0);
    scores.conditional.assign(n, 0.0);
    scores.from_first.assign(n, 0);
    scores.from_second.assign(n, 0);
    accumulate_setting(settings.front(), nets, scores.joint, scores.conditional);
    for (std::size_t g = 0; g < n; ++g)
        scores.from_first[g] = scores.joint[g] > 0.0 ? 1 : 0;

    bool second_merged = false;
    if (combine_upfront && settings.size() > 1) {
        merge_second_setting(scores, settings[1], nets);
        second_merged = true;
    }

    Alignment alignment;
    for (const auto& net : nets)
        alignment.networks.push_back(net.name);
    alignment.edge_correctness = std::numeric_limits<double>::quiet_NaN();

    const int anchor = settings.front().alone;
    const Network& anchor_net = nets[static_cast<std::size_t>(anchor)];
    std::vector<std::vector<char>> used(nets.size());
    for (std::size_t k = 0; k < nets.size(); ++k)
        used[k].assign(static_cast<std::size_t>(nets[k].size()), 0);
    std::vector<std::vector<int>> matched_indices;

    // Best unconstrained mass per anchor node; a node that lands below its
    // own top-ranked tuple consumed residual statistics.
    std::vector<double> top_joint(static_cast<std::size_t>(anchor_net.size()), 0.0);
    auto refresh_top = [&] {
        std::fill(top_joint.begin(), top_joint.end(), 0.0);
        for (std::size_t g = 0; g < n; ++g) {
            auto digits = decode_tuple(g, nets);
            auto a = static_cast<std::size_t>(digits[static_cast<std::size_t>(anchor)]);
            top_joint[a] = std::max(top_joint[a], scores.joint[g]);
        }
    };
    refresh_top();

    std::vector<std::vector<int>> all_digits(n);
    for (std::size_t g = 0; g < n; ++g)
        all_digits[g] = decode_tuple(g, nets);

    // A tuple extends the matched subgraph when some matched tuple is
    // adjacent to it in every network; matching such tuples first keeps the
    // solution connected and edge-preserving.
    auto extends_matched = [&](const std::vector<int>& digits) {
        for (const auto& matched : matched_indices) {
            bool preserved = true;
            for (std::size_t k = 0; k < nets.size() && preserved; ++k)
                preserved = nets[k].has_edge(digits[k], matched[k]);
            if (preserved)
                return true;
        }
        return false;
    };

    // Best available tuple in the requested priority tier, lowest index on
    // ties. Tier 0: extends the matched subgraph. Tier 1: anchor node on the
    // BFS frontier of matched anchor nodes. Tier 2: any unmatched anchor.
    auto scan = [&](int tier, const std::vector<char>& frontier, bool residual,
                    std::size_t& out_tuple, double& out_joint) {
        bool found = false;
        for (std::size_t g = 0; g < n; ++g) {
            if (scores.joint[g] <= 0.0)
                continue;
            if (!residual && scores.conditional[g] < cfg.min_score)
                continue;
            const auto& digits = all_digits[g];
            bool free = true;
            for (std::size_t k = 0; k < nets.size() && free; ++k)
                free = !used[k][static_cast<std::size_t>(digits[k])];
            if (!free)
                continue;
            if (tier == 0 && !extends_matched(digits))
                continue;
            if (tier == 1 &&
                !frontier[static_cast<std::size_t>(digits[static_cast<std::size_t>(anchor)])])
                continue;
            if (!found || scores.joint[g] > out_joint + kTieEps) {
                found = true;
                out_tuple = g;
                out_joint = scores.joint[g];
            }
        }
        return found;
    };

    bool residual_phase = false;
    for (;;) {
        std::vector<char> frontier(static_cast<std::size_t>(anchor_net.size()), 0);
        if (cfg.neighbor_priority && !matched_indices.empty()) {
            for (int a = 0; a < anchor_net.size(); ++a) {
                if (used[static_cast<std::size_t>(anchor)][static_cast<std::size_t>(a)])
                    continue;
                for (int nb : anchor_net.adjacency_list[static_cast<std::size_t>(a)]) {
                    if (used[static_cast<std::size_t>(anchor)][static_cast<std::size_t>(nb)]) {
                        frontier[static_cast<std::size_t>(a)] = 1;
                        break;
                    }
                }
            }
        }

        bool found = false;
        std::size_t best_tuple = 0;
        double best_joint = 0.0;
        if (cfg.neighbor_priority && !matched_indices.empty()) {
            found = scan(0, frontier, residual_phase, best_tuple, best_joint);
            if (!found)
                found = scan(1, frontier, residual_phase, best_tuple, best_joint);
        }
        if (!found)
            found = scan(2, frontier, residual_phase, best_tuple, best_joint);

        if (!found) {
            if (!second_merged && settings.size() > 1) {
                merge_second_setting(scores, settings[1], nets);
                second_merged = true;
                refresh_top();
                continue;
            }
            if (!residual_phase) {
                residual_phase = true;
                continue;
            }
            break;
        }

        const auto& best_digits = all_digits[best_tuple];
        auto a = static_cast<std::size_t>(best_digits[static_cast<std::size_t>(anchor)]);
        Provenance prov;
        if (residual_phase || best_joint < top_joint[a] - kTieEps)
            prov = Provenance::residual_statistics;
        else if (scores.from_first[best_tuple] && scores.from_second[best_tuple])
            prov = Provenance::combined;
        else if (scores.from_second[best_tuple])
            prov = Provenance::reverse_conditional;
        else
            prov = Provenance::forward_conditional;

        MatchedTuple tuple;
        for (std::size_t k = 0; k < nets.size(); ++k) {
            tuple.nodes.push_back(nets[k].nodes[static_cast<std::size_t>(best_digits[k])]);
            used[k][static_cast<std::size_t>(best_digits[k])] = 1;
        }
        tuple.score = scores.conditional[best_tuple];
        tuple.provenance = prov;
        alignment.tuples.push_back(std::move(tuple));
        matched_indices.push_back(best_digits);
    }

    if (alignment.tuples.empty())
        alignment.warnings.push_back("all matching scores are zero; nothing to align");
    alignment.component_summary = component_sizes(matched_indices, nets);
    alignment.edge_correctness = edge_correctness(alignment, nets);
    if (!alignment.tuples.empty() && std::isnan(alignment.edge_correctness))
        alignment.warnings.push_back("edge correctness undefined: no first-network edge "
                                     "has both endpoints matched");
    return alignment;
}

} // namespace

std::string provenance_name(Provenance p) {
    switch (p) {
    case Provenance::forward_conditional:
        return "forward-conditional";
    case Provenance::reverse_conditional:
        return "reverse-conditional";
    case Provenance::combined:
        return "combined";
    case Provenance::residual_statistics:
        return "residual-statistics";
    }
    return "unknown";
}

Alignment match_pairwise(const GroupedTables& forward,
                         const std::optional<GroupedTables>& reverse, const Network& g1,
                         const Network& g2, const MatchConfig& cfg) {
    if (forward.alone != 0)
        throw ValidationError("pairwise forward tables must condition on the first network");
    std::vector<GroupedTables> settings{forward};
    if (reverse) {
        if (reverse->alone != 1)
            throw ValidationError(
                "pairwise reverse tables must condition on the second network");
        settings.push_back(*reverse);
    }
    return greedy_align(settings, {g1, g2}, cfg, /*combine_upfront=*/true);
}

Alignment match_multiway(const std::vector<GroupedTables>& settings,
                         const std::vector<Network>& nets, const MatchConfig& cfg) {
    return greedy_align(settings, nets, cfg, /*combine_upfront=*/false);
}

double edge_correctness(const Alignment& alignment, const std::vector<Network>& nets) {
    if (alignment.tuples.empty() || nets.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const Network& g1 = nets.front();
    // image[k][u] = index of u's match in network k, -1 when unmatched
    std::vector<std::vector<int>> image(nets.size(),
                                        std::vector<int>(static_cast<std::size_t>(g1.size()), -1));
    for (const auto& tuple : alignment.tuples) {
        int u = g1.index.at(tuple.nodes.front());
        for (std::size_t k = 1; k < nets.size(); ++k)
            image[k][static_cast<std::size_t>(u)] = nets[k].index.at(tuple.nodes[k]);
    }
    int denom = 0, preserved = 0;
    for (const auto& [u, v] : g1.edges) {
        bool both = true;
        for (std::size_t k = 1; k < nets.size() && both; ++k)
            both = image[k][static_cast<std::size_t>(u)] >= 0 &&
                   image[k][static_cast<std::size_t>(v)] >= 0;
        if (!both)
            continue;
        ++denom;
        bool ok = true;
        for (std::size_t k = 1; k < nets.size() && ok; ++k)
            ok = nets[k].has_edge(image[k][static_cast<std::size_t>(u)],
                                  image[k][static_cast<std::size_t>(v)]);
        if (ok)
            ++preserved;
    }
    if (denom == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(preserved) / static_cast<double>(denom);
}

nlohmann::json alignment_to_json(const Alignment& alignment) {
    nlohmann::json j;
    j["networks"] = alignment.networks;
    j["tuples"] = nlohmann::json::array();
    for (const auto& tuple : alignment.tuples)
        j["tuples"].push_back({{"nodes", tuple.nodes},
                               {"score", tuple.score},
                               {"provenance", provenance_name(tuple.provenance)}});
    if (std::isnan(alignment.edge_correctness))
        j["edge_correctness"] = nullptr;
    else
        j["edge_correctness"] = alignment.edge_correctness;
    j["component_summary"] = alignment.component_summary;
    j["warnings"] = alignment.warnings;
    return j;
}

} // namespace qisorank
