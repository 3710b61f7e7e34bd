#pragma once

#include "qisorank/measure.hpp"
#include "qisorank/netio.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qisorank {

enum class Provenance {
    forward_conditional,   // decided by the first measurement setting, top choice
    reverse_conditional,   // decided purely by the second/reverse setting
    combined,              // both settings contributed to the deciding score
    residual_statistics,   // lower-ranked outcome, its better choices were taken
};

std::string provenance_name(Provenance p);

struct MatchedTuple {
    std::vector<std::string> nodes; // one label per network
    double score = 0.0;             // conditional probability that decided the match
    Provenance provenance = Provenance::forward_conditional;
};

struct MatchConfig {
    bool neighbor_priority = true;
    enum class TieBreak { lowest_index };
    TieBreak tie_break = TieBreak::lowest_index;
    double min_score = 0.0;       // conditionals below this wait for the residual phase
    bool use_reverse_pass = false; // callers compute reverse tables when set
};

struct Alignment {
    std::vector<std::string> networks;
    std::vector<MatchedTuple> tuples;   // in match order
    std::vector<int> component_summary; // sizes, descending, of the edge-preserving matched subgraph
    double edge_correctness = 0.0;      // NaN when undefined (empty or no matched edge)
    std::vector<std::string> warnings;
};

/// Greedy pairwise extraction: seed with the globally best joint mass, then
/// give the G1-neighbours of matched nodes priority, each node taking its
/// best still-unmatched partner. Reverse tables, when supplied, are averaged
/// into the ranking before it starts.
Alignment match_pairwise(const GroupedTables& forward,
                         const std::optional<GroupedTables>& reverse, const Network& g1,
                         const Network& g2, const MatchConfig& cfg);

/// Multi-network variant over "alone vs rest" measurement settings. Greedy
/// runs on the first setting; a second setting, if present, is merged (mean
/// score) only once the first stops producing matches.
Alignment match_multiway(const std::vector<GroupedTables>& settings,
                         const std::vector<Network>& nets, const MatchConfig& cfg);

/// Fraction of G1 edges with both endpoints matched whose images are edges
/// in every other network. NaN when no edge has both endpoints matched.
double edge_correctness(const Alignment& alignment, const std::vector<Network>& nets);

nlohmann::json alignment_to_json(const Alignment& alignment);

} // namespace qisorank
