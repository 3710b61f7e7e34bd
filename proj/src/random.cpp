#include "qisorank/random.hpp"

#include "qisorank/errors.hpp"

#include <numeric>
#include <string>

namespace qisorank {

std::size_t sample_index(const std::vector<double>& weights, Rng& rng) {
    if (weights.empty())
        throw ValidationError("sample_index: empty weight vector");
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0)
        throw ValidationError("sample_index: weights sum to zero");
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc)
            return i;
    }
    return weights.size() - 1; // rounding fell off the end
}

std::vector<std::uint64_t> multinomial_counts(const std::vector<double>& weights,
                                              std::uint64_t shots, Rng& rng) {
    std::vector<std::uint64_t> counts(weights.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s)
        ++counts[sample_index(weights, rng)];
    return counts;
}

Network random_connected_network(int n, std::uint64_t seed, const std::string& name,
                                 const std::string& label_prefix) {
    if (n < 2)
        throw ValidationError("random_connected_network: need at least 2 nodes");
    Rng rng(seed);
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        labels.push_back(label_prefix + std::to_string(i));
    for (;;) {
        std::vector<std::pair<std::string, std::string>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform() < 0.5)
                    edges.emplace_back(labels[i], labels[j]);
        if (edges.empty())
            continue;
        Network net = make_network(name, labels, edges);
        if (net.connected)
            return net;
    }
}

} // namespace qisorank
