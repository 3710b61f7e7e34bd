#pragma once

#include "qisorank/matching.hpp"
#include "qisorank/netio.hpp"
#include "qisorank/operators.hpp"
#include "qisorank/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace qisorank::testing {

inline Network p3(const std::string& name = "p3") {
    return parse_edge_list("a b\nb c\n", name);
}

inline Network k2(const std::string& name = "k2") {
    return parse_edge_list("a b\n", name);
}

inline Network c4(const std::string& name = "c4") {
    return parse_edge_list("a b\nb c\nc d\nd a\n", name);
}

inline Network triangle(const std::string& name = "k3") {
    return parse_edge_list("a b\nb c\nc a\n", name);
}

inline Network star(int leaves, const std::string& name = "star") {
    std::string text;
    for (int i = 0; i < leaves; ++i)
        text += "hub leaf" + std::to_string(i) + "\n";
    return parse_edge_list(text, name);
}

/// Copy of `net` with node i relabelled to prefix+perm[i]; perm is a
/// permutation of 0..n-1. The label order (hence register basis order)
/// follows the original edge order, so the graph is a genuine relabelling.
inline Network relabel(const Network& net, const std::vector<int>& perm,
                       const std::string& name, const std::string& prefix = "m") {
    std::string text;
    for (const auto& [u, v] : net.edges)
        text += prefix + std::to_string(perm[static_cast<std::size_t>(u)]) + " " + prefix +
                std::to_string(perm[static_cast<std::size_t>(v)]) + "\n";
    return parse_edge_list(text, name);
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    return perm;
}

/// Brute-force enumeration of all node bijections g1 -> g2 that preserve
/// adjacency both ways. Only sane for |V| <= 8.
inline std::vector<std::vector<int>> all_isomorphisms(const Network& g1, const Network& g2) {
    std::vector<std::vector<int>> found;
    if (g1.size() != g2.size())
        return found;
    std::vector<int> perm(static_cast<std::size_t>(g1.size()));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (int u = 0; u < g1.size() && ok; ++u)
            for (int v = u + 1; v < g1.size() && ok; ++v)
                ok = g1.has_edge(u, v) ==
                     g2.has_edge(perm[static_cast<std::size_t>(u)],
                                 perm[static_cast<std::size_t>(v)]);
        if (ok)
            found.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return found;
}

/// True when the alignment covers every node and equals one of the listed
/// isomorphisms.
inline bool alignment_is_isomorphism(const Alignment& alignment, const Network& g1,
                                     const Network& g2) {
    if (static_cast<int>(alignment.tuples.size()) != g1.size() || g1.size() != g2.size())
        return false;
    std::vector<int> map(static_cast<std::size_t>(g1.size()), -1);
    for (const auto& tuple : alignment.tuples) {
        int u = g1.index.at(tuple.nodes[0]);
        map[static_cast<std::size_t>(u)] = g2.index.at(tuple.nodes[1]);
    }
    for (int u = 0; u < g1.size(); ++u) {
        if (map[static_cast<std::size_t>(u)] < 0)
            return false;
        for (int v = u + 1; v < g1.size(); ++v)
            if (g1.has_edge(u, v) != g2.has_edge(map[static_cast<std::size_t>(u)],
                                                 map[static_cast<std::size_t>(v)]))
                return false;
    }
    return true;
}

/// Projection of the uniform vector onto the top eigenvalue cluster of a
/// Hermitian matrix: the physically recoverable principal direction even
/// when the top eigenvalue is degenerate (e.g. one bipartite factor).
inline RealVector principal_cluster_vector(const RealMatrix& h) {
    EigenSystem sys = eig_oracle(h);
    auto clusters = cluster_eigenvalues(sys.values);
    const Eigen::Index n = h.rows();
    ComplexVector u = ComplexVector::Constant(
        n, std::complex<double>(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    ComplexVector w = ComplexVector::Zero(n);
    for (int j : clusters.front())
        w += (sys.vectors.col(j).adjoint() * u)(0) * sys.vectors.col(j);
    RealVector v = w.real();
    if (v.norm() > 0)
        v /= v.norm();
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0)
        v = -v;
    return v;
}

/// Hand-derived stationary scores for P3 (x) P3 started from uniform: the
/// eigenvalue-1 eigenspace is two-dimensional (both factors bipartite) and
/// the limit is v+ (x) v+/16 + v- (x) v-/144 with v+=[1,2,1], v-=[1,-2,1].
inline std::vector<double> p3xp3_stationary() {
    const double corner = 5.0 / 72.0, edge = 1.0 / 9.0, center = 5.0 / 18.0;
    return {corner, edge, corner, edge, center, edge, corner, edge, corner};
}

inline StochasticOperator p3_by_k2_operator() {
    return kron_chain({column_normalize(p3("g1")), column_normalize(k2("g2"))});
}

} // namespace qisorank::testing
