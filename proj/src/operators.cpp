#include "qisorank/operators.hpp"

#include "qisorank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qisorank {

namespace {

void check_column_stochastic(const RealMatrix& m) {
    if (m.rows() != m.cols())
        throw ContractError("stochastic operator must be square");
    if (m.minCoeff() < 0.0)
        throw ContractError("stochastic operator must be nonnegative");
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (std::abs(m.col(c).sum() - 1.0) > tol::structure)
            throw ContractError("column " + std::to_string(c) + " sums to " +
                                std::to_string(m.col(c).sum()) + ", not 1");
}

double multiset_distance(RealVector a, RealVector b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

bool StochasticOperator::symmetric(double eps) const {
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= eps;
}

StochasticOperator column_normalize(const Network& net) {
    if (net.size() < 2)
        throw ValidationError("network '" + net.name + "' needs at least two nodes");
    if (!net.connected)
        throw ValidationError("network '" + net.name + "' is not connected");
    const int n = net.size();
    RealMatrix a = RealMatrix::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        int deg = net.degree(v);
        if (deg == 0)
            throw ValidationError("node '" + net.nodes[static_cast<std::size_t>(v)] +
                                  "' is isolated");
        for (int u : net.adjacency_list[static_cast<std::size_t>(v)])
            a(u, v) = 1.0 / static_cast<double>(deg);
    }
    StochasticOperator op;
    op.matrix = a;
    op.factors = {a};
    op.networks = {net};
    op.column_sums = a.colwise().sum();
    check_column_stochastic(op.matrix);
    return op;
}

StochasticOperator kron_chain(const std::vector<StochasticOperator>& factors) {
    if (factors.size() < 2)
        throw ValidationError("kron_chain needs at least two factors");
    StochasticOperator op;
    op.matrix = factors.front().matrix;
    op.factors = factors.front().factors;
    op.networks = factors.front().networks;
    for (std::size_t i = 1; i < factors.size(); ++i) {
        op.matrix = kron(op.matrix, factors[i].matrix);
        op.factors.insert(op.factors.end(), factors[i].factors.begin(),
                          factors[i].factors.end());
        op.networks.insert(op.networks.end(), factors[i].networks.begin(),
                           factors[i].networks.end());
    }
    op.column_sums = op.matrix.colwise().sum();
    check_column_stochastic(op.matrix);
    return op;
}

HermitianModel hermitian_decompose(const StochasticOperator& a, ModelMode mode) {
    HermitianModel model;
    model.h = 0.5 * (a.matrix + a.matrix.transpose());
    model.s = 0.5 * (a.matrix - a.matrix.transpose());
    RealVector sums = model.h.colwise().sum();
    model.rho_lower = sums.minCoeff();
    model.rho_upper = sums.maxCoeff();
    model.mode = mode;
    // rho_upper bounds the spectral radius of H, so |lambda|/scale <= 1.
    // An exactly stochastic operator is analysed at scale 1 instead, which
    // pins the principal phase to the dyadic value 1/2.
    model.scale = mode == ModelMode::exact_stochastic ? 1.0 : model.rho_upper;
    model.source = a;
    return model;
}

NormalityReport normality_report(const StochasticOperator& a) {
    NormalityReport report;
    const RealMatrix& m = a.matrix;
    report.normality_defect =
        (m.transpose() * m - m * m.transpose()).cwiseAbs().maxCoeff();
    report.is_normal = report.normality_defect <= tol::unitarity;

    HermitianModel model = hermitian_decompose(a);
    report.commutator_hs =
        (model.h * model.s - model.s * model.h).cwiseAbs().maxCoeff();

    EigenSystem sys_a = eig_oracle(m);
    EigenSystem sys_h = eig_oracle(model.h);
    EigenSystem sys_s = eig_oracle(ComplexMatrix(model.s.cast<std::complex<double>>()));
    double re_dist = multiset_distance(sys_a.values.real(), sys_h.values.real());
    double im_dist = multiset_distance(sys_a.values.imag(), sys_s.values.imag());
    report.eig_alignment = std::max(re_dist, im_dist);

    if (report.is_normal) {
        if (report.commutator_hs > tol::unitarity)
            throw ContractError("normal operator with non-commuting H and S parts");
        if (report.eig_alignment > tol::compare)
            throw ContractError("normal operator whose spectrum does not split into "
                                "eig(H) + eig(S)");
    }
    return report;
}

SimilarityOperator attach_scores(const HermitianModel& model, const RealMatrix& b) {
    if (b.rows() != model.h.rows() || b.cols() != model.h.cols())
        throw ValidationError("score matrix is " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()) + ", operator is " +
                              std::to_string(model.h.rows()) + "x" +
                              std::to_string(model.h.cols()));
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol::structure)
        throw ContractError("score matrix must be Hermitian");
    SimilarityOperator op;
    op.base = model;
    op.scores = b;
    op.commutator_norm = (model.h * b - b * model.h).cwiseAbs().maxCoeff();
    return op;
}

SimilarityOperator without_scores(HermitianModel model) {
    SimilarityOperator op;
    op.base = std::move(model);
    return op;
}

double phase_map(double lambda, const HermitianModel& model) {
    if (std::abs(lambda) > model.scale * (1.0 + tol::structure))
        throw RangeError("eigenvalue " + std::to_string(lambda) +
                         " outside [-s, s] with s = " + std::to_string(model.scale));
    return (lambda / model.scale + 1.0) / 4.0;
}

double phase_unmap(double phi, const HermitianModel& model) {
    return (4.0 * phi - 1.0) * model.scale;
}

RealVector joint_degrees(const StochasticOperator& a) {
    RealVector deg = RealVector::Ones(1);
    for (const Network& net : a.networks) {
        RealVector d(net.size());
        for (int i = 0; i < net.size(); ++i)
            d[i] = static_cast<double>(net.degree(i));
        RealVector next(deg.size() * d.size());
        for (Eigen::Index i = 0; i < deg.size(); ++i)
            for (Eigen::Index j = 0; j < d.size(); ++j)
                next[i * d.size() + j] = deg[i] * d[j];
        deg = std::move(next);
    }
    return deg;
}

RealMatrix parse_scores(const std::string& text, const Network& g1, const Network& g2) {
    const Eigen::Index n = static_cast<Eigen::Index>(g1.size()) * g2.size();
    RealMatrix b = RealMatrix::Zero(n, n);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream fields(line);
        std::string la, lb;
        double score = 0.0;
        if (!(fields >> la))
            continue;
        if (la.front() == '#')
            continue;
        if (!(fields >> lb >> score))
            throw ParseError("expected 'label1 label2 score'", lineno);
        auto ia = g1.index.find(la);
        if (ia == g1.index.end())
            throw ValidationError("line " + std::to_string(lineno) + ": unknown node '" +
                                  la + "' in network '" + g1.name + "'");
        auto ib = g2.index.find(lb);
        if (ib == g2.index.end())
            throw ValidationError("line " + std::to_string(lineno) + ": unknown node '" +
                                  lb + "' in network '" + g2.name + "'");
        Eigen::Index idx = static_cast<Eigen::Index>(ia->second) * g2.size() + ib->second;
        b(idx, idx) = score;
    }
    return b;
}

RealMatrix load_scores(const std::string& path, const Network& g1, const Network& g2) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scores(buf.str(), g1, g2);
}

} // namespace qisorank
