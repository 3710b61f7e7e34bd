#include "qisorank/bench.hpp"
#include "qisorank/errors.hpp"
#include "qisorank/isorank.hpp"
#include "qisorank/matching.hpp"
#include "qisorank/measure.hpp"
#include "qisorank/netio.hpp"
#include "qisorank/operators.hpp"
#include "qisorank/pea.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qisorank;

struct RunConfig {
    std::vector<std::string> network_paths;
    std::string mode = "exact";
    std::uint64_t shots = 10000;
    int phase_qubits = 8;
    std::string model = "closest-hermitian";
    std::string scores_path;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string tie_break = "lowest-index";
    double min_score = 0.0;
};

void add_run_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--networks", cfg.network_paths, "Edge-list files, one per network")
        ->required()
        ->expected(2, 4);
    cmd->add_option("--mode", cfg.mode, "exact|sampled")
        ->check(CLI::IsMember({"exact", "sampled"}));
    cmd->add_option("--shots", cfg.shots, "Measurement shots in sampled mode");
    cmd->add_option("--phase-qubits", cfg.phase_qubits, "Phase register size t")
        ->check(CLI::Range(2, 12));
    cmd->add_option("--model", cfg.model, "closest-hermitian|exact-stochastic")
        ->check(CLI::IsMember({"closest-hermitian", "exact-stochastic"}));
    cmd->add_option("--scores", cfg.scores_path, "Node-score TSV (pairwise runs)");
    cmd->add_option("--seed", cfg.seed, "RNG seed for sampled mode");
    cmd->add_option("--out", cfg.out_path, "Output path (prefix for probs)");
    cmd->add_option("--tie-break", cfg.tie_break, "Tie rule")
        ->check(CLI::IsMember({"lowest-index"}));
    cmd->add_option("--min-score", cfg.min_score, "Conditional-probability floor")
        ->check(CLI::Range(0.0, 1.0));
}

struct Pipeline {
    std::vector<Network> nets;
    StochasticOperator joint;
    SimilarityOperator model;
    PeaOutcome outcome;
    PeaMode pea_mode = PeaMode::exact;
};

Pipeline build_pipeline(const RunConfig& cfg) {
    Pipeline p;
    for (const auto& path : cfg.network_paths)
        p.nets.push_back(load_network(path));
    std::vector<StochasticOperator> factors;
    for (const auto& net : p.nets)
        factors.push_back(column_normalize(net));
    p.joint = kron_chain(factors);

    ModelMode mode = cfg.model == "exact-stochastic" ? ModelMode::exact_stochastic
                                                     : ModelMode::closest_hermitian;
    HermitianModel base = hermitian_decompose(p.joint, mode);
    if (!cfg.scores_path.empty()) {
        if (p.nets.size() != 2)
            throw ValidationError("--scores applies to pairwise runs only");
        p.model = attach_scores(base, load_scores(cfg.scores_path, p.nets[0], p.nets[1]));
    } else {
        p.model = without_scores(base);
    }

    p.pea_mode = cfg.mode == "sampled" ? PeaMode::sampled : PeaMode::exact;
    if (p.pea_mode == PeaMode::sampled && cfg.shots < 1)
        throw ValidationError("sampled mode needs --shots >= 1");
    p.outcome = run_pea(p.model, cfg.phase_qubits, p.pea_mode, cfg.shots, cfg.seed);
    return p;
}

std::vector<int> rest_registers(int m, int alone) {
    std::vector<int> rest;
    for (int r = 0; r < m; ++r)
        if (r != alone)
            rest.push_back(r);
    return rest;
}

GroupedTables tables_for(const Pipeline& p, const RunConfig& cfg, int alone,
                         std::uint64_t seed_offset) {
    auto rest = rest_registers(static_cast<int>(p.nets.size()), alone);
    if (p.pea_mode == PeaMode::sampled)
        return grouped_collapse_sampled(p.outcome.post_state, alone, rest, cfg.shots,
                                        cfg.seed + seed_offset);
    return grouped_collapse(p.outcome.post_state, alone, rest);
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << body;
}

int cmd_align(const RunConfig& cfg) {
    Pipeline p = build_pipeline(cfg);
    MatchConfig mcfg;
    mcfg.min_score = cfg.min_score;
    mcfg.use_reverse_pass = p.model.has_scores();

    Alignment alignment;
    if (p.nets.size() == 2) {
        GroupedTables forward = tables_for(p, cfg, 0, 1);
        std::optional<GroupedTables> reverse;
        if (mcfg.use_reverse_pass)
            reverse = tables_for(p, cfg, 1, 2);
        alignment = match_pairwise(forward, reverse, p.nets[0], p.nets[1], mcfg);
    } else {
        alignment = match_multiway({tables_for(p, cfg, 0, 1)}, p.nets, mcfg);
    }
    alignment.warnings.insert(alignment.warnings.end(), p.outcome.warnings.begin(),
                              p.outcome.warnings.end());

    std::string out_path = cfg.out_path.empty() ? "alignment.json" : cfg.out_path;
    write_text_file(out_path, alignment_to_json(alignment).dump(2) + "\n");

    std::cout << "aligned " << alignment.tuples.size() << " tuples across "
              << alignment.networks.size() << " networks\n";
    for (const auto& tuple : alignment.tuples) {
        std::cout << " ";
        for (const auto& node : tuple.nodes)
            std::cout << " " << node;
        std::cout << "  score " << tuple.score << "  [" << provenance_name(tuple.provenance)
                  << "]\n";
    }
    if (std::isnan(alignment.edge_correctness))
        std::cout << "edge_correctness: undefined\n";
    else
        std::cout << "edge_correctness: " << alignment.edge_correctness << "\n";
    std::cout << "success_probability: " << p.outcome.success_probability << "\n";
    if (alignment.warnings.empty())
        std::cout << "warnings: none\n";
    else
        for (const auto& w : alignment.warnings)
            std::cout << "warning: " << w << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_probs(const RunConfig& cfg) {
    Pipeline p = build_pipeline(cfg);
    std::string prefix = cfg.out_path.empty() ? "probs" : cfg.out_path;
    std::vector<std::string> written;

    auto dump_setting = [&](int alone, std::uint64_t seed_offset, const std::string& tag) {
        GroupedTables tables = tables_for(p, cfg, alone, seed_offset);
        std::ostringstream body;
        write_tables_tsv(body, tables, p.nets);
        std::string path = prefix + "." + tag + ".tsv";
        write_text_file(path, body.str());
        written.push_back(path);
    };

    if (p.nets.size() == 2) {
        dump_setting(0, 1, "forward");
        if (p.model.has_scores())
            dump_setting(1, 2, "reverse");
    } else {
        dump_setting(0, 1, "grouped");
    }
    for (const auto& path : written)
        std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
    Pipeline p = build_pipeline(cfg);
    const HermitianModel& base = p.model.base;

    EigenSystem sys = eig_oracle(base.h);
    double rho = sys.values[0].real();
    double skew_norm = base.s.cwiseAbs().maxCoeff();
    NormalityReport normality = normality_report(p.joint);

    bool exact_mode = base.mode == ModelMode::exact_stochastic;
    std::vector<double> success =
        exact_mode ? success_probability(p.joint.matrix) : success_probability(base.h);

    nlohmann::json j;
    j["networks"] = nlohmann::json::array();
    for (const auto& net : p.nets)
        j["networks"].push_back(net.name);
    j["dimension"] = p.joint.dim();
    j["model"] = exact_mode ? "exact-stochastic" : "closest-hermitian";
    j["hermitian"] = {{"rho", rho},
                      {"rho_lower", base.rho_lower},
                      {"rho_upper", base.rho_upper},
                      {"rho_above_half", rho > 0.5},
                      {"scale", base.scale},
                      {"skew_max_abs", skew_norm},
                      {"skew_is_zero", skew_norm <= 1e-12}};
    j["normality"] = {{"is_normal", normality.is_normal},
                      {"normality_defect", normality.normality_defect},
                      {"commutator_hs", normality.commutator_hs},
                      {"eig_alignment", normality.eig_alignment}};
    j["success_probability"] = success;
    std::vector<double> spectrum;
    for (Eigen::Index k = 0; k < sys.values.size(); ++k)
        spectrum.push_back(sys.values[k].real());
    j["h_eigenvalues"] = spectrum;
    if (p.model.has_scores()) {
        j["scores"] = {{"commutator_norm", p.model.commutator_norm},
                       {"commuting", p.model.commuting()}};
    }
    j["warnings"] = p.outcome.warnings;

    std::string out_path = cfg.out_path.empty() ? "spectrum.json" : cfg.out_path;
    write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "rho(H) = " << rho << " in [" << base.rho_lower << ", " << base.rho_upper
              << "], above 0.5: " << (rho > 0.5 ? "yes" : "no") << "\n";
    std::cout << "principal success probability: " << (success.empty() ? 0.0 : success[0])
              << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_bench(const std::vector<int>& sizes, int repetitions, int phase_qubits,
              std::uint64_t seed, const std::string& out_path) {
    auto rows = run_bench(sizes, repetitions, phase_qubits, seed);
    std::ostringstream body;
    write_bench_csv(body, rows);
    std::string path = out_path.empty() ? "bench.csv" : out_path;
    write_text_file(path, body.str());
    std::cout << body.str();
    std::cout << "wrote " << path << "\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Spectral network alignment via simulated phase estimation"};
    app.require_subcommand(1);

    RunConfig align_cfg, probs_cfg, spectrum_cfg;
    CLI::App* align = app.add_subcommand("align", "Align networks end to end");
    add_run_flags(align, align_cfg);
    CLI::App* probs = app.add_subcommand("probs", "Dump conditional-probability tables");
    add_run_flags(probs, probs_cfg);
    CLI::App* spectrum = app.add_subcommand("spectrum", "Operator spectral report");
    add_run_flags(spectrum, spectrum_cfg);

    std::vector<int> bench_sizes{4, 8, 16};
    int bench_reps = 3;
    int bench_qubits = 6;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    CLI::App* bench = app.add_subcommand("bench", "Joint vs per-factor scaling benchmark");
    bench->add_option("--sizes", bench_sizes, "Factor sizes to time");
    bench->add_option("--reps", bench_reps, "Repetitions per size")->check(CLI::Range(1, 100));
    bench->add_option("--phase-qubits", bench_qubits, "Phase register size t")
        ->check(CLI::Range(2, 12));
    bench->add_option("--seed", bench_seed, "Graph generator seed");
    bench->add_option("--out", bench_out, "CSV path");

    CLI11_PARSE(app, argc, argv);

    if (align->parsed())
        return cmd_align(align_cfg);
    if (probs->parsed())
        return cmd_probs(probs_cfg);
    if (spectrum->parsed())
        return cmd_spectrum(spectrum_cfg);
    return cmd_bench(bench_sizes, bench_reps, bench_qubits, bench_seed, bench_out);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
