// Command-line front end: design sparse conductance networks, evaluate and
// validate them, sweep the sparsity weight, and export the SDP form.
//
// Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lapsync/lapsync.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::string fmt(double v) { return lapsync::detail::format_double(v); }

/// Loads Q2 from `gen:NAME:n` or from a matrix file.
lapsync::SymMatrix load_q2(const std::string& source) {
    if (source.rfind("gen:", 0) == 0) {
        const std::size_t colon = source.find(':', 4);
        if (colon == std::string::npos) throw lapsync::ValidationError("--q2 generator must be gen:NAME:n");
        const std::string name = source.substr(4, colon - 4);
        int n = 0;
        try {
            n = std::stoi(source.substr(colon + 1));
        } catch (const std::exception&) {
            throw lapsync::ValidationError("--q2 generator size is not an integer: " + source);
        }
        if (name == "path") return lapsync::q2_path(n);
        if (name == "projector") return lapsync::q2_projector(n);
        throw lapsync::ValidationError("unknown Q2 generator: " + name + " (have: path, projector)");
    }
    return lapsync::SymMatrix(lapsync::read_matrix_file(source));
}

lapsync::SymMatrix load_sym_matrix(const std::string& path) {
    return lapsync::SymMatrix(lapsync::read_matrix_file(path));
}

struct CommonOptions {
    std::string q2_source;
    double r = 1.0;
    std::vector<double> gammas;
    double delta = 0.0;   // 0 = scale-aware default
    double epsilon = 0.0; // 0 = scale-aware default
    double trunc = -1.0;  // <0 = scale-aware default
    std::string out_dir = ".";
    bool oracle = false;
    bool offdiag_only_l1 = false;
    bool write_k = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool needs_q2) {
    auto* q2 = cmd->add_option("--q2", opt.q2_source, "Q2 matrix file or generator gen:path:N / gen:projector:N");
    if (needs_q2) q2->required();
    cmd->add_option("--r", opt.r, "control weight r > 0");
    cmd->add_option("--gamma", opt.gammas, "sparsity weight (repeatable for sweep)");
    cmd->add_option("--delta", opt.delta, "reweighting smoothing delta (default: 1e-3 max|K_0|)");
    cmd->add_option("--epsilon", opt.epsilon, "reweighting stop tolerance (default: 1e-5 ||K_0||_F)");
    cmd->add_option("--trunc", opt.trunc, "sparsity truncation threshold (default: 1e-3 max offdiag)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_flag("--offdiag-only-l1", opt.offdiag_only_l1, "exclude the diagonal from the l1 penalty");
}

lapsync::ProblemSpec make_spec(const CommonOptions& opt, double gamma) {
    lapsync::SymMatrix q2 = load_q2(opt.q2_source);
    const int n = q2.size();
    lapsync::Matrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = 1.0;
    return {std::move(q2), opt.r, gamma, lapsync::SymMatrix(std::move(w)), 1e-9, 1e-13, 200000,
            opt.offdiag_only_l1};
}

double truncation_for(const lapsync::SymMatrix& k, const CommonOptions& opt) {
    return opt.trunc >= 0.0 ? opt.trunc : lapsync::sparsity_truncation(k);
}

std::filesystem::path out_path(const CommonOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return std::filesystem::path(opt.out_dir) / name;
}

void write_summary(std::ostream& out, const lapsync::SolveReport& rep, const lapsync::ProblemSpec& spec,
                   double trunc) {
    out << "n " << spec.n() << '\n';
    out << "r " << fmt(spec.r()) << '\n';
    out << "gamma " << fmt(spec.gamma()) << '\n';
    out << "objective_total " << fmt(rep.objective.total) << '\n';
    out << "h2_part " << fmt(rep.objective.h2_part) << '\n';
    out << "l1_part " << fmt(rep.objective.l1_part) << '\n';
    out << "iterations " << rep.iterations << '\n';
    out << "termination " << lapsync::to_string(rep.termination) << '\n';
    out << "nnz_offdiag " << rep.nnz_offdiag << '\n';
    out << "truncation " << fmt(trunc) << '\n';
    if (rep.outer_iterations > 0) {
        out << "outer_iterations " << rep.outer_iterations << '\n';
        out << "delta " << fmt(rep.delta_used) << '\n';
        out << "epsilon " << fmt(rep.epsilon_used) << '\n';
        out << "outer_nnz";
        for (int v : rep.outer_nnz) out << ' ' << v;
        out << '\n';
    }
    out << "tol_grad " << fmt(spec.tol_grad()) << '\n';
    out << "tol_obj " << fmt(spec.tol_obj()) << '\n';
}

int cmd_design(const CommonOptions& opt) {
    if (opt.gammas.size() != 1)
        throw lapsync::ValidationError("design: exactly one --gamma is required");
    const lapsync::ProblemSpec spec = make_spec(opt, opt.gammas[0]);
    lapsync::ReweightDefaults defs = lapsync::reweight_defaults(spec);
    if (opt.delta > 0.0) defs.delta = opt.delta;
    if (opt.epsilon > 0.0) defs.epsilon = opt.epsilon;

    const lapsync::SolveReport rep = [&] {
        try {
            return lapsync::reweighted_l1(spec, defs.delta, defs.epsilon, defs.max_outer);
        } catch (const lapsync::SolverError&) {
            // Leave a partial record of the failed run before the error exit.
            std::ofstream partial(out_path(opt, "summary.txt"));
            partial << "n " << spec.n() << '\n'
                    << "gamma " << fmt(spec.gamma()) << '\n'
                    << "delta " << fmt(defs.delta) << '\n'
                    << "epsilon " << fmt(defs.epsilon) << '\n'
                    << "status failed\n";
            throw;
        }
    }();
    const double trunc = truncation_for(rep.k_opt, opt);

    lapsync::write_matrix_file(out_path(opt, "K.txt").string(), rep.k_opt.mat());
    lapsync::write_graph_file(out_path(opt, "K.edges.txt").string(), lapsync::from_matrix(rep.k_opt, trunc));
    std::ofstream summary(out_path(opt, "summary.txt"));
    if (!summary) throw lapsync::IoError("cannot open summary.txt for writing");
    write_summary(summary, rep, spec, trunc);

    std::cout << "objective_total " << fmt(rep.objective.total) << '\n'
              << "h2_part " << fmt(rep.objective.h2_part) << '\n'
              << "l1_part " << fmt(rep.objective.l1_part) << '\n'
              << "nnz_offdiag " << rep.nnz_offdiag << '\n'
              << "outer_iterations " << rep.outer_iterations << '\n'
              << "wrote " << out_path(opt, "K.txt").string() << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& opt, const std::string& k_path) {
    const double gamma = opt.gammas.empty() ? 0.0 : opt.gammas[0];
    const lapsync::ProblemSpec spec = make_spec(opt, gamma);
    const lapsync::SymMatrix k = load_sym_matrix(k_path);

    const lapsync::MembershipReport member = lapsync::check_membership(k);
    std::cout << "is_symmetric " << (member.is_symmetric ? 1 : 0) << '\n'
              << "row_sums_zero " << (member.row_sums_zero ? 1 : 0) << '\n'
              << "offdiag_nonpositive " << (member.offdiag_nonpositive ? 1 : 0) << '\n'
              << "connected " << (member.connected ? 1 : 0) << '\n'
              << "lambda2 " << fmt(member.lambda2) << '\n';
    if (!member.all()) {
        std::cerr << "eval: K is not in the connected-Laplacian cone\n";
        return kExitValidation;
    }

    const lapsync::ObjectiveValue obj = lapsync::eval_J(k, spec);
    std::cout << "h2_part " << fmt(obj.h2_part) << '\n'
              << "l1_part " << fmt(obj.l1_part) << '\n'
              << "objective_total " << fmt(obj.total) << '\n';

    if (opt.oracle) {
        const double oracle = lapsync::eval_full_lyapunov_oracle(k, 1.0, spec);
        const double gap = std::abs(obj.h2_part - oracle) / std::max(1.0, std::abs(oracle));
        std::cout << "oracle_h2 " << fmt(oracle) << '\n' << "oracle_relative_gap " << fmt(gap) << '\n';
    }
    return 0;
}

int cmd_sweep(const CommonOptions& opt) {
    if (opt.gammas.empty()) throw lapsync::ValidationError("sweep: at least one --gamma is required");
    std::ofstream table(out_path(opt, "sweep.tsv"));
    if (!table) throw lapsync::IoError("cannot open sweep.tsv for writing");
    table << "gamma\th2_part\tl1_part\tnnz_offdiag\touter_iterations\tstatus\n";

    for (std::size_t idx = 0; idx < opt.gammas.size(); ++idx) {
        const double gamma = opt.gammas[idx];
        std::ostringstream row;
        try {
            const lapsync::ProblemSpec spec = make_spec(opt, gamma);
            lapsync::ReweightDefaults defs = lapsync::reweight_defaults(spec);
            if (opt.delta > 0.0) defs.delta = opt.delta;
            if (opt.epsilon > 0.0) defs.epsilon = opt.epsilon;
            const lapsync::SolveReport rep = lapsync::reweighted_l1(spec, defs.delta, defs.epsilon, defs.max_outer);
            row << fmt(gamma) << '\t' << fmt(rep.objective.h2_part) << '\t' << fmt(rep.objective.l1_part) << '\t'
                << rep.nnz_offdiag << '\t' << rep.outer_iterations << '\t' << "ok";
            if (opt.write_k) {
                std::ostringstream name;
                name << "K_g" << idx << ".txt";
                lapsync::write_matrix_file(out_path(opt, name.str()).string(), rep.k_opt.mat());
            }
        } catch (const lapsync::Error& err) {
            row << fmt(gamma) << "\t-\t-\t-\t-\tfailed: " << err.what();
        }
        table << row.str() << '\n';
        std::cout << row.str() << '\n';
    }
    return 0;
}

int cmd_check(const std::string& k_path) {
    const lapsync::SymMatrix k = load_sym_matrix(k_path);
    const lapsync::MembershipReport member = lapsync::check_membership(k);
    std::cout << "is_symmetric " << (member.is_symmetric ? 1 : 0) << '\n'
              << "row_sums_zero " << (member.row_sums_zero ? 1 : 0) << '\n'
              << "offdiag_nonpositive " << (member.offdiag_nonpositive ? 1 : 0) << '\n'
              << "connected " << (member.connected ? 1 : 0) << '\n'
              << "lambda2 " << fmt(member.lambda2) << '\n';
    return member.all() ? 0 : kExitValidation;
}

int cmd_export_sdp(const CommonOptions& opt) {
    const double gamma = opt.gammas.empty() ? 0.0 : opt.gammas[0];
    const lapsync::ProblemSpec spec = make_spec(opt, gamma);
    const lapsync::SdpProblemData sdp = lapsync::assemble_sdp(spec);
    const auto path = out_path(opt, "problem.dat-s");
    lapsync::write_sdpa_sparse_file(path.string(), sdp);

    // Substitution self-check: solve, complete to (K, X, Y), verify against
    // the assembled data.
    const lapsync::SolveReport rep = lapsync::solve_prox(spec, lapsync::complete_edge_set(spec.n()));
    const auto [x, y] = lapsync::sdp_certificate(spec, rep.k_opt);
    const lapsync::SdpSubstitution sub = lapsync::sdp_substitute(sdp, rep.k_opt, x, y);
    const double obj_gap =
        std::abs(sub.objective_value - rep.objective.total) / std::max(1.0, std::abs(rep.objective.total));

    std::cout << "wrote " << path.string() << '\n'
              << "lmi_dim " << sdp.lmi_dim << '\n'
              << "num_vars " << sdp.num_vars << '\n'
              << "verify_lmi_min_eigenvalue " << fmt(sub.lmi_min_eigenvalue) << '\n'
              << "verify_max_linear_violation " << fmt(sub.max_linear_violation) << '\n'
              << "verify_objective " << fmt(sub.objective_value) << '\n'
              << "verify_objective_relative_gap " << fmt(obj_gap) << '\n';

    const double scale = 1e-7 * (1.0 + spec.q2().max_norm());
    if (sub.lmi_min_eigenvalue < -scale || sub.max_linear_violation > scale || obj_gap > 1e-7) {
        std::cerr << "export-sdp: substitution check failed\n";
        return kExitSolver;
    }
    std::cout << "verify ok\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse conductance network design for oscillator synchronization"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string k_path;

    CLI::App* design = app.add_subcommand("design", "run the reweighted l1 design loop and write K");
    add_common_flags(design, opt, true);

    CLI::App* eval = app.add_subcommand("eval", "evaluate the objective of a given K");
    add_common_flags(eval, opt, true);
    eval->add_option("--k", k_path, "conductance matrix file")->required();
    eval->add_flag("--oracle", opt.oracle, "cross-check h2 against the Lyapunov oracle (n <= 16)");

    CLI::App* sweep = app.add_subcommand("sweep", "solve for each --gamma and tabulate the tradeoff");
    add_common_flags(sweep, opt, true);
    sweep->add_flag("--write-k", opt.write_k, "write a K file per gamma");

    CLI::App* check = app.add_subcommand("check", "test membership of K in the connected-Laplacian cone");
    check->add_option("--k", k_path, "conductance matrix file")->required();

    CLI::App* export_sdp = app.add_subcommand("export-sdp", "write the SDP interchange file and verify it");
    add_common_flags(export_sdp, opt, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (design->parsed()) return cmd_design(opt);
        if (eval->parsed()) return cmd_eval(opt, k_path);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (check->parsed()) return cmd_check(k_path);
        if (export_sdp->parsed()) return cmd_export_sdp(opt);
    } catch (const lapsync::IoError& err) {
        std::cerr << "I/O error: " << err.what() << '\n';
        return kExitIo;
    } catch (const lapsync::ValidationError& err) {
        std::cerr << "validation error: " << err.what() << '\n';
        return kExitValidation;
    } catch (const lapsync::SolverError& err) {
        std::cerr << "solver error: " << err.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
