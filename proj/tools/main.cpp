// spnf: symplectic normal form CLI (analyze / generate / compare / verify)
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "spnf/blocks.hpp"
#include "spnf/report_io.hpp"
#include "spnf/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotSymplectic = 2;
constexpr int kExitAmbiguity = 3;
constexpr int kExitNotConjugate = 4;
constexpr int kExitVerify = 5;

struct JobConfig {
    std::string output_path;
    std::string format = "json";
    spnf::ToleranceConfig tol;
};

spnf::ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spnf::InvalidInput("cannot open '" + path + "'");
    try {
        return spnf::ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw spnf::InvalidInput("cannot parse '" + path + "': " + e.what());
    }
}

void write_out(const JobConfig& job, const std::string& text) {
    if (job.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(job.output_path, std::ios::binary);
    if (!out) throw spnf::InvalidInput("cannot write '" + job.output_path + "'");
    out << text;
}

std::string csv_matrix(const spnf::Mat& M) {
    std::string out;
    char buf[40];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
            out += buf;
            out += (j + 1 < M.cols()) ? "," : "\n";
        }
    }
    return out;
}

int cmd_analyze(const std::string& path, const JobConfig& job) {
    spnf::Mat A = spnf::read_matrix_doc(load_json(path));
    spnf::NormalFormResult r = spnf::analyze(A, job.tol);
    if (job.format == "csv-matrix")
        write_out(job, csv_matrix(r.N));
    else
        write_out(job, spnf::dump_document(spnf::analyze_report(A, r)));
    return kExitOk;
}

int cmd_generate(const std::string& spec_path, std::uint64_t seed, const JobConfig& job) {
    spnf::BlockSpec spec = spnf::blockspec_from_json(load_json(spec_path));
    spec.conjugator_seed = seed;
    auto [A, expected] = spnf::build_from_params(spec);
    if (job.format == "csv-matrix")
        write_out(job, csv_matrix(A));
    else
        write_out(job, spnf::dump_document(spnf::generate_report(A, spec, expected)));
    return kExitOk;
}

int cmd_compare(const std::string& pa, const std::string& pb, const JobConfig& job) {
    spnf::Mat A = spnf::read_matrix_doc(load_json(pa));
    spnf::Mat B = spnf::read_matrix_doc(load_json(pb));
    spnf::ConjugacyReport r = spnf::conjugacy_equal(A, B, job.tol);
    write_out(job, spnf::dump_document(spnf::compare_report(r)));
    return r.equal ? kExitOk : kExitNotConjugate;
}

int cmd_verify(const std::string& path, const JobConfig& job) {
    spnf::ordered_json doc = load_json(path);
    for (const char* f : {"matrix", "blocks", "N", "P"})
        if (!doc.contains(f))
            throw spnf::InvalidInput(std::string("report is missing field '") + f + "'");
    spnf::Mat A = spnf::matrix_from_json(doc["matrix"], "matrix");
    spnf::Mat N = spnf::matrix_from_json(doc["N"], "N");
    spnf::Mat P = spnf::matrix_from_json(doc["P"], "P");
    std::vector<spnf::NormalFormBlock> blocks;
    for (const auto& jb : doc["blocks"]) blocks.push_back(spnf::block_from_json(jb));

    const double tol = job.tol.residual_tol;
    const double n = static_cast<double>(A.rows()) / 2.0;
    const spnf::Mat W = spnf::omega0(A.rows());
    std::vector<std::string> failures;

    spnf::Mat rebuilt;
    for (const auto& b : blocks) rebuilt = spnf::symplectic_direct_sum(rebuilt, spnf::build_block(b));
    if (rebuilt.rows() != N.rows() || (rebuilt - N).norm() > 1e-12 * std::max(1.0, N.norm()))
        failures.push_back("N does not equal the direct sum of its blocks");
    double in_sympl = spnf::symplecticity_residual(A);
    if (in_sympl > tol * n)
        failures.push_back("input symplecticity residual " + std::to_string(in_sympl));
    double p_sympl = (P.transpose() * W * P - W).norm();
    if (p_sympl > tol * n)
        failures.push_back("P symplecticity residual " + std::to_string(p_sympl));
    double recon = (A * P - P * N).norm();
    if (recon > tol * A.norm() * 1e3)
        failures.push_back("reconstruction residual " + std::to_string(recon));

    spnf::ordered_json out;
    out["command"] = "verify";
    out["ok"] = failures.empty();
    out["failures"] = failures;
    write_out(job, spnf::dump_document(out));
    return failures.empty() ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symplectic normal form and conjugacy toolkit"};
    app.require_subcommand(1);

    JobConfig job;
    std::string in_a, in_b, spec_path;
    std::uint64_t seed = 0;
    double tol_override = -1, rank_tol = -1, eig_tol = -1, circle_tol = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-o,--output", job.output_path, "output file (default: stdout)");
        cmd->add_option("--tol", tol_override, "residual tolerance override");
        cmd->add_option("--rank-tol", rank_tol, "relative rank tolerance override");
        cmd->add_option("--eig-tol", eig_tol, "eigenvalue clustering tolerance override");
        cmd->add_option("--circle-tol", circle_tol, "unit-circle snap tolerance override");
    };

    auto* analyze = app.add_subcommand("analyze", "compute the symplectic normal form");
    analyze->add_option("input", in_a, "matrix document")->required();
    analyze->add_option("--format", job.format, "json or csv-matrix")
        ->check(CLI::IsMember({"json", "csv-matrix"}));
    add_common(analyze);

    auto* generate = app.add_subcommand("generate", "build a matrix from a block spec");
    generate->add_option("--spec", spec_path, "block spec document")->required();
    generate->add_option("--seed", seed, "conjugator seed")->required();
    generate->add_option("--format", job.format, "json or csv-matrix")
        ->check(CLI::IsMember({"json", "csv-matrix"}));
    add_common(generate);

    auto* compare = app.add_subcommand("compare", "decide conjugacy of two matrices");
    compare->add_option("a", in_a, "first matrix document")->required();
    compare->add_option("b", in_b, "second matrix document")->required();
    add_common(compare);

    auto* verify = app.add_subcommand("verify", "recheck the residuals of a report");
    verify->add_option("report", in_a, "previously emitted analyze report")->required();
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (tol_override > 0) job.tol.residual_tol = tol_override;
        if (rank_tol > 0) job.tol.rank_rel_tol = rank_tol;
        if (eig_tol > 0) job.tol.eig_cluster_tol = eig_tol;
        if (circle_tol > 0) job.tol.circle_snap_tol = circle_tol;
        job.tol.validate();
        if (analyze->parsed()) return cmd_analyze(in_a, job);
        if (generate->parsed()) return cmd_generate(spec_path, seed, job);
        if (compare->parsed()) return cmd_compare(in_a, in_b, job);
        if (verify->parsed()) return cmd_verify(in_a, job);
    } catch (const spnf::NotSymplectic& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotSymplectic;
    } catch (const spnf::ToleranceAmbiguity& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAmbiguity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
