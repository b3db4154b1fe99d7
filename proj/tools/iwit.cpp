// iwit — command-line front end: boundary-curve emission, compatibility
// checks, discrimination solves, MUB witness evaluation, witness evaluation /
// normalization and closed-form region membership.
//
// Exit codes: 0 success, 2 validation or input errors, 3 solver Undetermined.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iwit/iwit.hpp"

namespace {

using iwit::Json;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("IWIT_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[iwit] " << msg << "\n";
}

std::pair<double, double> parse_pair_arg(const std::string& text, const std::string& flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw iwit::Error(flag + " expects two comma-separated numbers, got '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw iwit::Error(flag + " expects two comma-separated numbers, got '" + text + "'");
    }
}

void emit(const Json& result, const std::string& out_path) {
    if (out_path.empty())
        std::cout << result.dump(2) << "\n";
    else
        iwit::save_json_file(out_path, result);
}

struct CommonArgs {
    std::string out;
    std::string format = "json";
    double tol = 1e-7;
    int max_iter = 50000;
};

int run_boundary(int dim, int samples, const CommonArgs& args) {
    const auto records = iwit::sample_boundary_curve(dim, samples);
    log_info("sampled " + std::to_string(records.size()) + " boundary points for d=" +
             std::to_string(dim));
    if (args.format == "csv") {
        std::ostringstream csv;
        csv << iwit::kCurveCsvHeader << "\n";
        for (const auto& r : records) csv << iwit::curve_csv_row(r) << "\n";
        if (args.out.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(args.out);
            if (!f) throw iwit::Error("cannot write '" + args.out + "'");
            f << csv.str();
        }
        return 0;
    }
    Json rows = Json::array();
    for (const auto& r : records)
        rows.push_back(Json{{"theta", r.theta},
                            {"gamma_phi", r.gamma_phi},
                            {"gamma_psi", r.gamma_psi},
                            {"p_prior", r.p_prior},
                            {"p_post", r.p_post},
                            {"witness_constant", r.witness_constant}});
    emit(Json{{"dim", dim}, {"records", rows}}, args.out);
    return 0;
}

int run_compat(const std::string& pair_path, const CommonArgs& args) {
    const iwit::MeasurementPair pair = iwit::pair_from_json(iwit::load_json_file(pair_path));
    iwit::FeasibilityOptions opts;
    opts.tol = args.tol;
    opts.max_iter = args.max_iter;
    const iwit::CompatibilityReport report = iwit::joint_feasibility(pair, opts);
    log_info("feasibility finished after " + std::to_string(report.iterations) +
             " iterations, residual " + iwit::format_double(report.residual));
    Json out{{"verdict", iwit::to_string(report.verdict)},
             {"residual", report.residual},
             {"iterations", report.iterations}};
    if (report.certificate) out["certificate"] = iwit::to_json(*report.certificate);
    emit(out, args.out);
    return report.verdict == iwit::CompatibilityReport::Verdict::Undetermined ? 3 : 0;
}

int run_discriminate(const std::string& ensemble_path, const CommonArgs& args) {
    const Json j = iwit::load_json_file(ensemble_path);
    iwit::SolverOptions opts{args.max_iter, args.tol};
    if (j.contains("blockX") || j.contains("blockY")) {
        const iwit::PartitionedEnsemble pe = iwit::partitioned_from_json(j);
        const auto prior = iwit::p_prior_opt_full(pe, opts);
        const auto post = iwit::p_post_opt(pe, opts);
        emit(Json{{"p_prior", prior.value},
                  {"p_post", post.value},
                  {"gap", prior.value - post.value},
                  {"p_prior_method_x", iwit::to_string(prior.part_x.method)},
                  {"p_prior_method_y", iwit::to_string(prior.part_y.method)},
                  {"p_post_method", iwit::to_string(post.method)},
                  {"p_post_iterations", post.iterations},
                  {"p_post_residual", post.residual}},
             args.out);
        return 0;
    }
    const iwit::StateEnsemble e = iwit::ensemble_from_json(j);
    const auto res = iwit::pguess_opt(e, opts);
    emit(Json{{"p_guess", res.value},
              {"method", iwit::to_string(res.method)},
              {"iterations", res.iterations},
              {"residual", res.residual}},
         args.out);
    return 0;
}

int run_mub_witness(int dim, const std::string& mu_arg, const std::string& gamma_arg,
                    const std::string& pair_path, const CommonArgs& args) {
    const auto [mphi, mpsi] = parse_pair_arg(mu_arg, "--mu");
    const iwit::NoiseVector mu{mphi, mpsi};
    const iwit::MubPair mub = iwit::fourier_mub(dim);
    iwit::MeasurementPair pair = [&] {
        if (!pair_path.empty()) return iwit::pair_from_json(iwit::load_json_file(pair_path));
        if (gamma_arg.empty()) throw iwit::Error("mub-witness needs --gamma or --pair");
        const auto [gphi, gpsi] = parse_pair_arg(gamma_arg, "--gamma");
        return iwit::noisy_mub_pair(mub, iwit::SmearingVector{gphi, gpsi});
    }();
    const double value = iwit::mub_witness_value(mub, mu, pair);
    emit(Json{{"witness_value", value},
              {"detected", value < 0.0},
              {"witness_constant", iwit::mub_witness_constant(dim, mu)},
              {"p_prior", iwit::p_prior_mub(dim, mu)},
              {"p_post", iwit::p_post_mub(dim, mu)}},
         args.out);
    return 0;
}

int run_witness_eval(const std::string& witness_path, const std::string& pair_path,
                     const CommonArgs& args) {
    const iwit::Witness w = iwit::witness_from_json(iwit::load_json_file(witness_path));
    const iwit::MeasurementPair pair = iwit::pair_from_json(iwit::load_json_file(pair_path));
    const double value = iwit::eval_witness(w, pair);
    emit(Json{{"witness_value", value}, {"detected", value < 0.0}}, args.out);
    return 0;
}

int run_normalize(const std::string& witness_path, unsigned seed, const CommonArgs& args) {
    const iwit::Witness w = iwit::witness_from_json(iwit::load_json_file(witness_path));
    const auto norm = iwit::normalize_to_ensemble(w);

    // seeded self-check: alpha * W must equal delta' - P_prior(pe; A, B)
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = norm.ensemble.ensemble.dim;
    auto random_povm = [&](const std::vector<std::string>& labels) {
        std::vector<iwit::Matrix> blocks;
        iwit::Matrix total = iwit::Matrix::Zero(d, d);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            iwit::Matrix g(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) g(r, c) = iwit::Complex(gauss(rng), gauss(rng));
            blocks.push_back(g * g.adjoint());
            total += blocks.back();
        }
        Eigen::SelfAdjointEigenSolver<iwit::Matrix> solver(total);
        Eigen::VectorXd inv = solver.eigenvalues();
        for (int i = 0; i < d; ++i) inv(i) = 1.0 / std::sqrt(inv(i));
        const iwit::Matrix s =
            solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().adjoint();
        std::vector<iwit::HermitianOperator> effects;
        for (const auto& b : blocks) effects.emplace_back(iwit::Matrix(s * b * s));
        return iwit::validate_povm(std::move(effects), labels);
    };
    double max_residual = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        const iwit::MeasurementPair pair{random_povm(w.f.labels), random_povm(w.g.labels)};
        const double lhs = norm.alpha * iwit::eval_witness(w, pair);
        const double rhs = norm.delta_prime - iwit::p_prior_with(norm.ensemble, pair);
        max_residual = std::max(max_residual, std::abs(lhs - rhs));
    }
    log_info("normalization self-check max residual " + iwit::format_double(max_residual));

    emit(Json{{"alpha", norm.alpha},
              {"delta_prime", norm.delta_prime},
              {"mu_shift", norm.mu_shift},
              {"ensemble", iwit::to_json(norm.ensemble)},
              {"check", Json{{"pairs", 100}, {"seed", seed}, {"max_residual", max_residual}}}},
         args.out);
    return 0;
}

int run_region(int dim, const std::string& gamma_arg, const CommonArgs& args) {
    const auto [gphi, gpsi] = parse_pair_arg(gamma_arg, "--gamma");
    const iwit::SmearingVector g{gphi, gpsi};
    const iwit::RegionVerdict verdict = iwit::region_membership(dim, g);
    emit(Json{{"verdict", iwit::to_string(verdict)},
              {"gamma_phi", gphi},
              {"gamma_psi", gpsi}},
         args.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incompatibility witnesses as discrimination tasks"};
    app.require_subcommand(1);
    unsigned seed = 42;
    app.add_option("--seed", seed, "seed for randomized self-checks");

    int dim = 2;
    int samples = 64;
    std::string mu_arg, gamma_arg, pair_path, ensemble_path, witness_path;
    CommonArgs common;

    auto add_common = [&](CLI::App* cmd, bool with_format = false) {
        cmd->fallthrough();  // let global options (--seed) appear after the subcommand
        cmd->add_option("--out", common.out, "write the result to this path");
        cmd->add_option("--tol", common.tol, "solver tolerance");
        cmd->add_option("--max-iter", common.max_iter, "iteration cap");
        if (with_format)
            cmd->add_option("--format", common.format, "output format: json|csv")
                ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* boundary = app.add_subcommand("boundary", "sample the compatibility boundary curve");
    boundary->add_option("--dim", dim, "Hilbert space dimension")->required();
    boundary->add_option("--samples", samples, "number of theta samples");
    common.format = "csv";
    add_common(boundary, true);

    auto* compat = app.add_subcommand("compat", "decide joint measurability of a POVM pair");
    compat->add_option("--pair", pair_path, "measurement pair JSON")->required();
    add_common(compat);

    auto* discr = app.add_subcommand("discriminate", "solve a state discrimination problem");
    discr->add_option("--ensemble", ensemble_path, "state ensemble JSON")->required();
    add_common(discr);

    auto* mubw = app.add_subcommand("mub-witness", "evaluate the tight MUB witness");
    mubw->add_option("--dim", dim, "Hilbert space dimension")->required();
    mubw->add_option("--mu", mu_arg, "noise parameters mu_phi,mu_psi")->required();
    mubw->add_option("--gamma", gamma_arg, "smearing gamma_phi,gamma_psi of the probed pair");
    mubw->add_option("--pair", pair_path, "measurement pair JSON (alternative to --gamma)");
    add_common(mubw);

    auto* weval = app.add_subcommand("witness-eval", "evaluate a witness on a pair");
    weval->add_option("--witness", witness_path, "witness JSON")->required();
    weval->add_option("--pair", pair_path, "measurement pair JSON")->required();
    add_common(weval);

    auto* wnorm = app.add_subcommand("normalize-witness",
                                     "turn a witness into a partitioned state ensemble");
    wnorm->add_option("--witness", witness_path, "witness JSON")->required();
    add_common(wnorm);

    auto* region = app.add_subcommand("region", "closed-form noisy-MUB region membership");
    region->add_option("--dim", dim, "Hilbert space dimension")->required();
    region->add_option("--gamma", gamma_arg, "smearing gamma_phi,gamma_psi")->required();
    add_common(region);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (boundary->parsed()) return run_boundary(dim, samples, common);
        if (compat->parsed()) return run_compat(pair_path, common);
        if (discr->parsed()) return run_discriminate(ensemble_path, common);
        if (mubw->parsed()) return run_mub_witness(dim, mu_arg, gamma_arg, pair_path, common);
        if (weval->parsed()) return run_witness_eval(witness_path, pair_path, common);
        if (wnorm->parsed()) return run_normalize(witness_path, seed, common);
        if (region->parsed()) return run_region(dim, gamma_arg, common);
    } catch (const iwit::MaxIterExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const iwit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
