#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdu/sdu.hpp"

namespace {

struct GenerateArgs {
    int cells = 500;
    int grid = 7;
    double kappa = 1.0;
    double gamma = 0.5;
    int k = 10;
    int periods = 192;
    std::uint64_t seed = 0;
    std::string out;
};

struct SolveArgs {
    std::string instance;
    std::string algo = "sdu";
    int k = 10;
    double lambda = 0.5;
    std::uint64_t seed = 0;
    std::string out;
};

struct BacktestArgs {
    std::string instance;
    std::string deployment;
    double lambda = 0.5;
    int norm_samples = 100;
    std::uint64_t seed = 0;
    std::string out;
};

struct SweepArgs {
    std::string config;
    std::string out_dir;
};

int run_generate(const GenerateArgs& args) {
    sdu::GenConfig config;
    config.n_cells = args.cells;
    config.grid_side = args.grid;
    config.kappa_factor = args.kappa;
    config.gamma_factor = args.gamma;
    config.k_planned = args.k;
    config.n_periods = args.periods;
    const sdu::Instance inst = sdu::generate_synthetic(config, args.seed);
    sdu::save_instance(inst, args.out);
    std::cout << "wrote " << args.out << ": " << inst.n() << " cells, " << inst.m()
              << " candidates, " << args.periods << " periods\n";
    return 0;
}

int run_solve(const SolveArgs& args) {
    const sdu::Instance inst = sdu::load_instance(args.instance);
    const sdu::Weights w = sdu::Weights::from_lambda1(args.lambda);
    sdu::Deployment dep;
    std::string detail;
    if (args.algo == "sdu") {
        const sdu::SolveResult result = sdu::solve(inst, args.k, w);
        dep = result.deployment;
        detail = result.branch == sdu::Branch::upper ? " (branch=upper)" : " (branch=lower)";
    } else if (args.algo == "rand") {
        dep = sdu::solve_rand(inst, args.k, args.seed);
    } else if (args.algo == "facility") {
        dep = sdu::solve_facility(inst, args.k);
    } else if (args.algo == "knapsack") {
        dep = sdu::solve_knapsack(inst, args.k);
    } else {
        throw sdu::ValidationError("unknown algorithm \"" + args.algo + "\"");
    }
    sdu::save_deployment(dep, args.out);
    std::cout << args.algo << ": objective " << sdu::omega_hat(inst, dep, w) << detail
              << ", wrote " << args.out << "\n";
    return 0;
}

int run_backtest(const BacktestArgs& args) {
    const sdu::Instance inst = sdu::load_instance(args.instance);
    const sdu::Deployment dep = sdu::load_deployment(args.deployment);
    const int k = static_cast<int>(dep.servers.size());
    const sdu::NormConstants norm =
        sdu::normalize_constants(inst, k, args.norm_samples, args.seed);
    sdu::BacktestReport report;
    report.lambda = args.lambda;
    report.norm = norm;
    sdu::BacktestRow row = sdu::backtest(inst, dep, args.lambda, norm);
    row.algo = "deployment";
    report.rows.push_back(std::move(row));
    sdu::save_backtest_report(report, args.out);
    std::cout << "adjusted objective " << report.rows.front().adjusted_pi << " (a = " << norm.a
              << ", b = " << norm.b << "), wrote " << args.out << "\n";
    return 0;
}

int run_sweep_cmd(const SweepArgs& args) {
    const sdu::SweepConfig config = sdu::load_sweep_config(args.config);
    const sdu::SweepResult result = sdu::run_sweep(config, args.out_dir);
    std::cout << "wrote " << result.rows.size() << " rows to " << args.out_dir
              << "/sweep.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-server deployment under uncertain workloads and capacities"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic instance");
    generate->add_option("--cells", gen.cells, "Number of demand cells")->required();
    generate->add_option("--grid", gen.grid, "Candidate regions per axis")->required();
    generate->add_option("--kappa", gen.kappa, "Capacity scale factor")->required();
    generate->add_option("--gamma", gen.gamma, "Capacity variation factor")->required();
    generate->add_option("--k", gen.k, "Planned deployment size for capacity scaling")
        ->required();
    generate->add_option("--periods", gen.periods, "Stored sample periods")->required();
    generate->add_option("--seed", gen.seed, "Random seed")->required();
    generate->add_option("--out", gen.out, "Output instance JSON")->required();

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Select servers and assign cells");
    solve->add_option("--instance", solve_args.instance, "Instance JSON")->required();
    solve->add_option("--algo", solve_args.algo, "One of sdu|rand|facility|knapsack")
        ->check(CLI::IsMember({"sdu", "rand", "facility", "knapsack"}));
    solve->add_option("--k", solve_args.k, "Number of servers")->required();
    solve->add_option("--lambda", solve_args.lambda, "Computing-efficiency weight in [0,1]");
    solve->add_option("--seed", solve_args.seed, "Seed (used by rand)");
    solve->add_option("--out", solve_args.out, "Output deployment JSON")->required();

    BacktestArgs bt;
    CLI::App* backtest = app.add_subcommand("backtest", "Back-test a deployment");
    backtest->add_option("--instance", bt.instance, "Instance JSON")->required();
    backtest->add_option("--deployment", bt.deployment, "Deployment JSON")->required();
    backtest->add_option("--lambda", bt.lambda, "Computing-efficiency weight in [0,1]");
    backtest->add_option("--norm-samples", bt.norm_samples,
                         "Random deployments for normalization");
    backtest->add_option("--seed", bt.seed, "Seed for normalization draws");
    backtest->add_option("--out", bt.out, "Output report JSON")->required();

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario grid");
    sweep->add_option("--config", sweep_args.config, "Sweep config JSON")->required();
    sweep->add_option("--out-dir", sweep_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return run_generate(gen);
        if (solve->parsed()) return run_solve(solve_args);
        if (backtest->parsed()) return run_backtest(bt);
        if (sweep->parsed()) return run_sweep_cmd(sweep_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const sdu::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
