#include "kemeny/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Kemeny's constant of an irreducible Markov chain"};

    kemeny::RunConfig cfg;
    std::string kind = "adjacency", normalize = "row", method = "auto";
    std::string split = "half", solver = "lu";
    bool json = false, csv = false;

    app.add_option("input", cfg.input_path, "Matrix Market file (.mtx)")->required();
    app.add_option("--kind", kind, "adjacency|transition")
        ->check(CLI::IsMember({"adjacency", "transition"}));
    app.add_option("--normalize", normalize, "row|sym (sym enables hutchpp)")
        ->check(CLI::IsMember({"row", "sym"}));
    app.add_option("--method", method, "direct|eig|dnc|hutchpp|auto|closed-form")
        ->check(CLI::IsMember({"direct", "eig", "dnc", "hutchpp", "auto", "closed-form"}));
    app.add_option("--n0", cfg.dnc.base_size, "dnc dense base-case size");
    app.add_option("--split", split, "half|nd")->check(CLI::IsMember({"half", "nd"}));
    app.add_option("--solver", solver, "lu|gmres|bicgstab")
        ->check(CLI::IsMember({"lu", "gmres", "bicgstab"}));
    app.add_option("--tol", cfg.dnc.solver_tol, "dnc solver tolerance");
    app.add_option("--delta", cfg.hutch.delta, "hutchpp failure probability");
    app.add_option("--eps", cfg.hutch.epsilon, "hutchpp relative accuracy");
    app.add_option("--samples", cfg.hutch.samples, "hutchpp query budget (overrides delta/eps)");
    app.add_option("--seed", cfg.hutch.rng_seed, "hutchpp rng seed");
    app.add_option("--inner-tol", cfg.hutch.inner_tol, "hutchpp oracle CG tolerance");
    app.add_option("--n-dense", cfg.dense_limit, "dense-path size limit for auto dispatch");
    app.add_flag("--keep-weights", cfg.keep_weights, "keep adjacency weights (default binarizes)");
    app.add_flag("--largest-scc", cfg.take_largest_scc,
                 "restrict a reducible input to its largest strongly connected component");
    app.add_flag("--coarse", cfg.coarse, "let auto dispatch pick hutchpp on symmetric chains");
    app.add_flag("--json", json, "JSON report");
    app.add_flag("--csv", csv, "CSV report");

    CLI11_PARSE(app, argc, argv);

    cfg.kind = kind == "adjacency" ? kemeny::InputKind::Adjacency
                                   : kemeny::InputKind::Transition;
    cfg.normalization = normalize == "row" ? kemeny::GraphNormalization::RowStochastic
                                           : kemeny::GraphNormalization::SymmetricNormalized;
    if (method == "direct") cfg.method = kemeny::RunMethod::Direct;
    else if (method == "eig") cfg.method = kemeny::RunMethod::Eig;
    else if (method == "dnc") cfg.method = kemeny::RunMethod::Dnc;
    else if (method == "hutchpp") cfg.method = kemeny::RunMethod::HutchPP;
    else if (method == "closed-form") cfg.method = kemeny::RunMethod::ClosedForm;
    else cfg.method = kemeny::RunMethod::Auto;
    cfg.dnc.split = split == "nd" ? kemeny::SplitStrategy::NestedDissectionGuided
                                  : kemeny::SplitStrategy::Halving;
    if (solver == "gmres") cfg.dnc.solver = kemeny::DncSolver::GmresIlu0;
    else if (solver == "bicgstab") cfg.dnc.solver = kemeny::DncSolver::BicgstabIlu0;
    else cfg.dnc.solver = kemeny::DncSolver::SparseLu;
    if (json) cfg.format = kemeny::OutputFormat::Json;
    else if (csv) cfg.format = kemeny::OutputFormat::Csv;

    try {
        const kemeny::RunReport rep = kemeny::run(cfg);
        std::cout << rep.rendered;
        return 0;
    } catch (const kemeny::ReducibleChainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
