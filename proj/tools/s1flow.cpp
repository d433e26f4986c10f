#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "s1flow/run.hpp"

namespace {

struct Flags {
    std::optional<double> k0;
    std::optional<double> f0;
    bool normalized = false;
    bool unnormalized = false;
    std::optional<double> t_end;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<double> lambda0;
    std::optional<double> fiber0;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> config;
    std::optional<long long> chern;
    std::optional<double> area;
    std::optional<long long> seed;
    std::optional<std::string> grid;
    std::optional<double> fd_step;
    std::optional<double> eps;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON configuration file; flags override its values");
    sub->add_option("--k0", f.k0, "base curvature constant K0");
    sub->add_option("--f0", f.f0, "curvature norm F0 >= 0");
    sub->add_option("--chern", f.chern, "first Chern number (alternative to --f0, needs --area)");
    sub->add_option("--area", f.area, "base area used with --chern");
    auto* n = sub->add_flag("--normalized", f.normalized, "normalized flow (default)");
    auto* u = sub->add_flag("--unnormalized", f.unnormalized, "unnormalized flow");
    n->excludes(u);
    sub->add_option("--t-end", f.t_end, "integration horizon");
    sub->add_option("--rel-tol", f.rel_tol, "relative tolerance");
    sub->add_option("--abs-tol", f.abs_tol, "absolute tolerance");
    sub->add_option("--lambda0", f.lambda0, "initial base factor");
    sub->add_option("--fiber0", f.fiber0, "initial fiber size");
    sub->add_option("--out", f.out, "artifact path (default: stdout)");
    sub->add_option("--format", f.format, "csv or jsonl");
    sub->add_option("--seed", f.seed, "seed for randomized sampling");
    sub->add_option("--eps", f.eps, "classification threshold");
}

s1flow::RunConfig build_config(s1flow::Mode mode, const Flags& f) {
    using s1flow::ConfigError;
    s1flow::RunConfig cfg;
    if (f.config) s1flow::apply_config_file(*f.config, cfg);
    cfg.mode = mode;
    if (f.f0 && f.chern) throw ConfigError("--f0", "cannot be combined with --chern");
    if (f.k0) cfg.flow_params.k0 = *f.k0;
    if (f.f0) {
        cfg.flow_params.f0_norm = *f.f0;
        cfg.chern.reset();
        cfg.area.reset();
    }
    if (f.chern) cfg.chern = *f.chern;
    if (f.area) cfg.area = *f.area;
    if (f.normalized) cfg.flow_params.variant = s1flow::FlowVariant::Normalized;
    if (f.unnormalized) cfg.flow_params.variant = s1flow::FlowVariant::Unnormalized;
    if (f.t_end) cfg.integrator.t_end = *f.t_end;
    if (f.rel_tol) cfg.integrator.rel_tol = *f.rel_tol;
    if (f.abs_tol) cfg.integrator.abs_tol = *f.abs_tol;
    if (f.lambda0) cfg.initial.lambda = *f.lambda0;
    if (f.fiber0) cfg.initial.f = *f.fiber0;
    if (f.out) cfg.output_path = *f.out;
    if (f.format) cfg.output_format = s1flow::parse_output_format(*f.format);
    if (f.seed) {
        if (*f.seed < 0) throw ConfigError("--seed", "must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(*f.seed);
    }
    if (f.grid) cfg.sweep_grid = s1flow::parse_sweep_grid(*f.grid);
    if (f.fd_step) cfg.fd_step = *f.fd_step;
    if (f.eps) cfg.classify_eps = *f.eps;
    if (f.threads) cfg.threads = *f.threads;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ricci flow of connection metrics on circle bundles over surfaces"};
    app.require_subcommand(1);
    Flags flags;

    auto* simulate = app.add_subcommand("simulate", "integrate the flow and write the trajectory");
    auto* classify = app.add_subcommand("classify", "print the model geometry and asymptotic prediction");
    auto* verify = app.add_subcommand("verify", "check frame formulas against finite differences");
    auto* sweep = app.add_subcommand("sweep", "simulate and classify every cell of a parameter grid");
    auto* compare = app.add_subcommand("compare", "compare the integrated flow with a closed form");
    for (auto* sub : {simulate, classify, verify, sweep, compare}) add_common(sub, flags);
    verify->add_option("--fd-step", flags.fd_step, "finite-difference step");
    sweep->add_option("--grid", flags.grid, "cells as \"k0,f0;k0,f0;...\"");
    sweep->add_option("--threads", flags.threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : s1flow::kExitConfigError;
    }

    s1flow::Mode mode = s1flow::Mode::Simulate;
    if (*classify) mode = s1flow::Mode::Classify;
    if (*verify) mode = s1flow::Mode::Verify;
    if (*sweep) mode = s1flow::Mode::Sweep;
    if (*compare) mode = s1flow::Mode::CompareClosedForm;

    s1flow::RunConfig cfg;
    try {
        cfg = build_config(mode, flags);
    } catch (const s1flow::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return s1flow::kExitConfigError;
    }
    return s1flow::run(cfg, std::cout, std::cerr);
}
