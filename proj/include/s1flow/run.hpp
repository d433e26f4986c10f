#pragma once

/// @file run.hpp
/// @brief Batch entry point behind the s1flow command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s1flow/closed_form.hpp"
#include "s1flow/flow_ode.hpp"

namespace s1flow {

enum class Mode { Simulate, Classify, Verify, Sweep, CompareClosedForm };
enum class OutputFormat { CSV, JSONLines };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);
OutputFormat parse_output_format(const std::string& s);

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 2,
    kExitIntegrationFailure = 3,
    kExitVerificationFailure = 4,
};

/// Configuration problem; `field` names the offending key or flag when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    Mode mode = Mode::Simulate;
    FlowParams flow_params;
    IntegratorConfig integrator;
    FlowState initial;
    /// Empty writes the artifact to the output stream passed to run().
    std::string output_path;
    OutputFormat output_format = OutputFormat::CSV;
    std::vector<std::pair<double, double>> sweep_grid;
    std::optional<std::uint64_t> seed;
    /// Alternative F0 input: F0 = c^2 with c = 2 pi chern / area.
    std::optional<long long> chern;
    std::optional<double> area;
    double classify_eps = kDefaultClassifyEps;
    /// Finite-difference step for verify.
    double fd_step = 1e-3;
    /// Worker threads for sweep; 0 picks the hardware concurrency.
    int threads = 0;

    /// Throws ConfigError for inconsistent settings.
    void validate() const;
};

/// Merges a JSON configuration document into `cfg`. Keys mirror the long CLI
/// flags (k0, f0, variant, t_end, rel_tol, abs_tol, max_step, min_step,
/// singularity_floor, lambda0, fiber0, out, format, sweep_grid, seed, chern,
/// area, eps, fd_step, threads, mode). Unknown keys are errors.
void apply_json_config(const std::string& json_text, RunConfig& cfg);

/// Reads and applies a configuration file.
void apply_config_file(const std::string& path, RunConfig& cfg);

/// Parses "k0,f0;k0,f0;..." into grid cells.
std::vector<std::pair<double, double>> parse_sweep_grid(const std::string& spec);

/// Executes the configured mode. Human-readable progress goes to `log`; the
/// artifact goes to cfg.output_path, or to `out` when no path is set.
/// Returns one of the ExitCode values.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

} // namespace s1flow
