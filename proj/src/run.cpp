#include "s1flow/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "s1flow/oracle.hpp"
#include "s1flow/sampling.hpp"
#include "s1flow/trajectory_io.hpp"

namespace s1flow {

using nlohmann::json;

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Classify: return "classify";
    case Mode::Verify: return "verify";
    case Mode::Sweep: return "sweep";
    case Mode::CompareClosedForm: return "compare";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    for (Mode m : {Mode::Simulate, Mode::Classify, Mode::Verify, Mode::Sweep,
                   Mode::CompareClosedForm}) {
        if (to_string(m) == s) return m;
    }
    throw ConfigError("mode", "unknown mode '" + s + "'");
}

OutputFormat parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::CSV;
    if (s == "jsonl") return OutputFormat::JSONLines;
    throw ConfigError("format", "expected csv or jsonl, got '" + s + "'");
}

void RunConfig::validate() const {
    auto wrap = [](const char* field, const std::function<void()>& check) {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(field, e.what());
        }
    };
    wrap("flow parameters", [&] { flow_params.validate(); });
    wrap("initial state", [&] { initial.validate(); });
    wrap("integrator", [&] { integrator.validate(); });
    if (chern.has_value() != area.has_value()) {
        throw ConfigError("chern/area", "--chern and --area must be given together");
    }
    if (area && !(*area > 0.0)) throw ConfigError("area", "must be positive");
    if (!(classify_eps > 0.0)) throw ConfigError("eps", "must be positive");
    if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw ConfigError("fd_step", "must be positive");
    if (threads < 0) throw ConfigError("threads", "must be nonnegative");
    if (mode == Mode::Sweep && sweep_grid.empty()) {
        throw ConfigError("sweep_grid", "sweep needs a non-empty grid");
    }
    for (const auto& [k0, f0] : sweep_grid) {
        if (!std::isfinite(k0) || !std::isfinite(f0) || f0 < 0.0) {
            throw ConfigError("sweep_grid", "cells need finite k0 and finite f0 >= 0");
        }
    }
}

namespace {

double number_field(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v.get<double>();
}

long long integer_field(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<long long>();
}

std::string string_field(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

} // namespace

void apply_json_config(const std::string& json_text, RunConfig& cfg) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

    for (const auto& [key, v] : doc.items()) {
        if (key == "mode") {
            cfg.mode = parse_mode(string_field(v, key));
        } else if (key == "k0") {
            cfg.flow_params.k0 = number_field(v, key);
        } else if (key == "f0") {
            cfg.flow_params.f0_norm = number_field(v, key);
        } else if (key == "variant") {
            const std::string s = string_field(v, key);
            if (s == "normalized") {
                cfg.flow_params.variant = FlowVariant::Normalized;
            } else if (s == "unnormalized") {
                cfg.flow_params.variant = FlowVariant::Unnormalized;
            } else {
                throw ConfigError(key, "expected normalized or unnormalized");
            }
        } else if (key == "t_end") {
            cfg.integrator.t_end = number_field(v, key);
        } else if (key == "rel_tol") {
            cfg.integrator.rel_tol = number_field(v, key);
        } else if (key == "abs_tol") {
            cfg.integrator.abs_tol = number_field(v, key);
        } else if (key == "max_step") {
            cfg.integrator.max_step = number_field(v, key);
        } else if (key == "min_step") {
            cfg.integrator.min_step = number_field(v, key);
        } else if (key == "singularity_floor") {
            cfg.integrator.singularity_floor = number_field(v, key);
        } else if (key == "lambda0") {
            cfg.initial.lambda = number_field(v, key);
        } else if (key == "fiber0") {
            cfg.initial.f = number_field(v, key);
        } else if (key == "out") {
            cfg.output_path = string_field(v, key);
        } else if (key == "format") {
            cfg.output_format = parse_output_format(string_field(v, key));
        } else if (key == "sweep_grid") {
            if (!v.is_array()) throw ConfigError(key, "expected an array of [k0, f0] pairs");
            cfg.sweep_grid.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string where = key + "[" + std::to_string(i) + "]";
                const auto& cell = v[i];
                if (!cell.is_array() || cell.size() != 2) {
                    throw ConfigError(where, "expected a [k0, f0] pair");
                }
                cfg.sweep_grid.emplace_back(number_field(cell[0], where + "[0]"),
                                            number_field(cell[1], where + "[1]"));
            }
        } else if (key == "seed") {
            const long long s = integer_field(v, key);
            if (s < 0) throw ConfigError(key, "must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "chern") {
            cfg.chern = integer_field(v, key);
        } else if (key == "area") {
            cfg.area = number_field(v, key);
        } else if (key == "eps") {
            cfg.classify_eps = number_field(v, key);
        } else if (key == "fd_step") {
            cfg.fd_step = number_field(v, key);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(integer_field(v, key));
        } else {
            throw ConfigError(key, "unknown configuration key");
        }
    }
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        apply_json_config(buf.str(), cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(e.field(), std::string(e.what()) + " (in " + path + ")");
    }
}

std::vector<std::pair<double, double>> parse_sweep_grid(const std::string& spec) {
    std::vector<std::pair<double, double>> grid;
    std::stringstream cells(spec);
    std::string cell;
    while (std::getline(cells, cell, ';')) {
        if (cell.empty()) continue;
        const auto comma = cell.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("grid", "cell '" + cell + "' is not of the form k0,f0");
        }
        try {
            std::size_t used_k = 0;
            std::size_t used_f = 0;
            const std::string ks = cell.substr(0, comma);
            const std::string fs = cell.substr(comma + 1);
            const double k0 = std::stod(ks, &used_k);
            const double f0 = std::stod(fs, &used_f);
            if (used_k != ks.size() || used_f != fs.size()) throw std::invalid_argument(cell);
            grid.emplace_back(k0, f0);
        } catch (const std::logic_error&) {
            throw ConfigError("grid", "cell '" + cell + "' is not of the form k0,f0");
        }
    }
    return grid;
}

namespace {

FlowParams effective_params(const RunConfig& cfg) {
    FlowParams p = cfg.flow_params;
    if (cfg.chern) {
        const double c = chern_curvature_constant(*cfg.chern, *cfg.area);
        p.f0_norm = c * c;
    }
    return p;
}

// Runs `body` against the configured destination.
void with_output(const RunConfig& cfg, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
    if (cfg.output_path.empty()) {
        body(fallback);
        return;
    }
    std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("out", "cannot open '" + cfg.output_path + "' for writing");
    body(file);
    if (!file) throw ConfigError("out", "write to '" + cfg.output_path + "' failed");
}

void write_trajectory(const RunConfig& cfg, std::ostream& out, const Trajectory& traj) {
    with_output(cfg, out, [&](std::ostream& os) {
        if (cfg.output_format == OutputFormat::CSV) {
            write_csv(os, traj);
        } else {
            write_jsonl(os, traj);
        }
    });
}

void log_termination(std::ostream& log, const Trajectory& traj) {
    const auto& term = traj.termination;
    log << "termination: " << to_string(term.kind);
    switch (term.kind) {
    case TerminationKind::SingularityDetected:
        log << " t_star=" << format_real(term.t_star)
            << " floor_crossing_time=" << format_real(term.floor_crossing_time);
        break;
    case TerminationKind::ConvergenceDetected:
        log << " t=" << format_real(term.limit_state.t)
            << " lambda=" << format_real(term.limit_state.lambda)
            << " f=" << format_real(term.limit_state.f);
        break;
    case TerminationKind::TimeLimitReached:
        if (!traj.samples.empty()) log << " t=" << format_real(traj.samples.back().state.t);
        break;
    }
    log << " samples=" << traj.samples.size() << '\n';
}

std::string optional_text(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string("-");
}

// JSON value for a possibly infinite real: numbers stay numbers, the rest become strings.
std::string json_real_or_label(double v) {
    return std::isfinite(v) ? format_real(v) : "\"" + format_real(v) + "\"";
}

std::string json_optional(const std::optional<double>& v) {
    return v ? json_real_or_label(*v) : std::string("null");
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const FlowParams params = effective_params(cfg);
    try {
        const Trajectory traj = integrate(params, cfg.initial, cfg.integrator);
        write_trajectory(cfg, out, traj);
        log_termination(log, traj);
        return kExitSuccess;
    } catch (const IntegrationFailure& e) {
        write_trajectory(cfg, out, e.partial());
        log << "integration failure: " << e.what() << '\n';
        return kExitIntegrationFailure;
    }
}

void print_prediction(std::ostream& os, const AsymptoticPrediction& p) {
    os << to_string(p.geometry) << '\n';
    os << "static: " << (p.is_static ? "yes" : "no") << '\n';
    os << "lambda_limit: " << optional_text(p.lambda_limit) << '\n';
    os << "f_limit: " << optional_text(p.f_limit) << '\n';
    os << "scalar_limit: " << optional_text(p.scalar_limit) << '\n';
    os << "singular_time: " << optional_text(p.singular_time) << '\n';
    if (p.lower_bound_exponent) {
        os << "lower_bound: lambda^" << format_real(*p.lower_bound_exponent)
           << " >= " << format_real(*p.lower_bound_slope) << " t + "
           << format_real(*p.lower_bound_offset) << '\n';
    }
}

int run_classify(const RunConfig& cfg, std::ostream& out) {
    const FlowParams params = effective_params(cfg);
    const GeometryClass g = classify(params.k0, params.f0_norm, cfg.classify_eps);
    const AsymptoticPrediction p = asymptotic_prediction(g, params.k0, params.f0_norm, cfg.classify_eps);
    with_output(cfg, out, [&](std::ostream& os) { print_prediction(os, p); });
    return kExitSuccess;
}

struct ClosedForm {
    std::function<FlowState(double)> solution; // empty when none is known
    bool implicit_only = false;
    std::string label;
};

ClosedForm applicable_closed_form(const FlowParams& p, const FlowState& initial, double eps) {
    ClosedForm cf;
    const bool unit_start = initial.t == 0.0 && initial.lambda == 1.0 && initial.f == 1.0;
    if (!unit_start) return cf;
    const GeometryClass g = classify(p.k0, p.f0_norm, eps);
    if (g == GeometryClass::E3) {
        cf.solution = [](double t) { return FlowState{t, 1.0, 1.0}; };
        cf.label = "static";
        return cf;
    }
    if (p.variant == FlowVariant::Normalized) {
        switch (g) {
        case GeometryClass::Nil: {
            const double f0 = p.f0_norm;
            cf.solution = [f0](double t) { return nil_solution(f0, t); };
            cf.label = "nil";
            break;
        }
        case GeometryClass::S2xR:
        case GeometryClass::H2xR: {
            const double k0 = p.k0;
            cf.solution = [k0](double t) { return product_flat_solution(k0, t); };
            cf.label = "product_flat";
            break;
        }
        default:
            cf.implicit_only = true;
            cf.label = "implicit_first_integral";
            break;
        }
        return cf;
    }
    if (p.k0 > eps && std::abs(p.f0_norm - p.k0) <= eps * std::max(1.0, p.k0)) {
        const double k0 = p.k0;
        cf.solution = [k0](double t) { return spherical_unnormalized_solution(k0, t); };
        cf.label = "spherical_unnormalized";
    }
    return cf;
}

int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const FlowParams params = effective_params(cfg);
    const ClosedForm cf = applicable_closed_form(params, cfg.initial, cfg.classify_eps);
    if (!cf.solution && !cf.implicit_only) {
        throw ConfigError("compare", "no closed form is known for these parameters and initial state");
    }

    Trajectory traj;
    int status = kExitSuccess;
    try {
        traj = integrate(params, cfg.initial, cfg.integrator);
    } catch (const IntegrationFailure& e) {
        traj = e.partial();
        log << "integration failure: " << e.what() << '\n';
        status = kExitIntegrationFailure;
    }

    double max_lambda_err = 0.0;
    double max_f_err = 0.0;
    double max_residual = 0.0;
    std::ostringstream body;
    const bool csv = cfg.output_format == OutputFormat::CSV;
    if (csv) body << "t,lambda,f,lambda_closed,f_closed,lambda_abs_err,f_abs_err,implicit_residual\n";
    for (const auto& s : traj.samples) {
        std::optional<FlowState> exact;
        if (cf.solution) {
            try {
                exact = cf.solution(s.state.t);
            } catch (const SingularityError&) {
                // Sample at or past the analytic singular time.
            }
        }
        std::optional<double> el;
        std::optional<double> ef;
        if (exact) {
            el = std::abs(s.state.lambda - exact->lambda);
            ef = std::abs(s.state.f - exact->f);
            max_lambda_err = std::max(max_lambda_err, *el);
            max_f_err = std::max(max_f_err, *ef);
        }
        const auto& res = s.observables.implicit_residual;
        if (res) max_residual = std::max(max_residual, std::abs(*res));
        if (csv) {
            body << format_real(s.state.t) << ',' << format_real(s.state.lambda) << ','
                 << format_real(s.state.f) << ','
                 << format_optional(exact ? std::optional(exact->lambda) : std::nullopt) << ','
                 << format_optional(exact ? std::optional(exact->f) : std::nullopt) << ','
                 << format_optional(el) << ',' << format_optional(ef) << ','
                 << format_optional(res) << '\n';
        } else {
            auto opt = [](const std::optional<double>& v) {
                return v ? format_real(*v) : std::string("null");
            };
            body << "{\"t\":" << format_real(s.state.t) << ",\"lambda\":" << format_real(s.state.lambda)
                 << ",\"f\":" << format_real(s.state.f) << ",\"lambda_closed\":"
                 << opt(exact ? std::optional(exact->lambda) : std::nullopt) << ",\"f_closed\":"
                 << opt(exact ? std::optional(exact->f) : std::nullopt)
                 << ",\"lambda_abs_err\":" << opt(el) << ",\"f_abs_err\":" << opt(ef)
                 << ",\"implicit_residual\":" << opt(res) << "}\n";
        }
    }
    with_output(cfg, out, [&](std::ostream& os) { os << body.str(); });

    log << "closed form: " << cf.label << '\n';
    if (cf.solution) {
        log << "max |lambda - closed|: " << format_real(max_lambda_err) << '\n';
        log << "max |f - closed|: " << format_real(max_f_err) << '\n';
    }
    log << "max |implicit residual|: " << format_real(max_residual) << '\n';
    log_termination(log, traj);
    return status;
}

struct SweepRow {
    double k0 = 0.0;
    double f0 = 0.0;
    GeometryClass geometry = GeometryClass::E3;
    std::string termination;
    FlowState final_state;
    double scalar_final = 0.0;
    double max_product_drift = 0.0;
    std::optional<double> t_star;
    AsymptoticPrediction prediction;
};

SweepRow run_cell(const RunConfig& cfg, double k0, double f0) {
    SweepRow row;
    row.k0 = k0;
    row.f0 = f0;
    row.geometry = classify(k0, f0, cfg.classify_eps);
    row.prediction = asymptotic_prediction(row.geometry, k0, f0, cfg.classify_eps);
    const FlowParams params{k0, f0, cfg.flow_params.variant};
    Trajectory traj;
    try {
        traj = integrate(params, cfg.initial, cfg.integrator);
        row.termination = to_string(traj.termination.kind);
        if (traj.termination.kind == TerminationKind::SingularityDetected) {
            row.t_star = traj.termination.t_star;
        }
    } catch (const IntegrationFailure& e) {
        traj = e.partial();
        row.termination = "IntegrationFailure";
    }
    const Sample& last = traj.samples.back();
    row.final_state = last.state;
    row.scalar_final = last.observables.scalar_curvature;
    for (const auto& s : traj.samples) {
        row.max_product_drift =
            std::max(row.max_product_drift, std::abs(s.observables.f_lambda_product - 1.0));
    }
    return row;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const std::size_t n = cfg.sweep_grid.size();
    std::vector<SweepRow> rows(n);
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    // Cells are independent; each worker takes a strided subset and results are
    // written back by index so output order is the grid order.
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                rows[i] = run_cell(cfg, cfg.sweep_grid[i].first, cfg.sweep_grid[i].second);
            }
        }));
    }
    for (auto& j : jobs) j.get();

    bool any_failure = false;
    with_output(cfg, out, [&](std::ostream& os) {
        if (cfg.output_format == OutputFormat::CSV) {
            os << "k0,f0_norm,geometry,termination,t_final,lambda_final,f_final,scalar_final,"
                  "max_product_drift,t_star,predicted_lambda_limit,predicted_f_limit,"
                  "predicted_scalar_limit,predicted_singular_time\n";
        }
        for (const auto& r : rows) {
            any_failure = any_failure || r.termination == "IntegrationFailure";
            const auto& p = r.prediction;
            if (cfg.output_format == OutputFormat::CSV) {
                os << format_real(r.k0) << ',' << format_real(r.f0) << ',' << to_string(r.geometry)
                   << ',' << r.termination << ',' << format_real(r.final_state.t) << ','
                   << format_real(r.final_state.lambda) << ',' << format_real(r.final_state.f)
                   << ',' << format_real(r.scalar_final) << ','
                   << format_real(r.max_product_drift) << ',' << format_optional(r.t_star) << ','
                   << format_optional(p.lambda_limit) << ',' << format_optional(p.f_limit) << ','
                   << format_optional(p.scalar_limit) << ',' << format_optional(p.singular_time)
                   << '\n';
            } else {
                os << "{\"k0\":" << format_real(r.k0) << ",\"f0_norm\":" << format_real(r.f0)
                   << ",\"geometry\":\"" << to_string(r.geometry) << "\",\"termination\":\""
                   << r.termination << "\",\"t_final\":" << format_real(r.final_state.t)
                   << ",\"lambda_final\":" << format_real(r.final_state.lambda)
                   << ",\"f_final\":" << format_real(r.final_state.f)
                   << ",\"scalar_final\":" << format_real(r.scalar_final)
                   << ",\"max_product_drift\":" << format_real(r.max_product_drift)
                   << ",\"t_star\":" << json_optional(r.t_star)
                   << ",\"predicted_lambda_limit\":" << json_optional(p.lambda_limit)
                   << ",\"predicted_f_limit\":" << json_optional(p.f_limit)
                   << ",\"predicted_scalar_limit\":" << json_optional(p.scalar_limit)
                   << ",\"predicted_singular_time\":" << json_optional(p.singular_time) << "}\n";
            }
        }
    });
    log << "sweep: " << n << " cells" << (any_failure ? " (with integration failures)" : "") << '\n';
    return any_failure ? kExitIntegrationFailure : kExitSuccess;
}

json report_json(const oracle::OracleReport& r) {
    json j;
    j["family"] = r.family;
    j["max_componentwise_error"] = r.max_componentwise_error;
    j["max_error_half_step"] = r.max_error_half_step;
    j["grid_spacing"] = r.grid_spacing;
    j["sample_points"] = r.sample_points;
    if (std::isfinite(r.convergence_rate_estimate)) {
        j["convergence_rate_estimate"] = r.convergence_rate_estimate;
    } else {
        j["convergence_rate_estimate"] = nullptr;
    }
    j["max_asymmetry"] = r.max_asymmetry;
    return j;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    using namespace oracle;
    constexpr double kReferenceTolerance = 1e-4;
    constexpr double kOrderLo = 1.8;
    constexpr double kOrderHi = 2.2;
    constexpr double kSymmetryTolerance = 1e-9;
    constexpr double kIdentityTolerance = 1e-12;
    constexpr int kIdentitySamples = 1000;

    const double h = cfg.fd_step;
    // Same bar for every step size.
    const double tolerance = kReferenceTolerance;

    std::vector<CoordinateMetric> families = {
        berger_metric(1.0, 1.0, 4.0, 1),
        berger_metric(4.0, 0.5, 4.0, 1),
        torus_bundle_metric(1.0, 1.0, 0.0),
    };
    for (double c : {1.0, 2.0}) {
        for (double lambda : {1.0, 2.0}) families.push_back(torus_bundle_metric(lambda, 1.0 / lambda, c));
    }
    families.push_back(warped_bundle_metric(0.3, 1.0, 0.2, 1.5, 0.2));

    const GridSpec grid{5, h, 0.0};
    std::vector<OracleReport> reports;
    json fam = json::array();
    for (const auto& m : families) {
        OracleReport r = verify_frame_formulas(m, grid);
        std::ostringstream label;
        label << m.name << "(lambda=" << format_real(m.family.lambda)
              << ",f=" << format_real(m.family.f) << ",c=" << format_real(m.family.c) << ")";
        r.family = label.str();
        fam.push_back(report_json(r));
        reports.push_back(r);
        log << r.family << ": max error " << format_real(r.max_componentwise_error) << '\n';
    }
    const OracleReport combined = combine_reports(reports, "all families");

    std::mt19937_64 rng(cfg.seed.value_or(0));
    double worst_asym = 0.0;
    double worst_trace = 0.0;
    double worst_contraction = 0.0;
    for (int i = 0; i < kIdentitySamples; ++i) {
        const FramePointData p = random_frame_point(rng);
        const RicciMatrix r = ricci(p);
        const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
        worst_asym = std::max(worst_asym, std::abs(r(0, 1) - r(1, 0)) / scale);
        worst_trace = std::max(worst_trace, std::abs(scalar_curvature(p) - (r(0, 0) + r(1, 1) + r(2, 2))));
        worst_contraction = std::max(
            worst_contraction, (ricci_from_curvature(curvature_form(p)) - r).cwiseAbs().maxCoeff() / scale);
    }

    const bool order_ok = combined.convergence_rate_estimate >= kOrderLo &&
                          combined.convergence_rate_estimate <= kOrderHi;
    const bool passed = combined.max_componentwise_error <= tolerance && order_ok &&
                        combined.max_asymmetry <= kSymmetryTolerance &&
                        worst_asym <= kIdentityTolerance && worst_trace == 0.0 &&
                        worst_contraction <= kIdentityTolerance;

    json doc;
    doc["families"] = fam;
    doc["combined"] = report_json(combined);
    doc["tolerance"] = tolerance;
    doc["frame_identities"] = {{"samples", kIdentitySamples},
                               {"seed", cfg.seed.value_or(0)},
                               {"max_relative_r12_r21_gap", worst_asym},
                               {"max_trace_defect", worst_trace},
                               {"max_relative_contraction_defect", worst_contraction}};
    doc["passed"] = passed;
    with_output(cfg, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });

    log << "combined: max error " << format_real(combined.max_componentwise_error) << " (tol "
        << format_real(tolerance) << "), order " << format_real(combined.convergence_rate_estimate)
        << ", " << (passed ? "PASS" : "FAIL") << '\n';
    return passed ? kExitSuccess : kExitVerificationFailure;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    try {
        cfg.validate();
        switch (cfg.mode) {
        case Mode::Simulate: return run_simulate(cfg, out, log);
        case Mode::Classify: return run_classify(cfg, out);
        case Mode::Verify: return run_verify(cfg, out, log);
        case Mode::Sweep: return run_sweep(cfg, out, log);
        case Mode::CompareClosedForm: return run_compare(cfg, out, log);
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const InvalidInputError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}

} // namespace s1flow
