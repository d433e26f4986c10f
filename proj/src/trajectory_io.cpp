#include "s1flow/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace s1flow {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string{};
}

FlowVariant parse_flow_variant(const std::string& s) {
    if (s == "normalized") return FlowVariant::Normalized;
    if (s == "unnormalized") return FlowVariant::Unnormalized;
    throw InvalidInputError("unknown flow variant '" + s + "'");
}

TerminationKind parse_termination_kind(const std::string& s) {
    for (auto k : {TerminationKind::TimeLimitReached, TerminationKind::SingularityDetected,
                   TerminationKind::ConvergenceDetected}) {
        if (to_string(k) == s) return k;
    }
    throw InvalidInputError("unknown termination kind '" + s + "'");
}

void write_csv(std::ostream& out, const Trajectory& traj) {
    out << kTrajectoryCsvHeader << '\n';
    for (const auto& s : traj.samples) {
        out << format_real(s.state.t) << ',' << format_real(s.state.lambda) << ','
            << format_real(s.state.f) << ',' << format_real(s.observables.scalar_curvature) << ','
            << format_real(s.observables.f_lambda_product) << ','
            << format_optional(s.observables.implicit_residual) << '\n';
    }
}

namespace {

// JSON numbers are written by hand so the 17-digit format is guaranteed.
std::string json_real(double v) {
    if (!std::isfinite(v)) throw InvalidInputError("cannot serialize non-finite value to JSON");
    return format_real(v);
}

std::string json_state(const FlowState& s) {
    return "{\"t\":" + json_real(s.t) + ",\"lambda\":" + json_real(s.lambda) +
           ",\"f\":" + json_real(s.f) + "}";
}

FlowState parse_state(const nlohmann::json& j) {
    return {j.at("t").get<double>(), j.at("lambda").get<double>(), j.at("f").get<double>()};
}

} // namespace

void write_jsonl(std::ostream& out, const Trajectory& traj) {
    out << "{\"record\":\"params\",\"k0\":" << json_real(traj.params.k0)
        << ",\"f0_norm\":" << json_real(traj.params.f0_norm) << ",\"variant\":\""
        << to_string(traj.params.variant) << "\"}\n";
    for (const auto& s : traj.samples) {
        const auto& o = s.observables;
        out << "{\"record\":\"sample\",\"t\":" << json_real(s.state.t)
            << ",\"lambda\":" << json_real(s.state.lambda) << ",\"f\":" << json_real(s.state.f)
            << ",\"scalar_curvature\":" << json_real(o.scalar_curvature)
            << ",\"f_lambda_product\":" << json_real(o.f_lambda_product)
            << ",\"implicit_residual\":"
            << (o.implicit_residual ? json_real(*o.implicit_residual) : std::string("null"))
            << "}\n";
    }
    const auto& term = traj.termination;
    out << "{\"record\":\"termination\",\"kind\":\"" << to_string(term.kind)
        << "\",\"t_star\":" << json_real(term.t_star)
        << ",\"floor_crossing_time\":" << json_real(term.floor_crossing_time)
        << ",\"limit_state\":" << json_state(term.limit_state) << "}\n";
}

Trajectory read_jsonl(std::istream& in) {
    Trajectory traj;
    bool have_params = false;
    bool have_termination = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::string record = j.at("record").get<std::string>();
            if (have_termination) throw InvalidInputError("record after termination");
            if (record == "params") {
                if (have_params) throw InvalidInputError("duplicate params record");
                traj.params.k0 = j.at("k0").get<double>();
                traj.params.f0_norm = j.at("f0_norm").get<double>();
                traj.params.variant = parse_flow_variant(j.at("variant").get<std::string>());
                have_params = true;
            } else if (record == "sample") {
                if (!have_params) throw InvalidInputError("sample before params record");
                Sample s;
                s.state = parse_state(j);
                s.observables.scalar_curvature = j.at("scalar_curvature").get<double>();
                s.observables.f_lambda_product = j.at("f_lambda_product").get<double>();
                const auto& r = j.at("implicit_residual");
                if (!r.is_null()) s.observables.implicit_residual = r.get<double>();
                traj.samples.push_back(s);
            } else if (record == "termination") {
                traj.termination.kind = parse_termination_kind(j.at("kind").get<std::string>());
                traj.termination.t_star = j.at("t_star").get<double>();
                traj.termination.floor_crossing_time = j.at("floor_crossing_time").get<double>();
                traj.termination.limit_state = parse_state(j.at("limit_state"));
                have_termination = true;
            } else {
                throw InvalidInputError("unknown record type '" + record + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInputError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const InvalidInputError& e) {
            throw InvalidInputError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_params || !have_termination) {
        throw InvalidInputError("trajectory stream is missing its params or termination record");
    }
    return traj;
}

} // namespace s1flow
