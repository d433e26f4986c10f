#pragma once

/// @file trajectory_io.hpp
/// @brief CSV and JSON-lines serialization of trajectories. Reals are written
/// with 17 significant digits, which round-trips every double exactly.

#include <iosfwd>
#include <optional>
#include <string>

#include "s1flow/flow_ode.hpp"

namespace s1flow {

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_real(double v);

/// Empty string for nullopt.
std::string format_optional(const std::optional<double>& v);

inline constexpr const char* kTrajectoryCsvHeader =
    "t,lambda,f,scalar_curvature,f_lambda_product,implicit_residual";

/// Header row followed by one row per sample.
void write_csv(std::ostream& out, const Trajectory& traj);

/// One JSON object per line: a "params" record, one "sample" record per sample,
/// then a "termination" record.
void write_jsonl(std::ostream& out, const Trajectory& traj);

/// Inverse of write_jsonl. Throws InvalidInputError with the offending line number.
Trajectory read_jsonl(std::istream& in);

FlowVariant parse_flow_variant(const std::string& s);
TerminationKind parse_termination_kind(const std::string& s);

} // namespace s1flow
