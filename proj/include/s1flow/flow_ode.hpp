#pragma once

/// @file flow_ode.hpp
/// @brief Reduced Ricci-flow systems in (lambda, f) for a connection metric
/// g_t = lambda_t pi*g0 + f_t^2 w0(x)w0 over a base of constant curvature K0 with
/// a Yang-Mills connection, and an adaptive Dormand-Prince 5(4) integrator with
/// singularity and convergence detection.

#include <optional>
#include <string>
#include <vector>

#include "s1flow/errors.hpp"

namespace s1flow {

enum class FlowVariant { Unnormalized, Normalized };

std::string to_string(FlowVariant v);

struct FlowParams {
    double k0 = 0.0;      ///< Gauss curvature K0 of the base metric g0
    double f0_norm = 0.0; ///< F0 = |F_w0|^2 measured in g0
    FlowVariant variant = FlowVariant::Normalized;

    void validate() const;
    bool operator==(const FlowParams&) const = default;
};

/// g_t = lambda g0 on the base, fiber size f. t is carried for reporting only.
struct FlowState {
    double t = 0.0;
    double lambda = 1.0;
    double f = 1.0;

    /// Throws DomainError unless lambda > 0, f > 0 and t >= 0.
    void validate() const;
    bool operator==(const FlowState&) const = default;
};

struct FlowDerivative {
    double dlambda = 0.0;
    double df = 0.0;
};

/// lambda' = -2 K0 + F0 f^2 / lambda,  f' = -F0 f^3 / (2 lambda^2).
FlowDerivative rhs_unnormalized(const FlowParams& params, const FlowState& state);

/// lambda' = -(2/3) K0 + (2/3) F0 f^2 / lambda,
/// f'      =  (2/3) K0 f / lambda - (2/3) F0 f^3 / lambda^2.
FlowDerivative rhs_normalized(const FlowParams& params, const FlowState& state);

/// Dispatches on params.variant.
FlowDerivative rhs(const FlowParams& params, const FlowState& state);

/// Scalar curvature of g_t: 2 K0 / lambda - F0 f^2 / (2 lambda^2).
double scalar_curvature_observable(const FlowParams& params, const FlowState& state);

/// Constant c with F = c Vol_g for a Yang-Mills connection on a bundle with first
/// Chern number c1 over a surface of the given area: c = 2 pi c1 / area.
double chern_curvature_constant(long long c1, double area);

struct Observables {
    double scalar_curvature = 0.0;
    double f_lambda_product = 1.0;
    std::optional<double> implicit_residual;

    bool operator==(const Observables&) const = default;
};

struct Sample {
    FlowState state;
    Observables observables;

    bool operator==(const Sample&) const = default;
};

enum class TerminationKind { TimeLimitReached, SingularityDetected, ConvergenceDetected };

std::string to_string(TerminationKind k);

struct Termination {
    TerminationKind kind = TerminationKind::TimeLimitReached;
    /// Estimated singular time (SingularityDetected only): the floor-crossing time
    /// extrapolated to zero along the crossing component's tangent.
    double t_star = 0.0;
    /// Time at which lambda or f crossed the singularity floor (SingularityDetected only).
    double floor_crossing_time = 0.0;
    /// Last state (ConvergenceDetected only).
    FlowState limit_state;

    bool operator==(const Termination&) const = default;
};

struct Trajectory {
    FlowParams params;
    std::vector<Sample> samples;
    Termination termination;

    bool operator==(const Trajectory&) const = default;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.5;
    double min_step = 1e-14;
    double t_end = 10.0;
    double singularity_floor = 1e-6;
    /// Consecutive accepted steps with |rhs| < abs_tol before declaring convergence.
    int convergence_dwell = 10;
    bool detect_convergence = true;
    /// First trial step; 0 selects one from the initial derivative.
    double initial_step = 0.0;

    void validate() const;
};

/// Step-size underflow before any singularity floor was reached.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, Trajectory partial)
        : Error(what), partial_(std::move(partial)) {}

    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Observables at a state. The implicit residual is filled only for normalized
/// flows with K0 != 0, F0 > 0 and initial product f*lambda = 1, away from the
/// equilibrium exclusion zone |lambda - a0| <= 0.05 |a0|.
Observables compute_observables(const FlowParams& params, const FlowState& initial,
                                const FlowState& state);

/// Integrates from `initial` until cfg.t_end, a singularity-floor crossing or
/// convergence to an equilibrium. Every accepted step is recorded.
Trajectory integrate(const FlowParams& params, const FlowState& initial,
                     const IntegratorConfig& cfg);

} // namespace s1flow
