#include "s1flow/flow_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "s1flow/closed_form.hpp"

namespace s1flow {

std::string to_string(FlowVariant v) {
    return v == FlowVariant::Normalized ? "normalized" : "unnormalized";
}

std::string to_string(TerminationKind k) {
    switch (k) {
    case TerminationKind::TimeLimitReached: return "TimeLimitReached";
    case TerminationKind::SingularityDetected: return "SingularityDetected";
    case TerminationKind::ConvergenceDetected: return "ConvergenceDetected";
    }
    return "?";
}

void FlowParams::validate() const {
    detail::require_finite(k0, "k0");
    detail::require_finite(f0_norm, "f0_norm");
    if (f0_norm < 0.0) throw DomainError("F0 is a squared norm and cannot be negative");
}

void FlowState::validate() const {
    detail::require_finite(t, "t");
    detail::require_finite(lambda, "lambda");
    detail::require_finite(f, "f");
    if (lambda <= 0.0) throw DomainError("lambda must be positive");
    if (f <= 0.0) throw DomainError("fiber size f must be positive");
    if (t < 0.0) throw DomainError("flow time must be nonnegative");
}

void IntegratorConfig::validate() const {
    for (auto [v, name] : {std::pair{rel_tol, "rel_tol"}, std::pair{abs_tol, "abs_tol"},
                           std::pair{max_step, "max_step"}, std::pair{min_step, "min_step"},
                           std::pair{t_end, "t_end"},
                           std::pair{singularity_floor, "singularity_floor"}}) {
        detail::require_finite(v, name);
        if (!(v > 0.0)) throw InvalidInputError(std::string(name) + " must be positive");
    }
    if (!(min_step < max_step)) throw InvalidInputError("min_step must be below max_step");
    if (convergence_dwell < 1) throw InvalidInputError("convergence_dwell must be >= 1");
    if (initial_step < 0.0) throw InvalidInputError("initial_step must be nonnegative");
}

namespace {

void check_state(const FlowParams& params, const FlowState& state) {
    params.validate();
    detail::require_finite(state.lambda, "lambda");
    detail::require_finite(state.f, "f");
    if (state.lambda <= 0.0) throw DomainError("lambda must be positive");
    if (state.f <= 0.0) throw DomainError("fiber size f must be positive");
}

} // namespace

FlowDerivative rhs_unnormalized(const FlowParams& params, const FlowState& state) {
    check_state(params, state);
    const double l = state.lambda;
    const double f = state.f;
    const double f0 = params.f0_norm;
    return {-2.0 * params.k0 + f0 * f * f / l, -0.5 * f0 * f * f * f / (l * l)};
}

FlowDerivative rhs_normalized(const FlowParams& params, const FlowState& state) {
    check_state(params, state);
    const double l = state.lambda;
    const double f = state.f;
    const double k0 = params.k0;
    const double f0 = params.f0_norm;
    constexpr double two_thirds = 2.0 / 3.0;
    return {-two_thirds * k0 + two_thirds * f0 * f * f / l,
            two_thirds * k0 * f / l - two_thirds * f0 * f * f * f / (l * l)};
}

FlowDerivative rhs(const FlowParams& params, const FlowState& state) {
    return params.variant == FlowVariant::Normalized ? rhs_normalized(params, state)
                                                     : rhs_unnormalized(params, state);
}

double scalar_curvature_observable(const FlowParams& params, const FlowState& state) {
    check_state(params, state);
    const double l = state.lambda;
    return 2.0 * params.k0 / l - 0.5 * params.f0_norm * state.f * state.f / (l * l);
}

double chern_curvature_constant(long long c1, double area) {
    detail::require_finite(area, "area");
    if (!(area > 0.0)) throw DomainError("surface area must be positive");
    return 2.0 * std::numbers::pi * static_cast<double>(c1) / area;
}

namespace {

constexpr double kProductTolerance = 1e-12;
constexpr double kExclusionFraction = 0.05;

std::optional<ImplicitConstants> implicit_constants_for(const FlowParams& params,
                                                        const FlowState& initial) {
    if (params.variant != FlowVariant::Normalized) return std::nullopt;
    if (params.k0 == 0.0 || !(params.f0_norm > 0.0)) return std::nullopt;
    if (std::abs(initial.lambda * initial.f - 1.0) > kProductTolerance) return std::nullopt;
    if (std::abs(initial.lambda - std::cbrt(params.f0_norm / params.k0)) == 0.0) {
        return std::nullopt;
    }
    return ImplicitConstants::from_initial(params.k0, params.f0_norm, initial.lambda, initial.t);
}

Observables observe(const FlowParams& params, const std::optional<ImplicitConstants>& consts,
                    const FlowState& state) {
    Observables obs;
    obs.scalar_curvature = scalar_curvature_observable(params, state);
    obs.f_lambda_product = state.f * state.lambda;
    if (consts) {
        const double a0 = consts->a0;
        if (std::abs(state.lambda - a0) > kExclusionFraction * std::abs(a0)) {
            obs.implicit_residual =
                implicit_first_integral(*consts, params.k0, state.lambda, state.t);
        }
    }
    return obs;
}

// Dormand-Prince 5(4) tableau with Hairer's order-4 continuous extension. The
// system is autonomous, so the nodes c_i are not needed.
namespace dp {
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace dp

using Vec2 = std::array<double, 2>;

Vec2 operator+(Vec2 a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

class Stepper {
public:
    Stepper(const FlowParams& params, const IntegratorConfig& cfg) : params_(params), cfg_(cfg) {}

    // Evaluates the RHS; nullopt when the stage state left the positive quadrant.
    std::optional<Vec2> eval(const Vec2& y) const {
        if (!(y[0] > 0.0) || !(y[1] > 0.0) || !std::isfinite(y[0]) || !std::isfinite(y[1])) {
            return std::nullopt;
        }
        const FlowDerivative d = rhs(params_, FlowState{0.0, y[0], y[1]});
        if (!std::isfinite(d.dlambda) || !std::isfinite(d.df)) return std::nullopt;
        return Vec2{d.dlambda, d.df};
    }

    struct Attempt {
        bool valid = false;
        double error = 0.0;
        Vec2 y1{};
        Vec2 k7{};
        std::array<Vec2, 5> dense{};
    };

    Attempt attempt(const Vec2& y0, const Vec2& k1, double h) const {
        using namespace dp;
        Attempt out;
        auto k2 = eval(y0 + (h * a21) * k1);
        if (!k2) return out;
        auto k3 = eval(y0 + h * (a31 * k1 + a32 * *k2));
        if (!k3) return out;
        auto k4 = eval(y0 + h * (a41 * k1 + a42 * *k2 + a43 * *k3));
        if (!k4) return out;
        auto k5 = eval(y0 + h * (a51 * k1 + a52 * *k2 + a53 * *k3 + a54 * *k4));
        if (!k5) return out;
        auto k6 = eval(y0 + h * (a61 * k1 + a62 * *k2 + a63 * *k3 + a64 * *k4 + a65 * *k5));
        if (!k6) return out;
        const Vec2 y1 =
            y0 + h * (a71 * k1 + a73 * *k3 + a74 * *k4 + a75 * *k5 + a76 * *k6);
        auto k7 = eval(y1);
        if (!k7) return out;

        const Vec2 err =
            h * (e1 * k1 + e3 * *k3 + e4 * *k4 + e5 * *k5 + e6 * *k6 + e7 * *k7);
        double sum = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc =
                cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            sum += (err[i] / sc) * (err[i] / sc);
        }
        out.error = std::sqrt(sum / 2.0);
        if (!std::isfinite(out.error)) return out;

        const Vec2 r2 = y1 + (-1.0) * y0;
        const Vec2 r3 = h * k1 + (-1.0) * r2;
        const Vec2 r4 = r2 + (-h) * *k7 + (-1.0) * r3;
        const Vec2 r5 = h * (d1 * k1 + d3 * *k3 + d4 * *k4 + d5 * *k5 + d6 * *k6 + d7 * *k7);
        out.dense = {y0, r2, r3, r4, r5};
        out.valid = true;
        out.y1 = y1;
        out.k7 = *k7;
        return out;
    }

private:
    FlowParams params_;
    IntegratorConfig cfg_;
};

Vec2 dense_eval(const std::array<Vec2, 5>& r, double theta) {
    const double t1 = 1.0 - theta;
    Vec2 out{};
    for (int i = 0; i < 2; ++i) {
        out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
    }
    return out;
}

double initial_step_guess(const Vec2& y0, const Vec2& k1, const IntegratorConfig& cfg) {
    if (cfg.initial_step > 0.0) return std::min(cfg.initial_step, cfg.max_step);
    double dy = 0.0;
    double dk = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
        dy += (y0[i] / sc) * (y0[i] / sc);
        dk += (k1[i] / sc) * (k1[i] / sc);
    }
    dy = std::sqrt(dy / 2.0);
    dk = std::sqrt(dk / 2.0);
    double h = (dy < 1e-5 || dk < 1e-5) ? 1e-6 : 0.01 * dy / dk;
    h = std::min({h, cfg.max_step, cfg.t_end});
    return std::max(h, 10.0 * cfg.min_step);
}

} // namespace

Observables compute_observables(const FlowParams& params, const FlowState& initial,
                                const FlowState& state) {
    return observe(params, implicit_constants_for(params, initial), state);
}

Trajectory integrate(const FlowParams& params, const FlowState& initial,
                     const IntegratorConfig& cfg) {
    params.validate();
    initial.validate();
    cfg.validate();
    if (!(cfg.t_end > initial.t)) throw InvalidInputError("t_end must exceed the initial time");

    const auto consts = implicit_constants_for(params, initial);
    Trajectory traj;
    traj.params = params;
    traj.samples.push_back({initial, observe(params, consts, initial)});

    Stepper stepper(params, cfg);
    double t = initial.t;
    Vec2 y{initial.lambda, initial.f};
    Vec2 k1 = *stepper.eval(y);
    double h = initial_step_guess(y, k1, cfg);

    constexpr double safety = 0.9;
    constexpr double beta = 0.04;
    constexpr double expo = 0.2 - 0.75 * beta;
    constexpr double fac_min = 0.2;
    constexpr double fac_max = 10.0;
    double err_old = 1e-4;
    int quiet_steps = 0;
    bool last_rejected = false;

    auto fail = [&](const std::string& why) {
        throw IntegrationFailure(why + " at t=" + std::to_string(t), traj);
    };

    for (;;) {
        const double remaining = cfg.t_end - t;
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if ((h < cfg.min_step && !final_step) || !(t + h > t)) fail("step size underflow");

        const auto step = stepper.attempt(y, k1, h);
        if (!step.valid) {
            final_step = false;
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        if (step.error > 1.0) {
            const double fac = std::pow(step.error, expo) / safety;
            h /= std::min(1.0 / fac_min, fac);
            last_rejected = true;
            continue;
        }

        const double t_new = final_step ? cfg.t_end : t + h;
        const Vec2 y_new = step.y1;

        // Singularity floor crossing inside this step.
        const auto below = [&](const Vec2& v) {
            return std::min(v[0], v[1]) - cfg.singularity_floor;
        };
        if (below(y_new) < 0.0) {
            double lo = 0.0;
            double hi = 1.0;
            const double resolution =
                std::max(cfg.abs_tol, 4.0 * std::numeric_limits<double>::epsilon() * t_new);
            while ((hi - lo) * h > resolution) {
                const double mid = 0.5 * (lo + hi);
                if (below(dense_eval(step.dense, mid)) < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            const double t_cross = t + hi * h;
            Vec2 y_cross = dense_eval(step.dense, hi);
            y_cross[0] = std::max(y_cross[0], std::numeric_limits<double>::min());
            y_cross[1] = std::max(y_cross[1], std::numeric_limits<double>::min());
            const FlowState s_cross{t_cross, y_cross[0], y_cross[1]};
            const FlowDerivative d = rhs(params, s_cross);

            // Extrapolate the crossing component linearly to zero.
            const bool lambda_crossed = y_cross[0] <= y_cross[1];
            const double q = lambda_crossed ? y_cross[0] : y_cross[1];
            const double dq = lambda_crossed ? d.dlambda : d.df;
            const double t_star = dq < 0.0 ? t_cross + q / (-dq) : t_cross;

            if (t_cross > traj.samples.back().state.t) {
                traj.samples.push_back({s_cross, observe(params, consts, s_cross)});
            }
            traj.termination.kind = TerminationKind::SingularityDetected;
            traj.termination.t_star = t_star;
            traj.termination.floor_crossing_time = t_cross;
            return traj;
        }

        // Accept.
        t = t_new;
        y = y_new;
        k1 = step.k7;
        const FlowState s{t, y[0], y[1]};
        traj.samples.push_back({s, observe(params, consts, s)});

        if (cfg.detect_convergence) {
            const double speed = std::hypot(k1[0], k1[1]);
            quiet_steps = speed < cfg.abs_tol ? quiet_steps + 1 : 0;
            if (quiet_steps >= cfg.convergence_dwell) {
                traj.termination.kind = TerminationKind::ConvergenceDetected;
                traj.termination.limit_state = s;
                return traj;
            }
        }
        if (final_step) {
            traj.termination.kind = TerminationKind::TimeLimitReached;
            return traj;
        }

        // PI step-size control.
        const double err = std::max(step.error, 1e-10);
        double fac = std::pow(err, expo) / std::pow(err_old, beta) / safety;
        fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        err_old = std::max(step.error, 1e-4);
        last_rejected = false;
        h = std::min(h_new, cfg.max_step);
    }
}

} // namespace s1flow
