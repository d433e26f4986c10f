#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "s1flow/errors.hpp"
#include "s1flow/flow_ode.hpp"
#include "support/reference.hpp"

using namespace s1flow;

namespace {

FlowParams normalized(double k0, double f0) { return {k0, f0, FlowVariant::Normalized}; }
FlowParams unnormalized(double k0, double f0) { return {k0, f0, FlowVariant::Unnormalized}; }

IntegratorConfig horizon(double t_end) {
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    return cfg;
}

} // namespace

TEST_CASE("right-hand sides at known states") {
    const auto hopf = rhs(unnormalized(4, 4), {0, 1, 1});
    CHECK(hopf.dlambda == -4.0);
    CHECK(hopf.df == -2.0);

    const auto nil = rhs(normalized(0, 3), {0, 1, 1});
    CHECK(nil.dlambda == doctest::Approx(2.0));
    CHECK(nil.df == doctest::Approx(-2.0));

    const auto flat = rhs(normalized(0, 0), {0, 2.5, 0.3});
    CHECK(flat.dlambda == 0.0);
    CHECK(flat.df == 0.0);

    CHECK(rhs(normalized(1, 2), {0, 1.3, 0.7}).dlambda ==
          rhs_normalized(normalized(1, 2), {0, 1.3, 0.7}).dlambda);
    CHECK(rhs(unnormalized(1, 2), {0, 1.3, 0.7}).df ==
          rhs_unnormalized(unnormalized(1, 2), {0, 1.3, 0.7}).df);
}

TEST_CASE("normalized flow preserves f lambda pointwise") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> k(-3, 3), F(0, 10), pos(0.1, 5);
    for (int n = 0; n < 500; ++n) {
        const auto p = normalized(k(rng), F(rng));
        const FlowState s{0, pos(rng), pos(rng)};
        const auto d = rhs(p, s);
        const double dprod = d.df * s.lambda + s.f * d.dlambda;
        CHECK(std::abs(dprod) <= 1e-12 * (1 + std::abs(d.df * s.lambda) + std::abs(s.f * d.dlambda)));
    }
}

TEST_CASE("on f lambda = 1 the normalized flow reduces to the cubic equation") {
    for (double k0 : {-2.0, -0.5, 1.0, 3.0})
        for (double F0 : {0.5, 4.0})
            for (double l : {0.4, 1.0, 2.7}) {
                const double a3 = F0 / k0;
                const double expected = -2.0 / 3 * k0 * (1 - a3 / (l * l * l));
                CHECK(rhs(normalized(k0, F0), {0, l, 1 / l}).dlambda == doctest::Approx(expected));
            }
}

TEST_CASE("scalar curvature observable and Chern constant") {
    CHECK(scalar_curvature_observable(normalized(4, 4), {0, 1, 1}) == 6.0);
    CHECK(scalar_curvature_observable(normalized(0, 3), {0, 1, 1}) == -1.5);
    CHECK(chern_curvature_constant(1, std::numbers::pi) == 2.0);
    CHECK(chern_curvature_constant(-2, 4 * std::numbers::pi) == -1.0);
    CHECK(chern_curvature_constant(0, 1.0) == 0.0);
    CHECK_THROWS_AS(chern_curvature_constant(1, 0.0), Error);
}

TEST_CASE("integration matches a reference RK4 solution") {
    struct Case {
        double k0, F0, T;
        bool norm;
    };
    for (const Case c : {Case{1, 8, 3, true}, Case{-1, 4, 5, true}, Case{0, 3, 4, true},
                         Case{-2, 9, 2, true}, Case{-1, 2, 2, false}, Case{0, 1, 3, false}}) {
        const FlowParams p = c.norm ? normalized(c.k0, c.F0) : unnormalized(c.k0, c.F0);
        const auto traj = integrate(p, {0, 1, 1}, horizon(c.T));
        CHECK(traj.termination.kind == TerminationKind::TimeLimitReached);
        const auto& last = traj.samples.back().state;
        CHECK(last.t == c.T);
        const auto r = ref::rk4(c.norm ? ref::normalized(c.k0, c.F0) : ref::unnormalized(c.k0, c.F0),
                                {1, 1}, c.T, 20000);
        CHECK(std::abs(last.lambda - r.lambda) <= 1e-8 * std::max(1.0, r.lambda));
        CHECK(std::abs(last.f - r.f) <= 1e-8 * std::max(1.0, r.f));
    }
}

TEST_CASE("samples start at the initial state and advance monotonically") {
    const auto traj = integrate(normalized(1, 8), {0, 1, 1}, horizon(2));
    REQUIRE(traj.samples.size() > 2);
    CHECK(traj.samples.front().state == FlowState{0, 1, 1});
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].state.t > traj.samples[i - 1].state.t);
}

TEST_CASE("tighter tolerances shrink the error against the Nil closed form") {
    const double F0 = 3, T = 10;
    auto err = [&](double tol) {
        IntegratorConfig cfg = horizon(T);
        cfg.rel_tol = tol;
        cfg.abs_tol = tol * 1e-2;
        double worst = 0;
        for (const auto& s : integrate(normalized(0, F0), {0, 1, 1}, cfg).samples) {
            const double exact = std::pow(1 + 8.0 / 3 * F0 * s.state.t, 0.25);
            worst = std::max(worst, std::abs(s.state.lambda - exact));
        }
        return worst;
    };
    const double coarse = err(1e-5), fine = err(1e-10);
    CHECK(fine < coarse);
    CHECK(fine <= 1e-8);
}

TEST_CASE("product singularity is detected near 3 / (2 K0)") {
    for (double k0 : {1.0, 2.0, 0.5}) {
        const auto traj = integrate(normalized(k0, 0), {0, 1, 1}, horizon(10));
        REQUIRE(traj.termination.kind == TerminationKind::SingularityDetected);
        CHECK(std::abs(traj.termination.t_star - 1.5 / k0) <= 1e-6);
        CHECK(traj.termination.floor_crossing_time <= traj.termination.t_star);
        CHECK(traj.samples.back().state.t == traj.termination.floor_crossing_time);
    }
}

TEST_CASE("spherical equilibrium is detected as convergence") {
    IntegratorConfig cfg = horizon(200);
    const auto traj = integrate(normalized(1, 8), {0, 1, 1}, cfg);
    REQUIRE(traj.termination.kind == TerminationKind::ConvergenceDetected);
    CHECK(traj.termination.limit_state.lambda == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(traj.termination.limit_state.f == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("implicit residual is attached only where defined") {
    const auto s3 = integrate(normalized(1, 8), {0, 1, 1}, horizon(1));
    CHECK(s3.samples.front().observables.implicit_residual.has_value());
    const auto nil = integrate(normalized(0, 3), {0, 1, 1}, horizon(1));
    for (const auto& s : nil.samples) CHECK_FALSE(s.observables.implicit_residual.has_value());
    const auto un = integrate(unnormalized(1, 8), {0, 1, 1}, horizon(0.1));
    for (const auto& s : un.samples) CHECK_FALSE(s.observables.implicit_residual.has_value());
}

TEST_CASE("step underflow raises IntegrationFailure carrying the partial trajectory") {
    IntegratorConfig cfg = horizon(10);
    cfg.min_step = 0.3;
    cfg.max_step = 0.5;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-14;
    try {
        integrate(normalized(1, 8), {0, 1, 1}, cfg);
        FAIL("expected IntegrationFailure");
    } catch (const IntegrationFailure& e) {
        CHECK_FALSE(e.partial().samples.empty());
        CHECK(e.partial().samples.front().state == FlowState{0, 1, 1});
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(integrate(normalized(1, -1), {0, 1, 1}, horizon(1)), DomainError);
    CHECK_THROWS_AS(integrate(normalized(1, 1), {0, 0, 1}, horizon(1)), DomainError);
    CHECK_THROWS_AS(integrate(normalized(std::nan(""), 1), {0, 1, 1}, horizon(1)), InvalidInputError);
    IntegratorConfig bad = horizon(1);
    bad.rel_tol = 0;
    CHECK_THROWS_AS(integrate(normalized(1, 1), {0, 1, 1}, bad), InvalidInputError);
}
