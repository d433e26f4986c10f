#include <doctest.h>

#include <cmath>

#include "s1flow/closed_form.hpp"
#include "s1flow/errors.hpp"
#include "s1flow/flow_ode.hpp"

using namespace s1flow;

namespace {

// Central-difference time derivative of a closed form compared with the ODE field.
template <class Solution>
void check_solves(const FlowParams& p, Solution sol, double t_max, double tol) {
    const double h = 1e-5;
    for (int i = 1; i <= 100; ++i) {
        const double t = t_max * i / 101.0;
        const FlowState s = sol(t);
        const FlowState a = sol(t + h);
        const FlowState b = sol(t - h);
        const auto d = rhs(p, s);
        CHECK(std::abs((a.lambda - b.lambda) / (2 * h) - d.dlambda) <= tol * (1 + std::abs(d.dlambda)));
        CHECK(std::abs((a.f - b.f) / (2 * h) - d.df) <= tol * (1 + std::abs(d.df)));
    }
}

} // namespace

TEST_CASE("closed forms solve their flows") {
    check_solves({0, 3, FlowVariant::Normalized}, [](double t) { return nil_solution(3, t); }, 10, 1e-7);
    check_solves({0, 0.4, FlowVariant::Normalized}, [](double t) { return nil_solution(0.4, t); }, 10, 1e-7);
    check_solves({1, 0, FlowVariant::Normalized}, [](double t) { return product_flat_solution(1, t); }, 1.4, 1e-6);
    check_solves({-2, 0, FlowVariant::Normalized}, [](double t) { return product_flat_solution(-2, t); }, 10, 1e-7);
    check_solves({4, 4, FlowVariant::Unnormalized}, [](double t) { return spherical_unnormalized_solution(4, t); },
                 0.24, 1e-6);
}

TEST_CASE("closed-form values") {
    const auto nil = nil_solution(3, 10);
    CHECK(nil.lambda == doctest::Approx(std::pow(81.0, 0.25)));
    CHECK(nil.f * nil.lambda == doctest::Approx(1.0));
    const auto hopf = spherical_unnormalized_solution(4, 0.2);
    CHECK(hopf.lambda == doctest::Approx(0.2));
    CHECK(hopf.f == doctest::Approx(std::sqrt(0.2)));
    CHECK(product_flat_scalar_curvature(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("closed forms report their singular times") {
    try {
        product_flat_solution(2, 0.75);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(e.t_star() == 0.75);
    }
    CHECK_THROWS_AS(spherical_unnormalized_solution(4, 0.25), SingularityError);
    CHECK_NOTHROW(product_flat_solution(-1, 100));
    CHECK_THROWS_AS(nil_solution(0, 1), DomainError);
}

TEST_CASE("classification of the six geometries") {
    CHECK(classify(1, 8) == GeometryClass::S3);
    CHECK(classify(0, 3) == GeometryClass::Nil);
    CHECK(classify(-1, 4) == GeometryClass::SL2R_tilde);
    CHECK(classify(0, 0) == GeometryClass::E3);
    CHECK(classify(1, 0) == GeometryClass::S2xR);
    CHECK(classify(-1, 0) == GeometryClass::H2xR);
    for (auto g : {GeometryClass::S3, GeometryClass::Nil, GeometryClass::SL2R_tilde, GeometryClass::E3,
                   GeometryClass::S2xR, GeometryClass::H2xR})
        CHECK(parse_geometry_class(to_string(g)) == g);
    CHECK_THROWS_AS(parse_geometry_class("Sol"), InvalidInputError);
}

TEST_CASE("perturbations below the threshold do not change the class") {
    CHECK(classify(1e-14, 3) == GeometryClass::Nil);
    CHECK(classify(-1e-14, 0) == GeometryClass::E3);
    CHECK(classify(1, 1e-14) == GeometryClass::S2xR);
    CHECK(classify(1e-10, 3) == GeometryClass::S3);
    CHECK(classify(1e-10, 3, 1e-8) == GeometryClass::Nil);
}

TEST_CASE("first integral is constant along the reduced flow") {
    for (double k0 : {1.0, -1.0, 2.0})
        for (double F0 : {8.0, 4.0, 0.5}) {
            const auto c = ImplicitConstants::from_initial(k0, F0);
            CHECK(c.a0 == doctest::Approx(std::cbrt(F0 / k0)));
            CHECK(implicit_first_integral(c, k0, 1.0, 0.0) == doctest::Approx(0.0));
            for (double l : {0.3, 0.8, 1.4, 3.0}) {
                if (std::abs(l - c.a0) < 0.05) continue;
                const double h = 1e-6;
                const double dphi = (implicit_lambda_part(c.a0, l + h) - implicit_lambda_part(c.a0, l - h)) / (2 * h);
                const double ldot = -2.0 / 3 * k0 * (1 - c.a0 * c.a0 * c.a0 / (l * l * l));
                CHECK(std::abs(dphi * ldot + 2.0 / 3 * k0) <= 1e-7);
            }
        }
}

TEST_CASE("first integral vanishes along integrated spherical trajectories") {
    const FlowParams p{1, 8, FlowVariant::Normalized};
    IntegratorConfig cfg;
    cfg.t_end = 5;
    const auto c = ImplicitConstants::from_initial(1, 8);
    for (const auto& s : integrate(p, {0, 1, 1}, cfg).samples) {
        if (std::abs(s.state.lambda - 2) <= 0.1) continue;
        CHECK(std::abs(implicit_first_integral(c, 1, s.state.lambda, s.state.t)) <= 1e-8);
    }
    CHECK_THROWS_AS(implicit_lambda_part(2, 2), DomainError);
    CHECK_THROWS_AS(ImplicitConstants::from_initial(0, 1), DomainError);
}

TEST_CASE("spherical approach to a0 is monotone") {
    const FlowParams p{1, 8, FlowVariant::Normalized};
    IntegratorConfig cfg;
    cfg.t_end = 40;
    const auto traj = integrate(p, {0, 1, 1}, cfg);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].state.lambda >= traj.samples[i - 1].state.lambda);
        CHECK(traj.samples[i].state.lambda <= 2.0 + 1e-9);
    }
}

TEST_CASE("SL2R lower bound holds along the flow") {
    const double F0 = 4;
    const FlowParams p{-1, F0, FlowVariant::Normalized};
    IntegratorConfig cfg;
    cfg.t_end = 50;
    for (const auto& s : integrate(p, {0, 1, 1}, cfg).samples) {
        const double l = s.state.lambda;
        CHECK(l * l * l * l >= 2.0 / 3 * F0 * s.state.t + 1 - 1e-8);
    }
}

TEST_CASE("predicted limits match long integrations") {
    IntegratorConfig cfg;
    cfg.t_end = 1e3;
    cfg.max_step = 50;
    struct Case {
        double k0, F0;
    };
    for (const Case c : {Case{1, 8}, Case{-1, 4}, Case{0, 3}, Case{-1, 0}, Case{0, 0}, Case{2, 1}}) {
        const auto g = classify(c.k0, c.F0);
        const auto pred = asymptotic_prediction(g, c.k0, c.F0);
        const auto traj = integrate({c.k0, c.F0, FlowVariant::Normalized}, {0, 1, 1}, cfg);
        const auto& last = traj.samples.back();
        REQUIRE(pred.scalar_limit.has_value());
        CHECK(std::abs(last.observables.scalar_curvature - *pred.scalar_limit) <= 1e-2);
        if (pred.lambda_limit && std::isfinite(*pred.lambda_limit))
            CHECK(last.state.lambda == doctest::Approx(*pred.lambda_limit).epsilon(1e-6));
    }
    const auto s3 = asymptotic_prediction(GeometryClass::S3, 1, 8);
    CHECK(*s3.scalar_limit == doctest::Approx(0.75));
    const auto sxr = asymptotic_prediction(GeometryClass::S2xR, 2, 0);
    CHECK(*sxr.singular_time == 0.75);
    CHECK(asymptotic_prediction(GeometryClass::E3, 0, 0).is_static);
    CHECK_THROWS_AS(asymptotic_prediction(GeometryClass::S3, -1, 4), InvalidInputError);
}
