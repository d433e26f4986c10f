#include "s1flow/closed_form.hpp"

#include <cmath>
#include <limits>

namespace s1flow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

std::string to_string(GeometryClass g) {
    switch (g) {
    case GeometryClass::S3: return "S3";
    case GeometryClass::Nil: return "Nil";
    case GeometryClass::SL2R_tilde: return "SL2R_tilde";
    case GeometryClass::E3: return "E3";
    case GeometryClass::S2xR: return "S2xR";
    case GeometryClass::H2xR: return "H2xR";
    }
    return "?";
}

GeometryClass parse_geometry_class(const std::string& label) {
    for (GeometryClass g : {GeometryClass::S3, GeometryClass::Nil, GeometryClass::SL2R_tilde,
                            GeometryClass::E3, GeometryClass::S2xR, GeometryClass::H2xR}) {
        if (to_string(g) == label) return g;
    }
    throw InvalidInputError("unknown geometry label '" + label + "'");
}

GeometryClass classify(double k0, double f0_norm, double eps) {
    detail::require_finite(k0, "k0");
    detail::require_finite(f0_norm, "f0_norm");
    if (!(eps > 0.0)) throw InvalidInputError("classification threshold must be positive");
    if (f0_norm < -eps) throw DomainError("F0 is a squared norm and cannot be negative");

    const bool flat = f0_norm <= eps;
    if (std::abs(k0) <= eps) return flat ? GeometryClass::E3 : GeometryClass::Nil;
    if (k0 > 0.0) return flat ? GeometryClass::S2xR : GeometryClass::S3;
    return flat ? GeometryClass::H2xR : GeometryClass::SL2R_tilde;
}

FlowState nil_solution(double f0_norm, double t) {
    detail::require_finite(f0_norm, "f0_norm");
    detail::require_finite(t, "t");
    if (!(f0_norm > 0.0)) throw DomainError("Nil solution requires F0 > 0");
    if (t < 0.0) throw DomainError("flow time must be nonnegative");
    const double lambda = std::pow(1.0 + (8.0 / 3.0) * f0_norm * t, 0.25);
    return {t, lambda, 1.0 / lambda};
}

FlowState product_flat_solution(double k0, double t) {
    detail::require_finite(k0, "k0");
    detail::require_finite(t, "t");
    if (k0 == 0.0) throw DomainError("product solution requires K0 != 0");
    if (t < 0.0) throw DomainError("flow time must be nonnegative");
    const double lambda = 1.0 - (2.0 / 3.0) * k0 * t;
    if (lambda <= 0.0) {
        throw SingularityError("metric degenerates at t* = 3/(2 K0)", 1.5 / k0);
    }
    return {t, lambda, 1.0 / lambda};
}

double product_flat_scalar_curvature(double k0, double t) {
    product_flat_solution(k0, t);
    return 6.0 * k0 / (3.0 - 2.0 * k0 * t);
}

FlowState spherical_unnormalized_solution(double k0, double t) {
    detail::require_finite(k0, "k0");
    detail::require_finite(t, "t");
    if (!(k0 > 0.0)) throw DomainError("spherical solution requires K0 > 0");
    if (t < 0.0) throw DomainError("flow time must be nonnegative");
    const double lambda = 1.0 - k0 * t;
    if (lambda <= 0.0) {
        throw SingularityError("metric collapses at t* = 1/K0", 1.0 / k0);
    }
    return {t, lambda, std::sqrt(lambda)};
}

ImplicitConstants ImplicitConstants::from_initial(double k0, double f0_norm, double lambda0,
                                                  double t0) {
    detail::require_finite(k0, "k0");
    detail::require_finite(f0_norm, "f0_norm");
    if (k0 == 0.0) throw DomainError("implicit solution requires K0 != 0");
    if (!(f0_norm > 0.0)) throw DomainError("implicit solution requires F0 > 0");
    ImplicitConstants out;
    out.a0 = std::cbrt(f0_norm / k0);
    out.c0 = implicit_lambda_part(out.a0, lambda0) + (2.0 / 3.0) * k0 * t0;
    return out;
}

double implicit_lambda_part(double a0, double lambda) {
    detail::require_finite(a0, "a0");
    detail::require_finite(lambda, "lambda");
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (a0 == 0.0) throw DomainError("a0 must be nonzero");
    const double gap = std::abs(lambda - a0);
    if (gap == 0.0) throw DomainError("first integral is log-singular at lambda = a0");
    const double quad = lambda * lambda + a0 * lambda + a0 * a0;
    if (!(quad > 0.0)) throw DomainError("lambda^2 + a0 lambda + a0^2 must be positive");

    const double sqrt3 = std::sqrt(3.0);
    const double log_term = a0 * (std::log(gap) / 3.0 - std::log(quad) / 6.0);
    const double atan_term = (a0 / sqrt3) * std::atan((2.0 * lambda + a0) / (sqrt3 * a0));
    return log_term - atan_term + lambda;
}

double implicit_first_integral(const ImplicitConstants& consts, double k0, double lambda,
                               double t) {
    return implicit_lambda_part(consts.a0, lambda) + (2.0 / 3.0) * k0 * t - consts.c0;
}

AsymptoticPrediction asymptotic_prediction(GeometryClass geometry, double k0, double f0_norm,
                                           double eps) {
    const GeometryClass actual = classify(k0, f0_norm, eps);
    if (actual != geometry) {
        throw InvalidInputError("geometry " + to_string(geometry) +
                                " is inconsistent with (K0, F0), which classify as " +
                                to_string(actual));
    }

    AsymptoticPrediction p;
    p.geometry = geometry;
    switch (geometry) {
    case GeometryClass::E3:
        p.is_static = true;
        p.lambda_limit = 1.0;
        p.f_limit = 1.0;
        p.scalar_limit = 0.0;
        break;
    case GeometryClass::S3: {
        const double a0 = std::cbrt(f0_norm / k0);
        p.lambda_limit = a0;
        p.f_limit = 1.0 / a0;
        p.scalar_limit = 1.5 * k0 / a0;
        break;
    }
    case GeometryClass::SL2R_tilde:
        p.lambda_limit = kInf;
        p.f_limit = 0.0;
        p.scalar_limit = 0.0;
        p.lower_bound_exponent = 4.0;
        p.lower_bound_slope = (2.0 / 3.0) * f0_norm;
        p.lower_bound_offset = 1.0;
        break;
    case GeometryClass::S2xR:
        p.singular_time = 1.5 / k0;
        p.lambda_limit = 0.0;
        p.f_limit = kInf;
        p.scalar_limit = kInf;
        break;
    case GeometryClass::H2xR:
    case GeometryClass::Nil:
        p.lambda_limit = kInf;
        p.f_limit = 0.0;
        p.scalar_limit = 0.0;
        break;
    }
    return p;
}

} // namespace s1flow
