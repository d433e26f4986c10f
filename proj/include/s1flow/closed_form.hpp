#pragma once

/// @file closed_form.hpp
/// @brief Analytic solutions of the reduced flows, the implicit first integral of
/// the normalized flow, the model-geometry classifier and asymptotic predictions.
///
/// Unless stated otherwise the solutions assume lambda(0) = f(0) = 1.

#include <optional>
#include <string>

#include "s1flow/flow_ode.hpp"

namespace s1flow {

enum class GeometryClass { S3, Nil, SL2R_tilde, E3, S2xR, H2xR };

std::string to_string(GeometryClass g);

/// Parses the labels produced by to_string; throws InvalidInputError otherwise.
GeometryClass parse_geometry_class(const std::string& label);

inline constexpr double kDefaultClassifyEps = 1e-12;

/// Model geometry of the total space from the sign pattern of (K0, F0); values
/// with magnitude <= eps count as zero.
GeometryClass classify(double k0, double f0_norm, double eps = kDefaultClassifyEps);

/// Normalized flow, K0 = 0: lambda = (1 + 8 F0 t / 3)^(1/4), f = 1 / lambda.
FlowState nil_solution(double f0_norm, double t);

/// Normalized flow, F0 = 0: lambda = 1 - 2 K0 t / 3, f = 1 / lambda.
/// Throws SingularityError past t* = 3 / (2 K0) when K0 > 0.
FlowState product_flat_solution(double k0, double t);

/// Scalar curvature along product_flat_solution: 6 K0 / (3 - 2 K0 t).
double product_flat_scalar_curvature(double k0, double t);

/// Unnormalized flow with F0 = K0 > 0 on the branch f^2 = lambda:
/// lambda = 1 - K0 t. Throws SingularityError for t >= 1 / K0.
FlowState spherical_unnormalized_solution(double k0, double t);

/// Constants of the implicit solution of lambda' = -(2/3) K0 (1 - a0^3 / lambda^3).
struct ImplicitConstants {
    double a0 = 0.0; ///< real cube root of F0 / K0
    double c0 = 0.0; ///< integration constant

    /// Requires K0 != 0 and F0 > 0; c0 is fixed so the residual vanishes at
    /// (lambda0, t0).
    static ImplicitConstants from_initial(double k0, double f0_norm, double lambda0 = 1.0,
                                          double t0 = 0.0);
};

/// lambda-dependent part of the first integral:
/// a0 ln(|lambda - a0|^(1/3) / (lambda^2 + a0 lambda + a0^2)^(1/6))
///   - (a0 / sqrt 3) atan((2 lambda + a0) / (sqrt 3 a0)) + lambda.
double implicit_lambda_part(double a0, double lambda);

/// Residual Phi = implicit_lambda_part(a0, lambda) + (2/3) K0 t - c0, zero along
/// exact solutions.
double implicit_first_integral(const ImplicitConstants& consts, double k0, double lambda,
                               double t);

/// Limits of the normalized flow started at lambda = f = 1. Unset fields have no
/// prediction for that geometry.
struct AsymptoticPrediction {
    GeometryClass geometry = GeometryClass::E3;
    bool is_static = false;
    std::optional<double> lambda_limit;
    std::optional<double> f_limit;
    std::optional<double> scalar_limit;
    std::optional<double> singular_time;
    /// lambda^exponent >= slope * t + offset (SL2R~ only).
    std::optional<double> lower_bound_exponent;
    std::optional<double> lower_bound_slope;
    std::optional<double> lower_bound_offset;
};

/// Throws InvalidInputError when `geometry` disagrees with classify(k0, f0_norm, eps).
AsymptoticPrediction asymptotic_prediction(GeometryClass geometry, double k0, double f0_norm,
                                           double eps = kDefaultClassifyEps);

} // namespace s1flow
