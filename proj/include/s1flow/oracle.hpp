#pragma once

/// @file oracle.hpp
/// @brief Finite-difference curvature of explicit coordinate metrics, used as an
/// independent check of the frame formulas in frame_geometry.hpp.
///
/// Christoffel symbols come from central differences of the metric components
/// and the Ricci tensor from central differences of the Christoffel symbols, so
/// nothing here shares code with the frame formulas except the final comparison.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "s1flow/frame_geometry.hpp"

namespace s1flow::oracle {

using Point = Eigen::Vector3d;

struct ChartBox {
    Point lo = Point::Zero();
    Point hi = Point::Ones();

    bool contains(const Point& x, double margin = 0.0) const;
};

struct FamilyParams {
    double lambda = 1.0;
    double f = 1.0;
    double c = 0.0;
    double k0 = 0.0;
};

/// A 3-dimensional metric in a single chart together with the adapted orthonormal
/// frame of its connection-metric structure.
struct CoordinateMetric {
    std::string name;
    FamilyParams family;
    ChartBox chart_domain;
    /// Symmetric positive definite matrix g_ij(x).
    std::function<Eigen::Matrix3d(const Point&)> components;
    /// Columns are e1, e2, e3 expressed in the coordinate basis.
    std::function<Eigen::Matrix3d(const Point&)> adapted_frame;
    /// Pointwise frame data the chart realizes.
    std::function<FramePointData(const Point&)> frame_data;
    /// True when f is constant and the connection Yang-Mills, so the frame
    /// prediction is ricci_yang_mills(k_tilde, f, c).
    bool yang_mills = true;

    static constexpr int dimension = 3;
};

/// Berger-type metric (lambda / K0)(dth^2 + sin^2 th dph^2) + f^2 (dch - (c1/2) cos th dph)^2
/// on the dense chart th in [0.1, pi - 0.1] of the degree-c1 circle bundle over
/// the sphere of curvature K0. lambda = f = 1, K0 = 4, c1 = 1 is the unit round S^3.
CoordinateMetric berger_metric(double lambda, double f, double k0, long long c1);

/// lambda (dx^2 + dy^2) + f^2 (dz + c x dy)^2 on [-1, 1]^3: Nil for c != 0, flat for c = 0.
CoordinateMetric torus_bundle_metric(double lambda, double f, double c);

/// dx^2 + G(x)^2 dy^2 + f(x)^2 (dz + h(x) dy)^2 with G = 1 + g2 x^2,
/// f = f0 (1 + fa sin x), h = hc (x + h3 x^3). Exercises every term of the
/// general Ricci formulas (non-constant f, non-Yang-Mills c, non-zero eta).
CoordinateMetric warped_bundle_metric(double g2, double f0, double fa, double hc, double h3);

struct FiniteDifferenceOptions {
    double h = 1e-3;
    /// Combine steps h and h/2 as (4 R(h/2) - R(h)) / 3.
    bool richardson = false;
};

/// Ricci components R_ij in the coordinate basis at `point`. Requires the
/// 2h-neighborhood of `point` inside the chart. Throws NumericalError when the
/// metric is not positive definite or too ill-conditioned to invert.
Eigen::Matrix3d finite_difference_ricci(const CoordinateMetric& metric, const Point& point,
                                        const FiniteDifferenceOptions& opts = {});

/// E^T R E with E = metric.adapted_frame(point).
Eigen::Matrix3d to_adapted_frame(const CoordinateMetric& metric, const Point& point,
                                 const Eigen::Matrix3d& coordinate_ricci);

/// Frame-formula prediction at `point`.
RicciMatrix predicted_frame_ricci(const CoordinateMetric& metric, const Point& point);

/// Sampling of a chart: points_per_axis^3 cell centers of the chart box shrunk by
/// `margin` on every side.
struct GridSpec {
    int points_per_axis = 5;
    double h = 1e-3;
    double margin = 0.0;
};

struct OracleReport {
    std::string family;
    double max_componentwise_error = 0.0; ///< at step h
    double max_error_half_step = 0.0;     ///< at step h/2
    double grid_spacing = 0.0;            ///< h
    int sample_points = 0;
    /// log2(error(h) / error(h/2)); NaN when both errors sit at the rounding floor.
    double convergence_rate_estimate = 0.0;
    double max_asymmetry = 0.0;
};

/// Errors below this are treated as rounding noise when estimating the order.
inline constexpr double kRoundoffFloor = 1e-9;

double convergence_order(double error_coarse, double error_fine, double ratio = 2.0);

OracleReport verify_frame_formulas(const CoordinateMetric& metric, const GridSpec& grid);

/// Pools several reports: errors are maxima, the order is re-estimated from the
/// pooled maxima.
OracleReport combine_reports(const std::vector<OracleReport>& reports, const std::string& name);

} // namespace s1flow::oracle
