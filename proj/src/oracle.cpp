#include "s1flow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "s1flow/errors.hpp"

namespace s1flow::oracle {

namespace {

constexpr double kPoleMargin = 0.1;
constexpr double kMaxCondition = 1e12;

using Christoffel = std::array<Eigen::Matrix3d, 3>; // [k](i, j) = Gamma^k_ij

void require_positive(double v, const char* name) {
    detail::require_finite(v, name);
    if (!(v > 0.0)) throw DomainError(std::string(name) + " must be positive");
}

Eigen::Matrix3d checked_inverse(const Eigen::Matrix3d& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(g, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) throw NumericalError("metric is not positive definite");
    if (ev.maxCoeff() / ev.minCoeff() > kMaxCondition) {
        throw NumericalError("metric too ill-conditioned to invert");
    }
    return g.inverse();
}

Eigen::Vector3d unit(int k) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[k] = 1.0;
    return e;
}

Christoffel christoffel(const CoordinateMetric& m, const Point& x, double h) {
    std::array<Eigen::Matrix3d, 3> dg;
    for (int k = 0; k < 3; ++k) {
        dg[k] = (m.components(x + h * unit(k)) - m.components(x - h * unit(k))) / (2.0 * h);
    }
    const Eigen::Matrix3d ginv = checked_inverse(m.components(x));
    Christoffel gam;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int l = 0; l < 3; ++l) {
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                }
                gam[k](i, j) = 0.5 * s;
            }
        }
    }
    return gam;
}

double log_volume(const CoordinateMetric& m, const Point& x) {
    const double det = m.components(x).determinant();
    if (!(det > 0.0)) throw NumericalError("metric determinant is not positive");
    return 0.5 * std::log(det);
}

Eigen::Matrix3d ricci_at_step(const CoordinateMetric& m, const Point& x, double h) {
    const Christoffel gam = christoffel(m, x, h);
    std::array<Christoffel, 3> gam_plus;
    std::array<Christoffel, 3> gam_minus;
    for (int k = 0; k < 3; ++k) {
        gam_plus[k] = christoffel(m, x + h * unit(k), h);
        gam_minus[k] = christoffel(m, x - h * unit(k), h);
    }

    // L = log sqrt(det g), so Gamma^k_ik = d_i L.
    const double l0 = log_volume(m, x);
    Eigen::Vector3d dl;
    Eigen::Matrix3d ddl;
    for (int i = 0; i < 3; ++i) {
        const double lp = log_volume(m, x + h * unit(i));
        const double lm = log_volume(m, x - h * unit(i));
        dl[i] = (lp - lm) / (2.0 * h);
        ddl(i, i) = (lp - 2.0 * l0 + lm) / (h * h);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Eigen::Vector3d ei = h * unit(i);
            const Eigen::Vector3d ej = h * unit(j);
            const double v = (log_volume(m, x + ei + ej) - log_volume(m, x + ei - ej) -
                              log_volume(m, x - ei + ej) + log_volume(m, x - ei - ej)) /
                             (4.0 * h * h);
            ddl(i, j) = v;
            ddl(j, i) = v;
        }
    }

    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = -ddl(i, j);
            for (int k = 0; k < 3; ++k) {
                s += (gam_plus[k][k](i, j) - gam_minus[k][k](i, j)) / (2.0 * h);
                s += gam[k](i, j) * dl[k];
                for (int l = 0; l < 3; ++l) s -= gam[k](i, l) * gam[l](j, k);
            }
            r(i, j) = s;
        }
    }
    return r;
}

} // namespace

bool ChartBox::contains(const Point& x, double margin) const {
    for (int i = 0; i < 3; ++i) {
        if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
    }
    return true;
}

CoordinateMetric berger_metric(double lambda, double f, double k0, long long c1) {
    require_positive(lambda, "lambda");
    require_positive(f, "f");
    require_positive(k0, "k0");
    if (c1 < 0) throw DomainError("Chern number must be nonnegative for this chart");

    const double base_scale = lambda / k0; // g = base_scale * round unit-sphere metric
    const double half_c1 = 0.5 * static_cast<double>(c1);
    const double pi = std::numbers::pi;

    CoordinateMetric m;
    m.name = "berger";
    m.family = {lambda, f, half_c1 * k0 / lambda, k0};
    m.chart_domain.lo = Point(kPoleMargin, 0.0, 0.0);
    m.chart_domain.hi = Point(pi - kPoleMargin, 2.0 * pi, 2.0 * pi);

    // Coordinates (theta, phi, chi); w = d chi - (c1/2) cos(theta) d phi.
    m.components = [=](const Point& x) {
        const double s = std::sin(x[0]);
        const double b = -half_c1 * std::cos(x[0]);
        Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
        g(0, 0) = base_scale;
        g(1, 1) = base_scale * s * s + f * f * b * b;
        g(1, 2) = g(2, 1) = f * f * b;
        g(2, 2) = f * f;
        return g;
    };
    m.adapted_frame = [=](const Point& x) {
        const double r = std::sqrt(base_scale);
        Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
        e(0, 0) = 1.0 / r;
        e(1, 1) = 1.0 / (r * std::sin(x[0]));
        e(2, 1) = half_c1 * std::cos(x[0]) / (r * std::sin(x[0]));
        e(2, 2) = 1.0 / f;
        return e;
    };
    const FramePointData data = FramePointData::yang_mills(k0 / lambda, f, half_c1 * k0 / lambda);
    m.frame_data = [=](const Point&) { return data; };
    return m;
}

CoordinateMetric torus_bundle_metric(double lambda, double f, double c) {
    require_positive(lambda, "lambda");
    require_positive(f, "f");
    detail::require_finite(c, "c");

    CoordinateMetric m;
    m.name = "torus_bundle";
    m.family = {lambda, f, c / lambda, 0.0};
    m.chart_domain.lo = Point(-1.0, -1.0, -1.0);
    m.chart_domain.hi = Point(1.0, 1.0, 1.0);

    m.components = [=](const Point& x) {
        const double b = c * x[0];
        Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
        g(0, 0) = lambda;
        g(1, 1) = lambda + f * f * b * b;
        g(1, 2) = g(2, 1) = f * f * b;
        g(2, 2) = f * f;
        return g;
    };
    m.adapted_frame = [=](const Point& x) {
        const double r = std::sqrt(lambda);
        Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
        e(0, 0) = 1.0 / r;
        e(1, 1) = 1.0 / r;
        e(2, 1) = -c * x[0] / r;
        e(2, 2) = 1.0 / f;
        return e;
    };
    const FramePointData data = FramePointData::yang_mills(0.0, f, c / lambda);
    m.frame_data = [=](const Point&) { return data; };
    return m;
}

CoordinateMetric warped_bundle_metric(double g2, double f0, double fa, double hc, double h3) {
    require_positive(f0, "f0");
    for (auto [v, name] : {std::pair{g2, "g2"}, std::pair{fa, "fa"}, std::pair{hc, "hc"},
                           std::pair{h3, "h3"}}) {
        detail::require_finite(v, name);
    }
    if (g2 < 0.0) throw DomainError("g2 must be nonnegative");
    if (std::abs(fa) >= 0.5) throw DomainError("|fa| must stay below 1/2 to keep f positive");

    CoordinateMetric m;
    m.name = "warped_bundle";
    m.family = {1.0, f0, hc, 0.0};
    m.chart_domain.lo = Point(-1.0, -1.0, -1.0);
    m.chart_domain.hi = Point(1.0, 1.0, 1.0);
    m.yang_mills = false;

    const auto warp = [=](double x) { return 1.0 + g2 * x * x; };
    const auto fiber = [=](double x) { return f0 * (1.0 + fa * std::sin(x)); };
    const auto twist = [=](double x) { return hc * (x + h3 * x * x * x); };

    m.components = [=](const Point& x) {
        const double gw = warp(x[0]);
        const double fv = fiber(x[0]);
        const double b = twist(x[0]);
        Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
        g(0, 0) = 1.0;
        g(1, 1) = gw * gw + fv * fv * b * b;
        g(1, 2) = g(2, 1) = fv * fv * b;
        g(2, 2) = fv * fv;
        return g;
    };
    m.adapted_frame = [=](const Point& x) {
        const double gw = warp(x[0]);
        Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
        e(0, 0) = 1.0;
        e(1, 1) = 1.0 / gw;
        e(2, 1) = -twist(x[0]) / gw;
        e(2, 2) = 1.0 / fiber(x[0]);
        return e;
    };
    // Base coframe (dx, G dy): eta^1_2 = -(G'/G) eta^2, K = -G''/G.
    m.frame_data = [=](const Point& x) {
        const double s = x[0];
        const double gw = warp(s);
        const double dgw = 2.0 * g2 * s;
        const double ddgw = 2.0 * g2;
        const double dh = hc * (1.0 + 3.0 * h3 * s * s);
        const double ddh = 6.0 * hc * h3 * s;
        FramePointData p;
        p.k_tilde = -ddgw / gw;
        p.f = fiber(s);
        p.f1 = f0 * fa * std::cos(s);
        p.f11 = -f0 * fa * std::sin(s);
        p.c = dh / gw;
        p.alpha = (ddh * gw - dh * dgw) / (gw * gw);
        p.eta122 = -dgw / gw;
        return p;
    };
    return m;
}

Eigen::Matrix3d finite_difference_ricci(const CoordinateMetric& metric, const Point& point,
                                        const FiniteDifferenceOptions& opts) {
    detail::require_finite(opts.h, "h");
    if (!(opts.h > 0.0)) throw DomainError("finite-difference step must be positive");
    for (int i = 0; i < 3; ++i) detail::require_finite(point[i], "point");
    if (!metric.chart_domain.contains(point, 2.0 * opts.h)) {
        throw DomainError("point's 2h-neighborhood leaves the chart of " + metric.name);
    }
    const Eigen::Matrix3d coarse = ricci_at_step(metric, point, opts.h);
    if (!opts.richardson) return coarse;
    const Eigen::Matrix3d fine = ricci_at_step(metric, point, 0.5 * opts.h);
    return (4.0 * fine - coarse) / 3.0;
}

Eigen::Matrix3d to_adapted_frame(const CoordinateMetric& metric, const Point& point,
                                 const Eigen::Matrix3d& coordinate_ricci) {
    const Eigen::Matrix3d e = metric.adapted_frame(point);
    return e.transpose() * coordinate_ricci * e;
}

RicciMatrix predicted_frame_ricci(const CoordinateMetric& metric, const Point& point) {
    const FramePointData p = metric.frame_data(point);
    if (metric.yang_mills) return ricci_yang_mills(p.k_tilde, p.f, p.c);
    return ricci(p);
}

double convergence_order(double error_coarse, double error_fine, double ratio) {
    if (error_coarse < kRoundoffFloor && error_fine < kRoundoffFloor) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log(error_coarse / error_fine) / std::log(ratio);
}

OracleReport verify_frame_formulas(const CoordinateMetric& metric, const GridSpec& grid) {
    if (grid.points_per_axis < 1) throw InvalidInputError("grid needs at least one point per axis");
    detail::require_finite(grid.h, "h");
    if (!(grid.h > 0.0)) throw DomainError("finite-difference step must be positive");

    const double margin = std::max(grid.margin, 2.0 * grid.h);
    const Point lo = metric.chart_domain.lo.array() + margin;
    const Point hi = metric.chart_domain.hi.array() - margin;
    if ((hi - lo).minCoeff() < 0.0) throw DomainError("grid margin exceeds the chart");

    OracleReport report;
    report.family = metric.name;
    report.grid_spacing = grid.h;
    const int n = grid.points_per_axis;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                const Eigen::Array3d frac((a + 0.5) / n, (b + 0.5) / n, (c + 0.5) / n);
                const Point x = lo.array() + frac * (hi - lo).array();
                const RicciMatrix expected = predicted_frame_ricci(metric, x);

                const Eigen::Matrix3d coarse = finite_difference_ricci(metric, x, {grid.h, false});
                const Eigen::Matrix3d fine =
                    finite_difference_ricci(metric, x, {0.5 * grid.h, false});
                report.max_componentwise_error =
                    std::max(report.max_componentwise_error,
                             (to_adapted_frame(metric, x, coarse) - expected).cwiseAbs().maxCoeff());
                report.max_error_half_step =
                    std::max(report.max_error_half_step,
                             (to_adapted_frame(metric, x, fine) - expected).cwiseAbs().maxCoeff());
                report.max_asymmetry = std::max(
                    report.max_asymmetry, (coarse - coarse.transpose()).cwiseAbs().maxCoeff());
                ++report.sample_points;
            }
        }
    }
    report.convergence_rate_estimate =
        convergence_order(report.max_componentwise_error, report.max_error_half_step);
    return report;
}

OracleReport combine_reports(const std::vector<OracleReport>& reports, const std::string& name) {
    OracleReport out;
    out.family = name;
    for (const auto& r : reports) {
        out.max_componentwise_error = std::max(out.max_componentwise_error, r.max_componentwise_error);
        out.max_error_half_step = std::max(out.max_error_half_step, r.max_error_half_step);
        out.max_asymmetry = std::max(out.max_asymmetry, r.max_asymmetry);
        out.sample_points += r.sample_points;
        out.grid_spacing = std::max(out.grid_spacing, r.grid_spacing);
    }
    out.convergence_rate_estimate =
        convergence_order(out.max_componentwise_error, out.max_error_half_step);
    return out;
}

} // namespace s1flow::oracle
