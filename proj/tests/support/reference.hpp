#pragma once

// Independent reference computations for tests. Nothing here calls the library.

#include <array>
#include <cmath>
#include <functional>

namespace ref {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using MetricFn = std::function<Mat3(const Vec3&)>;

inline Mat3 inverse(const Mat3& a) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    Mat3 r{};
    r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return r;
}

// Gamma[k][i][j] = Christoffel symbol of the second kind, metric derivatives by
// fourth-order central differences with step h.
inline std::array<Mat3, 3> christoffel(const MetricFn& g, const Vec3& x, double h) {
    std::array<Mat3, 3> dg{}; // dg[m][i][j] = d_m g_ij
    for (int m = 0; m < 3; ++m) {
        auto at = [&](double s) {
            Vec3 y = x;
            y[m] += s;
            return g(y);
        };
        const Mat3 p1 = at(h), m1 = at(-h), p2 = at(2 * h), m2 = at(-2 * h);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                dg[m][i][j] = (8 * (p1[i][j] - m1[i][j]) - (p2[i][j] - m2[i][j])) / (12 * h);
    }
    const Mat3 gi = inverse(g(x));
    std::array<Mat3, 3> gam{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int l = 0; l < 3; ++l)
                    s += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                gam[k][i][j] = 0.5 * s;
            }
    return gam;
}

// Coordinate Ricci tensor R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik.
inline Mat3 ricci(const MetricFn& g, const Vec3& x, double h = 1e-3) {
    std::array<std::array<Mat3, 3>, 3> dgam{}; // dgam[m] = d_m Gamma
    for (int m = 0; m < 3; ++m) {
        Vec3 xp = x, xm = x;
        xp[m] += h;
        xm[m] -= h;
        const auto a = christoffel(g, xp, h);
        const auto b = christoffel(g, xm, h);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) dgam[m][k][i][j] = (a[k][i][j] - b[k][i][j]) / (2 * h);
    }
    const auto gam = christoffel(g, x, h);
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) {
                s += dgam[k][k][i][j] - dgam[j][k][i][k];
                for (int l = 0; l < 3; ++l)
                    s += gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k];
            }
            r[i][j] = s;
        }
    return r;
}

inline double scalar(const MetricFn& g, const Vec3& x, double h = 1e-3) {
    const Mat3 r = ricci(g, x, h);
    const Mat3 gi = inverse(g(x));
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += gi[i][j] * r[i][j];
    return s;
}

// Classical fixed-step RK4 for the two-variable flow, right-hand side supplied by the caller.
struct State {
    double lambda, f;
};
using Rhs = std::function<State(const State&)>;

inline State rk4(const Rhs& rhs, State y, double t_end, int steps) {
    const double h = t_end / steps;
    for (int n = 0; n < steps; ++n) {
        const State k1 = rhs(y);
        const State k2 = rhs({y.lambda + 0.5 * h * k1.lambda, y.f + 0.5 * h * k1.f});
        const State k3 = rhs({y.lambda + 0.5 * h * k2.lambda, y.f + 0.5 * h * k2.f});
        const State k4 = rhs({y.lambda + h * k3.lambda, y.f + h * k3.f});
        y.lambda += h / 6 * (k1.lambda + 2 * k2.lambda + 2 * k3.lambda + k4.lambda);
        y.f += h / 6 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
    }
    return y;
}

// Normalized flow written out directly.
inline Rhs normalized(double k0, double F0) {
    return [=](const State& s) {
        const double l = s.lambda, f = s.f;
        return State{-2.0 / 3 * k0 + 2.0 / 3 * F0 * f * f / l,
                     2.0 / 3 * k0 * f / l - 2.0 / 3 * F0 * f * f * f / (l * l)};
    };
}

inline Rhs unnormalized(double k0, double F0) {
    return [=](const State& s) {
        const double l = s.lambda, f = s.f;
        return State{-2 * k0 + F0 * f * f / l, -0.5 * F0 * f * f * f / (l * l)};
    };
}

} // namespace ref
