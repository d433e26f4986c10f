#include "s1flow/frame_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "s1flow/errors.hpp"

namespace s1flow {

namespace {

template <std::size_t N>
std::array<double, N> negated(const std::array<double, N>& v) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = -v[i];
    return out;
}

// Slot of the basis 2-form e^a ^ e^b (a < b) in the (12, 13, 23) ordering.
int pair_slot(int a, int b) {
    if (a == 0 && b == 1) return 0;
    if (a == 0 && b == 2) return 1;
    return 2;
}

} // namespace

FramePointData FramePointData::yang_mills(double k_tilde, double f, double c) {
    FramePointData p;
    p.k_tilde = k_tilde;
    p.f = f;
    p.c = c;
    return p;
}

double FramePointData::integrability_defect() const {
    return (f21 - f1 * eta121) - (f12 + f2 * eta122);
}

FramePointData FramePointData::projected_to_integrable() const {
    FramePointData out = *this;
    out.f21 = f12 + f2 * eta122 + f1 * eta121;
    return out;
}

bool FramePointData::is_integrable(double rel_tol) const {
    const double scale = std::max({1.0, std::abs(f21), std::abs(f12), std::abs(f1 * eta121),
                                   std::abs(f2 * eta122)});
    return std::abs(integrability_defect()) <= rel_tol * scale;
}

void FramePointData::validate() const {
    detail::require_finite(k_tilde, "k_tilde");
    detail::require_finite(f, "f");
    detail::require_finite(f1, "f1");
    detail::require_finite(f2, "f2");
    detail::require_finite(f11, "f11");
    detail::require_finite(f12, "f12");
    detail::require_finite(f21, "f21");
    detail::require_finite(f22, "f22");
    detail::require_finite(c, "c");
    detail::require_finite(alpha, "alpha");
    detail::require_finite(beta, "beta");
    detail::require_finite(eta121, "eta121");
    detail::require_finite(eta122, "eta122");
    if (f <= 0.0) throw DomainError("fiber size f must be positive");
}

OneForm ConnectionCoefficients::component(int i, int j) const {
    if (i == j) return {};
    if (i > j) return negated(component(j, i));
    if (i == 0 && j == 1) return theta12;
    if (i == 0 && j == 2) return theta13;
    return theta23;
}

TwoForm CurvatureComponents::component(int i, int j) const {
    if (i == j) return {};
    if (i > j) return negated(component(j, i));
    if (i == 0 && j == 1) return omega12;
    if (i == 0 && j == 2) return omega13;
    return omega23;
}

double CurvatureComponents::evaluate(int i, int j, int a, int b) const {
    if (a == b) return 0.0;
    const TwoForm form = component(i, j);
    if (a < b) return form[pair_slot(a, b)];
    return -form[pair_slot(b, a)];
}

ConnectionCoefficients levi_civita(const FramePointData& p) {
    p.validate();
    const double half_fc = 0.5 * p.f * p.c;
    ConnectionCoefficients out;
    out.theta12 = {p.eta121, p.eta122, -half_fc};
    out.theta13 = {0.0, -half_fc, -p.f1 / p.f};
    out.theta23 = {half_fc, 0.0, -p.f2 / p.f};
    return out;
}

CurvatureComponents curvature_form(const FramePointData& p) {
    p.validate();
    const double f = p.f;
    const double fc2 = f * f * p.c * p.c;
    const double mixed_a = -0.5 * f * p.alpha - 1.5 * p.c * p.f1;
    const double mixed_b = -0.5 * f * p.beta - 1.5 * p.c * p.f2;

    CurvatureComponents out;
    out.omega12 = {p.k_tilde - 0.75 * fc2, mixed_a, mixed_b};
    out.omega13 = {mixed_a,
                   0.25 * fc2 - p.f11 / f - (p.f2 / f) * p.eta121,
                   -((p.f2 / f) * p.eta122 + p.f12 / f)};
    out.omega23 = {mixed_b,
                   (p.f1 / f) * p.eta121 - p.f21 / f,
                   (p.f1 / f) * p.eta122 - p.f22 / f + 0.25 * fc2};
    return out;
}

RicciMatrix ricci(const FramePointData& p) {
    p.validate();
    const double f = p.f;
    const double half_fc2 = 0.5 * f * f * p.c * p.c;
    const double laplacian = -p.f11 - p.f22 - p.f2 * p.eta121 + p.f1 * p.eta122;
    const double r13 = 0.5 * f * p.beta + 1.5 * p.c * p.f2;
    const double r23 = -0.5 * f * p.alpha - 1.5 * p.c * p.f1;

    RicciMatrix r;
    r(0, 0) = p.k_tilde - half_fc2 - p.f11 / f - (p.f2 / f) * p.eta121;
    r(0, 1) = (p.f1 / f) * p.eta121 - p.f21 / f;
    r(0, 2) = r13;
    r(1, 0) = -(p.f2 / f) * p.eta122 - p.f12 / f;
    r(1, 1) = p.k_tilde - half_fc2 + (p.f1 / f) * p.eta122 - p.f22 / f;
    r(1, 2) = r23;
    r(2, 0) = r13;
    r(2, 1) = r23;
    r(2, 2) = half_fc2 + laplacian / f;
    return r;
}

double scalar_curvature(const FramePointData& p) {
    const RicciMatrix r = ricci(p);
    return r(0, 0) + r(1, 1) + r(2, 2);
}

RicciMatrix ricci_yang_mills(double k_tilde, double f, double c) {
    detail::require_finite(k_tilde, "k_tilde");
    detail::require_finite(f, "f");
    detail::require_finite(c, "c");
    if (f <= 0.0) throw DomainError("fiber size f must be positive");
    const double half_fc2 = 0.5 * f * f * c * c;
    RicciMatrix r = RicciMatrix::Zero();
    r(0, 0) = k_tilde - half_fc2;
    r(1, 1) = k_tilde - half_fc2;
    r(2, 2) = half_fc2;
    return r;
}

RicciMatrix ricci_from_curvature(const CurvatureComponents& omega) {
    RicciMatrix r = RicciMatrix::Zero();
    for (int l = 0; l < 3; ++l) {
        for (int k = 0; k < 3; ++k) {
            double sum = 0.0;
            for (int m = 0; m < 3; ++m) sum += omega.evaluate(k, m, l, m);
            r(l, k) = sum;
        }
    }
    return r;
}

} // namespace s1flow
