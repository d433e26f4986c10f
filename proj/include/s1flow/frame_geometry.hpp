#pragma once

/// @file frame_geometry.hpp
/// @brief Pointwise curvature of a connection metric g_A = pi*g + f^2 w(x)w on a
/// principal circle bundle over a surface, evaluated in the adapted orthonormal
/// coframe (theta1, theta2, theta3) with theta1, theta2 pulled back from the
/// base and theta3 = f w.
///
/// Storage conventions used throughout:
///   - a 1-form is the coefficient triple on (theta1, theta2, theta3);
///   - a 2-form is the coefficient triple on (theta1^theta2, theta1^theta3, theta2^theta3);
///   - frame indices are 0-based (index 0 is e1).

#include <array>

#include <Eigen/Core>

namespace s1flow {

/// Pointwise scalars feeding the connection, curvature and Ricci formulas.
/// Frame derivatives are independent inputs; nothing here differentiates.
struct FramePointData {
    double k_tilde = 0.0; ///< pulled-back Gauss curvature of the base
    double f = 1.0;       ///< fiber size, must be > 0
    double f1 = 0.0;      ///< df = f1 theta1 + f2 theta2
    double f2 = 0.0;
    double f11 = 0.0;     ///< df_i = f_i1 theta1 + f_i2 theta2
    double f12 = 0.0;
    double f21 = 0.0;
    double f22 = 0.0;
    double c = 0.0;       ///< F_w = c theta1^theta2
    double alpha = 0.0;   ///< dc = alpha theta1 + beta theta2
    double beta = 0.0;
    double eta121 = 0.0;  ///< pi*eta^1_2 = eta121 theta1 + eta122 theta2
    double eta122 = 0.0;

    /// Constant-f Yang-Mills data: every derivative and eta coefficient zero.
    static FramePointData yang_mills(double k_tilde, double f, double c);

    /// Violation of d^2 f = 0, i.e. (f21 - f1 eta121) - (f12 + f2 eta122).
    double integrability_defect() const;

    /// True when |integrability_defect()| <= rel_tol * max(1, largest magnitude involved).
    bool is_integrable(double rel_tol = 1e-9) const;

    /// Throws InvalidInputError on non-finite fields and DomainError when f <= 0.
    void validate() const;

    /// Copy with f21 replaced so that the integrability defect vanishes.
    FramePointData projected_to_integrable() const;
};

using OneForm = std::array<double, 3>;
using TwoForm = std::array<double, 3>;

/// Levi-Civita connection 1-forms theta^i_j. Only the upper triangle is stored;
/// the rest follows from skew-symmetry.
struct ConnectionCoefficients {
    OneForm theta12{};
    OneForm theta13{};
    OneForm theta23{};

    /// theta^i_j for 0-based i, j (zero on the diagonal, negated below it).
    OneForm component(int i, int j) const;
};

/// Curvature 2-forms Omega^i_j, upper triangle stored.
struct CurvatureComponents {
    TwoForm omega12{};
    TwoForm omega13{};
    TwoForm omega23{};

    TwoForm component(int i, int j) const;

    /// Omega^i_j(e_a, e_b) for 0-based indices.
    double evaluate(int i, int j, int a, int b) const;
};

/// Ricci components R_lk = Ric(e_l, e_k) in the adapted orthonormal frame.
using RicciMatrix = Eigen::Matrix3d;

ConnectionCoefficients levi_civita(const FramePointData& p);

CurvatureComponents curvature_form(const FramePointData& p);

/// Componentwise Ricci formulas. R12 and R21 are evaluated from their own
/// expressions, so a non-integrable input yields an asymmetric matrix.
RicciMatrix ricci(const FramePointData& p);

/// Trace of ricci(p), summed in index order.
double scalar_curvature(const FramePointData& p);

/// Ricci tensor for constant f and a Yang-Mills connection:
/// diag(K - f^2 c^2 / 2, K - f^2 c^2 / 2, f^2 c^2 / 2).
RicciMatrix ricci_yang_mills(double k_tilde, double f, double c);

/// Ricci via the contraction R_lk = sum_m Omega^k_m(e_l, e_m) of curvature_form(p).
/// Independent of the closed-form componentwise expressions in ricci().
RicciMatrix ricci_from_curvature(const CurvatureComponents& omega);

} // namespace s1flow
