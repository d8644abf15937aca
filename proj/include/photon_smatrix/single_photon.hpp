// single_photon.hpp - one-photon amplitudes, transmission/reflection and the
// scattering poles of the effective non-Hermitian matrix A.

#pragma once

#include "photon_smatrix/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace psm {

/// A_nm = Delta_n delta_nm - i sqrt(gamma_n gamma_m).
template <std::floating_point Real>
ComplexMatrix<Real> a_matrix(const Scatterer<Real>& s) {
    validate(s);
    const RealVector<Real> w = s.gammas.cwiseSqrt();
    ComplexMatrix<Real> a = Complex<Real>(0, -1) * (w * w.transpose()).template cast<Complex<Real>>();
    a.diagonal() += s.deltas.template cast<Complex<Real>>();
    return a;
}

/// Coupling vector with entries sqrt(2 gamma_n).
template <std::floating_point Real>
RealVector<Real> coupling_vector(const Scatterer<Real>& s) {
    return (Real(2) * s.gammas).cwiseSqrt();
}

/// s_k^n = sum_m sqrt(2 gamma_m) [(k - A)^{-1}]_nm, by a dense LU solve.
/// Exactly on a degenerate level the coupling vector still lies in the range
/// of k - A and the minimum-norm solution is returned.
///
/// Accepts complex k for the analytic continuation towards the poles.
template <std::floating_point Real>
ComplexVector<Real> amplitudes_s(const Scatterer<Real>& s, Complex<Real> k) {
    ComplexMatrix<Real> shifted = -a_matrix(s);
    shifted.diagonal().array() += k;
    const ComplexVector<Real> c = coupling_vector(s).template cast<Complex<Real>>();
    const Eigen::PartialPivLU<ComplexMatrix<Real>> lu(shifted);
    if (lu.rcond() > std::numeric_limits<Real>::epsilon()) return lu.solve(c);

    // Degenerate levels leave dark directions that c never excites; the
    // minimum-norm solution is then the continuous limit in k.
    const Eigen::CompleteOrthogonalDecomposition<ComplexMatrix<Real>> cod(shifted);
    ComplexVector<Real> x = cod.solve(c);
    if (!((shifted * x - c).norm() <= std::sqrt(std::numeric_limits<Real>::epsilon()) * c.norm())) {
        throw Error(ErrorCode::SingularResolvent, "k - A is numerically singular");
    }
    return x;
}

template <std::floating_point Real>
ComplexVector<Real> amplitudes_s(const Scatterer<Real>& s, Real k) {
    return amplitudes_s(s, Complex<Real>(k, 0));
}

namespace detail {
template <std::floating_point Real>
void require_off_levels(const Scatterer<Real>& s, Real k) {
    for (Eigen::Index n = 0; n < s.size(); ++n) {
        if (k == s.deltas(n)) {
            throw Error(ErrorCode::PoleAtLevel, "energy coincides with level " + std::to_string(n + 1));
        }
    }
}
}  // namespace detail

/// alpha_k = sum_n gamma_n / (k - Delta_n).
template <std::floating_point Real>
Real alpha(const Scatterer<Real>& s, Real k) {
    validate(s);
    detail::require_off_levels(s, k);
    return (s.gammas.array() / (k - s.deltas.array())).sum();
}

/// d(alpha)/dk = -sum_n gamma_n / (k - Delta_n)^2.
template <std::floating_point Real>
Real alpha_derivative(const Scatterer<Real>& s, Real k) {
    validate(s);
    detail::require_off_levels(s, k);
    return -(s.gammas.array() / (k - s.deltas.array()).square()).sum();
}

/// beta_kp = sum_n gamma_n / ((k - Delta_n)(p - Delta_n)).
template <std::floating_point Real>
Real beta(const Scatterer<Real>& s, Real k, Real p) {
    validate(s);
    detail::require_off_levels(s, k);
    detail::require_off_levels(s, p);
    return (s.gammas.array() / ((k - s.deltas.array()) * (p - s.deltas.array()))).sum();
}

/// Chiral transmission t^c = 1 - i sum_n sqrt(2 gamma_n) s_k^n. Regular on
/// the whole real axis, including k = Delta_n.
template <std::floating_point Real>
Complex<Real> t_chiral(const Scatterer<Real>& s, Real k) {
    const ComplexVector<Real> amp = amplitudes_s(s, k);
    return Complex<Real>(1) -
           Complex<Real>(0, 1) * coupling_vector(s).template cast<Complex<Real>>().dot(amp);
}

/// Same quantity as the phase (1 - i alpha)/(1 + i alpha); removable
/// singularities at the levels, so only meant as a cross-check.
template <std::floating_point Real>
Complex<Real> t_chiral_alpha(const Scatterer<Real>& s, Real k) {
    const Real a = alpha(s, k);
    return Complex<Real>(1, -a) / Complex<Real>(1, a);
}

namespace detail {
template <std::floating_point Real>
void require_nonchiral(const Scatterer<Real>& s) {
    if (s.chirality != Chirality::NonChiral) {
        throw Error(ErrorCode::ChiralityMismatch, "operation requires a NONCHIRAL scatterer");
    }
}
}  // namespace detail

template <std::floating_point Real>
Complex<Real> t_nonchiral(const Scatterer<Real>& s, Real k) {
    detail::require_nonchiral(s);
    return (t_chiral(s, k) + Real(1)) / Real(2);
}

template <std::floating_point Real>
Complex<Real> r_nonchiral(const Scatterer<Real>& s, Real k) {
    detail::require_nonchiral(s);
    return (t_chiral(s, k) - Real(1)) / Real(2);
}

template <std::floating_point Real>
struct SingleAmplitudes {
    ComplexVector<Real> s;
    std::optional<Real> alpha;  // empty exactly at a level energy
    Complex<Real> t_chiral;
    std::optional<Complex<Real>> t;  // non-chiral, only for NONCHIRAL scatterers
    std::optional<Complex<Real>> r;
};

template <std::floating_point Real>
SingleAmplitudes<Real> single_amplitudes(const Scatterer<Real>& sc, Real k) {
    SingleAmplitudes<Real> out;
    out.s = amplitudes_s(sc, k);
    out.t_chiral = Complex<Real>(1) -
                   Complex<Real>(0, 1) * coupling_vector(sc).template cast<Complex<Real>>().dot(out.s);
    if ((sc.deltas.array() != k).all()) {
        out.alpha = alpha(sc, k);
    }
    if (sc.chirality == Chirality::NonChiral) {
        out.t = (out.t_chiral + Real(1)) / Real(2);
        out.r = *out.t - Real(1);
    }
    return out;
}

/// Orders complex numbers by real part, then imaginary part.
template <std::floating_point Real>
bool pole_less(const Complex<Real>& a, const Complex<Real>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

/// Eigenvalues of A, which are the poles of s_k continued to complex k.
template <std::floating_point Real>
std::vector<Complex<Real>> poles(const Scatterer<Real>& s) {
    const Eigen::ComplexEigenSolver<ComplexMatrix<Real>> solver(a_matrix(s), false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::EigenFailure, "eigenvalues of A did not converge");
    }
    std::vector<Complex<Real>> out(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(out.begin(), out.end(), pole_less<Real>);
    return out;
}

}  // namespace psm
