// two_photon.hpp - smooth (fluorescence) coefficient T of the two-photon
// scattering matrix.
//
// The two-photon S-matrix splits into an elastic part t_{p1} t_{p2} carried by
// the delta pairings (p1=k1, p2=k2) and (p1=k2, p2=k1), and a connected part
// i T delta(p1 + p2 - k1 - k2). Only the smooth coefficients are ever
// represented; delta functions are not.
//
// Three independent analytic routes are provided for the V-atom:
//   t2_general     resolvent form, valid everywhere on the real axis
//   t2_simplified  manifestly symmetric alpha/beta form, guard-banded
//   t2_v2_closed   N = 2 closed form
// and t2_two2ls for two collocated two-level systems.

#pragma once

#include "photon_smatrix/core.hpp"
#include "photon_smatrix/parallel.hpp"
#include "photon_smatrix/single_photon.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace psm {

namespace detail {

template <std::floating_point Real>
void require_kind(const Scatterer<Real>& s, ScattererKind kind) {
    validate(s);
    if (s.kind != kind) {
        throw Error(ErrorCode::KindMismatch,
                    "operation requires kind " + std::string(to_string(kind)));
    }
}

template <std::floating_point Real>
void require_guard_band(const Scatterer<Real>& s, std::array<Real, 4> energies, Real guard) {
    for (Real e : energies) {
        for (Eigen::Index n = 0; n < s.size(); ++n) {
            if (std::abs(e - s.deltas(n)) <= guard) {
                throw Error(ErrorCode::GuardBand,
                            "energy within guard band of level " + std::to_string(n + 1));
            }
        }
    }
}

// Transpose product without conjugation.
template <std::floating_point Real>
Complex<Real> bilinear(const ComplexVector<Real>& a, const ComplexVector<Real>& b) {
    return a.cwiseProduct(b).sum();
}

}  // namespace detail

/// Resolvent form of T^c, valid for any on-shell point. Evaluates the V-atom
/// kernel whatever the scatterer kind; use t2_chiral for kind dispatch.
template <std::floating_point Real>
Complex<Real> t2_general(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    using C = Complex<Real>;
    const ComplexVector<Real> c = coupling_vector(s).template cast<C>();
    const ComplexVector<Real> sp1 = amplitudes_s(s, pt.p1);
    const ComplexVector<Real> sp2 = amplitudes_s(s, pt.p2());
    const ComplexVector<Real> sk = amplitudes_s(s, pt.k1) + amplitudes_s(s, pt.k2);
    const C tp1 = C(1) - C(0, 1) * detail::bilinear(c, sp1);

    // Eigen's dot() conjugates its left operand.
    const C first = detail::bilinear(c, sp2) * sp1.dot(sk);
    const C second = detail::bilinear(sp2, sk) * sp1.dot(c);
    return tp1 / (Real(2) * std::numbers::pi_v<Real>) * (first + second);
}

/// Symmetric alpha/beta form of T^c. Throws GUARD_BAND when any photon
/// energy lies within `guard` of a level.
template <std::floating_point Real>
Complex<Real> t2_simplified(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt,
                            Real guard = Real(tol::guard_band)) {
    using C = Complex<Real>;
    validate(s);
    const Real k1 = pt.k1, k2 = pt.k2, p1 = pt.p1, p2 = pt.p2();
    detail::require_guard_band(s, {k1, k2, p1, p2}, guard);

    const Real a_k1 = alpha(s, k1), a_k2 = alpha(s, k2);
    const Real a_p1 = alpha(s, p1), a_p2 = alpha(s, p2);
    const Real inc1 = a_p2 * beta(s, p1, k1) + a_p1 * beta(s, p2, k1);
    const Real inc2 = a_p2 * beta(s, p1, k2) + a_p1 * beta(s, p2, k2);
    const C prefactor = Real(2) / std::numbers::pi_v<Real> / (C(1, a_p1) * C(1, a_p2));
    return prefactor * (inc1 / C(1, a_k1) + inc2 / C(1, a_k2));
}

/// Closed-form single-photon amplitudes for N = 2:
/// s_k^n = sqrt(2 gamma_n)(k - Delta_nbar) / ((k-Delta_1+i gamma_1)(k-Delta_2+i gamma_2) + gamma_1 gamma_2).
template <std::floating_point Real>
std::array<Complex<Real>, 2> amplitudes_s_n2(const Scatterer<Real>& s, Real k) {
    using C = Complex<Real>;
    validate(s);
    if (s.size() != 2) throw Error(ErrorCode::KindMismatch, "closed form requires N=2");
    const Real d1 = s.deltas(0), d2 = s.deltas(1), g1 = s.gammas(0), g2 = s.gammas(1);
    const C denom = C(k - d1, g1) * C(k - d2, g2) + g1 * g2;
    return {std::sqrt(2 * g1) * (k - d2) / denom, std::sqrt(2 * g2) * (k - d1) / denom};
}

namespace detail {

template <std::floating_point Real>
struct N2Terms {
    std::array<Complex<Real>, 2> sp1, sp2, sk;  // sk = s_{k1} + s_{k2}
    std::array<Real, 2> root_gamma;
};

template <std::floating_point Real>
N2Terms<Real> n2_terms(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    N2Terms<Real> t;
    t.sp1 = amplitudes_s_n2(s, pt.p1);
    t.sp2 = amplitudes_s_n2(s, pt.p2());
    const auto a = amplitudes_s_n2(s, pt.k1);
    const auto b = amplitudes_s_n2(s, pt.k2);
    t.sk = {a[0] + b[0], a[1] + b[1]};
    t.root_gamma = {std::sqrt(s.gammas(0)), std::sqrt(s.gammas(1))};
    return t;
}

// (sqrt2/pi) sum_n sqrt(gamma_n) s^n_{p1} s^n_{p2} (s^n_{k1} + s^n_{k2}); shared by both kinds.
template <std::floating_point Real>
Complex<Real> n2_direct_term(const N2Terms<Real>& t) {
    const Real pref = std::numbers::sqrt2_v<Real> / std::numbers::pi_v<Real>;
    return pref * (t.root_gamma[0] * t.sp1[0] * t.sp2[0] * t.sk[0] +
                   t.root_gamma[1] * t.sp1[1] * t.sp2[1] * t.sk[1]);
}

// sum_m sqrt(gamma_mbar) (s^m_{k1} + s^m_{k2})
template <std::floating_point Real>
Complex<Real> n2_cross_drive(const N2Terms<Real>& t) {
    return t.root_gamma[1] * t.sk[0] + t.root_gamma[0] * t.sk[1];
}

}  // namespace detail

/// N = 2 V-atom closed form, direct plus cross contribution.
template <std::floating_point Real>
Complex<Real> t2_v2_closed(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    detail::require_kind(s, ScattererKind::VAtom);
    if (s.size() != 2) throw Error(ErrorCode::KindMismatch, "closed form requires N=2");
    const auto t = detail::n2_terms(s, pt);
    const Real pref = Real(1) / (std::numbers::sqrt2_v<Real> * std::numbers::pi_v<Real>);
    const auto cross = pref * (t.sp1[0] * t.sp2[1] + t.sp1[1] * t.sp2[0]) * detail::n2_cross_drive(t);
    return detail::n2_direct_term(t) + cross;
}

/// Cross contribution for two collocated two-level systems. It carries the
/// collective two-photon pole at k1 + k2 = Delta_1 + Delta_2 - i(gamma_1 + gamma_2).
template <std::floating_point Real>
Complex<Real> t2_two2ls_cross(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    using C = Complex<Real>;
    detail::require_kind(s, ScattererKind::Two2LS);
    const auto t = detail::n2_terms(s, pt);
    const Real g1 = s.gammas(0), g2 = s.gammas(1);
    const C collective = std::sqrt(g1 * g2) /
                         C(pt.total_energy() - s.deltas(0) - s.deltas(1), g1 + g2);
    // Prefactor -i sqrt2/pi: the doubly excited amplitude enters through
    // sqrt(2 gamma_1) sqrt(2 gamma_2) = 2 sqrt(gamma_1 gamma_2).
    const C pref(0, -std::numbers::sqrt2_v<Real> / std::numbers::pi_v<Real>);
    return pref * (t.sp1[0] * t.sp2[0] + t.sp1[1] * t.sp2[1]) * detail::n2_cross_drive(t) * collective;
}

template <std::floating_point Real>
Complex<Real> t2_two2ls(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    detail::require_kind(s, ScattererKind::Two2LS);
    return detail::n2_direct_term(detail::n2_terms(s, pt)) + t2_two2ls_cross(s, pt);
}

/// Chiral T for the scatterer's actual level structure.
template <std::floating_point Real>
Complex<Real> t2_chiral(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    validate(s);
    return s.kind == ScattererKind::Two2LS ? t2_two2ls(s, pt) : t2_general(s, pt);
}

// ------------------------------------------------------------- non-chiral

enum class Direction { Right, Left };

/// Non-chiral T for two right-moving incoming photons. Photons are labelled
/// by energy (measured from the linearisation point) and direction; the value
/// is T^c / 4 for every outgoing direction pair.
template <std::floating_point Real>
Complex<Real> t2_nonchiral(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt,
                           Direction /*out1*/ = Direction::Right,
                           Direction /*out2*/ = Direction::Right) {
    detail::require_nonchiral(s);
    return t2_chiral(s, pt) / Real(4);
}

/// Signed-momentum form: T = T^c(|p1|, |p2|, k1, k2) / 4 with k1, k2 >= 0,
/// where the sign of p encodes the outgoing direction.
template <std::floating_point Real>
Complex<Real> t2_nonchiral_momenta(const Scatterer<Real>& s, Real k1, Real k2, Real p1, Real p2) {
    detail::require_nonchiral(s);
    if (k1 < 0 || k2 < 0) {
        throw Error(ErrorCode::ValidationError, "incoming momenta must be non-negative");
    }
    const Real scale = std::max({Real(1), k1 + k2, std::abs(p1) + std::abs(p2)});
    if (std::abs(std::abs(p1) + std::abs(p2) - k1 - k2) > Real(tol::exact) * scale) {
        throw Error(ErrorCode::OnshellViolation, "|p1| + |p2| != k1 + k2");
    }
    return t2_chiral(s, TwoPhotonPoint<Real>{k1, k2, std::abs(p1)}) / Real(4);
}

// ----------------------------------------------------------------- results

template <std::floating_point Real>
struct TwoPhotonResult {
    Complex<Real> T;
    // Elastic coefficient on the supports p1=k1,p2=k2 and p1=k2,p2=k1.
    Complex<Real> elastic_direct;
    Complex<Real> elastic_exchange;
};

/// Chiral two-photon result for the scatterer's level structure.
template <std::floating_point Real>
TwoPhotonResult<Real> two_photon(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt) {
    const Complex<Real> tk1 = t_chiral(s, pt.k1), tk2 = t_chiral(s, pt.k2);
    return {t2_chiral(s, pt), tk1 * tk2, tk2 * tk1};
}

// -------------------------------------------------------------------- maps

template <std::floating_point Real>
struct FluorescenceMap {
    Real delta_e{};
    std::vector<Real> grid_dk;
    std::vector<Real> grid_dp;
    // Rows index delta_p, columns delta_k.
    ComplexMatrix<Real> values;

    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> intensity() const {
        return values.cwiseAbs2();
    }
};

/// Non-chiral T over a (delta_k, delta_p) grid at fixed total energy.
template <std::floating_point Real>
FluorescenceMap<Real> fluorescence_map(const Scatterer<Real>& s, Real delta_e,
                                       const std::vector<Real>& dk_grid,
                                       const std::vector<Real>& dp_grid, unsigned threads = 1) {
    detail::require_nonchiral(s);
    validate(s);
    FluorescenceMap<Real> map{delta_e, dk_grid, dp_grid,
                              ComplexMatrix<Real>(static_cast<Eigen::Index>(dp_grid.size()),
                                                  static_cast<Eigen::Index>(dk_grid.size()))};
    const std::size_t cols = dk_grid.size();
    parallel_for(dp_grid.size() * cols, threads, [&](std::size_t idx) {
        const std::size_t i = idx / cols, j = idx % cols;
        const auto pt = TwoPhotonPoint<Real>::from_detunings(delta_e, dk_grid[j], dp_grid[i]);
        map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t2_nonchiral(s, pt);
    });
    return map;
}

}  // namespace psm
