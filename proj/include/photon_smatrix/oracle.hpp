// oracle.hpp - time-domain reference for the analytic amplitudes.
//
// The driven equations of motion i dx/dt = A x + f e^{-i w t} are integrated
// with fixed-step RK4 from x(0) = 0 until transients have decayed. The
// steady state, rotated back by e^{+i w t}, is (w - A)^{-1} f, obtained here
// without any linear solve. Delta-bearing forcings (which only feed the
// elastic part of the two-photon S-matrix) are not integrated.

#pragma once

#include "photon_smatrix/core.hpp"
#include "photon_smatrix/single_photon.hpp"
#include "photon_smatrix/two_photon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace psm {

enum class IntegratorScheme { RK4 };

template <std::floating_point Real>
struct IntegratorConfig {
    Real dt{};
    Real t_final{};
    IntegratorScheme scheme = IntegratorScheme::RK4;

    /// Step and horizon for a system with spectral radius `max_rate`,
    /// slowest decay `min_decay` and fastest drive `max_frequency`.
    static IntegratorConfig automatic(Real max_rate, Real min_decay, Real max_frequency) {
        IntegratorConfig cfg;
        cfg.dt = Real(0.02) / (max_rate + max_frequency);
        cfg.t_final = Real(30) / min_decay;
        return cfg;
    }

    void check(Real max_rate, Real min_decay, Real max_frequency) const {
        if (!(dt > 0) || !(dt * (max_rate + max_frequency) < Real(0.1))) {
            throw Error(ErrorCode::ValidationError, "dt*(max|lambda| + max drive) must be < 0.1");
        }
        if (!(t_final >= Real(20) / min_decay)) {
            throw Error(ErrorCode::ValidationError, "t_final must be >= 20/min decay rate");
        }
    }
};

template <std::floating_point Real>
struct ForcingVector {
    ComplexVector<Real> f12;
};

namespace detail {

template <std::floating_point Real>
struct Spectrum {
    Real max_rate{};
    Real min_decay{};
};

template <std::floating_point Real>
Spectrum<Real> oracle_spectrum(const Scatterer<Real>& s) {
    Spectrum<Real> sp{Real(0), std::numeric_limits<Real>::infinity()};
    for (const auto& lambda : poles(s)) {
        sp.max_rate = std::max(sp.max_rate, std::abs(lambda));
        sp.min_decay = std::min(sp.min_decay, -lambda.imag());
    }
    if (!(sp.min_decay > Real(tol::dark_state))) {
        throw Error(ErrorCode::DarkState, "A has an eigenvalue with -Im below the dark-state threshold");
    }
    return sp;
}

template <std::floating_point Real>
IntegratorConfig<Real> resolve_config(const std::optional<IntegratorConfig<Real>>& cfg, Real max_rate,
                                      Real min_decay, Real max_frequency) {
    IntegratorConfig<Real> out = cfg ? *cfg : IntegratorConfig<Real>::automatic(max_rate, min_decay, max_frequency);
    out.check(max_rate, min_decay, max_frequency);
    return out;
}

// Classic RK4 on dy/dt = rhs(t, y).
template <std::floating_point Real, typename Rhs>
void rk4_advance(Rhs& rhs, ComplexVector<Real>& y, Real& t, Real t_end, Real dt_max) {
    const Real span = t_end - t;
    if (span <= 0) return;
    const auto steps = static_cast<long long>(std::ceil(span / dt_max));
    const Real h = span / static_cast<Real>(steps);
    const Real t0 = t;
    ComplexVector<Real> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    for (long long n = 0; n < steps; ++n) {
        const Real tn = t0 + static_cast<Real>(n) * h;
        rhs(tn, y, k1);
        tmp = y + (h / 2) * k1;
        rhs(tn + h / 2, tmp, k2);
        tmp = y + (h / 2) * k2;
        rhs(tn + h / 2, tmp, k3);
        tmp = y + h * k3;
        rhs(tn + h, tmp, k4);
        y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    t = t_end;
}

// Integrates to t_final and returns the state rotated by e^{+i w t}. Checks
// that the rotated state no longer changes over one drive period.
template <std::floating_point Real, typename Rhs>
ComplexVector<Real> steady_state(Rhs rhs, Eigen::Index dim, Real omega, const IntegratorConfig<Real>& cfg,
                                 Eigen::Index compare_dim) {
    using C = Complex<Real>;
    const Real period = Real(2) * std::numbers::pi_v<Real> / std::max(std::abs(omega), Real(1));
    ComplexVector<Real> y = ComplexVector<Real>::Zero(dim);
    Real t = 0;
    rk4_advance<Real>(rhs, y, t, std::max(Real(0), cfg.t_final - period), cfg.dt);
    const ComplexVector<Real> earlier = y.head(compare_dim) * std::exp(C(0, omega * t));
    rk4_advance<Real>(rhs, y, t, cfg.t_final, cfg.dt);
    ComplexVector<Real> rotated = y.head(compare_dim) * std::exp(C(0, omega * t));
    if ((rotated - earlier).cwiseAbs().maxCoeff() > Real(1e-7)) {
        throw Error(ErrorCode::Unconverged, "rotated solution still changing after t_final");
    }
    return rotated;
}

}  // namespace detail

/// Time-integrated (omega - A)^{-1} f for an arbitrary forcing vector.
template <std::floating_point Real>
ComplexVector<Real> oracle_resolvent(const Scatterer<Real>& s, Real omega, const ComplexVector<Real>& f,
                                     std::optional<IntegratorConfig<Real>> cfg = std::nullopt) {
    using C = Complex<Real>;
    const auto sp = detail::oracle_spectrum(s);
    const auto conf = detail::resolve_config(cfg, sp.max_rate, sp.min_decay, std::abs(omega));
    const ComplexMatrix<Real> a = a_matrix(s);
    auto rhs = [&](Real t, const ComplexVector<Real>& y, ComplexVector<Real>& dy) {
        dy.noalias() = a * y;
        dy += f * std::exp(C(0, -omega * t));
        dy *= C(0, -1);
    };
    return detail::steady_state<Real>(rhs, s.size(), omega, conf, s.size());
}

/// Single-photon amplitudes s_k from the driven ladder-operator dynamics.
template <std::floating_point Real>
ComplexVector<Real> oracle_single(const Scatterer<Real>& s, Real k,
                                  std::optional<IntegratorConfig<Real>> cfg = std::nullopt) {
    const Real root_2pi = std::sqrt(Real(2) * std::numbers::pi_v<Real>);
    const ComplexVector<Real> drive = coupling_vector(s).template cast<Complex<Real>>() / root_2pi;
    return root_2pi * oracle_resolvent(s, k, drive, cfg);
}

/// Smooth part of the two-photon forcing of the V-atom ladder operators:
/// f12_n = -(1/2pi)[sqrt(2 gamma_n) s_{p1}^dagger (s_{k1}+s_{k2})
///                  + (sum_m sqrt(2 gamma_m) conj(s^m_{p1})) (s^n_{k1}+s^n_{k2})].
template <std::floating_point Real>
ForcingVector<Real> forcing_f12(const Scatterer<Real>& s, Real p1, Real k1, Real k2) {
    using C = Complex<Real>;
    const ComplexVector<Real> c = coupling_vector(s).template cast<C>();
    const ComplexVector<Real> sp1 = amplitudes_s(s, p1);
    const ComplexVector<Real> sk = amplitudes_s(s, k1) + amplitudes_s(s, k2);
    const Real inv_2pi = Real(1) / (Real(2) * std::numbers::pi_v<Real>);
    return {-inv_2pi * (c * sp1.dot(sk) + sk * sp1.dot(c))};
}

namespace detail {

template <std::floating_point Real>
void require_generic_outgoing(const TwoPhotonPoint<Real>& pt) {
    if (pt.p1 == pt.k1 || pt.p1 == pt.k2) {
        throw Error(ErrorCode::OnshellViolation, "p1 must differ from k1 and k2");
    }
}

// Two collocated 2LS: the doubly excited amplitude w obeys
// i dw/dt = (D1 + D2 - i(g1 + g2)) w + e^{-iEt}/(2pi) sum_m sqrt(2 gamma_mbar)(s^m_{k1}+s^m_{k2})
// and feeds the ladder equations through i sqrt(2g_n) sqrt(2g_nbar) conj(s^n_{p1}) e^{i p1 t} w / sqrt(2pi).
template <std::floating_point Real>
ComplexVector<Real> oracle_two2ls_amplitude(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt,
                                            const std::optional<IntegratorConfig<Real>>& cfg) {
    using C = Complex<Real>;
    const Real pi = std::numbers::pi_v<Real>;
    const Real root_2pi = std::sqrt(2 * pi);
    const auto sp = oracle_spectrum(s);
    const Real energy = pt.total_energy();
    const C collective(s.deltas(0) + s.deltas(1), -(s.gammas(0) + s.gammas(1)));
    const Real max_freq = std::max({std::abs(pt.p1), std::abs(pt.p2()), std::abs(energy)});
    const auto conf = resolve_config(cfg, std::max(sp.max_rate, std::abs(collective)), sp.min_decay, max_freq);

    const ComplexMatrix<Real> a = a_matrix(s);
    const RealVector<Real> c = coupling_vector(s);
    const ComplexVector<Real> sp1 = amplitudes_s(s, pt.p1);
    const ComplexVector<Real> sk = amplitudes_s(s, pt.k1) + amplitudes_s(s, pt.k2);
    const C w_drive = (c(1) * sk(0) + c(0) * sk(1)) / (2 * pi);
    ComplexVector<Real> direct(2), feed(2);
    for (Eigen::Index n = 0; n < 2; ++n) {
        direct(n) = -2 * c(n) / (2 * pi) * std::conj(sp1(n)) * sk(n);
        feed(n) = C(0, c(n) * c(1 - n)) * std::conj(sp1(n));
    }
    // State layout: (v_1, v_2, w).
    auto rhs = [&](Real t, const ComplexVector<Real>& y, ComplexVector<Real>& dy) {
        const C w = y(2);
        dy.head(2).noalias() = a * y.head(2);
        dy.head(2) += (direct * std::exp(C(0, -pt.p2() * t)) + feed * (std::exp(C(0, pt.p1 * t)) * w)) / root_2pi;
        dy(2) = collective * w + w_drive * std::exp(C(0, -energy * t));
        dy *= C(0, -1);
    };
    return root_2pi * steady_state<Real>(rhs, 3, pt.p2(), conf, 2);
}

}  // namespace detail

/// Chiral T from the time-integrated two-photon ladder dynamics,
/// T = -t_{p1} sum_n sqrt(2 gamma_n) u_n where u is the steady amplitude at p2.
/// V-atoms integrate the f12 forcing; two collocated 2LS also carry the
/// doubly excited amplitude.
template <std::floating_point Real>
Complex<Real> oracle_two_photon(const Scatterer<Real>& s, const TwoPhotonPoint<Real>& pt,
                                std::optional<IntegratorConfig<Real>> cfg = std::nullopt) {
    using C = Complex<Real>;
    validate(s);
    detail::require_generic_outgoing(pt);
    ComplexVector<Real> u;
    if (s.kind == ScattererKind::Two2LS) {
        u = detail::oracle_two2ls_amplitude(s, pt, cfg);
    } else {
        const Real root_2pi = std::sqrt(Real(2) * std::numbers::pi_v<Real>);
        const auto f = forcing_f12(s, pt.p1, pt.k1, pt.k2);
        u = root_2pi * oracle_resolvent<Real>(s, pt.p2(), f.f12 / root_2pi, cfg);
    }
    const ComplexVector<Real> c = coupling_vector(s).template cast<C>();
    return -t_chiral(s, pt.p1) * detail::bilinear(c, u);
}

}  // namespace psm
