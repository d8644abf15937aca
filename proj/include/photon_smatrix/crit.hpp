// crit.hpp - coupled-resonator-induced transparency (CRIT).
//
// A photon of energy k is perfectly transmitted when alpha_k = 0. Clearing
// denominators gives the polynomial sum_j g_j prod_{l != j} (k - D_l) over the
// distinct levels D_l with merged rates g_j. Its roots interlace the levels.

#pragma once

#include "photon_smatrix/core.hpp"
#include "photon_smatrix/single_photon.hpp"
#include "photon_smatrix/two_photon.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace psm {

namespace detail {

// Distinct level energies (ascending) with summed decay rates.
template <std::floating_point Real>
std::pair<std::vector<Real>, std::vector<Real>> merged_levels(const Scatterer<Real>& s) {
    std::map<Real, Real> merged;
    for (Eigen::Index n = 0; n < s.size(); ++n) merged[s.deltas(n)] += s.gammas(n);
    std::pair<std::vector<Real>, std::vector<Real>> out;
    for (const auto& [d, g] : merged) {
        out.first.push_back(d);
        out.second.push_back(g);
    }
    return out;
}

// Ascending coefficients of prod (k - r).
template <std::floating_point Real>
std::vector<Real> poly_from_roots(const std::vector<Real>& roots) {
    std::vector<Real> c{Real(1)};
    for (Real r : roots) {
        std::vector<Real> next(c.size() + 1, Real(0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    return c;
}

// Parlett-Reinsch balancing with radix-2 scalings (exact in floating point).
template <std::floating_point Real>
void balance(Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>& m) {
    const Eigen::Index n = m.rows();
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Real col = m.col(i).cwiseAbs().sum() - std::abs(m(i, i));
            const Real row = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
            if (col == 0 || row == 0) continue;
            const Real total = col + row;
            Real c = col, f = 1;
            while (c < row / 2) {
                f *= 2;
                c *= 4;
            }
            while (c > row * 2) {
                f /= 2;
                c /= 4;
            }
            if ((c + row) / f < Real(0.95) * total) {
                converged = false;
                m.row(i) /= f;
                m.col(i) *= f;
            }
        }
    }
}

}  // namespace detail

/// Ascending real coefficients of the CRIT polynomial. Degree is one less
/// than the number of distinct levels; empty when there is a single distinct
/// level (no transparency point exists).
template <std::floating_point Real>
std::vector<Real> crit_polynomial(const Scatterer<Real>& s) {
    validate(s);
    const auto [levels, rates] = detail::merged_levels(s);
    if (levels.size() < 2) return {};
    std::vector<Real> total(levels.size(), Real(0));
    for (std::size_t j = 0; j < levels.size(); ++j) {
        std::vector<Real> others;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (l != j) others.push_back(levels[l]);
        }
        const auto term = detail::poly_from_roots(others);
        for (std::size_t i = 0; i < term.size(); ++i) total[i] += rates[j] * term[i];
    }
    return total;
}

template <std::floating_point Real>
struct CritSet {
    std::vector<Real> roots;      // ascending
    std::vector<Real> residuals;  // |alpha(root)|
};

/// Real CRIT roots from the eigenvalues of the balanced companion matrix of
/// the monic polynomial, each polished by Newton steps on alpha while the
/// residual keeps decreasing.
template <std::floating_point Real>
CritSet<Real> crit_roots(const Scatterer<Real>& s) {
    using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    const std::vector<Real> coeffs = crit_polynomial(s);
    const std::vector<Real> levels = detail::merged_levels(s).first;
    CritSet<Real> out;
    if (coeffs.size() < 2) return out;

    const auto degree = static_cast<Eigen::Index>(coeffs.size() - 1);
    Matrix companion = Matrix::Zero(degree, degree);
    for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1;
    for (Eigen::Index i = 0; i < degree; ++i) {
        companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
    }
    detail::balance(companion);

    const Eigen::EigenSolver<Matrix> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::EigenFailure, "companion eigenvalues did not converge");
    }
    for (const auto& ev : solver.eigenvalues()) {
        if (std::abs(ev.imag()) > Real(tol::root)) {
            throw Error(ErrorCode::RootQuality, "complex CRIT root encountered");
        }
        Real k = ev.real();
        // Newton steps must stay between the levels that bracket the root.
        const auto upper = std::upper_bound(levels.begin(), levels.end(), k);
        const Real hi = upper == levels.end() ? std::numeric_limits<Real>::infinity() : *upper;
        const Real lo = upper == levels.begin() ? -std::numeric_limits<Real>::infinity() : *(upper - 1);
        Real residual = std::abs(alpha(s, k));
        for (int it = 0; it < 8 && residual > 0; ++it) {
            const Real next = k - alpha(s, k) / alpha_derivative(s, k);
            if (!(next > lo && next < hi)) break;
            const Real next_residual = std::abs(alpha(s, next));
            if (!(next_residual < residual)) break;
            k = next;
            residual = next_residual;
        }
        out.roots.push_back(k);
    }
    std::sort(out.roots.begin(), out.roots.end());
    for (Real k : out.roots) {
        const Real residual = std::abs(alpha(s, k));
        if (!(residual < Real(tol::root))) {
            throw Error(ErrorCode::RootQuality, "CRIT root residual " + std::to_string(double(residual)));
        }
        out.residuals.push_back(residual);
    }
    return out;
}

template <std::floating_point Real>
struct SingleCritReport {
    bool passed = false;
    Real t_deviation{};  // |t - 1|
    Real r_magnitude{};  // |r|
};

/// Checks perfect non-chiral transmission at `root`.
template <std::floating_point Real>
SingleCritReport<Real> verify_single_crit(const Scatterer<Real>& s, Real root) {
    detail::require_nonchiral(s);
    SingleCritReport<Real> rep;
    rep.t_deviation = std::abs(t_nonchiral(s, root) - Real(1));
    rep.r_magnitude = std::abs(r_nonchiral(s, root));
    rep.passed = rep.t_deviation < Real(tol::root) && rep.r_magnitude < Real(tol::root);
    return rep;
}

template <std::floating_point Real>
struct TwoPhotonCritReport {
    bool passed = false;
    Real max_incoming{};  // max |T| with k1, k2 at the roots, p1 sampled
    Real max_outgoing{};  // max |T| with p1, p2 at the roots, k1 sampled
};

/// Two-photon quench check: with both incoming (or both outgoing) photons at
/// CRIT roots, the chiral T must vanish for every sampled free energy.
template <std::floating_point Real>
TwoPhotonCritReport<Real> verify_two_photon_crit(const Scatterer<Real>& s, Real root_i, Real root_j,
                                                 const std::vector<Real>& samples) {
    validate(s);
    TwoPhotonCritReport<Real> rep;
    for (Real x : samples) {
        rep.max_incoming = std::max(rep.max_incoming, std::abs(t2_chiral(s, TwoPhotonPoint<Real>{root_i, root_j, x})));
        rep.max_outgoing = std::max(
            rep.max_outgoing, std::abs(t2_chiral(s, TwoPhotonPoint<Real>{x, root_i + root_j - x, root_i})));
    }
    rep.passed = rep.max_incoming < Real(tol::root) && rep.max_outgoing < Real(tol::root);
    return rep;
}

template <std::floating_point Real>
struct QuenchRow {
    Real gamma1{};
    Real k_crit{};
    Real abs_t2_v{};    // |T_kkkk|^2, V-atom, non-chiral
    Real abs_t2_2ls{};  // same for two collocated 2LS
};

/// |T_kkkk|^2 at k = k_CRIT for Delta_1 = -Delta_2 = delta as gamma_1 varies.
template <std::floating_point Real>
std::vector<QuenchRow<Real>> quench_scan(const std::vector<Real>& gamma1_grid, Real gamma2, Real delta) {
    std::vector<QuenchRow<Real>> rows;
    rows.reserve(gamma1_grid.size());
    for (Real g1 : gamma1_grid) {
        const auto v = Scatterer<Real>::v_atom({delta, -delta}, {g1, gamma2});
        const auto two = Scatterer<Real>::two_2ls({delta, -delta}, {g1, gamma2});
        const auto crit = crit_roots(v);
        if (crit.roots.size() != 1) {
            throw Error(ErrorCode::RootQuality, "expected a single CRIT root for N=2");
        }
        const Real k = crit.roots.front();
        const TwoPhotonPoint<Real> pt{k, k, k};
        rows.push_back({g1, k, std::norm(t2_nonchiral(v, pt)), std::norm(t2_nonchiral(two, pt))});
    }
    return rows;
}

}  // namespace psm
