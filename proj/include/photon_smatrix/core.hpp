// core.hpp - scatterer model, error codes and tolerances shared by every module.
//
// Conventions: hbar = v_g = 1, so photon momentum and energy coincide and all
// quantities are measured in the same (user chosen) energy unit.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psm {

template <std::floating_point Real>
using Complex = std::complex<Real>;

template <std::floating_point Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <std::floating_point Real>
using ComplexVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <std::floating_point Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// ------------------------------------------------------------------ errors

enum class ErrorCode {
    ValidationError,
    SingularResolvent,
    PoleAtLevel,
    GuardBand,
    ChiralityMismatch,
    KindMismatch,
    EigenFailure,
    RootQuality,
    DarkState,
    Unconverged,
    OnshellViolation,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ValidationError: return "VALIDATION_ERROR";
        case ErrorCode::SingularResolvent: return "SINGULAR_RESOLVENT";
        case ErrorCode::PoleAtLevel: return "POLE_AT_LEVEL";
        case ErrorCode::GuardBand: return "GUARD_BAND";
        case ErrorCode::ChiralityMismatch: return "CHIRALITY_MISMATCH";
        case ErrorCode::KindMismatch: return "KIND_MISMATCH";
        case ErrorCode::EigenFailure: return "EIGEN_FAILURE";
        case ErrorCode::RootQuality: return "ROOT_QUALITY";
        case ErrorCode::DarkState: return "DARK_STATE";
        case ErrorCode::Unconverged: return "UNCONVERGED";
        case ErrorCode::OnshellViolation: return "ONSHELL_VIOLATION";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// -------------------------------------------------------------- tolerances

// The tolerance ladder. Energies are in the caller's reference unit.
namespace tol {
// Exclusion zone around each level for the alpha/beta based formulas.
inline constexpr double guard_band = 1e-6;
// CRIT root residual |alpha(root)| and imaginary-part truncation.
inline constexpr double root = 1e-9;
// Physics identities that hold exactly in exact arithmetic.
inline constexpr double exact = 1e-12;
// Dark-state threshold on -Im(lambda) for the time-domain oracle.
inline constexpr double dark_state = 1e-3;
}  // namespace tol

// --------------------------------------------------------------- scatterer

enum class ScattererKind { VAtom, Two2LS };
enum class Chirality { Chiral, NonChiral };

constexpr std::string_view to_string(ScattererKind kind) noexcept {
    return kind == ScattererKind::VAtom ? "v_atom" : "two_2ls";
}
constexpr std::string_view to_string(Chirality c) noexcept {
    return c == Chirality::Chiral ? "chiral" : "nonchiral";
}

/// Point-like scatterer with one ground state and N excited levels.
///
/// `gammas` are the decay rates of the declared chirality. For a non-chiral
/// waveguide these are the full non-chiral rates and are fed unchanged into
/// the chiral kernels (the auxiliary symmetric channel carries the same rate);
/// no factor of two is ever applied internally.
template <std::floating_point Real>
struct Scatterer {
    ScattererKind kind = ScattererKind::VAtom;
    RealVector<Real> deltas;
    RealVector<Real> gammas;
    Chirality chirality = Chirality::NonChiral;

    Eigen::Index size() const noexcept { return deltas.size(); }

    static Scatterer v_atom(std::vector<Real> d, std::vector<Real> g,
                            Chirality c = Chirality::NonChiral) {
        return make(ScattererKind::VAtom, d, g, c);
    }
    static Scatterer two_2ls(std::vector<Real> d, std::vector<Real> g,
                             Chirality c = Chirality::NonChiral) {
        return make(ScattererKind::Two2LS, d, g, c);
    }
    static Scatterer make(ScattererKind kind, const std::vector<Real>& d,
                          const std::vector<Real>& g, Chirality c) {
        Scatterer s;
        s.kind = kind;
        s.deltas = Eigen::Map<const RealVector<Real>>(d.data(), static_cast<Eigen::Index>(d.size()));
        s.gammas = Eigen::Map<const RealVector<Real>>(g.data(), static_cast<Eigen::Index>(g.size()));
        s.chirality = c;
        return s;
    }

    bool operator==(const Scatterer& o) const {
        return kind == o.kind && chirality == o.chirality && deltas.size() == o.deltas.size() &&
               gammas.size() == o.gammas.size() && deltas == o.deltas && gammas == o.gammas;
    }
};

/// Throws ErrorCode::ValidationError naming the first violated invariant.
template <std::floating_point Real>
void validate(const Scatterer<Real>& s) {
    using std::isfinite;
    if (s.deltas.size() < 1) {
        throw Error(ErrorCode::ValidationError, "N >= 1 required");
    }
    if (s.deltas.size() != s.gammas.size()) {
        throw Error(ErrorCode::ValidationError, "deltas and gammas must have equal length");
    }
    for (Eigen::Index n = 0; n < s.size(); ++n) {
        if (!isfinite(s.deltas(n))) {
            throw Error(ErrorCode::ValidationError, "delta_" + std::to_string(n + 1) + " is not finite");
        }
        if (!(s.gammas(n) > Real(0)) || !isfinite(s.gammas(n))) {
            throw Error(ErrorCode::ValidationError, "gamma_" + std::to_string(n + 1) + " <= 0");
        }
    }
    if (s.kind == ScattererKind::Two2LS && s.size() != 2) {
        throw Error(ErrorCode::ValidationError, "TWO_2LS requires N=2");
    }
}

// ------------------------------------------------------------ two photons

/// On-shell two-photon configuration. The outgoing energy p2 is always
/// derived from energy conservation, so off-shell points are unrepresentable.
template <std::floating_point Real>
struct TwoPhotonPoint {
    Real k1{};
    Real k2{};
    Real p1{};

    constexpr Real p2() const noexcept { return k1 + k2 - p1; }
    constexpr Real total_energy() const noexcept { return k1 + k2; }

    /// Point from total energy and half-differences
    /// delta_k = (k1-k2)/2, delta_p = (p1-p2)/2.
    static constexpr TwoPhotonPoint from_detunings(Real delta_e, Real delta_k, Real delta_p) noexcept {
        return {delta_e / 2 + delta_k, delta_e / 2 - delta_k, delta_e / 2 + delta_p};
    }

    constexpr TwoPhotonPoint swap_outgoing() const noexcept { return {k1, k2, p2()}; }
    constexpr TwoPhotonPoint swap_incoming() const noexcept { return {k2, k1, p1}; }
    /// Exchanges the roles of incoming and outgoing photons.
    constexpr TwoPhotonPoint time_reversed() const noexcept { return {p1, p2(), k1}; }
};

}  // namespace psm
