// mub.hpp — closed forms for the mutually-unbiased-bases family: Fourier MUB
// generation, the G-norm, case classification, the rank-one-pair spectral
// decomposition, prior/post guessing probabilities, optimal margins, the tight
// witness, the compatibility boundary curve and region membership.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "iwit/ensemble.hpp"
#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"

namespace iwit {

/// Two mutually unbiased orthonormal bases: |<phi_h|psi_k>|^2 = 1/d for all h, k.
struct MubPair {
    Basis phi;
    Basis psi;
    int dim = 0;
};

enum class CaseLabel { C1, C2, C3 };

inline std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::C1: return "C1";
        case CaseLabel::C2: return "C2";
        default: return "C3";
    }
}

/// Smearing parameters (gamma_phi, gamma_psi) of a noisy MUB measurement pair.
struct SmearingVector {
    double gamma_phi = 0.0;
    double gamma_psi = 0.0;
};

inline void check_gamma_range(const SmearingVector& g, int d) {
    const double lo = 1.0 / (1.0 - d);
    if (g.gamma_phi < lo - 1e-12 || g.gamma_phi > 1.0 + 1e-12 || g.gamma_psi < lo - 1e-12 ||
        g.gamma_psi > 1.0 + 1e-12)
        throw GammaOutOfRange("gamma components must lie in [1/(1-d), 1]");
}

/// Computational basis paired with its discrete Fourier conjugate.
inline MubPair fourier_mub(int d) {
    if (d < 2) throw DimensionMismatch("need dimension d >= 2");
    Basis phi(d, Ket::Zero(d)), psi(d, Ket::Zero(d));
    for (int h = 0; h < d; ++h) {
        Ket e = Ket::Zero(d);
        e(h) = 1.0;
        phi[h] = e;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < d; ++k) {
        Ket v(d);
        for (int h = 0; h < d; ++h)
            v(h) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), two_pi * h * k / d);
        psi[k] = v;
    }
    return MubPair{std::move(phi), std::move(psi), d};
}

inline MubPair validate_mub(Basis phi, Basis psi) {
    check_mutually_unbiased(phi, psi);
    const int d = static_cast<int>(phi.size());
    return MubPair{std::move(phi), std::move(psi), d};
}

/// ||(q,p)||_G = sqrt(q^2 + p^2 - 2 (1 - 2/d) q p); the quadratic form that
/// governs the spectra of rank-one-projector combinations. Euclidean at d = 2.
inline double gnorm(double q, double p, int d) {
    const double delta = 1.0 - 2.0 / d;
    return std::sqrt(q * q + p * p - 2.0 * delta * q * p);
}

inline double gnorm(const NoiseVector& mu, int d) { return gnorm(mu.mu_phi, mu.mu_psi, d); }

/// Case split of the MUB family. The zero test is exact at 1e-12: callers
/// wanting a fuzzier classification must snap their inputs first.
inline CaseLabel classify_case(int d, const NoiseVector& mu) {
    check_mu_range(mu, d);
    if (mu.is_trivial()) throw TrivialMu("mu = (0,0) yields the trivial ensemble");
    constexpr double zero_tol = 1e-12;
    const double top = std::max(mu.mu_phi, mu.mu_psi);
    if (d == 2 || top > zero_tol) return CaseLabel::C1;
    if (top < -zero_tol) return CaseLabel::C2;
    return CaseLabel::C3;
}

/// Spectral data of S = q|phi><phi| + p|psi><psi| for two unit vectors with
/// |<phi|psi>|^2 = 1/d: eigenvalues (q+p)/2 +- ||(q,p)||_G / 2 with rank-1
/// projectors, plus the rank-(d-2) kernel projector.
struct RankOnePairSpectrum {
    double lam_plus = 0.0;
    double lam_minus = 0.0;
    HermitianOperator pi_plus;
    HermitianOperator pi_minus;
    HermitianOperator pi_zero;
};

inline RankOnePairSpectrum rank_one_pair_spectrum(double q, double p, const Ket& phi,
                                                  const Ket& psi) {
    if (q == 0.0 && p == 0.0) throw DegenerateInput("(q, p) = (0, 0)");
    const int d = static_cast<int>(phi.size());
    if (static_cast<int>(psi.size()) != d) throw DimensionMismatch("kets of different length");
    if (std::abs(phi.squaredNorm() - 1.0) > 1e-10 || std::abs(psi.squaredNorm() - 1.0) > 1e-10)
        throw DegenerateInput("kets must be unit vectors");
    if (std::abs(std::norm(phi.dot(psi)) - 1.0 / d) > 1e-9)
        throw NotMub("|<phi|psi>|^2 must equal 1/d");

    const Matrix qm = phi * phi.adjoint();
    const Matrix pm = psi * psi.adjoint();
    const Matrix s = q * qm + p * pm;
    const double g = gnorm(q, p, d);
    const double lam_plus = 0.5 * ((q + p) + g);
    const double lam_minus = 0.5 * ((q + p) - g);

    // Projection onto span{phi, psi}; equals the identity when d = 2.
    const Matrix pi1 =
        static_cast<double>(d) / (d - 1) * (qm + pm - (qm * pm + pm * qm));
    const Matrix pi_plus = (s - lam_minus * pi1) / (lam_plus - lam_minus);
    const Matrix pi_minus = (s - lam_plus * pi1) / (lam_minus - lam_plus);
    const Matrix pi_zero = Matrix::Identity(d, d) - pi1;
    return RankOnePairSpectrum{lam_plus, lam_minus, HermitianOperator(pi_plus),
                               HermitianOperator(pi_minus), HermitianOperator(pi_zero)};
}

/// Optimal premeasurement guessing probability for the MUB ensemble:
/// (1/4)[2 + |mu_phi| + |mu_psi| + (1 - 2/d)(mu_phi + mu_psi - 2)].
inline double p_prior_mub(int d, const NoiseVector& mu) {
    check_mu_range(mu, d);
    return 0.25 * (2.0 + std::abs(mu.mu_phi) + std::abs(mu.mu_psi) +
                   (1.0 - 2.0 / d) * (mu.mu_phi + mu.mu_psi - 2.0));
}

/// Optimal postmeasurement guessing probability for the MUB ensemble.
inline double p_post_mub(int d, const NoiseVector& mu) {
    const CaseLabel c = classify_case(d, mu);
    if (c == CaseLabel::C1)
        return 0.25 * ((1.0 - 2.0 / d) * (mu.mu_phi + mu.mu_psi) + 4.0 / d + gnorm(mu, d));
    return (2.0 - (mu.mu_phi + mu.mu_psi)) / (2.0 * d);
}

/// The constant nu of the analytic optimal measurement: d, d(d-2), d(d-1) in
/// cases C1, C2, C3.
inline int mub_nu(int d, const NoiseVector& mu) {
    switch (classify_case(d, mu)) {
        case CaseLabel::C1: return d;
        case CaseLabel::C2: return d * (d - 2);
        default: return d * (d - 1);
    }
}

/// Smearing parameters of the margins of the optimal postmeasurement joint
/// measurement.
inline SmearingVector optimal_margins_mub(int d, const NoiseVector& mu) {
    const CaseLabel c = classify_case(d, mu);
    if (c == CaseLabel::C1) {
        const double g = gnorm(mu, d);
        auto gamma = [&](double mu_l, double mu_other) {
            return (d * mu_l - (d - 2.0) * (mu_other - g)) / (2.0 * (d - 1.0) * g);
        };
        return SmearingVector{gamma(mu.mu_phi, mu.mu_psi), gamma(mu.mu_psi, mu.mu_phi)};
    }
    constexpr double zero_tol = 1e-12;
    auto gamma = [&](double mu_l) {
        return std::abs(mu_l) <= zero_tol ? 0.0 : 1.0 / (1.0 - d);
    };
    return SmearingVector{gamma(mu.mu_phi), gamma(mu.mu_psi)};
}

/// True when the MUB ensemble yields a strict gap P_post < P_prior: both mu
/// components nonzero and (d = 2 or max{mu_phi, mu_psi} > 0).
inline bool mub_gap_exists(int d, const NoiseVector& mu) {
    constexpr double zero_tol = 1e-12;
    if (std::abs(mu.mu_phi) <= zero_tol || std::abs(mu.mu_psi) <= zero_tol) return false;
    return d == 2 || std::max(mu.mu_phi, mu.mu_psi) > zero_tol;
}

/// Constant term of the tight MUB witness: (1/4)(mu_phi + mu_psi + ||mu||_G).
inline double mub_witness_constant(int d, const NoiseVector& mu) {
    return 0.25 * (mu.mu_phi + mu.mu_psi + gnorm(mu, d));
}

/// Noisy MUB measurement pair with the canonical phi_j / psi_k outcome labels
/// used by mub_ensemble.
inline MeasurementPair noisy_mub_pair(const MubPair& mub, const SmearingVector& gamma) {
    check_gamma_range(gamma, mub.dim);
    std::vector<std::string> lx, ly;
    for (int j = 0; j < mub.dim; ++j) {
        lx.push_back(mub_label_phi(j));
        ly.push_back(mub_label_psi(j));
    }
    return MeasurementPair{noisy_basis_povm(mub.phi, gamma.gamma_phi, lx),
                           noisy_basis_povm(mub.psi, gamma.gamma_psi, ly)};
}

/// Value of the tight MUB witness on a measurement pair with the canonical
/// labels; negative iff the pair is detected as incompatible.
inline double mub_witness_value(const MubPair& mub, const NoiseVector& mu,
                                const MeasurementPair& pair) {
    check_mu_range(mu, mub.dim);
    if (!mub_gap_exists(mub.dim, mu))
        throw NoGapForMu("this mu produces no witness (P_prior = P_post)");
    const int d = mub.dim;
    double diag = 0.0;
    for (int j = 0; j < d; ++j) {
        const auto& a = pair.a.effect(mub_label_phi(j));
        const auto& b = pair.b.effect(mub_label_psi(j));
        diag += mu.mu_phi * (mub.phi[j].adjoint() * a.matrix() * mub.phi[j])(0).real();
        diag += mu.mu_psi * (mub.psi[j].adjoint() * b.matrix() * mub.psi[j])(0).real();
    }
    return mub_witness_constant(d, mu) - diag / (2.0 * d);
}

inline double mub_witness_value(int d, const NoiseVector& mu, const MeasurementPair& pair) {
    return mub_witness_value(fourier_mub(d), mu, pair);
}

/// theta_0 = pi - arctan sqrt(d-1); the boundary curve parameter range.
inline double theta0(int d) { return std::numbers::pi - std::atan(std::sqrt(d - 1.0)); }

/// Direction parameterization mu(theta) with the fixed scale 1/(d sqrt(d-1)),
/// chosen so that |mu_l(theta)| <= 1/(d-1) for all theta. ||mu(theta)||_G is
/// constant and equals 2/(d sqrt(d-1)).
inline NoiseVector mu_of_theta(int d, double theta) {
    const double alpha = 1.0 / (d * std::sqrt(d - 1.0));
    const double c = std::sqrt(static_cast<double>(d)) * std::cos(theta);
    const double s = std::sqrt(d / (d - 1.0)) * std::sin(theta);
    return NoiseVector{alpha * (c + s), alpha * (c - s)};
}

/// Point of the compatibility boundary curve at parameter theta in
/// [-theta_0, theta_0].
inline SmearingVector boundary_curve(int d, double theta) {
    const double t0 = theta0(d);
    if (std::abs(theta) > t0 + 1e-12)
        throw ThetaOutOfRange("theta outside [-theta_0, theta_0]");
    auto g = [&](double angle) { return (d - 2.0 - d * std::cos(angle)) / (2.0 * (d - 1.0)); };
    return SmearingVector{g(theta + t0), g(theta - t0)};
}

/// Left-hand side of the boundary ellipse
/// d(g_phi^2 + g_psi^2) + 2(d-2) g_phi g_psi - 2(d-2)(g_phi + g_psi).
inline double ellipse_form(int d, const SmearingVector& g) {
    return d * (g.gamma_phi * g.gamma_phi + g.gamma_psi * g.gamma_psi) +
           2.0 * (d - 2.0) * g.gamma_phi * g.gamma_psi -
           2.0 * (d - 2.0) * (g.gamma_phi + g.gamma_psi);
}

enum class RegionVerdict { Compatible, Boundary, Incompatible };

inline std::string to_string(RegionVerdict v) {
    switch (v) {
        case RegionVerdict::Compatible: return "Compatible";
        case RegionVerdict::Boundary: return "Boundary";
        default: return "Incompatible";
    }
}

/// Closed-form joint-measurability verdict for a noisy MUB pair. For d = 2
/// the region is the unit disc; for d >= 3 it is the union of the half-plane
/// g_phi + g_psi <= (d-3)/(d-1) and the ellipse region, clipped to the
/// admissible square.
inline RegionVerdict region_membership(int d, const SmearingVector& g, double tol = 1e-9) {
    check_gamma_range(g, d);
    if (d == 2) {
        const double s = g.gamma_phi * g.gamma_phi + g.gamma_psi * g.gamma_psi;
        if (std::abs(s - 1.0) <= tol) return RegionVerdict::Boundary;
        return s < 1.0 ? RegionVerdict::Compatible : RegionVerdict::Incompatible;
    }
    const double line = g.gamma_phi + g.gamma_psi - (d - 3.0) / (d - 1.0);
    const double ell = ellipse_form(d, g) - (4.0 - d);
    const bool inside = line <= tol || ell <= tol;
    // Relative boundary: the two edge segments ending at (d-2)/(d-1), plus the
    // arc of the ellipse above the line.
    const double edge = 1.0 / (1.0 - d);
    const double seg_max = (d - 2.0) / (d - 1.0);
    const bool on_segment =
        (std::abs(g.gamma_psi - edge) <= tol && g.gamma_phi <= seg_max + tol) ||
        (std::abs(g.gamma_phi - edge) <= tol && g.gamma_psi <= seg_max + tol);
    const bool on_arc = std::abs(ell) <= tol && line >= -tol;
    if (inside && (on_segment || on_arc)) return RegionVerdict::Boundary;
    return inside ? RegionVerdict::Compatible : RegionVerdict::Incompatible;
}

}  // namespace iwit
