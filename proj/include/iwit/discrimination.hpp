// discrimination.hpp — guessing probabilities for state ensembles: evaluation
// under a fixed measurement, the analytic largest-eigenvalue solution when the
// top eigenprojectors tile the identity, a fixed-point iteration with a dual
// optimality certificate for the general case, and the pre-/postmeasurement
// quantities for partitioned ensembles.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iwit/ensemble.hpp"
#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"

namespace iwit {

enum class SolveMethod { analytic, iterative };

inline std::string to_string(SolveMethod m) {
    return m == SolveMethod::analytic ? "analytic" : "iterative";
}

struct DiscriminationResult {
    double value = 0.0;
    std::optional<Povm> optimal_povm;
    SolveMethod method = SolveMethod::analytic;
    int iterations = 0;
    double residual = 0.0;  // certified bound on the distance to the optimum
};

struct SolverOptions {
    int max_iter = 10000;
    double tol = 1e-8;
};

/// P_guess(E; M) = sum_z tr[E(z) M(z)]; the measurement outcome z is the guess.
inline double pguess_with(const StateEnsemble& e, const Povm& m) {
    if (e.dim != m.dim) throw DimensionMismatch("ensemble and POVM dimensions differ");
    std::set<std::string> el(e.labels.begin(), e.labels.end());
    std::set<std::string> ml(m.outcomes.begin(), m.outcomes.end());
    if (el != ml) throw LabelMismatch("measurement outcomes must match ensemble labels");
    double p = 0.0;
    for (std::size_t i = 0; i < e.labels.size(); ++i)
        p += trace_pair(e.operators[i], m.effect(e.labels[i]));
    return p;
}

/// Closed-form optimal discrimination when the projectors onto the top
/// eigenspaces of the maximal-eigenvalue operators sum to nu times the
/// identity. Returns the value d*lambda together with the optimal measurement
/// M0(x) = Pi(x)/nu on the maximizing labels; absent when the projector-sum
/// condition fails.
inline std::optional<DiscriminationResult> pguess_analytic(const StateEnsemble& e,
                                                           double condition_tol = 1e-8) {
    const int d = e.dim;
    std::vector<double> lam(e.size());
    std::vector<HermitianOperator> top;
    top.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const SpectralDecomposition sd = eig(e.operators[i]);
        lam[i] = sd.eigenvalues.front();
        top.push_back(sd.projectors.front());
    }
    const double lam_max = *std::max_element(lam.begin(), lam.end());
    Matrix sum = Matrix::Zero(d, d);
    std::vector<bool> in_top(e.size(), false);
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (lam[i] >= lam_max - kDegeneracyTol) {
            in_top[i] = true;
            sum += top[i].matrix();
        }
    }
    const double nu = sum.trace().real() / d;
    const double deviation = (sum - nu * Matrix::Identity(d, d)).norm();
    if (deviation > condition_tol) return std::nullopt;

    std::vector<HermitianOperator> effects;
    effects.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        effects.push_back(in_top[i] ? top[i] * (1.0 / nu) : HermitianOperator::zero(d));
    Povm m0{d, e.labels, std::move(effects), std::nullopt};
    return DiscriminationResult{d * lam_max, std::move(m0), SolveMethod::analytic, 0, deviation};
}

/// nu = tr[sum of top projectors]/d from the analytic applicability test;
/// meaningful only when pguess_analytic succeeds.
inline double analytic_nu(const StateEnsemble& e) {
    Matrix sum = Matrix::Zero(e.dim, e.dim);
    std::vector<double> lam(e.size());
    std::vector<HermitianOperator> top;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const SpectralDecomposition sd = eig(e.operators[i]);
        lam[i] = sd.eigenvalues.front();
        top.push_back(sd.projectors.front());
    }
    const double lam_max = *std::max_element(lam.begin(), lam.end());
    for (std::size_t i = 0; i < e.size(); ++i)
        if (lam[i] >= lam_max - kDegeneracyTol) sum += top[i].matrix();
    return sum.trace().real() / e.dim;
}

namespace detail {

inline Matrix inverse_sqrt_psd(const Matrix& t) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(t);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eigensolver failed inside the discrimination iteration");
    const double cutoff = 1e-14 * std::max(1.0, solver.eigenvalues().maxCoeff());
    Eigen::VectorXd inv = solver.eigenvalues();
    for (int i = 0; i < inv.size(); ++i)
        inv(i) = inv(i) > cutoff ? 1.0 / std::sqrt(inv(i)) : 0.0;
    return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace detail

/// Minimum-error discrimination by fixed-point iteration. Stops once the
/// symmetrized dual operator K = sum_z E(z)M(z) certifies near-optimality:
/// both K + max_z lambda_max(E(z)-K) id and K + sum_z [E(z)-K]_+ dominate
/// every E(z), so the smaller of the two trace corrections bounds the gap to
/// the optimum. That certified gap is the residual; it also bounds the dual
/// violation, so K - E(z) >= -tol holds for all z at termination.
inline DiscriminationResult pguess_iterative(const StateEnsemble& e, SolverOptions opts = {}) {
    if (opts.max_iter < 1) throw Error("max_iter must be at least 1");
    if (opts.tol <= 0.0) throw Error("tol must be positive");
    const int d = e.dim;
    const int n = static_cast<int>(e.size());
    const Matrix id = Matrix::Identity(d, d);

    std::vector<Matrix> m(n, id / n);
    double best_value = 0.0;
    double residual = 0.0;
    for (int it = 0; it <= opts.max_iter; ++it) {
        Matrix k = Matrix::Zero(d, d);
        for (int z = 0; z < n; ++z) k += e.operators[z].matrix() * m[z];
        k = ((k + k.adjoint()) / 2.0).eval();
        const double value = k.trace().real();
        double dev = 0.0, positive_part = 0.0;
        for (int z = 0; z < n; ++z) {
            const Eigen::VectorXd ev =
                eigenvalues_of(HermitianOperator(Matrix(e.operators[z].matrix() - k)));
            dev = std::max(dev, ev(d - 1));
            positive_part += ev.cwiseMax(0.0).sum();
        }
        residual = std::min(d * std::max(dev, 0.0), positive_part);
        best_value = std::max(best_value, value);
        if (residual <= opts.tol) {
            std::vector<HermitianOperator> effects;
            effects.reserve(n);
            for (int z = 0; z < n; ++z) effects.emplace_back(Matrix((m[z] + m[z].adjoint()) / 2.0));
            return DiscriminationResult{value,
                                        Povm{d, e.labels, std::move(effects), std::nullopt},
                                        SolveMethod::iterative, it, residual};
        }
        if (it == opts.max_iter) break;

        Matrix t = Matrix::Zero(d, d);
        for (int z = 0; z < n; ++z)
            t += e.operators[z].matrix() * m[z] * e.operators[z].matrix();
        const Matrix s = detail::inverse_sqrt_psd(((t + t.adjoint()) / 2.0).eval());
        Matrix total = Matrix::Zero(d, d);
        for (int z = 0; z < n; ++z) {
            const Matrix& ez = e.operators[z].matrix();
            Matrix next = s * ez * m[z] * ez * s;
            m[z] = ((next + next.adjoint()) / 2.0).eval();
            total += m[z];
        }
        // Redistribute whatever the conjugation lost outside the range of T,
        // keeping sum_z M(z) = identity exactly.
        const Matrix deficit = (id - total) / n;
        for (int z = 0; z < n; ++z) m[z] += deficit;
    }
    throw MaxIterExceeded("discrimination solver did not certify optimality within " +
                              std::to_string(opts.max_iter) + " iterations",
                          best_value, residual);
}

/// Optimal guessing probability: analytic route when applicable, otherwise
/// the certified iterative solver.
inline DiscriminationResult pguess_opt(const StateEnsemble& e, SolverOptions opts = {}) {
    if (auto analytic = pguess_analytic(e)) return *analytic;
    return pguess_iterative(e, opts);
}

/// Premeasurement guessing probability for a fixed measurement pair:
/// p(X) P_guess(E_X; A) + p(Y) P_guess(E_Y; B).
inline double p_prior_with(const PartitionedEnsemble& pe, const MeasurementPair& pair) {
    const Subensembles sub = subensembles(pe);
    return sub.p_x * pguess_with(sub.on_x, pair.a) + sub.p_y * pguess_with(sub.on_y, pair.b);
}

struct PriorOptResult {
    double value = 0.0;
    DiscriminationResult part_x;
    DiscriminationResult part_y;
};

/// Optimal premeasurement guessing probability, solving each subensemble
/// independently. Records which solver produced each part.
inline PriorOptResult p_prior_opt_full(const PartitionedEnsemble& pe, SolverOptions opts = {}) {
    const Subensembles sub = subensembles(pe);
    DiscriminationResult rx = pguess_opt(sub.on_x, opts);
    DiscriminationResult ry = pguess_opt(sub.on_y, opts);
    const double value = sub.p_x * rx.value + sub.p_y * ry.value;
    return PriorOptResult{value, std::move(rx), std::move(ry)};
}

inline double p_prior_opt(const PartitionedEnsemble& pe, SolverOptions opts = {}) {
    return p_prior_opt_full(pe, opts).value;
}

/// Optimal postmeasurement guessing probability via the auxiliary-ensemble
/// reduction: P_post = (|X|p(Y) + |Y|p(X)) P_guess(E~). The returned POVM is
/// the optimizing joint measurement on X x Y; its margins attain the value in
/// the premeasurement form.
inline DiscriminationResult p_post_opt(const PartitionedEnsemble& pe, SolverOptions opts = {}) {
    const StateEnsemble aux = auxiliary_ensemble(pe);
    const double scale = auxiliary_normalizer(pe);
    DiscriminationResult inner = pguess_opt(aux, opts);
    DiscriminationResult out;
    out.value = scale * inner.value;
    out.method = inner.method;
    out.iterations = inner.iterations;
    out.residual = scale * inner.residual;
    if (inner.optimal_povm) {
        // Attach the product structure; labels are row-major in block_x,
        // matching the auxiliary ensemble's label order.
        std::vector<LabelPair> pairs;
        pairs.reserve(pe.block_x.size() * pe.block_y.size());
        for (const auto& x : pe.block_x)
            for (const auto& y : pe.block_y) pairs.emplace_back(x, y);
        inner.optimal_povm->outcome_pairs = std::move(pairs);
        out.optimal_povm = std::move(inner.optimal_povm);
    }
    return out;
}

}  // namespace iwit
