// compatibility.hpp — joint measurability as convex feasibility: find a POVM
// on X x Y with prescribed margins, by Dykstra alternating projections between
// the product of PSD cones and the affine margin-constraint set.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"

namespace iwit {

struct CompatibilityReport {
    enum class Verdict { Compatible, Incompatible, Undetermined };
    Verdict verdict = Verdict::Undetermined;
    std::optional<Povm> certificate;  // joint measurement when Compatible
    double residual = 0.0;            // final distance to the margin constraints
    int iterations = 0;
};

inline std::string to_string(CompatibilityReport::Verdict v) {
    switch (v) {
        case CompatibilityReport::Verdict::Compatible: return "Compatible";
        case CompatibilityReport::Verdict::Incompatible: return "Incompatible";
        default: return "Undetermined";
    }
}

struct FeasibilityOptions {
    double tol = 1e-7;
    int max_iter = 50000;
    // Infeasibility is declared when the residual sits above 10*tol and fails
    // to improve by the relative factor below for `plateau_window` consecutive
    // iterations.
    int plateau_window = 500;
    double plateau_improvement = 1e-3;
};

/// Componentwise mixing with the uniform pair: lambda = 1 is the identity,
/// lambda = 0 the uniform pair. Mixing toward the uniform pair moves into the
/// relative interior of the compatible set.
inline MeasurementPair scale_toward_uniform(const MeasurementPair& pair, double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw LambdaOutOfRange("lambda must lie in [0, 1]");
    auto mix = [&](const Povm& p) {
        std::vector<HermitianOperator> effects;
        effects.reserve(p.size());
        const Matrix u = Matrix::Identity(p.dim, p.dim) / static_cast<double>(p.size());
        for (const auto& e : p.effects)
            effects.emplace_back(Matrix(lambda * e.matrix() + (1.0 - lambda) * u));
        Povm out{p.dim, p.outcomes, std::move(effects), p.outcome_pairs};
        return out;
    };
    return MeasurementPair{mix(pair.a), mix(pair.b)};
}

namespace detail {

/// Orthogonal projection onto {M : sum_y M(x,y) = A(x), sum_x M(x,y) = B(y)}.
/// The margin error is distributed uniformly over the complementary index,
/// with a global correction; this is exact because the correction lies in the
/// span of the constraint normals.
inline void project_margins(std::vector<std::vector<Matrix>>& m, const std::vector<Matrix>& a,
                            const std::vector<Matrix>& b) {
    const int nx = static_cast<int>(a.size());
    const int ny = static_cast<int>(b.size());
    const int d = static_cast<int>(a.front().rows());
    std::vector<Matrix> row_def(nx, Matrix::Zero(d, d));
    std::vector<Matrix> col_def(ny, Matrix::Zero(d, d));
    Matrix total = Matrix::Zero(d, d);
    for (int i = 0; i < nx; ++i) {
        Matrix rs = Matrix::Zero(d, d);
        for (int j = 0; j < ny; ++j) rs += m[i][j];
        row_def[i] = a[i] - rs;
        total += row_def[i];
    }
    for (int j = 0; j < ny; ++j) {
        Matrix cs = Matrix::Zero(d, d);
        for (int i = 0; i < nx; ++i) cs += m[i][j];
        col_def[j] = b[j] - cs;
    }
    const Matrix global = total / (nx * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            m[i][j] += row_def[i] / ny + col_def[j] / nx - global;
}

inline double margin_residual(const std::vector<std::vector<Matrix>>& m,
                              const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    const int nx = static_cast<int>(a.size());
    const int ny = static_cast<int>(b.size());
    const int d = static_cast<int>(a.front().rows());
    double sq = 0.0;
    for (int i = 0; i < nx; ++i) {
        Matrix rs = Matrix::Zero(d, d);
        for (int j = 0; j < ny; ++j) rs += m[i][j];
        sq += (a[i] - rs).squaredNorm();
    }
    for (int j = 0; j < ny; ++j) {
        Matrix cs = Matrix::Zero(d, d);
        for (int i = 0; i < nx; ++i) cs += m[i][j];
        sq += (b[j] - cs).squaredNorm();
    }
    return std::sqrt(sq);
}

inline Matrix clip_to_psd(const Matrix& v) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(((v + v.adjoint()) / 2.0).eval());
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eigensolver failed inside the feasibility iteration");
    Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace detail

/// Decides whether the pair admits a joint measurement. Deterministic:
/// fixed symmetrized-product initialization and fixed iteration order. The
/// certificate, when produced, has exact margins and is PSD within the
/// achieved residual; it is re-validated before being returned.
inline CompatibilityReport joint_feasibility(const MeasurementPair& pair,
                                             FeasibilityOptions opts = {}) {
    if (opts.tol <= 0.0) throw Error("tol must be positive");
    const int nx = static_cast<int>(pair.a.size());
    const int ny = static_cast<int>(pair.b.size());
    const int d = pair.dim();
    if (pair.b.dim != d) throw DimensionMismatch("pair members act on different spaces");

    std::vector<Matrix> a, b;
    for (const auto& e : pair.a.effects) a.push_back(e.matrix());
    for (const auto& e : pair.b.effects) b.push_back(e.matrix());

    std::vector<std::vector<Matrix>> m(nx, std::vector<Matrix>(ny));
    std::vector<std::vector<Matrix>> corr(nx, std::vector<Matrix>(ny, Matrix::Zero(d, d)));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) m[i][j] = (a[i] * b[j] + b[j] * a[i]) / 2.0;

    auto certify = [&](const std::vector<std::vector<Matrix>>& blocks, double res,
                       int it) -> CompatibilityReport {
        std::vector<std::vector<Matrix>> n = blocks;
        detail::project_margins(n, a, b);  // exact margins
        std::vector<HermitianOperator> effects;
        effects.reserve(nx * ny);
        const double cert_tol = std::max(opts.tol, kPsdTol);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                effects.emplace_back(((n[i][j] + n[i][j].adjoint()) / 2.0).eval());
        Povm joint = product_povm(std::move(effects), pair.a.outcomes, pair.b.outcomes, cert_tol);
        return CompatibilityReport{CompatibilityReport::Verdict::Compatible, std::move(joint), res,
                                   it};
    };

    double plateau_ref = std::numeric_limits<double>::infinity();
    int plateau_count = 0;
    double best_res = std::numeric_limits<double>::infinity();
    double res = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iter; ++it) {
        // affine step (no Dykstra increment needed for an affine set)
        detail::project_margins(m, a, b);
        // cone step with correction
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const Matrix v = m[i][j] + corr[i][j];
                const Matrix proj = detail::clip_to_psd(v);
                corr[i][j] = v - proj;
                m[i][j] = proj;
            }
        res = detail::margin_residual(m, a, b);
        best_res = std::min(best_res, res);
        if (res <= opts.tol) return certify(m, res, it);
        if (res > 10.0 * opts.tol && res >= (1.0 - opts.plateau_improvement) * plateau_ref) {
            if (++plateau_count >= opts.plateau_window)
                return CompatibilityReport{CompatibilityReport::Verdict::Incompatible, std::nullopt,
                                           res, it};
        } else {
            plateau_count = 0;
            plateau_ref = res;
        }
    }
    return CompatibilityReport{CompatibilityReport::Verdict::Undetermined, std::nullopt, best_res,
                               opts.max_iter};
}

}  // namespace iwit
