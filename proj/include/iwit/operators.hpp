// operators.hpp — dense complex Hermitian operators on C^d: construction,
// spectral decomposition with degeneracy grouping, PSD-cone projection and the
// real trace pairing. Every higher-level object in the library is built from
// these.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "iwit/errors.hpp"

namespace iwit {

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Ket = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Tolerance policy: Hermiticity 1e-12, PSD slack 1e-9, spectral
// reconstruction 1e-10, eigenvalue degeneracy grouping 1e-8 (absolute).
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kSpectralTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-8;

/// Self-adjoint operator on a d-dimensional complex Hilbert space. The stored
/// matrix is exactly Hermitian: construction checks the deviation against a
/// tolerance and then symmetrizes.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, double tol = kHermitianTol) {
        if (m.rows() != m.cols())
            throw DimensionMismatch("operator matrix is not square");
        const double dev = (m - m.adjoint()).norm();
        if (!(dev <= tol))
            throw NotHermitian("matrix deviates from H = H^dag by " + std::to_string(dev));
        mat_ = ((m + m.adjoint()) / 2.0).eval();
    }

    static HermitianOperator zero(int dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }

    static HermitianOperator identity(int dim) {
        return HermitianOperator(Matrix::Identity(dim, dim));
    }

    /// Rank-1 projector |v><v| / <v|v>.
    static HermitianOperator projector(const Ket& v) {
        const double n2 = v.squaredNorm();
        if (n2 <= 0.0) throw DegenerateInput("projector onto the zero vector");
        return HermitianOperator(Matrix(v * v.adjoint() / n2));
    }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }

    double trace() const { return mat_.trace().real(); }
    double frobenius_norm() const { return mat_.norm(); }

    HermitianOperator operator+(const HermitianOperator& o) const {
        check_same_dim(o);
        return HermitianOperator(Matrix(mat_ + o.mat_));
    }
    HermitianOperator operator-(const HermitianOperator& o) const {
        check_same_dim(o);
        return HermitianOperator(Matrix(mat_ - o.mat_));
    }
    HermitianOperator operator*(double s) const { return HermitianOperator(Matrix(s * mat_)); }

    friend HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

    void check_same_dim(const HermitianOperator& o) const {
        if (dim() != o.dim())
            throw DimensionMismatch("operator dimensions differ: " + std::to_string(dim()) +
                                    " vs " + std::to_string(o.dim()));
    }

private:
    Matrix mat_;
};

/// Eigenvalues sorted descending, one orthogonal projector per *distinct*
/// eigenvalue (eigenvalues closer than the grouping tolerance are merged).
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<HermitianOperator> projectors;
    std::vector<int> multiplicities;

    Matrix reconstruct() const {
        Matrix out = Matrix::Zero(projectors.front().dim(), projectors.front().dim());
        for (std::size_t i = 0; i < eigenvalues.size(); ++i)
            out += eigenvalues[i] * projectors[i].matrix();
        return out;
    }
};

/// Builds a Hermitian operator from its real and imaginary parts. `re` must be
/// symmetric and `im` antisymmetric (each within `tol`).
inline HermitianOperator make_hermitian(const RealMatrix& re, const RealMatrix& im,
                                        double tol = kHermitianTol) {
    if (re.rows() != re.cols() || im.rows() != im.cols() || re.rows() != im.rows())
        throw DimensionMismatch("re/im parts must be square matrices of equal dimension");
    if ((re - re.transpose()).norm() > tol)
        throw NotHermitian("real part is not symmetric");
    if ((im + im.transpose()).norm() > tol)
        throw NotHermitian("imaginary part is not antisymmetric");
    return HermitianOperator(re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>(), tol);
}

/// Full spectral decomposition, eigenvalues descending. Eigenvalues within
/// `group_tol` of each other are merged into a single projector, so exactly
/// degenerate blocks (e.g. a rank-(d-2) kernel) come out as one projector.
inline SpectralDecomposition eig(const HermitianOperator& h, double group_tol = kDegeneracyTol) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("self-adjoint eigensolver did not converge");

    const int d = h.dim();
    // Eigen returns ascending order; walk backwards for descending.
    SpectralDecomposition out;
    int i = d - 1;
    while (i >= 0) {
        int j = i;
        // chain adjacent eigenvalues closer than group_tol
        while (j > 0 && std::abs(solver.eigenvalues()(j - 1) - solver.eigenvalues()(j)) <= group_tol)
            --j;
        Matrix proj = Matrix::Zero(d, d);
        double lam = 0.0;
        for (int k = j; k <= i; ++k) {
            proj += solver.eigenvectors().col(k) * solver.eigenvectors().col(k).adjoint();
            lam += solver.eigenvalues()(k);
        }
        const int mult = i - j + 1;
        out.eigenvalues.push_back(lam / mult);
        out.projectors.emplace_back(std::move(proj));
        out.multiplicities.push_back(mult);
        i = j - 1;
    }
    return out;
}

/// Eigenvalues only (ascending), cheaper than eig().
inline Eigen::VectorXd eigenvalues_of(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("self-adjoint eigensolver did not converge");
    return solver.eigenvalues();
}

inline double min_eigenvalue(const HermitianOperator& h) { return eigenvalues_of(h)(0); }
inline double max_eigenvalue(const HermitianOperator& h) {
    return eigenvalues_of(h)(h.dim() - 1);
}

/// Uniform operator norm: largest absolute eigenvalue.
inline double operator_norm(const HermitianOperator& h) {
    const Eigen::VectorXd ev = eigenvalues_of(h);
    return std::max(std::abs(ev(0)), std::abs(ev(h.dim() - 1)));
}

inline bool is_psd(const HermitianOperator& h, double tol = kPsdTol) {
    return min_eigenvalue(h) >= -tol;
}

/// Frobenius-nearest PSD operator: clips negative eigenvalues to zero.
inline HermitianOperator project_psd(const HermitianOperator& h) {
    const SpectralDecomposition sd = eig(h);
    Matrix out = Matrix::Zero(h.dim(), h.dim());
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues[i] > 0.0) out += sd.eigenvalues[i] * sd.projectors[i].matrix();
    return HermitianOperator(std::move(out));
}

/// Re tr[AB] — the Euclidean pairing on self-adjoint operators.
inline double trace_pair(const HermitianOperator& a, const HermitianOperator& b) {
    a.check_same_dim(b);
    return (a.matrix() * b.matrix()).trace().real();
}

}  // namespace iwit
