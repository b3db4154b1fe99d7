// povm.hpp — positive operator valued measures, measurement pairs, uniform and
// noisy basis measurements, margins of product measurements.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iwit/errors.hpp"
#include "iwit/operators.hpp"

namespace iwit {

using Basis = std::vector<Ket>;
using LabelPair = std::pair<std::string, std::string>;

/// Finite outcome-labeled measurement: positive effects summing to the
/// identity. A POVM over a Cartesian product X x Y additionally carries the
/// structural outcome pairs, aligned with `outcomes`; margins are taken with
/// respect to those, never by parsing label strings.
struct Povm {
    int dim = 0;
    std::vector<std::string> outcomes;
    std::vector<HermitianOperator> effects;
    std::optional<std::vector<LabelPair>> outcome_pairs;

    std::size_t size() const { return effects.size(); }

    const HermitianOperator& effect(const std::string& label) const {
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            if (outcomes[i] == label) return effects[i];
        throw LabelMismatch("no outcome labeled '" + label + "'");
    }
};

/// A pair of measurements with disjoint outcome sets X, Y on the same space.
struct MeasurementPair {
    Povm a;  // outcomes X
    Povm b;  // outcomes Y

    int dim() const { return a.dim; }
};

namespace detail {

inline void check_distinct(const std::vector<std::string>& labels) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw LabelMismatch("outcome labels are not distinct");
}

}  // namespace detail

/// Checks positivity of every effect and normalization of the sum, returning
/// the validated POVM.
inline Povm validate_povm(std::vector<HermitianOperator> effects, std::vector<std::string> labels,
                          double tol = kPsdTol) {
    if (effects.empty()) throw NotNormalized("a POVM needs at least one effect");
    if (labels.size() != effects.size())
        throw LabelMismatch("label list and effect list differ in length");
    detail::check_distinct(labels);
    const int d = effects.front().dim();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < effects.size(); ++i) {
        if (effects[i].dim() != d) throw DimensionMismatch("effects have mixed dimensions");
        const double lam = min_eigenvalue(effects[i]);
        if (lam < -tol)
            throw NotPositive("effect '" + labels[i] + "' has eigenvalue " + std::to_string(lam));
        sum += effects[i].matrix();
    }
    const double residual = (sum - Matrix::Identity(d, d)).norm();
    if (residual > tol)
        throw NotNormalized("effects sum deviates from identity by " + std::to_string(residual));
    return Povm{d, std::move(labels), std::move(effects), std::nullopt};
}

/// Uniform measurement U_Z(z) = 1/|Z| * identity.
inline Povm uniform_povm(std::vector<std::string> labels, int dim) {
    if (labels.empty()) throw NotNormalized("uniform POVM needs at least one outcome");
    detail::check_distinct(labels);
    std::vector<HermitianOperator> effects(
        labels.size(), HermitianOperator::identity(dim) * (1.0 / static_cast<double>(labels.size())));
    return Povm{dim, std::move(labels), std::move(effects), std::nullopt};
}

inline std::vector<std::string> default_labels(int n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i));
    return out;
}

inline void check_orthonormal(const Basis& basis, double tol = 1e-10) {
    const int d = static_cast<int>(basis.size());
    for (int i = 0; i < d; ++i) {
        if (basis[i].size() != d) throw DimensionMismatch("basis vectors must have length d");
        for (int j = i; j < d; ++j) {
            const Complex ip = basis[i].dot(basis[j]);
            const double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(ip - expect) > tol)
                throw DegenerateInput("basis is not orthonormal within tolerance");
        }
    }
}

/// Smeared basis measurement: effect(h) = gamma |e_h><e_h| + (1-gamma)/d.
/// gamma ranges over [1/(1-d), 1]; outside that interval some effect becomes
/// non-positive.
inline Povm noisy_basis_povm(const Basis& basis, double gamma,
                             std::vector<std::string> labels = {}) {
    const int d = static_cast<int>(basis.size());
    if (d < 1) throw DimensionMismatch("empty basis");
    check_orthonormal(basis);
    const double lo = (d > 1) ? 1.0 / (1.0 - d) : 0.0;
    if (gamma < lo - 1e-12 || gamma > 1.0 + 1e-12)
        throw GammaOutOfRange("gamma = " + std::to_string(gamma) + " outside [1/(1-d), 1]");
    if (labels.empty()) labels = default_labels(d);
    if (static_cast<int>(labels.size()) != d)
        throw LabelMismatch("need exactly d outcome labels");
    std::vector<HermitianOperator> effects;
    effects.reserve(d);
    for (int h = 0; h < d; ++h) {
        Matrix e = gamma * (basis[h] * basis[h].adjoint());
        e += (1.0 - gamma) / d * Matrix::Identity(d, d);
        effects.emplace_back(std::move(e));
    }
    return Povm{d, std::move(labels), std::move(effects), std::nullopt};
}

/// Margins of a product-labeled POVM: A(x) = sum_y M(x,y), B(y) = sum_x M(x,y).
inline MeasurementPair margins(const Povm& m) {
    if (!m.outcome_pairs)
        throw NotProductLabeled("POVM carries no outcome-pair structure");
    const auto& pairs = *m.outcome_pairs;
    if (pairs.size() != m.effects.size())
        throw NotProductLabeled("outcome pairs and effects differ in length");

    std::vector<std::string> xs, ys;
    for (const auto& [x, y] : pairs) {
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
        if (std::find(ys.begin(), ys.end(), y) == ys.end()) ys.push_back(y);
    }
    if (xs.size() * ys.size() != pairs.size())
        throw NotProductLabeled("labels do not form a full Cartesian product");
    std::set<LabelPair> distinct(pairs.begin(), pairs.end());
    if (distinct.size() != pairs.size())
        throw NotProductLabeled("duplicate outcome pair");

    const int d = m.dim;
    std::vector<Matrix> asum(xs.size(), Matrix::Zero(d, d));
    std::vector<Matrix> bsum(ys.size(), Matrix::Zero(d, d));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto ix = std::find(xs.begin(), xs.end(), pairs[i].first) - xs.begin();
        const auto iy = std::find(ys.begin(), ys.end(), pairs[i].second) - ys.begin();
        asum[ix] += m.effects[i].matrix();
        bsum[iy] += m.effects[i].matrix();
    }
    std::vector<HermitianOperator> aeff, beff;
    for (auto& s : asum) aeff.emplace_back(std::move(s));
    for (auto& s : bsum) beff.emplace_back(std::move(s));
    return MeasurementPair{validate_povm(std::move(aeff), xs), validate_povm(std::move(beff), ys)};
}

/// Builds a product-labeled POVM from per-cell effects in row-major (x-major)
/// order over xs x ys.
inline Povm product_povm(std::vector<HermitianOperator> effects, const std::vector<std::string>& xs,
                         const std::vector<std::string>& ys, double tol = kPsdTol) {
    std::vector<std::string> labels;
    std::vector<LabelPair> pairs;
    labels.reserve(xs.size() * ys.size());
    for (const auto& x : xs)
        for (const auto& y : ys) {
            labels.push_back("(" + x + "," + y + ")");
            pairs.emplace_back(x, y);
        }
    Povm p = validate_povm(std::move(effects), std::move(labels), tol);
    p.outcome_pairs = std::move(pairs);
    return p;
}

}  // namespace iwit
