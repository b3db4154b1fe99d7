// witness.hpp — linear incompatibility witnesses: evaluation through the trace
// pairing, construction from partitioned ensembles, normalization of an
// arbitrary witness into an ensemble form, and the detection-equivalence
// check.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iwit/discrimination.hpp"
#include "iwit/ensemble.hpp"
#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"

namespace iwit {

struct OperatorFamily {
    std::vector<std::string> labels;
    std::vector<HermitianOperator> operators;

    const HermitianOperator& at(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return operators[i];
        throw LabelMismatch("no family member labeled '" + label + "'");
    }
};

/// W(A,B) = delta - sum_x tr[F(x)A(x)] - sum_y tr[G(y)B(y)]; nonnegative on
/// every compatible pair, negative somewhere on the incompatible ones.
struct Witness {
    OperatorFamily f;  // indexed by X
    OperatorFamily g;  // indexed by Y
    double delta = 0.0;
};

/// Data certifying detection equivalence: F2 = alpha F1 + A, G2 = alpha G1 + B
/// and delta2 = alpha delta1 + tr[A + B], with alpha > 0.
struct EquivalenceCertificate {
    double alpha = 1.0;
    HermitianOperator op_a;
    HermitianOperator op_b;
};

namespace detail {

inline void check_same_label_set(const std::vector<std::string>& lhs,
                                 const std::vector<std::string>& rhs, const char* what) {
    std::set<std::string> l(lhs.begin(), lhs.end());
    std::set<std::string> r(rhs.begin(), rhs.end());
    if (l != r) throw LabelMismatch(std::string("label sets differ on ") + what);
}

}  // namespace detail

inline double eval_witness(const Witness& w, const MeasurementPair& pair) {
    detail::check_same_label_set(w.f.labels, pair.a.outcomes, "X");
    detail::check_same_label_set(w.g.labels, pair.b.outcomes, "Y");
    double s = 0.0;
    for (std::size_t i = 0; i < w.f.labels.size(); ++i)
        s += trace_pair(w.f.operators[i], pair.a.effect(w.f.labels[i]));
    for (std::size_t i = 0; i < w.g.labels.size(); ++i)
        s += trace_pair(w.g.operators[i], pair.b.effect(w.g.labels[i]));
    return w.delta - s;
}

inline Witness scale_witness(const Witness& w, double alpha) {
    Witness out = w;
    out.delta *= alpha;
    for (auto& op : out.f.operators) op = op * alpha;
    for (auto& op : out.g.operators) op = op * alpha;
    return out;
}

/// The tight witness associated with a partitioned ensemble: F and G are the
/// restrictions of E to the blocks and delta = P_post, or a supplied constant
/// in [P_post, P_prior). P_post is computed now and frozen into the witness.
inline Witness witness_from_ensemble(const PartitionedEnsemble& pe,
                                     std::optional<double> delta_override = std::nullopt,
                                     SolverOptions opts = {}) {
    const double post = p_post_opt(pe, opts).value;
    const double prior = p_prior_opt(pe, opts);
    if (prior - post <= 1e-8)
        throw NoGap("P_prior = P_post for this ensemble; no witness arises");
    double delta = post;
    if (delta_override) {
        if (*delta_override < post - 1e-9 || *delta_override >= prior)
            throw DeltaOutOfRange("delta must satisfy P_post <= delta < P_prior");
        delta = *delta_override;
    }
    OperatorFamily f, g;
    for (const auto& x : pe.block_x) {
        f.labels.push_back(x);
        f.operators.push_back(pe.ensemble.at(x));
    }
    for (const auto& y : pe.block_y) {
        g.labels.push_back(y);
        g.operators.push_back(pe.ensemble.at(y));
    }
    return Witness{std::move(f), std::move(g), delta};
}

struct NormalizationResult {
    PartitionedEnsemble ensemble;
    double alpha = 0.0;        // positive scale with alpha * W = delta' - P_prior form
    double delta_prime = 0.0;  // constant of the rescaled witness
    double mu_shift = 0.0;     // the (nonpositive) constant mu subtracted from F, G
};

/// Turns an arbitrary non-constant witness into a partitioned state ensemble:
/// shift both families by mu = -(sum ||F(x)|| + sum ||G(y)||) to make them
/// positive, then scale by alpha so the total trace is one. The rescaled
/// witness alpha*W coincides with delta' - P_prior(pe; ., .) on measurement
/// pairs.
inline NormalizationResult normalize_to_ensemble(const Witness& w) {
    if (w.f.operators.empty() || w.g.operators.empty())
        throw LabelMismatch("witness must have nonempty families on X and Y");
    const int d = w.f.operators.front().dim();

    // A family equal to a common multiple of the identity pairs to the same
    // number with every measurement pair, so no ensemble can represent it.
    const Matrix id_d = Matrix::Identity(d, d);
    const double common = w.f.operators.front().matrix().trace().real() / d;
    bool constant = true;
    for (const auto& op : w.f.operators)
        constant = constant && (op.matrix() - common * id_d).norm() <= 1e-12;
    for (const auto& op : w.g.operators)
        constant = constant && (op.matrix() - common * id_d).norm() <= 1e-12;
    if (constant)
        throw ConstantWitness("all family members equal " + std::to_string(common) +
                              " times the identity");

    double mu = 0.0;
    for (const auto& op : w.f.operators) mu -= operator_norm(op);
    for (const auto& op : w.g.operators) mu -= operator_norm(op);

    double inv_alpha = 0.0;
    for (const auto& op : w.f.operators) inv_alpha += op.trace() - mu * d;
    for (const auto& op : w.g.operators) inv_alpha += op.trace() - mu * d;
    if (inv_alpha <= 1e-12)
        throw ConstantWitness("all family members are the same multiple of the identity");
    const double alpha = 1.0 / inv_alpha;

    std::vector<std::string> labels;
    std::vector<HermitianOperator> ops;
    for (std::size_t i = 0; i < w.f.labels.size(); ++i) {
        labels.push_back(w.f.labels[i]);
        ops.emplace_back(Matrix(alpha * (w.f.operators[i].matrix() - mu * id_d)));
    }
    for (std::size_t i = 0; i < w.g.labels.size(); ++i) {
        labels.push_back(w.g.labels[i]);
        ops.emplace_back(Matrix(alpha * (w.g.operators[i].matrix() - mu * id_d)));
    }
    PartitionedEnsemble pe = make_partitioned(validate_ensemble(std::move(ops), std::move(labels)),
                                              w.f.labels, w.g.labels);
    const double delta_prime = alpha * (w.delta - 2.0 * mu * d);
    return NormalizationResult{std::move(pe), alpha, delta_prime, mu};
}

/// Detection-equivalence check. The label-varying components of the families
/// determine alpha by least squares (constant shifts are the only remaining
/// freedom); the shifts A, B follow from the means and the delta relation is
/// verified last. Returns the certificate, or absent when no alpha > 0 fits
/// within the tolerance.
inline std::optional<EquivalenceCertificate> detection_equivalent(const Witness& w1,
                                                                  const Witness& w2,
                                                                  double tol = 1e-8) {
    detail::check_same_label_set(w1.f.labels, w2.f.labels, "X");
    detail::check_same_label_set(w1.g.labels, w2.g.labels, "Y");
    const int d = w1.f.operators.front().dim();
    const Matrix id = Matrix::Identity(d, d);

    auto family_mean = [&](const OperatorFamily& fam) {
        Matrix mean = Matrix::Zero(d, d);
        for (const auto& op : fam.operators) mean += op.matrix();
        return Matrix(mean / static_cast<double>(fam.operators.size()));
    };
    const Matrix f1m = family_mean(w1.f), g1m = family_mean(w1.g);
    const Matrix f2m = family_mean(w2.f), g2m = family_mean(w2.g);

    // alpha from the mean-centered components, accumulated over both families
    double num = 0.0, den = 0.0;
    auto accumulate = [&](const OperatorFamily& fam1, const Matrix& m1, const OperatorFamily& fam2,
                          const Matrix& m2) {
        for (const auto& label : fam1.labels) {
            const Matrix v1 = fam1.at(label).matrix() - m1;
            const Matrix v2 = fam2.at(label).matrix() - m2;
            num += (v1.adjoint() * v2).trace().real();
            den += v1.squaredNorm();
        }
    };
    accumulate(w1.f, f1m, w2.f, f2m);
    accumulate(w1.g, g1m, w2.g, g2m);

    double alpha;
    if (den > tol * tol) {
        alpha = num / den;
    } else {
        // both witnesses constant up to shifts; fall back to the delta relation
        // delta_2 - tr[F2m + G2m] = alpha (delta_1 - tr[F1m + G1m])
        const double c1 = w1.delta - f1m.trace().real() - g1m.trace().real();
        const double c2 = w2.delta - f2m.trace().real() - g2m.trace().real();
        if (std::abs(c1) > tol)
            alpha = c2 / c1;
        else if (std::abs(c2) <= tol)
            alpha = 1.0;
        else
            return std::nullopt;
    }
    if (!(alpha > 0.0)) return std::nullopt;

    const Matrix a = f2m - alpha * f1m;
    const Matrix b = g2m - alpha * g1m;
    auto residual_ok = [&](const OperatorFamily& fam1, const OperatorFamily& fam2,
                           const Matrix& shift) {
        for (const auto& label : fam1.labels) {
            const Matrix r = fam2.at(label).matrix() - alpha * fam1.at(label).matrix() - shift;
            if (r.norm() > tol) return false;
        }
        return true;
    };
    if (!residual_ok(w1.f, w2.f, a) || !residual_ok(w1.g, w2.g, b)) return std::nullopt;
    const double delta_residual =
        std::abs(w2.delta - alpha * w1.delta - (a.trace().real() + b.trace().real()));
    if (delta_residual > tol) return std::nullopt;
    return EquivalenceCertificate{alpha, HermitianOperator(a), HermitianOperator(b)};
}

}  // namespace iwit
