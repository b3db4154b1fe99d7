// ensemble.hpp — state ensembles E(z) = p(z) rho_z, two-block partitioned
// ensembles, the mutually-unbiased-bases ensemble family and the auxiliary
// ensemble that reduces postmeasurement discrimination to a standard one.

#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"

namespace iwit {

/// Labeled family of positive operators with unit total trace. Each operator
/// merges the prior probability and the encoded state.
struct StateEnsemble {
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<HermitianOperator> operators;

    std::size_t size() const { return operators.size(); }

    const HermitianOperator& at(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return operators[i];
        throw LabelMismatch("no ensemble label '" + label + "'");
    }

    double total_trace() const {
        double t = 0.0;
        for (const auto& op : operators) t += op.trace();
        return t;
    }
};

/// State ensemble whose label set is split into two disjoint blocks X and Y
/// (the intermediate information announced by Alice).
struct PartitionedEnsemble {
    StateEnsemble ensemble;
    std::vector<std::string> block_x;
    std::vector<std::string> block_y;

    double block_probability(const std::vector<std::string>& block) const {
        double p = 0.0;
        for (const auto& z : block) p += ensemble.at(z).trace();
        return p;
    }
    double p_x() const { return block_probability(block_x); }
    double p_y() const { return block_probability(block_y); }
};

/// Noise parameters (mu_phi, mu_psi) of the MUB ensemble family; each
/// component lives in [1/(1-d), 1].
struct NoiseVector {
    double mu_phi = 0.0;
    double mu_psi = 0.0;

    bool is_trivial(double tol = 1e-12) const {
        return std::abs(mu_phi) <= tol && std::abs(mu_psi) <= tol;
    }
};

inline void check_mu_range(const NoiseVector& mu, int d) {
    const double lo = 1.0 / (1.0 - d);
    if (mu.mu_phi < lo - 1e-12 || mu.mu_phi > 1.0 + 1e-12 || mu.mu_psi < lo - 1e-12 ||
        mu.mu_psi > 1.0 + 1e-12)
        throw MuOutOfRange("mu components must lie in [1/(1-d), 1]");
}

inline StateEnsemble validate_ensemble(std::vector<HermitianOperator> operators,
                                       std::vector<std::string> labels, double tol = kPsdTol) {
    if (operators.empty()) throw TraceNotOne("an ensemble needs at least one operator");
    if (labels.size() != operators.size())
        throw LabelMismatch("label list and operator list differ in length");
    detail::check_distinct(labels);
    const int d = operators.front().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < operators.size(); ++i) {
        if (operators[i].dim() != d) throw DimensionMismatch("operators have mixed dimensions");
        const double lam = min_eigenvalue(operators[i]);
        if (lam < -tol)
            throw NotPositive("operator '" + labels[i] + "' has eigenvalue " + std::to_string(lam));
        total += operators[i].trace();
    }
    if (std::abs(total - 1.0) > tol)
        throw TraceNotOne("total trace is " + std::to_string(total));
    return StateEnsemble{d, std::move(labels), std::move(operators)};
}

inline PartitionedEnsemble make_partitioned(StateEnsemble e, std::vector<std::string> block_x,
                                            std::vector<std::string> block_y) {
    std::set<std::string> bx(block_x.begin(), block_x.end());
    std::set<std::string> by(block_y.begin(), block_y.end());
    std::set<std::string> all(e.labels.begin(), e.labels.end());
    for (const auto& z : bx)
        if (by.count(z)) throw LabelMismatch("blocks overlap on label '" + z + "'");
    std::set<std::string> merged = bx;
    merged.insert(by.begin(), by.end());
    if (merged != all) throw LabelMismatch("blocks do not cover the label set exactly");
    return PartitionedEnsemble{std::move(e), std::move(block_x), std::move(block_y)};
}

struct Subensembles {
    StateEnsemble on_x;
    StateEnsemble on_y;
    double p_x = 0.0;
    double p_y = 0.0;
};

/// Conditions the ensemble on the block announcement: E_X(x) = E(x)/p(X).
inline Subensembles subensembles(const PartitionedEnsemble& pe) {
    const double px = pe.p_x();
    const double py = pe.p_y();
    if (px <= 0.0 || py <= 0.0)
        throw EmptyBlock("both blocks must carry positive probability");
    auto restrict_to = [&](const std::vector<std::string>& block, double p) {
        std::vector<HermitianOperator> ops;
        ops.reserve(block.size());
        for (const auto& z : block) ops.push_back(pe.ensemble.at(z) * (1.0 / p));
        return StateEnsemble{pe.ensemble.dim, block, std::move(ops)};
    };
    return Subensembles{restrict_to(pe.block_x, px), restrict_to(pe.block_y, py), px, py};
}

inline void check_mutually_unbiased(const Basis& phi, const Basis& psi, double tol = 1e-9) {
    check_orthonormal(phi);
    check_orthonormal(psi);
    const int d = static_cast<int>(phi.size());
    if (static_cast<int>(psi.size()) != d)
        throw DimensionMismatch("the two bases have different sizes");
    double max_dev = 0.0;
    for (int h = 0; h < d; ++h)
        for (int k = 0; k < d; ++k)
            max_dev = std::max(max_dev, std::abs(std::norm(phi[h].dot(psi[k])) - 1.0 / d));
    if (max_dev > tol)
        throw NotMub("max |<phi_h|psi_k>|^2 deviation from 1/d is " + std::to_string(max_dev));
}

inline std::string mub_label_phi(int j) { return "phi_" + std::to_string(j + 1); }
inline std::string mub_label_psi(int j) { return "psi_" + std::to_string(j + 1); }

/// The MUB ensemble family: E_mu(j,l) = (1/2d)[mu_l |l_j><l_j| + (1-mu_l)/d],
/// partitioned into the phi block X and the psi block Y.
inline PartitionedEnsemble mub_ensemble(int d, const NoiseVector& mu, const Basis& phi,
                                        const Basis& psi) {
    check_mutually_unbiased(phi, psi);
    check_mu_range(mu, d);
    std::vector<std::string> labels, bx, by;
    std::vector<HermitianOperator> ops;
    const Matrix id = Matrix::Identity(d, d);
    for (int j = 0; j < d; ++j) {
        labels.push_back(mub_label_phi(j));
        bx.push_back(labels.back());
        ops.emplace_back(
            Matrix(1.0 / (2.0 * d) *
                   (mu.mu_phi * (phi[j] * phi[j].adjoint()) + (1.0 - mu.mu_phi) / d * id)));
    }
    for (int j = 0; j < d; ++j) {
        labels.push_back(mub_label_psi(j));
        by.push_back(labels.back());
        ops.emplace_back(
            Matrix(1.0 / (2.0 * d) *
                   (mu.mu_psi * (psi[j] * psi[j].adjoint()) + (1.0 - mu.mu_psi) / d * id)));
    }
    return make_partitioned(validate_ensemble(std::move(ops), std::move(labels)), std::move(bx),
                            std::move(by));
}

/// Normalizer |X| p(Y) + |Y| p(X) of the auxiliary ensemble.
inline double auxiliary_normalizer(const PartitionedEnsemble& pe) {
    return static_cast<double>(pe.block_x.size()) * pe.p_y() +
           static_cast<double>(pe.block_y.size()) * pe.p_x();
}

/// The auxiliary ensemble on X x Y: E~(x,y) = [E(x) + E(y)] / (|X|p(Y)+|Y|p(X)).
/// Labels are emitted row-major in x, matching product_povm's label order, so
/// a product POVM on the same blocks discriminates it directly.
inline StateEnsemble auxiliary_ensemble(const PartitionedEnsemble& pe) {
    const double norm = auxiliary_normalizer(pe);
    std::vector<std::string> labels;
    std::vector<HermitianOperator> ops;
    for (const auto& x : pe.block_x)
        for (const auto& y : pe.block_y) {
            labels.push_back("(" + x + "," + y + ")");
            ops.push_back((pe.ensemble.at(x) + pe.ensemble.at(y)) * (1.0 / norm));
        }
    return validate_ensemble(std::move(ops), std::move(labels));
}

}  // namespace iwit
