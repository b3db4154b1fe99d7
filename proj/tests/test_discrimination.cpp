#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "iwit/discrimination.hpp"
#include "iwit/mub.hpp"
#include "test_helpers.hpp"

using namespace iwit;
using Catch::Approx;

namespace {

Ket basis_ket(int d, int i) {
    Ket e = Ket::Zero(d);
    e(i) = 1.0;
    return e;
}

StateEnsemble two_state_ensemble(const Ket& a, const Ket& b) {
    return validate_ensemble(
        {HermitianOperator::projector(a) * 0.5, HermitianOperator::projector(b) * 0.5},
        {"a", "b"});
}

// Helstrom oracle: 1/2 (1 + ||p1 rho1 - p2 rho2||_1) via eigenvalues.
double helstrom(const StateEnsemble& e) {
    const Matrix diff = e.operators[0].matrix() - e.operators[1].matrix();
    const Eigen::VectorXd ev = eigenvalues_of(HermitianOperator(diff));
    return 0.5 * (1.0 + ev.cwiseAbs().sum());
}

// Analytic-route ensembles: operators a |e_z><e_z| + b id over a random basis.
StateEnsemble spiked_basis_ensemble(int d, double weight, testing::Rng& rng) {
    const Basis basis = testing::random_orthonormal_basis(d, rng);
    const double a = weight / d;
    const double b = (1.0 - weight) / (d * d);
    std::vector<HermitianOperator> ops;
    std::vector<std::string> labels;
    for (int z = 0; z < d; ++z) {
        ops.emplace_back(
            Matrix(a * (basis[z] * basis[z].adjoint()) + b * Matrix::Identity(d, d)));
        labels.push_back("z" + std::to_string(z + 1));
    }
    return validate_ensemble(std::move(ops), std::move(labels));
}

}  // namespace

TEST_CASE("pguess_with evaluates the success probability") {
    const auto e = two_state_ensemble(basis_ket(2, 0), basis_ket(2, 1));
    const Povm sharp = validate_povm({HermitianOperator::projector(basis_ket(2, 0)),
                                      HermitianOperator::projector(basis_ket(2, 1))},
                                     {"a", "b"});
    CHECK(pguess_with(e, sharp) == Approx(1.0).margin(1e-12));
    CHECK(pguess_with(e, uniform_povm({"a", "b"}, 2)) == Approx(0.5).margin(1e-12));

    // phi-subensemble of the MUB family at d=3, mu_phi = 0.5, measured sharply
    const MubPair mub = fourier_mub(3);
    const auto pe = mub_ensemble(3, NoiseVector{0.5, 0.5}, mub.phi, mub.psi);
    const auto sub = subensembles(pe);
    const Povm sharp_phi = noisy_basis_povm(mub.phi, 1.0, sub.on_x.labels);
    CHECK(pguess_with(sub.on_x, sharp_phi) == Approx(0.5 + 0.5 / 3.0).margin(1e-12));

    CHECK_THROWS_AS(pguess_with(e, uniform_povm({"a", "c"}, 2)), LabelMismatch);
}

TEST_CASE("pguess_analytic handles the largest-eigenvalue route") {
    const MubPair mub2 = fourier_mub(2);
    const auto sharp_sub =
        subensembles(mub_ensemble(2, NoiseVector{1.0, 1.0}, mub2.phi, mub2.psi)).on_x;
    const auto res = pguess_analytic(sharp_sub);
    REQUIRE(res.has_value());
    CHECK(res->value == Approx(1.0).margin(1e-12));
    CHECK(res->method == SolveMethod::analytic);

    const MubPair mub3 = fourier_mub(3);
    const auto half_sub =
        subensembles(mub_ensemble(3, NoiseVector{0.5, 0.5}, mub3.phi, mub3.psi)).on_x;
    const auto res3 = pguess_analytic(half_sub);
    REQUIRE(res3.has_value());
    CHECK(res3->value == Approx(2.0 / 3.0).margin(1e-12));

    const auto aux = auxiliary_ensemble(mub_ensemble(2, NoiseVector{1.0, 1.0}, mub2.phi, mub2.psi));
    const auto res_aux = pguess_analytic(aux);
    REQUIRE(res_aux.has_value());
    CHECK(analytic_nu(aux) == Approx(2.0).margin(1e-9));  // nu = d in case C1
    CHECK(res_aux->value == Approx((2.0 + std::sqrt(2.0)) / 8.0).margin(1e-12));

    // a generic ensemble fails the projector-sum condition
    testing::Rng rng(3);
    const auto generic = testing::random_ensemble(3, 2, rng);
    CHECK_FALSE(pguess_analytic(generic).has_value());
}

TEST_CASE("pguess_analytic returns the optimal measurement") {
    testing::Rng rng(17);
    for (int rep = 0; rep < 6; ++rep) {
        const int d = 2 + rep % 3;
        std::uniform_real_distribution<double> unif(0.2, 0.9);
        const auto e = spiked_basis_ensemble(d, unif(rng), rng);
        const auto res = pguess_analytic(e);
        REQUIRE(res.has_value());
        REQUIRE(res->optimal_povm.has_value());
        CHECK(pguess_with(e, *res->optimal_povm) == Approx(res->value).margin(res->residual + 1e-9));
    }
}

TEST_CASE("pguess_iterative reaches certified optima") {
    const auto orth = two_state_ensemble(basis_ket(2, 0), basis_ket(2, 1));
    const auto res = pguess_iterative(orth);
    CHECK(res.value == Approx(1.0).margin(1e-8));
    CHECK(res.method == SolveMethod::iterative);

    // two equiprobable pure states with overlap 1/2
    Ket a = basis_ket(2, 0);
    Ket b(2);
    b << 0.5, std::sqrt(3.0) / 2.0;
    const auto tilted = two_state_ensemble(a, b);
    const auto res2 = pguess_iterative(tilted);
    CHECK(res2.value == Approx(0.5 * (1.0 + std::sqrt(0.75))).margin(1e-7));
    CHECK(res2.value == Approx(0.9330127018922193).margin(1e-7));
    CHECK(res2.value == Approx(helstrom(tilted)).margin(1e-7));

    // agreement with the analytic route on the auxiliary MUB ensemble
    const MubPair mub = fourier_mub(2);
    const auto aux = auxiliary_ensemble(mub_ensemble(2, NoiseVector{1.0, 1.0}, mub.phi, mub.psi));
    const auto analytic = pguess_analytic(aux);
    REQUIRE(analytic.has_value());
    CHECK(pguess_iterative(aux).value == Approx(analytic->value).margin(1e-7));
}

TEST_CASE("pguess_iterative certificates and bounds hold on random ensembles") {
    testing::Rng rng(23);
    for (int rep = 0; rep < 12; ++rep) {
        const int d = 2 + rep % 2;
        const int n = 2 + rep % 3;
        const auto e = testing::random_ensemble(n, d, rng);
        const auto res = pguess_iterative(e);
        REQUIRE(res.optimal_povm.has_value());
        CHECK(pguess_with(e, *res.optimal_povm) == Approx(res.value).margin(res.residual + 1e-9));

        // dual certificate: K - E(z) >= -tol for all z
        Matrix k = Matrix::Zero(d, d);
        for (std::size_t z = 0; z < e.size(); ++z)
            k += e.operators[z].matrix() * res.optimal_povm->effect(e.labels[z]).matrix();
        k = ((k + k.adjoint()) / 2.0).eval();
        for (std::size_t z = 0; z < e.size(); ++z)
            CHECK(min_eigenvalue(HermitianOperator(Matrix(k - e.operators[z].matrix()))) >= -1e-8);

        // lower bounds: best single-label guess and the uniform measurement
        double best_trace = 0.0;
        for (const auto& op : e.operators) best_trace = std::max(best_trace, op.trace());
        CHECK(res.value >= best_trace - 1e-9);
        CHECK(res.value >= 1.0 / n - 1e-9);
    }
}

TEST_CASE("pguess_iterative throws MaxIterExceeded with diagnostics") {
    testing::Rng rng(47);
    const auto e = testing::random_ensemble(4, 3, rng);
    REQUIRE(pguess_iterative(e).iterations > 3);  // genuinely iterative instance
    try {
        pguess_iterative(e, SolverOptions{2, 1e-13});
        FAIL("expected MaxIterExceeded");
    } catch (const MaxIterExceeded& err) {
        CHECK(err.best_value > 0.25);
        CHECK(err.residual > 1e-13);
    }
}

TEST_CASE("analytic and iterative solvers agree where the analytic route applies") {
    testing::Rng rng(29);
    std::uniform_real_distribution<double> unif(0.1, 0.95);
    int checked = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 2 + rep % 2;
        StateEnsemble e = [&]() {
            const double lo = 1.0 / (1.0 - d) + 0.05;
            std::uniform_real_distribution<double> mu_dist(lo, 1.0);
            switch (rep % 3) {
                case 0: return spiked_basis_ensemble(d, unif(rng), rng);
                case 1: {
                    const MubPair mub = fourier_mub(d);
                    const Matrix u = testing::random_unitary(d, rng);
                    Basis phi, psi;
                    for (int i = 0; i < d; ++i) {
                        phi.push_back(u * mub.phi[i]);
                        psi.push_back(u * mub.psi[i]);
                    }
                    return subensembles(
                               mub_ensemble(d, NoiseVector{mu_dist(rng), mu_dist(rng)}, phi, psi))
                        .on_x;
                }
                default: {
                    const MubPair mub = fourier_mub(d);
                    return auxiliary_ensemble(
                        mub_ensemble(d, NoiseVector{mu_dist(rng), mu_dist(rng)}, mub.phi, mub.psi));
                }
            }
        }();
        const auto analytic = pguess_analytic(e);
        REQUIRE(analytic.has_value());
        const auto iterative = pguess_iterative(e);
        CHECK(std::abs(analytic->value - iterative.value) < 1e-6);
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("p_prior_with matches hand-evaluated pairs") {
    const MubPair mub = fourier_mub(2);
    const auto pe = mub_ensemble(2, NoiseVector{1.0, 1.0}, mub.phi, mub.psi);

    CHECK(p_prior_with(pe, noisy_mub_pair(mub, SmearingVector{1.0, 1.0})) ==
          Approx(1.0).margin(1e-12));
    CHECK(p_prior_with(pe, noisy_mub_pair(mub, SmearingVector{0.0, 0.0})) ==
          Approx(0.5).margin(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(p_prior_with(pe, noisy_mub_pair(mub, SmearingVector{r, r})) ==
          Approx((2.0 + std::sqrt(2.0)) / 4.0).margin(1e-12));
}

TEST_CASE("p_prior_opt agrees with the closed form on the MUB family") {
    const MubPair mub2 = fourier_mub(2);
    CHECK(p_prior_opt(mub_ensemble(2, NoiseVector{1.0, 1.0}, mub2.phi, mub2.psi)) ==
          Approx(1.0).margin(1e-9));
    CHECK(p_prior_opt(mub_ensemble(2, NoiseVector{0.5, 0.5}, mub2.phi, mub2.psi)) ==
          Approx(0.75).margin(1e-9));

    const MubPair mub3 = fourier_mub(3);
    CHECK(p_prior_opt(mub_ensemble(3, NoiseVector{-0.3, -0.4}, mub3.phi, mub3.psi)) ==
          Approx(0.45).margin(1e-9));

    const auto full = p_prior_opt_full(mub_ensemble(3, NoiseVector{0.5, -0.2}, mub3.phi, mub3.psi));
    CHECK(full.part_x.method == SolveMethod::analytic);
    CHECK(full.part_y.method == SolveMethod::analytic);
}

TEST_CASE("p_post_opt reproduces the closed form and its optimizer margins") {
    const MubPair mub2 = fourier_mub(2);
    const auto pe2 = mub_ensemble(2, NoiseVector{1.0, 1.0}, mub2.phi, mub2.psi);
    const auto post2 = p_post_opt(pe2);
    CHECK(post2.value == Approx((2.0 + std::sqrt(2.0)) / 4.0).margin(1e-9));
    CHECK(post2.method == SolveMethod::analytic);

    REQUIRE(post2.optimal_povm.has_value());
    const MeasurementPair opt_margins = margins(*post2.optimal_povm);
    CHECK(p_prior_with(pe2, opt_margins) == Approx(post2.value).margin(1e-8));
    // the margins are the gamma = 1/sqrt(2) smearings
    const auto expect = noisy_mub_pair(mub2, optimal_margins_mub(2, NoiseVector{1.0, 1.0}));
    for (int j = 0; j < 2; ++j)
        CHECK((opt_margins.a.effect(mub_label_phi(j)).matrix() -
               expect.a.effect(mub_label_phi(j)).matrix())
                  .norm() <= 1e-9);

    const MubPair mub3 = fourier_mub(3);
    CHECK(p_post_opt(mub_ensemble(3, NoiseVector{1.0, 1.0}, mub3.phi, mub3.psi)).value ==
          Approx(0.5 * (1.0 + 1.0 / std::sqrt(3.0))).margin(1e-9));

    const auto pe_c2 = mub_ensemble(3, NoiseVector{-0.3, -0.4}, mub3.phi, mub3.psi);
    CHECK(p_post_opt(pe_c2).value == Approx(0.45).margin(1e-9));
    CHECK(p_post_opt(pe_c2).value == Approx(p_prior_opt(pe_c2)).margin(1e-8));
}

TEST_CASE("postmeasurement never beats premeasurement information") {
    testing::Rng rng(37);
    for (int rep = 0; rep < 15; ++rep) {
        const int d = 2 + rep % 2;
        const auto pe = testing::random_partitioned(2, 2, d, rng);
        const double post = p_post_opt(pe, SolverOptions{20000, 1e-9}).value;
        const double prior = p_prior_opt(pe, SolverOptions{20000, 1e-9});
        CHECK(post <= prior + 1e-8);
    }
}
