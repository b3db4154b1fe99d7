#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "iwit/povm.hpp"
#include "test_helpers.hpp"

using namespace iwit;
using Catch::Approx;

TEST_CASE("validate_povm accepts measurements and rejects defects") {
    const auto single = validate_povm({HermitianOperator::identity(2)}, {"only"});
    CHECK(single.size() == 1);

    Ket e0 = Ket::Zero(2), e1 = Ket::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    const auto sharp = validate_povm(
        {HermitianOperator::projector(e0), HermitianOperator::projector(e1)}, {"0", "1"});
    CHECK(sharp.size() == 2);

    CHECK_THROWS_AS(validate_povm({HermitianOperator::projector(e0) * 1.1,
                                   HermitianOperator::projector(e1)},
                                  {"0", "1"}),
                    NotNormalized);
    CHECK_THROWS_AS(validate_povm({HermitianOperator::projector(e0) * 2.0,
                                   HermitianOperator::projector(e1) -
                                       HermitianOperator::projector(e0)},
                                  {"0", "1"}),
                    NotPositive);
    CHECK_THROWS_AS(validate_povm({HermitianOperator::identity(2)}, {"a", "b"}), LabelMismatch);
}

TEST_CASE("uniform_povm spreads the identity") {
    const auto u2 = uniform_povm({"a", "b"}, 2);
    for (const auto& e : u2.effects)
        CHECK((e.matrix() - Matrix::Identity(2, 2) / 2.0).norm() == Approx(0.0).margin(1e-15));

    const auto u3 = uniform_povm({"a", "b", "c"}, 4);
    for (const auto& e : u3.effects)
        CHECK((e.matrix() - Matrix::Identity(4, 4) / 3.0).norm() == Approx(0.0).margin(1e-15));

    const auto u1 = uniform_povm({"z"}, 2);
    CHECK((u1.effects[0].matrix() - Matrix::Identity(2, 2)).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("noisy_basis_povm covers the admissible gamma interval") {
    testing::Rng rng(5);
    const Basis basis = testing::random_orthonormal_basis(3, rng);

    const auto sharp = noisy_basis_povm(basis, 1.0);
    for (int h = 0; h < 3; ++h)
        CHECK((sharp.effects[h].matrix() - basis[h] * basis[h].adjoint()).norm() ==
              Approx(0.0).margin(1e-12));

    const auto uniform = noisy_basis_povm(basis, 0.0);
    for (const auto& e : uniform.effects)
        CHECK((e.matrix() - Matrix::Identity(3, 3) / 3.0).norm() == Approx(0.0).margin(1e-12));

    const auto floor = noisy_basis_povm(basis, -0.5);  // gamma = 1/(1-d) for d = 3
    for (const auto& e : floor.effects) CHECK(min_eigenvalue(e) >= -1e-12);

    CHECK_THROWS_AS(noisy_basis_povm(basis, -0.51), GammaOutOfRange);
    CHECK_THROWS_AS(noisy_basis_povm(basis, 1.01), GammaOutOfRange);
}

TEST_CASE("noisy_basis_povm effects commute pairwise") {
    testing::Rng rng(6);
    for (int d : {2, 4}) {
        const Basis basis = testing::random_orthonormal_basis(d, rng);
        const auto p = noisy_basis_povm(basis, 0.63);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j)
                CHECK((p.effects[i].matrix() * p.effects[j].matrix() -
                       p.effects[j].matrix() * p.effects[i].matrix())
                          .norm() <= 1e-10);
    }
}

TEST_CASE("margins of the uniform product POVM are uniform") {
    std::vector<HermitianOperator> effects(4, HermitianOperator::identity(2) * 0.25);
    const Povm m = product_povm(std::move(effects), {"x1", "x2"}, {"y1", "y2"});
    const MeasurementPair mp = margins(m);
    for (const auto& e : mp.a.effects)
        CHECK((e.matrix() - Matrix::Identity(2, 2) / 2.0).norm() == Approx(0.0).margin(1e-12));
    for (const auto& e : mp.b.effects)
        CHECK((e.matrix() - Matrix::Identity(2, 2) / 2.0).norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("margins of a point-mass product recover the original POVM") {
    testing::Rng rng(11);
    const Povm a = testing::random_povm(2, 2, rng, "x");
    // M(x, y) = A(x) when y = y1, zero otherwise
    std::vector<HermitianOperator> effects{a.effects[0], HermitianOperator::zero(2), a.effects[1],
                                           HermitianOperator::zero(2)};
    const Povm m = product_povm(std::move(effects), a.outcomes, {"y1", "y2"});
    const MeasurementPair mp = margins(m);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((mp.a.effects[i].matrix() - a.effects[i].matrix()).norm() ==
              Approx(0.0).margin(1e-12));
    CHECK((mp.b.effect("y1").matrix() - Matrix::Identity(2, 2)).norm() ==
          Approx(0.0).margin(1e-12));
    CHECK((mp.b.effect("y2").matrix()).norm() == Approx(0.0).margin(1e-12));
}

TEST_CASE("margins demand a full product structure") {
    const Povm plain = uniform_povm({"a", "b"}, 2);
    CHECK_THROWS_AS(margins(plain), NotProductLabeled);

    Povm broken = uniform_povm({"a", "b"}, 2);
    broken.outcome_pairs = std::vector<LabelPair>{{"x1", "y1"}, {"x2", "y2"}};  // 2 of 4 cells
    CHECK_THROWS_AS(margins(broken), NotProductLabeled);
}

TEST_CASE("margins of random product POVMs are valid and trace-linear") {
    testing::Rng rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 2 + static_cast<int>(rng() % 2);
        const Povm raw = testing::random_povm(6, d, rng);
        const Povm joint = product_povm(raw.effects, {"x1", "x2"}, {"y1", "y2", "y3"});
        const MeasurementPair mp = margins(joint);  // validate_povm runs inside

        const auto rho = testing::random_psd(d, rng);
        for (std::size_t i = 0; i < mp.a.size(); ++i) {
            double direct = trace_pair(rho, mp.a.effects[i]);
            double summed = 0.0;
            for (std::size_t k = 0; k < joint.size(); ++k)
                if ((*joint.outcome_pairs)[k].first == mp.a.outcomes[i])
                    summed += trace_pair(rho, joint.effects[k]);
            CHECK(std::abs(direct - summed) <= 1e-10);
        }
    }
}
