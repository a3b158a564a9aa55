#include <doctest.h>

#include "support.hpp"

using namespace qtest;

namespace {

double entropy_of_blocks(const std::vector<Mat>& blocks) {
    double s = 0.0;
    for (const Mat& b : blocks) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(b), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double x = es.eigenvalues()(i);
            if (x > 1e-15) s -= x * std::log(x);
        }
    }
    return s;
}

// Projector-sandwich oracle: Tr(P_sym rho (x) rho) with P_sym = (1 + swap) / 2.
double symmetric_weight(const Mat& rho) {
    Mat psym = (Mat::Identity(4, 4) + permutation_operator(2, {1, 0})) / 2.0;
    return (psym * kron(rho, rho)).trace().real();
}

}  // namespace

TEST_SUITE("factorization") {
    TEST_CASE("full algebra gives a single block") {
        Rng rng(80);
        StatisticalExperiment exp = build_experiment(random_family(3, 3, rng));
        Factorization f = factorize(exp, StarSubalgebra::full(3));
        CHECK(f.blocks == std::vector<Block>{{3, 1}});
        CHECK(f.residual < 1e-8);
        for (size_t t = 0; t < exp.states.size(); ++t) {
            CHECK(std::abs(f.weights[t][0] - 1.0) < 1e-10);
            CHECK((f.basis_change * f.left[t][0] * f.basis_change.adjoint() - exp.states[t].rho.mat()).norm() < 1e-9);
        }
        CHECK((f.right[0] - Mat::Identity(1, 1)).norm() < 1e-12);
    }

    TEST_CASE("product family over the left factor") {
        Rng rng(81);
        DensityMatrix tau = random_density(3, rng, -1, 0.05);
        std::vector<ThetaState> fam = product_family(2, tau, 3, rng);
        StatisticalExperiment exp = build_experiment(fam);
        StarSubalgebra left(Mat::Identity(6, 6), {Block{2, 3}});
        Factorization f = factorize(exp, left);
        CHECK(f.blocks == std::vector<Block>{{2, 3}});
        CHECK(f.residual < 1e-8);
        CHECK(f.right_variation < 1e-8);
        CHECK((f.right[0] - tau.mat()).norm() < 1e-9);
        for (size_t t = 0; t < fam.size(); ++t) {
            Mat oracle = partial_trace(fam[t].rho.mat(), {2, 3}, {0});
            CHECK((f.left[t][0] - oracle).norm() < 1e-9);
            CHECK(trace_norm(rebuild(f, static_cast<int>(t)) - fam[t].rho.mat()) < 1e-8);
        }
    }

    TEST_CASE("diagonal family over the diagonal algebra") {
        Rng rng(82);
        std::vector<ThetaState> fam;
        std::vector<RVec> probs;
        for (int i = 0; i < 3; ++i) {
            probs.push_back(random_probability(3, rng, 0.05));
            fam.push_back({{double(i)}, DensityMatrix(diag_of(probs.back()))});
        }
        Factorization f = factorize(build_experiment(fam), StarSubalgebra::diagonal(3));
        CHECK(f.blocks.size() == 3);
        for (size_t t = 0; t < fam.size(); ++t) {
            double total = 0.0;
            // Each block is one diagonal entry in the rotated basis.
            for (size_t k = 0; k < f.blocks.size(); ++k) {
                CHECK(f.blocks[k] == Block{1, 1});
                Mat p = f.central_projections[k];
                CHECK(std::abs(f.weights[t][k] - (p * fam[t].rho.mat()).trace().real()) < 1e-12);
                total += f.weights[t][k];
            }
            CHECK(std::abs(total - 1.0) < 1e-10);
        }
        CHECK(f.residual < 1e-8);
    }

    TEST_CASE("factorization holds exactly when the family is sufficient") {
        Rng rng(83);
        const std::vector<std::vector<Block>> shapes{{{2, 1}, {1, 2}}, {{2, 2}}, {{1, 1}, {1, 3}}};
        for (const auto& shape : shapes) {
            StarSubalgebra alg = random_subalgebra(shape, rng);
            StatisticalExperiment good = build_experiment(factorized_family(alg, 3, rng));
            REQUIRE(is_modular_invariant(alg, good.omega));
            Factorization f = factorize(good, alg);
            CHECK(f.sufficient_verdict);
            CHECK(f.residual < 1e-8);
            CHECK(f.right_variation < 1e-8);
            for (const auto& w : f.weights) {
                double total = 0.0;
                for (double x : w) total += x;
                CHECK(std::abs(total - 1.0) < 1e-10);
            }
            // Entropies of the restrictions to the algebra and to its commutant.
            std::vector<Mat> on_alg, on_comm;
            for (size_t k = 0; k < f.blocks.size(); ++k) {
                Mat l = Mat::Zero(f.blocks[k].d, f.blocks[k].d);
                double mass = 0.0;
                for (size_t t = 0; t < good.states.size(); ++t) {
                    l += good.weights[t] * f.weights[t][k] * f.left[t][k];
                    mass += good.weights[t] * f.weights[t][k];
                }
                on_alg.push_back(l);
                on_comm.push_back(mass * f.right[k]);
            }
            const double s = state_entropy(good.omega);
            CHECK(entropy_of_blocks(on_alg) <= s + 1e-9);
            CHECK(entropy_of_blocks(on_comm) <= s + 1e-9);

            // Perturbing the right factor of one member breaks sufficiency and factorization together.
            std::vector<ThetaState> bad_states = good.states;
            Mat inner = alg.basis_change().adjoint() * bad_states[0].rho.mat() * alg.basis_change();
            const Block& b0 = alg.blocks()[0];
            const int size = b0.d * b0.m;
            if (b0.m > 1) {
                Mat rest = partial_trace(Mat(inner.topLeftCorner(size, size)), {b0.d, b0.m}, {0});
                const double w = rest.trace().real();
                inner.topLeftCorner(size, size) = w * kron(rest / w, random_density(b0.m, rng, -1, 0.05).mat());
                bad_states[0].rho = DensityMatrix(Mat(alg.basis_change() * inner * alg.basis_change().adjoint()));
                StatisticalExperiment bad = build_experiment(bad_states);
                if (is_modular_invariant(alg, bad.omega)) {
                    CHECK_FALSE(subalgebra_sufficient(bad, alg).sufficient);
                    CHECK_THROWS_AS(factorize(bad, alg), std::runtime_error);
                }
            }
        }
    }

    TEST_CASE("non-invariant algebra is rejected") {
        Rng rng(84);
        StatisticalExperiment exp = build_experiment(random_family(2, 2, rng));
        CHECK_THROWS_AS(factorize(exp, StarSubalgebra::diagonal(2)), std::invalid_argument);
    }

    TEST_CASE("permutation operators and commutant") {
        Mat swap = permutation_operator(2, {1, 0});
        CHECK((swap * swap - Mat::Identity(4, 4)).norm() < 1e-15);
        CVec v = kron(ket(2, 0), ket(2, 1));
        CHECK((swap * v - kron(ket(2, 1), ket(2, 0))).norm() < 1e-15);
        CHECK(permutation_commutant(2, 2).size() == 10);
        // Schur-Weyl: dim of the commutant of S_3 on (C^2)^3 is 4^2 + 2^2.
        CHECK(permutation_commutant(2, 3).size() == 20);
        Mat cyc = permutation_operator(2, {1, 2, 0});
        Mat cyc3 = cyc * cyc * cyc;
        CHECK((cyc3 - Mat::Identity(8, 8)).norm() < 1e-14);
    }

    TEST_CASE("Schur-Weyl demos") {
        std::vector<DensityMatrix> fam{DensityMatrix(diag2(2.0 / 3.0, 1.0 / 3.0)), DensityMatrix::maximally_mixed(2)};
        Rng rng(85);
        fam.push_back(random_density(2, rng, -1, 0.05));
        SymmetricPowerResult r2 = symmetric_power_experiment(fam, 2);
        CHECK(r2.algebra.blocks() == std::vector<Block>{{3, 1}, {1, 1}});
        CHECK(r2.factorization.residual < 1e-8);
        CHECK(r2.factorization.sufficient_verdict);
        CHECK(std::abs(r2.factorization.weights[0][0] - 7.0 / 9.0) < 1e-10);
        CHECK(std::abs(r2.factorization.weights[1][0] - 0.75) < 1e-10);
        for (size_t t = 0; t < fam.size(); ++t) {
            CHECK(std::abs(r2.factorization.weights[t][0] - symmetric_weight(fam[t].mat())) < 1e-10);
            const double purity = (fam[t].mat() * fam[t].mat()).trace().real();
            CHECK(std::abs(r2.factorization.weights[t][0] - (1 + purity) / 2) < 1e-10);
        }

        SymmetricPowerResult r3 = symmetric_power_experiment(fam, 3);
        CHECK(r3.algebra.blocks() == std::vector<Block>{{4, 1}, {2, 2}});
        CHECK(r3.factorization.residual < 1e-8);
        for (size_t t = 0; t < fam.size(); ++t) {
            Mat cube = kron(kron(fam[t].mat(), fam[t].mat()), fam[t].mat());
            CHECK(trace_norm(rebuild(r3.factorization, static_cast<int>(t)) - cube) < 1e-8);
        }

        SymmetricPowerResult r1 = symmetric_power_experiment(fam, 1);
        CHECK(r1.algebra.blocks() == std::vector<Block>{{2, 1}});
        CHECK_THROWS_AS(symmetric_power_experiment(fam, 5), std::invalid_argument);
    }

    TEST_CASE("pure family dichotomy") {
        CVec plus = (ket(2, 0) + ket(2, 1)) / std::sqrt(2.0);
        PureFamilyReport same = pure_family_analysis({ket(2, 0), ket(2, 0)});
        CHECK(same.support_rank == 1);
        CHECK(same.minimal.algebra.blocks() == std::vector<Block>{{1, 1}});

        PureFamilyReport np = pure_family_analysis({ket(2, 0), plus});
        CHECK_FALSE(np.has_orthogonal_pair);
        CHECK(np.minimal.algebra.blocks() == std::vector<Block>{{2, 1}});
        CHECK(np.single_factor);
        CHECK(np.dichotomy_holds);
        CHECK(np.min_overlap == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

        PureFamilyReport orth = pure_family_analysis({ket(2, 0), ket(2, 1)});
        CHECK(orth.has_orthogonal_pair);
        CHECK(orth.minimal.algebra.blocks() == std::vector<Block>{{1, 1}, {1, 1}});

        Rng rng(86);
        CVec phi = random_unit_vector(3, rng);
        std::vector<CVec> prod{kron(ket(2, 0), phi), kron(ket(2, 1), phi), kron(plus, phi)};
        PureFamilyReport pr = pure_family_analysis(prod, std::make_pair(2, 3));
        CHECK(pr.max_schmidt_rank == 1);
        CHECK(pr.split_detected);
        REQUIRE(pr.right_factor.has_value());
        CHECK(pr.right_fidelity > 1 - 1e-8);
        CHECK(std::norm(pr.right_factor->dot(phi)) > 1 - 1e-8);
        CHECK(pr.dichotomy_holds);

        CVec bell = (kron(ket(2, 0), ket(2, 0)) + kron(ket(2, 1), ket(2, 1))) / std::sqrt(2.0);
        PureFamilyReport ent = pure_family_analysis({bell, kron(ket(2, 0), ket(2, 1))}, std::make_pair(2, 2));
        CHECK(ent.max_schmidt_rank == 2);
        CHECK_FALSE(ent.split_detected);
        CHECK_THROWS_AS(pure_family_analysis({ket(2, 0)}, std::make_pair(3, 3)), std::invalid_argument);
    }
}
