#include <doctest.h>

#include "support.hpp"

using namespace qtest;

namespace {

// Qubit family whose members differ only off the diagonal.
std::vector<ThetaState> off_diagonal_family() {
    std::vector<ThetaState> fam;
    for (double th : {0.0, 0.5}) {
        Mat r = 0.5 * (Mat::Identity(2, 2) + 0.3 * pauli_z() + th * pauli_x());
        fam.push_back({{th}, DensityMatrix(r)});
    }
    return fam;
}

std::vector<ThetaState> diagonal_family(const std::vector<double>& thetas) {
    std::vector<ThetaState> fam;
    for (double th : thetas) fam.push_back({{th}, DensityMatrix(diag2(th, 1.0 - th))});
    return fam;
}

double recovery_error(const SufficiencyVerdict& v, const StatisticalExperiment& exp, const QuantumChannel& ch) {
    double worst = 0.0;
    for (const ThetaState& s : exp.states)
        worst = std::max(worst, trace_norm(v.witness->schrodinger(ch.schrodinger(s.rho.mat())) - s.rho.mat()));
    return worst;
}

bool all_criteria(const SufficiencyVerdict& v, bool expected) {
    for (const auto& [name, c] : v.per_criterion)
        if (c.pass != expected) return false;
    return true;
}

}  // namespace

TEST_SUITE("sufficiency") {
    TEST_CASE("experiment assembly") {
        Rng rng(50);
        DensityMatrix r = random_density(3, rng);
        StatisticalExperiment one = build_experiment({{{0.0}, r}});
        CHECK((one.omega.mat() - r.mat()).norm() < 1e-15);

        StatisticalExperiment orth = build_experiment({{{0.0}, DensityMatrix::pure(ket(2, 0))}, {{1.0}, DensityMatrix::pure(ket(2, 1))}});
        CHECK(orth.omega.faithful());
        CHECK((orth.omega.mat() - Mat::Identity(2, 2) / 2.0).norm() < 1e-15);

        std::vector<ThetaState> fam = random_family(3, 3, rng);
        StatisticalExperiment w = build_experiment(fam, {0.5, 0.3, 0.2});
        Mat direct = 0.5 * fam[0].rho.mat() + 0.3 * fam[1].rho.mat() + 0.2 * fam[2].rho.mat();
        CHECK((w.omega.mat() - direct).norm() < 1e-12);

        CHECK_THROWS_AS(build_experiment({}), std::invalid_argument);
        CHECK_THROWS_AS(build_experiment(fam, {0.5, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(build_experiment(fam, {0.5, 0.6, -0.1}), std::invalid_argument);
    }

    TEST_CASE("subalgebra criteria: examples") {
        Rng rng(51);
        StatisticalExperiment exp = build_experiment(random_family(3, 3, rng));
        SufficiencyVerdict full = subalgebra_sufficient(exp, StarSubalgebra::full(3));
        CHECK(full.sufficient);
        CHECK(full.consistent);
        CHECK(all_criteria(full, true));

        StatisticalExperiment diag = build_experiment(diagonal_family({0.2, 0.5, 0.7}));
        SufficiencyVerdict dv = subalgebra_sufficient(diag, StarSubalgebra::diagonal(2));
        CHECK(dv.sufficient);
        CHECK(dv.consistent);
        for (const auto& [name, c] : dv.per_criterion) CHECK(c.residual < 1e-10);

        StatisticalExperiment off = build_experiment(off_diagonal_family());
        SufficiencyVerdict ov = subalgebra_sufficient(off, StarSubalgebra::diagonal(2));
        CHECK_FALSE(ov.sufficient);
        CHECK(ov.consistent);
        CHECK(all_criteria(ov, false));
        // Entropy gap computed directly: the diagonal restrictions coincide.
        double gap = relative_entropy(off.states[1].rho, off.states[0].rho);
        CHECK(gap > 0.05);
        CHECK(relative_entropy(DensityMatrix(Mat(off.states[1].rho.mat().diagonal().asDiagonal())),
                               DensityMatrix(Mat(off.states[0].rho.mat().diagonal().asDiagonal()))) < 1e-14);
    }

    TEST_CASE("subalgebra criteria on factorized families") {
        Rng rng(52);
        const std::vector<std::vector<Block>> shapes{{{2, 1}, {1, 2}}, {{2, 2}}, {{1, 2}, {1, 1}}};
        for (const auto& shape : shapes) {
            StarSubalgebra alg = random_subalgebra(shape, rng);
            StatisticalExperiment exp = build_experiment(factorized_family(alg, 3, rng));
            SufficiencyVerdict v = subalgebra_sufficient(exp, alg);
            CHECK(v.sufficient);
            CHECK(v.consistent);
            REQUIRE(v.witness.has_value());
            CHECK(v.witness_residual < 1e-8);
            // Enlarging the algebra keeps sufficiency.
            CHECK(subalgebra_sufficient(exp, StarSubalgebra::full(alg.ambient_dim())).sufficient);
            // Restriction consistency with the channel picture.
            CHECK(channel_sufficient(exp, trace_conditional_expectation(alg)).sufficient);
        }
        StarSubalgebra alg = random_subalgebra({{2, 1}, {1, 2}}, rng);
        StatisticalExperiment generic = build_experiment(random_family(4, 3, rng));
        SufficiencyVerdict gv = subalgebra_sufficient(generic, alg);
        CHECK_FALSE(gv.sufficient);
        CHECK(gv.consistent);
        CHECK_FALSE(channel_sufficient(generic, trace_conditional_expectation(alg)).sufficient);
    }

    TEST_CASE("subalgebra criteria with a non-faithful dominating state") {
        std::vector<ThetaState> fam;
        Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
        a(0, 0) = 0.3;
        a(1, 1) = 0.7;
        b(0, 0) = 0.6;
        b(1, 1) = 0.4;
        fam.push_back({{0.0}, DensityMatrix(a)});
        fam.push_back({{1.0}, DensityMatrix(b)});
        StatisticalExperiment exp = build_experiment(fam);
        SufficiencyVerdict v = subalgebra_sufficient(exp, StarSubalgebra::diagonal(3));
        CHECK(v.sufficient);
        CHECK(v.consistent);

        Rng rng(53);
        DensityMatrix tau = random_density(3, rng, 2);
        StatisticalExperiment prod = build_experiment(product_family(2, tau, 2, rng));
        StarSubalgebra left(Mat::Identity(6, 6), {Block{2, 3}});
        CHECK_THROWS_AS(subalgebra_sufficient(prod, left), std::invalid_argument);
    }

    TEST_CASE("channel criteria: examples") {
        Rng rng(54);
        ChannelInstance u = unitary_instance(3, rng);
        SufficiencyVerdict uv = channel_sufficient(u.exp, u.channel);
        CHECK(uv.sufficient);
        CHECK(uv.consistent);
        CHECK(all_criteria(uv, true));
        CHECK(recovery_error(uv, u.exp, u.channel) < 1e-8);

        DensityMatrix tau = random_density(2, rng, -1, 0.05);
        StatisticalExperiment pexp = build_experiment(product_family(2, tau, 3, rng));
        QuantumChannel tr = QuantumChannel::partial_trace({2, 2}, {0});
        SufficiencyVerdict pv = channel_sufficient(pexp, tr);
        CHECK(pv.sufficient);
        CHECK(pv.consistent);
        CHECK(recovery_error(pv, pexp, tr) < 1e-9);
        // Product-state recovery oracle x -> x (x) tau.
        DensityMatrix y = random_density(2, rng);
        CHECK((pv.witness->schrodinger(y.mat()) - kron(y.mat(), tau.mat())).norm() < 1e-9);

        ChannelInstance c = correlated_trace_out_instance(rng);
        SufficiencyVerdict cv = channel_sufficient(c.exp, c.channel);
        CHECK_FALSE(cv.sufficient);
        CHECK(cv.consistent);
        double before = relative_entropy(c.exp.states[0].rho, c.exp.states[1].rho);
        double after = relative_entropy(schrodinger_apply(c.channel, c.exp.states[0].rho),
                                        schrodinger_apply(c.channel, c.exp.states[1].rho));
        CHECK(before - after > 1e-3);
    }

    TEST_CASE("channel criteria: depolarizing and non-faithful supports") {
        Rng rng(55);
        for (double eps : {0.3, 0.7}) {
            ChannelInstance d = depolarizing_instance(3, eps, rng);
            SufficiencyVerdict v = channel_sufficient(d.exp, d.channel);
            CHECK_FALSE(v.sufficient);
            CHECK(v.consistent);
            CHECK(all_criteria(v, false));
        }
        DensityMatrix tau = random_density(3, rng, 2);
        StatisticalExperiment exp = build_experiment(product_family(2, tau, 3, rng));
        QuantumChannel tr = QuantumChannel::partial_trace({2, 3}, {0});
        SufficiencyVerdict v = channel_sufficient(exp, tr);
        CHECK(v.sufficient);
        CHECK(v.consistent);
        CHECK(v.witness_residual < 1e-8);
        CHECK(recovery_error(v, exp, tr) < 1e-8);
    }

    TEST_CASE("matrix logarithm identity") {
        Rng rng(56);
        ChannelInstance u = unitary_instance(3, rng);
        CHECK(matsuff_check(u.exp, u.channel).residual < 1e-9);
        ChannelInstance p = product_trace_out_instance(2, 2, rng);
        MatsuffResult pr = matsuff_check(p.exp, p.channel);
        CHECK(pr.pass);
        CHECK(pr.residual < 1e-9);
        ChannelInstance c = correlated_trace_out_instance(rng);
        MatsuffResult cr = matsuff_check(c.exp, c.channel);
        CHECK_FALSE(cr.pass);
        CHECK(cr.residual > 0.01);
    }

    TEST_CASE("minimal sufficient subalgebra") {
        Rng rng(57);
        MinimalSufficient single = minimal_sufficient_subalgebra(build_experiment({{{0.0}, random_density(3, rng, 2)}}));
        CHECK(single.algebra.blocks() == std::vector<Block>{{1, 2}});
        CHECK(single.support.cols() == 2);
        CHECK(single.validated);

        MinimalSufficient diag = minimal_sufficient_subalgebra(build_experiment(diagonal_family({0.2, 0.6})));
        CHECK(diag.algebra.blocks() == std::vector<Block>{{1, 1}, {1, 1}});
        CHECK(diag.algebra.residual(pauli_z()) < 1e-9);
        CHECK(diag.validated);
        CHECK(diag.minimal_spot_check);

        CVec plus = (ket(2, 0) + ket(2, 1)) / std::sqrt(2.0);
        StatisticalExperiment pure = build_experiment({{{0.0}, DensityMatrix::pure(ket(2, 0))}, {{1.0}, DensityMatrix::pure(plus)}});
        MinimalSufficient pm = minimal_sufficient_subalgebra(pure);
        CHECK(pm.algebra.blocks() == std::vector<Block>{{2, 1}});
        CHECK(pm.validated);

        StarSubalgebra alg = random_subalgebra({{2, 1}, {1, 2}}, rng);
        StatisticalExperiment fexp = build_experiment(factorized_family(alg, 4, rng));
        MinimalSufficient fm = minimal_sufficient_subalgebra(fexp);
        CHECK(fm.validated);
        CHECK(fm.minimal_spot_check);
        // The minimal algebra sits inside every sufficient one.
        for (const Mat& e : fm.algebra.span().basis) CHECK(alg.residual(Mat(fm.support * e * fm.support.adjoint())) < 1e-7);
    }

    TEST_CASE("criteria concordance on generated instances") {
        Rng rng(58);
        std::vector<ChannelInstance> channels{unitary_instance(2, rng), unitary_instance(4, rng),
                                              product_trace_out_instance(2, 3, rng), depolarizing_instance(2, 0.3, rng),
                                              depolarizing_instance(3, 0.7, rng), correlated_trace_out_instance(rng)};
        for (const ChannelInstance& ci : channels) {
            CAPTURE(ci.label);
            SufficiencyVerdict v = channel_sufficient(ci.exp, ci.channel);
            CHECK(v.consistent);
            CHECK(v.sufficient == ci.expected_sufficient);
        }
        std::vector<SubalgebraInstance> algebras{diagonal_instance(3, rng), off_diagonal_instance(3, rng)};
        for (const SubalgebraInstance& si : algebras) {
            CAPTURE(si.label);
            SufficiencyVerdict v = subalgebra_sufficient(si.exp, si.algebra);
            CHECK(v.consistent);
            CHECK(v.sufficient == si.expected_sufficient);
        }
    }
}
