#include <doctest.h>

#include "qsuff/json_io.hpp"
#include "support.hpp"

using namespace qtest;

TEST_SUITE("json_io") {
    TEST_CASE("matrix parsing") {
        Json j = Json::parse(R"([[1, [0, 2]], [[0, -2], 3]])");
        Mat m = matrix_from_json(j);
        CHECK(m(0, 1) == cplx(0, 2));
        CHECK(m(1, 1) == cplx(3, 0));
        CHECK((matrix_from_json(matrix_to_json(m)) - m).norm() == 0.0);
        CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 0, 0], [0, 1, 0]]")), InputError);
        CHECK_NOTHROW(matrix_from_json(Json::parse("[[1, 0, 0], [0, 1, 0]]"), false));
        CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 0], [0]]")), InputError);
        CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([["a"]])")), InputError);
        CHECK_THROWS_AS(matrix_from_json(Json::parse("[]")), InputError);
        CHECK_THROWS_AS(real_matrix_from_json(Json::parse("[[[0, 1]]]")), InputError);
    }

    TEST_CASE("experiment documents") {
        Json doc = Json::parse(R"({"dim": 2, "states": [
            {"theta": [0], "density": [[0.5, 0], [0, 0.5]]},
            {"theta": [1], "density": [[0.75, 0], [0, 0.25]]}]})");
        StatisticalExperiment exp = experiment_from_json(doc);
        CHECK(exp.states.size() == 2);
        CHECK(std::abs(exp.omega.mat()(0, 0).real() - 0.625) < 1e-15);
        doc["dim"] = 3;
        CHECK_THROWS_AS(experiment_from_json(doc), InputError);
        CHECK_THROWS_AS(experiment_from_json(Json::parse(R"({"dim": 2})")), InputError);
        // Non-positive densities are rejected by the state type.
        Json bad = Json::parse(R"({"dim": 2, "states": [{"density": [[1.5, 0], [0, -0.5]]}]})");
        CHECK_THROWS_AS(experiment_from_json(bad), std::invalid_argument);
    }

    TEST_CASE("channel and subalgebra documents") {
        QuantumChannel tr = channel_from_json(Json::parse(R"({"type": "partial_trace", "dims": [2, 3], "keep": [0]})"));
        CHECK(tr.in_dim() == 6);
        CHECK(tr.out_dim() == 2);
        QuantumChannel round = channel_from_json(channel_to_json(tr));
        CHECK((round.choi() - tr.choi()).norm() < 1e-14);
        CHECK_THROWS_AS(channel_from_json(Json::parse(R"({"type": "teleport"})")), InputError);

        CHECK(subalgebra_from_json(Json::parse(R"({"type": "diagonal"})"), 3).dimension() == 3);
        CHECK(subalgebra_from_json(Json::parse(R"({"tensor_left": [2, 3]})"), 6).blocks() == std::vector<Block>{{2, 3}});
        CHECK_THROWS_AS(subalgebra_from_json(Json::parse(R"({"tensor_left": [2, 2]})"), 6), InputError);
        CHECK_THROWS_AS(subalgebra_from_json(Json::parse(R"({"type": "full", "dim": 2})"), 3), InputError);
    }

    TEST_CASE("gaussian and classical documents") {
        GaussianScenario sc = scenario_from_json(
            Json::parse(R"({"alpha": [[1, 0], [0, 1]], "sigma": [[0, 0.5], [-0.5, 0]], "n": 2, "m_list": [[0, 1]]})"));
        CHECK(sc.n == 2);
        CHECK(sc.means.size() == 1);
        CHECK_THROWS_AS(scenario_from_json(Json::parse(
                            R"({"alpha": [[1, 0], [0, 1]], "sigma": [[0, 2], [-2, 0]], "n": 2, "m_list": []})")),
                        std::invalid_argument);

        ClassicalInput in = classical_from_json(
            Json::parse(R"({"N": 2, "family": [{"p": [0.5, 0.5]}, {"p": [0.2, 0.8]}], "statistic": [0, 1]})"));
        CHECK(in.statistic == Statistic{0, 1});
        CHECK_THROWS_AS(classical_from_json(Json::parse(R"({"N": 3, "family": [{"p": [0.5, 0.5]}]})")), InputError);
    }

    TEST_CASE("verdict reports carry residuals") {
        Rng rng(110);
        ChannelInstance ci = unitary_instance(2, rng);
        Json j = verdict_to_json(channel_sufficient(ci.exp, ci.channel), true);
        CHECK(j["sufficient"] == true);
        for (const auto& [name, crit] : j["criteria"].items()) {
            CHECK(crit.contains("residual"));
            CHECK(crit["residual"].is_number());
        }
        CHECK(j.contains("witness"));
    }
}
