#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsuff/classical.hpp"
#include "qsuff/expfam.hpp"
#include "qsuff/factorization.hpp"
#include "qsuff/gaussian_ccr.hpp"
#include "qsuff/sufficiency.hpp"

namespace qsuff {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input document.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

Json load_json_file(const std::string& path);

// Matrices are arrays of rows; entries are numbers or [re, im] pairs.
Mat matrix_from_json(const Json& j, bool require_square = true);
RMat real_matrix_from_json(const Json& j);
RVec real_vector_from_json(const Json& j);
Json matrix_to_json(const Mat& m);
Json real_matrix_to_json(const RMat& m);
Json real_vector_to_json(const RVec& v);

/// {"dim": n, "states": [{"theta": [...], "density": M}, ...], "weights": [...]}
StatisticalExperiment experiment_from_json(const Json& j);

/// {"kraus": [K, ...]}, {"choi": C, "in_dim": n} or {"type": identity | unitary | depolarizing | partial_trace, ...}
QuantumChannel channel_from_json(const Json& j);

/// {"type": full | scalars | diagonal, "dim": n}, {"tensor_left": [d1, d2]}, {"generators": [M, ...]}
/// or {"unitary": U, "blocks": [[d, m], ...]}.
StarSubalgebra subalgebra_from_json(const Json& j, int dim, std::uint64_t seed = kDefaultSeed);

/// {"H": M, "generators": [M, ...], "theta_grid": [[...], ...]}
ExponentialFamily family_from_json(const Json& j);

struct GaussianScenario {
    SymplecticSpace space;
    int n = 1;
    std::vector<RVec> means;
};

/// {"alpha": M, "sigma": M, "n": int, "m_list": [[...], ...]}
GaussianScenario scenario_from_json(const Json& j);

struct ClassicalInput {
    FiniteExperiment experiment;
    Statistic statistic;
};

/// {"N": int, "family": [{"theta": [...], "p": [...]}, ...], "statistic": [...]}
ClassicalInput classical_from_json(const Json& j);
Statistic statistic_from_json(const Json& j);

Json channel_to_json(const QuantumChannel& ch);
Json verdict_to_json(const SufficiencyVerdict& v, bool include_witness);
Json factorization_to_json(const Factorization& f);

}  // namespace qsuff
