#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsuff/algebra.hpp"
#include "qsuff/channels.hpp"
#include "qsuff/divergences.hpp"

namespace qsuff {

inline const std::vector<double> kDefaultTimes{0.37, 0.71, 1.13};
inline constexpr double kVerdictTol = 1e-8;

struct ThetaState {
    std::vector<double> theta;
    DensityMatrix rho;
};

/// Finite family of states with the dominating mixture omega = sum_n w_n rho_n.
struct StatisticalExperiment {
    int dim = 0;
    std::vector<ThetaState> states;
    DensityMatrix omega;
    std::vector<double> weights;
};

StatisticalExperiment build_experiment(std::vector<ThetaState> states, std::vector<double> weights = {});

// Family compressed to the support of omega through the isometry v (columns span supp omega).
StatisticalExperiment compress_experiment(const StatisticalExperiment& exp, const Mat& v);

struct SufficiencyOptions {
    double tol = kVerdictTol;
    std::vector<double> alphas = kDefaultAlphas;
    std::vector<double> times = kDefaultTimes;
    std::uint64_t seed = kDefaultSeed;
};

struct CriterionResult {
    bool pass = false;
    double residual = 0.0;
};

struct SufficiencyVerdict {
    bool sufficient = false;
    bool consistent = true;  // every criterion returned the same answer
    std::map<std::string, CriterionResult> per_criterion;
    std::optional<QuantumChannel> witness;
    double witness_residual = 0.0;  // max_theta |rho - recovered rho|_1
};

/// Sufficiency of a subalgebra through three independent criteria: restricted alpha-entropies,
/// cocycle membership, and invariance under the generalized conditional expectation.
SufficiencyVerdict subalgebra_sufficient(const StatisticalExperiment& exp, const StarSubalgebra& alg,
                                         const SufficiencyOptions& opt = {});

/// Sufficiency of a channel whose input system carries the family. Supports are compressed first.
SufficiencyVerdict channel_sufficient(const StatisticalExperiment& exp, const QuantumChannel& ch,
                                      const SufficiencyOptions& opt = {});

struct MatsuffResult {
    bool pass = false;
    double residual = 0.0;
};

/// max_theta |s(log T rho_theta - log T omega) - (log rho_theta - log omega)| on compressed supports.
MatsuffResult matsuff_check(const StatisticalExperiment& exp, const QuantumChannel& ch, double tol = kVerdictTol);

struct MinimalSufficient {
    StarSubalgebra algebra;  // acts on supp omega
    Mat support;             // dim x rank isometry onto supp omega
    std::vector<double> times;
    int rounds = 0;
    bool validated = false;
    bool minimal_spot_check = false;
};

MinimalSufficient minimal_sufficient_subalgebra(const StatisticalExperiment& exp, const SufficiencyOptions& opt = {});

// Replaces each block in turn by a coarser one and reports whether every reduction is insufficient.
bool minimality_spot_check(const StatisticalExperiment& exp, const StarSubalgebra& alg,
                           const SufficiencyOptions& opt = {});

}  // namespace qsuff
