#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qsuff/sufficiency.hpp"

namespace qsuff {

/// rho_theta = U (sum_k w_k(theta) rho^L_k(theta) (x) rho^R_k) U* across the blocks of a subalgebra.
struct Factorization {
    Mat basis_change;
    std::vector<Block> blocks;
    std::vector<Mat> central_projections;
    std::vector<std::vector<double>> weights;  // [theta][block]
    std::vector<std::vector<Mat>> left;        // [theta][block], d_k x d_k
    std::vector<Mat> right;                    // [block], m_k x m_k
    double residual = 0.0;                     // max_theta trace-norm rebuild error
    double right_variation = 0.0;              // right factors recomputed per theta
    bool sufficient_verdict = false;
};

/// Factorizes a family across a modular-invariant subalgebra. Throws std::invalid_argument when the
/// algebra is not invariant and std::runtime_error when the rebuild fails or disagrees with the verdict.
Factorization factorize(const StatisticalExperiment& exp, const StarSubalgebra& alg,
                        const SufficiencyOptions& opt = {});

Mat rebuild(const Factorization& f, int theta_index);

// Permutation operator of C^d^{(x) n} sending tensor slot i to slot perm[i].
Mat permutation_operator(int d, const std::vector<int>& perm);

/// Commutant of the tensor permutation action, spanned by orbit sums of matrix units.
OperatorSpan permutation_commutant(int d, int n);

struct SymmetricPowerResult {
    StatisticalExperiment experiment;
    StarSubalgebra algebra;
    Factorization factorization;
};

/// Tensor powers rho^{(x) n} of a family and their factorization over the permutation commutant.
SymmetricPowerResult symmetric_power_experiment(const std::vector<DensityMatrix>& family, int n,
                                                const SufficiencyOptions& opt = {});

inline constexpr double kOrthogonalityTol = 1e-10;

struct PureFamilyReport {
    int support_rank = 0;
    MinimalSufficient minimal;
    bool has_orthogonal_pair = false;
    double min_overlap = 1.0;  // min |<xi_a, xi_b>| over pairs
    bool single_factor = false;
    // Tensor split for given factor dimensions (d_left, d_right).
    int max_schmidt_rank = 0;
    bool split_detected = false;
    std::optional<CVec> right_factor;
    double right_fidelity = 0.0;  // min_theta |<xi_R, right part of xi_theta>|^2
    bool dichotomy_holds = false;
};

PureFamilyReport pure_family_analysis(const std::vector<CVec>& vectors,
                                      std::optional<std::pair<int, int>> factor_dims = std::nullopt,
                                      const SufficiencyOptions& opt = {});

}  // namespace qsuff
