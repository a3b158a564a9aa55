#pragma once

#include <optional>
#include <vector>

#include "qsuff/sufficiency.hpp"

namespace qsuff {

inline constexpr double kClassicalTol = 1e-12;

struct ClassicalMember {
    std::vector<double> theta;
    RVec p;
};

/// Family of probability vectors on {0, ..., N-1} with a dominating measure.
struct FiniteExperiment {
    int n = 0;
    std::vector<ClassicalMember> family;
    RVec mu;
};

// Validates the family; mu defaults to the average of the members.
FiniteExperiment make_finite_experiment(std::vector<ClassicalMember> family, std::optional<RVec> mu = std::nullopt);

/// T(x) in {0, ..., K-1}.
using Statistic = std::vector<int>;

int statistic_range(const Statistic& t);

// Largest spread across theta of P_theta(x | T = T(x)) on supp mu.
double conditional_spread(const FiniteExperiment& exp, const Statistic& t);
bool is_sufficient_statistic(const FiniteExperiment& exp, const Statistic& t);

/// Tries P_theta(x) = g_theta(T(x)) h(x) with h the pooled family normalized per fiber.
bool factorization_check(const FiniteExperiment& exp, const Statistic& t);

/// Level sets of p / (p + q), ordered by increasing ratio; points outside supp(p + q) form the last class.
Statistic likelihood_ratio_statistic(const RVec& p, const RVec& q);

// Every sufficient partition of supp mu refines t; exhaustive over set partitions, N <= 8.
bool is_coarsest_sufficient(const FiniteExperiment& exp, const Statistic& t);

/// Diagonal densities with uniform mixing weights.
StatisticalExperiment embed_diagonal(const FiniteExperiment& exp);

/// Diagonal subalgebra of functions of T, one block per nonempty fiber.
StarSubalgebra statistic_subalgebra(const Statistic& t);

// Product Bernoulli(theta) family on {0,1}^N, indexed by bit patterns.
FiniteExperiment bernoulli_product_experiment(int n_trials, const std::vector<double>& thetas);
Statistic count_statistic(int n_trials);

struct NormalDemoReport {
    int variables = 0;
    int grid_points = 0;
    double max_conditional_variation = 0.0;
    bool sufficient = false;
};

/// Unit-variance normal family on a uniform grid, one coordinate per variable, statistic = index sum.
NormalDemoReport discretized_normal_demo(int variables, const std::vector<double>& means, int grid_points = 101,
                                         double half_width = 4.0);

}  // namespace qsuff
