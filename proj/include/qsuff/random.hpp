#pragma once

#include <cstdint>
#include <random>

#include "qsuff/operator_core.hpp"

namespace qsuff {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20240611;

Mat random_ginibre(int rows, int cols, Rng& rng);
Mat random_hermitian(int n, Rng& rng);
Mat random_unitary(int n, Rng& rng);
// Haar-random isometry with orthonormal columns (rows >= cols).
Mat random_isometry(int rows, int cols, Rng& rng);
// Full rank unless rank is given; eigenvalues bounded below by min_eig when full rank.
DensityMatrix random_density(int n, Rng& rng, int rank = -1, double min_eig = 0.0);
CVec random_unit_vector(int n, Rng& rng);
RVec random_real_vector(int n, Rng& rng);
RVec random_probability(int n, Rng& rng, double floor = 0.0);

}  // namespace qsuff
