#pragma once

#include <cstdint>
#include <vector>

#include "qsuff/operator_core.hpp"
#include "qsuff/quantum_channel.hpp"
#include "qsuff/random.hpp"

namespace qsuff {

/// Hilbert-Schmidt orthonormal basis of a linear space of n x n matrices.
struct OperatorSpan {
    int ambient_dim = 0;
    std::vector<Mat> basis;

    int size() const { return static_cast<int>(basis.size()); }
    Mat project(const Mat& x) const;
    double residual(const Mat& x) const;  // Frobenius distance to the span

    // Gram-Schmidt; candidates below tol times the largest candidate norm, or whose normalized
    // remainder falls below tol, are dropped.
    static OperatorSpan from_elements(int n, const std::vector<Mat>& elems, double tol = 1e-9);
    static OperatorSpan full(int n);
};

// Largest Frobenius residual of either span's basis against the other.
double span_distance(const OperatorSpan& a, const OperatorSpan& b);

struct Block {
    int d = 1;  // factor dimension
    int m = 1;  // multiplicity
    bool operator==(const Block& o) const { return d == o.d && m == o.m; }
};

/// *-subalgebra U (sum_k M_{d_k} (x) I_{m_k}) U* of M_n.
class StarSubalgebra {
public:
    StarSubalgebra() = default;
    StarSubalgebra(const Mat& basis_change, std::vector<Block> blocks);

    static StarSubalgebra full(int n);
    static StarSubalgebra scalars(int n);
    static StarSubalgebra diagonal(int n);

    int ambient_dim() const { return n_; }
    const Mat& basis_change() const { return u_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    int offset(int k) const { return offsets_[k]; }
    int dimension() const;  // sum d_k^2

    // Block components x_k of U* x U after averaging over the multiplicity factor.
    std::vector<Mat> components(const Mat& x) const;
    Mat embed(const std::vector<Mat>& components) const;
    // Hilbert-Schmidt orthogonal projection onto the algebra.
    Mat project(const Mat& x) const;
    double residual(const Mat& x) const;

    OperatorSpan span() const;
    OperatorSpan commutant_span() const;
    std::vector<Mat> central_projections() const;
    // Columns of U spanning block k.
    Mat block_isometry(int k) const;

private:
    int n_ = 0;
    Mat u_;
    std::vector<Block> blocks_;
    std::vector<int> offsets_;
};

OperatorSpan commutant(const std::vector<Mat>& gens, int n);
StarSubalgebra generated_algebra(const std::vector<Mat>& gens, int n, std::uint64_t seed = kDefaultSeed);
StarSubalgebra block_decompose(const OperatorSpan& span, std::uint64_t seed = kDefaultSeed);

QuantumChannel trace_conditional_expectation(const StarSubalgebra& alg);
QuantumChannel generalized_conditional_expectation(const StarSubalgebra& alg, const DensityMatrix& omega);

struct ModularInvariance {
    bool invariant = false;
    double generator_residual = 0.0;
    double conjugation_residual = 0.0;  // max over t in {0.5, 1.0}
};

ModularInvariance modular_invariance(const StarSubalgebra& alg, const DensityMatrix& omega);
bool is_modular_invariant(const StarSubalgebra& alg, const DensityMatrix& omega);

}  // namespace qsuff
