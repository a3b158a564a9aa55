#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qsuff {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Eigenvalues at or below this fraction of the largest magnitude count as kernel.
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kHermTol = 1e-8;

// ---- Operators ----

/// Self-adjoint matrix. The input is symmetrized; asymmetry above kHermTol is rejected.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const Mat& m);

    const Mat& mat() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Mat m_;
};

/// Positive semidefinite, unit-trace matrix. Eigenvalues in [-1e-12, 0) are clipped.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(const Mat& m);

    const Mat& mat() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    int support_rank() const { return rank_; }
    bool faithful() const { return rank_ == dim(); }

    static DensityMatrix maximally_mixed(int n);
    static DensityMatrix pure(const CVec& v);

private:
    Mat m_;
    int rank_ = 0;
};

struct SpectralDecomposition {
    RVec eigenvalues;  // ascending
    Mat eigenvectors;  // columns

    Mat reconstruct() const;
};

// ---- Spectral calculus ----

SpectralDecomposition spectral(const HermitianOperator& h);
SpectralDecomposition spectral(const Mat& h);

/// Applies f to the spectrum. With on_support, eigenvalues within the relative
/// kSupportTol band around 0 map to 0 and f is never evaluated there.
HermitianOperator matrix_fn(const HermitianOperator& h, const std::function<double(double)>& f,
                            bool on_support);
Mat matrix_fn(const Mat& h, const std::function<double(double)>& f, bool on_support);
Mat matrix_fn_complex(const Mat& h, const std::function<cplx(double)>& f, bool on_support);

// Common shorthands, all on the support.
Mat support_projection(const Mat& h);
Mat msqrt(const Mat& h);
Mat mpow(const Mat& h, double p);
Mat mlog(const Mat& h);
Mat mexp(const Mat& h);
Mat mpow_it(const Mat& h, double t);  // h^{it} on the support

// ---- Tensor structure ----

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
Mat kron(const Mat& a, const Mat& b);

/// Traces out every factor not listed in keep. Kept factors stay in their original order.
HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& dims,
                                const std::vector<int>& keep);
Mat partial_trace(const Mat& x, const std::vector<int>& dims, const std::vector<int>& keep);

double hs_inner(const HermitianOperator& a, const HermitianOperator& b);
cplx hs_inner(const Mat& a, const Mat& b);  // Tr(a* b)

// ---- Small helpers ----

Mat hermitian_part(const Mat& m);
double trace_norm(const Mat& m);
double hermiticity_defect(const Mat& m);
// Columns of an orthonormal basis for the range of a positive semidefinite matrix.
Mat support_basis(const Mat& h);

}  // namespace qsuff
