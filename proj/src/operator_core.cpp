#include "qsuff/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsuff {

namespace {

void require_square(const Mat& m, const char* where) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(std::string(where) + ": matrix must be square and non-empty");
}

double support_cutoff(const RVec& ev) {
    double top = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    return kSupportTol * std::max(top, 1e-300);
}

}  // namespace

// ---- Operators ----

HermitianOperator::HermitianOperator(const Mat& m) {
    require_square(m, "HermitianOperator");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermiticity_defect(m) > kHermTol * scale)
        throw std::invalid_argument("HermitianOperator: input is not self-adjoint");
    m_ = hermitian_part(m);
}

DensityMatrix::DensityMatrix(const Mat& m) {
    require_square(m, "DensityMatrix");
    if (hermiticity_defect(m) > kHermTol)
        throw std::invalid_argument("DensityMatrix: input is not self-adjoint");
    Mat h = hermitian_part(m);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    RVec ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-12)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(ev.minCoeff()));
    double tr = ev.sum();
    if (std::abs(tr - 1.0) > 1e-12)
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
    ev = ev.cwiseMax(0.0);
    double cut = support_cutoff(ev);
    rank_ = static_cast<int>((ev.array() > cut).count());
    m_ = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    m_ = hermitian_part(m_);
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
    return DensityMatrix(Mat::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::pure(const CVec& v) {
    CVec u = v / v.norm();
    return DensityMatrix(u * u.adjoint());
}

Mat SpectralDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

// ---- Spectral calculus ----

SpectralDecomposition spectral(const HermitianOperator& h) { return spectral(h.mat()); }

SpectralDecomposition spectral(const Mat& h) {
    require_square(h, "spectral");
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (hermiticity_defect(h) > kHermTol * scale)
        throw std::invalid_argument("spectral: input is not self-adjoint");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
    if (es.info() != Eigen::Success) throw std::runtime_error("spectral: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Mat matrix_fn_complex(const Mat& h, const std::function<cplx(double)>& f, bool on_support) {
    SpectralDecomposition sd = spectral(h);
    const RVec& ev = sd.eigenvalues;
    double cut = support_cutoff(ev);
    CVec fv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (on_support && std::abs(ev(i)) <= cut) {
            fv(i) = 0.0;
            continue;
        }
        fv(i) = f(ev(i));
        if (!std::isfinite(fv(i).real()) || !std::isfinite(fv(i).imag()))
            throw std::domain_error("matrix_fn: function undefined at eigenvalue " + std::to_string(ev(i)));
    }
    return sd.eigenvectors * fv.asDiagonal() * sd.eigenvectors.adjoint();
}

Mat matrix_fn(const Mat& h, const std::function<double(double)>& f, bool on_support) {
    return hermitian_part(matrix_fn_complex(h, [&](double x) { return cplx(f(x), 0.0); }, on_support));
}

HermitianOperator matrix_fn(const HermitianOperator& h, const std::function<double(double)>& f,
                            bool on_support) {
    return HermitianOperator(matrix_fn(h.mat(), f, on_support));
}

Mat support_projection(const Mat& h) {
    return matrix_fn(h, [](double) { return 1.0; }, true);
}

Mat msqrt(const Mat& h) {
    return matrix_fn(h, [](double x) { return std::sqrt(std::max(x, 0.0)); }, true);
}

Mat mpow(const Mat& h, double p) {
    return matrix_fn(h, [p](double x) { return std::pow(x, p); }, true);
}

Mat mlog(const Mat& h) {
    return matrix_fn(h, [](double x) { return std::log(x); }, true);
}

Mat mexp(const Mat& h) {
    return matrix_fn(h, [](double x) { return std::exp(x); }, false);
}

Mat mpow_it(const Mat& h, double t) {
    return matrix_fn_complex(h, [t](double x) { return std::exp(cplx(0.0, t * std::log(x))); }, true);
}

// ---- Tensor structure ----

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.mat(), b.mat()));
}

Mat partial_trace(const Mat& x, const std::vector<int>& dims, const std::vector<int>& keep) {
    require_square(x, "partial_trace");
    long total = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("partial_trace: factor dimensions must be positive");
        total *= d;
    }
    if (total != x.rows()) throw std::invalid_argument("partial_trace: dims do not match matrix size");
    const int nf = static_cast<int>(dims.size());
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }
    // Row-major strides for the multi-index.
    std::vector<long> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];
    long kdim = 1;
    std::vector<int> kfac;
    for (int f = 0; f < nf; ++f)
        if (kept[f]) {
            kdim *= dims[f];
            kfac.push_back(f);
        }
    std::vector<long> kstride(kfac.size(), 1);
    for (int f = static_cast<int>(kfac.size()) - 2; f >= 0; --f) kstride[f] = kstride[f + 1] * dims[kfac[f + 1]];

    auto reduced_index = [&](long idx, long& rest) {
        long r = 0;
        rest = 0;
        long rstride = 1;
        for (int f = nf - 1, kf = static_cast<int>(kfac.size()) - 1; f >= 0; --f) {
            long digit = (idx / stride[f]) % dims[f];
            if (kept[f]) {
                r += digit * kstride[kf--];
            } else {
                rest += digit * rstride;
                rstride *= dims[f];
            }
        }
        return r;
    };

    Mat out = Mat::Zero(kdim, kdim);
    const long n = x.rows();
    std::vector<long> red(n), rest(n);
    for (long i = 0; i < n; ++i) red[i] = reduced_index(i, rest[i]);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            if (rest[i] == rest[j]) out(red[i], red[j]) += x(i, j);
    return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, const std::vector<int>& dims,
                                const std::vector<int>& keep) {
    return HermitianOperator(partial_trace(x.mat(), dims, keep));
}

cplx hs_inner(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hs_inner: dimension mismatch");
    return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    return hs_inner(a.mat(), b.mat()).real();
}

// ---- Small helpers ----

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const Mat& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double trace_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == m.cols() && hermiticity_defect(m) < 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::BDCSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

Mat support_basis(const Mat& h) {
    SpectralDecomposition sd = spectral(h);
    double cut = support_cutoff(sd.eigenvalues);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = sd.eigenvalues.size() - 1; i >= 0; --i)
        if (sd.eigenvalues(i) > cut) idx.push_back(i);
    Mat out(h.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = sd.eigenvectors.col(idx[k]);
    return out;
}

}  // namespace qsuff
