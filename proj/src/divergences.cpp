#include "qsuff/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsuff {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0) || alpha == 0.0)
        throw std::invalid_argument("alpha_entropy: alpha must lie in (-1, 1) and differ from 0");
}

void check_dims(const DensityMatrix& a, const DensityMatrix& b, const char* where) {
    if (a.dim() != b.dim()) throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

}  // namespace

bool support_contained(const Mat& rho, const Mat& sigma) {
    Mat q = Mat::Identity(sigma.rows(), sigma.cols()) - support_projection(sigma);
    return (q * rho * q).trace().real() <= kSupportTol;
}

// ---- Relative modular operator ----

RelativeModularOperator::RelativeModularOperator(const DensityMatrix& left, const DensityMatrix& right)
    : n_(left.dim()) {
    check_dims(left, right, "RelativeModularOperator");
    Mat rinv = mpow(right.mat(), -1.0);
    // vec(L x R^+) = (R^+)^T (x) L vec(x)
    op_ = hermitian_part(kron(rinv.transpose(), left.mat()));
}

Mat RelativeModularOperator::apply(const Mat& x) const {
    Eigen::Map<const CVec> v(x.data(), x.size());
    CVec out = op_ * v;
    return Eigen::Map<const Mat>(out.data(), n_, n_);
}

Mat RelativeModularOperator::power(double p) const { return mpow(op_, p); }

Mat RelativeModularOperator::imaginary_power(double t) const { return mpow_it(op_, t); }

// ---- Divergences ----

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_dims(rho, sigma, "relative_entropy");
    if (!support_contained(rho.mat(), sigma.mat())) return kInfinity;
    Mat diff = mlog(rho.mat()) - mlog(sigma.mat());
    return (rho.mat() * diff).trace().real();
}

double alpha_entropy(const DensityMatrix& rho1, const DensityMatrix& rho2, double alpha) {
    check_alpha(alpha);
    check_dims(rho1, rho2, "alpha_entropy");
    if (alpha < 0.0 && !support_contained(rho1.mat(), rho2.mat())) return kInfinity;
    double q = (mpow(rho2.mat(), alpha) * mpow(rho1.mat(), 1.0 - alpha)).trace().real();
    return (1.0 - q) / (alpha * (1.0 - alpha));
}

double alpha_entropy_quasi(const DensityMatrix& rho1, const DensityMatrix& rho2, double alpha) {
    check_alpha(alpha);
    check_dims(rho1, rho2, "alpha_entropy_quasi");
    if (alpha < 0.0 && !support_contained(rho1.mat(), rho2.mat())) return kInfinity;
    RelativeModularOperator delta(rho2, rho1);
    Mat xi = msqrt(rho1.mat());
    Eigen::Map<const CVec> v(xi.data(), xi.size());
    double norm2 = v.squaredNorm();
    double q = v.dot(delta.power(alpha) * v).real();
    return (norm2 - q) / (alpha * (1.0 - alpha));
}

double transition_probability(const DensityMatrix& phi, const DensityMatrix& omega) {
    check_dims(phi, omega, "transition_probability");
    return (msqrt(phi.mat()) * msqrt(omega.mat())).trace().real();
}

double state_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double l = es.eigenvalues()(i);
        if (l > kSupportTol) s -= l * std::log(l);
    }
    return s;
}

Mat connes_cocycle(const DensityMatrix& phi, const DensityMatrix& omega, double t) {
    check_dims(phi, omega, "connes_cocycle");
    return mpow_it(phi.mat(), t) * mpow_it(omega.mat(), -t);
}

Mat modular_evolution(const DensityMatrix& omega, const Mat& x, double t) {
    return mpow_it(omega.mat(), t) * x * mpow_it(omega.mat(), -t);
}

}  // namespace qsuff
