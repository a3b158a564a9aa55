#include "qsuff/random.hpp"

#include <cmath>

namespace qsuff {

Mat random_ginibre(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            double re = nd(rng);
            double im = nd(rng);
            g(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    return g;
}

Mat random_hermitian(int n, Rng& rng) {
    Mat g = random_ginibre(n, n, rng);
    return hermitian_part(g);
}

Mat random_isometry(int rows, int cols, Rng& rng) {
    Mat g = random_ginibre(rows, cols, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(rows, cols);
    // Fix column phases against the diagonal of R for a Haar-distributed result.
    Mat r = qr.matrixQR();
    for (int j = 0; j < cols; ++j) {
        cplx d = r(j, j);
        double a = std::abs(d);
        if (a > 0) q.col(j) *= d / a;
    }
    return q;
}

Mat random_unitary(int n, Rng& rng) { return random_isometry(n, n, rng); }

DensityMatrix random_density(int n, Rng& rng, int rank, double min_eig) {
    if (rank < 0 || rank > n) rank = n;
    Mat g = random_ginibre(n, rank, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    if (rank == n && min_eig > 0.0) {
        rho = (1.0 - n * min_eig) * rho + min_eig * Mat::Identity(n, n);
    }
    rho = hermitian_part(rho);
    rho /= rho.trace().real();
    return DensityMatrix(rho);
}

CVec random_unit_vector(int n, Rng& rng) {
    Mat g = random_ginibre(n, 1, rng);
    return g.col(0) / g.col(0).norm();
}

RVec random_real_vector(int n, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    RVec v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

RVec random_probability(int n, Rng& rng, double floor) {
    std::exponential_distribution<double> ed(1.0);
    RVec p(n);
    for (int i = 0; i < n; ++i) p(i) = ed(rng);
    p /= p.sum();
    if (floor > 0.0) {
        p = (1.0 - n * floor) * p + RVec::Constant(n, floor);
        p /= p.sum();
    }
    return p;
}

}  // namespace qsuff
