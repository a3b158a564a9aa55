#pragma once

#include <limits>
#include <vector>

#include "qsuff/operator_core.hpp"

namespace qsuff {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline const std::vector<double> kDefaultAlphas{-0.5, 0.5};

/// Superoperator x -> rho_left x rho_right^{-1} on Hilbert-Schmidt space, inverse taken on the support.
class RelativeModularOperator {
public:
    RelativeModularOperator(const DensityMatrix& left, const DensityMatrix& right);

    // Matrix on column-major vec(x); positive semidefinite.
    const Mat& matrix() const { return op_; }
    Mat apply(const Mat& x) const;
    // Delta^p on its support, as a vec-space matrix.
    Mat power(double p) const;
    // Delta^{it} on its support.
    Mat imaginary_power(double t) const;

private:
    int n_;
    Mat op_;
};

/// Tr rho (log rho - log sigma), or kInfinity when supp rho is not inside supp sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// (1 - Tr rho2^a rho1^{1-a}) / (a(1-a)) for a in (-1, 1) without 0.
double alpha_entropy(const DensityMatrix& rho1, const DensityMatrix& rho2, double alpha);

// Same quantity as <xi, f_a(Delta) xi> with Delta = Delta(rho2/rho1) and xi = rho1^{1/2}.
double alpha_entropy_quasi(const DensityMatrix& rho1, const DensityMatrix& rho2, double alpha);

/// Tr rho^{1/2} sigma^{1/2}.
double transition_probability(const DensityMatrix& phi, const DensityMatrix& omega);

/// von Neumann entropy -Tr rho log rho.
double state_entropy(const DensityMatrix& rho);

/// rho_phi^{it} rho_omega^{-it}, powers taken on the supports.
Mat connes_cocycle(const DensityMatrix& phi, const DensityMatrix& omega, double t);

// rho^{it} x rho^{-it}.
Mat modular_evolution(const DensityMatrix& omega, const Mat& x, double t);

bool support_contained(const Mat& rho, const Mat& sigma);

}  // namespace qsuff
