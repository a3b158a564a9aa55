#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qsuff/operator_core.hpp"
#include "qsuff/random.hpp"

namespace qsuff {

inline constexpr double kStateConstraintTol = 1e-10;

// Smallest eigenvalue of the complex matrix alpha + i sigma.
double state_constraint_margin(const RMat& alpha, const RMat& sigma);

/// Real space with symplectic form sigma and covariance form alpha, gated by alpha + i sigma >= 0.
class SymplecticSpace {
public:
    SymplecticSpace() = default;
    SymplecticSpace(RMat alpha, RMat sigma);

    int dim() const { return static_cast<int>(sigma_.rows()); }
    const RMat& alpha() const { return alpha_; }
    const RMat& sigma() const { return sigma_; }
    double sigma_form(const RVec& f, const RVec& g) const { return f.dot(sigma_ * g); }
    double alpha_form(const RVec& f, const RVec& g) const { return f.dot(alpha_ * g); }

    // H (+) ... (+) H with block-diagonal forms.
    SymplecticSpace direct_sum(int n) const;

private:
    RMat alpha_;
    RMat sigma_;
};

/// Finite linear combination of Weyl operators W(f).
struct WeylPolynomial {
    std::vector<std::pair<cplx, RVec>> terms;

    static WeylPolynomial weyl(const RVec& f, cplx coeff = 1.0);
    WeylPolynomial adjoint() const;
};

// Product reduced with W(f) W(g) = exp(i sigma(f, g)) W(f + g).
WeylPolynomial multiply(const WeylPolynomial& p, const WeylPolynomial& q, const SymplecticSpace& space);

/// State with characteristic function W(f) -> exp(i m(f) - alpha(f, f) / 2).
class QuasifreeState {
public:
    QuasifreeState(SymplecticSpace space, RVec mean);

    const SymplecticSpace& space() const { return space_; }
    const RVec& mean() const { return mean_; }
    cplx eval(const RVec& f) const;
    cplx eval(const WeylPolynomial& p) const;

private:
    SymplecticSpace space_;
    RVec mean_;
};

/// W(f) -> exp(-q(f, f) / 2 + i l(f)) W(A f), mapping the algebra over `domain` into the one over `codomain`.
struct GaussianMap {
    SymplecticSpace domain;
    SymplecticSpace codomain;
    RMat a;      // codomain.dim x domain.dim
    RMat noise;  // symmetric, domain.dim x domain.dim
    RVec shift;  // domain.dim

    WeylPolynomial apply(const WeylPolynomial& p) const;
    // State pulled back along the map.
    QuasifreeState pullback(const QuasifreeState& st) const;
};

// x -> outer(inner(x)).
GaussianMap compose(const GaussianMap& outer, const GaussianMap& inner);

/// W(f) -> W((f, ..., f) / sqrt(n)) from H into H^n.
GaussianMap sample_mean_channel(const SymplecticSpace& space, int n);

/// W(f_1 + ... + f_n) -> W(sum f_i / sqrt(n)) exp(alpha(sum f, sum f) / (2n) - sum alpha(f_i, f_i) / 2) from H^n into H.
GaussianMap randomization_map(const SymplecticSpace& space, int n);

struct CpCertificate {
    bool completely_positive = false;
    double margin = 0.0;             // min eigenvalue of the exponent kernel Gram matrix
    double raw_kernel_margin = 0.0;  // min eigenvalue of the exponentiated kernel on random points
    bool raw_kernel_psd = false;
};

/// The exponent kernel q(f, g) + i (sigma_dom(f, g) - sigma_cod(Af, Ag)) must be positive semidefinite.
CpCertificate check_cp(const GaussianMap& gm, const std::vector<RVec>& samples, std::uint64_t seed = kDefaultSeed);

struct SufficiencyPairReport {
    double max_deviation = 0.0;
    int evaluations = 0;
    double constraint_margin = 0.0;
};

/// Compares psi_m((T o S)(W(f))) with psi_m(W(f)) on product states over H^n.
SufficiencyPairReport verify_sufficiency_pair(const SymplecticSpace& space, int n, const std::vector<RVec>& means,
                                              int samples = 100, std::uint64_t seed = kDefaultSeed);
// Same comparison with a caller-supplied map in place of the randomization.
SufficiencyPairReport verify_sufficiency_pair(const SymplecticSpace& space, int n, const std::vector<RVec>& means,
                                              const GaussianMap& randomization, int samples = 100,
                                              std::uint64_t seed = kDefaultSeed);

inline const std::vector<double> kShiftTimes{0.37, 0.71, 1.13};

struct GaussianShiftResult {
    RMat basis;  // orthonormal columns
    int rank = 0;
    double complex_structure_defect = 0.0;  // |J^2 + I|
    double orthogonality_defect = 0.0;      // max_t |V_t^T alpha V_t - alpha|
    double commutation_defect = 0.0;        // max_t |V_t J - J V_t|
    double cocycle_defect = 0.0;            // max |u_{t+s} - u_t sigma_t(u_s)|
};

// Modular dynamics V_t of the quasifree state with covariance alpha.
RMat modular_flow(const SymplecticSpace& space, double t);

/// span{V_t g - g : g in K, t in times}, rank cut at 1e-9.
GaussianShiftResult gaussian_shift_minimal_subspace(const SymplecticSpace& space, const std::vector<RVec>& generators,
                                                    const std::vector<double>& times = kShiftTimes);

}  // namespace qsuff
