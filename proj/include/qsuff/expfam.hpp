#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qsuff/quantum_channel.hpp"
#include "qsuff/random.hpp"
#include "qsuff/sufficiency.hpp"

namespace qsuff {

using Theta = std::vector<double>;

/// Density exp(log rho_omega + a) / Tr exp(log rho_omega + a).
DensityMatrix perturbed_state(const DensityMatrix& omega, const Mat& a);

// S(psi||omega) - psi(a).
double perturbation_functional(const DensityMatrix& psi, const DensityMatrix& omega, const Mat& a);

// Smallest value of the functional over random candidates near the minimizer, minus its value there.
// Non-negative when the minimizer is correct.
double perturbed_state_variational_gap(const DensityMatrix& omega, const Mat& a, int candidates = 20,
                                       std::uint64_t seed = kDefaultSeed);

/// -log Tr exp(log rho_omega + a).
double c_functional(const DensityMatrix& omega, const Mat& a);

// The same minimum evaluated as S([omega^a]||omega) - [omega^a](a).
double c_functional_direct(const DensityMatrix& omega, const Mat& a);

/// Logarithmic mean (x - y) / (log x - log y), with w(x, x) = x.
double bkm_weight(double x, double y);

/// Kubo-Mori form at a faithful state: sum_ij w(l_i, l_j) conj(h_ij) k_ij - Tr(rho h) Tr(rho k).
double bkm_form(const DensityMatrix& rho, const Mat& h, const Mat& k);

/// Common view of a smooth family rho_theta = exp(K(theta)) / Z on a finite grid.
class ParametricFamily {
public:
    virtual ~ParametricFamily() = default;
    virtual int dim() const = 0;
    virtual int num_params() const = 0;
    virtual const std::vector<Theta>& theta_grid() const = 0;
    virtual DensityMatrix state(const Theta& theta) const = 0;
    // Reference state at which the generator vanishes.
    virtual DensityMatrix base_state() const = 0;
    // Partial derivatives of K at theta.
    virtual std::vector<Mat> generator_derivatives(const Theta& theta) const = 0;
};

/// rho_theta = exp(H + sum_i theta_i a_i) / Z.
class ExponentialFamily : public ParametricFamily {
public:
    ExponentialFamily(Mat base_log, std::vector<Mat> generators, std::vector<Theta> theta_grid);

    int dim() const override { return static_cast<int>(base_log_.rows()); }
    int num_params() const override { return static_cast<int>(generators_.size()); }
    const std::vector<Theta>& theta_grid() const override { return grid_; }
    DensityMatrix state(const Theta& theta) const override;
    DensityMatrix base_state() const override { return state(Theta(generators_.size(), 0.0)); }
    std::vector<Mat> generator_derivatives(const Theta& theta) const override;

    const Mat& base_log() const { return base_log_; }
    const std::vector<Mat>& generators() const { return generators_; }
    // log Tr exp(H + sum_i theta_i a_i).
    double log_partition(const Theta& theta) const;

private:
    Mat base_log_;
    std::vector<Mat> generators_;
    std::vector<Theta> grid_;
};

/// rho_theta = [omega^{a(theta)}] with lambda omega <= rho_theta <= mu omega on the grid.
class DominatedFamily : public ParametricFamily {
public:
    using GeneratorFn = std::function<Mat(const Theta&)>;
    using DerivativeFn = std::function<std::vector<Mat>(const Theta&)>;

    // Derivatives come from `derivative` when given, else from symmetric differences with step fd_step.
    DominatedFamily(DensityMatrix omega, GeneratorFn a_of_theta, int num_params, std::vector<Theta> theta_grid,
                    double lambda, double mu, double fd_step = 1e-4, DerivativeFn derivative = nullptr);

    int dim() const override { return omega_.dim(); }
    int num_params() const override { return num_params_; }
    const std::vector<Theta>& theta_grid() const override { return grid_; }
    DensityMatrix state(const Theta& theta) const override { return perturbed_state(omega_, a_(theta)); }
    DensityMatrix base_state() const override { return omega_; }
    std::vector<Mat> generator_derivatives(const Theta& theta) const override;

    Mat generator(const Theta& theta) const { return a_(theta); }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

private:
    DensityMatrix omega_;
    GeneratorFn a_;
    int num_params_;
    std::vector<Theta> grid_;
    double lambda_;
    double mu_;
    double fd_step_;
    DerivativeFn derivative_;
};

/// Centered scores l_i = dK/dtheta_i - rho_theta(dK/dtheta_i) I.
std::vector<Mat> score_operators(const ParametricFamily& fam, const Theta& theta);

/// g_ij = bkm_form(rho_theta, l_i, l_j).
RMat fisher_matrix(const ParametricFamily& fam, const Theta& theta);

// d rho_theta / d theta_i from the scores (Daleckii-Krein formula).
std::vector<Mat> state_derivatives(const ParametricFamily& fam, const Theta& theta);

struct FisherComparison {
    std::vector<RMat> g;           // per grid point
    std::vector<RMat> h;           // Fisher matrices of the image family
    double gap = 0.0;              // min over the grid of the smallest eigenvalue of g - h
    double max_difference = 0.0;   // max over the grid of the spectral norm of g - h
    bool sufficient = false;       // max_difference < tol
    bool channel_verdict = false;  // channel_sufficient on the grid family
    bool agrees = false;
};

/// Fisher information before and after the channel (family on the input side).
FisherComparison fisher_compare(const ParametricFamily& fam, const QuantumChannel& ch, double tol = kVerdictTol,
                                const SufficiencyOptions& opt = {});

struct TransferCheck {
    bool pass = false;
    double residual = 0.0;        // max_theta |rho_theta - [omega^{s(b(theta))}]|_1
    double image_residual = 0.0;  // max_theta |T rho_theta - [T omega^{b(theta)}]|_1
};

/// Tests rho_theta = [omega^{s(b(theta))}] with b(theta) = log T rho_theta - log T omega.
TransferCheck exp_transfer_check(const ParametricFamily& fam, const QuantumChannel& ch, double tol = kVerdictTol);

// Family states on the grid as an experiment with uniform weights.
StatisticalExperiment grid_experiment(const ParametricFamily& fam);

}  // namespace qsuff
