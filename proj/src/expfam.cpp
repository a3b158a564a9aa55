#include "qsuff/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qsuff/channels.hpp"

namespace qsuff {

namespace {

void require_faithful(const DensityMatrix& rho, const char* where) {
    if (!rho.faithful()) throw std::invalid_argument(std::string(where) + ": state is not faithful");
}

Mat herm_checked(const Mat& a, const char* where) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(where) + ": operator is not square");
    return HermitianOperator(a).mat();
}

// exp(K) / Tr exp(K) together with log Tr exp(K), evaluated stably.
std::pair<Mat, double> normalized_exp(const Mat& k) {
    SpectralDecomposition sd = spectral(hermitian_part(k));
    const double top = sd.eigenvalues.maxCoeff();
    RVec e = (sd.eigenvalues.array() - top).exp();
    const double s = e.sum();
    Mat rho = sd.eigenvectors * (e / s).cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint();
    return {rho, top + std::log(s)};
}

// sum_ab conj(x_ab) y_ab / w(l_a, l_b), matrices already in the eigenbasis.
double inverse_bkm(const RVec& lambda, const Mat& x, const Mat& y) {
    double s = 0.0;
    for (Eigen::Index a = 0; a < lambda.size(); ++a)
        for (Eigen::Index b = 0; b < lambda.size(); ++b)
            s += (std::conj(x(a, b)) * y(a, b)).real() / bkm_weight(lambda(a), lambda(b));
    return s;
}

void check_theta(const ParametricFamily& fam, const Theta& theta) {
    if (static_cast<int>(theta.size()) != fam.num_params())
        throw std::invalid_argument("family: parameter vector has wrong length");
}

}  // namespace

// ---- Perturbed states ----

DensityMatrix perturbed_state(const DensityMatrix& omega, const Mat& a) {
    require_faithful(omega, "perturbed_state");
    if (a.rows() != omega.dim() || a.cols() != omega.dim())
        throw std::invalid_argument("perturbed_state: dimension mismatch");
    return DensityMatrix(normalized_exp(mlog(omega.mat()) + herm_checked(a, "perturbed_state")).first);
}

double perturbation_functional(const DensityMatrix& psi, const DensityMatrix& omega, const Mat& a) {
    return relative_entropy(psi, omega) - (psi.mat() * a).trace().real();
}

double perturbed_state_variational_gap(const DensityMatrix& omega, const Mat& a, int candidates,
                                       std::uint64_t seed) {
    DensityMatrix best = perturbed_state(omega, a);
    const double f0 = perturbation_functional(best, omega, a);
    Rng rng(seed);
    std::uniform_real_distribution<double> eps(0.01, 0.3);
    double gap = kInfinity;
    for (int c = 0; c < candidates; ++c) {
        DensityMatrix cand;
        if (c % 2 == 0) {
            DensityMatrix other = random_density(omega.dim(), rng);
            double e = eps(rng);
            cand = DensityMatrix((1.0 - e) * best.mat() + e * other.mat());
        } else {
            cand = perturbed_state(omega, a + eps(rng) * random_hermitian(omega.dim(), rng));
        }
        gap = std::min(gap, perturbation_functional(cand, omega, a) - f0);
    }
    return gap;
}

double c_functional(const DensityMatrix& omega, const Mat& a) {
    require_faithful(omega, "c_functional");
    return -normalized_exp(mlog(omega.mat()) + herm_checked(a, "c_functional")).second;
}

double c_functional_direct(const DensityMatrix& omega, const Mat& a) {
    return perturbation_functional(perturbed_state(omega, a), omega, a);
}

// ---- Kubo-Mori form ----

double bkm_weight(double x, double y) {
    if (!(x > 0.0 && y > 0.0)) throw std::domain_error("bkm_weight: arguments must be positive");
    const double u = std::log(x) - std::log(y);
    if (std::abs(u) < 1e-6) return std::sqrt(x * y) * (1.0 + u * u / 24.0);
    return (x - y) / u;
}

double bkm_form(const DensityMatrix& rho, const Mat& h, const Mat& k) {
    require_faithful(rho, "bkm_form");
    SpectralDecomposition sd = spectral(rho.mat());
    const Mat& v = sd.eigenvectors;
    Mat ht = v.adjoint() * h * v;
    Mat kt = v.adjoint() * k * v;
    double s = 0.0;
    for (Eigen::Index a = 0; a < ht.rows(); ++a)
        for (Eigen::Index b = 0; b < ht.cols(); ++b)
            s += bkm_weight(sd.eigenvalues(a), sd.eigenvalues(b)) * (std::conj(ht(a, b)) * kt(a, b)).real();
    const double mh = (rho.mat() * h).trace().real();
    const double mk = (rho.mat() * k).trace().real();
    return s - mh * mk;
}

// ---- Families ----

ExponentialFamily::ExponentialFamily(Mat base_log, std::vector<Mat> generators, std::vector<Theta> theta_grid)
    : base_log_(herm_checked(base_log, "ExponentialFamily")), grid_(std::move(theta_grid)) {
    for (const Mat& g : generators) {
        if (g.rows() != base_log_.rows() || g.cols() != base_log_.cols())
            throw std::invalid_argument("ExponentialFamily: generator dimension mismatch");
        generators_.push_back(herm_checked(g, "ExponentialFamily"));
    }
    if (grid_.empty()) throw std::invalid_argument("ExponentialFamily: empty parameter grid");
    for (const Theta& t : grid_)
        if (t.size() != generators_.size())
            throw std::invalid_argument("ExponentialFamily: grid point has wrong length");
}

DensityMatrix ExponentialFamily::state(const Theta& theta) const {
    check_theta(*this, theta);
    Mat k = base_log_;
    for (size_t i = 0; i < generators_.size(); ++i) k += theta[i] * generators_[i];
    return DensityMatrix(normalized_exp(k).first);
}

double ExponentialFamily::log_partition(const Theta& theta) const {
    check_theta(*this, theta);
    Mat k = base_log_;
    for (size_t i = 0; i < generators_.size(); ++i) k += theta[i] * generators_[i];
    return normalized_exp(k).second;
}

std::vector<Mat> ExponentialFamily::generator_derivatives(const Theta& theta) const {
    check_theta(*this, theta);
    return generators_;
}

DominatedFamily::DominatedFamily(DensityMatrix omega, GeneratorFn a_of_theta, int num_params,
                                 std::vector<Theta> theta_grid, double lambda, double mu, double fd_step,
                                 DerivativeFn derivative)
    : omega_(std::move(omega)),
      a_(std::move(a_of_theta)),
      num_params_(num_params),
      grid_(std::move(theta_grid)),
      lambda_(lambda),
      mu_(mu),
      fd_step_(fd_step),
      derivative_(std::move(derivative)) {
    require_faithful(omega_, "DominatedFamily");
    if (!a_) throw std::invalid_argument("DominatedFamily: missing generator map");
    if (!(lambda_ > 0.0 && mu_ >= lambda_)) throw std::invalid_argument("DominatedFamily: need 0 < lambda <= mu");
    if (!(fd_step_ > 0.0)) throw std::invalid_argument("DominatedFamily: finite-difference step must be positive");
    if (grid_.empty()) throw std::invalid_argument("DominatedFamily: empty parameter grid");
    for (const Theta& t : grid_) {
        check_theta(*this, t);
        Mat rho = state(t).mat();
        Eigen::SelfAdjointEigenSolver<Mat> lo(hermitian_part(rho - lambda_ * omega_.mat()), Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Mat> hi(hermitian_part(mu_ * omega_.mat() - rho), Eigen::EigenvaluesOnly);
        if (lo.eigenvalues().minCoeff() < -1e-12 || hi.eigenvalues().minCoeff() < -1e-12)
            throw std::invalid_argument("DominatedFamily: domination bounds violated on the grid");
    }
}

std::vector<Mat> DominatedFamily::generator_derivatives(const Theta& theta) const {
    check_theta(*this, theta);
    if (derivative_) {
        std::vector<Mat> d = derivative_(theta);
        if (static_cast<int>(d.size()) != num_params_)
            throw std::invalid_argument("DominatedFamily: derivative data has wrong length");
        return d;
    }
    std::vector<Mat> out;
    for (int i = 0; i < num_params_; ++i) {
        Theta up = theta;
        Theta dn = theta;
        up[i] += fd_step_;
        dn[i] -= fd_step_;
        out.push_back(hermitian_part((a_(up) - a_(dn)) / (2.0 * fd_step_)));
    }
    return out;
}

// ---- Scores and Fisher information ----

std::vector<Mat> score_operators(const ParametricFamily& fam, const Theta& theta) {
    check_theta(fam, theta);
    DensityMatrix rho = fam.state(theta);
    std::vector<Mat> out;
    for (const Mat& d : fam.generator_derivatives(theta)) {
        const double mean = (rho.mat() * d).trace().real();
        out.push_back(d - mean * Mat::Identity(fam.dim(), fam.dim()));
    }
    return out;
}

RMat fisher_matrix(const ParametricFamily& fam, const Theta& theta) {
    DensityMatrix rho = fam.state(theta);
    std::vector<Mat> l = score_operators(fam, theta);
    const int p = static_cast<int>(l.size());
    RMat g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) g(i, j) = g(j, i) = bkm_form(rho, l[i], l[j]);
    return g;
}

std::vector<Mat> state_derivatives(const ParametricFamily& fam, const Theta& theta) {
    DensityMatrix rho = fam.state(theta);
    SpectralDecomposition sd = spectral(rho.mat());
    const Mat& v = sd.eigenvectors;
    std::vector<Mat> out;
    for (const Mat& l : score_operators(fam, theta)) {
        Mat lt = v.adjoint() * l * v;
        for (Eigen::Index a = 0; a < lt.rows(); ++a)
            for (Eigen::Index b = 0; b < lt.cols(); ++b) lt(a, b) *= bkm_weight(sd.eigenvalues(a), sd.eigenvalues(b));
        out.push_back(v * lt * v.adjoint());
    }
    return out;
}

StatisticalExperiment grid_experiment(const ParametricFamily& fam) {
    std::vector<ThetaState> states;
    for (const Theta& t : fam.theta_grid()) states.push_back({t, fam.state(t)});
    return build_experiment(std::move(states));
}

FisherComparison fisher_compare(const ParametricFamily& fam, const QuantumChannel& ch, double tol,
                                const SufficiencyOptions& opt) {
    if (ch.in_dim() != fam.dim()) throw std::invalid_argument("fisher_compare: dimension mismatch");
    Mat q = support_basis(ch.schrodinger(fam.base_state().mat()));
    auto image = [&](const Mat& x) -> Mat { return q.adjoint() * ch.schrodinger(x) * q; };
    FisherComparison out;
    out.gap = kInfinity;
    for (const Theta& theta : fam.theta_grid()) {
        RMat g = fisher_matrix(fam, theta);
        DensityMatrix tau(image(fam.state(theta).mat()));
        if (!tau.faithful()) throw std::invalid_argument("fisher_compare: image state not faithful on the support");
        SpectralDecomposition sd = spectral(tau.mat());
        std::vector<Mat> xs;
        for (const Mat& y : state_derivatives(fam, theta))
            xs.push_back(sd.eigenvectors.adjoint() * image(y) * sd.eigenvectors);
        const int p = static_cast<int>(xs.size());
        RMat h(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) h(i, j) = h(j, i) = inverse_bkm(sd.eigenvalues, xs[i], xs[j]);
        Eigen::SelfAdjointEigenSolver<RMat> es(g - h, Eigen::EigenvaluesOnly);
        out.gap = std::min(out.gap, es.eigenvalues().minCoeff());
        out.max_difference = std::max(out.max_difference, es.eigenvalues().cwiseAbs().maxCoeff());
        out.g.push_back(g);
        out.h.push_back(h);
    }
    out.sufficient = out.max_difference < tol;
    SufficiencyOptions o = opt;
    o.tol = tol;
    out.channel_verdict = channel_sufficient(grid_experiment(fam), ch, o).sufficient;
    out.agrees = out.sufficient == out.channel_verdict;
    return out;
}

TransferCheck exp_transfer_check(const ParametricFamily& fam, const QuantumChannel& ch, double tol) {
    if (ch.in_dim() != fam.dim()) throw std::invalid_argument("exp_transfer_check: dimension mismatch");
    DensityMatrix omega = fam.base_state();
    Mat q = support_basis(ch.schrodinger(omega.mat()));
    DensityMatrix tau_omega(q.adjoint() * ch.schrodinger(omega.mat()) * q);
    Mat log_tau_omega = mlog(tau_omega.mat());
    TransferCheck out;
    for (const Theta& theta : fam.theta_grid()) {
        DensityMatrix rho = fam.state(theta);
        DensityMatrix tau(q.adjoint() * ch.schrodinger(rho.mat()) * q);
        if (!tau.faithful()) throw std::invalid_argument("exp_transfer_check: image state not faithful on the support");
        Mat b = mlog(tau.mat()) - log_tau_omega;
        Mat pulled = ch.heisenberg(q * b * q.adjoint());
        out.residual = std::max(out.residual, trace_norm(rho.mat() - perturbed_state(omega, pulled).mat()));
        out.image_residual =
            std::max(out.image_residual, trace_norm(tau.mat() - perturbed_state(tau_omega, b).mat()));
    }
    out.pass = out.residual < tol && out.image_residual < tol;
    return out;
}

}  // namespace qsuff
