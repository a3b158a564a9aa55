#include "qsuff/gaussian_ccr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsuff {

namespace {

Mat complexify(const RMat& alpha, const RMat& sigma) {
    Mat m(alpha.rows(), alpha.cols());
    for (Eigen::Index i = 0; i < alpha.rows(); ++i)
        for (Eigen::Index j = 0; j < alpha.cols(); ++j) m(i, j) = cplx(alpha(i, j), sigma(i, j));
    return m;
}

RMat sym_fn(const RMat& s, double (*f)(double)) {
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s + s.transpose()));
    RVec v = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

double inv_sqrt(double x) { return 1.0 / std::sqrt(x); }
double fwd_sqrt(double x) { return std::sqrt(x); }

// Quantities of the modular structure in the alpha-orthonormal frame.
struct ModularFrame {
    RMat a_half;      // alpha^{1/2}
    RMat a_inv_half;  // alpha^{-1/2}
    RMat j;           // complex structure, alpha-frame
    RMat generator;   // J L, antisymmetric
};

ModularFrame modular_frame(const SymplecticSpace& space) {
    ModularFrame fr;
    fr.a_half = sym_fn(space.alpha(), fwd_sqrt);
    fr.a_inv_half = sym_fn(space.alpha(), inv_sqrt);
    // sigma(f, g) = alpha(D f, g), conjugated into the alpha frame.
    RMat d = fr.a_inv_half * space.sigma().transpose() * fr.a_inv_half;
    Eigen::JacobiSVD<RMat> svd(d);
    const RVec& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) < 1e-12) throw std::invalid_argument("gaussian shift: D is not invertible");
    if (s(0) >= 1.0 - 1e-8) throw std::invalid_argument("gaussian shift: |D| must be below 1");
    Eigen::SelfAdjointEigenSolver<RMat> es(d.transpose() * d);
    RVec abs_inv(es.eigenvalues().size());
    RVec ell(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < abs_inv.size(); ++i) {
        const double x = 1.0 / std::sqrt(es.eigenvalues()(i));
        abs_inv(i) = x;
        ell(i) = 0.5 * std::log((x + 1.0) / (x - 1.0));
    }
    const RMat& v = es.eigenvectors();
    fr.j = d * (v * abs_inv.asDiagonal() * v.transpose());
    fr.generator = fr.j * (v * ell.asDiagonal() * v.transpose());
    return fr;
}

RMat flow_in_frame(const ModularFrame& fr, double t) {
    // exp(-2t X) for antisymmetric X, via the Hermitian matrix iX.
    Mat h = cplx(0.0, 1.0) * fr.generator.cast<cplx>();
    Mat e = matrix_fn_complex(hermitian_part(h), [t](double l) { return std::exp(cplx(0.0, 2.0 * t * l)); }, false);
    return e.real();
}

}  // namespace

double state_constraint_margin(const RMat& alpha, const RMat& sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> es(complexify(alpha, sigma), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---- Spaces and Weyl polynomials ----

SymplecticSpace::SymplecticSpace(RMat alpha, RMat sigma) : alpha_(std::move(alpha)), sigma_(std::move(sigma)) {
    const Eigen::Index n = sigma_.rows();
    if (n == 0 || sigma_.cols() != n || alpha_.rows() != n || alpha_.cols() != n)
        throw std::invalid_argument("SymplecticSpace: forms must be square of equal size");
    if (n % 2 != 0) throw std::invalid_argument("SymplecticSpace: dimension must be even");
    if ((sigma_ + sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SymplecticSpace: sigma is not antisymmetric");
    if ((alpha_ - alpha_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SymplecticSpace: alpha is not symmetric");
    if (std::abs(sigma_.determinant()) < 1e-12) throw std::invalid_argument("SymplecticSpace: sigma is degenerate");
    Eigen::SelfAdjointEigenSolver<RMat> es(alpha_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("SymplecticSpace: alpha is not positive definite");
    if (state_constraint_margin(alpha_, sigma_) < -kStateConstraintTol)
        throw std::invalid_argument("SymplecticSpace: alpha + i sigma is not positive semidefinite");
}

SymplecticSpace SymplecticSpace::direct_sum(int n) const {
    if (n < 1) throw std::invalid_argument("direct_sum: n must be positive");
    const int d = dim();
    RMat a = RMat::Zero(n * d, n * d);
    RMat s = RMat::Zero(n * d, n * d);
    for (int k = 0; k < n; ++k) {
        a.block(k * d, k * d, d, d) = alpha_;
        s.block(k * d, k * d, d, d) = sigma_;
    }
    return SymplecticSpace(a, s);
}

WeylPolynomial WeylPolynomial::weyl(const RVec& f, cplx coeff) {
    WeylPolynomial p;
    p.terms.push_back({coeff, f});
    return p;
}

WeylPolynomial WeylPolynomial::adjoint() const {
    WeylPolynomial p;
    for (const auto& [c, f] : terms) p.terms.push_back({std::conj(c), -f});
    return p;
}

WeylPolynomial multiply(const WeylPolynomial& p, const WeylPolynomial& q, const SymplecticSpace& space) {
    WeylPolynomial out;
    for (const auto& [c, f] : p.terms)
        for (const auto& [d, g] : q.terms) {
            if (f.size() != space.dim() || g.size() != space.dim())
                throw std::invalid_argument("multiply: vector dimension mismatch");
            out.terms.push_back({c * d * std::exp(cplx(0.0, space.sigma_form(f, g))), f + g});
        }
    return out;
}

// ---- States ----

QuasifreeState::QuasifreeState(SymplecticSpace space, RVec mean) : space_(std::move(space)), mean_(std::move(mean)) {
    if (mean_.size() != space_.dim()) throw std::invalid_argument("QuasifreeState: mean has wrong dimension");
}

cplx QuasifreeState::eval(const RVec& f) const {
    if (f.size() != space_.dim()) throw std::invalid_argument("QuasifreeState::eval: dimension mismatch");
    return std::exp(cplx(-0.5 * space_.alpha_form(f, f), mean_.dot(f)));
}

cplx QuasifreeState::eval(const WeylPolynomial& p) const {
    cplx s = 0.0;
    for (const auto& [c, f] : p.terms) s += c * eval(f);
    return s;
}

// ---- Gaussian maps ----

WeylPolynomial GaussianMap::apply(const WeylPolynomial& p) const {
    WeylPolynomial out;
    for (const auto& [c, f] : p.terms) {
        if (f.size() != domain.dim()) throw std::invalid_argument("GaussianMap::apply: dimension mismatch");
        out.terms.push_back({c * std::exp(cplx(-0.5 * f.dot(noise * f), shift.dot(f))), a * f});
    }
    return out;
}

QuasifreeState GaussianMap::pullback(const QuasifreeState& st) const {
    RMat alpha = a.transpose() * st.space().alpha() * a + noise;
    return QuasifreeState(SymplecticSpace(0.5 * (alpha + alpha.transpose()), domain.sigma()),
                          a.transpose() * st.mean() + shift);
}

GaussianMap compose(const GaussianMap& outer, const GaussianMap& inner) {
    if (inner.codomain.dim() != outer.domain.dim()) throw std::invalid_argument("compose: dimension mismatch");
    GaussianMap g;
    g.domain = inner.domain;
    g.codomain = outer.codomain;
    g.a = outer.a * inner.a;
    g.noise = inner.noise + inner.a.transpose() * outer.noise * inner.a;
    g.shift = inner.shift + inner.a.transpose() * outer.shift;
    return g;
}

GaussianMap sample_mean_channel(const SymplecticSpace& space, int n) {
    if (n < 1) throw std::invalid_argument("sample_mean_channel: n must be positive");
    const int d = space.dim();
    GaussianMap g;
    g.domain = space;
    g.codomain = space.direct_sum(n);
    g.a = RMat::Zero(n * d, d);
    for (int k = 0; k < n; ++k) g.a.block(k * d, 0, d, d) = RMat::Identity(d, d) / std::sqrt(n);
    g.noise = RMat::Zero(d, d);
    g.shift = RVec::Zero(d);
    return g;
}

GaussianMap randomization_map(const SymplecticSpace& space, int n) {
    if (n < 1) throw std::invalid_argument("randomization_map: n must be positive");
    const int d = space.dim();
    GaussianMap g;
    g.domain = space.direct_sum(n);
    g.codomain = space;
    g.a = RMat::Zero(d, n * d);
    for (int k = 0; k < n; ++k) g.a.block(0, k * d, d, d) = RMat::Identity(d, d) / std::sqrt(n);
    // sum_i alpha(f_i, f_i) - alpha(sum f, sum f) / n
    RMat centering = RMat::Identity(n, n) - RMat::Constant(n, n, 1.0 / n);
    g.noise = RMat::Zero(n * d, n * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.noise.block(i * d, j * d, d, d) = centering(i, j) * space.alpha();
    g.shift = RVec::Zero(n * d);
    return g;
}

CpCertificate check_cp(const GaussianMap& gm, const std::vector<RVec>& samples, std::uint64_t seed) {
    if (samples.size() < 2) throw std::invalid_argument("check_cp: need at least two sample vectors");
    const int d = gm.domain.dim();
    RMat delta = gm.domain.sigma() - gm.a.transpose() * gm.codomain.sigma() * gm.a;
    auto kernel = [&](const RVec& f, const RVec& g) { return cplx(f.dot(gm.noise * g), f.dot(delta * g)); };

    std::vector<RVec> pts;
    for (int i = 0; i < d; ++i) pts.push_back(RVec::Unit(d, i));
    for (const RVec& s : samples) {
        if (s.size() != d) throw std::invalid_argument("check_cp: sample has wrong dimension");
        const double nrm = s.norm();
        if (nrm > 0.0) pts.push_back(s / nrm);
    }
    const Eigen::Index np = static_cast<Eigen::Index>(pts.size());
    Mat gram(np, np);
    for (Eigen::Index i = 0; i < np; ++i)
        for (Eigen::Index j = 0; j < np; ++j) gram(i, j) = kernel(pts[i], pts[j]);
    CpCertificate cert;
    cert.margin = Eigen::SelfAdjointEigenSolver<Mat>(hermitian_part(gram), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    cert.completely_positive = cert.margin >= -1e-10;

    Rng rng(seed);
    std::vector<RVec> raw;
    for (int i = 0; i < 12; ++i) raw.push_back(random_real_vector(d, rng));
    Mat k(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) k(i, j) = std::exp(kernel(raw[i], raw[j]));
    Eigen::SelfAdjointEigenSolver<Mat> ks(hermitian_part(k), Eigen::EigenvaluesOnly);
    cert.raw_kernel_margin = ks.eigenvalues().minCoeff();
    cert.raw_kernel_psd = cert.raw_kernel_margin >= -1e-10 * std::max(1.0, ks.eigenvalues().cwiseAbs().maxCoeff());
    return cert;
}

SufficiencyPairReport verify_sufficiency_pair(const SymplecticSpace& space, int n, const std::vector<RVec>& means,
                                              int samples, std::uint64_t seed) {
    return verify_sufficiency_pair(space, n, means, randomization_map(space, n), samples, seed);
}

SufficiencyPairReport verify_sufficiency_pair(const SymplecticSpace& space, int n, const std::vector<RVec>& means,
                                              const GaussianMap& randomization, int samples, std::uint64_t seed) {
    SufficiencyPairReport rep;
    rep.constraint_margin = state_constraint_margin(space.alpha(), space.sigma());
    if (rep.constraint_margin < -kStateConstraintTol)
        throw std::invalid_argument("verify_sufficiency_pair: state constraint violated");
    GaussianMap t = sample_mean_channel(space, n);
    SymplecticSpace big = space.direct_sum(n);
    if (randomization.domain.dim() != big.dim() || randomization.codomain.dim() != space.dim())
        throw std::invalid_argument("verify_sufficiency_pair: randomization has wrong shape");
    Rng rng(seed);
    std::vector<RVec> fs;
    for (int i = 0; i < samples; ++i) fs.push_back(random_real_vector(big.dim(), rng));
    for (const RVec& m : means) {
        if (m.size() != space.dim()) throw std::invalid_argument("verify_sufficiency_pair: mean has wrong dimension");
        QuasifreeState psi(big, m.replicate(n, 1));
        for (const RVec& f : fs) {
            WeylPolynomial w = WeylPolynomial::weyl(f);
            cplx lhs = psi.eval(t.apply(randomization.apply(w)));
            rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - psi.eval(w)));
            ++rep.evaluations;
        }
    }
    return rep;
}

// ---- Gaussian shift ----

RMat modular_flow(const SymplecticSpace& space, double t) {
    ModularFrame fr = modular_frame(space);
    return fr.a_inv_half * flow_in_frame(fr, t) * fr.a_half;
}

GaussianShiftResult gaussian_shift_minimal_subspace(const SymplecticSpace& space, const std::vector<RVec>& generators,
                                                    const std::vector<double>& times) {
    const int d = space.dim();
    ModularFrame fr = modular_frame(space);
    GaussianShiftResult res;
    res.complex_structure_defect = (fr.j * fr.j + RMat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (res.complex_structure_defect > 1e-9)
        throw std::runtime_error("gaussian shift: polar part is not a complex structure");
    RMat j = fr.a_inv_half * fr.j * fr.a_half;

    std::vector<RMat> flows;
    for (double t : times) {
        RMat v = fr.a_inv_half * flow_in_frame(fr, t) * fr.a_half;
        res.orthogonality_defect =
            std::max(res.orthogonality_defect, (v.transpose() * space.alpha() * v - space.alpha()).cwiseAbs().maxCoeff());
        res.commutation_defect = std::max(res.commutation_defect, (v * j - j * v).cwiseAbs().maxCoeff());
        flows.push_back(v);
    }

    std::vector<RVec> cols;
    for (const RVec& g : generators) {
        if (g.size() != d) throw std::invalid_argument("gaussian shift: generator has wrong dimension");
        for (const RMat& v : flows) cols.push_back(v * g - g);
    }
    res.basis = RMat::Zero(d, 0);
    if (!cols.empty()) {
        RMat stack(d, static_cast<Eigen::Index>(cols.size()));
        for (size_t c = 0; c < cols.size(); ++c) stack.col(static_cast<Eigen::Index>(c)) = cols[c];
        Eigen::JacobiSVD<RMat> svd(stack, Eigen::ComputeThinU);
        const RVec& s = svd.singularValues();
        int rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > 1e-9) ++rank;
        res.rank = rank;
        res.basis = svd.matrixU().leftCols(rank);
    }

    // u_t = exp(i sigma(V_t g, g)) W(V_t g - g) satisfies u_{t+s} = u_t sigma_t(u_s).
    auto cocycle = [&](const RMat& v, const RVec& g) {
        RVec vg = v * g;
        return WeylPolynomial::weyl(vg - g, std::exp(cplx(0.0, space.sigma_form(vg, g))));
    };
    for (const RVec& g : generators)
        for (size_t a = 0; a < times.size(); ++a)
            for (size_t b = 0; b < times.size(); ++b) {
                RMat vs = flows[b];
                RMat vsum = fr.a_inv_half * flow_in_frame(fr, times[a] + times[b]) * fr.a_half;
                WeylPolynomial us = cocycle(vs, g);
                WeylPolynomial moved;
                for (const auto& [c, f] : us.terms) moved.terms.push_back({c, flows[a] * f});
                WeylPolynomial prod = multiply(cocycle(flows[a], g), moved, space);
                WeylPolynomial direct = cocycle(vsum, g);
                res.cocycle_defect = std::max(res.cocycle_defect, std::abs(prod.terms[0].first - direct.terms[0].first));
                res.cocycle_defect =
                    std::max(res.cocycle_defect, (prod.terms[0].second - direct.terms[0].second).cwiseAbs().maxCoeff());
            }
    return res;
}

}  // namespace qsuff
