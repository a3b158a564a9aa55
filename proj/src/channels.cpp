#include "qsuff/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsuff {

namespace {

Mat unit(int n, int i, int j) {
    Mat e = Mat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

Mat vec_to_mat(const CVec& v, int n) {
    Mat m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = v(j * n + i);
    return m;
}

CVec mat_to_vec(const Mat& m) {
    CVec v(m.size());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(j * m.rows() + i) = m(i, j);
    return v;
}

// Null space of a Hermitian positive semidefinite matrix, relative threshold.
Mat psd_null_space(const Mat& g, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g));
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < rel_tol * top) idx.push_back(i);
    Mat out(g.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(idx[k]);
    return out;
}

void require_faithful(const Mat& rho, const char* where) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(rho), Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() <= kSupportTol * top)
        throw std::invalid_argument(std::string(where) + ": reference state is not faithful");
}

}  // namespace

// ---- QuantumChannel ----

QuantumChannel::QuantumChannel(std::vector<Mat> kraus, Picture constructed_from)
    : kraus_(std::move(kraus)), picture_(constructed_from) {
    if (kraus_.empty()) throw std::invalid_argument("QuantumChannel: empty Kraus list");
    out_ = static_cast<int>(kraus_[0].rows());
    in_ = static_cast<int>(kraus_[0].cols());
    for (const Mat& k : kraus_)
        if (k.rows() != out_ || k.cols() != in_)
            throw std::invalid_argument("QuantumChannel: Kraus operators have inconsistent shapes");
    double defect = trace_preservation_defect();
    if (defect > 1e-10)
        throw std::invalid_argument("QuantumChannel: not trace preserving (defect " + std::to_string(defect) + ")");
}

double QuantumChannel::trace_preservation_defect() const {
    Mat s = Mat::Zero(in_, in_);
    for (const Mat& k : kraus_) s += k.adjoint() * k;
    return (s - Mat::Identity(in_, in_)).cwiseAbs().maxCoeff();
}

QuantumChannel QuantumChannel::from_choi(const Mat& choi, int in_dim) {
    if (in_dim <= 0 || choi.rows() != choi.cols() || choi.rows() % in_dim != 0)
        throw std::invalid_argument("from_choi: Choi matrix size incompatible with input dimension");
    const int out = static_cast<int>(choi.rows()) / in_dim;
    if (hermiticity_defect(choi) > 1e-10) throw std::invalid_argument("from_choi: Choi matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(choi));
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * top)
        throw std::invalid_argument("from_choi: map is not completely positive");
    std::vector<Mat> kraus;
    for (Eigen::Index c = es.eigenvalues().size() - 1; c >= 0; --c) {
        double lam = es.eigenvalues()(c);
        if (lam <= 1e-14 * top) continue;
        Mat k(out, in_dim);
        for (int i = 0; i < in_dim; ++i)
            for (int a = 0; a < out; ++a) k(a, i) = std::sqrt(lam) * es.eigenvectors()(i * out + a, c);
        kraus.push_back(k);
    }
    return QuantumChannel(std::move(kraus), Picture::Schrodinger);
}

QuantumChannel QuantumChannel::from_schrodinger_map(const std::function<Mat(const Mat&)>& map, int in_dim,
                                                    int out_dim) {
    Mat c = choi_of(map, in_dim);
    if (c.rows() != static_cast<Eigen::Index>(in_dim) * out_dim)
        throw std::invalid_argument("from_schrodinger_map: output dimension mismatch");
    return from_choi(c, in_dim);
}

QuantumChannel QuantumChannel::from_heisenberg_map(const std::function<Mat(const Mat&)>& map, int in_dim,
                                                   int out_dim) {
    // T(E_ij)_ab = H(E_ba)_ji for the Schrodinger dual T of H.
    std::vector<Mat> images(static_cast<size_t>(out_dim) * out_dim);
    for (int a = 0; a < out_dim; ++a)
        for (int b = 0; b < out_dim; ++b) images[a * out_dim + b] = map(unit(out_dim, a, b));
    auto schrod = [&](const Mat& x) {
        Mat y(out_dim, out_dim);
        for (int a = 0; a < out_dim; ++a)
            for (int b = 0; b < out_dim; ++b) y(a, b) = (images[b * out_dim + a].transpose().cwiseProduct(x)).sum();
        return y;
    };
    QuantumChannel ch = from_choi(choi_of(schrod, in_dim), in_dim);
    ch.picture_ = Picture::Heisenberg;
    return ch;
}

QuantumChannel QuantumChannel::identity(int n) { return QuantumChannel({Mat::Identity(n, n)}); }

QuantumChannel QuantumChannel::unitary(const Mat& u) { return QuantumChannel({u}); }

QuantumChannel QuantumChannel::depolarizing(int n, double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("depolarizing: eps must lie in [0, 1]");
    // (1-eps) rho + eps Tr(rho) I/n, Kraus: sqrt(1-eps) I and sqrt(eps/n) E_ij.
    std::vector<Mat> kraus;
    if (eps < 1.0) kraus.push_back(std::sqrt(1.0 - eps) * Mat::Identity(n, n));
    if (eps > 0.0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) kraus.push_back(std::sqrt(eps / n) * unit(n, i, j));
    return QuantumChannel(std::move(kraus));
}

QuantumChannel QuantumChannel::partial_trace(const std::vector<int>& dims, const std::vector<int>& keep) {
    int total = 1;
    for (int d : dims) total *= d;
    return from_schrodinger_map([&](const Mat& x) { return qsuff::partial_trace(x, dims, keep); }, total,
                                static_cast<int>(qsuff::partial_trace(Mat::Identity(total, total), dims, keep).rows()));
}

QuantumChannel QuantumChannel::append_state(int in_dim, const Mat& tau) {
    DensityMatrix t(tau);
    Mat vecs = support_basis(t.mat());
    std::vector<Mat> kraus;
    for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        double lam = (vecs.col(c).adjoint() * t.mat() * vecs.col(c))(0, 0).real();
        kraus.push_back(kron(Mat::Identity(in_dim, in_dim), std::sqrt(lam) * vecs.col(c)));
    }
    return QuantumChannel(std::move(kraus));
}

Mat QuantumChannel::schrodinger(const Mat& rho) const {
    if (rho.rows() != in_ || rho.cols() != in_) throw std::invalid_argument("schrodinger_apply: dimension mismatch");
    Mat out = Mat::Zero(out_, out_);
    for (const Mat& k : kraus_) out += k * rho * k.adjoint();
    return out;
}

Mat QuantumChannel::heisenberg(const Mat& a) const {
    if (a.rows() != out_ || a.cols() != out_) throw std::invalid_argument("heisenberg_apply: dimension mismatch");
    Mat out = Mat::Zero(in_, in_);
    for (const Mat& k : kraus_) out += k.adjoint() * a * k;
    return out;
}

Mat QuantumChannel::choi() const {
    return choi_of([this](const Mat& x) { return schrodinger(x); }, in_);
}

Mat QuantumChannel::superoperator() const {
    Mat s = Mat::Zero(static_cast<Eigen::Index>(out_) * out_, static_cast<Eigen::Index>(in_) * in_);
    for (const Mat& k : kraus_) s += kron(k.conjugate(), k);
    return s;
}

QuantumChannel QuantumChannel::then(const QuantumChannel& next) const {
    if (next.in_ != out_) throw std::invalid_argument("QuantumChannel::then: dimension mismatch");
    std::vector<Mat> kraus;
    for (const Mat& b : next.kraus_)
        for (const Mat& a : kraus_) kraus.push_back(b * a);
    return QuantumChannel(std::move(kraus));
}

HermitianOperator heisenberg_apply(const QuantumChannel& ch, const HermitianOperator& a) {
    return HermitianOperator(ch.heisenberg(a.mat()));
}

DensityMatrix schrodinger_apply(const QuantumChannel& ch, const DensityMatrix& rho) {
    return DensityMatrix(ch.schrodinger(rho.mat()));
}

// ---- Positivity ----

Mat choi_of(const LinearMap& map, int in_dim) {
    Mat first = map(unit(in_dim, 0, 0));
    const Eigen::Index out = first.rows();
    Mat c = Mat::Zero(in_dim * out, in_dim * out);
    for (int i = 0; i < in_dim; ++i)
        for (int j = 0; j < in_dim; ++j) {
            Mat img = (i == 0 && j == 0) ? first : map(unit(in_dim, i, j));
            c.block(i * out, j * out, out, out) = img;
        }
    return c;
}

bool is_2_positive(const LinearMap& heisenberg, int in_dim, std::uint64_t seed) {
    Mat c = choi_of(heisenberg, in_dim);
    if (hermiticity_defect(c) > 1e-10) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(c), Eigen::EigenvaluesOnly);
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * top) return false;
    Rng rng(seed);
    for (int s = 0; s < 8; ++s) {
        Mat a = random_ginibre(in_dim, in_dim, rng);
        Mat fa = heisenberg(a);
        Mat defect = heisenberg(a.adjoint() * a) - fa.adjoint() * fa;
        Eigen::SelfAdjointEigenSolver<Mat> ds(hermitian_part(defect), Eigen::EigenvaluesOnly);
        if (ds.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, a.squaredNorm())) return false;
    }
    return true;
}

bool is_2_positive(const QuantumChannel& ch, std::uint64_t seed) {
    return is_2_positive([&ch](const Mat& a) { return ch.heisenberg(a); }, ch.out_dim(), seed);
}

// ---- State-weighted dual ----

QuantumChannel petz_dual(const QuantumChannel& ch, const DensityMatrix& omega) {
    if (omega.dim() != ch.in_dim()) throw std::invalid_argument("petz_dual: state dimension mismatch");
    require_faithful(omega.mat(), "petz_dual");
    Mat image = ch.schrodinger(omega.mat());
    require_faithful(image, "petz_dual");
    Mat w_half = msqrt(omega.mat());
    Mat t_inv_half = mpow(image, -0.5);
    std::vector<Mat> kraus;
    kraus.reserve(ch.kraus().size());
    for (const Mat& k : ch.kraus()) kraus.push_back(w_half * k.adjoint() * t_inv_half);
    return QuantumChannel(std::move(kraus), Picture::Heisenberg);
}

double petz_duality_residual(const QuantumChannel& ch, const DensityMatrix& omega, int samples,
                             std::uint64_t seed) {
    QuantumChannel pd = petz_dual(ch, omega);
    Mat w_half = msqrt(omega.mat());
    Mat t_half = msqrt(ch.schrodinger(omega.mat()));
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Mat a = random_ginibre(ch.out_dim(), ch.out_dim(), rng);
        Mat b = random_ginibre(ch.in_dim(), ch.in_dim(), rng);
        cplx lhs = (ch.heisenberg(a).adjoint() * w_half * b * w_half).trace();
        cplx rhs = (a.adjoint() * t_half * pd.heisenberg(b) * t_half).trace();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---- Multiplicative domain ----

StarSubalgebra multiplicative_domain(const QuantumChannel& ch, std::uint64_t seed) {
    const int n = ch.out_dim();
    const int in = ch.in_dim();
    const int r = static_cast<int>(ch.kraus().size());
    // Stinespring isometry V: C^in -> C^n (x) C^r.
    Mat v(static_cast<Eigen::Index>(n) * r, in);
    for (int j = 0; j < r; ++j)
        for (int a = 0; a < n; ++a) v.row(a * r + j) = ch.kraus()[j].row(a);
    Mat defect_proj = Mat::Identity(v.rows(), v.rows()) - v * v.adjoint();
    // Schwarz defect vanishes iff (1 - VV*)(a (x) 1)V = 0.
    const int nn = n * n;
    Mat lin(v.rows() * in, nn);
    for (int col = 0; col < nn; ++col) {
        Mat e = unit(n, col % n, col / n);
        Mat img = defect_proj * kron(e, Mat::Identity(r, r)) * v;
        lin.col(col) = mat_to_vec(img);
    }
    Mat l_basis = psd_null_space(lin.adjoint() * lin, 1e-12);
    Mat l_adj(nn, l_basis.cols());
    for (Eigen::Index c = 0; c < l_basis.cols(); ++c)
        l_adj.col(c) = mat_to_vec(vec_to_mat(l_basis.col(c), n).adjoint());
    Mat id = Mat::Identity(nn, nn);
    Mat gram = (id - l_basis * l_basis.adjoint()) + (id - l_adj * l_adj.adjoint());
    Mat both = psd_null_space(gram, 1e-10);
    std::vector<Mat> gens;
    for (Eigen::Index c = 0; c < both.cols(); ++c) gens.push_back(vec_to_mat(both.col(c), n));
    StarSubalgebra dom = generated_algebra(gens, n, seed);
    double res = multiplicative_rule_residual(ch, dom, 6, seed);
    if (res > 1e-9)
        throw std::runtime_error("multiplicative_domain: product rule fails on closure (residual " +
                                 std::to_string(res) + ")");
    return dom;
}

double multiplicative_rule_residual(const QuantumChannel& ch, const StarSubalgebra& domain, int samples,
                                    std::uint64_t seed) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const int n = ch.out_dim();
    OperatorSpan sp = domain.span();
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Mat a = Mat::Zero(n, n);
        for (const Mat& e : sp.basis) a += random_ginibre(1, 1, rng)(0, 0) * e;
        Mat b = random_ginibre(n, n, rng);
        Mat sa = ch.heisenberg(a);
        Mat sb = ch.heisenberg(b);
        worst = std::max(worst, (ch.heisenberg(a * b) - sa * sb).cwiseAbs().maxCoeff());
        worst = std::max(worst, (ch.heisenberg(b * a) - sb * sa).cwiseAbs().maxCoeff());
    }
    return worst;
}

// ---- Fixed points ----

FixedPointAnalysis fixed_point_analysis(const QuantumChannel& ch, const DensityMatrix& omega, std::uint64_t seed) {
    QuantumChannel pd = petz_dual(ch, omega);
    const int n = ch.out_dim();
    const int m = ch.in_dim();
    Mat tau = ch.schrodinger(omega.mat());
    // dual o s is self-adjoint for <x, y> = Tr(x* tau^{1/2} y tau^{1/2}); symmetrize with tau^{1/4}.
    Mat t4 = mpow(tau, 0.25);
    Mat t4i = mpow(tau, -0.25);
    Mat w4 = mpow(omega.mat(), 0.25);
    Mat w4i = mpow(omega.mat(), -0.25);
    auto symmetrized = [](const std::function<Mat(const Mat&)>& f, const Mat& s, const Mat& si, int dim) {
        Mat op(dim * dim, dim * dim);
        for (int c = 0; c < dim * dim; ++c) {
            Mat e = unit(dim, c % dim, c / dim);
            op.col(c) = mat_to_vec(s * f(si * e * si) * s);
        }
        return op;
    };
    auto fixed_space = [&](const Mat& op, const Mat& si, int dim) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(op));
        std::vector<Mat> elems;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-8)
                elems.push_back(si * vec_to_mat(es.eigenvectors().col(i), dim) * si);
        return OperatorSpan::from_elements(dim, elems);
    };
    Mat op_n = symmetrized([&](const Mat& x) { return pd.heisenberg(ch.heisenberg(x)); }, t4, t4i, n);
    Mat op_m = symmetrized([&](const Mat& x) { return ch.heisenberg(pd.heisenberg(x)); }, w4, w4i, m);
    OperatorSpan out_span = fixed_space(op_n, t4i, n);
    OperatorSpan in_span = fixed_space(op_m, w4i, m);

    FixedPointAnalysis out;
    out.output_fixed = generated_algebra(out_span.basis, n, seed);
    out.input_fixed = in_span;
    // s restricted to the output fixed points must be a *-isomorphism onto the input fixed points.
    double worst = 0.0;
    OperatorSpan out_alg = out.output_fixed.span();
    std::vector<Mat> images;
    for (const Mat& a : out_alg.basis) {
        Mat sa = ch.heisenberg(a);
        images.push_back(sa);
        worst = std::max(worst, in_span.residual(sa));
        worst = std::max(worst, (ch.heisenberg(a.adjoint()) - sa.adjoint()).cwiseAbs().maxCoeff());
        for (const Mat& b : out_alg.basis)
            worst = std::max(worst, (ch.heisenberg(a * b) - sa * ch.heisenberg(b)).cwiseAbs().maxCoeff());
    }
    if (OperatorSpan::from_elements(m, images).size() != in_span.size()) worst = std::max(worst, 1.0);
    out.isomorphism_residual = worst;
    return out;
}

StarSubalgebra fixed_point_subalgebra_N1(const QuantumChannel& ch, const DensityMatrix& omega, std::uint64_t seed) {
    FixedPointAnalysis fp = fixed_point_analysis(ch, omega, seed);
    if (fp.isomorphism_residual > 1e-8)
        throw std::runtime_error("fixed_point_subalgebra_N1: restriction is not an isomorphism onto the input fixed points (residual " +
                                 std::to_string(fp.isomorphism_residual) + ")");
    return fp.output_fixed;
}

// ---- Support compression ----

CompressedChannel compress_to_support(const QuantumChannel& ch, const DensityMatrix& omega) {
    if (omega.dim() != ch.in_dim()) throw std::invalid_argument("compress_to_support: state dimension mismatch");
    CompressedChannel cc;
    cc.p_iso = support_basis(omega.mat());
    cc.q_iso = support_basis(ch.schrodinger(omega.mat()));
    std::vector<Mat> kraus;
    for (const Mat& k : ch.kraus()) {
        Mat kc = cc.q_iso.adjoint() * k * cc.p_iso;
        if (kc.cwiseAbs().maxCoeff() > 1e-15) kraus.push_back(kc);
    }
    if (kraus.empty()) kraus.push_back(Mat::Zero(cc.q_iso.cols(), cc.p_iso.cols()));
    cc.channel = QuantumChannel(std::move(kraus), ch.picture());
    Mat w = cc.compress_input(omega.mat());
    cc.omega = DensityMatrix(w / w.trace().real());
    return cc;
}

QuantumChannel extend_recovery(const CompressedChannel& cc, const QuantumChannel& corner_recovery,
                               const DensityMatrix& omega) {
    const Eigen::Index out = cc.q_iso.rows();
    if (corner_recovery.in_dim() != cc.q_iso.cols() || corner_recovery.out_dim() != cc.p_iso.cols())
        throw std::invalid_argument("extend_recovery: corner map has wrong shape");
    std::vector<Mat> kraus;
    for (const Mat& r : corner_recovery.kraus()) kraus.push_back(cc.p_iso * r * cc.q_iso.adjoint());
    // Unit eigenspace of the projection 1 - q.
    Eigen::SelfAdjointEigenSolver<Mat> cs(hermitian_part(Mat::Identity(out, out) - cc.q()));
    std::vector<Eigen::Index> comp_idx;
    for (Eigen::Index i = 0; i < out; ++i)
        if (cs.eigenvalues()(i) > 0.5) comp_idx.push_back(i);
    Mat comp_basis(out, static_cast<Eigen::Index>(comp_idx.size()));
    for (size_t k = 0; k < comp_idx.size(); ++k) comp_basis.col(static_cast<Eigen::Index>(k)) = cs.eigenvectors().col(comp_idx[k]);
    if (comp_basis.cols() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(omega.mat());
        for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) {
            double lam = es.eigenvalues()(a);
            if (lam <= 0.0) continue;
            for (Eigen::Index l = 0; l < comp_basis.cols(); ++l)
                kraus.push_back(std::sqrt(lam) * es.eigenvectors().col(a) * comp_basis.col(l).adjoint());
        }
    }
    return QuantumChannel(std::move(kraus), Picture::Heisenberg);
}

}  // namespace qsuff
