#include "qsuff/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qsuff/channels.hpp"

namespace qsuff {

namespace {

Mat unit(int n, int i, int j) {
    Mat e = Mat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

CVec mat_to_vec(const Mat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

Mat vec_to_mat(const CVec& v, int n) {
    return Eigen::Map<const Mat>(v.data(), n, n);
}

Mat random_element(const OperatorSpan& sp, Rng& rng) {
    Mat r = Mat::Zero(sp.ambient_dim, sp.ambient_dim);
    Mat c = random_ginibre(sp.size(), 1, rng);
    for (int j = 0; j < sp.size(); ++j) r += c(j, 0) * sp.basis[j];
    return r;
}

Mat random_hermitian_element(const OperatorSpan& sp, Rng& rng) {
    return hermitian_part(random_element(sp, rng));
}

// Groups ascending eigenvalues into clusters separated by more than gap.
std::vector<std::vector<Eigen::Index>> cluster(const RVec& ev, double gap) {
    std::vector<std::vector<Eigen::Index>> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (out.empty() || ev(i) - ev(out.back().back()) > gap) out.emplace_back();
        out.back().push_back(i);
    }
    return out;
}

Mat columns(const Mat& v, const std::vector<Eigen::Index>& idx) {
    Mat out(v.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = v.col(idx[k]);
    return out;
}

// Descending lexicographic comparison of projection entries, tolerance 1e-8.
bool projection_before(const Mat& a, const Mat& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            double dr = a(i, j).real() - b(i, j).real();
            if (std::abs(dr) > 1e-8) return dr > 0;
            double di = a(i, j).imag() - b(i, j).imag();
            if (std::abs(di) > 1e-8) return di > 0;
        }
    return false;
}

struct BlockPiece {
    Block block;
    Mat iso;   // n x (d m), columns ordered (i, s) -> i m + s
    Mat proj;  // central projection
};

// Splits the range of one minimal central projection as C^d (x) C^m.
bool split_block(const OperatorSpan& sp, const Mat& w, Rng& rng, BlockPiece& piece) {
    const Eigen::Index r = w.cols();
    std::vector<Mat> compressed;
    for (const Mat& e : sp.basis) compressed.push_back(w.adjoint() * e * w);
    OperatorSpan local = OperatorSpan::from_elements(static_cast<int>(r), compressed, 1e-8);
    const int dd = local.size();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dd))));
    if (d * d != dd || r % d != 0) return false;
    const int m = static_cast<int>(r) / d;
    piece.block = {d, m};
    piece.proj = w * w.adjoint();
    if (d == 1) {
        piece.iso = w;
        return true;
    }
    Mat a = random_hermitian_element(local, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    auto groups = cluster(es.eigenvalues(), 1e-6);
    if (static_cast<int>(groups.size()) != d) return false;
    for (const auto& g : groups)
        if (static_cast<int>(g.size()) != m) return false;
    std::vector<Mat> y;
    for (const auto& g : groups) y.push_back(columns(es.eigenvectors(), g));
    Mat b = random_element(local, rng);
    Mat local_iso(r, r);
    std::vector<Mat> v(d);
    v[0] = y[0];
    for (int i = 1; i < d; ++i) {
        Mat link = y[i].adjoint() * b * y[0];  // c_i times a unitary
        Eigen::JacobiSVD<Mat> svd(link);
        double c = svd.singularValues().mean();
        if (c < 1e-6 || (svd.singularValues().maxCoeff() - svd.singularValues().minCoeff()) > 1e-6 * std::max(1.0, c))
            return false;
        v[i] = y[i] * link / c;
    }
    for (int i = 0; i < d; ++i)
        for (int s = 0; s < m; ++s) local_iso.col(i * m + s) = v[i].col(s);
    piece.iso = w * local_iso;
    return true;
}

}  // namespace

// ---- OperatorSpan ----

Mat OperatorSpan::project(const Mat& x) const {
    Mat out = Mat::Zero(ambient_dim, ambient_dim);
    for (const Mat& b : basis) out += hs_inner(b, x) * b;
    return out;
}

double OperatorSpan::residual(const Mat& x) const { return (x - project(x)).norm(); }

OperatorSpan OperatorSpan::from_elements(int n, const std::vector<Mat>& elems, double tol) {
    OperatorSpan sp;
    sp.ambient_dim = n;
    double scale = 0.0;
    for (const Mat& x : elems) {
        if (x.rows() != n || x.cols() != n) throw std::invalid_argument("OperatorSpan: element has wrong size");
        scale = std::max(scale, x.norm());
    }
    for (const Mat& x : elems) {
        // Rounding noise (e.g. a product of orthogonal blocks) must not be normalized into a direction.
        double nx = x.norm();
        if (nx <= tol * scale) continue;
        Mat v = x / nx;
        for (int pass = 0; pass < 2; ++pass)
            for (const Mat& b : sp.basis) v -= hs_inner(b, v) * b;
        double nv = v.norm();
        if (nv > tol) sp.basis.push_back(v / nv);
        if (sp.size() == n * n) break;
    }
    return sp;
}

OperatorSpan OperatorSpan::full(int n) {
    OperatorSpan sp;
    sp.ambient_dim = n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) sp.basis.push_back(unit(n, i, j));
    return sp;
}

double span_distance(const OperatorSpan& a, const OperatorSpan& b) {
    double worst = 0.0;
    for (const Mat& x : a.basis) worst = std::max(worst, b.residual(x));
    for (const Mat& x : b.basis) worst = std::max(worst, a.residual(x));
    return worst;
}

// ---- StarSubalgebra ----

StarSubalgebra::StarSubalgebra(const Mat& basis_change, std::vector<Block> blocks)
    : n_(static_cast<int>(basis_change.rows())), u_(basis_change), blocks_(std::move(blocks)) {
    if (u_.rows() != u_.cols()) throw std::invalid_argument("StarSubalgebra: basis change must be square");
    if ((u_.adjoint() * u_ - Mat::Identity(n_, n_)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("StarSubalgebra: basis change is not unitary");
    int total = 0;
    for (const Block& b : blocks_) {
        if (b.d <= 0 || b.m <= 0) throw std::invalid_argument("StarSubalgebra: block sizes must be positive");
        offsets_.push_back(total);
        total += b.d * b.m;
    }
    if (total != n_) throw std::invalid_argument("StarSubalgebra: block sizes do not add up to the dimension");
}

StarSubalgebra StarSubalgebra::full(int n) { return StarSubalgebra(Mat::Identity(n, n), {{n, 1}}); }

StarSubalgebra StarSubalgebra::scalars(int n) { return StarSubalgebra(Mat::Identity(n, n), {{1, n}}); }

StarSubalgebra StarSubalgebra::diagonal(int n) {
    return StarSubalgebra(Mat::Identity(n, n), std::vector<Block>(n, Block{1, 1}));
}

int StarSubalgebra::dimension() const {
    int s = 0;
    for (const Block& b : blocks_) s += b.d * b.d;
    return s;
}

Mat StarSubalgebra::block_isometry(int k) const {
    return u_.middleCols(offsets_[k], blocks_[k].d * blocks_[k].m);
}

std::vector<Mat> StarSubalgebra::components(const Mat& x) const {
    std::vector<Mat> out;
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const int d = blocks_[k].d;
        const int m = blocks_[k].m;
        Mat w = block_isometry(static_cast<int>(k));
        Mat y = w.adjoint() * x * w;
        Mat c = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int s = 0; s < m; ++s) c(i, j) += y(i * m + s, j * m + s);
        out.push_back(c / static_cast<double>(m));
    }
    return out;
}

Mat StarSubalgebra::embed(const std::vector<Mat>& comps) const {
    if (comps.size() != blocks_.size()) throw std::invalid_argument("StarSubalgebra::embed: wrong number of blocks");
    Mat inner = Mat::Zero(n_, n_);
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const int d = blocks_[k].d;
        const int m = blocks_[k].m;
        inner.block(offsets_[k], offsets_[k], d * m, d * m) = kron(comps[k], Mat::Identity(m, m));
    }
    return u_ * inner * u_.adjoint();
}

Mat StarSubalgebra::project(const Mat& x) const { return embed(components(x)); }

double StarSubalgebra::residual(const Mat& x) const { return (x - project(x)).norm(); }

OperatorSpan StarSubalgebra::span() const {
    OperatorSpan sp;
    sp.ambient_dim = n_;
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const int d = blocks_[k].d;
        const int m = blocks_[k].m;
        Mat w = block_isometry(static_cast<int>(k));
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                sp.basis.push_back(w * kron(unit(d, i, j), Mat::Identity(m, m)) * w.adjoint() / std::sqrt(m));
    }
    return sp;
}

OperatorSpan StarSubalgebra::commutant_span() const {
    OperatorSpan sp;
    sp.ambient_dim = n_;
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const int d = blocks_[k].d;
        const int m = blocks_[k].m;
        Mat w = block_isometry(static_cast<int>(k));
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                sp.basis.push_back(w * kron(Mat::Identity(d, d), unit(m, i, j)) * w.adjoint() / std::sqrt(d));
    }
    return sp;
}

std::vector<Mat> StarSubalgebra::central_projections() const {
    std::vector<Mat> out;
    for (size_t k = 0; k < blocks_.size(); ++k) {
        Mat w = block_isometry(static_cast<int>(k));
        out.push_back(w * w.adjoint());
    }
    return out;
}

// ---- Commutant and generation ----

OperatorSpan commutant(const std::vector<Mat>& gens, int n) {
    if (gens.empty()) return OperatorSpan::full(n);
    const int nn = n * n;
    Mat gram = Mat::Zero(nn, nn);
    Mat id = Mat::Identity(n, n);
    for (const Mat& g : gens) {
        if (g.rows() != n || g.cols() != n) throw std::invalid_argument("commutant: generator has wrong size");
        // vec(gx - xg) = (I (x) g - g^T (x) I) vec(x)
        Mat l = kron(id, g) - kron(g.transpose(), id);
        gram += l.adjoint() * l;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(gram));
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    OperatorSpan sp;
    sp.ambient_dim = n;
    for (Eigen::Index i = 0; i < nn; ++i)
        if (es.eigenvalues()(i) < 1e-10 * top) sp.basis.push_back(vec_to_mat(es.eigenvectors().col(i), n));
    return sp;
}

StarSubalgebra generated_algebra(const std::vector<Mat>& gens, int n, std::uint64_t seed) {
    std::vector<Mat> letters;
    for (const Mat& g : gens) {
        if (g.rows() != n || g.cols() != n) throw std::invalid_argument("generated_algebra: generator has wrong size");
        letters.push_back(g);
        letters.push_back(g.adjoint());
    }
    std::vector<Mat> seedset{Mat::Identity(n, n)};
    seedset.insert(seedset.end(), letters.begin(), letters.end());
    OperatorSpan sp = OperatorSpan::from_elements(n, seedset, 1e-8);
    // Right multiplication by letters until the span stops growing.
    size_t frontier = 0;
    while (frontier < sp.basis.size()) {
        size_t end = sp.basis.size();
        std::vector<Mat> cand = sp.basis;
        for (size_t i = frontier; i < end; ++i)
            for (const Mat& l : letters) cand.push_back(sp.basis[i] * l);
        sp = OperatorSpan::from_elements(n, cand, 1e-8);
        if (sp.size() > n * n) throw std::logic_error("generated_algebra: span exceeds ambient algebra");
        frontier = end;
    }
    return block_decompose(sp, seed);
}

StarSubalgebra block_decompose(const OperatorSpan& span, std::uint64_t seed) {
    const int n = span.ambient_dim;
    const int dim = span.size();
    if (dim == 0) throw std::invalid_argument("block_decompose: empty span");
    if (span.residual(Mat::Identity(n, n)) > 1e-8)
        throw std::invalid_argument("block_decompose: span does not contain the identity");
    Rng rng(seed);
    {
        Mat r = random_element(span, rng);
        double worst = 0.0;
        for (const Mat& e : span.basis) {
            worst = std::max(worst, span.residual(e.adjoint()));
            worst = std::max(worst, span.residual(e * r));
            worst = std::max(worst, span.residual(r * e));
        }
        if (worst > 1e-8)
            throw std::invalid_argument("block_decompose: span is not a *-algebra (residual " + std::to_string(worst) +
                                        ")");
    }
    if (dim == n * n) return StarSubalgebra::full(n);
    if (dim == 1) return StarSubalgebra::scalars(n);

    for (int attempt = 0; attempt < 10; ++attempt) {
        // Center: coefficient vectors c with [sum c_k e_k, r] = 0 for two random elements.
        Mat r1 = random_element(span, rng);
        Mat r2 = random_element(span, rng);
        Mat cmat(2 * n * n, dim);
        for (int k = 0; k < dim; ++k) {
            const Mat& e = span.basis[k];
            cmat.col(k) << mat_to_vec(e * r1 - r1 * e), mat_to_vec(e * r2 - r2 * e);
        }
        Eigen::SelfAdjointEigenSolver<Mat> cs(cmat.adjoint() * cmat);
        double top = std::max(1.0, cs.eigenvalues().maxCoeff());
        std::vector<Mat> center;
        for (int i = 0; i < dim; ++i) {
            if (cs.eigenvalues()(i) >= 1e-14 * top) continue;
            Mat z = Mat::Zero(n, n);
            for (int k = 0; k < dim; ++k) z += cs.eigenvectors()(k, i) * span.basis[k];
            center.push_back(z);
        }
        bool central = !center.empty();
        for (const Mat& z : center)
            for (const Mat& e : span.basis)
                if ((z * e - e * z).norm() > 1e-8) central = false;
        if (!central) continue;

        std::normal_distribution<double> nd(0.0, 1.0);
        Mat z = Mat::Zero(n, n);
        for (const Mat& c : center) {
            z += nd(rng) * hermitian_part(c);
            z += nd(rng) * hermitian_part(cplx(0.0, 1.0) * c);
        }
        Eigen::SelfAdjointEigenSolver<Mat> zs(hermitian_part(z));
        auto groups = cluster(zs.eigenvalues(), 1e-6);
        if (groups.size() != center.size()) continue;

        std::vector<BlockPiece> pieces;
        bool ok = true;
        for (const auto& g : groups) {
            BlockPiece piece;
            if (!split_block(span, columns(zs.eigenvectors(), g), rng, piece)) {
                ok = false;
                break;
            }
            pieces.push_back(piece);
        }
        if (!ok) continue;
        std::stable_sort(pieces.begin(), pieces.end(), [](const BlockPiece& a, const BlockPiece& b) {
            if (a.block.d != b.block.d) return a.block.d > b.block.d;
            if (a.block.m != b.block.m) return a.block.m > b.block.m;
            return projection_before(a.proj, b.proj);
        });
        Mat u(n, n);
        std::vector<Block> blocks;
        int col = 0;
        for (const BlockPiece& p : pieces) {
            u.middleCols(col, p.iso.cols()) = p.iso;
            col += static_cast<int>(p.iso.cols());
            blocks.push_back(p.block);
        }
        StarSubalgebra alg(u, blocks);
        if (alg.dimension() != dim) continue;
        double worst = 0.0;
        for (const Mat& e : span.basis) worst = std::max(worst, alg.residual(e));
        if (worst > 1e-8) continue;
        return alg;
    }
    throw std::runtime_error("block_decompose: no non-degenerate random draw within 10 attempts");
}

// ---- Conditional expectations ----

QuantumChannel trace_conditional_expectation(const StarSubalgebra& alg) {
    std::vector<Mat> kraus;
    for (size_t k = 0; k < alg.blocks().size(); ++k) {
        const int d = alg.blocks()[k].d;
        const int m = alg.blocks()[k].m;
        Mat w = alg.block_isometry(static_cast<int>(k));
        for (int s = 0; s < m; ++s)
            for (int t = 0; t < m; ++t)
                kraus.push_back(w * kron(Mat::Identity(d, d), unit(m, s, t)) * w.adjoint() / std::sqrt(m));
    }
    return QuantumChannel(std::move(kraus), Picture::Heisenberg);
}

QuantumChannel generalized_conditional_expectation(const StarSubalgebra& alg, const DensityMatrix& omega) {
    if (omega.dim() != alg.ambient_dim())
        throw std::invalid_argument("generalized_conditional_expectation: dimension mismatch");
    if (!omega.faithful()) throw std::invalid_argument("generalized_conditional_expectation: state is not faithful");
    // State-weighted dual of the inclusion, whose Schrodinger form is the trace-preserving projection.
    return petz_dual(trace_conditional_expectation(alg), omega);
}

ModularInvariance modular_invariance(const StarSubalgebra& alg, const DensityMatrix& omega) {
    if (omega.dim() != alg.ambient_dim()) throw std::invalid_argument("is_modular_invariant: dimension mismatch");
    if (!omega.faithful()) throw std::invalid_argument("is_modular_invariant: state is not faithful");
    ModularInvariance out;
    Mat h = mlog(omega.mat());
    OperatorSpan sp = alg.span();
    for (const Mat& b : sp.basis) out.generator_residual = std::max(out.generator_residual, alg.residual(h * b - b * h));
    for (double t : {0.5, 1.0}) {
        Mat u = mpow_it(omega.mat(), t);
        for (const Mat& b : sp.basis)
            out.conjugation_residual = std::max(out.conjugation_residual, alg.residual(u * b * u.adjoint()));
    }
    out.invariant = out.generator_residual < 1e-9 * std::max(1.0, h.norm());
    return out;
}

bool is_modular_invariant(const StarSubalgebra& alg, const DensityMatrix& omega) {
    return modular_invariance(alg, omega).invariant;
}

}  // namespace qsuff
