#include "qsuff/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace qsuff {

namespace {

constexpr double kWeightFloor = 1e-14;

Mat normalized_or_mixed(const Mat& x, double weight) {
    if (weight > kWeightFloor) return x / weight;
    return Mat::Identity(x.rows(), x.cols()) / static_cast<double>(x.rows());
}

int ipow(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

std::vector<int> digits(int idx, int d, int n) {
    std::vector<int> out(n);
    for (int k = n - 1; k >= 0; --k) {
        out[k] = idx % d;
        idx /= d;
    }
    return out;
}

}  // namespace

// ---- Factorization ----

Factorization factorize(const StatisticalExperiment& exp, const StarSubalgebra& alg, const SufficiencyOptions& opt) {
    if (alg.ambient_dim() != exp.dim) throw std::invalid_argument("factorize: dimension mismatch");
    if (!is_modular_invariant(alg, exp.omega))
        throw std::invalid_argument("factorize: subalgebra is not invariant under the modular group");
    Factorization f;
    f.basis_change = alg.basis_change();
    f.blocks = alg.blocks();
    f.central_projections = alg.central_projections();
    const size_t nb = f.blocks.size();

    for (size_t k = 0; k < nb; ++k) {
        const Block b = f.blocks[k];
        Mat w = alg.block_isometry(static_cast<int>(k));
        Mat y = w.adjoint() * exp.omega.mat() * w;
        f.right.push_back(normalized_or_mixed(partial_trace(y, {b.d, b.m}, {1}), y.trace().real()));
    }
    for (const ThetaState& s : exp.states) {
        std::vector<double> weights;
        std::vector<Mat> left;
        for (size_t k = 0; k < nb; ++k) {
            const Block b = f.blocks[k];
            Mat w = alg.block_isometry(static_cast<int>(k));
            Mat y = w.adjoint() * s.rho.mat() * w;
            const double weight = y.trace().real();
            weights.push_back(weight);
            left.push_back(normalized_or_mixed(partial_trace(y, {b.d, b.m}, {0}), weight));
            if (weight > 1e-12) {
                Mat r = partial_trace(y, {b.d, b.m}, {1}) / weight;
                f.right_variation = std::max(f.right_variation, trace_norm(r - f.right[k]));
            }
        }
        f.weights.push_back(std::move(weights));
        f.left.push_back(std::move(left));
    }
    for (size_t t = 0; t < exp.states.size(); ++t)
        f.residual = std::max(f.residual, trace_norm(exp.states[t].rho.mat() - rebuild(f, static_cast<int>(t))));

    f.sufficient_verdict = subalgebra_sufficient(exp, alg, opt).sufficient;
    const bool rebuilt = f.residual <= 1e-6;
    if (!rebuilt || !f.sufficient_verdict)
        throw std::runtime_error("factorize: family does not factorize across the subalgebra (rebuild residual " +
                                 std::to_string(f.residual) + ", sufficiency verdict " +
                                 (f.sufficient_verdict ? "true" : "false") + ")");
    return f;
}

Mat rebuild(const Factorization& f, int theta_index) {
    const Eigen::Index n = f.basis_change.rows();
    Mat inner = Mat::Zero(n, n);
    int off = 0;
    for (size_t k = 0; k < f.blocks.size(); ++k) {
        const int size = f.blocks[k].d * f.blocks[k].m;
        inner.block(off, off, size, size) = f.weights[theta_index][k] * kron(f.left[theta_index][k], f.right[k]);
        off += size;
    }
    return f.basis_change * inner * f.basis_change.adjoint();
}

// ---- Tensor powers ----

Mat permutation_operator(int d, const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    const int dim = ipow(d, n);
    Mat p = Mat::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        std::vector<int> in = digits(idx, d, n);
        std::vector<int> out(n);
        for (int k = 0; k < n; ++k) out[perm[k]] = in[k];
        int j = 0;
        for (int k = 0; k < n; ++k) j = j * d + out[k];
        p(j, idx) = 1.0;
    }
    return p;
}

OperatorSpan permutation_commutant(int d, int n) {
    const int dim = ipow(d, n);
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> orbits;
    for (int r = 0; r < dim; ++r) {
        std::vector<int> ri = digits(r, d, n);
        for (int c = 0; c < dim; ++c) {
            std::vector<int> ci = digits(c, d, n);
            std::vector<int> key(n);
            for (int k = 0; k < n; ++k) key[k] = ri[k] * d + ci[k];
            std::sort(key.begin(), key.end());
            orbits[key].push_back({r, c});
        }
    }
    OperatorSpan sp;
    sp.ambient_dim = dim;
    for (const auto& [key, entries] : orbits) {
        Mat e = Mat::Zero(dim, dim);
        const double scale = 1.0 / std::sqrt(static_cast<double>(entries.size()));
        for (const auto& [r, c] : entries) e(r, c) = scale;
        sp.basis.push_back(e);
    }
    return sp;
}

SymmetricPowerResult symmetric_power_experiment(const std::vector<DensityMatrix>& family, int n,
                                                const SufficiencyOptions& opt) {
    if (family.empty()) throw std::invalid_argument("symmetric_power_experiment: empty family");
    if (n < 1 || n > 4) throw std::invalid_argument("symmetric_power_experiment: n must lie in 1..4");
    const int d = family[0].dim();
    if (ipow(d, n) > 256) throw std::invalid_argument("symmetric_power_experiment: d^n exceeds 256");
    std::vector<ThetaState> states;
    for (size_t i = 0; i < family.size(); ++i) {
        if (family[i].dim() != d) throw std::invalid_argument("symmetric_power_experiment: dimension mismatch");
        Mat p = family[i].mat();
        for (int k = 1; k < n; ++k) p = kron(p, family[i].mat());
        states.push_back({{static_cast<double>(i)}, DensityMatrix(p)});
    }
    SymmetricPowerResult out;
    out.experiment = build_experiment(std::move(states));
    out.algebra = block_decompose(permutation_commutant(d, n), opt.seed);
    out.factorization = factorize(out.experiment, out.algebra, opt);
    return out;
}

// ---- Pure families ----

PureFamilyReport pure_family_analysis(const std::vector<CVec>& vectors, std::optional<std::pair<int, int>> factor_dims,
                                      const SufficiencyOptions& opt) {
    if (vectors.empty()) throw std::invalid_argument("pure_family_analysis: empty family");
    const Eigen::Index n = vectors[0].size();
    std::vector<ThetaState> states;
    std::vector<CVec> unit;
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != n) throw std::invalid_argument("pure_family_analysis: dimension mismatch");
        const double nrm = vectors[i].norm();
        if (!(nrm > 1e-12)) throw std::invalid_argument("pure_family_analysis: zero vector");
        unit.push_back(vectors[i] / nrm);
        states.push_back({{static_cast<double>(i)}, DensityMatrix::pure(unit.back())});
    }
    StatisticalExperiment exp = build_experiment(std::move(states));
    PureFamilyReport rep;
    rep.support_rank = exp.omega.support_rank();
    rep.minimal = minimal_sufficient_subalgebra(exp, opt);
    rep.single_factor = rep.minimal.algebra.blocks().size() == 1;
    for (size_t a = 0; a < unit.size(); ++a)
        for (size_t b = a + 1; b < unit.size(); ++b) {
            const double ov = std::abs(unit[a].dot(unit[b]));
            rep.min_overlap = std::min(rep.min_overlap, ov);
            if (ov < kOrthogonalityTol) rep.has_orthogonal_pair = true;
        }
    rep.dichotomy_holds = rep.has_orthogonal_pair || rep.single_factor;

    if (factor_dims) {
        const auto [dl, dr] = *factor_dims;
        if (static_cast<Eigen::Index>(dl) * dr != n)
            throw std::invalid_argument("pure_family_analysis: factor dimensions do not match the vector length");
        std::vector<CVec> rights;
        for (const CVec& v : unit) {
            Mat m(dl, dr);
            for (int i = 0; i < dl; ++i)
                for (int j = 0; j < dr; ++j) m(i, j) = v(i * dr + j);
            Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const RVec& s = svd.singularValues();
            int rank = 0;
            for (Eigen::Index i = 0; i < s.size(); ++i)
                if (s(i) > 1e-8 * s(0)) ++rank;
            rep.max_schmidt_rank = std::max(rep.max_schmidt_rank, rank);
            rights.push_back(svd.matrixV().col(0).conjugate());
        }
        if (rep.max_schmidt_rank == 1) {
            rep.right_factor = rights[0];
            rep.right_fidelity = 1.0;
            for (const CVec& r : rights) rep.right_fidelity = std::min(rep.right_fidelity, std::norm(rights[0].dot(r)));
            rep.split_detected = dr > 1 && rep.right_fidelity > 1.0 - 1e-8;
        }
    }
    return rep;
}

}  // namespace qsuff
