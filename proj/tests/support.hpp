#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qsuff/algebra.hpp"
#include "qsuff/channels.hpp"
#include "qsuff/classical.hpp"
#include "qsuff/divergences.hpp"
#include "qsuff/expfam.hpp"
#include "qsuff/factorization.hpp"
#include "qsuff/gaussian_ccr.hpp"
#include "qsuff/operator_core.hpp"
#include "qsuff/random.hpp"
#include "qsuff/sufficiency.hpp"

namespace qtest {

using namespace qsuff;

inline Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Mat pauli_y() {
    Mat m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
inline Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}
inline Mat diag_of(const RVec& v) { return v.cast<cplx>().asDiagonal().toDenseMatrix(); }
inline CVec ket(int n, int i) {
    CVec v = CVec::Zero(n);
    v(i) = 1.0;
    return v;
}

inline Mat block_diag(const Mat& a, const Mat& b) {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

// ---- Independent oracles ----

// Matrix logarithm and exponential through the Schur-Parlett algorithms of Eigen's unsupported module.
inline Mat oracle_log(const Mat& m) { return Mat(m.log()); }
inline Mat oracle_exp(const Mat& m) { return Mat(m.exp()); }
inline Mat oracle_sqrt(const Mat& m) { return Mat(m.sqrt()); }

inline double oracle_trace_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

inline double oracle_kl(const RVec& p, const RVec& q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) s += p(i) * std::log(p(i) / q(i));
    return s;
}

// Explicit Kraus sum from the Choi matrix, independent of the Kraus list.
inline Mat oracle_apply_choi(const Mat& choi, int in_dim, const Mat& rho) {
    const int out = static_cast<int>(choi.rows()) / in_dim;
    Mat y = Mat::Zero(out, out);
    for (int i = 0; i < in_dim; ++i)
        for (int j = 0; j < in_dim; ++j) y += rho(i, j) * choi.block(i * out, j * out, out, out);
    return y;
}

// ---- Generators ----

// The Stinespring isometry needs kraus_count * out >= in; smaller counts are raised.
inline QuantumChannel random_channel(int in, int out, int kraus_count, Rng& rng) {
    kraus_count = std::max(kraus_count, (in + out - 1) / out);
    Mat g = random_ginibre(kraus_count * out, in, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(g.adjoint() * g);
    Mat inv_half = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() *
                   es.eigenvectors().adjoint();
    Mat v = g * inv_half;
    std::vector<Mat> kraus;
    for (int k = 0; k < kraus_count; ++k) kraus.push_back(v.middleRows(k * out, out));
    return QuantumChannel(kraus);
}

inline std::vector<ThetaState> random_family(int n, int count, Rng& rng, double min_eig = 0.02) {
    std::vector<ThetaState> out;
    for (int i = 0; i < count; ++i) out.push_back({{static_cast<double>(i)}, random_density(n, rng, -1, min_eig)});
    return out;
}

inline std::vector<ThetaState> product_family(int d1, const DensityMatrix& tau, int count, Rng& rng) {
    std::vector<ThetaState> out;
    for (int i = 0; i < count; ++i)
        out.push_back({{static_cast<double>(i)}, DensityMatrix(kron(random_density(d1, rng, -1, 0.02).mat(), tau.mat()))});
    return out;
}

// Two-qubit family with one entangled member; the first marginal alone cannot recover it.
inline std::vector<ThetaState> correlated_family(Rng& rng) {
    CVec bell = (kron(ket(2, 0), ket(2, 0)) + kron(ket(2, 1), ket(2, 1))) / std::sqrt(2.0);
    Mat mixed = Mat::Identity(4, 4) / 4.0;
    Mat ent = 0.7 * bell * bell.adjoint() + 0.3 * mixed;
    Mat prod = kron(random_density(2, rng, -1, 0.05).mat(), random_density(2, rng, -1, 0.05).mat());
    return {{{0.0}, DensityMatrix(ent)}, {{1.0}, DensityMatrix(prod)}};
}

// Subalgebra U (sum M_d (x) I_m) U* with a Haar-random U.
inline StarSubalgebra random_subalgebra(const std::vector<Block>& blocks, Rng& rng) {
    int n = 0;
    for (const Block& b : blocks) n += b.d * b.m;
    return StarSubalgebra(random_unitary(n, rng), blocks);
}

// Faithful state U (sum a_k (x) b_k) U* whose modular group preserves alg.
inline DensityMatrix invariant_state(const StarSubalgebra& alg, Rng& rng) {
    const int n = alg.ambient_dim();
    Mat inner = Mat::Zero(n, n);
    int off = 0;
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (const Block& b : alg.blocks()) {
        const int size = b.d * b.m;
        inner.block(off, off, size, size) =
            u(rng) * kron(random_density(b.d, rng, -1, 0.05).mat(), random_density(b.m, rng, -1, 0.05).mat());
        off += size;
    }
    inner /= inner.trace().real();
    return DensityMatrix(Mat(alg.basis_change() * inner * alg.basis_change().adjoint()));
}

// rho_theta = U (sum_k w_k(theta) rho^L_k(theta) (x) rho^R_k) U* with theta-independent right factors.
inline std::vector<ThetaState> factorized_family(const StarSubalgebra& alg, int count, Rng& rng) {
    const int n = alg.ambient_dim();
    std::vector<Mat> right;
    for (const Block& b : alg.blocks()) right.push_back(random_density(b.m, rng, -1, 0.05).mat());
    std::vector<ThetaState> out;
    for (int i = 0; i < count; ++i) {
        RVec w = random_probability(static_cast<int>(alg.blocks().size()), rng, 0.1);
        Mat inner = Mat::Zero(n, n);
        int off = 0;
        for (size_t k = 0; k < alg.blocks().size(); ++k) {
            const Block& b = alg.blocks()[k];
            inner.block(off, off, b.d * b.m, b.d * b.m) = w(static_cast<Eigen::Index>(k)) * kron(random_density(b.d, rng, -1, 0.05).mat(), right[k]);
            off += b.d * b.m;
        }
        out.push_back({{static_cast<double>(i)}, DensityMatrix(Mat(alg.basis_change() * inner * alg.basis_change().adjoint()))});
    }
    return out;
}

struct ChannelInstance {
    std::string label;
    StatisticalExperiment exp;
    QuantumChannel channel;
    bool expected_sufficient;
};

struct SubalgebraInstance {
    std::string label;
    StatisticalExperiment exp;
    StarSubalgebra algebra;
    bool expected_sufficient;
};

inline ChannelInstance unitary_instance(int n, Rng& rng) {
    return {"unitary n=" + std::to_string(n), build_experiment(random_family(n, 3, rng)),
            QuantumChannel::unitary(random_unitary(n, rng)), true};
}

inline ChannelInstance product_trace_out_instance(int d1, int d2, Rng& rng) {
    DensityMatrix tau = random_density(d2, rng, -1, 0.05);
    return {"product family, trace out", build_experiment(product_family(d1, tau, 3, rng)),
            QuantumChannel::partial_trace({d1, d2}, {0}), true};
}

inline ChannelInstance depolarizing_instance(int n, double eps, Rng& rng) {
    return {"depolarizing eps=" + std::to_string(eps), build_experiment(random_family(n, 3, rng)),
            QuantumChannel::depolarizing(n, eps), false};
}

inline ChannelInstance correlated_trace_out_instance(Rng& rng) {
    return {"correlated family, trace out", build_experiment(correlated_family(rng)),
            QuantumChannel::partial_trace({2, 2}, {0}), false};
}

inline SubalgebraInstance diagonal_instance(int n, Rng& rng) {
    std::vector<ThetaState> fam;
    for (int i = 0; i < 3; ++i) fam.push_back({{double(i)}, DensityMatrix(diag_of(random_probability(n, rng, 0.05)))});
    return {"commuting family, diagonal", build_experiment(fam), StarSubalgebra::diagonal(n), true};
}

inline SubalgebraInstance off_diagonal_instance(int n, Rng& rng) {
    return {"generic family, diagonal", build_experiment(random_family(n, 3, rng)), StarSubalgebra::diagonal(n), false};
}

// BKM metric oracle g_ij = Tr(d_i rho d_j log rho) by central differences of an arbitrary state map.
inline RMat oracle_bkm_fisher(const std::function<Mat(const Theta&)>& state, const Theta& theta, double step = 1e-5) {
    const int p = static_cast<int>(theta.size());
    std::vector<Mat> d_rho, d_log;
    for (int i = 0; i < p; ++i) {
        Theta hi = theta, lo = theta;
        hi[i] += step;
        lo[i] -= step;
        Mat rh = state(hi), rl = state(lo);
        d_rho.push_back((rh - rl) / (2 * step));
        d_log.push_back((oracle_log(rh) - oracle_log(rl)) / (2 * step));
    }
    RMat g(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = (d_rho[i] * d_log[j]).trace().real();
    return g;
}

// Hessian of theta -> log Tr exp(H + sum theta_i a_i) by central differences.
inline RMat log_partition_hessian(const ExponentialFamily& fam, const Theta& theta, double step = 1e-4) {
    const int p = fam.num_params();
    RMat h(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            auto at = [&](double si, double sj) {
                Theta t = theta;
                t[i] += si;
                t[j] += sj;
                return fam.log_partition(t);
            };
            h(i, j) = (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) / (4 * step * step);
        }
    return h;
}

inline std::vector<Theta> grid_1d(std::initializer_list<double> xs) {
    std::vector<Theta> g;
    for (double x : xs) g.push_back({x});
    return g;
}

inline ExponentialFamily random_exponential_family(int n, int params, Rng& rng) {
    std::vector<Mat> gens;
    for (int i = 0; i < params; ++i) gens.push_back(random_hermitian(n, rng) * 0.5);
    std::vector<Theta> grid;
    for (int g = 0; g < 3; ++g) {
        Theta t;
        for (int i = 0; i < params; ++i) t.push_back(0.3 * g - 0.2 * i);
        grid.push_back(t);
    }
    return ExponentialFamily(random_hermitian(n, rng) * 0.5, gens, grid);
}

// Direct check: P(x) / P(T = T(x)) agrees across members on every fiber with positive mass.
inline bool oracle_sufficient(const FiniteExperiment& exp, const Statistic& t) {
    const int k = statistic_range(t);
    std::vector<RVec> cond;
    for (const auto& mem : exp.family) {
        RVec mass = RVec::Zero(k);
        for (int x = 0; x < exp.n; ++x) mass(t[x]) += mem.p(x);
        RVec c = RVec::Constant(exp.n, -1.0);
        for (int x = 0; x < exp.n; ++x)
            if (mass(t[x]) > 1e-14) c(x) = mem.p(x) / mass(t[x]);
        cond.push_back(c);
    }
    for (int x = 0; x < exp.n; ++x)
        for (size_t a = 0; a < cond.size(); ++a)
            for (size_t b = 0; b < cond.size(); ++b)
                if (cond[a](x) >= 0 && cond[b](x) >= 0 && std::abs(cond[a](x) - cond[b](x)) > 1e-10) return false;
    return true;
}

// Restricted-growth enumeration of set partitions of {0, ..., n-1}.
inline void for_each_partition(int n, const std::function<void(const Statistic&)>& fn) {
    Statistic t(n, 0);
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == n) {
            fn(t);
            return;
        }
        for (int c = 0; c <= used; ++c) {
            t[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    rec(0, 0);
}

inline bool refines(const Statistic& fine, const Statistic& coarse) {
    for (size_t x = 0; x < fine.size(); ++x)
        for (size_t y = 0; y < fine.size(); ++y)
            if (fine[x] == fine[y] && coarse[x] != coarse[y]) return false;
    return true;
}

// P_theta(x) = g_theta(T(x)) h(x | T(x)) with random g and h.
inline FiniteExperiment sufficient_by_construction(const Statistic& t, int members, Rng& rng) {
    const int n = static_cast<int>(t.size());
    const int k = statistic_range(t);
    RVec h = random_probability(n, rng, 0.05);
    RVec fiber = RVec::Zero(k);
    for (int x = 0; x < n; ++x) fiber(t[x]) += h(x);
    std::vector<ClassicalMember> fam;
    for (int m = 0; m < members; ++m) {
        RVec g = random_probability(k, rng, 0.05);
        RVec p(n);
        for (int x = 0; x < n; ++x) p(x) = g(t[x]) * h(x) / fiber(t[x]);
        fam.push_back({{double(m)}, p});
    }
    return make_finite_experiment(fam);
}

}  // namespace qtest
