#include "qsuff/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qsuff {

namespace {

void finalize(SufficiencyVerdict& v) {
    int yes = 0;
    int total = 0;
    for (const auto& [name, c] : v.per_criterion) {
        ++total;
        if (c.pass) ++yes;
    }
    v.sufficient = 2 * yes > total;
    v.consistent = (yes == 0 || yes == total);
}

double max_criterion_residual(const SufficiencyVerdict& v) {
    double r = 0.0;
    for (const auto& [name, c] : v.per_criterion) r = std::max(r, c.residual);
    return r;
}

bool is_identity_support(const DensityMatrix& omega) { return omega.faithful(); }

Mat support_isometry(const DensityMatrix& omega) {
    if (is_identity_support(omega)) return Mat::Identity(omega.dim(), omega.dim());
    return support_basis(omega.mat());
}

StarSubalgebra compress_algebra(const StarSubalgebra& alg, const Mat& v, std::uint64_t seed) {
    std::vector<Mat> elems;
    for (const Mat& e : alg.span().basis) elems.push_back(v.adjoint() * e * v);
    return block_decompose(OperatorSpan::from_elements(static_cast<int>(v.cols()), elems, 1e-8), seed);
}

// Reassembles a subalgebra from per-block isometries.
StarSubalgebra assemble(const std::vector<std::pair<Mat, Block>>& pieces, int n) {
    Mat u(n, n);
    std::vector<Block> blocks;
    int col = 0;
    for (const auto& [iso, b] : pieces) {
        u.middleCols(col, iso.cols()) = iso;
        col += static_cast<int>(iso.cols());
        blocks.push_back(b);
    }
    return StarSubalgebra(u, blocks);
}

}  // namespace

// ---- Experiments ----

StatisticalExperiment build_experiment(std::vector<ThetaState> states, std::vector<double> weights) {
    if (states.empty()) throw std::invalid_argument("build_experiment: empty family");
    const int n = states[0].rho.dim();
    for (const ThetaState& s : states)
        if (s.rho.dim() != n) throw std::invalid_argument("build_experiment: states have different dimensions");
    if (weights.empty()) weights.assign(states.size(), 1.0 / static_cast<double>(states.size()));
    if (weights.size() != states.size()) throw std::invalid_argument("build_experiment: weight count mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("build_experiment: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("build_experiment: weights must sum to 1");
    Mat om = Mat::Zero(n, n);
    for (size_t i = 0; i < states.size(); ++i) om += weights[i] * states[i].rho.mat();
    StatisticalExperiment exp;
    exp.dim = n;
    exp.omega = DensityMatrix(om);
    exp.states = std::move(states);
    exp.weights = std::move(weights);
    for (const ThetaState& s : exp.states)
        if (!support_contained(s.rho.mat(), exp.omega.mat()))
            throw std::logic_error("build_experiment: state not dominated by the mixture");
    return exp;
}

StatisticalExperiment compress_experiment(const StatisticalExperiment& exp, const Mat& v) {
    std::vector<ThetaState> states;
    for (const ThetaState& s : exp.states) {
        Mat r = v.adjoint() * s.rho.mat() * v;
        states.push_back({s.theta, DensityMatrix(r / r.trace().real())});
    }
    return build_experiment(std::move(states), exp.weights);
}

// ---- Subalgebra criteria ----

SufficiencyVerdict subalgebra_sufficient(const StatisticalExperiment& exp, const StarSubalgebra& alg,
                                         const SufficiencyOptions& opt) {
    if (alg.ambient_dim() != exp.dim) throw std::invalid_argument("subalgebra_sufficient: dimension mismatch");
    if (!exp.omega.faithful()) {
        Mat p = support_projection(exp.omega.mat());
        if (alg.residual(p) > 1e-8)
            throw std::invalid_argument("subalgebra_sufficient: support of the dominating state lies outside the subalgebra");
        Mat v = support_basis(exp.omega.mat());
        return subalgebra_sufficient(compress_experiment(exp, v), compress_algebra(alg, v, opt.seed), opt);
    }
    SufficiencyVerdict out;
    const DensityMatrix& omega = exp.omega;
    DensityMatrix omega0(alg.project(omega.mat()));

    double ent = 0.0;
    for (const ThetaState& s : exp.states) {
        DensityMatrix r0(alg.project(s.rho.mat()));
        for (double a : opt.alphas) ent = std::max(ent, std::abs(alpha_entropy(s.rho, omega, a) - alpha_entropy(r0, omega0, a)));
    }
    out.per_criterion["alpha_entropy_restriction"] = {ent < opt.tol, ent};

    double coc = 0.0;
    Mat log_omega = mlog(omega.mat());
    for (const ThetaState& s : exp.states) {
        for (double t : opt.times) coc = std::max(coc, alg.residual(connes_cocycle(s.rho, omega, t)));
        if (s.rho.faithful()) coc = std::max(coc, alg.residual(mlog(s.rho.mat()) - log_omega));
    }
    out.per_criterion["cocycle_membership"] = {coc < opt.tol, coc};

    QuantumChannel e = generalized_conditional_expectation(alg, omega);
    double inv = 0.0;
    for (const ThetaState& s : exp.states) inv = std::max(inv, trace_norm(e.schrodinger(s.rho.mat()) - s.rho.mat()));
    out.per_criterion["conditional_expectation_invariance"] = {inv < opt.tol, inv};

    finalize(out);
    out.witness = e;
    out.witness_residual = inv;
    return out;
}

// ---- Channel criteria ----

MatsuffResult matsuff_check(const StatisticalExperiment& exp, const QuantumChannel& ch, double tol) {
    if (ch.in_dim() != exp.dim) throw std::invalid_argument("matsuff_check: dimension mismatch");
    CompressedChannel cc = compress_to_support(ch, exp.omega);
    const QuantumChannel& t = cc.channel;
    Mat log_w = mlog(cc.omega.mat());
    Mat log_tw = mlog(t.schrodinger(cc.omega.mat()));
    MatsuffResult out;
    for (const ThetaState& s : exp.states) {
        Mat r = cc.compress_input(s.rho.mat());
        DensityMatrix rc(r / r.trace().real());
        if (!rc.faithful()) throw std::invalid_argument("matsuff_check: family member not faithful on the support");
        DensityMatrix tr(t.schrodinger(rc.mat()));
        if (!tr.faithful()) throw std::invalid_argument("matsuff_check: image state not faithful on the support");
        Mat lhs = t.heisenberg(mlog(tr.mat()) - log_tw);
        Mat rhs = mlog(rc.mat()) - log_w;
        out.residual = std::max(out.residual, (lhs - rhs).norm());
    }
    out.pass = out.residual < tol;
    return out;
}

SufficiencyVerdict channel_sufficient(const StatisticalExperiment& exp, const QuantumChannel& ch,
                                      const SufficiencyOptions& opt) {
    if (ch.in_dim() != exp.dim) throw std::invalid_argument("channel_sufficient: dimension mismatch");
    CompressedChannel cc = compress_to_support(ch, exp.omega);
    StatisticalExperiment ec = compress_experiment(exp, cc.p_iso);
    const QuantumChannel& t = cc.channel;
    const DensityMatrix& omega = ec.omega;
    DensityMatrix t_omega(t.schrodinger(omega.mat()));
    SufficiencyVerdict out;

    QuantumChannel recovery = petz_dual(t, omega);
    double rec = 0.0;
    for (const ThetaState& s : ec.states)
        rec = std::max(rec, trace_norm(s.rho.mat() - recovery.schrodinger(t.schrodinger(s.rho.mat()))));
    out.per_criterion["dual_recovery"] = {rec < opt.tol, rec};

    double ent = 0.0;
    double rel = 0.0;
    double coc = 0.0;
    for (const ThetaState& s : ec.states) {
        DensityMatrix ts(t.schrodinger(s.rho.mat()));
        for (double a : opt.alphas)
            ent = std::max(ent, std::abs(alpha_entropy(s.rho, omega, a) - alpha_entropy(ts, t_omega, a)));
        rel = std::max(rel, std::abs(relative_entropy(s.rho, omega) - relative_entropy(ts, t_omega)));
        for (double tt : opt.times)
            coc = std::max(coc, (t.heisenberg(connes_cocycle(ts, t_omega, tt)) - connes_cocycle(s.rho, omega, tt)).norm());
    }
    out.per_criterion["alpha_entropy_preservation"] = {ent < opt.tol, ent};
    out.per_criterion["relative_entropy_preservation"] = {rel < opt.tol, rel};
    out.per_criterion["cocycle_image"] = {coc < opt.tol, coc};

    bool sub_consistent = true;
    {
        StarSubalgebra dom = multiplicative_domain(t, opt.seed);
        std::vector<Mat> images;
        for (const Mat& b : dom.span().basis) images.push_back(t.heisenberg(b));
        StarSubalgebra img = generated_algebra(images, ec.dim, opt.seed);
        SufficiencyVerdict sv = subalgebra_sufficient(ec, img, opt);
        sub_consistent = sub_consistent && sv.consistent;
        out.per_criterion["multiplicative_domain_image"] = {sv.sufficient, max_criterion_residual(sv)};
    }
    {
        FixedPointAnalysis fp = fixed_point_analysis(t, omega, opt.seed);
        StarSubalgebra fixed = block_decompose(fp.input_fixed, opt.seed);
        SufficiencyVerdict sv = subalgebra_sufficient(ec, fixed, opt);
        sub_consistent = sub_consistent && sv.consistent;
        out.per_criterion["fixed_point_algebra"] = {sv.sufficient, max_criterion_residual(sv)};
    }
    try {
        MatsuffResult ms = matsuff_check(exp, ch, opt.tol);
        out.per_criterion["matrix_log_identity"] = {ms.pass, ms.residual};
    } catch (const std::invalid_argument&) {
        // Needs faithful family members; other criteria still apply.
    }

    finalize(out);
    out.consistent = out.consistent && sub_consistent;
    out.witness = extend_recovery(cc, recovery, exp.omega);
    double wres = 0.0;
    for (const ThetaState& s : exp.states)
        wres = std::max(wres, trace_norm(s.rho.mat() - out.witness->schrodinger(ch.schrodinger(s.rho.mat()))));
    out.witness_residual = wres;
    return out;
}

// ---- Minimal sufficient subalgebra ----

MinimalSufficient minimal_sufficient_subalgebra(const StatisticalExperiment& exp, const SufficiencyOptions& opt) {
    MinimalSufficient out;
    out.support = support_isometry(exp.omega);
    StatisticalExperiment ec = exp.omega.faithful() ? exp : compress_experiment(exp, out.support);
    const int r = ec.dim;
    std::vector<double> times = opt.times;
    Mat log_omega = mlog(ec.omega.mat());
    for (int round = 0; round <= 3; ++round) {
        std::vector<Mat> gens;
        for (const ThetaState& s : ec.states) {
            for (double t : times) gens.push_back(connes_cocycle(s.rho, ec.omega, t));
            if (s.rho.faithful()) gens.push_back(mlog(s.rho.mat()) - log_omega);
        }
        out.algebra = generated_algebra(gens, r, opt.seed);
        out.times = times;
        out.rounds = round;
        SufficiencyOptions o = opt;
        o.times = times;
        SufficiencyVerdict v = subalgebra_sufficient(ec, out.algebra, o);
        if (v.sufficient && v.consistent) {
            out.validated = true;
            break;
        }
        std::vector<double> more = times;
        for (double t : times) more.push_back(t * 1.6180339887498949);
        times = more;
    }
    out.minimal_spot_check = out.validated && minimality_spot_check(ec, out.algebra, opt);
    return out;
}

bool minimality_spot_check(const StatisticalExperiment& exp, const StarSubalgebra& alg, const SufficiencyOptions& opt) {
    const int n = alg.ambient_dim();
    const auto& blocks = alg.blocks();
    std::vector<std::pair<Mat, Block>> pieces;
    for (size_t k = 0; k < blocks.size(); ++k) pieces.push_back({alg.block_isometry(static_cast<int>(k)), blocks[k]});
    for (size_t k = 0; k < pieces.size(); ++k) {
        std::vector<std::pair<Mat, Block>> reduced = pieces;
        const Block b = pieces[k].second;
        if (b.d > 1) {
            reduced[k].second = {1, b.d * b.m};
        } else {
            size_t j = k + 1;
            while (j < pieces.size() && pieces[j].second.d != 1) ++j;
            if (j == pieces.size()) continue;
            Mat iso(n, pieces[k].first.cols() + pieces[j].first.cols());
            iso << pieces[k].first, pieces[j].first;
            reduced[k] = {iso, Block{1, b.m + pieces[j].second.m}};
            reduced.erase(reduced.begin() + static_cast<long>(j));
        }
        if (subalgebra_sufficient(exp, assemble(reduced, n), opt).sufficient) return false;
    }
    return true;
}

}  // namespace qsuff
