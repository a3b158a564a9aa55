#include "qsuff/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qsuff {

namespace {

void check_statistic(const FiniteExperiment& exp, const Statistic& t) {
    if (static_cast<int>(t.size()) != exp.n) throw std::invalid_argument("statistic: wrong sample space size");
    for (int v : t)
        if (v < 0) throw std::invalid_argument("statistic: values must be non-negative");
}

std::vector<double> fiber_mass(const RVec& p, const Statistic& t, int k) {
    std::vector<double> m(k, 0.0);
    for (size_t x = 0; x < t.size(); ++x) m[t[x]] += p(static_cast<Eigen::Index>(x));
    return m;
}

// Calls f on every set partition of {0, ..., n-1}, given as a block label per point.
template <class F>
bool for_each_partition(int n, F&& f) {
    std::vector<int> label(n, 0);
    std::vector<int> top(n, 0);
    while (true) {
        if (!f(label)) return false;
        int i = n - 1;
        while (i > 0 && label[i] == top[i - 1] + 1) --i;
        if (i <= 0) return true;
        ++label[i];
        top[i] = std::max(top[i - 1], label[i]);
        for (int j = i + 1; j < n; ++j) {
            label[j] = 0;
            top[j] = top[i];
        }
    }
}

}  // namespace

FiniteExperiment make_finite_experiment(std::vector<ClassicalMember> family, std::optional<RVec> mu) {
    if (family.empty()) throw std::invalid_argument("finite experiment: empty family");
    FiniteExperiment exp;
    exp.n = static_cast<int>(family[0].p.size());
    if (exp.n == 0) throw std::invalid_argument("finite experiment: empty sample space");
    for (const ClassicalMember& m : family) {
        if (m.p.size() != exp.n) throw std::invalid_argument("finite experiment: probability vectors differ in length");
        if (m.p.minCoeff() < 0.0) throw std::invalid_argument("finite experiment: negative probability");
        if (std::abs(m.p.sum() - 1.0) > 1e-12) throw std::invalid_argument("finite experiment: probabilities must sum to 1");
    }
    exp.family = std::move(family);
    if (mu) {
        if (mu->size() != exp.n || mu->minCoeff() < 0.0)
            throw std::invalid_argument("finite experiment: invalid dominating measure");
        exp.mu = *mu;
    } else {
        exp.mu = RVec::Zero(exp.n);
        for (const ClassicalMember& m : exp.family) exp.mu += m.p;
        exp.mu /= static_cast<double>(exp.family.size());
    }
    for (const ClassicalMember& m : exp.family)
        for (int x = 0; x < exp.n; ++x)
            if (m.p(x) > 0.0 && exp.mu(x) <= 0.0)
                throw std::invalid_argument("finite experiment: member not dominated by mu");
    return exp;
}

int statistic_range(const Statistic& t) { return t.empty() ? 0 : *std::max_element(t.begin(), t.end()) + 1; }

double conditional_spread(const FiniteExperiment& exp, const Statistic& t) {
    check_statistic(exp, t);
    const int k = statistic_range(t);
    std::vector<std::vector<double>> masses;
    for (const ClassicalMember& m : exp.family) masses.push_back(fiber_mass(m.p, t, k));
    double spread = 0.0;
    for (int x = 0; x < exp.n; ++x) {
        if (exp.mu(x) <= 0.0) continue;
        double lo = kInfinity;
        double hi = -kInfinity;
        for (size_t i = 0; i < exp.family.size(); ++i) {
            const double fm = masses[i][t[x]];
            if (fm <= kClassicalTol) continue;
            const double c = exp.family[i].p(x) / fm;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        if (hi >= lo) spread = std::max(spread, hi - lo);
    }
    return spread;
}

bool is_sufficient_statistic(const FiniteExperiment& exp, const Statistic& t) {
    return conditional_spread(exp, t) <= kClassicalTol;
}

bool factorization_check(const FiniteExperiment& exp, const Statistic& t) {
    check_statistic(exp, t);
    const int k = statistic_range(t);
    RVec pooled = RVec::Zero(exp.n);
    for (const ClassicalMember& m : exp.family) pooled += m.p;
    std::vector<double> pooled_mass = fiber_mass(pooled, t, k);
    RVec h = RVec::Zero(exp.n);
    for (int x = 0; x < exp.n; ++x)
        if (pooled_mass[t[x]] > 0.0) h(x) = pooled(x) / pooled_mass[t[x]];
    for (const ClassicalMember& m : exp.family) {
        std::vector<double> g = fiber_mass(m.p, t, k);
        for (int x = 0; x < exp.n; ++x)
            if (std::abs(m.p(x) - g[t[x]] * h(x)) > kClassicalTol) return false;
    }
    return true;
}

Statistic likelihood_ratio_statistic(const RVec& p, const RVec& q) {
    if (p.size() != q.size()) throw std::invalid_argument("likelihood_ratio_statistic: length mismatch");
    const Eigen::Index n = p.size();
    std::vector<std::pair<double, Eigen::Index>> ratios;
    for (Eigen::Index x = 0; x < n; ++x)
        if (p(x) + q(x) > 0.0) ratios.push_back({p(x) / (p(x) + q(x)), x});
    std::sort(ratios.begin(), ratios.end());
    Statistic t(static_cast<size_t>(n), -1);
    int level = -1;
    double prev = -kInfinity;
    for (const auto& [r, x] : ratios) {
        if (level < 0 || r - prev > kClassicalTol) {
            ++level;
            prev = r;
        }
        t[static_cast<size_t>(x)] = level;
    }
    for (int& v : t)
        if (v < 0) v = level + 1;
    return t;
}

bool is_coarsest_sufficient(const FiniteExperiment& exp, const Statistic& t) {
    check_statistic(exp, t);
    if (exp.n > 8) throw std::invalid_argument("is_coarsest_sufficient: exhaustive search limited to N <= 8");
    if (!is_sufficient_statistic(exp, t)) return false;
    return for_each_partition(exp.n, [&](const std::vector<int>& s) {
        if (!is_sufficient_statistic(exp, s)) return true;
        for (int x = 0; x < exp.n; ++x)
            for (int y = x + 1; y < exp.n; ++y)
                if (exp.mu(x) > 0.0 && exp.mu(y) > 0.0 && s[x] == s[y] && t[x] != t[y]) return false;
        return true;
    });
}

StatisticalExperiment embed_diagonal(const FiniteExperiment& exp) {
    std::vector<ThetaState> states;
    for (const ClassicalMember& m : exp.family)
        states.push_back({m.theta, DensityMatrix(m.p.cast<cplx>().asDiagonal().toDenseMatrix())});
    return build_experiment(std::move(states));
}

StarSubalgebra statistic_subalgebra(const Statistic& t) {
    const int n = static_cast<int>(t.size());
    const int k = statistic_range(t);
    Mat u = Mat::Zero(n, n);
    std::vector<Block> blocks;
    int col = 0;
    for (int level = 0; level < k; ++level) {
        int size = 0;
        for (int x = 0; x < n; ++x)
            if (t[x] == level) {
                u(x, col++) = 1.0;
                ++size;
            }
        if (size > 0) blocks.push_back({1, size});
    }
    return StarSubalgebra(u, blocks);
}

FiniteExperiment bernoulli_product_experiment(int n_trials, const std::vector<double>& thetas) {
    if (n_trials < 1 || n_trials > 20) throw std::invalid_argument("bernoulli_product_experiment: 1 <= N <= 20");
    const int size = 1 << n_trials;
    std::vector<ClassicalMember> family;
    for (double th : thetas) {
        if (!(th > 0.0 && th < 1.0)) throw std::invalid_argument("bernoulli_product_experiment: theta in (0, 1)");
        RVec p(size);
        for (int x = 0; x < size; ++x) {
            const int ones = __builtin_popcount(static_cast<unsigned>(x));
            p(x) = std::pow(th, ones) * std::pow(1.0 - th, n_trials - ones);
        }
        family.push_back({{th}, p / p.sum()});
    }
    return make_finite_experiment(std::move(family));
}

Statistic count_statistic(int n_trials) {
    Statistic t(static_cast<size_t>(1) << n_trials);
    for (size_t x = 0; x < t.size(); ++x) t[x] = __builtin_popcount(static_cast<unsigned>(x));
    return t;
}

NormalDemoReport discretized_normal_demo(int variables, const std::vector<double>& means, int grid_points,
                                         double half_width) {
    if (variables < 1 || variables > 3) throw std::invalid_argument("discretized_normal_demo: 1 to 3 variables");
    if (grid_points < 2) throw std::invalid_argument("discretized_normal_demo: need at least two grid points");
    if (means.empty()) throw std::invalid_argument("discretized_normal_demo: empty family");
    const double step = 2.0 * half_width / (grid_points - 1);
    int size = 1;
    for (int v = 0; v < variables; ++v) size *= grid_points;
    Statistic t(static_cast<size_t>(size));
    std::vector<ClassicalMember> family;
    for (double m : means) {
        RVec one(grid_points);
        for (int i = 0; i < grid_points; ++i) {
            const double g = -half_width + step * i;
            one(i) = std::exp(-0.5 * (g - m) * (g - m));
        }
        one /= one.sum();
        RVec p(size);
        for (int x = 0; x < size; ++x) {
            double pr = 1.0;
            int rest = x;
            int idx_sum = 0;
            for (int v = 0; v < variables; ++v) {
                pr *= one(rest % grid_points);
                idx_sum += rest % grid_points;
                rest /= grid_points;
            }
            p(x) = pr;
            t[static_cast<size_t>(x)] = idx_sum;
        }
        family.push_back({{m}, p / p.sum()});
    }
    FiniteExperiment exp = make_finite_experiment(std::move(family));
    NormalDemoReport rep;
    rep.variables = variables;
    rep.grid_points = grid_points;
    rep.max_conditional_variation = conditional_spread(exp, t);
    rep.sufficient = rep.max_conditional_variation <= 1e-9;
    return rep;
}

}  // namespace qsuff
