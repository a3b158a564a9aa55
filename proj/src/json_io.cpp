#include "qsuff/json_io.hpp"

#include <cmath>
#include <fstream>

namespace qsuff {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

double number(const Json& j) {
    if (!j.is_number()) throw InputError("expected a number");
    return j.get<double>();
}

int integer(const Json& j) {
    if (!j.is_number_integer()) throw InputError("expected an integer");
    return j.get<int>();
}

cplx entry(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InputError("matrix entries must be numbers or [re, im] pairs");
}

std::vector<int> int_list(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of integers");
    std::vector<int> out;
    for (const Json& e : j) out.push_back(integer(e));
    return out;
}

std::vector<double> real_list(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : j) out.push_back(number(e));
    return out;
}

Json real_or_tag(double x) {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

}  // namespace

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

// ---- Matrices ----

Mat matrix_from_json(const Json& j, bool require_square) {
    if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw InputError("matrix rows must be non-empty arrays");
    const size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InputError("matrix rows have different lengths");
        for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entry(j[r][c]);
    }
    if (require_square && rows != cols) throw InputError("matrix is not square");
    return m;
}

RMat real_matrix_from_json(const Json& j) {
    Mat m = matrix_from_json(j, false);
    if (m.imag().cwiseAbs().maxCoeff() > 0.0) throw InputError("expected a real matrix");
    return m.real();
}

RVec real_vector_from_json(const Json& j) {
    std::vector<double> v = real_list(j);
    return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

Json real_matrix_to_json(const RMat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Json real_vector_to_json(const RVec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// ---- Documents ----

StatisticalExperiment experiment_from_json(const Json& j) {
    const int dim = integer(field(j, "dim"));
    const Json& states = field(j, "states");
    if (!states.is_array() || states.empty()) throw InputError("\"states\" must be a non-empty array");
    std::vector<ThetaState> family;
    for (const Json& s : states) {
        Mat rho = matrix_from_json(field(s, "density"));
        if (rho.rows() != dim) throw InputError("density dimension differs from \"dim\"");
        std::vector<double> theta = s.contains("theta") ? real_list(s.at("theta")) : std::vector<double>{};
        family.push_back({theta, DensityMatrix(rho)});
    }
    std::vector<double> weights = j.contains("weights") ? real_list(j.at("weights")) : std::vector<double>{};
    return build_experiment(std::move(family), std::move(weights));
}

QuantumChannel channel_from_json(const Json& j) {
    if (j.contains("kraus")) {
        const Json& ks = j.at("kraus");
        if (!ks.is_array() || ks.empty()) throw InputError("\"kraus\" must be a non-empty array");
        std::vector<Mat> kraus;
        for (const Json& k : ks) kraus.push_back(matrix_from_json(k, false));
        return QuantumChannel(std::move(kraus));
    }
    if (j.contains("choi")) return QuantumChannel::from_choi(matrix_from_json(j.at("choi")), integer(field(j, "in_dim")));
    const std::string type = field(j, "type").get<std::string>();
    if (type == "identity") return QuantumChannel::identity(integer(field(j, "dim")));
    if (type == "unitary") return QuantumChannel::unitary(matrix_from_json(field(j, "matrix")));
    if (type == "depolarizing") return QuantumChannel::depolarizing(integer(field(j, "dim")), number(field(j, "eps")));
    if (type == "partial_trace") return QuantumChannel::partial_trace(int_list(field(j, "dims")), int_list(field(j, "keep")));
    throw InputError("unknown channel type \"" + type + "\"");
}

StarSubalgebra subalgebra_from_json(const Json& j, int dim, std::uint64_t seed) {
    if (j.contains("type")) {
        const std::string type = j.at("type").get<std::string>();
        const int n = j.contains("dim") ? integer(j.at("dim")) : dim;
        if (n != dim) throw InputError("subalgebra dimension differs from the experiment");
        if (type == "full") return StarSubalgebra::full(n);
        if (type == "scalars") return StarSubalgebra::scalars(n);
        if (type == "diagonal") return StarSubalgebra::diagonal(n);
        throw InputError("unknown subalgebra type \"" + type + "\"");
    }
    if (j.contains("tensor_left")) {
        std::vector<int> dims = int_list(j.at("tensor_left"));
        if (dims.size() != 2 || dims[0] * dims[1] != dim) throw InputError("\"tensor_left\" must be [d1, d2] with d1 d2 = dim");
        return StarSubalgebra(Mat::Identity(dim, dim), {Block{dims[0], dims[1]}});
    }
    if (j.contains("generators")) {
        std::vector<Mat> gens;
        for (const Json& g : j.at("generators")) {
            gens.push_back(matrix_from_json(g));
            if (gens.back().rows() != dim) throw InputError("generator dimension differs from the experiment");
        }
        return generated_algebra(gens, dim, seed);
    }
    if (j.contains("unitary") || j.contains("basis_change")) {
        Mat u = matrix_from_json(j.contains("unitary") ? j.at("unitary") : j.at("basis_change"));
        std::vector<Block> blocks;
        for (const Json& b : field(j, "blocks")) {
            std::vector<int> dm = int_list(b);
            if (dm.size() != 2) throw InputError("blocks must be [d, m] pairs");
            blocks.push_back({dm[0], dm[1]});
        }
        return StarSubalgebra(u, blocks);
    }
    throw InputError("unrecognized subalgebra description");
}

ExponentialFamily family_from_json(const Json& j) {
    Mat h = matrix_from_json(field(j, "H"));
    std::vector<Mat> gens;
    for (const Json& g : field(j, "generators")) gens.push_back(matrix_from_json(g));
    std::vector<Theta> grid;
    for (const Json& t : field(j, "theta_grid")) grid.push_back(real_list(t));
    return ExponentialFamily(h, gens, grid);
}

GaussianScenario scenario_from_json(const Json& j) {
    GaussianScenario sc;
    sc.space = SymplecticSpace(real_matrix_from_json(field(j, "alpha")), real_matrix_from_json(field(j, "sigma")));
    sc.n = integer(field(j, "n"));
    if (sc.n < 1) throw InputError("\"n\" must be positive");
    for (const Json& m : field(j, "m_list")) {
        sc.means.push_back(real_vector_from_json(m));
        if (sc.means.back().size() != sc.space.dim()) throw InputError("mean has wrong dimension");
    }
    return sc;
}

Statistic statistic_from_json(const Json& j) { return int_list(j); }

ClassicalInput classical_from_json(const Json& j) {
    const int n = integer(field(j, "N"));
    std::vector<ClassicalMember> family;
    for (const Json& m : field(j, "family")) {
        RVec p = real_vector_from_json(field(m, "p"));
        if (p.size() != n) throw InputError("probability vector length differs from \"N\"");
        family.push_back({m.contains("theta") ? real_list(m.at("theta")) : std::vector<double>{}, p});
    }
    ClassicalInput in;
    in.experiment = make_finite_experiment(std::move(family));
    if (j.contains("statistic")) {
        in.statistic = statistic_from_json(j.at("statistic"));
        if (static_cast<int>(in.statistic.size()) != n) throw InputError("statistic length differs from \"N\"");
    }
    return in;
}

// ---- Reports ----

Json channel_to_json(const QuantumChannel& ch) {
    Json out;
    out["in_dim"] = ch.in_dim();
    out["out_dim"] = ch.out_dim();
    Json ks = Json::array();
    for (const Mat& k : ch.kraus()) ks.push_back(matrix_to_json(k));
    out["kraus"] = ks;
    return out;
}

Json verdict_to_json(const SufficiencyVerdict& v, bool include_witness) {
    Json out;
    out["sufficient"] = v.sufficient;
    out["consistent"] = v.consistent;
    Json crit = Json::object();
    for (const auto& [name, c] : v.per_criterion) {
        Json e;
        e["pass"] = c.pass;
        e["residual"] = real_or_tag(c.residual);
        crit[name] = e;
    }
    out["criteria"] = crit;
    out["witness_residual"] = real_or_tag(v.witness_residual);
    if (include_witness && v.witness) out["witness"] = channel_to_json(*v.witness);
    return out;
}

Json factorization_to_json(const Factorization& f) {
    Json out;
    Json blocks = Json::array();
    for (const Block& b : f.blocks) blocks.push_back(Json::array({b.d, b.m}));
    out["blocks"] = blocks;
    out["weights"] = f.weights;
    Json left = Json::array();
    for (const auto& per_theta : f.left) {
        Json row = Json::array();
        for (const Mat& m : per_theta) row.push_back(matrix_to_json(m));
        left.push_back(row);
    }
    out["left_factors"] = left;
    Json right = Json::array();
    for (const Mat& m : f.right) right.push_back(matrix_to_json(m));
    out["right_factors"] = right;
    out["basis_change"] = matrix_to_json(f.basis_change);
    out["rebuild_residual"] = f.residual;
    out["right_factor_variation"] = f.right_variation;
    out["sufficient"] = f.sufficient_verdict;
    return out;
}

}  // namespace qsuff
