#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsuff/json_io.hpp"

namespace {

using namespace qsuff;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitInconsistent = 2;

struct RunConfig {
    std::string command;
    double tol = kVerdictTol;
    std::vector<double> alphas = kDefaultAlphas;
    std::vector<double> times = kDefaultTimes;
    std::uint64_t seed = kDefaultSeed;
    std::string output;  // empty means stdout
    std::string format = "json";

    std::string experiment;
    std::string channel;
    std::string subalgebra;
    std::string family;
    std::string scenario;
    std::string statistic;
};

struct Outcome {
    Json result;
    bool consistent = true;
};

void validate(const RunConfig& c) {
    if (!(c.tol > 0.0)) throw InputError("--tol must be positive");
    for (double a : c.alphas)
        if (!(a > -1.0 && a < 1.0) || a == 0.0) throw InputError("--alpha values must lie in (-1, 1) without 0");
    if (c.times.empty()) throw InputError("--t needs at least one time");
}

// Inline JSON when the argument starts with '{' or '[', otherwise a file path.
Json inline_or_file(const std::string& arg) {
    const size_t first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
        try {
            return Json::parse(arg);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(std::string("inline JSON: ") + e.what());
        }
    }
    return load_json_file(arg);
}

// Flag value, else the named field of the experiment document, else null.
Json flag_or_field(const std::string& flag, const Json& doc, const char* key) {
    if (!flag.empty()) return inline_or_file(flag);
    if (doc.is_object() && doc.contains(key)) return doc.at(key);
    return nullptr;
}

SufficiencyOptions options(const RunConfig& c) {
    SufficiencyOptions opt;
    opt.tol = c.tol;
    opt.alphas = c.alphas;
    opt.times = c.times;
    opt.seed = c.seed;
    return opt;
}

Json config_header(const RunConfig& c) {
    Json h;
    h["command"] = c.command;
    h["tolerance"] = c.tol;
    h["seed"] = c.seed;
    h["alpha"] = c.alphas;
    h["t"] = c.times;
    return h;
}

Json blocks_to_json(const std::vector<Block>& blocks) {
    Json out = Json::array();
    for (const Block& b : blocks) out.push_back(Json::array({b.d, b.m}));
    return out;
}

std::vector<RVec> sample_vectors(int dim, int count, Rng& rng) {
    std::vector<RVec> out;
    for (int i = 0; i < count; ++i) out.push_back(random_real_vector(dim, rng));
    return out;
}

Outcome run_check(const RunConfig& c) {
    const Json doc = load_json_file(c.experiment);
    StatisticalExperiment exp = experiment_from_json(doc);
    const SufficiencyOptions opt = options(c);
    const Json ch_doc = flag_or_field(c.channel, doc, "channel");
    const Json alg_doc = flag_or_field(c.subalgebra, doc, "subalgebra");
    Outcome out;
    if (!ch_doc.is_null() && !alg_doc.is_null()) throw InputError("give either a channel or a subalgebra, not both");
    if (!ch_doc.is_null()) {
        QuantumChannel ch = channel_from_json(ch_doc);
        SufficiencyVerdict v = channel_sufficient(exp, ch, opt);
        out.result["target"] = "channel";
        out.result["verdict"] = verdict_to_json(v, false);
        out.consistent = v.consistent;
    } else if (!alg_doc.is_null()) {
        StarSubalgebra alg = subalgebra_from_json(alg_doc, exp.dim, c.seed);
        SufficiencyVerdict v = subalgebra_sufficient(exp, alg, opt);
        out.result["target"] = "subalgebra";
        out.result["blocks"] = blocks_to_json(alg.blocks());
        out.result["verdict"] = verdict_to_json(v, false);
        out.consistent = v.consistent;
    } else {
        MinimalSufficient ms = minimal_sufficient_subalgebra(exp, opt);
        out.result["target"] = "minimal_sufficient_subalgebra";
        out.result["support_rank"] = ms.support.cols();
        out.result["blocks"] = blocks_to_json(ms.algebra.blocks());
        out.result["times_used"] = ms.times;
        out.result["rounds"] = ms.rounds;
        out.result["validated"] = ms.validated;
        out.result["minimal_spot_check"] = ms.minimal_spot_check;
        out.consistent = ms.validated;
    }
    return out;
}

Outcome run_fisher(const RunConfig& c) {
    ExponentialFamily fam = family_from_json(load_json_file(c.family));
    QuantumChannel ch = channel_from_json(inline_or_file(c.channel));
    FisherComparison fc = fisher_compare(fam, ch, c.tol, options(c));
    Outcome out;
    out.result["gap"] = fc.gap;
    out.result["max_difference"] = fc.max_difference;
    out.result["fisher_equal"] = fc.sufficient;
    out.result["channel_sufficient"] = fc.channel_verdict;
    out.result["agrees"] = fc.agrees;
    Json grid = Json::array();
    for (size_t i = 0; i < fam.theta_grid().size(); ++i) {
        Json e;
        e["theta"] = fam.theta_grid()[i];
        e["g"] = real_matrix_to_json(fc.g[i]);
        e["h"] = real_matrix_to_json(fc.h[i]);
        grid.push_back(e);
    }
    out.result["grid"] = grid;
    out.consistent = fc.agrees;
    return out;
}

Outcome run_factorize(const RunConfig& c) {
    const Json doc = load_json_file(c.experiment);
    StatisticalExperiment exp = experiment_from_json(doc);
    const Json alg_doc = flag_or_field(c.subalgebra, doc, "subalgebra");
    if (alg_doc.is_null()) throw InputError("factorize needs --subalgebra");
    StarSubalgebra alg = subalgebra_from_json(alg_doc, exp.dim, c.seed);
    const SufficiencyOptions opt = options(c);
    Outcome out;
    try {
        out.result = factorization_to_json(factorize(exp, alg, opt));
        out.result["factorized"] = true;
    } catch (const std::runtime_error& e) {
        SufficiencyVerdict v = subalgebra_sufficient(exp, alg, opt);
        out.result["factorized"] = false;
        out.result["reason"] = e.what();
        out.result["verdict"] = verdict_to_json(v, false);
        // A sufficient verdict without a factorization is a contradiction.
        out.consistent = v.consistent && !v.sufficient;
    }
    return out;
}

Outcome run_gaussian(const RunConfig& c) {
    const Json doc = load_json_file(c.scenario);
    GaussianScenario sc = scenario_from_json(doc);
    const int samples = doc.contains("samples") ? doc.at("samples").get<int>() : 100;
    if (samples < 1) throw InputError("\"samples\" must be positive");
    Outcome out;
    SufficiencyPairReport pair = verify_sufficiency_pair(sc.space, sc.n, sc.means, samples, c.seed);
    out.result["n"] = sc.n;
    out.result["max_deviation"] = pair.max_deviation;
    out.result["evaluations"] = pair.evaluations;
    out.result["state_constraint_margin"] = pair.constraint_margin;

    Rng rng(c.seed);
    const int d = sc.space.dim();
    CpCertificate cp_t = check_cp(sample_mean_channel(sc.space, sc.n), sample_vectors(d, 8, rng), c.seed);
    CpCertificate cp_s = check_cp(randomization_map(sc.space, sc.n), sample_vectors(d * sc.n, 8, rng), c.seed);
    auto cp_json = [](const CpCertificate& cp) {
        Json j;
        j["completely_positive"] = cp.completely_positive;
        j["margin"] = cp.margin;
        j["raw_kernel_margin"] = cp.raw_kernel_margin;
        return j;
    };
    out.result["sample_mean_cp"] = cp_json(cp_t);
    out.result["randomization_cp"] = cp_json(cp_s);
    out.consistent = pair.max_deviation <= c.tol && cp_t.completely_positive && cp_s.completely_positive;

    if (doc.contains("shift_generators")) {
        std::vector<RVec> gens;
        for (const Json& g : doc.at("shift_generators")) {
            gens.push_back(real_vector_from_json(g));
            if (gens.back().size() != d) throw InputError("shift generator has wrong dimension");
        }
        GaussianShiftResult gs = gaussian_shift_minimal_subspace(sc.space, gens, c.times);
        Json s;
        s["rank"] = gs.rank;
        s["basis"] = real_matrix_to_json(gs.basis);
        s["complex_structure_defect"] = gs.complex_structure_defect;
        s["orthogonality_defect"] = gs.orthogonality_defect;
        s["commutation_defect"] = gs.commutation_defect;
        s["cocycle_defect"] = gs.cocycle_defect;
        out.result["gaussian_shift"] = s;
    }
    return out;
}

Outcome run_classical(const RunConfig& c) {
    const Json doc = load_json_file(c.experiment);
    ClassicalInput in = classical_from_json(doc);
    if (!c.statistic.empty()) {
        in.statistic = statistic_from_json(inline_or_file(c.statistic));
        if (static_cast<int>(in.statistic.size()) != in.experiment.n)
            throw InputError("statistic length differs from \"N\"");
    }
    if (in.statistic.empty()) throw InputError("classical needs a statistic");
    for (int v : in.statistic)
        if (v < 0) throw InputError("statistic values must be non-negative");
    const FiniteExperiment& exp = in.experiment;
    Outcome out;
    const bool fisher_neyman = is_sufficient_statistic(exp, in.statistic);
    const bool factorizes = factorization_check(exp, in.statistic);
    SufficiencyVerdict qv = subalgebra_sufficient(embed_diagonal(exp), statistic_subalgebra(in.statistic), options(c));
    out.result["statistic"] = in.statistic;
    out.result["conditional_spread"] = conditional_spread(exp, in.statistic);
    out.result["sufficient"] = fisher_neyman;
    out.result["factorization"] = factorizes;
    out.result["quantum_verdict"] = verdict_to_json(qv, false);
    if (exp.n <= 8) out.result["coarsest_sufficient"] = is_coarsest_sufficient(exp, in.statistic);
    if (exp.family.size() == 2) {
        Statistic lr = likelihood_ratio_statistic(exp.family[0].p, exp.family[1].p);
        out.result["likelihood_ratio_statistic"] = lr;
        if (exp.n <= 8) out.result["likelihood_ratio_coarsest"] = is_coarsest_sufficient(exp, lr);
    }
    out.consistent = fisher_neyman == factorizes && factorizes == qv.sufficient && qv.consistent;
    return out;
}

// Small property suite over the library, seeded from the run configuration.
Outcome run_selftest(const RunConfig& c) {
    Rng rng(c.seed);
    const SufficiencyOptions opt = options(c);
    Json checks = Json::array();
    bool all = true;
    auto record = [&](const char* name, bool pass, double residual) {
        Json e;
        e["name"] = name;
        e["pass"] = pass;
        e["residual"] = residual;
        checks.push_back(e);
        all = all && pass;
    };

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 3, m = 2 + (trial + 1) % 3, k = 3;
        Mat iso = random_isometry(m * k, n, rng);
        std::vector<Mat> kraus;
        for (int i = 0; i < k; ++i) kraus.push_back(iso.middleRows(i * m, m));
        QuantumChannel ch(kraus);
        DensityMatrix rho = random_density(n, rng, -1, 0.01), sigma = random_density(n, rng, -1, 0.01);
        DensityMatrix trho = schrodinger_apply(ch, rho), tsigma = schrodinger_apply(ch, sigma);
        worst = std::max(worst, relative_entropy(trho, tsigma) - relative_entropy(rho, sigma));
        for (double a : c.alphas) worst = std::max(worst, alpha_entropy(trho, tsigma, a) - alpha_entropy(rho, sigma, a));
    }
    record("data_processing", worst < 1e-9, std::max(worst, 0.0));

    std::vector<ThetaState> fam;
    for (int i = 0; i < 3; ++i) fam.push_back({{double(i)}, random_density(3, rng, -1, 0.02)});
    StatisticalExperiment exp = build_experiment(fam);
    SufficiencyVerdict unitary = channel_sufficient(exp, QuantumChannel::unitary(random_unitary(3, rng)), opt);
    record("unitary_recovery", unitary.sufficient && unitary.consistent && unitary.witness_residual < 1e-8,
           unitary.witness_residual);
    SufficiencyVerdict dep = channel_sufficient(exp, QuantumChannel::depolarizing(3, 0.5), opt);
    record("depolarizing_insufficient", !dep.sufficient && dep.consistent, dep.witness_residual);

    FiniteExperiment bern = bernoulli_product_experiment(3, {0.2, 0.5, 0.8});
    Statistic count = count_statistic(3);
    const bool quantum = subalgebra_sufficient(embed_diagonal(bern), statistic_subalgebra(count), opt).sufficient;
    record("classical_concordance", is_sufficient_statistic(bern, count) && factorization_check(bern, count) && quantum,
           conditional_spread(bern, count));

    RMat alpha = RMat::Identity(2, 2), sigma(2, 2);
    sigma << 0.0, 0.5, -0.5, 0.0;
    SymplecticSpace space(alpha, sigma);
    SufficiencyPairReport pair = verify_sufficiency_pair(space, 2, sample_vectors(2, 2, rng), 20, c.seed);
    record("gaussian_sample_mean", pair.max_deviation < 1e-10, pair.max_deviation);

    Mat biased = Mat::Zero(2, 2);
    biased(0, 0) = 2.0 / 3.0;
    biased(1, 1) = 1.0 / 3.0;
    SymmetricPowerResult sw = symmetric_power_experiment({DensityMatrix(biased), DensityMatrix::maximally_mixed(2)}, 2);
    const double w = sw.factorization.weights[0][0];
    record("symmetric_power_weight", std::abs(w - 7.0 / 9.0) < 1e-10, std::abs(w - 7.0 / 9.0));

    Outcome out;
    out.result["checks"] = checks;
    out.result["all_pass"] = all;
    out.consistent = all;
    return out;
}

void print_table(const Json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) print_table(value, prefix.empty() ? key : prefix + "." + key, os);
        return;
    }
    std::string text = j.dump();
    if (j.is_array() && text.size() > 72) {
        bool records = !j.empty() && j[0].is_object();
        if (records) {
            for (size_t i = 0; i < j.size(); ++i) print_table(j[i], prefix + "[" + std::to_string(i) + "]", os);
            return;
        }
        text = "<array of " + std::to_string(j.size()) + ">";
    }
    os << prefix << ": " << text << "\n";
}

void emit(const RunConfig& c, const Json& report) {
    std::ostringstream body;
    if (c.format == "table")
        print_table(report, "", body);
    else
        body << report.dump(2) << "\n";
    if (c.output.empty()) {
        std::cout << body.str();
        return;
    }
    std::ofstream f(c.output);
    if (!f) throw InputError("cannot write " + c.output);
    f << body.str();
}

int run(RunConfig& c) {
    validate(c);
    Json report;
    report["config"] = config_header(c);
    Outcome out;
    try {
        if (c.command == "check") out = run_check(c);
        else if (c.command == "fisher") out = run_fisher(c);
        else if (c.command == "factorize") out = run_factorize(c);
        else if (c.command == "gaussian") out = run_gaussian(c);
        else if (c.command == "classical") out = run_classical(c);
        else out = run_selftest(c);
    } catch (const std::runtime_error& e) {
        out.result["error"] = e.what();
        out.consistent = false;
    }
    report["result"] = out.result;
    report["status"] = out.consistent ? "ok" : "inconsistent";
    emit(c, report);
    return out.consistent ? kExitOk : kExitInconsistent;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Sufficiency analysis for finite quantum statistical experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol", cfg.tol, "Verdict tolerance")->capture_default_str();
    app.add_option("--alpha", cfg.alphas, "Comma-separated alpha sample")->delimiter(',');
    app.add_option("--t", cfg.times, "Comma-separated modular times")->delimiter(',');
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--output", cfg.output, "Report path (stdout when omitted)");
    app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "table"}));

    CLI::App* check = app.add_subcommand("check", "Sufficiency of a channel or subalgebra for an experiment");
    check->add_option("--experiment", cfg.experiment, "Experiment file")->required();
    auto* ch_opt = check->add_option("--channel", cfg.channel, "Channel (inline JSON or file)");
    check->add_option("--subalgebra", cfg.subalgebra, "Subalgebra (inline JSON or file)")->excludes(ch_opt);

    CLI::App* fisher = app.add_subcommand("fisher", "Fisher information before and after a channel");
    fisher->add_option("--family", cfg.family, "Exponential family file")->required();
    fisher->add_option("--channel", cfg.channel, "Channel (inline JSON or file)")->required();

    CLI::App* factorize_cmd = app.add_subcommand("factorize", "Factorize an experiment across a subalgebra");
    factorize_cmd->add_option("--experiment", cfg.experiment, "Experiment file")->required();
    factorize_cmd->add_option("--subalgebra", cfg.subalgebra, "Subalgebra (inline JSON or file)");

    CLI::App* gaussian = app.add_subcommand("gaussian", "Sample-mean sufficiency for quasifree states");
    gaussian->add_option("--scenario", cfg.scenario, "Scenario file")->required();

    CLI::App* classical = app.add_subcommand("classical", "Classical sufficient statistic checks");
    classical->add_option("--experiment", cfg.experiment, "Finite experiment file")->required();
    classical->add_option("--statistic", cfg.statistic, "Statistic (inline JSON array or file)");

    app.add_subcommand("selftest", "Run the bundled property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidInput;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kExitInvalidInput;
}
