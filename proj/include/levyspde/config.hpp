#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "levyspde/cylnoise.hpp"
#include "levyspde/diagnostics.hpp"
#include "levyspde/errors.hpp"
#include "levyspde/ou_invariant.hpp"
#include "levyspde/spde_engine.hpp"

namespace levyspde {

enum class ExperimentKind {
    ou_invariant,
    admissibility,
    yosida_check,
    decompose,
    stationarity,
    mixing,
    law_equality,
    convergence_sweep
};

inline const char* experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ou_invariant: return "ou-invariant";
        case ExperimentKind::admissibility: return "admissibility";
        case ExperimentKind::yosida_check: return "yosida-check";
        case ExperimentKind::decompose: return "decompose";
        case ExperimentKind::stationarity: return "stationarity";
        case ExperimentKind::mixing: return "mixing";
        case ExperimentKind::law_equality: return "law-equality";
        case ExperimentKind::convergence_sweep: return "convergence-sweep";
    }
    return "?";
}

// Fully typed experiment description assembled from a config file.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ou_invariant;
    int M = 1000;
    std::uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency

    SolverConfig solver;

    // ou-invariant
    std::vector<double> cf_h = {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0};
    int cf_modes = 0; // 0 = all operator modes
    double cf_tolerance = 0.05;
    // yosida-check
    std::vector<double> m_list = {1.0, 10.0, 100.0, 1e4};
    int yosida_samples = 10000;
    double yosida_range = 5.0;
    // decompose
    int n_summary = 11;
    double decay_fit_t_max = 0.5;
    // stationarity
    std::vector<double> lags = {0.5};
    int stat_modes = 1;
    // mixing
    PsiKind psi = PsiKind::tanh_mode1;
    std::vector<double> mix_times = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
    double rate_x = 0.5;                          // rate fit starts from rate_x * e_1
    std::vector<double> c_points = {0.0, 1.0, 2.0, 4.0}; // c(x) regression at p * e_1
    // law-equality
    int modes_checked = 3;
    // convergence-sweep
    std::vector<int> sweep_n = {4, 8, 16};
    std::vector<double> sweep_m = {10.0, 100.0, 1000.0};
};

namespace cfgdetail {

struct RawConfig {
    // section -> key -> value, insertion-ordered per section for error messages
    std::map<std::string, std::map<std::string, std::string>> sections;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline RawConfig parse_raw(std::istream& in) {
    RawConfig raw;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            if (raw.sections.count(section))
                throw ConfigError("duplicate section [" + section + "]");
            raw.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (!raw.sections[section].emplace(key, value).second)
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]");
    }
    return raw;
}

class SectionReader {
public:
    SectionReader(const RawConfig& raw, std::string name, bool required)
        : name_(std::move(name)) {
        auto it = raw.sections.find(name_);
        if (it == raw.sections.end()) {
            if (required) throw ConfigError("missing required section [" + name_ + "]");
            present_ = false;
        } else {
            present_ = true;
            kv_ = &it->second;
        }
    }

    bool present() const { return present_; }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError("[" + name_ + "] is missing required key '" + key + "'");
        return *v;
    }
    std::optional<std::string> get(const std::string& key) {
        if (!present_) return std::nullopt;
        seen_.insert(key);
        auto it = kv_->find(key);
        if (it == kv_->end()) return std::nullopt;
        return it->second;
    }
    double get_double(const std::string& key, double fallback) {
        auto v = get(key);
        return v ? to_double(key, *v) : fallback;
    }
    int get_int(const std::string& key, int fallback) {
        auto v = get(key);
        return v ? to_int(key, *v) : fallback;
    }
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
        auto v = get(key);
        if (!v) return fallback;
        std::vector<double> out;
        std::istringstream ss(*v);
        std::string tok;
        while (ss >> tok) out.push_back(to_double(key, tok));
        if (out.empty()) throw ConfigError("[" + name_ + "] key '" + key + "' has an empty list");
        return out;
    }

    // every key the schema never asked for is an error
    void finish() const {
        if (!present_) return;
        for (const auto& [k, v] : *kv_)
            if (!seen_.count(k))
                throw ConfigError("unknown key '" + k + "' in [" + name_ + "]");
    }

    double to_double(const std::string& key, const std::string& s) const {
        try {
            std::size_t pos = 0;
            const double d = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] key '" + key + "': cannot parse number '" + s + "'");
        }
    }
    int to_int(const std::string& key, const std::string& s) const {
        const double d = to_double(key, s);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d)
            throw ConfigError("[" + name_ + "] key '" + key + "' must be an integer");
        return i;
    }

private:
    std::string name_;
    bool present_ = false;
    const std::map<std::string, std::string>* kv_ = nullptr;
    std::set<std::string> seen_;
};

inline ExperimentKind parse_kind(const std::string& s) {
    for (ExperimentKind k :
         {ExperimentKind::ou_invariant, ExperimentKind::admissibility, ExperimentKind::yosida_check,
          ExperimentKind::decompose, ExperimentKind::stationarity, ExperimentKind::mixing,
          ExperimentKind::law_equality, ExperimentKind::convergence_sweep})
        if (s == experiment_kind_name(k)) return k;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

} // namespace cfgdetail

// Parses the flat [section] key = value format; unknown sections/keys are
// errors. Cross-field hypothesis gating happens in validate_experiment.
inline ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    const cfgdetail::RawConfig raw = cfgdetail::parse_raw(in);
    for (const auto& [name, kv] : raw.sections)
        if (name != "operator" && name != "noise" && name != "drift" && name != "solver" &&
            name != "experiment")
            throw ConfigError("unknown section [" + name + "]");

    ExperimentConfig cfg;

    cfgdetail::SectionReader op(raw, "operator", true);
    const std::string op_kind = op.require("kind");
    const int N = op.get_int("N", 0);
    if (N <= 0) throw ConfigError("[operator] needs N >= 1");
    if (op_kind == "dirichlet") {
        cfg.solver.op = make_dirichlet_laplacian(N, op.get_double("length", 1.0));
    } else if (op_kind == "shifted_neumann") {
        cfg.solver.op = make_shifted_neumann_laplacian(N, op.get_double("length", 1.0),
                                                       op.get_double("shift", 0.0));
    } else if (op_kind == "synthetic") {
        cfg.solver.op = make_synthetic_operator(N, op.get_double("c", 1.0), op.get_double("gamma", 1.0));
    } else {
        throw ConfigError("unknown operator kind '" + op_kind + "'");
    }
    op.finish();

    cfgdetail::SectionReader noise(raw, "noise", true);
    const std::string family = noise.require("family");
    const double theta = noise.get_double("theta", 0.0);
    const double b_theta = noise.get_double("b_theta", 0.0);
    const int n_modes = noise.get_int("n_modes", N);
    LevyFamily fam;
    if (family == "compound_poisson") {
        CompoundPoisson cp;
        cp.rate = noise.get_double("rate", 1.0);
        if (cp.rate < 0.0) throw ConfigError("[noise] rate must be nonnegative");
        const std::string law = noise.get("jump_law").value_or("rademacher");
        if (law == "rademacher") cp.jumps.kind = JumpLawKind::rademacher;
        else if (law == "uniform") cp.jumps.kind = JumpLawKind::uniform;
        else throw ConfigError("unknown jump_law '" + law + "'");
        cp.jumps.scale = noise.get_double("jump_scale", 1.0);
        if (!(cp.jumps.scale > 0.0)) throw ConfigError("[noise] jump_scale must be positive");
        fam = cp;
    } else if (family == "alpha_stable") {
        SymmetricAlphaStable st;
        st.alpha = noise.get_double("alpha", 1.5);
        st.scale = noise.get_double("scale", 1.0);
        if (!(st.alpha > 0.0 && st.alpha < 2.0))
            throw ConfigError("[noise] alpha must lie in (0, 2)");
        if (!(st.scale > 0.0)) throw ConfigError("[noise] scale must be positive");
        fam = st;
    } else if (family == "slow_log_tail") {
        SlowLogTail slt;
        slt.c = noise.get_double("tail_c", 1.0);
        if (!(slt.c > 0.0)) throw ConfigError("[noise] tail_c must be positive");
        fam = slt;
    } else {
        throw ConfigError("unknown noise family '" + family + "'");
    }
    cfg.solver.noise = CylNoiseSpec::power(fam, theta, b_theta, n_modes);
    noise.finish();

    cfgdetail::SectionReader drift(raw, "drift", false);
    if (drift.present()) {
        auto coeffs = drift.get_list("poly_coeffs", {});
        if (coeffs.empty()) throw ConfigError("[drift] needs poly_coeffs (ascending, a0 a1 ...)");
        const int oversampling = drift.get_int("grid_oversampling", 4);
        cfg.solver.drift = make_drift(std::move(coeffs), oversampling);
        const auto m_str = drift.get("m");
        if (m_str) {
            if (*m_str == "inf" || *m_str == "infinity")
                cfg.solver.m = kInfiniteYosida;
            else
                cfg.solver.m = drift.to_double("m", *m_str);
        }
    }
    drift.finish();

    cfgdetail::SectionReader solver(raw, "solver", false);
    cfg.solver.dt = solver.get_double("dt", 1e-3);
    cfg.solver.T = solver.get_double("T", 1.0);
    cfg.solver.xi = solver.get_double("xi", 0.0);
    cfg.solver.galerkin_n = solver.get_int("n", 0);
    cfg.solver.x0 = solver.get_list("x0", {});
    if (static_cast<int>(cfg.solver.x0.size()) > N)
        throw ConfigError("[solver] x0 has more coefficients than operator modes");
    cfg.solver.x0.resize(static_cast<std::size_t>(N), 0.0);
    solver.finish();

    cfgdetail::SectionReader exp(raw, "experiment", true);
    cfg.kind = cfgdetail::parse_kind(exp.require("kind"));
    cfg.M = exp.get_int("M", cfg.M);
    const double seed_d = exp.get_double("seed", 1.0);
    if (seed_d < 0.0) throw ConfigError("[experiment] seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed_d);
    cfg.threads = exp.get_int("threads", 0);
    switch (cfg.kind) {
        case ExperimentKind::ou_invariant:
            cfg.cf_h = exp.get_list("cf_h", cfg.cf_h);
            cfg.cf_modes = exp.get_int("cf_modes", 0);
            cfg.cf_tolerance = exp.get_double("cf_tolerance", cfg.cf_tolerance);
            break;
        case ExperimentKind::admissibility:
            break;
        case ExperimentKind::yosida_check:
            cfg.m_list = exp.get_list("m_list", cfg.m_list);
            cfg.yosida_samples = exp.get_int("samples", cfg.yosida_samples);
            cfg.yosida_range = exp.get_double("range", cfg.yosida_range);
            break;
        case ExperimentKind::decompose:
            cfg.n_summary = exp.get_int("n_summary", cfg.n_summary);
            cfg.decay_fit_t_max = exp.get_double("decay_fit_t_max", cfg.decay_fit_t_max);
            break;
        case ExperimentKind::stationarity:
            cfg.lags = exp.get_list("lags", cfg.lags);
            cfg.stat_modes = exp.get_int("stat_modes", cfg.stat_modes);
            break;
        case ExperimentKind::mixing: {
            const std::string p = exp.get("psi").value_or("tanh_mode1");
            if (p == "tanh_mode1") cfg.psi = PsiKind::tanh_mode1;
            else if (p == "clipped_norm") cfg.psi = PsiKind::clipped_norm;
            else if (p == "constant") cfg.psi = PsiKind::constant;
            else throw ConfigError("unknown psi '" + p + "'");
            cfg.mix_times = exp.get_list("times", cfg.mix_times);
            cfg.rate_x = exp.get_double("rate_x", cfg.rate_x);
            cfg.c_points = exp.get_list("c_points", cfg.c_points);
            break;
        }
        case ExperimentKind::law_equality:
            cfg.modes_checked = exp.get_int("modes_checked", cfg.modes_checked);
            break;
        case ExperimentKind::convergence_sweep: {
            auto ns = exp.get_list("sweep_n", {4.0, 8.0, 16.0});
            cfg.sweep_n.clear();
            for (double v : ns) cfg.sweep_n.push_back(static_cast<int>(v));
            cfg.sweep_m = exp.get_list("sweep_m", cfg.sweep_m);
            break;
        }
    }
    exp.finish();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Cross-field hypothesis gating per experiment kind. Throws ConfigError or
// HypothesisError naming the violated hypothesis (CLI exit code 2).
inline void validate_experiment(const ExperimentConfig& cfg) {
    if (cfg.M < 1) throw ConfigError("[experiment] M must be >= 1");
    const SolverConfig& s = cfg.solver;
    const bool solves = cfg.kind == ExperimentKind::decompose ||
                        cfg.kind == ExperimentKind::stationarity ||
                        cfg.kind == ExperimentKind::mixing ||
                        cfg.kind == ExperimentKind::law_equality ||
                        cfg.kind == ExperimentKind::convergence_sweep ||
                        cfg.kind == ExperimentKind::ou_invariant;
    if (cfg.kind == ExperimentKind::ou_invariant && s.drift)
        throw ConfigError("ou-invariant is the linear experiment; remove the [drift] section");
    if (solves) validate_solver_config(s); // structural + spectral-gap (omega > eta) checks
    const bool needs_invariant_measure =
        cfg.kind == ExperimentKind::ou_invariant ||
        (cfg.kind == ExperimentKind::law_equality && !s.drift) ||
        (cfg.kind == ExperimentKind::mixing && !s.drift);
    if (needs_invariant_measure) {
        if (!log_moment_finite(s.noise.family))
            throw HypothesisError(
                "invariant-measure experiments require the log-moment condition: "
                "int_1^inf log(y) nu(dy) must be finite, which fails for this jump measure");
        if (!eigen_sum_finite(s.op))
            throw HypothesisError(
                "invariant-measure experiments require sum_k 1/lambda_k < infinity "
                "(eigenvalue growth exponent must exceed 1)");
    }
    if (solves && !admissible(s.noise))
        throw HypothesisError(
            "cylindrical noise is not admissible: the mode series "
            "sum_k [beta_k^2 * (truncated second moment) + (jump tail mass at 1/beta_k)] "
            "diverges for this family/decay combination");
    if (cfg.kind == ExperimentKind::mixing &&
        !std::holds_alternative<CompoundPoisson>(s.noise.family))
        throw HypothesisError(
            "mixing estimation requires finite moments of the stochastic convolution and of "
            "F(L_A(t)); only compound Poisson noise qualifies");
    if (cfg.kind == ExperimentKind::yosida_check) {
        if (!s.drift) throw ConfigError("yosida-check needs a [drift] section");
        for (double m : cfg.m_list)
            if (!(m > s.drift->eta))
                throw HypothesisError(
                    "Yosida parameter must exceed the drift's one-sided constant eta (resolvent "
                    "not single-valued)");
    }
    if (cfg.kind == ExperimentKind::law_equality &&
        (s.op.omega - s.eta()) * s.T < 10.0 * (1.0 - 1e-12))
        throw HypothesisError(
            "law-equality comparison requires (omega - eta) T >= 10 so the transient has decayed");
    if (cfg.kind == ExperimentKind::stationarity) {
        if (cfg.M < 1000)
            throw ConfigError("stationarity needs ensemble size M >= 1000");
        for (double lag : cfg.lags)
            if (lag < 0.0 || lag > s.T + 1e-12)
                throw ConfigError("stationarity lags must lie within [0, T]");
    }
    if (cfg.kind == ExperimentKind::convergence_sweep) {
        if (cfg.sweep_n.size() != cfg.sweep_m.size() || cfg.sweep_n.empty())
            throw ConfigError("convergence-sweep needs matching nonempty sweep_n / sweep_m lists");
        for (int n : cfg.sweep_n)
            if (2 * n > s.op.dim)
                throw ConfigError(
                    "convergence-sweep needs operator truncation N >= 2 * max(sweep_n)");
        if (!s.drift) throw ConfigError("convergence-sweep needs a [drift] section");
        for (double m : cfg.sweep_m)
            if (!(2.0 * m > s.drift->eta))
                throw HypothesisError(
                    "Yosida parameter must exceed the drift's one-sided constant eta (resolvent "
                    "not single-valued)");
    }
    // burn-in sufficiency xi (omega - eta) >= 10 is a recommendation only;
    // run_experiment prints a warning when it is violated.
}

inline bool burn_in_sufficient(const SolverConfig& s) { return burn_in_deficit(s) >= 10.0 * (1.0 - 1e-12); }

} // namespace levyspde
