#include "bubble/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "bubble/errors.hpp"

namespace bubble {

namespace {

double as_real(const toml::node& n, const std::string& field) {
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer())) return *v;
    throw config_error(field, "expected a number");
}

int as_int(const toml::node& n, const std::string& field) {
    if (!n.is_integer()) throw config_error(field, "expected an integer");
    const auto v = *n.value<std::int64_t>();
    if (v < -2147483647 || v > 2147483647) throw config_error(field, "integer out of range");
    return static_cast<int>(v);
}

std::vector<double> as_reals(const toml::node& n, const std::string& field) {
    const toml::array* a = n.as_array();
    if (!a) throw config_error(field, "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < a->size(); ++i) out.push_back(as_real(*a->get(i), field + "[" + std::to_string(i) + "]"));
    return out;
}

class Reader {
public:
    Reader(const toml::table& root, std::string name) : name_(std::move(name)) {
        const toml::node* n = root.get(name_);
        if (n && !n->is_table()) throw config_error(name_, "expected a table");
        t_ = n ? n->as_table() : nullptr;
    }
    std::string field(const std::string& key) const { return name_ + "." + key; }
    const toml::node* get(const std::string& key) {
        seen_.insert(key);
        return t_ ? t_->get(key) : nullptr;
    }
    void real(const std::string& key, double& dst) {
        if (auto n = get(key)) dst = as_real(*n, field(key));
    }
    void integer(const std::string& key, int& dst) {
        if (auto n = get(key)) dst = as_int(*n, field(key));
    }
    void reals(const std::string& key, std::vector<double>& dst) {
        if (auto n = get(key)) dst = as_reals(*n, field(key));
    }
    void boolean(const std::string& key, bool& dst) {
        if (auto n = get(key)) {
            if (!n->is_boolean()) throw config_error(field(key), "expected true or false");
            dst = *n->value<bool>();
        }
    }
    void string(const std::string& key, std::string& dst) {
        if (auto n = get(key)) {
            if (!n->is_string()) throw config_error(field(key), "expected a string");
            dst = *n->value<std::string>();
        }
    }
    void finish() const {
        if (!t_) return;
        for (const auto& [k, v] : *t_)
            if (!seen_.count(std::string(k.str()))) throw config_error(field(std::string(k.str())), "unknown key");
    }

private:
    std::string name_;
    const toml::table* t_ = nullptr;
    std::set<std::string> seen_;
};

void positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw config_error(field, "must be positive and finite");
}

void at_least(int v, int lo, const std::string& field) {
    if (v < lo) throw config_error(field, "must be >= " + std::to_string(lo));
}

void unit_interval(double v, const std::string& field) {
    if (!(v > 0.0 && v < 1.0)) throw config_error(field, "must lie in (0, 1)");
}

}  // namespace

void validate(const ExperimentConfig& c) {
    if (c.K_terms.empty()) throw config_error("curvature.K", "needs at least one term");
    for (size_t i = 0; i < c.K_terms.size(); ++i) {
        const auto& t = c.K_terms[i];
        const std::string f = "curvature.K[" + std::to_string(i) + "]";
        for (int q = 0; q < 2; ++q)
            if (t[q] < 0.0 || t[q] != std::floor(t[q])) throw config_error(f, "exponents must be nonnegative integers");
        if (t[0] + t[1] > Poly2::max_degree)
            throw config_error(f, "total degree exceeds " + std::to_string(Poly2::max_degree));
        if (!std::isfinite(t[2])) throw config_error(f, "coefficient must be finite");
    }
    if (c.kappa_cos.empty()) throw config_error("curvature.kappa_cos", "needs at least the mean coefficient");
    if (c.kappa_sin.size() > c.kappa_cos.size())
        throw config_error("curvature.kappa_sin", "longer than curvature.kappa_cos");
    if (static_cast<int>(c.kappa_cos.size()) - 1 > Fourier1::max_modes)
        throw config_error("curvature.kappa_cos", "more than " + std::to_string(Fourier1::max_modes) + " modes");
    at_least(c.validation_grid_size, 64, "curvature.validation_grid_size");

    if (c.n_theta % 2 != 0) throw config_error("grid.n_theta", "must be even");
    at_least(c.n_theta, 64, "grid.n_theta");
    at_least(c.n_r, 48, "grid.n_r");
    at_least(c.n_modes, 16, "grid.n_modes");
    at_least(c.n_quad, 512, "grid.n_quad");

    if (c.lambdas.empty()) throw config_error("bubble.lambda", "needs at least one value");
    for (size_t i = 0; i < c.lambdas.size(); ++i) positive(c.lambdas[i], "bubble.lambda[" + std::to_string(i) + "]");
    if (c.epsilons.size() < 2) throw config_error("bubble.epsilon", "needs at least two values");
    for (size_t i = 0; i < c.epsilons.size(); ++i) {
        unit_interval(c.epsilons[i], "bubble.epsilon[" + std::to_string(i) + "]");
        if (i && !(c.epsilons[i] < c.epsilons[i - 1]))
            throw config_error("bubble.epsilon[" + std::to_string(i) + "]", "epsilon list must be strictly decreasing");
    }
    at_least(c.theta_points, 32, "bubble.theta_points");
    if (c.theta && !std::isfinite(*c.theta)) throw config_error("bubble.theta", "must be finite");

    unit_interval(c.solve_epsilon, "solve.epsilon");
    positive(c.solve_lambda, "solve.lambda");
    if (c.solve_n_theta % 2 != 0) throw config_error("solve.n_theta", "must be even");
    at_least(c.solve_n_theta, 64, "solve.n_theta");
    at_least(c.solve_n_r, 48, "solve.n_r");

    unit_interval(c.scan_epsilon, "scan.epsilon");
    positive(c.scan_lambda, "scan.lambda");
    at_least(c.bisections, 0, "scan.bisections");

    if (c.energy_n_theta % 2 != 0) throw config_error("energy.n_theta", "must be even");
    at_least(c.energy_n_theta, 64, "energy.n_theta");
    at_least(c.energy_n_r, 48, "energy.n_r");

    positive(c.newton_tol, "tolerances.newton_tol");
    if (c.newton_tol < 1e-10 * (1.0 - 1e-12)) throw config_error("tolerances.newton_tol", "must be >= 1e-10");
    at_least(c.newton_max_iter, 1, "tolerances.newton_max_iter");
    positive(c.quad_tol, "tolerances.quad_tol");
    if (c.quad_tol < 1e-10 * (1.0 - 1e-12)) throw config_error("tolerances.quad_tol", "must be >= 1e-10");
    positive(c.fixed_point_tol, "tolerances.fixed_point_tol");
    at_least(c.fixed_point_max_iter, 1, "tolerances.fixed_point_max_iter");

    unit_interval(c.alpha, "diagnostics.alpha");
    at_least(c.jobs, 1, "run.jobs");
    if (c.out_dir.empty()) throw config_error("run.out_dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << e.description() << " at line " << e.source().begin.line << ", column " << e.source().begin.column;
        throw config_error("<syntax>", os.str());
    }
    static const std::set<std::string> sections{"curvature", "grid",       "bubble",      "solve", "scan",
                                                "energy",    "tolerances", "diagnostics", "run"};
    for (const auto& [k, v] : root)
        if (!sections.count(std::string(k.str()))) throw config_error(std::string(k.str()), "unknown section");

    ExperimentConfig c;
    {
        Reader r(root, "curvature");
        if (auto n = r.get("K")) {
            const toml::array* a = n->as_array();
            if (!a) throw config_error("curvature.K", "expected an array of [i, j, coefficient] triples");
            c.K_terms.clear();
            for (size_t i = 0; i < a->size(); ++i) {
                const std::string f = "curvature.K[" + std::to_string(i) + "]";
                const std::vector<double> t = as_reals(*a->get(i), f);
                if (t.size() != 3) throw config_error(f, "expected [i, j, coefficient]");
                c.K_terms.push_back({t[0], t[1], t[2]});
            }
        }
        r.reals("kappa_cos", c.kappa_cos);
        r.reals("kappa_sin", c.kappa_sin);
        r.integer("validation_grid_size", c.validation_grid_size);
        r.finish();
    }
    {
        Reader r(root, "grid");
        r.integer("n_theta", c.n_theta);
        r.integer("n_r", c.n_r);
        r.integer("n_modes", c.n_modes);
        r.integer("n_quad", c.n_quad);
        r.finish();
    }
    {
        Reader r(root, "bubble");
        r.reals("lambda", c.lambdas);
        r.reals("epsilon", c.epsilons);
        r.integer("theta_points", c.theta_points);
        if (auto n = r.get("theta")) c.theta = as_real(*n, "bubble.theta");
        r.finish();
    }
    {
        Reader r(root, "solve");
        r.real("epsilon", c.solve_epsilon);
        r.real("lambda", c.solve_lambda);
        r.integer("n_theta", c.solve_n_theta);
        r.integer("n_r", c.solve_n_r);
        r.boolean("continuation", c.continuation);
        r.finish();
    }
    {
        Reader r(root, "scan");
        r.real("epsilon", c.scan_epsilon);
        r.real("lambda", c.scan_lambda);
        r.integer("bisections", c.bisections);
        r.finish();
    }
    {
        Reader r(root, "energy");
        r.integer("n_theta", c.energy_n_theta);
        r.integer("n_r", c.energy_n_r);
        r.finish();
    }
    {
        Reader r(root, "tolerances");
        r.real("newton_tol", c.newton_tol);
        r.integer("newton_max_iter", c.newton_max_iter);
        r.real("quad_tol", c.quad_tol);
        r.real("fixed_point_tol", c.fixed_point_tol);
        r.integer("fixed_point_max_iter", c.fixed_point_max_iter);
        r.finish();
    }
    {
        Reader r(root, "diagnostics");
        r.real("alpha", c.alpha);
        if (auto n = r.get("seed")) {
            const int s = as_int(*n, "diagnostics.seed");
            if (s < 0) throw config_error("diagnostics.seed", "must be nonnegative");
            c.seed = static_cast<std::uint64_t>(s);
        }
        r.finish();
    }
    {
        Reader r(root, "run");
        r.integer("jobs", c.jobs);
        r.string("out_dir", c.out_dir);
        r.finish();
    }
    validate(c);
    // positivity of the curvature data is part of validation
    try {
        (void)c.curvature();
    } catch (const Error& e) {
        throw config_error("curvature", e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("--config", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

CurvatureField ExperimentConfig::curvature() const {
    Poly2 K;
    for (const auto& t : K_terms) K.add_term(static_cast<int>(t[0]), static_cast<int>(t[1]), t[2]);
    std::vector<double> b = kappa_sin;
    b.resize(kappa_cos.size(), 0.0);
    return CurvatureField(K, Fourier1(kappa_cos, b), validation_grid_size);
}

double ExperimentConfig::theta_star() const {
    if (theta) return wrap_angle(*theta);
    const CurvatureField f = curvature();
    for (const auto& e : find_extremum_reduced(f))
        if (e.kind == ExtremumKind::max) return e.theta;
    return 0.0;
}

nlohmann::ordered_json ExperimentConfig::echo() const {
    using J = nlohmann::ordered_json;
    J k = J::array();
    for (const auto& t : K_terms) k.push_back({t[0], t[1], t[2]});
    J j;
    j["curvature"] = {{"K", k},
                      {"kappa_cos", kappa_cos},
                      {"kappa_sin", kappa_sin},
                      {"validation_grid_size", validation_grid_size}};
    j["grid"] = {{"n_theta", n_theta}, {"n_r", n_r}, {"n_modes", n_modes}, {"n_quad", n_quad}};
    j["bubble"] = {{"lambda", lambdas}, {"epsilon", epsilons}, {"theta_points", theta_points}};
    if (theta) j["bubble"]["theta"] = *theta;
    j["solve"] = {{"epsilon", solve_epsilon}, {"lambda", solve_lambda}, {"n_theta", solve_n_theta}, {"n_r", solve_n_r}, {"continuation", continuation}};
    j["scan"] = {{"epsilon", scan_epsilon}, {"lambda", scan_lambda}, {"bisections", bisections}};
    j["energy"] = {{"n_theta", energy_n_theta}, {"n_r", energy_n_r}};
    j["tolerances"] = {{"newton_tol", newton_tol},
                       {"newton_max_iter", newton_max_iter},
                       {"quad_tol", quad_tol},
                       {"fixed_point_tol", fixed_point_tol},
                       {"fixed_point_max_iter", fixed_point_max_iter}};
    j["diagnostics"] = {{"alpha", alpha}, {"seed", seed}};
    j["run"] = {{"jobs", jobs}, {"out_dir", out_dir}};
    return j;
}

int resolve_jobs(std::optional<int> flag, const ExperimentConfig& c) {
    if (flag) {
        if (*flag < 1) throw config_error("--jobs", "must be >= 1");
        return *flag;
    }
    if (const char* env = std::getenv("BUBBLE_LAB_JOBS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096) throw config_error("BUBBLE_LAB_JOBS", "must be a positive integer");
        return static_cast<int>(v);
    }
    return c.jobs;
}

}  // namespace bubble
