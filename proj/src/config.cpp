#include "nfsde/config.hpp"
#include "nfsde/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

using nlohmann::json;

namespace nfsde {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw config_error(path + ": " + msg);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected a table");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(path, "unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(path, "missing required key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key,
            std::optional<int> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(path, "missing required key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::vector<double> get_vector(const json& obj, const std::string& path, const std::string& key,
                               bool required = true) {
    if (!obj.contains(key)) {
        if (!required) return {};
        fail(path, "missing required key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
    return out;
}

SegmentFunctional parse_functional(const json& obj, const std::string& path) {
    const std::string name = obj.value("lambda", std::string("value0"));
    if (name == "value0") return SegmentFunctional::ValueAtZero;
    if (name == "value_minus_tau") return SegmentFunctional::ValueAtMinusTau;
    if (name == "window_mean") return SegmentFunctional::WindowMean;
    fail(path + ".lambda", "expected one of value0 | value_minus_tau | window_mean");
}

ScalarCoeff parse_scalar_coeff(const json& obj, const std::string& path, double sap_omega) {
    ScalarCoeff c;
    c.periodic.period = sap_omega;
    if (obj.contains("periodic")) {
        const auto& p = obj.at("periodic");
        require_keys(p, path + ".periodic", {"a0", "cos", "sin"});
        c.periodic.a0 = get_number(p, path + ".periodic", "a0", 0.0);
        c.periodic.cos_coef = get_vector(p, path + ".periodic", "cos", false);
        c.periodic.sin_coef = get_vector(p, path + ".periodic", "sin", false);
    }
    if (obj.contains("decay")) {
        const auto& d = obj.at("decay");
        require_keys(d, path + ".decay", {"c0", "p"});
        c.decay.c0 = get_number(d, path + ".decay", "c0", 0.0);
        c.decay.p = get_number(d, path + ".decay", "p", 1.0);
    }
    return c;
}

MarkScale parse_mark_scale(const json& obj, const std::string& path) {
    const std::string name = obj.value("mark_scale", std::string("one"));
    if (name == "one") return MarkScale::One;
    if (name == "norm") return MarkScale::Norm;
    fail(path + ".mark_scale", "expected one of one | norm");
}

} // namespace

LoadedConfig parse_config(const json& root, const std::string& origin) {
    LoadedConfig out;
    require_keys(root, origin, {"model", "solver", "analysis"});
    if (!root.contains("model")) fail(origin, "missing required key 'model'");
    if (!root.contains("solver")) fail(origin, "missing required key 'solver'");

    const auto& jm = root.at("model");
    require_keys(jm, "model", {"sectorial", "noise", "tau", "omega", "phi", "coefficients"});
    for (const char* key : {"sectorial", "noise", "phi", "coefficients"})
        if (!jm.contains(key)) fail("model", std::string("missing required key '") + key + "'");

    // sectorial
    {
        const auto& js = jm.at("sectorial");
        require_keys(js, "model.sectorial", {"alpha", "operator", "mu", "theta", "C", "M"});
        SectorialSpec spec;
        spec.alpha = get_number(js, "model.sectorial", "alpha");
        spec.mu = get_number(js, "model.sectorial", "mu");
        spec.theta = get_number(js, "model.sectorial", "theta", 0.3);
        spec.C = get_number(js, "model.sectorial", "C", 1.0);
        spec.M = get_number(js, "model.sectorial", "M", 1.0);
        const auto& jop = js.at("operator");
        require_keys(jop, "model.sectorial.operator", {"scalar", "eigenvalues", "basis"});
        if (jop.contains("scalar")) {
            if (jop.contains("eigenvalues") || jop.contains("basis"))
                fail("model.sectorial.operator", "give either 'scalar' or an eigendecomposition");
            spec.eigenvalues = Eigen::VectorXd::Constant(1, get_number(jop, "model.sectorial.operator", "scalar"));
            spec.basis = Eigen::MatrixXd::Identity(1, 1);
        } else {
            const auto eigs = get_vector(jop, "model.sectorial.operator", "eigenvalues");
            if (!jop.contains("basis")) fail("model.sectorial.operator", "missing 'basis'");
            const auto& jb = jop.at("basis");
            if (!jb.is_array() || jb.size() != eigs.size())
                fail("model.sectorial.operator.basis", "expected a square row-major matrix");
            const int d = static_cast<int>(eigs.size());
            Eigen::MatrixXd basis(d, d);
            for (int r = 0; r < d; ++r) {
                const auto& row = jb.at(static_cast<std::size_t>(r));
                if (!row.is_array() || static_cast<int>(row.size()) != d)
                    fail("model.sectorial.operator.basis", "expected a square row-major matrix");
                for (int c = 0; c < d; ++c) basis(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
            }
            spec.eigenvalues = to_eigen(eigs);
            spec.basis = basis;
        }
        try {
            spec.validate();
        } catch (const std::invalid_argument& e) {
            fail("model.sectorial", e.what());
        }
        out.model.sectorial = spec;
    }

    // noise
    {
        const auto& jn = jm.at("noise");
        require_keys(jn, "model.noise", {"dim", "drift", "q_diag", "atoms"});
        LevySpec noise;
        noise.dim_u = get_int(jn, "model.noise", "dim");
        noise.drift = jn.contains("drift") ? to_eigen(get_vector(jn, "model.noise", "drift"))
                                           : Eigen::VectorXd(Eigen::VectorXd::Zero(noise.dim_u));
        noise.q_diag = to_eigen(get_vector(jn, "model.noise", "q_diag"));
        if (jn.contains("atoms")) {
            const auto& ja = jn.at("atoms");
            if (!ja.is_array()) fail("model.noise.atoms", "expected an array");
            for (std::size_t k = 0; k < ja.size(); ++k) {
                const auto& a = ja.at(k);
                const std::string path = "model.noise.atoms[" + std::to_string(k) + "]";
                require_keys(a, path, {"mark", "rate"});
                JumpAtom atom;
                atom.mark = to_eigen(get_vector(a, path, "mark"));
                atom.rate = get_number(a, path, "rate");
                noise.atoms.push_back(std::move(atom));
            }
        }
        try {
            noise.validate();
        } catch (const validation_error& e) {
            fail("model.noise", e.what());
        }
        out.model.noise = noise;
    }

    out.model.tau = get_number(jm, "model", "tau");
    out.model.omega = get_number(jm, "model", "omega");

    // phi
    {
        const auto& jp = jm.at("phi");
        require_keys(jp, "model.phi", {"kind", "value", "values", "step"});
        const std::string kind = jp.value("kind", std::string("constant"));
        if (kind == "constant") {
            out.model.phi.kind = InitialSegment::Kind::Constant;
            out.model.phi.constant_value = to_eigen(get_vector(jp, "model.phi", "value"));
        } else if (kind == "samples") {
            out.model.phi.kind = InitialSegment::Kind::Samples;
            out.model.phi.sample_step = get_number(jp, "model.phi", "step");
            if (!jp.contains("values")) fail("model.phi", "missing required key 'values'");
            const auto& jv = jp.at("values");
            if (!jv.is_array() || jv.empty() || !jv.at(0).is_array())
                fail("model.phi.values", "expected rows of numbers");
            const int d = static_cast<int>(jv.at(0).size());
            Eigen::MatrixXd samples(d, static_cast<int>(jv.size()));
            for (std::size_t c = 0; c < jv.size(); ++c) {
                const auto col = jv.at(c);
                if (!col.is_array() || static_cast<int>(col.size()) != d)
                    fail("model.phi.values", "ragged rows");
                for (int r = 0; r < d; ++r) samples(r, static_cast<int>(c)) = col.at(static_cast<std::size_t>(r)).get<double>();
            }
            out.model.phi.samples = samples;
        } else {
            fail("model.phi.kind", "expected constant | samples");
        }
    }

    // coefficients
    {
        const auto& jc = jm.at("coefficients");
        require_keys(jc, "model.coefficients",
                     {"h", "f", "g", "F", "G", "declared_k0", "declared_L", "sap_omega"});
        auto& co = out.model.coefficients;
        co.sap_omega = get_number(jc, "model.coefficients", "sap_omega", out.model.omega);
        const std::set<std::string> drift_keys{"lambda", "periodic", "decay"};
        if (jc.contains("h")) {
            require_keys(jc.at("h"), "model.coefficients.h", drift_keys);
            co.h.lambda = parse_functional(jc.at("h"), "model.coefficients.h");
            co.h.c = parse_scalar_coeff(jc.at("h"), "model.coefficients.h", co.sap_omega);
        }
        if (jc.contains("f")) {
            require_keys(jc.at("f"), "model.coefficients.f", drift_keys);
            co.f.lambda = parse_functional(jc.at("f"), "model.coefficients.f");
            co.f.c = parse_scalar_coeff(jc.at("f"), "model.coefficients.f", co.sap_omega);
        }
        if (jc.contains("g")) {
            require_keys(jc.at("g"), "model.coefficients.g",
                         {"lambda", "periodic", "decay", "direction"});
            co.g.lambda = parse_functional(jc.at("g"), "model.coefficients.g");
            co.g.c = parse_scalar_coeff(jc.at("g"), "model.coefficients.g", co.sap_omega);
            co.g.direction = to_eigen(get_vector(jc.at("g"), "model.coefficients.g", "direction"));
        } else {
            co.g.direction = Eigen::VectorXd::Zero(out.model.noise.dim_u);
        }
        const std::set<std::string> jump_keys{"lambda", "periodic", "decay", "mark_scale"};
        if (jc.contains("F")) {
            require_keys(jc.at("F"), "model.coefficients.F", jump_keys);
            co.F.lambda = parse_functional(jc.at("F"), "model.coefficients.F");
            co.F.c = parse_scalar_coeff(jc.at("F"), "model.coefficients.F", co.sap_omega);
            co.F.rho = parse_mark_scale(jc.at("F"), "model.coefficients.F");
        }
        if (jc.contains("G")) {
            require_keys(jc.at("G"), "model.coefficients.G", jump_keys);
            co.G.lambda = parse_functional(jc.at("G"), "model.coefficients.G");
            co.G.c = parse_scalar_coeff(jc.at("G"), "model.coefficients.G", co.sap_omega);
            co.G.rho = parse_mark_scale(jc.at("G"), "model.coefficients.G");
        }
        co.declared_k0 = get_number(jc, "model.coefficients", "declared_k0", 0.0);
        co.declared_L = get_number(jc, "model.coefficients", "declared_L", 0.0);
        try {
            co.validate(out.model.noise);
        } catch (const validation_error& e) {
            fail("model.coefficients", e.what());
        }
    }

    try {
        out.model.validate();
    } catch (const validation_error& e) {
        fail("model", e.what());
    }

    // solver
    {
        const auto& js = root.at("solver");
        require_keys(js, "solver",
                     {"step_h", "horizon_T", "scheme", "picard_max_iter", "neutral_fixed_point_tol",
                      "neutral_max_iter"});
        out.solver.step_h = get_number(js, "solver", "step_h");
        out.solver.horizon_T = get_number(js, "solver", "horizon_T");
        const std::string scheme = js.value("scheme", std::string("time_step"));
        if (scheme == "time_step")
            out.solver.scheme = SolverConfig::Scheme::TimeStep;
        else if (scheme == "picard")
            out.solver.scheme = SolverConfig::Scheme::Picard;
        else
            fail("solver.scheme", "expected time_step | picard");
        out.solver.picard_max_iter = get_int(js, "solver", "picard_max_iter", 8);
        out.solver.neutral_fixed_point_tol =
            get_number(js, "solver", "neutral_fixed_point_tol", 1e-12);
        out.solver.neutral_max_iter = get_int(js, "solver", "neutral_max_iter", 100);
        try {
            out.solver.validate(out.model);
        } catch (const validation_error& e) {
            fail("solver", e.what());
        }
    }

    // solver-grid consistency of phi is part of loading
    try {
        (void)out.model.phi.materialize(out.model.tau, out.solver.step_h);
    } catch (const validation_error& e) {
        fail("model.phi", e.what());
    }

    // analysis (optional)
    bool explicit_checkpoints = false;
    if (root.contains("analysis")) {
        const auto& ja = root.at("analysis");
        require_keys(ja, "analysis",
                     {"checkpoints", "paths", "cloud_size", "bootstrap", "decay_fraction", "lp_cap",
                      "validation_budget"});
        if (ja.contains("checkpoints")) {
            out.analysis.checkpoints = get_vector(ja, "analysis", "checkpoints");
            explicit_checkpoints = true;
        }
        out.analysis.paths = get_int(ja, "analysis", "paths", 2000);
        out.analysis.cloud_size = get_int(ja, "analysis", "cloud_size", 120);
        out.analysis.bootstrap = get_int(ja, "analysis", "bootstrap", 200);
        out.analysis.decay_fraction = get_number(ja, "analysis", "decay_fraction", 0.25);
        out.analysis.lp_cap = get_int(ja, "analysis", "lp_cap", 1000);
        out.analysis.validation_budget = get_int(ja, "analysis", "validation_budget", 400);
        if (out.analysis.paths < 1) fail("analysis.paths", "must be >= 1");
        if (out.analysis.validation_budget < 100) fail("analysis.validation_budget", "must be >= 100");
    }
    if (explicit_checkpoints) {
        for (double c : out.analysis.checkpoints)
            if (c + out.model.omega > out.solver.horizon_T + 1e-9)
                fail("analysis.checkpoints",
                     "checkpoint " + std::to_string(c) + " + omega exceeds horizon_T");
    } else {
        // default geometric schedule, intersected with the horizon
        std::vector<double> fit;
        for (double c : out.analysis.checkpoints)
            if (c + out.model.omega <= out.solver.horizon_T + 1e-9) fit.push_back(c);
        out.analysis.checkpoints = std::move(fit);
    }

    // Echo: fully resolved configuration.
    json echo = root;
    echo["solver"]["scheme"] =
        out.solver.scheme == SolverConfig::Scheme::Picard ? "picard" : "time_step";
    echo["solver"]["picard_max_iter"] = out.solver.picard_max_iter;
    echo["solver"]["neutral_fixed_point_tol"] = out.solver.neutral_fixed_point_tol;
    echo["solver"]["neutral_max_iter"] = out.solver.neutral_max_iter;
    echo["analysis"] = {{"checkpoints", out.analysis.checkpoints},
                        {"paths", out.analysis.paths},
                        {"cloud_size", out.analysis.cloud_size},
                        {"bootstrap", out.analysis.bootstrap},
                        {"decay_fraction", out.analysis.decay_fraction},
                        {"lp_cap", out.analysis.lp_cap},
                        {"validation_budget", out.analysis.validation_budget}};
    out.echo = echo.dump(2);
    return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(path.string() + ": " + e.what());
    }
    return parse_config(root, path.string());
}

} // namespace nfsde
