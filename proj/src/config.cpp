#include "certkit/config.hpp"

#include "certkit/errors.hpp"

#include <fstream>
#include <sstream>

namespace certkit {

using nlohmann::ordered_json;

namespace {

/** Collects schema violations so a single error can name every bad field. */
struct Validator {
    std::vector<std::string> errors;

    void fail(const std::string& field, const std::string& why) {
        errors.push_back(field + ": " + why);
    }
    void finish() const {
        if (errors.empty())
            return;
        std::string msg = "configuration is invalid:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw config_error(msg);
    }
};

double get_number(const ordered_json& obj, const char* key, const std::string& path,
                  Validator& v, bool required, double fallback = 0.0) {
    if (!obj.contains(key)) {
        if (required)
            v.fail(path, "missing required number");
        return fallback;
    }
    if (!obj[key].is_number()) {
        v.fail(path, "must be a number");
        return fallback;
    }
    return obj[key].get<double>();
}

int get_int(const ordered_json& obj, const char* key, const std::string& path, Validator& v,
            int fallback) {
    if (!obj.contains(key))
        return fallback;
    if (!obj[key].is_number_integer()) {
        v.fail(path, "must be an integer");
        return fallback;
    }
    return obj[key].get<int>();
}

Eigen::MatrixXd get_matrix(const ordered_json& obj, const char* key, const std::string& path,
                           Validator& v) {
    if (!obj.contains(key)) {
        v.fail(path, "missing required matrix (array of rows)");
        return Eigen::MatrixXd::Zero(1, 1);
    }
    const auto& m = obj[key];
    // a plain number is accepted as a 1x1 matrix
    if (m.is_number()) {
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = m.get<double>();
        return out;
    }
    if (!m.is_array() || m.empty() || !m[0].is_array()) {
        v.fail(path, "must be a number or an array of equally sized rows");
        return Eigen::MatrixXd::Zero(1, 1);
    }
    const size_t rows = m.size(), cols = m[0].size();
    Eigen::MatrixXd out(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!m[i].is_array() || m[i].size() != cols) {
            v.fail(path, "rows must be equally sized arrays");
            return Eigen::MatrixXd::Zero(1, 1);
        }
        for (size_t j = 0; j < cols; ++j) {
            if (!m[i][j].is_number()) {
                v.fail(path, "entries must be numbers");
                return Eigen::MatrixXd::Zero(1, 1);
            }
            out(i, j) = m[i][j].get<double>();
        }
    }
    return out;
}

ScalarFn parse_builtin(const ordered_json& spec, const std::string& path, Validator& v,
                       double l_for_modes) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        v.fail(path, "function spec needs a string field 'kind'");
        return fn_zero();
    }
    const std::string kind = spec["kind"].get<std::string>();
    auto num = [&](const char* key, bool required, double fb = 0.0) {
        return get_number(spec, key, path + "." + key, v, required, fb);
    };
    if (kind == "zero")
        return fn_zero();
    if (kind == "constant")
        return fn_constant(num("value", true));
    if (kind == "linear")
        return fn_linear(num("slope", true));
    if (kind == "polynomial") {
        if (!spec.contains("coeffs") || !spec["coeffs"].is_array()) {
            v.fail(path + ".coeffs", "missing coefficient array");
            return fn_zero();
        }
        std::vector<double> c;
        for (const auto& e : spec["coeffs"]) {
            if (!e.is_number()) {
                v.fail(path + ".coeffs", "entries must be numbers");
                return fn_zero();
            }
            c.push_back(e.get<double>());
        }
        return fn_polynomial(std::move(c));
    }
    if (kind == "sin")
        return fn_sin(num("amplitude", true), num("frequency", true), num("phase", false));
    if (kind == "cos")
        return fn_cos(num("amplitude", true), num("frequency", true), num("phase", false));
    if (kind == "exp_ramp")
        return fn_exp_ramp(num("amplitude", true), num("rate", false, 1.0));
    if (kind == "cubic_damping")
        return fn_cubic_damping(num("gain", true));
    if (kind == "sine_mode") {
        if (l_for_modes <= 0.0) {
            v.fail(path, "'sine_mode' is only valid for functions of z");
            return fn_zero();
        }
        const double amp = num("amplitude", true);
        const double mode = num("mode", true, 1.0);
        return fn_sin(amp, M_PI * mode / l_for_modes);
    }
    v.fail(path, "unknown function kind '" + kind + "'");
    return fn_zero();
}

ZFunction parse_zfunction(const ordered_json& spec, const std::string& path, Validator& v,
                          double l) {
    ZFunction out;
    if (spec.is_object() && spec.contains("kind") && spec["kind"] == "samples") {
        if (!spec.contains("path") || !spec["path"].is_string()) {
            v.fail(path + ".path", "sample spec needs a file path");
            return out;
        }
        std::ifstream in(spec["path"].get<std::string>());
        if (!in) {
            v.fail(path + ".path", "cannot open sample file " +
                                       spec["path"].get<std::string>());
            return out;
        }
        double value;
        while (in >> value)
            out.samples.push_back(value);
        out.from_samples = true;
        return out;
    }
    out.fn = parse_builtin(spec, path, v, l);
    return out;
}

VectorField parse_vector_field(const ordered_json& spec, const std::string& path,
                               Validator& v) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        v.fail(path, "vector field spec needs a string field 'kind'");
        return vf_zero();
    }
    const std::string kind = spec["kind"].get<std::string>();
    if (kind == "zero")
        return vf_zero();
    if (kind == "cubic_damping")
        return vf_odd_damping(get_number(spec, "gain", path + ".gain", v, true), 3.0);
    if (kind == "odd_damping")
        return vf_odd_damping(get_number(spec, "gain", path + ".gain", v, true),
                              get_number(spec, "power", path + ".power", v, true));
    v.fail(path, "unknown vector field kind '" + kind + "'");
    return vf_zero();
}

} // namespace

Eigen::VectorXd ZFunction::sample(const Grid& grid, const std::string& what) const {
    Eigen::VectorXd out(grid.m);
    if (from_samples) {
        if (static_cast<int>(samples.size()) != grid.m)
            throw config_error(what + ": sample file has " + std::to_string(samples.size()) +
                               " values but the grid has " + std::to_string(grid.m) +
                               " nodes");
        for (int i = 0; i < grid.m; ++i)
            out(i) = samples[i];
        return out;
    }
    for (int i = 0; i < grid.m; ++i)
        out(i) = fn.value(grid.node(i));
    return out;
}

CouplingProblem RunConfig::build_problem() const {
    const Grid grid = Grid::uniform(l, sim.m);
    const int n = static_cast<int>(C.rows());
    Eigen::MatrixXd Bv(grid.m, n), Dv(grid.m, n);
    for (int k = 0; k < n; ++k) {
        Bv.col(k) = B[k].sample(grid, "system.B[" + std::to_string(k) + "]");
        Dv.col(k) = D[k].sample(grid, "system.D[" + std::to_string(k) + "]");
    }
    return CouplingProblem(a, C, P, SampledFn(grid, Bv), SampledFn(grid, Dv));
}

SampledFn RunConfig::build_u0(const Grid& grid) const {
    return SampledFn(grid, u0.sample(grid, "system.u0"));
}

RunConfig parse_config_json(const ordered_json& j) {
    Validator v;
    RunConfig cfg;
    if (!j.is_object()) {
        v.fail("(root)", "configuration must be a JSON object");
        v.finish();
    }

    // ---- system block
    if (!j.contains("system") || !j["system"].is_object()) {
        v.fail("system", "missing required block");
        v.finish();
    }
    const auto& sys = j["system"];
    cfg.a = get_number(sys, "a", "system.a", v, true, 1.0);
    cfg.l = get_number(sys, "l", "system.l", v, true, 1.0);
    if (cfg.a <= 0.0)
        v.fail("system.a", "must be positive");
    if (cfg.l <= 0.0)
        v.fail("system.l", "must be positive");
    cfg.C = get_matrix(sys, "C", "system.C", v);
    cfg.P = get_matrix(sys, "P", "system.P", v);
    const int n = static_cast<int>(cfg.C.rows());
    if (cfg.C.rows() != cfg.C.cols())
        v.fail("system.C", "must be square");
    if (cfg.P.rows() != cfg.P.cols() || cfg.P.rows() != cfg.C.rows())
        v.fail("system.P", "must be square with the same size as C");

    auto parse_components = [&](const char* key) {
        std::vector<ZFunction> comps;
        const std::string path = std::string("system.") + key;
        if (!sys.contains(key)) {
            v.fail(path, "missing required component list");
            comps.assign(std::max(n, 1), ZFunction{fn_zero(), {}, false});
            return comps;
        }
        const auto& arr = sys[key];
        if (arr.is_object()) { // single component shorthand
            comps.push_back(parse_zfunction(arr, path, v, cfg.l));
            return comps;
        }
        if (!arr.is_array() || arr.empty()) {
            v.fail(path, "must be a function spec or a non-empty array of them");
            comps.assign(std::max(n, 1), ZFunction{fn_zero(), {}, false});
            return comps;
        }
        for (size_t k = 0; k < arr.size(); ++k)
            comps.push_back(
                parse_zfunction(arr[k], path + "[" + std::to_string(k) + "]", v, cfg.l));
        return comps;
    };
    cfg.B = parse_components("B");
    cfg.D = parse_components("D");
    if (static_cast<int>(cfg.B.size()) != n)
        v.fail("system.B", "component count must equal the size of C");
    if (static_cast<int>(cfg.D.size()) != n)
        v.fail("system.D", "component count must equal the size of C");

    if (sys.contains("u0"))
        cfg.u0 = parse_zfunction(sys["u0"], "system.u0", v, cfg.l);
    else
        cfg.u0 = ZFunction{fn_zero(), {}, false};
    cfg.x0 = Eigen::VectorXd::Zero(n);
    if (sys.contains("x0")) {
        if (!sys["x0"].is_array() || static_cast<int>(sys["x0"].size()) != n) {
            v.fail("system.x0", "must be an array of n numbers");
        } else {
            for (int k = 0; k < n; ++k) {
                if (!sys["x0"][k].is_number()) {
                    v.fail("system.x0", "entries must be numbers");
                    break;
                }
                cfg.x0(k) = sys["x0"][k].get<double>();
            }
        }
    }

    // ---- nonlinearity block
    if (!j.contains("nonlinearity") || !j["nonlinearity"].is_object()) {
        v.fail("nonlinearity", "missing required block");
        v.finish();
    }
    const auto& nl = j["nonlinearity"];
    std::string mode = "globally_lipschitz";
    if (nl.contains("mode")) {
        if (!nl["mode"].is_string())
            v.fail("nonlinearity.mode", "must be a string");
        else
            mode = nl["mode"].get<std::string>();
    }
    if (mode == "globally_lipschitz") {
        cfg.nonlinearity.mode = NonlinearityMode::GloballyLipschitz;
    } else if (mode == "general") {
        cfg.nonlinearity.mode = NonlinearityMode::General;
    } else {
        v.fail("nonlinearity.mode", "must be 'globally_lipschitz' or 'general'");
    }
    cfg.nonlinearity.sigma = get_number(nl, "sigma", "nonlinearity.sigma", v, true);
    cfg.nonlinearity.L = get_number(nl, "L", "nonlinearity.L", v, true);
    const bool general = cfg.nonlinearity.mode == NonlinearityMode::General;
    cfg.nonlinearity.q = get_number(nl, "q", "nonlinearity.q", v, general, 1.5);
    cfg.nonlinearity.alpha = get_number(nl, "alpha", "nonlinearity.alpha", v, general);
    cfg.nonlinearity.c0 = get_number(nl, "c0", "nonlinearity.c0", v, general);
    cfg.nonlinearity.zeta = get_number(nl, "zeta", "nonlinearity.zeta", v, general);
    cfg.nonlinearity.delta1 = get_number(nl, "delta1", "nonlinearity.delta1", v, general);
    cfg.nonlinearity.delta2 = get_number(nl, "delta2", "nonlinearity.delta2", v, general);
    if (general) {
        ScalarFn f0 = nl.contains("f0") ? parse_builtin(nl["f0"], "nonlinearity.f0", v, 0.0)
                                        : fn_zero();
        ScalarFn f1 = nl.contains("f1") ? parse_builtin(nl["f1"], "nonlinearity.f1", v, 0.0)
                                        : fn_zero();
        cfg.nonlinearity.f1 = f1;
        cfg.nonlinearity.f = fn_sum(f0, f1);
    } else {
        cfg.nonlinearity.f = nl.contains("f")
                                 ? parse_builtin(nl["f"], "nonlinearity.f", v, 0.0)
                                 : fn_zero();
        cfg.nonlinearity.f1 = fn_zero();
    }
    cfg.nonlinearity.X = nl.contains("X") ? parse_vector_field(nl["X"], "nonlinearity.X", v)
                                          : vf_zero();

    // ---- disturbance block (optional; defaults to no disturbance)
    cfg.disturbance = Disturbance::none();
    cfg.ramp_time = 1.0;
    if (j.contains("disturbance")) {
        const auto& d = j["disturbance"];
        if (!d.is_object()) {
            v.fail("disturbance", "must be an object");
        } else {
            cfg.disturbance.d_inf = get_number(d, "d_inf", "disturbance.d_inf", v, false);
            if (cfg.disturbance.d_inf < 0.0)
                v.fail("disturbance.d_inf", "must be >= 0");
            cfg.ramp_time = get_number(d, "ramp_time", "disturbance.ramp_time", v, false, 1.0);
            ScalarFn ramp = cfg.ramp_time > 0.0 ? fn_exp_ramp(1.0, 1.0 / cfg.ramp_time)
                                                : fn_constant(1.0);
            if (d.contains("d1"))
                cfg.disturbance.d1 =
                    fn_product(parse_builtin(d["d1"], "disturbance.d1", v, 0.0), ramp);
            if (d.contains("d2"))
                cfg.disturbance.d2 =
                    fn_product(parse_builtin(d["d2"], "disturbance.d2", v, 0.0), ramp);
        }
    }

    // ---- numerics block (optional)
    if (j.contains("numerics")) {
        const auto& num = j["numerics"];
        if (!num.is_object()) {
            v.fail("numerics", "must be an object");
        } else {
            cfg.sim.m = get_int(num, "m", "numerics.m", v, 401);
            cfg.sim.N = get_int(num, "N", "numerics.N", v, 48);
            cfg.sim.dt = get_number(num, "dt", "numerics.dt", v, false, 1e-3);
            cfg.sim.T = get_number(num, "T", "numerics.T", v, false, 10.0);
            cfg.sim.record_every = get_int(num, "record_every", "numerics.record_every", v, 0);
            cfg.audit_samples = get_int(num, "audit_samples", "numerics.audit_samples", v,
                                        100000);
            if (num.contains("scheme")) {
                const std::string s = num["scheme"].is_string()
                                          ? num["scheme"].get<std::string>()
                                          : std::string();
                if (s == "etdrk2")
                    cfg.sim.scheme = Scheme::Etdrk2;
                else if (s == "imex_euler")
                    cfg.sim.scheme = Scheme::ImexEuler;
                else
                    v.fail("numerics.scheme", "must be 'etdrk2' or 'imex_euler'");
            }
            if (cfg.sim.m < 3 || cfg.sim.m % 2 == 0)
                v.fail("numerics.m", "must be an odd integer >= 3");
            if (cfg.sim.N < 1)
                v.fail("numerics.N", "must be >= 1");
            if (cfg.sim.dt <= 0.0)
                v.fail("numerics.dt", "must be positive");
            if (cfg.sim.T < 0.0)
                v.fail("numerics.T", "must be >= 0");
            if (cfg.audit_samples <= 0)
                v.fail("numerics.audit_samples", "must be positive");
        }
    }

    // ---- output block (optional)
    if (j.contains("output")) {
        const auto& out = j["output"];
        if (!out.is_object()) {
            v.fail("output", "must be an object");
        } else {
            if (out.contains("dir")) {
                if (!out["dir"].is_string())
                    v.fail("output.dir", "must be a string");
                else
                    cfg.out_dir = out["dir"].get<std::string>();
            }
            if (out.contains("formats")) {
                if (!out["formats"].is_array()) {
                    v.fail("output.formats", "must be an array");
                } else {
                    cfg.write_json = cfg.write_text = false;
                    for (const auto& f : out["formats"]) {
                        if (f == "json")
                            cfg.write_json = true;
                        else if (f == "text")
                            cfg.write_text = true;
                        else
                            v.fail("output.formats", "entries must be 'json' or 'text'");
                    }
                }
            }
        }
    }

    v.finish();

    // normalized echo: every default made explicit
    ordered_json echo;
    echo["system"] = j["system"];
    if (!echo["system"].contains("u0"))
        echo["system"]["u0"] = {{"kind", "zero"}};
    if (!echo["system"].contains("x0")) {
        echo["system"]["x0"] = ordered_json::array();
        for (int k = 0; k < n; ++k)
            echo["system"]["x0"].push_back(0.0);
    }
    echo["nonlinearity"] = j["nonlinearity"];
    if (!echo["nonlinearity"].contains("mode"))
        echo["nonlinearity"]["mode"] = mode;
    echo["disturbance"] = j.contains("disturbance") ? j["disturbance"] : ordered_json::object();
    if (!echo["disturbance"].contains("d1"))
        echo["disturbance"]["d1"] = {{"kind", "zero"}};
    if (!echo["disturbance"].contains("d2"))
        echo["disturbance"]["d2"] = {{"kind", "zero"}};
    if (!echo["disturbance"].contains("d_inf"))
        echo["disturbance"]["d_inf"] = cfg.disturbance.d_inf;
    if (!echo["disturbance"].contains("ramp_time"))
        echo["disturbance"]["ramp_time"] = cfg.ramp_time;
    echo["numerics"] = {{"m", cfg.sim.m},
                        {"N", cfg.sim.N},
                        {"dt", cfg.sim.dt},
                        {"T", cfg.sim.T},
                        {"scheme", cfg.sim.scheme == Scheme::Etdrk2 ? "etdrk2" : "imex_euler"},
                        {"record_every", cfg.sim.record_every},
                        {"audit_samples", cfg.audit_samples}};
    echo["output"] = ordered_json::object();
    echo["output"]["dir"] = cfg.out_dir;
    echo["output"]["formats"] = ordered_json::array();
    if (cfg.write_json)
        echo["output"]["formats"].push_back("json");
    if (cfg.write_text)
        echo["output"]["formats"].push_back("text");
    cfg.echo = std::move(echo);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open configuration file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("configuration is not valid JSON: " + std::string(e.what()));
    }
    return parse_config_json(j);
}

nlohmann::ordered_json example_config_json() {
    return ordered_json{
        {"system",
         {{"a", 1.0},
          {"l", 1.0},
          {"C", {{0.25}}},
          {"P", {{1.0}}},
          {"B", ordered_json::array({{{"kind", "constant"}, {"value", 1.0}}})},
          {"D", ordered_json::array({{{"kind", "constant"}, {"value", -5.0}}})},
          {"u0", {{"kind", "sine_mode"}, {"amplitude", 0.7071067811865476}, {"mode", 1}}},
          {"x0", {0.5}}}},
        {"nonlinearity",
         {{"mode", "globally_lipschitz"},
          {"sigma", 1.0},
          {"L", 1.0},
          {"f", {{"kind", "sin"}, {"amplitude", 1.0}, {"frequency", 1.0}}},
          {"X", {{"kind", "zero"}}}}},
        {"disturbance",
         {{"d1", {{"kind", "sin"}, {"amplitude", 0.1}, {"frequency", 1.0}}},
          {"d2", {{"kind", "zero"}}},
          {"d_inf", 0.1},
          {"ramp_time", 1.0}}},
        {"numerics",
         {{"m", 401}, {"N", 48}, {"dt", 0.001}, {"T", 50.0}, {"scheme", "etdrk2"}}},
    };
}

} // namespace certkit
