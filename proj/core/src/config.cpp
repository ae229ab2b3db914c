#include "optex/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace optex {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail_at(const FlatConfig& flat, const std::string& key, const std::string& msg) {
    std::string where = flat.source.empty() ? std::string("<config>") : flat.source;
    auto it = flat.lines.find(key);
    if (it != flat.lines.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": " + msg);
}

// Typed access over the flat map with error anchoring.
struct Reader {
    const FlatConfig& flat;

    bool has(const std::string& key) const { return flat.values.count(key) != 0; }

    std::string require(const std::string& key, const std::string& why) const {
        auto it = flat.values.find(key);
        if (it == flat.values.end())
            throw ConfigError((flat.source.empty() ? std::string("<config>") : flat.source) +
                              ": missing key '" + key + "'" + (why.empty() ? "" : " (" + why + ")"));
        return it->second;
    }

    std::string get(const std::string& key, const std::string& dflt) const {
        auto it = flat.values.find(key);
        return it == flat.values.end() ? dflt : it->second;
    }

    double as_double(const std::string& key, const std::string& raw) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail_at(flat, key, "key '" + key + "': expected a number, got '" + raw + "'");
        }
    }

    double require_double(const std::string& key, const std::string& why = "") const {
        return as_double(key, require(key, why));
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = flat.values.find(key);
        return it == flat.values.end() ? dflt : as_double(key, it->second);
    }

    long get_long(const std::string& key, long dflt) const {
        auto it = flat.values.find(key);
        if (it == flat.values.end()) return dflt;
        try {
            std::size_t pos = 0;
            const long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail_at(flat, key, "key '" + key + "': expected an integer, got '" + it->second + "'");
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const {
        auto it = flat.values.find(key);
        if (it == flat.values.end()) return dflt;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            fail_at(flat, key, "key '" + key + "': expected an unsigned integer");
        }
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = flat.values.find(key);
        if (it == flat.values.end()) return dflt;
        const std::string v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        fail_at(flat, key, "key '" + key + "': expected a boolean, got '" + v + "'");
    }
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

FlatConfig parse_ini(std::istream& in, const std::string& source_name) {
    FlatConfig flat;
    flat.source = source_name;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                  ": unterminated section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(source_name + ":" + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        flat.values[full] = value;
        flat.lines[full] = lineno;
    }
    return flat;
}

FlatConfig parse_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_ini(in, path);
}

RunConfig RunConfig::from_flat(const FlatConfig& flat) {
    const Reader r{flat};
    RunConfig cfg;

    const std::string kind = r.get("run.kind", "solve");
    if (kind == "solve") cfg.kind = RunKind::Solve;
    else if (kind == "simulate") cfg.kind = RunKind::Simulate;
    else if (kind == "sweep") cfg.kind = RunKind::Sweep;
    else if (kind == "validate") cfg.kind = RunKind::Validate;
    else fail_at(flat, "run.kind", "run.kind must be one of solve|simulate|sweep|validate");

    cfg.out_dir = r.get("output.dir", "out");

    // grid
    cfg.grid.x_max = r.get_double("grid.x_max", 10.0);
    cfg.grid.p_max = r.get_double("grid.p_max", 10.0);
    cfg.grid.nx = static_cast<int>(r.get_long("grid.nx", 200));
    cfg.grid.np = static_cast<int>(r.get_long("grid.np", 200));
    const std::string closure = r.get("grid.closure", "dirichlet_w");
    if (closure == "dirichlet_w") cfg.grid.closure = UpperClosure::DirichletW;
    else if (closure == "extrapolate") cfg.grid.closure = UpperClosure::LinearExtrapolation;
    else fail_at(flat, "grid.closure", "grid.closure must be dirichlet_w|extrapolate");

    // sim (always read; defaults are harmless)
    cfg.sim.paths = r.get_long("sim.paths", 10000);
    cfg.sim.dt = r.get_double("sim.dt", 0.0);
    cfg.sim.horizon = r.get_double("sim.horizon", 0.0);
    cfg.sim.seed = r.get_u64("sim.seed", 1);
    cfg.sim.antithetic = r.get_bool("sim.antithetic", false);
    cfg.sim.u_cap = r.get_double("sim.u_cap", 1e4);
    cfg.sim.x0 = r.get_double("sim.x0", 5.0);
    cfg.sim.p0 = r.get_double("sim.p0", 2.0);
    cfg.sim.rate = r.get_double("sim.rate", 1.0);
    const std::string strat = r.get("sim.strategy", "policy");
    if (strat == "policy") cfg.sim.strategy = SimStrategy::Policy;
    else if (strat == "constant_rate") cfg.sim.strategy = SimStrategy::ConstantRate;
    else fail_at(flat, "sim.strategy", "sim.strategy must be policy|constant_rate");

    if (cfg.kind == RunKind::Validate) {
        // the battery carries its own models; only grid/sim/seed matter
        return cfg;
    }

    // model
    const std::string mk = r.require("model.kind", "required for run.kind=" + kind);
    if (mk == "gbm") cfg.model.kind = ProcessKind::GBM;
    else if (mk == "abm") cfg.model.kind = ProcessKind::ABM;
    else if (mk == "ou") cfg.model.kind = ProcessKind::OU;
    else fail_at(flat, "model.kind", "model.kind must be gbm|abm|ou");
    cfg.model.sigma = r.require_double("model.sigma", "volatility is required");
    if (cfg.model.kind == ProcessKind::OU) {
        cfg.model.ou_rate = r.require_double("model.ou_rate", "required for model.kind=ou");
        cfg.model.ou_mean = r.require_double("model.ou_mean", "required for model.kind=ou");
        cfg.model.mu = 0.0;
    } else {
        cfg.model.mu = r.require_double("model.mu", "required for model.kind=" + mk);
    }

    // impact
    const std::string ik = r.require("impact.kind", "required for run.kind=" + kind);
    if (ik == "exp") cfg.impact.kind = ImpactKind::Exponential;
    else if (ik == "linear") cfg.impact.kind = ImpactKind::Linear;
    else if (ik == "none") cfg.impact.kind = ImpactKind::None;
    else fail_at(flat, "impact.kind", "impact.kind must be exp|linear|none");
    if (cfg.impact.kind == ImpactKind::None) {
        cfg.impact.lambda = 0.0;
    } else {
        cfg.impact.lambda = r.require_double("impact.lambda", "required for impact.kind=" + ik);
    }

    // solver
    const std::string sk = r.get("solver.kind", "impulse");
    if (sk == "impulse") cfg.solver.kind = SolverKind::Impulse;
    else if (sk == "singular") cfg.solver.kind = SolverKind::Singular;
    else fail_at(flat, "solver.kind", "solver.kind must be impulse|singular");
    cfg.solver.beta = r.require_double("solver.beta", "discount rate is required");
    cfg.solver.k = r.get_double("solver.k", 0.0);
    cfg.solver.tol = r.get_double("solver.tol", 1e-7);
    cfg.solver.max_outer = static_cast<int>(r.get_long("solver.max_outer", 50));
    cfg.solver.max_inner = r.get_long("solver.max_inner", 20000);
    cfg.solver.max_iter = r.get_long("solver.max_iter", 200000);
    cfg.solver.omega = r.get_double("solver.omega", 1.5);
    cfg.solver.tol_region = r.get_double("solver.tol_region", -1.0);

    // sweep
    if (cfg.kind == RunKind::Sweep) {
        cfg.sweep.parameter = r.require("sweep.parameter", "required for run.kind=sweep");
        const std::string raw = r.require("sweep.values", "required for run.kind=sweep");
        std::stringstream ss(raw);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const std::string tv = trim(tok);
            if (tv.empty()) continue;
            try {
                cfg.sweep.values.push_back(std::stod(tv));
            } catch (const std::exception&) {
                fail_at(flat, "sweep.values", "sweep.values: '" + tv + "' is not a number");
            }
        }
        if (cfg.sweep.values.empty())
            fail_at(flat, "sweep.values", "sweep.values must list at least one value");
        if (!std::is_sorted(cfg.sweep.values.begin(), cfg.sweep.values.end()))
            fail_at(flat, "sweep.values", "sweep.values must be sorted ascending");
        cfg.sweep.probe_x = r.get_double("sweep.probe_x", 5.0);
        cfg.sweep.probe_p = r.get_double("sweep.probe_p", 2.0);
        // reject unknown parameters early
        RunConfig probe = cfg;
        probe.set_scalar(cfg.sweep.parameter, cfg.sweep.values.front());
    }

    // construct once to surface model/grid invariant violations as config errors
    try {
        if (cfg.kind != RunKind::Validate) {
            cfg.build_model();
            cfg.build_impact();
            cfg.build_grid();
        }
    } catch (const std::exception& e) {
        throw ConfigError((flat.source.empty() ? std::string("<config>") : flat.source) + ": " +
                          e.what());
    }
    return cfg;
}

MarketModel RunConfig::build_model() const {
    switch (model.kind) {
        case ProcessKind::GBM: return MarketModel::gbm(model.mu, model.sigma, solver.beta);
        case ProcessKind::ABM: return MarketModel::abm(model.mu, model.sigma, solver.beta);
        case ProcessKind::OU:
            return MarketModel::ou(model.ou_rate, model.ou_mean, model.sigma, solver.beta);
    }
    throw ConfigError("unknown model kind");
}

ImpactModel RunConfig::build_impact() const {
    switch (impact.kind) {
        case ImpactKind::Exponential: return ImpactModel::exponential(impact.lambda);
        case ImpactKind::Linear: return ImpactModel::linear(impact.lambda);
        case ImpactKind::None: return ImpactModel::none();
    }
    throw ConfigError("unknown impact kind");
}

Grid2D RunConfig::build_grid() const { return Grid2D(grid.x_max, grid.p_max, grid.nx, grid.np); }

void RunConfig::set_scalar(const std::string& key, double value) {
    if (key == "impact.lambda") impact.lambda = value;
    else if (key == "model.mu") model.mu = value;
    else if (key == "model.sigma") model.sigma = value;
    else if (key == "model.ou_rate") model.ou_rate = value;
    else if (key == "model.ou_mean") model.ou_mean = value;
    else if (key == "solver.beta") solver.beta = value;
    else if (key == "solver.k") solver.k = value;
    else
        throw ConfigError("sweep.parameter '" + key + "' is not a sweepable scalar key");
}

std::map<std::string, std::string> RunConfig::to_flat() const {
    std::map<std::string, std::string> m;
    switch (kind) {
        case RunKind::Solve: m["run.kind"] = "solve"; break;
        case RunKind::Simulate: m["run.kind"] = "simulate"; break;
        case RunKind::Sweep: m["run.kind"] = "sweep"; break;
        case RunKind::Validate: m["run.kind"] = "validate"; break;
    }
    m["output.dir"] = out_dir;
    switch (model.kind) {
        case ProcessKind::GBM: m["model.kind"] = "gbm"; break;
        case ProcessKind::ABM: m["model.kind"] = "abm"; break;
        case ProcessKind::OU: m["model.kind"] = "ou"; break;
    }
    m["model.mu"] = fmt_double(model.mu);
    m["model.sigma"] = fmt_double(model.sigma);
    if (model.kind == ProcessKind::OU) {
        m["model.ou_rate"] = fmt_double(model.ou_rate);
        m["model.ou_mean"] = fmt_double(model.ou_mean);
    }
    switch (impact.kind) {
        case ImpactKind::Exponential: m["impact.kind"] = "exp"; break;
        case ImpactKind::Linear: m["impact.kind"] = "linear"; break;
        case ImpactKind::None: m["impact.kind"] = "none"; break;
    }
    m["impact.lambda"] = fmt_double(impact.lambda);
    m["grid.x_max"] = fmt_double(grid.x_max);
    m["grid.p_max"] = fmt_double(grid.p_max);
    m["grid.nx"] = std::to_string(grid.nx);
    m["grid.np"] = std::to_string(grid.np);
    m["grid.closure"] =
        grid.closure == UpperClosure::DirichletW ? "dirichlet_w" : "extrapolate";
    m["solver.kind"] = solver.kind == SolverKind::Impulse ? "impulse" : "singular";
    m["solver.beta"] = fmt_double(solver.beta);
    m["solver.k"] = fmt_double(solver.k);
    m["solver.tol"] = fmt_double(solver.tol);
    m["solver.max_outer"] = std::to_string(solver.max_outer);
    m["solver.max_inner"] = std::to_string(solver.max_inner);
    m["solver.max_iter"] = std::to_string(solver.max_iter);
    m["solver.omega"] = fmt_double(solver.omega);
    m["solver.tol_region"] = fmt_double(solver.tol_region);
    m["sim.paths"] = std::to_string(sim.paths);
    m["sim.dt"] = fmt_double(sim.dt);
    m["sim.horizon"] = fmt_double(sim.horizon);
    m["sim.seed"] = std::to_string(sim.seed);
    m["sim.antithetic"] = sim.antithetic ? "true" : "false";
    m["sim.u_cap"] = fmt_double(sim.u_cap);
    m["sim.x0"] = fmt_double(sim.x0);
    m["sim.p0"] = fmt_double(sim.p0);
    m["sim.strategy"] = sim.strategy == SimStrategy::Policy ? "policy" : "constant_rate";
    m["sim.rate"] = fmt_double(sim.rate);
    if (kind == RunKind::Sweep) {
        m["sweep.parameter"] = sweep.parameter;
        std::string vals;
        for (std::size_t i = 0; i < sweep.values.size(); ++i) {
            if (i) vals += ", ";
            vals += fmt_double(sweep.values[i]);
        }
        m["sweep.values"] = vals;
        m["sweep.probe_x"] = fmt_double(sweep.probe_x);
        m["sweep.probe_p"] = fmt_double(sweep.probe_p);
    }
    return m;
}

}  // namespace optex
