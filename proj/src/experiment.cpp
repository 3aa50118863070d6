#include "freqlab/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace freqlab {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing required key '" + key + "'");
    return *it;
}

double num(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) throw ConfigError(where + ": '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double def) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return it->get<double>();
}

int int_or(const json& j, const char* key, int def) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    return it->get<int>();
}

bool bool_or(const json& j, const char* key, bool def) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_boolean()) throw ConfigError(std::string("'") + key + "' must be a boolean");
    return it->get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& def) {
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<double> num_list(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_array()) throw ConfigError(where + ": '" + std::string(key) + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + ": '" + std::string(key) + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string timestamp_now() {
    const auto t = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

DataProfile profile_from(const std::string& name) {
    if (name == "power_law") return DataProfile::power_law;
    if (name == "power_law_loglog") return DataProfile::power_law_loglog;
    throw ConfigError("unknown data profile '" + name + "'");
}

} // namespace

Equation equation_from_json(const json& j) {
    const std::string id = require(j, "equation", "params").get<std::string>();
    int def_dim = 1;
    if (id == "mzk" || id == "mzk-sym2d" || id == "nls-cubic" || id == "nls-quintic") def_dim = 2;
    const int dim = int_or(j, "dim", def_dim);
    try {
        return make_equation(id, dim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

SublevelSpec spec_from_json(const json& j) {
    check_keys(j,
               {"named", "sign", "s", "epsilon", "box", "comparability", "family", "equation",
                "dim", "fixed_set", "dependent", "weight", "region", "estimator", "samples",
                "grid_points", "restarts", "alpha_scale", "ascent_rounds"},
               "spec");
    SublevelSpec sp;
    const std::string named = str_or(j, "named", "");
    const double box = num_or(j, "box", 10.0);
    if (!named.empty()) {
        if (named == "quad1d") {
            sp = spec_quad1d(box);
        } else if (named == "quad2d") {
            sp = spec_quad2d(int_or(j, "sign", 1), box);
        } else if (named == "mkdv-region") {
            sp = spec_mkdv_region(num(j, "s", "spec"), box, num_or(j, "comparability", 0.25));
        } else if (named == "symzk-comparable") {
            sp = spec_symzk_comparable(num(j, "s", "spec"), num_or(j, "epsilon", 0.0), box);
        } else if (named == "symzk-separated") {
            sp = spec_symzk_separated(num(j, "s", "spec"), num_or(j, "epsilon", 0.0), box);
        } else if (named == "nls2d-pairing") {
            sp = spec_nls2d_pairing(num(j, "s", "spec"), num_or(j, "epsilon", 0.0), box);
        } else if (named == "kdv4-comparable") {
            sp = spec_kdv4_comparable(num(j, "s", "spec"), num_or(j, "epsilon", 0.0), box);
        } else {
            throw ConfigError("unknown named spec '" + named + "'");
        }
    } else {
        const std::string family = str_or(j, "family", "quad1d");
        if (family == "quad1d") {
            sp = spec_quad1d(box);
        } else if (family == "quad2d+") {
            sp = spec_quad2d(1, box);
        } else if (family == "quad2d-") {
            sp = spec_quad2d(-1, box);
        } else if (family == "equation") {
            sp.family = PhaseFamily::equation;
            sp.eq = equation_from_json(j);
            sp.eq->nonlin.s = num_or(j, "s", 0.0);
            sp.eq->nonlin.epsilon = num_or(j, "epsilon", 0.0);
            sp.box = box;
            const json& fixed = require(j, "fixed_set", "spec");
            for (const auto& e : fixed) sp.fixed_set.push_back(e.get<int>());
            sp.dependent = int_or(j, "dependent", -1);
            if (j.contains("weight")) {
                const json& w = j["weight"];
                check_keys(w, {"mode", "factors"}, "spec.weight");
                const std::string mode = str_or(w, "mode", "none");
                if (mode == "none") sp.weight.mode = EstimateWeightMode::none;
                else if (mode == "m1") sp.weight.mode = EstimateWeightMode::m1;
                else if (mode == "m2") sp.weight.mode = EstimateWeightMode::m2;
                else throw ConfigError("unknown weight mode '" + mode + "'");
                if (w.contains("factors")) {
                    for (const auto& f : w["factors"]) {
                        check_keys(f, {"index", "jap_pow", "abs_pow"}, "spec.weight.factors");
                        sp.weight.factors.push_back({int_or(f, "index", 0), num_or(f, "jap_pow", 0.0),
                                                     num_or(f, "abs_pow", 0.0)});
                    }
                }
            }
            if (j.contains("region")) {
                for (const auto& r : j["region"]) {
                    check_keys(r, {"kind", "i", "j", "c"}, "spec.region");
                    const std::string kind = require(r, "kind", "spec.region").get<std::string>();
                    RegionClause cl;
                    if (kind == "comparable_abs") cl.kind = RegionClause::Kind::comparable_abs;
                    else if (kind == "ratio_le") cl.kind = RegionClause::Kind::ratio_le;
                    else if (kind == "ratio_ge") cl.kind = RegionClause::Kind::ratio_ge;
                    else if (kind == "sepprod_ge") cl.kind = RegionClause::Kind::sepprod_ge;
                    else if (kind == "sepprod_le") cl.kind = RegionClause::Kind::sepprod_le;
                    else if (kind == "abs_ge") cl.kind = RegionClause::Kind::abs_ge;
                    else if (kind == "abs_le") cl.kind = RegionClause::Kind::abs_le;
                    else throw ConfigError("unknown region clause '" + kind + "'");
                    cl.i = int_or(r, "i", 0);
                    cl.j = int_or(r, "j", 0);
                    cl.c = num_or(r, "c", 0.0);
                    sp.region.clauses.push_back(cl);
                }
            }
        } else {
            throw ConfigError("unknown spec family '" + family + "'");
        }
    }
    const std::string est = str_or(j, "estimator", "mc");
    if (est == "mc") sp.estimator = Estimator::mc;
    else if (est == "grid") sp.estimator = Estimator::grid;
    else throw ConfigError("unknown estimator '" + est + "'");
    sp.samples = int_or(j, "samples", sp.samples);
    sp.grid_points = int_or(j, "grid_points", sp.grid_points);
    sp.restarts = int_or(j, "restarts", sp.restarts);
    sp.alpha_scale = num_or(j, "alpha_scale", sp.alpha_scale);
    sp.ascent_rounds = int_or(j, "ascent_rounds", sp.ascent_rounds);
    try {
        validate_spec(sp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return sp;
}

PhaseChart chart_from_json(const Equation& eq, const json& j) {
    check_keys(j, {"free", "dependent", "fixed"}, "chart");
    std::vector<int> free_idx;
    for (const auto& e : require(j, "free", "chart")) free_idx.push_back(e.get<int>());
    const int dep = require(j, "dependent", "chart").get<int>();
    std::vector<std::pair<int, Vec>> fixed;
    if (j.contains("fixed")) {
        for (auto it = j["fixed"].begin(); it != j["fixed"].end(); ++it) {
            Vec v(eq.dim);
            int a = 0;
            for (const auto& e : it.value()) v[a++] = e.get<double>();
            fixed.push_back({std::stoi(it.key()), v});
        }
    }
    try {
        return make_chart(eq, free_idx, dep, fixed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const json& raw) {
    check_keys(raw, {"schema_version", "kind", "seed", "threads", "out", "params"}, "config");
    ExperimentConfig cfg;
    const json& sv = require(raw, "schema_version", "config");
    if (!sv.is_number_integer() || sv.get<int>() != kSchemaVersion)
        throw ConfigError("unsupported schema_version (expected 1)");
    cfg.kind = require(raw, "kind", "config").get<std::string>();
    cfg.seed = raw.contains("seed") ? raw["seed"].get<uint64_t>() : 1;
    cfg.threads = int_or(raw, "threads", 1);
    cfg.out = str_or(raw, "out", "");
    cfg.params = raw.contains("params") ? raw["params"] : json::object();

    const std::string& k = cfg.kind;
    const json& p = cfg.params;
    if (k == "sublevel") {
        check_keys(p, {"spec", "alpha", "M", "fixed"}, "params");
        spec_from_json(require(p, "spec", "params"));
        num(p, "alpha", "params");
        if (num(p, "M", "params") <= 0) throw ConfigError("M must be positive");
    } else if (k == "beta_fit") {
        check_keys(p, {"spec", "m_lo", "m_hi", "hints"}, "params");
        spec_from_json(require(p, "spec", "params"));
        const int lo = int_or(p, "m_lo", 1), hi = int_or(p, "m_hi", 12);
        if (hi - lo + 1 < 6) throw ConfigError("need at least 6 dyadic levels");
        if (lo < 1) throw ConfigError("dyadic levels must exceed 1");
    } else if (k == "resonance_atlas") {
        check_keys(p, {"equation", "dim", "chart", "seeds_per_axis", "rank_tol", "seed_lo", "seed_hi"},
                   "params");
        Equation eq = equation_from_json(p);
        chart_from_json(eq, require(p, "chart", "params"));
    } else if (k == "morse_check") {
        check_keys(p, {"equation", "dim", "chart", "point", "radius", "samples"}, "params");
        Equation eq = equation_from_json(p);
        chart_from_json(eq, require(p, "chart", "params"));
        num_list(p, "point", "params");
        if (num(p, "radius", "params") <= 0) throw ConfigError("radius must be positive");
    } else if (k == "tau_bound") {
        check_keys(p, {"b", "a1_values", "a2_values"}, "params");
        if (num(p, "b", "params") <= 0.5) throw ConfigError("b must exceed 1/2");
        num_list(p, "a1_values", "params");
        num_list(p, "a2_values", "params");
    } else if (k == "discrete_multilinear") {
        check_keys(p, {"equation", "dim", "s", "epsilon", "grid_size", "trials"}, "params");
        equation_from_json(p);
        if (int_or(p, "grid_size", 32) < 4) throw ConfigError("grid_size too small");
    } else if (k == "solve") {
        check_keys(p, {"equation", "dim", "n", "L", "T", "steps", "linear_only", "renormalized",
                       "initial"},
                   "params");
        equation_from_json(p);
        if (int_or(p, "n", 64) < 16) throw ConfigError("n must be at least 16");
        const json& init = require(p, "initial", "params");
        check_keys(init, {"kind", "s", "amplitude", "profile", "mode"}, "params.initial");
        const std::string ik = require(init, "kind", "params.initial").get<std::string>();
        if (ik != "rough" && ik != "single_mode") throw ConfigError("unknown initial kind");
    } else if (k == "smoothing_scan") {
        check_keys(p, {"equation", "dim", "s", "eps_grid", "resolutions", "t", "trials", "amplitude",
                       "profile", "steps", "renormalized"},
                   "params");
        equation_from_json(p);
        const auto eps = num_list(p, "eps_grid", "params");
        if (eps.empty()) throw ConfigError("eps_grid must be nonempty");
        for (double e : eps)
            if (e < 0 || e > 1.2) throw ConfigError("eps_grid values must lie in [0, 1.2]");
        const auto res = num_list(p, "resolutions", "params");
        if (res.size() < 3) throw ConfigError("need at least 3 resolutions");
        if (int_or(p, "trials", 5) < 3) throw ConfigError("need at least 3 trials");
    } else {
        throw ConfigError("unknown experiment kind '" + k + "'");
    }

    cfg.resolved = raw;
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json raw;
    try {
        f >> raw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(raw);
}

// ---------------------------------------------------------------------------
// artifact writers

namespace {

std::string csv_row(const std::vector<std::string>& cells) {
    std::string s;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ",";
        s += cells[i];
    }
    s += "\n";
    return s;
}

void write_manifest(const std::string& dir, const ExperimentConfig& cfg) {
    json m;
    m["tool"] = kToolVersion;
    m["timestamp"] = timestamp_now();
    m["config"] = cfg.resolved;
    write_text_file(dir + "/manifest.json", m.dump(2) + "\n");
}

json beta_fit_to_json(const BetaFit& fit) {
    json s;
    s["beta"] = fit.beta;
    s["r2"] = fit.r2;
    s["intercept"] = fit.intercept;
    s["low_confidence"] = fit.low_confidence;
    s["monotone"] = fit.monotone;
    json lv = json::array();
    for (const auto& l : fit.levels) {
        json e;
        e["M"] = l.M;
        e["value"] = l.value;
        e["stderr"] = l.stderr_est;
        e["witness"] = l.witness;
        e["low_confidence"] = l.low_confidence;
        e["witness_at_edge"] = l.witness_at_edge;
        lv.push_back(e);
    }
    s["levels"] = lv;
    return s;
}

std::string beta_fit_to_csv(const BetaFit& fit) {
    std::string csv = "M,sup_value,stderr,low_confidence,witness_at_edge,witness\n";
    for (const auto& l : fit.levels) {
        std::vector<std::string> row{format_double(l.M), format_double(l.value),
                                     format_double(l.stderr_est), l.low_confidence ? "1" : "0",
                                     l.witness_at_edge ? "1" : "0"};
        std::string w;
        for (size_t i = 0; i < l.witness.size(); ++i) {
            if (i) w += ";";
            w += format_double(l.witness[i]);
        }
        row.push_back(w);
        csv += csv_row(row);
    }
    return csv;
}

json atlas_to_json(const AtlasResult& atlas, double rank_tol) {
    json out = json::array();
    for (const auto& p : atlas.points) {
        json e;
        e["location"] = p.location;
        e["value"] = p.value;
        e["grad_norm"] = p.grad_norm;
        e["eigenvalues"] = p.eigenvalues;
        e["rank"] = p.numerical_rank;
        e["signature"] = {p.n_pos, p.n_neg, p.n_zero};
        switch (classify(p, rank_tol)) {
            case MorseClass::nondegenerate: e["class"] = "nondegenerate"; break;
            case MorseClass::semi_nondegenerate: e["class"] = "semi_nondegenerate"; break;
            case MorseClass::degenerate: e["class"] = "degenerate"; break;
        }
        e["newton_iters"] = p.newton_iters;
        out.push_back(e);
    }
    return out;
}

SpectralState initial_from_json(const Equation& eq, const Grid& g, const json& init, uint64_t seed) {
    const std::string kind = init["kind"].get<std::string>();
    if (kind == "rough") {
        RoughDataSpec rd;
        rd.s = num_or(init, "s", 1.0);
        rd.amplitude = num_or(init, "amplitude", 0.1);
        rd.profile = profile_from(str_or(init, "profile", "power_law_loglog"));
        rd.seed = seed;
        return make_rough_data(rd, g, eq);
    }
    // single mode
    SpectralState s = SpectralState::zero(g);
    int m[3] = {0, 0, 0};
    int a = 0;
    for (const auto& e : init["mode"]) m[a++] = e.get<int>();
    const double amp = num_or(init, "amplitude", 1.0);
    s.coeffs[static_cast<size_t>(encode_modes(g, m))] = amp;
    if (eq.real_field) {
        for (int ax = 0; ax < g.dim; ++ax) m[ax] = -m[ax];
        s.coeffs[static_cast<size_t>(encode_modes(g, m))] = amp;
    }
    return s;
}

} // namespace

std::string run_experiment(const ExperimentConfig& cfg, const std::string& out_root, bool force) {
    std::string dir = cfg.out;
    if (dir.empty()) {
        std::string root = out_root;
        if (root.empty()) {
            if (const char* env = std::getenv(kOutputRootEnv)) root = env;
            else root = "runs";
        }
        dir = root + "/" + cfg.kind + "-seed" + std::to_string(cfg.seed);
    }
    if (fs::exists(dir)) {
        if (!force) throw ConfigError("output directory exists (pass --force to overwrite): " + dir);
        fs::remove_all(dir);
    }
    fs::create_directories(dir);

    const json& p = cfg.params;
    const std::string& k = cfg.kind;

    if (k == "sublevel") {
        SublevelSpec sp = spec_from_json(p["spec"]);
        std::vector<double> fixed;
        if (p.contains("fixed"))
            for (const auto& e : p["fixed"]) fixed.push_back(e.get<double>());
        IntegralResult r =
            sublevel_integral(sp, p["alpha"].get<double>(), fixed, p["M"].get<double>(), cfg.seed);
        json s;
        s["value"] = r.value;
        s["stderr"] = r.stderr_est;
        s["low_confidence"] = r.low_confidence;
        write_text_file(dir + "/summary.json", s.dump(2) + "\n");
    } else if (k == "beta_fit") {
        SublevelSpec sp = spec_from_json(p["spec"]);
        const int lo = int_or(p, "m_lo", 1), hi = int_or(p, "m_hi", 12);
        std::vector<std::vector<double>> hints;
        if (p.contains("hints"))
            for (const auto& h : p["hints"]) hints.push_back(h.get<std::vector<double>>());
        BetaFit fit = fit_beta(sp, dyadic_levels(lo, hi), cfg.seed, hints);
        write_text_file(dir + "/results.csv", beta_fit_to_csv(fit));
        write_text_file(dir + "/summary.json", beta_fit_to_json(fit).dump(2) + "\n");
    } else if (k == "resonance_atlas") {
        Equation eq = equation_from_json(p);
        PhaseChart chart = chart_from_json(eq, p["chart"]);
        CriticalPointSearch opts;
        opts.seeds_per_axis = int_or(p, "seeds_per_axis", 9);
        opts.rank_tol = num_or(p, "rank_tol", 1e-6);
        opts.seed_lo = num_or(p, "seed_lo", -1.5);
        opts.seed_hi = num_or(p, "seed_hi", 1.5);
        AtlasResult atlas = find_critical_points(chart, opts);
        json s;
        s["equation"] = eq.id;
        s["points"] = atlas_to_json(atlas, opts.rank_tol);
        s["seeds_total"] = atlas.seeds_total;
        s["seeds_diverged"] = atlas.seeds_diverged;
        write_text_file(dir + "/atlas.json", s.dump(2) + "\n");
    } else if (k == "morse_check") {
        Equation eq = equation_from_json(p);
        PhaseChart chart = chart_from_json(eq, p["chart"]);
        std::vector<double> point = p["point"].get<std::vector<double>>();
        MorseWindowOptions mo;
        mo.seed = cfg.seed;
        if (p.contains("samples")) mo.samples = p["samples"].get<long>();
        MorseWindow w = morse_window_check(chart, point, p["radius"].get<double>(), mo);
        json s;
        s["exponent"] = w.exponent;
        s["r2"] = w.r2;
        s["radius_used"] = w.radius_used;
        s["model_exponent"] = w.model_exponent;
        s["levels_used"] = w.levels_used;
        write_text_file(dir + "/summary.json", s.dump(2) + "\n");
    } else if (k == "tau_bound") {
        const double b = p["b"].get<double>();
        const auto a1s = p["a1_values"].get<std::vector<double>>();
        const auto a2s = p["a2_values"].get<std::vector<double>>();
        std::string csv = "a1,a2,integral,bound_ratio\n";
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0;
        for (double a1 : a1s) {
            for (double a2 : a2s) {
                TauBound tb = tau_convolution_bound(a1, a2, b);
                csv += csv_row({format_double(a1), format_double(a2), format_double(tb.integral),
                                format_double(tb.bound_ratio)});
                rmin = std::min(rmin, tb.bound_ratio);
                rmax = std::max(rmax, tb.bound_ratio);
            }
        }
        write_text_file(dir + "/results.csv", csv);
        json s;
        s["b"] = b;
        s["min_ratio"] = rmin;
        s["max_ratio"] = rmax;
        s["max_over_min"] = rmax / rmin;
        write_text_file(dir + "/summary.json", s.dump(2) + "\n");
    } else if (k == "discrete_multilinear") {
        Equation eq = equation_from_json(p);
        MultilinearCheck mc = discrete_multilinear_check(
            eq, num_or(p, "s", 0.0), num_or(p, "epsilon", 0.0), int_or(p, "grid_size", 32),
            int_or(p, "trials", 20), cfg.seed);
        json s;
        s["max_ratio"] = mc.max_ratio;
        s["ratios"] = mc.ratios;
        write_text_file(dir + "/summary.json", s.dump(2) + "\n");
    } else if (k == "solve") {
        Equation eq = equation_from_json(p);
        Grid g{eq.dim, int_or(p, "n", 64), num_or(p, "L", 1.0)};
        SpectralState u0 = initial_from_json(eq, g, p["initial"], cfg.seed);
        SolveOptions so;
        so.steps = int_or(p, "steps", 0);
        so.linear_only = bool_or(p, "linear_only", false);
        so.renormalized = bool_or(p, "renormalized", false);
        SpectralState u = solve(eq, u0, num(p, "T", "params"), so);
        write_checkpoint(u0, dir + "/initial.bin");
        write_checkpoint(u, dir + "/state.bin");
        json s;
        s["equation"] = eq.id;
        s["dim"] = g.dim;
        s["n"] = g.n;
        s["L"] = g.L;
        s["time"] = u.time;
        s["mass"] = mass(u);
        s["l2"] = sobolev_norm(u, 0.0);
        write_text_file(dir + "/state.json", s.dump(2) + "\n");
    } else if (k == "smoothing_scan") {
        Equation eq = equation_from_json(p);
        SmoothingOptions so;
        so.t = num_or(p, "t", 0.5);
        so.trials = int_or(p, "trials", 5);
        so.amplitude = num_or(p, "amplitude", 0.1);
        so.profile = profile_from(str_or(p, "profile", "power_law_loglog"));
        so.steps = int_or(p, "steps", 0);
        so.renormalized = bool_or(p, "renormalized", true);
        so.seed = cfg.seed;
        so.threads = cfg.threads;
        std::vector<int> res;
        for (const auto& e : p["resolutions"]) res.push_back(e.get<int>());
        SmoothingReport rep = smoothing_scan(eq, num(p, "s", "params"),
                                             p["eps_grid"].get<std::vector<double>>(), res, so);
        std::string csv = "eps,n,median_residual_norm\n";
        for (size_t ei = 0; ei < rep.eps_grid.size(); ++ei)
            for (size_t ri = 0; ri < rep.resolutions.size(); ++ri)
                csv += csv_row({format_double(rep.eps_grid[ei]),
                                std::to_string(rep.resolutions[ri]),
                                format_double(rep.residual_norms[ei][ri])});
        write_text_file(dir + "/results.csv", csv);
        json s;
        s["equation"] = rep.equation;
        s["s"] = rep.s;
        s["t"] = rep.t;
        s["eps_grid"] = rep.eps_grid;
        s["resolutions"] = rep.resolutions;
        json verdicts = json::array();
        for (size_t ei = 0; ei < rep.eps_grid.size(); ++ei) {
            json v;
            v["eps"] = rep.eps_grid[ei];
            v["verdict"] = verdict_name(rep.verdicts[ei]);
            v["monotonicity_flagged"] = static_cast<bool>(rep.monotonicity_flagged[ei]);
            v["norms"] = rep.residual_norms[ei];
            verdicts.push_back(v);
        }
        s["verdicts"] = verdicts;
        s["cells_aborted"] = rep.cells_aborted;
        write_text_file(dir + "/summary.json", s.dump(2) + "\n");
    } else {
        throw ConfigError("unknown experiment kind '" + k + "'");
    }

    write_manifest(dir, cfg);
    return dir;
}

} // namespace freqlab
