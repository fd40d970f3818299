// Run configuration parsing (flat key = value text with sections), field
// snapshot export/import, JSON emission for reports, and the grid-keyed
// constants cache.
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "normdirac/verify.hpp"

namespace normdirac {

using json = nlohmann::json;

// ---------------------------------------------------------------------
// Config file: [section] headers, key = value lines, '#' comments.

struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse_string(const std::string& text) {
        ConfigFile cf;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                cf.sections[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty key or value");
            cf.sections[section][key] = value;
        }
        return cf;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str());
    }

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key);
    }
    std::string get(const std::string& sec, const std::string& key,
                    const std::string& fallback) const {
        auto s = sections.find(sec);
        if (s == sections.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }
    double get_double(const std::string& sec, const std::string& key,
                      double fallback) const {
        if (!has(sec, key)) return fallback;
        const std::string v = get(sec, key, "");
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config value [" + sec + "] " + key +
                              " is not a number: " + v);
        }
    }
    long get_int(const std::string& sec, const std::string& key, long fallback) const {
        if (!has(sec, key)) return fallback;
        const std::string v = get(sec, key, "");
        try {
            std::size_t used = 0;
            const long x = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("config value [" + sec + "] " + key +
                              " is not an integer: " + v);
        }
    }
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const {
        if (!has(sec, key)) return fallback;
        const std::string v = get(sec, key, "");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config value [" + sec + "] " + key + " is not a boolean");
    }
    std::vector<double> get_list(const std::string& sec, const std::string& key,
                                 std::vector<double> fallback) const {
        if (!has(sec, key)) return fallback;
        std::vector<double> out;
        std::istringstream ss(get(sec, key, ""));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("config value [" + sec + "] " + key +
                                  " has a non-numeric entry: " + item);
            }
        }
        if (out.empty())
            throw ConfigError("config value [" + sec + "] " + key + " is empty");
        return out;
    }
};

// Everything a run needs, assembled from the config file; gamma may be
// given directly or as a fraction of the grid's gamma0.
struct RunConfig {
    GridSpec grid{16, 16.0, 1.0};
    NonlinearitySpec nonlinearity{0.01, 0.0, 2.5};
    double gamma_value = -1.0;
    double gamma_fraction = -1.0;
    SolveConfig solve;
    AscentOptions ascent;
    bool recompute_constants = false;
    ScorecardOptions scorecard;
    std::vector<double> sweep_epsilons = {0.4, 0.2, 0.1, 0.05};
    int sweep_n = 32;
    double sweep_box_scale = 24.0;
    std::vector<double> sweep_lambdas = {0.25, 0.5, 0.75, 1.0};
    std::string seed_field_path;

    double resolve_gamma(double gamma0) const {
        if (gamma_value >= 0.0) return gamma_value;
        if (gamma_fraction >= 0.0) return gamma_fraction * gamma0;
        return 0.0;
    }
};

inline RunConfig load_run_config(const ConfigFile& cf) {
    static const std::map<std::string, std::vector<std::string>> known = {
        {"grid", {"n", "box_length", "mass"}},
        {"nonlinearity",
         {"a", "b", "alpha", "delta_reg", "nu", "xi_exponent", "rho", "R"}},
        {"solve",
         {"gamma", "gamma_fraction_of_gamma0", "lambda", "tol_inner", "tol_outer",
          "residual_target", "max_outer_iterations", "max_inner_iterations",
          "seed_profile", "seed_epsilon", "seed_field", "rng_seed"}},
        {"constants", {"ascent_iterations", "ascent_starts", "recompute"}},
        {"verify",
         {"concavity_pairs", "concavity_dirs", "deficit_epsilons",
          "subadditivity_lambda", "subadditivity_theta", "include_subadditivity"}},
        {"sweep", {"epsilons", "lambdas", "n", "box_scale"}}};
    for (const auto& [sec, keys] : cf.sections) {
        auto it = known.find(sec);
        if (it == known.end()) throw ConfigError("unknown config section [" + sec + "]");
        for (const auto& [key, value] : keys) {
            (void)value;
            if (std::find(it->second.begin(), it->second.end(), key) ==
                it->second.end())
                throw ConfigError("unknown config key [" + sec + "] " + key);
        }
    }

    RunConfig rc;
    rc.grid = GridSpec(static_cast<int>(cf.get_int("grid", "n", 16)),
                       cf.get_double("grid", "box_length", 16.0),
                       cf.get_double("grid", "mass", 1.0));
    {
        NonlinearitySpec f(cf.get_double("nonlinearity", "a", 0.01),
                           cf.get_double("nonlinearity", "b", 0.0),
                           cf.get_double("nonlinearity", "alpha", 2.5),
                           cf.get_double("nonlinearity", "delta_reg", 0.0),
                           cf.get_double("nonlinearity", "nu", 0.0));
        f.xi_exponent = cf.get_double("nonlinearity", "xi_exponent", f.xi_exponent);
        f.rho = cf.get_double("nonlinearity", "rho", f.rho);
        f.big_R = cf.get_double("nonlinearity", "R", f.big_R);
        f.validate();
        rc.nonlinearity = f;
    }

    if (cf.has("solve", "gamma")) rc.gamma_value = cf.get_double("solve", "gamma", 0.0);
    if (cf.has("solve", "gamma_fraction_of_gamma0"))
        rc.gamma_fraction = cf.get_double("solve", "gamma_fraction_of_gamma0", 0.0);
    if (rc.gamma_value >= 0.0 && rc.gamma_fraction >= 0.0)
        throw ConfigError("give either gamma or gamma_fraction_of_gamma0, not both");
    if (rc.gamma_value < 0.0 && rc.gamma_fraction < 0.0) rc.gamma_value = 0.0;

    rc.solve.grid = rc.grid;
    rc.solve.nonlinearity = rc.nonlinearity;
    rc.solve.lambda = cf.get_double("solve", "lambda", 1.0);
    rc.solve.tol_inner = cf.get_double("solve", "tol_inner", 1e-10);
    rc.solve.tol_outer = cf.get_double("solve", "tol_outer", 1e-8);
    rc.solve.residual_target = cf.get_double("solve", "residual_target", 1e-6);
    rc.solve.max_outer_iterations =
        static_cast<int>(cf.get_int("solve", "max_outer_iterations", 5000));
    rc.solve.max_inner_iterations =
        static_cast<int>(cf.get_int("solve", "max_inner_iterations", 2000));
    rc.solve.seed.epsilon = cf.get_double("solve", "seed_epsilon", 0.5);
    rc.solve.rng_seed = static_cast<std::uint64_t>(cf.get_int("solve", "rng_seed", 1));
    const std::string profile = cf.get("solve", "seed_profile", "gaussian");
    if (profile != "gaussian")
        throw ConfigError("unknown seed_profile: " + profile);
    rc.seed_field_path = cf.get("solve", "seed_field", "");

    rc.ascent.iterations =
        static_cast<int>(cf.get_int("constants", "ascent_iterations", 200));
    rc.ascent.starts = static_cast<int>(cf.get_int("constants", "ascent_starts", 8));
    rc.recompute_constants = cf.get_bool("constants", "recompute", false);

    rc.scorecard.concavity_pairs =
        static_cast<int>(cf.get_int("verify", "concavity_pairs", 20));
    rc.scorecard.concavity_dirs =
        static_cast<int>(cf.get_int("verify", "concavity_dirs", 10));
    rc.scorecard.deficit_epsilons =
        cf.get_list("verify", "deficit_epsilons",
                    {0.4, 0.2, 0.1, 0.05, 0.02, 0.01});
    rc.scorecard.subadditivity_lambda =
        cf.get_double("verify", "subadditivity_lambda", 0.5);
    rc.scorecard.subadditivity_theta =
        cf.get_double("verify", "subadditivity_theta", 1.5);
    rc.scorecard.include_subadditivity =
        cf.get_bool("verify", "include_subadditivity", true);

    rc.sweep_epsilons = cf.get_list("sweep", "epsilons", rc.sweep_epsilons);
    rc.sweep_lambdas = cf.get_list("sweep", "lambdas", rc.sweep_lambdas);
    rc.sweep_n = static_cast<int>(cf.get_int("sweep", "n", rc.sweep_n));
    rc.sweep_box_scale = cf.get_double("sweep", "box_scale", rc.sweep_box_scale);
    return rc;
}

// ---------------------------------------------------------------------
// Field snapshots.

inline void export_field_csv(const SpinorField& u, const std::string& path) {
    const SpinorField up = in_representation(u, Representation::position);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x,y,z,re0,im0,re1,im1,re2,im2,re3,im3\n";
    out << std::setprecision(17);
    const int n = u.grid().n_per_axis;
    const double h = u.grid().spacing();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                out << ix * h << ',' << iy * h << ',' << iz * h;
                const C4 v = up.spinor(up.site_index(ix, iy, iz));
                for (int c = 0; c < 4; ++c)
                    out << ',' << v[c].real() << ',' << v[c].imag();
                out << '\n';
            }
}

// One JSON header line, then raw little-endian doubles, row-major sites
// (x outermost, z innermost), components fastest, re/im interleaved.
inline void export_field_binary(const SpinorField& u, const std::string& path) {
    json header = {{"format", "normdirac-field"},
                   {"version", 1},
                   {"n", u.grid().n_per_axis},
                   {"box_length", u.grid().box_length},
                   {"mass", u.grid().mass},
                   {"representation",
                    u.representation() == Representation::position ? "position"
                                                                   : "frequency"},
                   {"endianness", "little"},
                   {"doubles", 8 * u.site_count()}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << header.dump() << '\n';
    static_assert(sizeof(Complex) == 2 * sizeof(double));
    out.write(reinterpret_cast<const char*>(u.data()),
              static_cast<std::streamsize>(sizeof(Complex) * 4 * u.site_count()));
}

inline SpinorField import_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header_line;
    std::getline(in, header_line);
    const json header = json::parse(header_line);
    if (header.value("format", "") != "normdirac-field")
        throw std::runtime_error("not a field snapshot: " + path);
    GridSpec grid(header.at("n").get<int>(), header.at("box_length").get<double>(),
                  header.at("mass").get<double>());
    const Representation rep = header.at("representation").get<std::string>() ==
                                       "position"
                                   ? Representation::position
                                   : Representation::frequency;
    SpinorField u(grid, rep);
    in.read(reinterpret_cast<char*>(u.data()),
            static_cast<std::streamsize>(sizeof(Complex) * 4 * u.site_count()));
    if (!in) throw std::runtime_error("truncated field snapshot: " + path);
    if (!u.is_finite()) throw std::runtime_error("non-finite field snapshot: " + path);
    return u;
}

// ---------------------------------------------------------------------
// JSON emission.

inline json to_json(const ConstantsTable& t) {
    json s = json::object();
    json spread = json::object();
    for (const auto& [q, v] : t.S) {
        std::ostringstream key;
        key << std::setprecision(12) << q;
        s[key.str()] = v;
        auto it = t.spread.find(q);
        if (it != t.spread.end()) spread[key.str()] = it->second;
    }
    return {{"grid_fingerprint", t.grid_fingerprint},
            {"n", t.n_per_axis},
            {"box_length", t.box_length},
            {"mass", t.mass},
            {"alpha", t.alpha},
            {"mu", t.mu},
            {"delta", t.delta},
            {"delta_converged", t.delta_converged},
            {"sobolev", s},
            {"sobolev_spread", spread},
            {"gamma0", t.gamma0()}};
}

inline ConstantsTable constants_from_json(const json& j) {
    ConstantsTable t;
    t.grid_fingerprint = j.at("grid_fingerprint").get<std::string>();
    t.n_per_axis = j.at("n").get<int>();
    t.box_length = j.at("box_length").get<double>();
    t.mass = j.at("mass").get<double>();
    t.alpha = j.at("alpha").get<double>();
    t.mu = j.at("mu").get<double>();
    t.delta = j.at("delta").get<double>();
    t.delta_converged = j.at("delta_converged").get<bool>();
    for (const auto& [key, value] : j.at("sobolev").items())
        t.S[std::stod(key)] = value.get<double>();
    for (const auto& [key, value] : j.at("sobolev_spread").items())
        t.spread[std::stod(key)] = value.get<double>();
    return t;
}

inline json to_json(const AdmissibilityReport& r) {
    return {{"gamma", r.gamma},
            {"margin_bound_1_16", r.margin1},
            {"margin_bound_1_4", r.margin2},
            {"gamma0", r.gamma0},
            {"admissible", r.admissible},
            {"grid_fingerprint", r.grid_fingerprint}};
}

inline json to_json(const HypothesisReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"worst_margin", c.worst_margin},
                          {"note", c.note}});
    json h7 = json::object();
    for (const auto& [zeta, c] : r.h7_constants) {
        std::ostringstream key;
        key << zeta;
        h7[key.str()] = c;
    }
    return {{"checks", checks},
            {"all_pass", r.all_pass},
            {"smallest_R", r.smallest_R},
            {"h7_constants", h7}};
}

inline json to_json(const CheckResult& c) {
    return {{"name", c.name},     {"inputs", c.inputs},
            {"lhs", c.lhs},       {"rhs", c.rhs},
            {"margin", c.margin}, {"tolerance", c.tolerance},
            {"pass", c.pass},     {"conclusive", c.conclusive},
            {"note", c.note}};
}

inline json to_json(const NamedCheck& c) {
    return {{"name", c.name},
            {"pass", c.pass},
            {"value", c.value},
            {"bound", c.bound},
            {"note", c.note}};
}

inline json to_json(const SolveReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"E", r.E_value},
            {"omega", r.omega},
            {"residual", r.residual},
            {"omega_lower", r.omega_bounds.first},
            {"omega_upper", r.omega_bounds.second},
            {"lambda", r.lambda},
            {"gamma", r.gamma},
            {"a", r.a},
            {"success", r.success},
            {"outer_iterations", r.stats.outer_iterations},
            {"total_inner_iterations", r.stats.total_inner_iterations},
            {"energy_evaluations", r.stats.energy_evaluations},
            {"final_grad_norm", r.stats.final_grad_norm},
            {"checks", checks},
            {"constants", to_json(r.constants)},
            {"rng_seed", r.rng_seed},
            {"grid_fingerprint", r.grid_fingerprint},
            {"code_version", r.code_version}};
}

inline json dirac_matrices_json() {
    auto mat = [](const Mat4& m) {
        json rows = json::array();
        for (int i = 0; i < 4; ++i) {
            json row = json::array();
            for (int j = 0; j < 4; ++j)
                row.push_back({m(i, j).real(), m(i, j).imag()});
            rows.push_back(row);
        }
        return rows;
    };
    return {{"beta", mat(DiracAlgebra::beta())},
            {"alpha1", mat(DiracAlgebra::alpha(1))},
            {"alpha2", mat(DiracAlgebra::alpha(2))},
            {"alpha3", mat(DiracAlgebra::alpha(3))},
            {"gamma123", mat(DiracAlgebra::gamma123())}};
}

inline std::string scorecard_text(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    os << std::left << std::setw(26) << "check" << std::setw(14) << "status"
       << std::setw(15) << "margin" << "note\n";
    for (const auto& c : results) {
        const std::string status =
            !c.conclusive ? "inconclusive" : (c.pass ? "pass" : "FAIL");
        os << std::left << std::setw(26) << c.name << std::setw(14) << status
           << std::setw(15) << std::setprecision(4) << std::scientific << c.margin
           << c.note << '\n';
    }
    return os.str();
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------
// Constants cache: one JSON object per file, keyed by grid fingerprint
// plus the nonlinearity parameters mu depends on.

inline std::string constants_cache_key(const GridSpec& grid,
                                       const NonlinearitySpec& f) {
    std::ostringstream key;
    key << grid.fingerprint() << "-a" << std::setprecision(17) << f.a << "-b" << f.b
        << "-al" << f.alpha << "-nu" << f.nu << "-xi" << f.xi_exponent << "-d"
        << f.delta_reg;
    return key.str();
}

inline std::optional<ConstantsTable> load_cached_constants(
    const std::string& path, const GridSpec& grid, const NonlinearitySpec& f) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        return std::nullopt;
    }
    const std::string key = constants_cache_key(grid, f);
    if (!j.contains(key)) return std::nullopt;
    try {
        return constants_from_json(j.at(key));
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

inline void store_cached_constants(const std::string& path, const GridSpec& grid,
                                   const NonlinearitySpec& f,
                                   const ConstantsTable& table) {
    json j = json::object();
    {
        std::ifstream in(path);
        if (in) {
            try {
                in >> j;
            } catch (const json::exception&) {
                j = json::object();
            }
        }
    }
    j[constants_cache_key(grid, f)] = to_json(table);
    write_json_file(path, j);
}

}  // namespace normdirac
