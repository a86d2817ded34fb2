#include "ins/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace ins::cli {

namespace {

struct Value {
    enum Kind { Num, Str, Bool, List, Table } kind = Num;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<double> list;
    std::vector<std::vector<double>> table;
    int line = 0;
};

using SectionMap = std::map<std::string, std::map<std::string, Value>>;

[[noreturn]] void fail(const std::string& msg, int line) { throw ConfigError(msg, line); }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, int line) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail("expected a number, got '" + tok + "'", line);
    return v;
}

// value grammar: number | "string" | true | false | [num, ...] | [[num,...],...]
Value parse_value(const std::string& raw, int line) {
    Value v;
    v.line = line;
    const std::string s = trim(raw);
    if (s.empty()) fail("missing value", line);
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail("unterminated string", line);
        v.kind = Value::Str;
        v.str = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Bool;
        v.flag = (s == "true");
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') fail("unterminated array", line);
        const std::string body = trim(s.substr(1, s.size() - 2));
        if (!body.empty() && body.front() == '[') {
            v.kind = Value::Table;
            // split on top-level commas between bracketed groups
            int depth = 0;
            std::string cur;
            std::vector<std::string> groups;
            for (char c : body) {
                if (c == '[') depth++;
                if (c == ']') depth--;
                if (c == ',' && depth == 0) {
                    groups.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!trim(cur).empty()) groups.push_back(cur);
            for (const auto& gstr : groups) {
                const std::string t = trim(gstr);
                if (t.size() < 2 || t.front() != '[' || t.back() != ']')
                    fail("expected an inner array", line);
                std::vector<double> row;
                std::stringstream ss(t.substr(1, t.size() - 2));
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    const std::string tt = trim(tok);
                    if (!tt.empty()) row.push_back(parse_number(tt, line));
                }
                v.table.push_back(std::move(row));
            }
            return v;
        }
        v.kind = Value::List;
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const std::string tt = trim(tok);
            if (!tt.empty()) v.list.push_back(parse_number(tt, line));
        }
        return v;
    }
    v.kind = Value::Num;
    v.num = parse_number(s, line);
    return v;
}

SectionMap parse_sections(const std::string& text) {
    SectionMap out;
    std::string section;
    std::istringstream is(text);
    std::string lineStr;
    int ln = 0;
    while (std::getline(is, lineStr)) {
        ++ln;
        std::string s = lineStr;
        // strip comments outside of strings
        bool in_str = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            if (s[i] == '#' && !in_str) {
                s = s.substr(0, i);
                break;
            }
        }
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string::npos) {
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail("empty section name", ln);
            out[section];
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'", ln);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) fail("empty key", ln);
        if (section.empty()) fail("key outside of any [section]", ln);
        if (out[section].count(key)) fail("duplicate key '" + key + "'", ln);
        out[section][key] = parse_value(s.substr(eq + 1), ln);
    }
    return out;
}

// tracks consumed keys so unknown ones can be reported afterwards
struct Binder {
    SectionMap sections;
    std::set<std::pair<std::string, std::string>> used;
    std::set<std::string> known_sections;

    const Value* find(const std::string& sec, const std::string& key) {
        known_sections.insert(sec);
        auto si = sections.find(sec);
        if (si == sections.end()) return nullptr;
        auto ki = si->second.find(key);
        if (ki == si->second.end()) return nullptr;
        used.insert({sec, key});
        return &ki->second;
    }
    double num(const std::string& sec, const std::string& key, double dflt) {
        const Value* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != Value::Num) fail("'" + key + "' must be a number", v->line);
        return v->num;
    }
    int integer(const std::string& sec, const std::string& key, int dflt) {
        const double d = num(sec, key, dflt);
        if (d != std::floor(d)) fail("'" + key + "' must be an integer", line_of(sec, key));
        return static_cast<int>(d);
    }
    bool boolean(const std::string& sec, const std::string& key, bool dflt) {
        const Value* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != Value::Bool) fail("'" + key + "' must be true/false", v->line);
        return v->flag;
    }
    std::string str(const std::string& sec, const std::string& key, const std::string& dflt) {
        const Value* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != Value::Str) fail("'" + key + "' must be a quoted string", v->line);
        return v->str;
    }
    std::vector<double> list(const std::string& sec, const std::string& key,
                             std::vector<double> dflt) {
        const Value* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != Value::List) fail("'" + key + "' must be an array", v->line);
        return v->list;
    }
    std::vector<std::vector<double>> table(const std::string& sec, const std::string& key,
                                           std::vector<std::vector<double>> dflt) {
        const Value* v = find(sec, key);
        if (!v) return dflt;
        if (v->kind != Value::Table) fail("'" + key + "' must be an array of arrays", v->line);
        return v->table;
    }
    int line_of(const std::string& sec, const std::string& key) {
        auto si = sections.find(sec);
        if (si == sections.end()) return 0;
        auto ki = si->second.find(key);
        return ki == si->second.end() ? 0 : ki->second.line;
    }
    void finish() {
        for (const auto& [sec, kv] : sections) {
            if (!known_sections.count(sec)) fail("unknown section [" + sec + "]", kv.empty() ? 0 : kv.begin()->second.line);
            for (const auto& [key, val] : kv)
                if (!used.count({sec, key}))
                    fail("unknown key '" + key + "' in [" + sec + "]", val.line);
        }
    }
};

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_num(v[i]);
    }
    return out + "]";
}

std::string fmt_table(const std::vector<std::vector<double>>& t) {
    std::string out = "[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += fmt_list(t[i]);
    }
    return out + "]";
}

}  // namespace

void ScenarioConfig::validate() const {
    static const std::set<std::string> kScenarios = {"taylor_green", "drop", "bubble",
                                                     "two_phase", "random"};
    if (!kScenarios.count(scenario))
        throw ConfigError("unknown scenario '" + scenario + "'", 0);
    try {
        Grid{n, 2}.validate();
        solver.validate();
        if (lagrangian.track_labels) Grid{lagrangian.label_grid, 2}.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what(), 0);
    }
    if (eta1 < 0.0 || eta2 < 0.0) throw ConfigError("eta1, eta2 must be >= 0", 0);
    if (disk_radius <= 0.0 || disk_radius >= 0.5)
        throw ConfigError("disk_radius must be in (0, 0.5)", 0);
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw ConfigError("eps_list must be strictly decreasing", 0);
}

ScenarioConfig parse_config(const std::string& text) {
    Binder b;
    b.sections = parse_sections(text);
    ScenarioConfig c;

    c.scenario = b.str("scenario", "type", c.scenario);
    c.n = b.integer("scenario", "n", c.n);
    c.eta1 = b.num("scenario", "eta1", c.eta1);
    c.eta2 = b.num("scenario", "eta2", c.eta2);
    {
        auto ctr = b.list("scenario", "disk_center", {c.disk_cx, c.disk_cy});
        if (ctr.size() != 2) fail("disk_center must have 2 entries", b.line_of("scenario", "disk_center"));
        c.disk_cx = ctr[0];
        c.disk_cy = ctr[1];
    }
    c.disk_radius = b.num("scenario", "disk_radius", c.disk_radius);
    c.v0_amplitude = b.num("scenario", "v0_amplitude", c.v0_amplitude);
    c.seed = static_cast<std::uint64_t>(b.num("scenario", "seed", static_cast<double>(c.seed)));
    c.eps_list = b.list("scenario", "eps_list", c.eps_list);

    c.solver.n = c.n;
    c.solver.mu = b.num("solver", "mu", c.solver.mu);
    c.solver.dt = b.num("solver", "dt", c.solver.dt);
    c.solver.T_end = b.num("solver", "T_end", c.solver.T_end);
    c.solver.eps_floor = b.num("solver", "eps_floor", c.solver.eps_floor);
    c.solver.rho_star = b.num("solver", "rho_star", c.solver.rho_star);
    c.solver.inner_tol = b.num("solver", "inner_tol", c.solver.inner_tol);
    c.solver.inner_maxit = b.integer("solver", "inner_maxit", c.solver.inner_maxit);
    c.solver.cfl_warn = b.num("solver", "cfl_warn", c.solver.cfl_warn);
    c.solver.dealias = b.boolean("solver", "dealias", c.solver.dealias);
    {
        const std::string m = b.str("solver", "inner_method",
                                    c.solver.inner_method == solver::InnerMethod::pcg
                                        ? "pcg"
                                        : "richardson");
        if (m == "pcg")
            c.solver.inner_method = solver::InnerMethod::pcg;
        else if (m == "richardson")
            c.solver.inner_method = solver::InnerMethod::richardson;
        else
            fail("inner_method must be \"pcg\" or \"richardson\"",
                 b.line_of("solver", "inner_method"));
        const std::string pv = b.str("solver", "pivot",
                                     c.solver.pivot == solver::PivotRule::geometric ? "geometric"
                                     : c.solver.pivot == solver::PivotRule::midpoint ? "midpoint"
                                                                                     : "mean");
        if (pv == "geometric")
            c.solver.pivot = solver::PivotRule::geometric;
        else if (pv == "midpoint")
            c.solver.pivot = solver::PivotRule::midpoint;
        else if (pv == "mean")
            c.solver.pivot = solver::PivotRule::mean;
        else
            fail("pivot must be geometric, midpoint or mean", b.line_of("solver", "pivot"));
    }

    c.diagnostics.p_list = b.list("diagnostics", "p_list", c.diagnostics.p_list);
    c.diagnostics.shift_table = b.table("diagnostics", "shift_table", c.diagnostics.shift_table);
    c.diagnostics.s_list = b.list("diagnostics", "s_list", c.diagnostics.s_list);
    c.diagnostics.alpha_list = b.list("diagnostics", "alpha_list", c.diagnostics.alpha_list);
    c.diagnostics.fractional_p = b.num("diagnostics", "fractional_p", c.diagnostics.fractional_p);

    c.lagrangian.track_patch = b.boolean("lagrangian", "track_patch", c.lagrangian.track_patch);
    c.lagrangian.markers = b.integer("lagrangian", "markers", c.lagrangian.markers);
    c.lagrangian.oracle_markers =
        b.integer("lagrangian", "oracle_markers", c.lagrangian.oracle_markers);
    c.lagrangian.alpha = b.num("lagrangian", "alpha", c.lagrangian.alpha);
    c.lagrangian.track_labels = b.boolean("lagrangian", "track_labels", c.lagrangian.track_labels);
    c.lagrangian.label_grid = b.integer("lagrangian", "label_grid", c.lagrangian.label_grid);

    c.output.dir = b.str("output", "dir", c.output.dir);
    c.output.snapshot_every = b.integer("output", "snapshot_every", c.output.snapshot_every);
    c.output.record_every = b.integer("output", "record_every", c.output.record_every);
    c.output.slice_every = b.integer("output", "slice_every", c.output.slice_every);

    b.finish();
    c.validate();
    return c;
}

std::string emit_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "[scenario]\n";
    os << "type = \"" << c.scenario << "\"\n";
    os << "n = " << c.n << "\n";
    os << "eta1 = " << fmt_num(c.eta1) << "\n";
    os << "eta2 = " << fmt_num(c.eta2) << "\n";
    os << "disk_center = " << fmt_list({c.disk_cx, c.disk_cy}) << "\n";
    os << "disk_radius = " << fmt_num(c.disk_radius) << "\n";
    os << "v0_amplitude = " << fmt_num(c.v0_amplitude) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "eps_list = " << fmt_list(c.eps_list) << "\n";
    os << "\n[solver]\n";
    os << "mu = " << fmt_num(c.solver.mu) << "\n";
    os << "dt = " << fmt_num(c.solver.dt) << "\n";
    os << "T_end = " << fmt_num(c.solver.T_end) << "\n";
    os << "eps_floor = " << fmt_num(c.solver.eps_floor) << "\n";
    os << "rho_star = " << fmt_num(c.solver.rho_star) << "\n";
    os << "inner_tol = " << fmt_num(c.solver.inner_tol) << "\n";
    os << "inner_maxit = " << c.solver.inner_maxit << "\n";
    os << "cfl_warn = " << fmt_num(c.solver.cfl_warn) << "\n";
    os << "dealias = " << (c.solver.dealias ? "true" : "false") << "\n";
    os << "inner_method = \""
       << (c.solver.inner_method == solver::InnerMethod::pcg ? "pcg" : "richardson") << "\"\n";
    os << "pivot = \""
       << (c.solver.pivot == solver::PivotRule::geometric   ? "geometric"
           : c.solver.pivot == solver::PivotRule::midpoint ? "midpoint"
                                                           : "mean")
       << "\"\n";
    os << "\n[diagnostics]\n";
    os << "p_list = " << fmt_list(c.diagnostics.p_list) << "\n";
    os << "shift_table = " << fmt_table(c.diagnostics.shift_table) << "\n";
    os << "s_list = " << fmt_list(c.diagnostics.s_list) << "\n";
    os << "alpha_list = " << fmt_list(c.diagnostics.alpha_list) << "\n";
    os << "fractional_p = " << fmt_num(c.diagnostics.fractional_p) << "\n";
    os << "\n[lagrangian]\n";
    os << "track_patch = " << (c.lagrangian.track_patch ? "true" : "false") << "\n";
    os << "markers = " << c.lagrangian.markers << "\n";
    os << "oracle_markers = " << c.lagrangian.oracle_markers << "\n";
    os << "alpha = " << fmt_num(c.lagrangian.alpha) << "\n";
    os << "track_labels = " << (c.lagrangian.track_labels ? "true" : "false") << "\n";
    os << "label_grid = " << c.lagrangian.label_grid << "\n";
    os << "\n[output]\n";
    os << "dir = \"" << c.output.dir << "\"\n";
    os << "snapshot_every = " << c.output.snapshot_every << "\n";
    os << "record_every = " << c.output.record_every << "\n";
    os << "slice_every = " << c.output.slice_every << "\n";
    return os.str();
}

IneqSuiteConfig parse_ineq_config(const std::string& text) {
    Binder b;
    b.sections = parse_sections(text);
    IneqSuiteConfig c;
    c.seed = static_cast<std::uint64_t>(b.num("inequalities", "seed", static_cast<double>(c.seed)));
    c.count = b.integer("inequalities", "count", c.count);
    c.n_list = b.list("inequalities", "n_list", c.n_list);
    c.spectrum_decay = b.list("inequalities", "spectrum_decay", c.spectrum_decay);
    c.rho_star = b.num("inequalities", "rho_star", c.rho_star);
    c.area_min = b.num("inequalities", "area_min", c.area_min);
    c.area_max = b.num("inequalities", "area_max", c.area_max);
    c.truncation_cut = b.integer("inequalities", "truncation_cut", c.truncation_cut);
    c.refine_count = b.integer("inequalities", "refine_count", c.refine_count);
    c.rhs_scale = b.num("inequalities", "rhs_scale", c.rhs_scale);
    c.dir = b.str("inequalities", "dir", c.dir);
    b.finish();
    if (c.count < 0) throw ConfigError("count must be >= 0", 0);
    for (double n : c.n_list) Grid{static_cast<int>(n), 2}.validate();
    return c;
}

std::string emit_ineq_config(const IneqSuiteConfig& c) {
    std::ostringstream os;
    os << "[inequalities]\n";
    os << "seed = " << c.seed << "\n";
    os << "count = " << c.count << "\n";
    os << "n_list = " << fmt_list(c.n_list) << "\n";
    os << "spectrum_decay = " << fmt_list(c.spectrum_decay) << "\n";
    os << "rho_star = " << fmt_num(c.rho_star) << "\n";
    os << "area_min = " << fmt_num(c.area_min) << "\n";
    os << "area_max = " << fmt_num(c.area_max) << "\n";
    os << "truncation_cut = " << c.truncation_cut << "\n";
    os << "refine_count = " << c.refine_count << "\n";
    os << "rhs_scale = " << fmt_num(c.rhs_scale) << "\n";
    os << "dir = \"" << c.dir << "\"\n";
    return os.str();
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ins::cli
