#include "gnls/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "gnls/errors.hpp"
#include "gnls/output.hpp"

namespace gnls {

const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::Equilibria: return "equilibria";
        case Experiment::FindOrbit: return "find-orbit";
        case Experiment::Continue: return "continue";
        case Experiment::Floquet: return "floquet";
        case Experiment::Surface: return "surface";
        case Experiment::BifCurve: return "bif-curve";
        case Experiment::Table1: return "table1";
    }
    return "?";
}

Experiment experiment_from_string(std::string_view s) {
    std::string n(s);
    std::replace(n.begin(), n.end(), '_', '-');
    for (Experiment e : {Experiment::Equilibria, Experiment::FindOrbit, Experiment::Continue, Experiment::Floquet,
                         Experiment::Surface, Experiment::BifCurve, Experiment::Table1})
        if (n == to_string(e)) return e;
    throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

StepControl ContinuationSpec::step_control() const {
    StepControl c;
    c.ds_init = ds_init;
    c.ds_min = ds_min;
    c.ds_max = ds_max;
    c.max_steps = max_steps;
    c.T_max = T_max;
    c.H_min = H_min;
    c.H_max = H_max;
    c.beta2_min = beta2_min;
    c.beta2_max = beta2_max;
    c.direction = direction;
    c.newton_tol = newton_tol;
    c.floquet = floquet;
    c.sections = sections;
    if (zero_energy_events && family == FamilyKind::EnergyFamily) c.events.push_back(monitor_energy(0.0));
    return c;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& v, int line) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(line, "not a number: '" + v + "'");
    return x;
}

long long to_int(const std::string& v, int line) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(line, "not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParseError(line, "not a boolean: '" + v + "'");
}

struct Field {
    std::string section, key;
    std::function<void(RunConfig&, const std::string&, int)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Acc>
Field real(const char* s, const char* k, Acc acc) {
    return {s, k, [acc](RunConfig& c, const std::string& v, int l) { acc(c) = to_real(v, l); },
            [acc](const RunConfig& c) { return format_real(acc(const_cast<RunConfig&>(c))); }};
}

template <class Acc>
Field integer(const char* s, const char* k, Acc acc) {
    return {s, k,
            [acc](RunConfig& c, const std::string& v, int l) {
                using T = std::remove_reference_t<decltype(acc(c))>;
                acc(c) = static_cast<T>(to_int(v, l));
            },
            [acc](const RunConfig& c) { return std::to_string(acc(const_cast<RunConfig&>(c))); }};
}

template <class Acc>
Field boolean(const char* s, const char* k, Acc acc) {
    return {s, k, [acc](RunConfig& c, const std::string& v, int l) { acc(c) = to_bool(v, l); },
            [acc](const RunConfig& c) { return std::string(acc(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class Acc>
Field text(const char* s, const char* k, Acc acc) {
    return {s, k, [acc](RunConfig& c, const std::string& v, int) { acc(c) = v; },
            [acc](const RunConfig& c) { return acc(const_cast<RunConfig&>(c)); }};
}

const std::vector<Field>& schema() {
    static const std::vector<Field> f = {
        real("params", "beta2", [](RunConfig& c) -> double& { return c.params.beta2; }),
        real("params", "beta4", [](RunConfig& c) -> double& { return c.params.beta4; }),
        real("params", "gamma", [](RunConfig& c) -> double& { return c.params.gamma; }),
        real("params", "mu", [](RunConfig& c) -> double& { return c.params.mu; }),
        {"run", "experiment",
         [](RunConfig& c, const std::string& v, int l) {
             try {
                 c.experiment = experiment_from_string(v);
             } catch (const std::invalid_argument& e) {
                 throw ParseError(l, e.what());
             }
         },
         [](const RunConfig& c) { return std::string(to_string(c.experiment)); }},
        text("run", "output_dir", [](RunConfig& c) -> std::string& { return c.output_dir; }),
        integer("run", "seed_rng", [](RunConfig& c) -> std::uint64_t& { return c.seed_rng; }),
        integer("run", "workers", [](RunConfig& c) -> int& { return c.workers; }),
        integer("run", "k_max", [](RunConfig& c) -> int& { return c.k_max; }),
        text("seed", "kind", [](RunConfig& c) -> std::string& { return c.seed.kind; }),
        real("seed", "u1", [](RunConfig& c) -> double& { return c.seed.u1; }),
        real("seed", "u3", [](RunConfig& c) -> double& { return c.seed.u3; }),
        real("seed", "H", [](RunConfig& c) -> double& { return c.seed.H; }),
        real("seed", "tau", [](RunConfig& c) -> double& { return c.seed.tau; }),
        real("seed", "amplitude", [](RunConfig& c) -> double& { return c.seed.amplitude; }),
        integer("seed", "equilibrium", [](RunConfig& c) -> int& { return c.seed.equilibrium; }),
        integer("seed", "ntst", [](RunConfig& c) -> int& { return c.seed.ntst; }),
        {"continuation", "family",
         [](RunConfig& c, const std::string& v, int l) {
             if (v == "energy") c.continuation.family = FamilyKind::EnergyFamily;
             else if (v == "beta2") c.continuation.family = FamilyKind::Beta2Family;
             else throw ParseError(l, "family must be 'energy' or 'beta2'");
         },
         [](const RunConfig& c) {
             return std::string(c.continuation.family == FamilyKind::EnergyFamily ? "energy" : "beta2");
         }},
        real("continuation", "ds_init", [](RunConfig& c) -> double& { return c.continuation.ds_init; }),
        real("continuation", "ds_min", [](RunConfig& c) -> double& { return c.continuation.ds_min; }),
        real("continuation", "ds_max", [](RunConfig& c) -> double& { return c.continuation.ds_max; }),
        integer("continuation", "max_steps", [](RunConfig& c) -> int& { return c.continuation.max_steps; }),
        real("continuation", "T_max", [](RunConfig& c) -> double& { return c.continuation.T_max; }),
        real("continuation", "H_min", [](RunConfig& c) -> double& { return c.continuation.H_min; }),
        real("continuation", "H_max", [](RunConfig& c) -> double& { return c.continuation.H_max; }),
        real("continuation", "beta2_min", [](RunConfig& c) -> double& { return c.continuation.beta2_min; }),
        real("continuation", "beta2_max", [](RunConfig& c) -> double& { return c.continuation.beta2_max; }),
        integer("continuation", "direction", [](RunConfig& c) -> int& { return c.continuation.direction; }),
        real("continuation", "newton_tol", [](RunConfig& c) -> double& { return c.continuation.newton_tol; }),
        boolean("continuation", "floquet", [](RunConfig& c) -> bool& { return c.continuation.floquet; }),
        boolean("continuation", "sections", [](RunConfig& c) -> bool& { return c.continuation.sections; }),
        boolean("continuation", "zero_energy_events",
                [](RunConfig& c) -> bool& { return c.continuation.zero_energy_events; }),
        text("bifurcation", "kind", [](RunConfig& c) -> std::string& { return c.bifurcation.kind; }),
        integer("bifurcation", "k", [](RunConfig& c) -> int& { return c.bifurcation.k; }),
        integer("bifurcation", "p", [](RunConfig& c) -> int& { return c.bifurcation.p; }),
        real("bifurcation", "beta2_lo", [](RunConfig& c) -> double& { return c.bifurcation.beta2_lo; }),
        real("bifurcation", "beta2_hi", [](RunConfig& c) -> double& { return c.bifurcation.beta2_hi; }),
        real("bifurcation", "ds_max", [](RunConfig& c) -> double& { return c.bifurcation.ds_max; }),
        real("bifurcation", "H_min", [](RunConfig& c) -> double& { return c.bifurcation.H_min; }),
        real("bifurcation", "H_max", [](RunConfig& c) -> double& { return c.bifurcation.H_max; }),
        integer("bifurcation", "follow_steps", [](RunConfig& c) -> int& { return c.bifurcation.follow_steps; }),
        real("table1", "beta2_start", [](RunConfig& c) -> double& { return c.table1.beta2_start; }),
        real("table1", "beta2_end", [](RunConfig& c) -> double& { return c.table1.beta2_end; }),
        boolean("table1", "curves", [](RunConfig& c) -> bool& { return c.table1.curves; }),
    };
    return f;
}

void check(const RunConfig& c, int line) {
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
    }
    const ContinuationSpec& s = c.continuation;
    if (!(s.ds_init > 0 && s.ds_min > 0 && s.ds_max > 0 && s.newton_tol > 0 && s.T_max > 0))
        throw ParseError(line, "tolerances and step sizes must be positive");
    if (!(s.ds_min <= s.ds_max)) throw ParseError(line, "ds_min > ds_max");
    if (!(s.H_min < s.H_max) || !(s.beta2_min < s.beta2_max)) throw ParseError(line, "continuation window not ordered");
    if (!(c.bifurcation.beta2_lo < c.bifurcation.beta2_hi) || !(c.bifurcation.H_min < c.bifurcation.H_max))
        throw ParseError(line, "bifurcation window not ordered");
    if (!(c.table1.beta2_start < c.table1.beta2_end)) throw ParseError(line, "table1 window not ordered");
    if (c.k_max < 1) throw ParseError(line, "k_max must be positive");
    if (c.workers < 0) throw ParseError(line, "workers must be >= 0");
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::map<std::string, int> seen;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) throw ParseError(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        const std::string sec = section.empty() ? "run" : section;
        const std::string full = sec + "." + key;
        if (auto it = seen.find(full); it != seen.end())
            throw ParseError(line_no, "duplicate key '" + full + "' (first on line " + std::to_string(it->second) + ")");
        seen[full] = line_no;
        const auto& fs = schema();
        auto f = std::find_if(fs.begin(), fs.end(), [&](const Field& x) { return x.section == sec && x.key == key; });
        if (f == fs.end()) throw UnknownKey(line_no, full);
        f->set(cfg, value, line_no);
    }
    check(cfg, line_no);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string format_config(const RunConfig& cfg) {
    std::string out, section;
    for (const Field& f : schema()) {
        if (f.section != section) {
            out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
            section = f.section;
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

int effective_workers(const RunConfig& cfg) {
    int n = cfg.workers > 0 ? cfg.workers : int(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* cap = std::getenv("GNLS_MAX_WORKERS")) {
        const int c = std::atoi(cap);
        if (c > 0) n = std::min(n, c);
    }
    return n;
}

}  // namespace gnls
