#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qtlab/operator_dynamics.hpp"
#include "qtlab/symplectic_cover.hpp"

namespace qtlab::cli {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
    }
    return v;
}

long long parse_integer(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
        throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    }
    return v;
}

Index parse_positive(const std::string& key, const std::string& raw) {
    const long long v = parse_integer(key, raw);
    if (v <= 0) {
        throw ConfigError(key + ": must be positive");
    }
    return static_cast<Index>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw ConfigError(key + ": empty list");
    }
    return out;
}

Scenario parse_scenario(const std::string& raw) {
    static const std::map<std::string, Scenario> names{
        {"two_slit", Scenario::TwoSlit},
        {"free_gaussian", Scenario::FreeGaussian},
        {"harmonic_coherent", Scenario::HarmonicCoherent},
        {"harmonic_ground", Scenario::HarmonicGround},
        {"custom", Scenario::Custom},
    };
    const auto it = names.find(trim(raw));
    if (it == names.end()) {
        throw ConfigError("scenario.name: unknown scenario '" + raw + "'");
    }
    return it->second;
}

void apply_defaults(RunConfig& c) {
    switch (c.scenario) {
    case Scenario::TwoSlit:
        c.n = 512;
        c.x_min = -40.0;
        c.dx = 80.0 / 512.0;
        c.evolution.steps = 6000;
        break;
    case Scenario::FreeGaussian:
    case Scenario::Custom:
        c.n = 512;
        c.x_min = -30.0;
        c.dx = 60.0 / 512.0;
        c.evolution.steps = 1000;
        break;
    case Scenario::HarmonicCoherent:
        c.n = 128;
        c.x_min = -12.0;
        c.dx = 24.0 / 128.0;
        c.evolution.steps = 6000;
        c.evolution.potential = potential::Harmonic{1.0};
        c.x0 = 2.0;
        break;
    case Scenario::HarmonicGround:
        c.n = 128;
        c.x_min = -12.0;
        c.dx = 24.0 / 128.0;
        c.evolution.potential = potential::Harmonic{1.0};
        c.evolution.dt = 1e-4;
        c.evolution.steps = 20000;
        c.evolution.snapshot_stride = 100;
        return;
    }
    c.evolution.dt = 1e-3;
    c.evolution.snapshot_stride = 10;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct KeySpec {
    Setter set;
    std::set<Scenario> scenarios;  ///< empty means every scenario
};

const std::set<Scenario> kGaussianScenarios{Scenario::FreeGaussian, Scenario::Custom};
const std::set<Scenario> kCoherentScenarios{Scenario::FreeGaussian, Scenario::Custom,
                                            Scenario::HarmonicCoherent};
const std::set<Scenario> kHarmonicScenarios{Scenario::HarmonicCoherent, Scenario::HarmonicGround,
                                            Scenario::Custom};

potential::Harmonic& harmonic_of(RunConfig& c, const std::string& key) {
    auto* h = std::get_if<potential::Harmonic>(&c.evolution.potential);
    if (h == nullptr) {
        throw ConfigError(key + ": potential is not harmonic");
    }
    return *h;
}

potential::Barrier& barrier_of(RunConfig& c, const std::string& key) {
    auto* b = std::get_if<potential::Barrier>(&c.evolution.potential);
    if (b == nullptr) {
        throw ConfigError(key + ": potential is not a barrier");
    }
    return *b;
}

Setter toggle(bool CheckToggles::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.checks.*field = parse_bool(k, v); };
}

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table{
        {"grid.n", {[](RunConfig& c, auto& k, auto& v) { c.n = parse_positive(k, v); }, {}}},
        {"grid.x_min", {[](RunConfig& c, auto& k, auto& v) { c.x_min = parse_double(k, v); }, {}}},
        {"grid.dx", {[](RunConfig& c, auto& k, auto& v) { c.dx = parse_double(k, v); }, {}}},
        {"evolution.dt", {[](RunConfig& c, auto& k, auto& v) { c.evolution.dt = parse_double(k, v); }, {}}},
        {"evolution.steps", {[](RunConfig& c, auto& k, auto& v) { c.evolution.steps = parse_positive(k, v); }, {}}},
        {"evolution.stride",
         {[](RunConfig& c, auto& k, auto& v) { c.evolution.snapshot_stride = parse_positive(k, v); }, {}}},
        {"evolution.mass", {[](RunConfig& c, auto& k, auto& v) { c.evolution.mass = parse_double(k, v); }, {}}},
        {"potential.kind",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              const std::string kind = trim(v);
              if (kind == "free") {
                  c.evolution.potential = potential::Free{};
              } else if (kind == "harmonic") {
                  c.evolution.potential = potential::Harmonic{1.0};
              } else if (kind == "barrier") {
                  c.evolution.potential = potential::Barrier{};
              } else {
                  throw ConfigError(k + ": unknown potential '" + v + "'");
              }
          },
          {Scenario::Custom}}},
        {"potential.spring",
         {[](RunConfig& c, auto& k, auto& v) { harmonic_of(c, k).spring = parse_double(k, v); }, kHarmonicScenarios}},
        {"potential.height",
         {[](RunConfig& c, auto& k, auto& v) { barrier_of(c, k).height = parse_double(k, v); }, {Scenario::Custom}}},
        {"potential.half_width",
         {[](RunConfig& c, auto& k, auto& v) { barrier_of(c, k).half_width = parse_double(k, v); },
          {Scenario::Custom}}},
        {"state.x0", {[](RunConfig& c, auto& k, auto& v) { c.x0 = parse_double(k, v); }, kCoherentScenarios}},
        {"state.p0", {[](RunConfig& c, auto& k, auto& v) { c.p0 = parse_double(k, v); }, kCoherentScenarios}},
        {"state.sigma", {[](RunConfig& c, auto& k, auto& v) { c.sigma = parse_double(k, v); }, kGaussianScenarios}},
        {"state.separation",
         {[](RunConfig& c, auto& k, auto& v) { c.two_slit.separation = parse_double(k, v); }, {Scenario::TwoSlit}}},
        {"state.slit_width",
         {[](RunConfig& c, auto& k, auto& v) { c.two_slit.slit_width = parse_double(k, v); }, {Scenario::TwoSlit}}},
        {"trajectories.count",
         {[](RunConfig& c, auto& k, auto& v) { c.trajectory_count = parse_positive(k, v); }, {}}},
        {"trajectories.seeds", {[](RunConfig& c, auto& k, auto& v) { c.explicit_seeds = parse_list(k, v); }, {}}},
        {"wigner.samples", {[](RunConfig& c, auto& k, auto& v) { c.wigner_samples = parse_positive(k, v); }, {}}},
        {"dirac.samples", {[](RunConfig& c, auto& k, auto& v) { c.dirac_samples = parse_positive(k, v); }, {}}},
        {"dirac.seed",
         {[](RunConfig& c, auto& k, auto& v) { c.dirac_seed = static_cast<std::uint64_t>(parse_integer(k, v)); }, {}}},
        {"basis.size", {[](RunConfig& c, auto& k, auto& v) { c.basis_size = parse_positive(k, v); }, {}}},
        {"output.dir", {[](RunConfig& c, auto&, auto& v) { c.out_dir = trim(v); }, {}}},
        {"checks.continuity", {toggle(&CheckToggles::continuity), {}}},
        {"checks.qhj", {toggle(&CheckToggles::qhj), {}}},
        {"checks.weak", {toggle(&CheckToggles::weak), {}}},
        {"checks.wigner", {toggle(&CheckToggles::wigner), {}}},
        {"checks.moyal", {toggle(&CheckToggles::moyal), {}}},
        {"checks.trajectories", {toggle(&CheckToggles::trajectories), {}}},
        {"checks.dirac", {toggle(&CheckToggles::dirac), {}}},
        {"checks.cover", {toggle(&CheckToggles::cover), {}}},
        {"checks.algebra", {toggle(&CheckToggles::algebra), {}}},
        {"checks.operator", {toggle(&CheckToggles::operators), {}}},
    };
    return table;
}

void validate(const RunConfig& c) {
    const Grid1D grid = c.grid();
    validate(c.evolution, grid);
    if (c.scenario == Scenario::TwoSlit) {
        validate(c.two_slit);
    }
    if ((c.checks.continuity || c.checks.qhj) &&
        (c.evolution.steps % c.evolution.snapshot_stride != 0 || c.evolution.steps / c.evolution.snapshot_stride < 2)) {
        throw ConfigError("residual checks need stride dividing steps and at least 3 snapshots");
    }
    validate(BasisConfig{c.basis_size, c.spring() > 0.0 ? c.spring() : 1.0, c.evolution.mass});
    if (!c.checks.any()) {
        throw ConfigError("checks: every check is disabled");
    }
    const WaveFunction psi = c.initial_state();
    if (std::abs(psi.norm2() - 1.0) > 1e-10) {
        throw NumericalError("initial state is not normalized on the grid");
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::TwoSlit:
        return "two_slit";
    case Scenario::FreeGaussian:
        return "free_gaussian";
    case Scenario::HarmonicCoherent:
        return "harmonic_coherent";
    case Scenario::HarmonicGround:
        return "harmonic_ground";
    case Scenario::Custom:
        return "custom";
    }
    return "unknown";
}

bool CheckToggles::any() const {
    return continuity || qhj || weak || wigner || moyal || trajectories || dirac || cover || algebra || operators;
}

double RunConfig::spring() const {
    if (const auto* h = std::get_if<potential::Harmonic>(&evolution.potential)) {
        return h->spring;
    }
    return 0.0;
}

WaveFunction RunConfig::initial_state() const {
    const Grid1D g = grid();
    switch (scenario) {
    case Scenario::TwoSlit:
        return two_slit_state(g, two_slit);
    case Scenario::FreeGaussian:
    case Scenario::Custom:
        return make_gaussian(g, x0, p0, sigma);
    case Scenario::HarmonicCoherent:
    case Scenario::HarmonicGround: {
        const double alpha = 0.5 * std::sqrt(spring() * evolution.mass);
        return GaussianState{Complex(0.0, alpha), x0, p0, 0.0}.sample(g);
    }
    }
    throw ConfigError("unknown scenario");
}

std::string RunConfig::canonical() const {
    std::ostringstream out;
    out << "scenario.name=" << to_string(scenario) << '\n';
    out << "grid.n=" << n << '\n';
    out << "grid.x_min=" << format_double(x_min) << '\n';
    out << "grid.dx=" << format_double(dx) << '\n';
    out << "evolution.dt=" << format_double(evolution.dt) << '\n';
    out << "evolution.steps=" << evolution.steps << '\n';
    out << "evolution.stride=" << evolution.snapshot_stride << '\n';
    out << "evolution.mass=" << format_double(evolution.mass) << '\n';
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, potential::Free>) {
                out << "potential.kind=free\n";
            } else if constexpr (std::is_same_v<T, potential::Harmonic>) {
                out << "potential.kind=harmonic\npotential.spring=" << format_double(v.spring) << '\n';
            } else if constexpr (std::is_same_v<T, potential::Barrier>) {
                out << "potential.kind=barrier\npotential.height=" << format_double(v.height)
                    << "\npotential.half_width=" << format_double(v.half_width) << '\n';
            } else {
                out << "potential.kind=sampled\n";
            }
        },
        evolution.potential);
    switch (scenario) {
    case Scenario::TwoSlit:
        out << "state.separation=" << format_double(two_slit.separation) << '\n';
        out << "state.slit_width=" << format_double(two_slit.slit_width) << '\n';
        break;
    case Scenario::FreeGaussian:
    case Scenario::Custom:
        out << "state.sigma=" << format_double(sigma) << '\n';
        [[fallthrough]];
    case Scenario::HarmonicCoherent:
        out << "state.x0=" << format_double(x0) << '\n';
        out << "state.p0=" << format_double(p0) << '\n';
        break;
    case Scenario::HarmonicGround:
        break;
    }
    out << "trajectories.count=" << trajectory_count << '\n';
    if (!explicit_seeds.empty()) {
        out << "trajectories.seeds=";
        for (size_t i = 0; i < explicit_seeds.size(); ++i) {
            out << (i ? "," : "") << format_double(explicit_seeds[i]);
        }
        out << '\n';
    }
    out << "wigner.samples=" << wigner_samples << '\n';
    out << "dirac.samples=" << dirac_samples << '\n';
    out << "dirac.seed=" << dirac_seed << '\n';
    out << "basis.size=" << basis_size << '\n';
    const std::pair<const char*, bool> toggles[] = {
        {"continuity", checks.continuity}, {"qhj", checks.qhj},         {"weak", checks.weak},
        {"wigner", checks.wigner},         {"moyal", checks.moyal},     {"trajectories", checks.trajectories},
        {"dirac", checks.dirac},           {"cover", checks.cover},     {"algebra", checks.algebra},
        {"operator", checks.operators},
    };
    for (const auto& [name, on] : toggles) {
        out << "checks." << name << '=' << (on ? "true" : "false") << '\n';
    }
    return out.str();
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = kFnvOffset;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex_hash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config_text(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    RunConfig c;
    const auto scenario = tree.get_child_optional("scenario");
    if (!scenario) {
        throw ConfigError("config: missing [scenario] section");
    }
    for (const auto& [key, node] : *scenario) {
        if (key != "name") {
            throw ConfigError("unknown key scenario." + key);
        }
    }
    c.scenario = parse_scenario(scenario->get<std::string>("name", ""));
    apply_defaults(c);

    // potential.kind first so that spring/height keys find their variant
    if (const auto kind = tree.get_optional<std::string>("potential.kind")) {
        key_table().at("potential.kind").set(c, "potential.kind", *kind);
        if (c.scenario != Scenario::Custom) {
            throw ConfigError("potential.kind: only the custom scenario selects a potential");
        }
    }

    for (const auto& [section, body] : tree) {
        if (section == "scenario") {
            continue;
        }
        if (body.empty()) {
            throw ConfigError("config: key '" + section + "' outside any section");
        }
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            if (full == "potential.kind") {
                continue;
            }
            const auto it = key_table().find(full);
            if (it == key_table().end()) {
                throw ConfigError("unknown key " + full);
            }
            if (!it->second.scenarios.empty() && !it->second.scenarios.contains(c.scenario)) {
                throw ConfigError(full + " does not apply to scenario " + to_string(c.scenario));
            }
            it->second.set(c, full, node.data());
        }
    }
    c.two_slit.trajectories = c.trajectory_count;
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

} // namespace qtlab::cli
