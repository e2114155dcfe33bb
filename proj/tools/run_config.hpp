#ifndef QTLAB_TOOLS_RUN_CONFIG_HPP
#define QTLAB_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtlab/evolution.hpp"
#include "qtlab/trajectories.hpp"

namespace qtlab::cli {

enum class Scenario { TwoSlit, FreeGaussian, HarmonicCoherent, HarmonicGround, Custom };

std::string to_string(Scenario s);

struct CheckToggles {
    bool continuity = true;
    bool qhj = true;
    bool weak = true;
    bool wigner = true;
    bool moyal = true;
    bool trajectories = true;
    bool dirac = true;
    bool cover = true;
    bool algebra = true;
    bool operators = true;

    bool any() const;
};

/// Parsed and validated run description. Every key read from the file is
/// echoed back through `canonical()`, which also feeds the config hash.
struct RunConfig {
    Scenario scenario = Scenario::TwoSlit;
    Index n = 512;
    double x_min = -40.0;
    double dx = 0.15625;
    EvolutionConfig evolution;

    // initial Gaussian for free_gaussian, harmonic_coherent and custom
    double x0 = 0.0;
    double p0 = 0.0;
    double sigma = 1.0;
    TwoSlitScenario two_slit;

    Index trajectory_count = 2000;
    std::vector<double> explicit_seeds;
    Index wigner_samples = 3;
    Index dirac_samples = 100;
    std::uint64_t dirac_seed = 1;
    Index basis_size = 32;
    CheckToggles checks;
    std::filesystem::path out_dir = "out";

    Grid1D grid() const { return Grid1D(n, x_min, dx); }
    double spring() const;  ///< 0 unless the potential is harmonic
    double duration() const { return evolution.dt * static_cast<double>(evolution.steps); }
    WaveFunction initial_state() const;
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Throws ConfigError for unknown sections or keys, malformed values and
/// keys that do not apply to the chosen scenario; module preconditions
/// surface as ConfigError or NumericalError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

std::string hex_hash(std::uint64_t h);

} // namespace qtlab::cli

#endif
