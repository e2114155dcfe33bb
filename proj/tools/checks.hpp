#ifndef QTLAB_TOOLS_CHECKS_HPP
#define QTLAB_TOOLS_CHECKS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "artifacts.hpp"
#include "qtlab/evolution.hpp"
#include "qtlab/madelung.hpp"
#include "qtlab/trajectories.hpp"
#include "run_config.hpp"

namespace qtlab::cli {

/// Evolves the configured scenario once and caches what later checks reuse.
class Session {
public:
    explicit Session(const RunConfig& cfg) : cfg_(cfg) {}

    const RunConfig& config() const { return cfg_; }
    const SnapshotSeries& series();
    const std::vector<MadelungFields>& fields();
    const TrajectoryBundle& bundle();
    /// `count` snapshot indices spread evenly from first to last.
    std::vector<Index> sample_indices(Index count);

private:
    const RunConfig& cfg_;
    std::optional<SnapshotSeries> series_;
    std::optional<std::vector<MadelungFields>> fields_;
    std::optional<TrajectoryBundle> bundle_;
};

namespace threshold {
inline constexpr double kResidual = 1e-3;
inline constexpr double kStationary = 1e-8;
inline constexpr double kWeakSplit = 1e-8;
inline constexpr double kMarginal = 1e-7;
inline constexpr double kBridge = 1e-6;
inline constexpr double kEquivariance = 0.05;
inline constexpr double kDirac = 1e-7;
inline constexpr double kSymplectic = 1e-12;
inline constexpr double kMetaplectic = 1e-6;
inline constexpr double kPeriodPhase = 1e-6;
inline constexpr double kPeriodReturn = 1e-8;
inline constexpr double kSlope = 1e-6;
inline constexpr double kConjugation = 1e-8;
inline constexpr double kAnticommutator = 1e-10;
inline constexpr double kProjection = 1e-6;
} // namespace threshold

/// Density fraction below which the conditional-momentum comparison is skipped.
inline constexpr double kBridgeDensityFloor = 1e-4;

void residual_checks(Session& s, InvariantReport& r, bool continuity, bool qhj);
void weak_checks(Session& s, InvariantReport& r);
void wigner_checks(Session& s, InvariantReport& r);
void moyal_checks(Session& s, InvariantReport& r);
void trajectory_checks(Session& s, InvariantReport& r);
struct DiracSample {
    std::string kernel;
    double x, x0, eps;
    DiracMomenta momenta;
    double gf_final, gf_initial;
    double gf_gap() const;
};
std::vector<DiracSample> dirac_samples(const RunConfig& cfg);
void dirac_checks(Session& s, InvariantReport& r);
void cover_checks(Session& s, InvariantReport& r);
void algebra_checks(InvariantReport& r);
void operator_checks(Session& s, InvariantReport& r);

/// Largest |conditional momentum - grad S| where rho exceeds the bridge floor.
double bridge_gap(const WaveFunction& psi, double mass);

/// Uniform doubles in [lo, hi) from a 64-bit stream, identical on every platform.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed);
    double operator()(double lo, double hi);

private:
    std::mt19937_64 engine_;
};

} // namespace qtlab::cli

#endif
