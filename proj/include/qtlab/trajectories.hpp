#ifndef QTLAB_TRAJECTORIES_HPP
#define QTLAB_TRAJECTORIES_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtlab/evolution.hpp"
#include "qtlab/madelung.hpp"

namespace qtlab {

enum class TruncationReason { MaskedRegion, OutOfDomain };

std::string to_string(TruncationReason reason);

struct Truncation {
    Index trajectory;
    Index last_valid;  ///< last recorded time index, -1 if the seed itself was rejected
    double time;       ///< time at which the path stopped
    TruncationReason reason;
};

/**
 * Bohm trajectories on a shared time axis.
 *
 * positions(k, i) is trajectory i at times[k]; momenta holds grad_S and
 * quantum_potential holds Q at the same points. Entries after a truncation
 * are NaN.
 */
struct TrajectoryBundle {
    std::vector<double> times;
    RealField seeds;
    std::string seed_rule;
    Eigen::MatrixXd positions;
    Eigen::MatrixXd momenta;
    Eigen::MatrixXd quantum_potential;
    std::vector<Truncation> truncations;

    Index count() const { return positions.cols(); }
    bool truncated(Index trajectory) const;
};

/// N equal-probability quantiles (i + 1/2)/N of |psi|^2, by inverting the
/// trapezoidal CDF with linear interpolation.
RealField stratified_seeds(const WaveFunction& psi, Index count);

/// RK4 on dx/dt = grad_S(x, t)/m, cubic in space and linear in time between
/// snapshots, one step per snapshot interval. Paths that reach a masked
/// stencil or leave the grid are truncated and recorded in `truncations`.
TrajectoryBundle integrate_bundle(const SnapshotSeries& series, const RealField& seeds, double mass);

struct TwoSlitScenario {
    double separation = 8.0;  ///< distance d between the two slit centres
    double slit_width = 1.0;  ///< sigma of each Gaussian
    double duration = 6.0;
    Index trajectories = 2000;
};

void validate(const TwoSlitScenario& sc);

/// Equal-weight superposition of Gaussians at +-d/2, normalized.
WaveFunction two_slit_state(const Grid1D& grid, const TwoSlitScenario& sc);

struct TwoSlitRun {
    SnapshotSeries series;
    TrajectoryBundle bundle;
};

/// Free evolution of two_slit_state for sc.duration (the step count is taken
/// from duration/dt; cfg.potential is ignored) and a stratified fan of paths.
TwoSlitRun run_two_slit(const TwoSlitScenario& sc, const Grid1D& grid, const EvolutionConfig& cfg);

struct HamiltonResidual {
    double r_x = 0.0;  ///< max |xdot - p_B/m|
    double r_p = 0.0;  ///< max |pdot_B + d/dx (V + Q)|
    Index samples = 0;
};

/// Per-path residuals of the guidance and force equations, derivatives along
/// the path by central differences on the recorded samples.
std::vector<HamiltonResidual> hamilton_check(const TrajectoryBundle& bundle,
                                             const SnapshotSeries& series, double mass,
                                             const Potential& v);

/// Number of (time, adjacent pair) samples where seed order is not strictly
/// preserved. Trajectories are compared while both are valid.
Index crossing_violations(const TrajectoryBundle& bundle);

/// sum_b |N_b/N - int_b |psi|^2| over bins of `bin_cells` grid cells, using
/// the final positions of untruncated paths.
double endpoint_l1(const TrajectoryBundle& bundle, const WaveFunction& psi_final, Index bin_cells = 8);

namespace detail {

enum class Lookup { Ok, Masked, OutOfDomain };

/// 4-point Lagrange interpolation of `values` at x. The stencil must lie
/// inside the grid and contain no NaN.
Lookup cubic_interpolate(const Grid1D& grid, const RealField& values, double x, double& out);

} // namespace detail

} // namespace qtlab

#endif
