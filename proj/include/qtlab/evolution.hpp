#ifndef QTLAB_EVOLUTION_HPP
#define QTLAB_EVOLUTION_HPP

#include <variant>
#include <vector>

#include "qtlab/field_core.hpp"

namespace qtlab {

namespace potential {

struct Free {};

struct Harmonic {
    double spring = 1.0; ///< V = spring * x^2 / 2
};

/// V = height for |x| < half_width, 0 elsewhere.
struct Barrier {
    double height = 0.0;
    double half_width = 0.0;
};

struct Sampled {
    RealField values;
};

} // namespace potential

using Potential = std::variant<potential::Free, potential::Harmonic, potential::Barrier,
                               potential::Sampled>;

/// Throws ConfigError on a non-positive spring constant or non-finite samples.
void validate(const Potential& v);
RealField sample(const Potential& v, const Grid1D& grid);
/// dV/dx on the grid; a barrier has zero gradient away from its edges.
RealField sample_gradient(const Potential& v, const Grid1D& grid);

struct EvolutionConfig {
    double dt = 1e-3;
    Index steps = 0;
    double mass = 1.0;
    Potential potential = potential::Free{};
    Index snapshot_stride = 1;
};

/// Checks dt > 0, dt*max|V| < 0.5 and dt*max(k^2)/2m < 0.5 on this grid.
void validate(const EvolutionConfig& cfg, const Grid1D& grid);

/// Snapshots at steps 0, s, 2s, ... plus the final step when steps % s != 0.
struct SnapshotSeries {
    std::vector<WaveFunction> snapshots;

    Index size() const { return static_cast<Index>(snapshots.size()); }
    const WaveFunction& operator[](Index k) const { return snapshots[static_cast<size_t>(k)]; }
    const Grid1D& grid() const { return snapshots.front().grid(); }
    std::vector<double> times() const;
    /// True when consecutive snapshot times are equally spaced.
    bool uniform(double rel_tol = 1e-9) const;
};

/// Strang-split propagation exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).
/// Aborts with NumericalError when |psi| exceeds 1e-8 at an edge point.
SnapshotSeries evolve(const WaveFunction& psi0, const EvolutionConfig& cfg);

/// Expectation <H> = <T> + <V>, kinetic part evaluated in Fourier space.
double energy(const WaveFunction& psi, double mass, const Potential& v);

// ---------------------------------------------------------------------------
// quadratic two-point kernels

namespace kernel {

struct Free {};
struct Harmonic {
    double spring = 1.0;
};

} // namespace kernel

using KernelKind = std::variant<kernel::Free, kernel::Harmonic>;

/// S_eps(x, x0): m(x-x0)^2/(2 eps) for a free particle, the Mehler action
/// m w [(x^2+x0^2) cos(w eps) - 2 x x0] / (2 sin(w eps)) for the oscillator.
double analytic_kernel_action(const KernelKind& kind, double mass, double x, double x0, double eps);

struct DiracMomenta {
    double final_momentum;   ///< dS/dx
    double initial_momentum; ///< -dS/dx0
    double fd_final_momentum;
    double fd_initial_momentum;

    /// Largest relative gap between the analytic and finite-difference values.
    double max_relative_gap() const;
};

/// Momenta at both ends of the two-point action, analytically and by central
/// differences of analytic_kernel_action with h = 1e-6 max(1, |x|).
DiracMomenta dirac_momenta(const KernelKind& kind, double mass, double x, double x0, double eps);

/// psi(x, eps) = A int exp(i S_eps(x, x0)) psi(x0) dx0 by direct summation on a
/// spectrally refined quadrature grid. Harmonic durations longer than a
/// quarter period are composed from equal sub-intervals, which also carries
/// the Maslov phase through caustics.
WaveFunction kernel_propagate(const WaveFunction& psi0, const KernelKind& kind, double mass,
                              double eps);

} // namespace qtlab

#endif
