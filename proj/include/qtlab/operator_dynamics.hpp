#ifndef QTLAB_OPERATOR_DYNAMICS_HPP
#define QTLAB_OPERATOR_DYNAMICS_HPP

#include <vector>

#include <Eigen/Core>

#include "qtlab/evolution.hpp"
#include "qtlab/madelung.hpp"

namespace qtlab {

using StateVector = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;

/// Truncated oscillator number basis for H = p^2/2m + K x^2/2.
struct BasisConfig {
    Index size = 32;
    double spring = 1.0;
    double mass = 1.0;

    double omega() const;
};

void validate(const BasisConfig& cfg);

/// omega (n + 1/2), n = 0..N-1
Eigen::VectorXd energies(const BasisConfig& cfg);
Operator hamiltonian(const BasisConfig& cfg);
/// (a + a^dagger) / sqrt(2 m omega)
Operator position_operator(const BasisConfig& cfg);
/// i sqrt(m omega / 2) (a^dagger - a)
Operator momentum_operator(const BasisConfig& cfg);

StateVector number_state(const BasisConfig& cfg, Index level);
/// Coherent state |alpha>; NumericalError if the mass beyond the truncation
/// is 1e-10 or more.
StateVector coherent_state(const BasisConfig& cfg, Complex alpha);

enum class DensityFlavor { Pure, Transition };

/// |psi><psi| or the transition operator |psi><phi|.
struct DensityMatrix {
    Operator rho;
    DensityFlavor flavor = DensityFlavor::Pure;

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix transition(const StateVector& psi, const StateVector& phi);

    Complex trace() const { return rho.trace(); }
    double hermiticity_defect() const { return (rho - rho.adjoint()).norm(); }
    double idempotency_defect() const { return (rho * rho - rho).norm(); }
};

/// RK4 integration of i d(rho)/dt = [H, rho]. `dt` defaults to 1e-3/omega;
/// anything larger is rejected.
DensityMatrix evolve_commutator(const DensityMatrix& rho0, const BasisConfig& cfg, double t,
                                double dt = 0.0);

/// exp(-iHt) rho0 exp(iHt) using the diagonal H.
DensityMatrix exact_conjugation(const DensityMatrix& rho0, const BasisConfig& cfg, double t);

/// Exact Schrodinger trajectory in the number basis.
std::vector<StateVector> schrodinger_trajectory(const StateVector& psi0, const BasisConfig& cfg,
                                                const std::vector<double>& times);

/// || i(|psidot><psi| - |psi><psidot|) - [H, rho]_+ ||_F with psidot = -iH psi.
/// Only H and rho enter; no quantum potential is involved.
double anticommutator_residual(const StateVector& psi, const BasisConfig& cfg);
std::vector<double> anticommutator_residual(const std::vector<StateVector>& trajectory,
                                            const BasisConfig& cfg);

/**
 * The commutator and anticommutator equations projected on |x>:
 *   continuity: dP/dt - 2 Im(psi* H psi)      (the commutator equation over i)
 *   energy:     2 P dS/dt + 2 Re(psi* H psi)
 * with H psi = -psi''/2m + K x^2 psi / 2 applied on the grid.
 */
struct ProjectedPair {
    ResidualSeries continuity;
    ResidualSeries energy;
};

ProjectedPair projected_pair(const SnapshotSeries& series, double mass, double spring);

struct ProjectionAgreement {
    double continuity_gap = 0.0;  ///< max |projected - madelung continuity residual|
    double energy_gap = 0.0;      ///< max |projected - 2 P * madelung qhj residual|
    double continuity_max = 0.0;
    double energy_max = 0.0;
};

/// Compares projected_pair against continuity_residual and qhj_residual on
/// their common masks.
ProjectionAgreement compare_projection(const SnapshotSeries& series, double mass, double spring);

} // namespace qtlab

#endif
