#ifndef QTLAB_PHASE_SPACE_HPP
#define QTLAB_PHASE_SPACE_HPP

#include <Eigen/Core>

#include "qtlab/field_core.hpp"
#include "qtlab/poly_observable.hpp"

namespace qtlab {

/**
 * Wigner function F(X, P) on the position grid times a momentum axis.
 *
 * The half-separation eta/2 steps by whole grid cells, so eta advances by
 * 2 dx and the conjugate axis is P_b = b * pi / (n dx), b = -n/2 .. n/2-1:
 * half the spacing of the state's own momentum grid, covering |P| < pi/(2 dx).
 * F(a, b) is indexed by position row and ascending momentum column.
 */
struct WignerGrid {
    RealField X;
    RealField P;
    Eigen::MatrixXd F;
    double t = 0.0;
    double imag_residue = 0.0;  ///< largest |Im F| discarded

    double dX() const { return X[1] - X[0]; }
    double dP() const { return P[1] - P[0]; }
    double total() const { return F.sum() * dX() * dP(); }
    /// int F dP as a function of X
    RealField position_marginal() const { return F.rowwise().sum() * dP(); }
    /// int F dX as a function of P
    RealField momentum_marginal() const { return F.colwise().sum().transpose() * dX(); }
};

/// F(X,P) = (2 pi)^{-1} int psi*(X - eta/2) e^{-i eta P} psi(X + eta/2) d eta,
/// one FFT per row. Samples beyond the grid are treated as zero, so the state
/// must vanish at the edges (|psi| <= 1e-8, NumericalError otherwise).
WignerGrid wigner(const WaveFunction& psi);

/// |phi(P)|^2 evaluated on the Wigner momentum axis by a zero-padded transform.
RealField momentum_density(const WaveFunction& psi, const RealField& momenta);

struct MarginalDefects {
    double position_l1 = 0.0;  ///< int |int F dP - |psi|^2| dX
    double momentum_l1 = 0.0;  ///< int |int F dX - |phi|^2| dP
};

MarginalDefects marginal_defects(const WignerGrid& w, const WaveFunction& psi);

struct ConditionalMomentum {
    RealField X;
    RealField mean;  ///< NaN where masked
    Mask mask;
};

/// Mean momentum int P F dP / int F dP at each X, masked where the position
/// marginal falls below floor_fraction * max.
ConditionalMomentum conditional_momentum(const WignerGrid& w, double floor_fraction = 1e-8);

} // namespace qtlab

#endif
