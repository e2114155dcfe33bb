#ifndef QTLAB_SYMPLECTIC_COVER_HPP
#define QTLAB_SYMPLECTIC_COVER_HPP

#include <cmath>
#include <utility>

#include <Eigen/Core>
#include <Eigen/LU>

#include "qtlab/error.hpp"
#include "qtlab/field_core.hpp"
#include "qtlab/phase_space.hpp"

namespace qtlab {

/// H(x, p) = p^2/2m + K x^2/2, K = 0 for a free particle.
template <typename Scalar>
struct QuadHamiltonianT {
    Scalar mass = Scalar(1);
    Scalar spring = Scalar(0);

    Scalar omega() const { return std::sqrt(spring / mass); }
    bool is_free() const { return spring == Scalar(0); }
    Scalar operator()(Scalar x, Scalar p) const { return p * p / (Scalar(2) * mass) + spring * x * x / Scalar(2); }
};

using QuadHamiltonian = QuadHamiltonianT<double>;

/// Linear map of (x, p); symplectic in two dimensions iff det = 1.
template <typename Scalar>
using SymplecticMap = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
void validate(const QuadHamiltonianT<Scalar>& h) {
    if (!(h.mass > Scalar(0)) || !(h.spring >= Scalar(0))) {
        throw ConfigError("quadratic hamiltonian needs m > 0 and K >= 0");
    }
}

/// Exact flow of Hamilton's equations for time t.
template <typename Scalar>
SymplecticMap<Scalar> classical_flow(const QuadHamiltonianT<Scalar>& h, Scalar t) {
    validate(h);
    SymplecticMap<Scalar> m;
    if (h.is_free()) {
        m << Scalar(1), t / h.mass, Scalar(0), Scalar(1);
        return m;
    }
    const Scalar w = h.omega();
    const Scalar c = std::cos(w * t);
    const Scalar s = std::sin(w * t);
    m << c, s / (h.mass * w), -h.mass * w * s, c;
    return m;
}

template <typename Scalar>
Scalar symplectic_defect(const SymplecticMap<Scalar>& m) {
    return std::abs(m.determinant() - Scalar(1));
}

/**
 * Free-type generating function S(x, x0) = a x^2 + b x x0 + c x0^2 of a
 * linear symplectic map: p = dS/dx, p0 = -dS/dx0.
 */
template <typename Scalar>
struct GeneratingFunctionT {
    Scalar a;
    Scalar b;
    Scalar c;

    Scalar action(Scalar x, Scalar x0) const { return a * x * x + b * x * x0 + c * x0 * x0; }
    Scalar final_momentum(Scalar x, Scalar x0) const { return Scalar(2) * a * x + b * x0; }
    Scalar initial_momentum(Scalar x, Scalar x0) const { return -(b * x + Scalar(2) * c * x0); }
};

using GeneratingFunction = GeneratingFunctionT<double>;

/// Generating function of classical_flow(h, t); NumericalError when the map
/// is not free (t = 0, or sin(omega t) = 0 for the oscillator).
template <typename Scalar>
GeneratingFunctionT<Scalar> generating_function(const QuadHamiltonianT<Scalar>& h, Scalar t) {
    const SymplecticMap<Scalar> m = classical_flow(h, t);
    // x = m00 x0 + m01 p0 must be solvable for p0
    const Scalar scale = h.is_free() ? std::abs(t) / h.mass : Scalar(1) / (h.mass * h.omega());
    if (std::abs(m(0, 1)) <= Scalar(1e-9) * scale || t == Scalar(0)) {
        throw NumericalError("map has no free generating function (zero time or caustic)");
    }
    // p0 = (x - m00 x0)/m01, p = m10 x0 + m11 p0
    const Scalar inv = Scalar(1) / m(0, 1);
    return GeneratingFunctionT<Scalar>{m(1, 1) * inv / Scalar(2), -inv, m(0, 0) * inv / Scalar(2)};
}

/// Largest |p - dS/dx| or |p0 + dS/dx0| over the phase points (columns of
/// `initial`, rows x0 and p0) pushed through classical_flow(h, t).
template <typename Scalar>
Scalar generating_relation_defect(const QuadHamiltonianT<Scalar>& h, Scalar t,
                                  const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& initial) {
    const SymplecticMap<Scalar> m = classical_flow(h, t);
    const GeneratingFunctionT<Scalar> g = generating_function(h, t);
    const Eigen::Matrix<Scalar, 2, Eigen::Dynamic> final = m * initial;
    Scalar worst(0);
    for (Eigen::Index i = 0; i < initial.cols(); ++i) {
        const Scalar x0 = initial(0, i);
        const Scalar x = final(0, i);
        const Scalar scale = std::max({Scalar(1), std::abs(final(1, i)), std::abs(initial(1, i))});
        worst = std::max(worst, std::abs(final(1, i) - g.final_momentum(x, x0)) / scale);
        worst = std::max(worst, std::abs(initial(1, i) - g.initial_momentum(x, x0)) / scale);
    }
    return worst;
}

/**
 * psi(x) = N exp(i alpha (x - q)^2 + i p (x - q) + i phase) with
 * N = (2 Im(alpha)/pi)^{1/4}. A Gaussian of position spread sigma
 * (|psi|^2 standard deviation) has alpha = i/(4 sigma^2).
 */
struct GaussianState {
    Complex alpha{0.0, 0.25};
    double q = 0.0;
    double p = 0.0;
    double phase = 0.0;

    static GaussianState from_width(double q, double p, double sigma, double phase = 0.0);

    WaveFunction sample(const Grid1D& grid, double t = 0.0) const;
    /// Closed-form Wigner function of the state.
    double wigner_value(double x, double momentum) const;
};

/// Metaplectic action of the quadratic flow on a Gaussian: alpha by the
/// Mobius map of classical_flow, (q, p) by the flow itself, and the phase by
/// the classical action (p q - p0 q0)/2 minus half the continuous argument of
/// Q(t) = m00 + 2 m01 alpha0.
GaussianState metaplectic_step(const GaussianState& g, const QuadHamiltonian& h, double t);

/// Max |W[metaplectic_step(g)](X,P) - W[g](M^{-1}(X,P))| on the grid's
/// Wigner lattice, the first computed numerically from the sampled state.
double projection_check(const GaussianState& g, const QuadHamiltonian& h, double t, const Grid1D& grid);

/// Phase gained over `periods` full oscillator periods (-pi per period).
double full_period_phase(const QuadHamiltonian& h, const GaussianState& g, int periods = 1);

} // namespace qtlab

#endif
