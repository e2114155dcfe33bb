#include "qtlab/symplectic_cover.hpp"

#include <numbers>

namespace qtlab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Continuous argument of Q(t) = m00 + 2 m01 alpha0 along the flow from 0 to t.
double continuous_arg(const QuadHamiltonian& h, Complex alpha0, double t) {
    if (h.is_free()) {
        // Q = 1 + 2 alpha0 t/m stays off the negative real axis
        return std::arg(1.0 + 2.0 * alpha0 * t / h.mass);
    }
    const double w = h.omega();
    const Complex z = 2.0 * alpha0 / (h.mass * w);
    const double theta = w * t;
    const double k = std::round(theta / kPi);
    const double reduced = theta - k * kPi;
    // on |reduced| <= pi/2, Im Q has the sign of reduced, so Arg is continuous
    return k * kPi + std::arg(std::cos(reduced) + z * std::sin(reduced));
}

} // namespace

GaussianState GaussianState::from_width(double q, double p, double sigma, double phase) {
    if (!(sigma > 0.0)) {
        throw ConfigError("gaussian width must be positive");
    }
    return GaussianState{Complex(0.0, 1.0 / (4.0 * sigma * sigma)), q, p, phase};
}

WaveFunction GaussianState::sample(const Grid1D& grid, double t) const {
    if (!(alpha.imag() > 0.0)) {
        throw NumericalError("gaussian parametrization degenerate: Im alpha <= 0");
    }
    const double norm = std::pow(2.0 * alpha.imag() / kPi, 0.25);
    ComplexField amps(grid.size());
    for (Index j = 0; j < grid.size(); ++j) {
        const double d = grid.x(j) - q;
        amps[j] = norm * std::exp(Complex(0.0, 1.0) * (alpha * d * d + p * d + phase));
    }
    return WaveFunction(grid, std::move(amps), t);
}

double GaussianState::wigner_value(double x, double momentum) const {
    const double ar = alpha.real();
    const double ai = alpha.imag();
    const double d = x - q;
    const double shift = momentum - p - 2.0 * ar * d;
    return std::exp(-2.0 * ai * d * d - shift * shift / (2.0 * ai)) / kPi;
}

GaussianState metaplectic_step(const GaussianState& g, const QuadHamiltonian& h, double t) {
    if (!(g.alpha.imag() > 0.0)) {
        throw NumericalError("gaussian parametrization degenerate: Im alpha <= 0");
    }
    const SymplecticMap<double> m = classical_flow(h, t);
    const Complex big_q = m(0, 0) + 2.0 * m(0, 1) * g.alpha;
    const Complex big_p = m(1, 0) + 2.0 * m(1, 1) * g.alpha;
    GaussianState out;
    out.alpha = big_p / (2.0 * big_q);
    const Eigen::Vector2d centre = m * Eigen::Vector2d(g.q, g.p);
    out.q = centre[0];
    out.p = centre[1];
    out.phase = g.phase + 0.5 * (out.p * out.q - g.p * g.q) - 0.5 * continuous_arg(h, g.alpha, t);
    if (!(out.alpha.imag() > 0.0)) {
        throw NumericalError("metaplectic step produced Im alpha <= 0");
    }
    return out;
}

double projection_check(const GaussianState& g, const QuadHamiltonian& h, double t, const Grid1D& grid) {
    const GaussianState evolved = metaplectic_step(g, h, t);
    const WignerGrid w = wigner(evolved.sample(grid, t));
    const SymplecticMap<double> inverse = classical_flow(h, t).inverse();
    double worst = 0.0;
    for (Index a = 0; a < w.X.size(); ++a) {
        for (Index b = 0; b < w.P.size(); ++b) {
            const Eigen::Vector2d origin = inverse * Eigen::Vector2d(w.X[a], w.P[b]);
            worst = std::max(worst, std::abs(w.F(a, b) - g.wigner_value(origin[0], origin[1])));
        }
    }
    return worst;
}

double full_period_phase(const QuadHamiltonian& h, const GaussianState& g, int periods) {
    if (h.is_free()) {
        throw ConfigError("full-period phase needs a harmonic hamiltonian (K > 0)");
    }
    const double period = 2.0 * kPi / h.omega();
    return metaplectic_step(g, h, period * periods).phase - g.phase;
}

} // namespace qtlab
