#include "qtlab/phase_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace qtlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeLimit = 1e-8;

Index wrap(Index b, Index n) { return ((b % n) + n) % n; }

} // namespace

WignerGrid wigner(const WaveFunction& psi) {
    const Grid1D& grid = psi.grid();
    if (edge_amplitude(psi.amps()) > kEdgeLimit) {
        throw NumericalError("wigner transform: state does not vanish at the grid edges");
    }
    const Index n = grid.size();
    const Index h = n / 2;
    const double dx = grid.dx();
    const ComplexField& amps = psi.amps();

    WignerGrid out;
    out.t = psi.time();
    out.X = grid.positions();
    out.P = RealField(n);
    for (Index b = 0; b < n; ++b) {
        out.P[b] = kPi * static_cast<double>(b - h) / (static_cast<double>(n) * dx);
    }
    out.F.resize(n, n);

    Eigen::FFT<double> engine;
    ComplexField lag(n);
    ComplexField spec(n);
    for (Index a = 0; a < n; ++a) {
        lag.setZero();
        for (Index m = 0; m < n; ++m) {
            const Index s = m < h ? m : m - n;
            const Index lo = a - s;
            const Index hi = a + s;
            if (lo >= 0 && lo < n && hi >= 0 && hi < n) {
                lag[m] = std::conj(amps[lo]) * amps[hi];
            }
        }
        engine.fwd(spec, lag);
        for (Index b = 0; b < n; ++b) {
            const Complex value = spec[wrap(b - h, n)] * (dx / kPi);
            out.F(a, b) = value.real();
            out.imag_residue = std::max(out.imag_residue, std::abs(value.imag()));
        }
    }
    if (out.imag_residue > 1e-12) {
        throw NumericalError("wigner transform is not real to 1e-12");
    }
    return out;
}

RealField momentum_density(const WaveFunction& psi, const RealField& momenta) {
    const Grid1D& grid = psi.grid();
    const Index n = grid.size();
    const double dx = grid.dx();
    const double dp = momenta[1] - momenta[0];
    // number of samples whose DFT lands on spacing dp
    const auto len = static_cast<Index>(std::llround(2.0 * kPi / (dp * dx)));
    if (len < n) {
        throw ConfigError("momentum axis is coarser than the position grid supports");
    }
    ComplexField padded = ComplexField::Zero(len);
    padded.head(n) = psi.amps();
    const ComplexField spec = fft::forward(padded);
    RealField out(momenta.size());
    const double scale = dx * dx / (2.0 * kPi);
    for (Index b = 0; b < momenta.size(); ++b) {
        const auto idx = static_cast<Index>(std::llround(momenta[b] / dp));
        out[b] = std::norm(spec[wrap(idx, len)]) * scale;
    }
    return out;
}

MarginalDefects marginal_defects(const WignerGrid& w, const WaveFunction& psi) {
    MarginalDefects d;
    d.position_l1 = (w.position_marginal() - psi.density()).cwiseAbs().sum() * w.dX();
    d.momentum_l1 = (w.momentum_marginal() - momentum_density(psi, w.P)).cwiseAbs().sum() * w.dP();
    return d;
}

ConditionalMomentum conditional_momentum(const WignerGrid& w, double floor_fraction) {
    const RealField weight = w.F.rowwise().sum();
    const RealField first = w.F * w.P;
    const double floor = floor_fraction * weight.maxCoeff();
    ConditionalMomentum out{w.X, RealField(w.X.size()), weight.array() > floor};
    for (Index a = 0; a < w.X.size(); ++a) {
        out.mean[a] = out.mask[a] ? first[a] / weight[a] : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

} // namespace qtlab
