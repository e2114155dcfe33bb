#include "qtlab/field_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

namespace qtlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(const ComplexField& amps) {
    if (!amps.allFinite()) {
        throw NumericalError("wavefunction contains non-finite amplitudes");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Grid1D

Grid1D::Grid1D(Index n, double x_min, double dx) : n_(n), x_min_(x_min), dx_(dx) {
    if (n < 8 || !is_power_of_two(n)) {
        throw ConfigError("grid size must be a power of two >= 8, got " + std::to_string(n));
    }
    if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_min)) {
        throw ConfigError("grid spacing must be positive and finite");
    }
}

Grid1D Grid1D::centered(Index n, double length) {
    return Grid1D(n, -0.5 * length, length / static_cast<double>(n));
}

RealField Grid1D::positions() const {
    return RealField::LinSpaced(n_, x_min_, x_min_ + static_cast<double>(n_ - 1) * dx_);
}

double Grid1D::dk() const { return kTwoPi / length(); }

RealField Grid1D::wavenumbers() const {
    RealField k(n_);
    const double step = dk();
    for (Index j = 0; j < n_; ++j) {
        const Index m = j < n_ / 2 ? j : j - n_;
        k[j] = step * static_cast<double>(m);
    }
    return k;
}

double Grid1D::max_wavenumber() const { return std::numbers::pi / dx_; }

// ---------------------------------------------------------------------------
// WaveFunction

WaveFunction::WaveFunction(Grid1D grid, ComplexField amps, double t)
    : grid_(grid), amps_(std::move(amps)), t_(t) {
    if (amps_.size() != grid_.size()) {
        throw ConfigError("amplitude count does not match grid size");
    }
    require_finite(amps_);
}

double WaveFunction::norm2() const { return amps_.squaredNorm() * grid_.dx(); }

WaveFunction WaveFunction::normalized() const {
    const double nrm = norm2();
    if (!(nrm > 0.0)) {
        throw NumericalError("cannot normalize a zero wavefunction");
    }
    return WaveFunction(grid_, amps_ / std::sqrt(nrm), t_);
}

// ---------------------------------------------------------------------------
// MomentumWaveFunction

MomentumWaveFunction::MomentumWaveFunction(Grid1D grid, ComplexField amps, double t)
    : grid_(grid), amps_(std::move(amps)), t_(t) {
    if (amps_.size() != grid_.size()) {
        throw ConfigError("amplitude count does not match grid size");
    }
    require_finite(amps_);
}

double MomentumWaveFunction::norm2() const { return amps_.squaredNorm() * dp(); }

RealField MomentumWaveFunction::centered_momenta() const {
    const Index n = grid_.size();
    return RealField::LinSpaced(n, -0.5 * static_cast<double>(n) * dp(),
                                (0.5 * static_cast<double>(n) - 1.0) * dp());
}

ComplexField MomentumWaveFunction::centered_amps() const {
    const Index n = grid_.size();
    const Index h = n / 2;
    ComplexField out(n);
    out.head(h) = amps_.tail(h);
    out.tail(h) = amps_.head(h);
    return out;
}

// ---------------------------------------------------------------------------
// transforms

namespace fft {

ComplexField forward(const ComplexField& values) {
    Eigen::FFT<double> engine;
    ComplexField out(values.size());
    engine.fwd(out, values);
    return out;
}

ComplexField inverse(const ComplexField& values) {
    Eigen::FFT<double> engine;
    ComplexField out(values.size());
    engine.inv(out, values);
    return out;
}

} // namespace fft

WaveFunction make_gaussian(const Grid1D& grid, double x0, double p0, double sigma) {
    if (!(sigma > 3.0 * grid.dx())) {
        throw NumericalError("gaussian width " + std::to_string(sigma) +
                             " is not resolvable (need sigma > 3 dx)");
    }
    const double peak = std::pow(kTwoPi * sigma * sigma, -0.25);
    const double near = std::min(std::abs(grid.x_min() - x0), std::abs(grid.x_max() - x0));
    if (peak * std::exp(-near * near / (4.0 * sigma * sigma)) >= 1e-12) {
        throw NumericalError("gaussian tail exceeds 1e-12 at the grid boundary");
    }
    ComplexField amps(grid.size());
    for (Index j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        const double d = x - x0;
        amps[j] = std::exp(Complex(-d * d / (4.0 * sigma * sigma), p0 * x));
    }
    return WaveFunction(grid, std::move(amps)).normalized();
}

MomentumWaveFunction to_momentum(const WaveFunction& psi) {
    const Grid1D& grid = psi.grid();
    ComplexField phi = fft::forward(psi.amps());
    const RealField k = grid.wavenumbers();
    const double scale = grid.dx() / std::sqrt(kTwoPi);
    for (Index j = 0; j < phi.size(); ++j) {
        phi[j] *= scale * std::exp(Complex(0.0, -k[j] * grid.x_min()));
    }
    return MomentumWaveFunction(grid, std::move(phi), psi.time());
}

WaveFunction to_position(const MomentumWaveFunction& phi) {
    const Grid1D& grid = phi.grid();
    const RealField k = grid.wavenumbers();
    ComplexField shifted(phi.amps().size());
    for (Index j = 0; j < shifted.size(); ++j) {
        shifted[j] = phi.amps()[j] * std::exp(Complex(0.0, k[j] * grid.x_min()));
    }
    ComplexField psi = fft::inverse(shifted) * (std::sqrt(kTwoPi) / grid.dx());
    return WaveFunction(grid, std::move(psi), phi.time());
}

ComplexField spectral_derivative(const ComplexField& values, double spacing, int order) {
    if (order < 0) {
        throw ConfigError("derivative order must be non-negative");
    }
    if (order == 0) {
        return values;
    }
    const Index n = values.size();
    ComplexField spec = fft::forward(values);
    const double dk = kTwoPi / (static_cast<double>(n) * spacing);
    for (Index j = 0; j < n; ++j) {
        const Index m = j < n / 2 ? j : j - n;
        spec[j] *= std::pow(Complex(0.0, dk * static_cast<double>(m)), order);
    }
    return fft::inverse(spec);
}

RealField spectral_derivative(const RealField& values, double spacing, int order) {
    return spectral_derivative(ComplexField(values.cast<Complex>()), spacing, order).real();
}

ComplexField spectral_derivative(const WaveFunction& psi, int order) {
    return spectral_derivative(psi.amps(), psi.grid().dx(), order);
}

ComplexField spectral_refine(const ComplexField& values, Index factor) {
    if (factor < 1 || !is_power_of_two(factor)) {
        throw ConfigError("refinement factor must be a power of two");
    }
    if (factor == 1) {
        return values;
    }
    const Index n = values.size();
    const Index h = n / 2;
    const Index fine = n * factor;
    const ComplexField spec = fft::forward(values);
    ComplexField padded = ComplexField::Zero(fine);
    padded.head(h) = spec.head(h);
    padded.tail(h - 1) = spec.tail(h - 1);
    // split the Nyquist mode evenly between +k and -k
    padded[h] = 0.5 * spec[h];
    padded[fine - h] = 0.5 * spec[h];
    return fft::inverse(padded) * static_cast<double>(factor);
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid() == b.grid())) {
        throw ConfigError("inner product of wavefunctions on different grids");
    }
    return a.amps().dot(b.amps()) * a.grid().dx();
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid() == b.grid())) {
        throw ConfigError("distance between wavefunctions on different grids");
    }
    return std::sqrt((a.amps() - b.amps()).squaredNorm() * a.grid().dx());
}

double edge_amplitude(const ComplexField& amps, Index width) {
    const Index w = std::min(width, amps.size() / 2);
    return std::max(amps.head(w).cwiseAbs().maxCoeff(), amps.tail(w).cwiseAbs().maxCoeff());
}

} // namespace qtlab
