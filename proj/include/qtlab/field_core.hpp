#ifndef QTLAB_FIELD_CORE_HPP
#define QTLAB_FIELD_CORE_HPP

#include <complex>

#include <Eigen/Core>

#include "qtlab/error.hpp"

namespace qtlab {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/**
 * Uniform periodic grid x_j = x_min + j*dx, j = 0..n-1.
 *
 * n must be a power of two and at least 8. Wavenumbers are returned in FFT
 * order (0, 1, ..., n/2-1, -n/2, ..., -1) times 2*pi/L, so the Nyquist
 * entry is -pi/dx.
 */
class Grid1D {
public:
    Grid1D(Index n, double x_min, double dx);

    /// Grid of n points covering [-length/2, length/2).
    static Grid1D centered(Index n, double length);

    Index size() const { return n_; }
    double x_min() const { return x_min_; }
    double dx() const { return dx_; }
    double length() const { return static_cast<double>(n_) * dx_; }
    double x(Index j) const { return x_min_ + static_cast<double>(j) * dx_; }
    double x_max() const { return x(n_ - 1); }

    RealField positions() const;
    RealField wavenumbers() const;
    double max_wavenumber() const;
    double dk() const;

    bool operator==(const Grid1D& other) const = default;

private:
    Index n_;
    double x_min_;
    double dx_;
};

/// Complex amplitudes sampled on a Grid1D at one time. Entries are finite.
class WaveFunction {
public:
    WaveFunction(Grid1D grid, ComplexField amps, double t = 0.0);

    const Grid1D& grid() const { return grid_; }
    const ComplexField& amps() const { return amps_; }
    Complex operator[](Index j) const { return amps_[j]; }
    Index size() const { return amps_.size(); }
    double time() const { return t_; }

    /// sum |psi_j|^2 dx
    double norm2() const;
    WaveFunction normalized() const;
    WaveFunction at_time(double t) const { return WaveFunction(grid_, amps_, t); }

    RealField density() const { return amps_.cwiseAbs2(); }

private:
    Grid1D grid_;
    ComplexField amps_;
    double t_;
};

/**
 * Momentum-space amplitudes phi(p_k) = (2 pi)^{-1/2} int psi(x) e^{-i p_k x} dx
 * on the grid's wavenumbers, stored in FFT order.
 */
class MomentumWaveFunction {
public:
    MomentumWaveFunction(Grid1D grid, ComplexField amps, double t = 0.0);

    const Grid1D& grid() const { return grid_; }
    const ComplexField& amps() const { return amps_; }
    double time() const { return t_; }
    double dp() const { return grid_.dk(); }

    /// Momenta in FFT order, matching amps().
    RealField momenta() const { return grid_.wavenumbers(); }
    /// Momenta sorted ascending, from -pi/dx.
    RealField centered_momenta() const;
    /// Amplitudes reordered to match centered_momenta().
    ComplexField centered_amps() const;

    double norm2() const;

private:
    Grid1D grid_;
    ComplexField amps_;
    double t_;
};

/// Normalized psi(x) ~ exp(-(x-x0)^2/(4 sigma^2) + i p0 x).
/// Throws NumericalError if sigma <= 3 dx or the tail at the boundary exceeds 1e-12.
WaveFunction make_gaussian(const Grid1D& grid, double x0, double p0, double sigma);

MomentumWaveFunction to_momentum(const WaveFunction& psi);
WaveFunction to_position(const MomentumWaveFunction& phi);

/// d^order/dx^order by multiplication with (ik)^order in Fourier space.
ComplexField spectral_derivative(const WaveFunction& psi, int order);
ComplexField spectral_derivative(const ComplexField& values, double spacing, int order);
RealField spectral_derivative(const RealField& values, double spacing, int order);

/// Trigonometric interpolation onto a grid `factor` times finer (zero padding in k).
ComplexField spectral_refine(const ComplexField& values, Index factor);

/// <a|b> = sum conj(a_j) b_j dx
Complex inner_product(const WaveFunction& a, const WaveFunction& b);
/// sqrt(sum |a_j - b_j|^2 dx)
double l2_distance(const WaveFunction& a, const WaveFunction& b);

/// Largest |psi| over the `width` outermost points at either end of the grid.
double edge_amplitude(const ComplexField& amps, Index width = 1);

namespace fft {

/// Unscaled forward DFT: X_k = sum_j x_j e^{-2 pi i jk/n}.
ComplexField forward(const ComplexField& values);
/// Inverse DFT including the 1/n factor.
ComplexField inverse(const ComplexField& values);

} // namespace fft

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace qtlab

#endif
