#include "qtlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <unsupported/Eigen/FFT>

namespace qtlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeLimit = 1e-8;
constexpr double kCausticTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// S = a x^2 + b x x0 + c x0^2
struct QuadraticAction {
    double a;
    double b;
    double c;
};

double angular_frequency(double spring, double mass) { return std::sqrt(spring / mass); }

void check_kernel_args(const KernelKind& kind, double mass, double eps) {
    if (!(mass > 0.0)) {
        throw ConfigError("kernel mass must be positive");
    }
    if (!(eps > 0.0)) {
        throw ConfigError("kernel duration must be positive");
    }
    if (const auto* h = std::get_if<kernel::Harmonic>(&kind)) {
        if (!(h->spring > 0.0)) {
            throw ConfigError("harmonic kernel requires a positive spring constant");
        }
        const double s = std::sin(angular_frequency(h->spring, mass) * eps);
        if (std::abs(s) < kCausticTol) {
            throw NumericalError("caustic: sin(omega eps) vanishes, the two-point action is singular");
        }
    }
}

QuadraticAction action_coefficients(const KernelKind& kind, double mass, double eps) {
    check_kernel_args(kind, mass, eps);
    return std::visit(overloaded{
                          [&](const kernel::Free&) {
                              return QuadraticAction{mass / (2.0 * eps), -mass / eps,
                                                     mass / (2.0 * eps)};
                          },
                          [&](const kernel::Harmonic& h) {
                              const double w = angular_frequency(h.spring, mass);
                              const double s = std::sin(w * eps);
                              const double c = std::cos(w * eps);
                              return QuadraticAction{mass * w * c / (2.0 * s), -mass * w / s,
                                                     mass * w * c / (2.0 * s)};
                          }},
                      kind);
}

/// sqrt(m/(2 pi i eps)) or sqrt(m w/(2 pi i sin(w eps))) on the principal branch.
Complex kernel_prefactor(const KernelKind& kind, double mass, double eps) {
    const double denom = std::visit(
        overloaded{[&](const kernel::Free&) { return eps; },
                   [&](const kernel::Harmonic& h) {
                       const double w = angular_frequency(h.spring, mass);
                       return std::sin(w * eps) / w;
                   }},
        kind);
    return std::sqrt(Complex(mass, 0.0) / Complex(0.0, 2.0 * kPi * denom));
}

Index next_power_of_two(double value) {
    Index p = 1;
    while (static_cast<double>(p) < value) {
        p <<= 1;
    }
    return p;
}

/// One application of a caustic-free quadratic kernel.
ComplexField apply_kernel(const Grid1D& grid, const ComplexField& amps, const KernelKind& kind,
                          double mass, double eps) {
    const QuadraticAction s = action_coefficients(kind, mass, eps);
    const Complex pref = kernel_prefactor(kind, mass, eps);
    const double reach = std::max(std::abs(grid.x_min()), std::abs(grid.x_max()));
    // largest |dS/dx0| seen by the integrand over the domain
    const double phase_rate = std::abs(s.b) * reach + 2.0 * std::abs(s.c) * reach;
    const double dx = grid.dx();
    const Index factor = next_power_of_two(1.0 + phase_rate * dx / kPi);
    const Index n = grid.size();
    const Index fine = n * factor;
    if (static_cast<double>(n) * static_cast<double>(fine) > 5e8) {
        throw NumericalError("kernel quadrature would need a refinement factor of " +
                             std::to_string(factor) + "; duration too short for this grid");
    }
    const ComplexField refined = spectral_refine(amps, factor);
    const double dy = dx / static_cast<double>(factor);

    ComplexField weighted(fine);
    RealField y(fine);
    for (Index j = 0; j < fine; ++j) {
        y[j] = grid.x_min() + static_cast<double>(j) * dy;
        weighted[j] = refined[j] * std::polar(1.0, s.c * y[j] * y[j]);
    }
    ComplexField out(n);
    for (Index i = 0; i < n; ++i) {
        const double x = grid.x(i);
        Complex acc(0.0, 0.0);
        const double rate = s.b * x;
        for (Index j = 0; j < fine; ++j) {
            acc += std::polar(1.0, rate * y[j]) * weighted[j];
        }
        out[i] = pref * std::polar(1.0, s.a * x * x) * acc * dy;
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// potentials

void validate(const Potential& v) {
    std::visit(overloaded{[](const potential::Free&) {},
                          [](const potential::Harmonic& h) {
                              if (!(h.spring > 0.0) || !std::isfinite(h.spring)) {
                                  throw ConfigError("harmonic potential needs K > 0");
                              }
                          },
                          [](const potential::Barrier& b) {
                              if (!std::isfinite(b.height) || !(b.half_width > 0.0)) {
                                  throw ConfigError("barrier needs finite height and half_width > 0");
                              }
                          },
                          [](const potential::Sampled& s) {
                              if (!s.values.allFinite()) {
                                  throw ConfigError("sampled potential has non-finite values");
                              }
                          }},
               v);
}

RealField sample(const Potential& v, const Grid1D& grid) {
    validate(v);
    const RealField x = grid.positions();
    return std::visit(
        overloaded{[&](const potential::Free&) -> RealField { return RealField::Zero(grid.size()); },
                   [&](const potential::Harmonic& h) -> RealField {
                       return 0.5 * h.spring * x.array().square();
                   },
                   [&](const potential::Barrier& b) -> RealField {
                       return (x.array().abs() < b.half_width).select(b.height, RealField::Zero(grid.size()));
                   },
                   [&](const potential::Sampled& s) -> RealField {
                       if (s.values.size() != grid.size()) {
                           throw ConfigError("sampled potential size does not match the grid");
                       }
                       return s.values;
                   }},
        v);
}

RealField sample_gradient(const Potential& v, const Grid1D& grid) {
    validate(v);
    return std::visit(
        overloaded{[&](const potential::Free&) -> RealField { return RealField::Zero(grid.size()); },
                   [&](const potential::Harmonic& h) -> RealField { return h.spring * grid.positions(); },
                   [&](const potential::Barrier&) -> RealField { return RealField::Zero(grid.size()); },
                   [&](const potential::Sampled& s) -> RealField {
                       return spectral_derivative(sample(s, grid), grid.dx(), 1);
                   }},
        v);
}

void validate(const EvolutionConfig& cfg, const Grid1D& grid) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw ConfigError("dt must be positive");
    }
    if (cfg.steps < 0) {
        throw ConfigError("step count must be non-negative");
    }
    if (!(cfg.mass > 0.0)) {
        throw ConfigError("mass must be positive");
    }
    if (cfg.snapshot_stride < 1) {
        throw ConfigError("snapshot stride must be at least 1");
    }
    const RealField v = sample(cfg.potential, grid);
    const double kmax = grid.max_wavenumber();
    if (cfg.dt * v.cwiseAbs().maxCoeff() >= 0.5) {
        throw NumericalError("stability: dt * max|V| must stay below 0.5");
    }
    if (cfg.dt * kmax * kmax / (2.0 * cfg.mass) >= 0.5) {
        throw NumericalError("stability: dt * max(k^2) / 2m must stay below 0.5");
    }
}

// ---------------------------------------------------------------------------
// split-operator stepping

std::vector<double> SnapshotSeries::times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        t.push_back(s.time());
    }
    return t;
}

bool SnapshotSeries::uniform(double rel_tol) const {
    if (snapshots.size() < 3) {
        return true;
    }
    const auto t = times();
    const double step = t[1] - t[0];
    for (size_t k = 2; k < t.size(); ++k) {
        if (std::abs((t[k] - t[k - 1]) - step) > rel_tol * std::abs(step)) {
            return false;
        }
    }
    return true;
}

SnapshotSeries evolve(const WaveFunction& psi0, const EvolutionConfig& cfg) {
    const Grid1D& grid = psi0.grid();
    validate(cfg, grid);
    if (edge_amplitude(psi0.amps()) > kEdgeLimit) {
        throw NumericalError("initial state leaks to the boundary");
    }

    const Index n = grid.size();
    const RealField v = sample(cfg.potential, grid);
    const RealField k = grid.wavenumbers();
    ComplexField half_potential(n);
    ComplexField kinetic(n);
    for (Index j = 0; j < n; ++j) {
        half_potential[j] = std::polar(1.0, -0.5 * cfg.dt * v[j]);
        kinetic[j] = std::polar(1.0, -cfg.dt * k[j] * k[j] / (2.0 * cfg.mass));
    }

    SnapshotSeries series;
    series.snapshots.push_back(psi0);

    Eigen::FFT<double> engine;
    ComplexField psi = psi0.amps();
    ComplexField spec(n);
    const double t0 = psi0.time();
    for (Index step = 1; step <= cfg.steps; ++step) {
        psi.array() *= half_potential.array();
        engine.fwd(spec, psi);
        spec.array() *= kinetic.array();
        engine.inv(psi, spec);
        psi.array() *= half_potential.array();

        const double edge = edge_amplitude(psi);
        if (edge > kEdgeLimit) {
            std::ostringstream msg;
            msg << "boundary leak: |psi| = " << edge << " at the grid edge after step " << step
                << " (t = " << t0 + static_cast<double>(step) * cfg.dt << ")";
            throw NumericalError(msg.str());
        }
        if (step % cfg.snapshot_stride == 0 || step == cfg.steps) {
            series.snapshots.emplace_back(grid, psi, t0 + static_cast<double>(step) * cfg.dt);
        }
    }
    return series;
}

double energy(const WaveFunction& psi, double mass, const Potential& v) {
    const MomentumWaveFunction phi = to_momentum(psi);
    const RealField p = phi.momenta();
    const double kinetic =
        (phi.amps().cwiseAbs2().array() * p.array().square()).sum() * phi.dp() / (2.0 * mass);
    const double pot = (psi.density().array() * sample(v, psi.grid()).array()).sum() * psi.grid().dx();
    return (kinetic + pot) / psi.norm2();
}

// ---------------------------------------------------------------------------
// two-point kernels

double analytic_kernel_action(const KernelKind& kind, double mass, double x, double x0, double eps) {
    check_kernel_args(kind, mass, eps);
    return std::visit(overloaded{[&](const kernel::Free&) {
                                     const double d = x - x0;
                                     return mass * d * d / (2.0 * eps);
                                 },
                                 [&](const kernel::Harmonic& h) {
                                     const double w = angular_frequency(h.spring, mass);
                                     return mass * w *
                                            ((x * x + x0 * x0) * std::cos(w * eps) - 2.0 * x * x0) /
                                            (2.0 * std::sin(w * eps));
                                 }},
                      kind);
}

double DiracMomenta::max_relative_gap() const {
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
    };
    return std::max(rel(final_momentum, fd_final_momentum), rel(initial_momentum, fd_initial_momentum));
}

DiracMomenta dirac_momenta(const KernelKind& kind, double mass, double x, double x0, double eps) {
    check_kernel_args(kind, mass, eps);
    DiracMomenta out{};
    std::visit(overloaded{[&](const kernel::Free&) {
                              out.final_momentum = mass * (x - x0) / eps;
                              out.initial_momentum = mass * (x - x0) / eps;
                          },
                          [&](const kernel::Harmonic& h) {
                              const double w = angular_frequency(h.spring, mass);
                              const double s = std::sin(w * eps);
                              const double c = std::cos(w * eps);
                              out.final_momentum = mass * w * (x * c - x0) / s;
                              out.initial_momentum = mass * w * (x - x0 * c) / s;
                          }},
               kind);
    const double hx = 1e-6 * std::max(1.0, std::abs(x));
    const double h0 = 1e-6 * std::max(1.0, std::abs(x0));
    out.fd_final_momentum = (analytic_kernel_action(kind, mass, x + hx, x0, eps) -
                             analytic_kernel_action(kind, mass, x - hx, x0, eps)) /
                            (2.0 * hx);
    out.fd_initial_momentum = -(analytic_kernel_action(kind, mass, x, x0 + h0, eps) -
                                analytic_kernel_action(kind, mass, x, x0 - h0, eps)) /
                              (2.0 * h0);
    return out;
}

WaveFunction kernel_propagate(const WaveFunction& psi0, const KernelKind& kind, double mass,
                              double eps) {
    if (!(mass > 0.0) || !(eps > 0.0)) {
        throw ConfigError("kernel propagation needs positive mass and duration");
    }
    if (edge_amplitude(psi0.amps()) > kEdgeLimit) {
        throw NumericalError("kernel propagation input leaks to the boundary");
    }
    Index pieces = 1;
    if (const auto* h = std::get_if<kernel::Harmonic>(&kind)) {
        if (!(h->spring > 0.0)) {
            throw ConfigError("harmonic kernel requires a positive spring constant");
        }
        const double quarter = 0.5 * kPi / angular_frequency(h->spring, mass);
        pieces = std::max<Index>(1, static_cast<Index>(std::ceil(eps / quarter - 1e-9)));
    }
    const double sub = eps / static_cast<double>(pieces);
    ComplexField amps = psi0.amps();
    for (Index i = 0; i < pieces; ++i) {
        amps = apply_kernel(psi0.grid(), amps, kind, mass, sub);
    }
    return WaveFunction(psi0.grid(), std::move(amps), psi0.time() + eps);
}

} // namespace qtlab
