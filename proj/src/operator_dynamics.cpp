#include "qtlab/operator_dynamics.hpp"

#include <cmath>
#include <limits>

namespace qtlab {

double BasisConfig::omega() const { return std::sqrt(spring / mass); }

void validate(const BasisConfig& cfg) {
    if (cfg.size < 8) {
        throw ConfigError("number basis needs at least 8 levels");
    }
    if (!(cfg.spring > 0.0) || !(cfg.mass > 0.0)) {
        throw ConfigError("number basis needs K > 0 and m > 0");
    }
}

Eigen::VectorXd energies(const BasisConfig& cfg) {
    validate(cfg);
    return cfg.omega() * (Eigen::VectorXd::LinSpaced(cfg.size, 0.0, static_cast<double>(cfg.size - 1))
                              .array() +
                          0.5)
                             .matrix();
}

Operator hamiltonian(const BasisConfig& cfg) {
    return energies(cfg).cast<Complex>().asDiagonal();
}

namespace {

Operator lowering(const BasisConfig& cfg) {
    validate(cfg);
    Operator a = Operator::Zero(cfg.size, cfg.size);
    for (Index n = 1; n < cfg.size; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Operator commutator_rhs(const Eigen::VectorXd& e, const Operator& rho) {
    // -i [H, rho] with diagonal H
    Operator out(rho.rows(), rho.cols());
    for (Index j = 0; j < rho.cols(); ++j) {
        for (Index i = 0; i < rho.rows(); ++i) {
            out(i, j) = Complex(0.0, -(e[i] - e[j])) * rho(i, j);
        }
    }
    return out;
}

} // namespace

Operator position_operator(const BasisConfig& cfg) {
    const Operator a = lowering(cfg);
    return (a + a.adjoint()) / std::sqrt(2.0 * cfg.mass * cfg.omega());
}

Operator momentum_operator(const BasisConfig& cfg) {
    const Operator a = lowering(cfg);
    return Complex(0.0, std::sqrt(0.5 * cfg.mass * cfg.omega())) * (a.adjoint() - a);
}

StateVector number_state(const BasisConfig& cfg, Index level) {
    validate(cfg);
    if (level < 0 || level >= cfg.size) {
        throw ConfigError("number state outside the truncated basis");
    }
    StateVector v = StateVector::Zero(cfg.size);
    v[level] = 1.0;
    return v;
}

StateVector coherent_state(const BasisConfig& cfg, Complex alpha) {
    validate(cfg);
    const double weight = std::exp(-0.5 * std::norm(alpha));
    StateVector v(cfg.size);
    Complex term = weight;
    for (Index n = 0; n < cfg.size; ++n) {
        v[n] = term;
        term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    // tail mass sum_{n >= N} |c_n|^2, summed directly
    double tail = 0.0;
    Complex c = term;
    for (Index n = cfg.size; n < cfg.size + 200; ++n) {
        tail += std::norm(c);
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    if (tail >= 1e-10) {
        throw NumericalError("coherent state truncation tail " + std::to_string(tail) +
                             " exceeds 1e-10; enlarge the basis");
    }
    return v / v.norm();
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix{psi * psi.adjoint(), DensityFlavor::Pure};
}

DensityMatrix DensityMatrix::transition(const StateVector& psi, const StateVector& phi) {
    return DensityMatrix{psi * phi.adjoint(), DensityFlavor::Transition};
}

DensityMatrix evolve_commutator(const DensityMatrix& rho0, const BasisConfig& cfg, double t, double dt) {
    validate(cfg);
    if (rho0.rho.rows() != cfg.size || rho0.rho.cols() != cfg.size) {
        throw ConfigError("density matrix does not match the basis size");
    }
    const double limit = 1e-3 / cfg.omega();
    if (dt == 0.0) {
        dt = limit;
    }
    if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
        throw NumericalError("commutator step must satisfy 0 < dt <= 1e-3/omega");
    }
    if (t < 0.0) {
        throw ConfigError("evolution time must be non-negative");
    }
    const auto steps = static_cast<Index>(std::ceil(t / dt - 1e-12));
    const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    const Eigen::VectorXd e = energies(cfg);
    Operator rho = rho0.rho;
    for (Index s = 0; s < steps; ++s) {
        const Operator k1 = commutator_rhs(e, rho);
        const Operator k2 = commutator_rhs(e, rho + 0.5 * h * k1);
        const Operator k3 = commutator_rhs(e, rho + 0.5 * h * k2);
        const Operator k4 = commutator_rhs(e, rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return DensityMatrix{rho, rho0.flavor};
}

DensityMatrix exact_conjugation(const DensityMatrix& rho0, const BasisConfig& cfg, double t) {
    const Eigen::VectorXd e = energies(cfg);
    Operator rho = rho0.rho;
    for (Index j = 0; j < rho.cols(); ++j) {
        for (Index i = 0; i < rho.rows(); ++i) {
            rho(i, j) *= std::polar(1.0, -(e[i] - e[j]) * t);
        }
    }
    return DensityMatrix{rho, rho0.flavor};
}

std::vector<StateVector> schrodinger_trajectory(const StateVector& psi0, const BasisConfig& cfg,
                                                const std::vector<double>& times) {
    const Eigen::VectorXd e = energies(cfg);
    std::vector<StateVector> out;
    out.reserve(times.size());
    for (double t : times) {
        StateVector v = psi0;
        for (Index n = 0; n < v.size(); ++n) {
            v[n] *= std::polar(1.0, -e[n] * t);
        }
        out.push_back(std::move(v));
    }
    return out;
}

double anticommutator_residual(const StateVector& psi, const BasisConfig& cfg) {
    const Operator h = hamiltonian(cfg);
    const StateVector psidot = Complex(0.0, -1.0) * (h * psi);
    const Operator rho = psi * psi.adjoint();
    const Operator lhs = Complex(0.0, 1.0) * (psidot * psi.adjoint() - psi * psidot.adjoint());
    const Operator rhs = h * rho + rho * h;
    return (lhs - rhs).norm();
}

std::vector<double> anticommutator_residual(const std::vector<StateVector>& trajectory,
                                            const BasisConfig& cfg) {
    std::vector<double> out;
    out.reserve(trajectory.size());
    for (const auto& psi : trajectory) {
        out.push_back(anticommutator_residual(psi, cfg));
    }
    return out;
}

ProjectedPair projected_pair(const SnapshotSeries& series, double mass, double spring) {
    if (!(spring > 0.0)) {
        throw ConfigError("projected pair is defined for the harmonic Hamiltonian (K > 0)");
    }
    if (series.snapshots.size() < 3) {
        throw ConfigError("projected pair needs at least 3 snapshots");
    }
    if (!series.uniform()) {
        throw ConfigError("projected pair needs uniformly spaced snapshots");
    }
    const auto times = series.times();
    const double step = times[1] - times[0];
    const Grid1D& grid = series.grid();
    const RealField v = sample(potential::Harmonic{spring}, grid);
    const auto fields = decompose_series(series, mass);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ProjectedPair out;
    for (size_t k = 1; k + 1 < series.snapshots.size(); ++k) {
        const WaveFunction& psi = series.snapshots[k];
        const ComplexField h_psi =
            -spectral_derivative(psi, 2) / (2.0 * mass) + ComplexField(v.cast<Complex>().cwiseProduct(psi.amps()));
        const ComplexField diag = psi.amps().conjugate().cwiseProduct(h_psi);  // <x|H|psi><psi|x>
        const RealField density = psi.density();

        const RealField dP_dt = (series.snapshots[k + 1].density() - series.snapshots[k - 1].density()) / (2.0 * step);
        const RealField continuity = dP_dt - 2.0 * diag.imag();
        const RealField dS_dt = (fields[k + 1].S - fields[k - 1].S) / (2.0 * step);
        const RealField energy = 2.0 * density.cwiseProduct(dS_dt) + 2.0 * diag.real();

        const Mask& mask = fields[k].mask;
        const Mask joint = fields[k - 1].mask && fields[k].mask && fields[k + 1].mask;
        out.continuity.times.push_back(times[k]);
        out.continuity.fields.push_back(mask.select(continuity.array(), nan).matrix());
        out.continuity.masks.push_back(mask);
        out.energy.times.push_back(times[k]);
        out.energy.fields.push_back(joint.select(energy.array(), nan).matrix());
        out.energy.masks.push_back(joint);
    }
    return out;
}

ProjectionAgreement compare_projection(const SnapshotSeries& series, double mass, double spring) {
    const ProjectedPair pair = projected_pair(series, mass, spring);
    const ResidualSeries cont = continuity_residual(series, mass);
    const ResidualSeries qhj = qhj_residual(series, mass, potential::Harmonic{spring});

    ProjectionAgreement out;
    out.continuity_max = pair.continuity.max_abs();
    out.energy_max = pair.energy.max_abs();
    for (size_t k = 0; k < pair.continuity.fields.size(); ++k) {
        const RealField density = series.snapshots[k + 1].density();
        for (Index j = 0; j < density.size(); ++j) {
            if (pair.continuity.masks[k][j] && cont.masks[k][j]) {
                out.continuity_gap = std::max(out.continuity_gap,
                                              std::abs(pair.continuity.fields[k][j] - cont.fields[k][j]));
            }
            if (pair.energy.masks[k][j] && qhj.masks[k][j]) {
                out.energy_gap = std::max(out.energy_gap,
                                          std::abs(pair.energy.fields[k][j] - 2.0 * density[j] * qhj.fields[k][j]));
            }
        }
    }
    return out;
}

} // namespace qtlab
