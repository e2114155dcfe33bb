#include "qtlab/madelung.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qtlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mask density_mask(const RealField& rho) {
    const double floor = kRhoFloorFraction * rho.maxCoeff();
    return rho.array() >= floor;
}

double snap_to_branch(double estimate, double principal) {
    return principal + kTwoPi * std::round((estimate - principal) / kTwoPi);
}

RealField masked(const RealField& values, const Mask& mask) {
    return mask.select(values, RealField::Constant(values.size(), kNaN));
}

double uniform_spacing(const std::vector<double>& t) {
    const double step = t[1] - t[0];
    for (size_t k = 2; k < t.size(); ++k) {
        if (std::abs((t[k] - t[k - 1]) - step) > 1e-9 * std::abs(step)) {
            throw ConfigError("residuals need uniformly spaced snapshots");
        }
    }
    return step;
}

void require_snapshots(size_t count) {
    if (count < 3) {
        throw ConfigError("residuals need at least 3 snapshots");
    }
}

} // namespace

// ---------------------------------------------------------------------------

namespace detail {

RealField integrate_phase(const ComplexField& amps, const RealField& grad, const Mask& mask,
                          double spacing, Index reference) {
    const Index n = amps.size();
    RealField phase = RealField::Constant(n, kNaN);
    phase[reference] = std::arg(amps[reference]);
    auto walk = [&](Index from, Index to, Index dir) {
        for (Index j = from; j != to; j += dir) {
            if (!mask[j]) {
                continue;
            }
            const Index prev = j - dir;
            const double principal = std::arg(amps[j]);
            if (!mask[prev] || std::isnan(phase[prev])) {
                phase[j] = principal;
                continue;
            }
            const double estimate = phase[prev] + dir * 0.5 * spacing * (grad[prev] + grad[j]);
            phase[j] = snap_to_branch(estimate, principal);
        }
    };
    walk(reference + 1, n, 1);
    walk(reference - 1, -1, -1);
    return phase;
}

void anchor_in_time(std::vector<RealField>& phases, const std::vector<Mask>& masks,
                    const std::vector<Index>& references) {
    for (size_t k = 1; k < phases.size(); ++k) {
        const Index ref = references[k];
        if (!masks[k - 1][ref] || std::isnan(phases[k - 1][ref])) {
            throw NumericalError("phase anchoring failed: reference point of snapshot " +
                                 std::to_string(k) + " is masked in the previous snapshot");
        }
        const double jump = phases[k - 1][ref] - phases[k][ref];
        phases[k].array() += kTwoPi * std::round(jump / kTwoPi);
    }
}

} // namespace detail

double ResidualSeries::max_abs(size_t i) const {
    double worst = 0.0;
    for (Index j = 0; j < fields[i].size(); ++j) {
        if (masks[i][j]) {
            worst = std::max(worst, std::abs(fields[i][j]));
        }
    }
    return worst;
}

double ResidualSeries::max_abs() const {
    double worst = 0.0;
    for (size_t i = 0; i < fields.size(); ++i) {
        worst = std::max(worst, max_abs(i));
    }
    return worst;
}

// ---------------------------------------------------------------------------

MadelungFields decompose(const WaveFunction& psi, double mass) {
    if (!(mass > 0.0)) {
        throw ConfigError("mass must be positive");
    }
    const Grid1D& grid = psi.grid();
    const double dx = grid.dx();
    const ComplexField& amps = psi.amps();
    const RealField rho = psi.density();
    if (!(rho.maxCoeff() > 0.0)) {
        throw NumericalError("all points masked: density vanishes everywhere");
    }
    const Mask mask = density_mask(rho);

    const ComplexField d1 = spectral_derivative(psi, 1);
    const ComplexField flux = amps.conjugate().cwiseProduct(d1); // psi* psi'
    const RealField inv_rho = mask.select(rho.cwiseInverse(), RealField::Zero(rho.size()));

    const RealField grad_S = flux.imag().cwiseProduct(inv_rho);
    const RealField p_osm = flux.real().cwiseProduct(inv_rho);

    const RealField amp = rho.cwiseSqrt();
    const RealField r1 = spectral_derivative(amp, dx, 1);
    const RealField r2 = spectral_derivative(amp, dx, 2);
    const RealField r3 = spectral_derivative(amp, dx, 3);
    const RealField inv_amp = mask.select(amp.cwiseInverse(), RealField::Zero(rho.size()));
    const RealField q = -r2.cwiseProduct(inv_amp) / (2.0 * mass);
    // d/dx (R''/R) = (R''' R - R'' R') / R^2
    const RealField dq = -(r3.cwiseProduct(amp) - r2.cwiseProduct(r1))
                              .cwiseProduct(inv_amp.cwiseAbs2()) /
                         (2.0 * mass);

    MadelungFields out{grid, psi.time(), rho, RealField(), masked(grad_S, mask),
                       masked(p_osm, mask), masked(q, mask), masked(dq, mask), mask, 0};
    rho.maxCoeff(&out.reference);
    out.S = detail::integrate_phase(amps, grad_S, mask, dx, out.reference);
    return out;
}

std::vector<MadelungFields> decompose_series(const SnapshotSeries& series, double mass) {
    std::vector<MadelungFields> fields;
    fields.reserve(series.snapshots.size());
    for (const auto& psi : series.snapshots) {
        fields.push_back(decompose(psi, mass));
    }
    std::vector<RealField> phases;
    std::vector<Mask> masks;
    std::vector<Index> refs;
    for (const auto& f : fields) {
        phases.push_back(f.S);
        masks.push_back(f.mask);
        refs.push_back(f.reference);
    }
    detail::anchor_in_time(phases, masks, refs);
    for (size_t k = 0; k < fields.size(); ++k) {
        fields[k].S = std::move(phases[k]);
    }
    return fields;
}

WeakValueField weak_momentum(const WaveFunction& psi) {
    const RealField rho = psi.density();
    const Mask mask = density_mask(rho);
    const ComplexField d1 = spectral_derivative(psi, 1);
    ComplexField w(psi.size());
    const Complex minus_i(0.0, -1.0);
    for (Index j = 0; j < w.size(); ++j) {
        w[j] = mask[j] ? minus_i * d1[j] / psi[j] : Complex(kNaN, kNaN);
    }
    return WeakValueField{psi.grid(), psi.time(), std::move(w), mask};
}

BohmOsmoticSplit bohm_osmotic_split(const WaveFunction& psi) {
    const WeakValueField weak = weak_momentum(psi);
    const MadelungFields fields = decompose(psi);
    const Complex i(0.0, 1.0);
    const ComplexField w = weak.w;
    const ComplexField wc = w.conjugate();
    BohmOsmoticSplit out;
    out.p_bohm = (0.5 * (w + wc)).real();
    out.p_osmotic = (0.5 * i * (w - wc)).real();
    out.mask = weak.mask;
    for (Index j = 0; j < w.size(); ++j) {
        if (!out.mask[j]) {
            continue;
        }
        out.max_deviation = std::max({out.max_deviation, std::abs(out.p_bohm[j] - fields.grad_S[j]),
                                      std::abs(out.p_osmotic[j] - fields.p_osmotic[j])});
    }
    return out;
}

ResidualSeries continuity_residual(const SnapshotSeries& series, double mass) {
    require_snapshots(series.snapshots.size());
    const auto times = series.times();
    const double step = uniform_spacing(times);
    const double dx = series.grid().dx();

    ResidualSeries out;
    for (size_t k = 1; k + 1 < series.snapshots.size(); ++k) {
        const WaveFunction& psi = series.snapshots[k];
        const RealField drho_dt =
            (series.snapshots[k + 1].density() - series.snapshots[k - 1].density()) / (2.0 * step);
        const ComplexField d1 = spectral_derivative(psi, 1);
        const RealField current = psi.amps().conjugate().cwiseProduct(d1).imag() / mass;
        const RealField div = spectral_derivative(current, dx, 1);
        const Mask mask = density_mask(psi.density());
        out.times.push_back(times[k]);
        out.fields.push_back(masked(drho_dt + div, mask));
        out.masks.push_back(mask);
    }
    return out;
}

ResidualSeries qhj_residual(const SnapshotSeries& series, double mass, const Potential& v) {
    require_snapshots(series.snapshots.size());
    const auto times = series.times();
    const double step = uniform_spacing(times);
    const auto fields = decompose_series(series, mass);
    const RealField pot = sample(v, series.grid());

    ResidualSeries out;
    for (size_t k = 1; k + 1 < fields.size(); ++k) {
        const Mask mask = fields[k - 1].mask && fields[k].mask && fields[k + 1].mask;
        const RealField dS_dt = (fields[k + 1].S - fields[k - 1].S) / (2.0 * step);
        const RealField r = dS_dt + fields[k].grad_S.cwiseAbs2() / (2.0 * mass) + fields[k].Q + pot;
        out.times.push_back(times[k]);
        out.fields.push_back(masked(r, mask));
        out.masks.push_back(mask);
    }
    return out;
}

ResidualSeries qhj_residual_p(const std::vector<MomentumWaveFunction>& series, double mass,
                              double spring) {
    if (!(spring > 0.0)) {
        throw ConfigError("momentum-space energy equation is only defined for a harmonic potential (K > 0)");
    }
    if (!(mass > 0.0)) {
        throw ConfigError("mass must be positive");
    }
    require_snapshots(series.size());
    std::vector<double> times;
    for (const auto& phi : series) {
        times.push_back(phi.time());
    }
    const double step = uniform_spacing(times);

    const RealField p = series.front().centered_momenta();
    const double dp = series.front().dp();
    std::vector<RealField> phases;
    std::vector<RealField> x_r;
    std::vector<RealField> curvature;
    std::vector<Mask> masks;
    std::vector<Index> refs;
    for (const auto& snapshot : series) {
        const ComplexField phi = snapshot.centered_amps();
        const RealField rho = phi.cwiseAbs2();
        const Mask mask = density_mask(rho);
        const RealField inv_rho = mask.select(rho.cwiseInverse(), RealField::Zero(rho.size()));
        const ComplexField d1 = spectral_derivative(phi, dp, 1);
        const RealField grad = phi.conjugate().cwiseProduct(d1).imag().cwiseProduct(inv_rho);
        const RealField amp = rho.cwiseSqrt();
        const RealField r2 = spectral_derivative(amp, dp, 2);
        const RealField inv_amp = mask.select(amp.cwiseInverse(), RealField::Zero(rho.size()));
        Index ref = 0;
        rho.maxCoeff(&ref);
        phases.push_back(detail::integrate_phase(phi, grad, mask, dp, ref));
        x_r.push_back(-grad);
        curvature.push_back(r2.cwiseProduct(inv_amp));
        masks.push_back(mask);
        refs.push_back(ref);
    }
    detail::anchor_in_time(phases, masks, refs);

    ResidualSeries out;
    for (size_t k = 1; k + 1 < series.size(); ++k) {
        const Mask mask = masks[k - 1] && masks[k] && masks[k + 1];
        const RealField dS_dt = (phases[k + 1] - phases[k - 1]) / (2.0 * step);
        const RealField r = dS_dt + p.cwiseAbs2() / (2.0 * mass) + 0.5 * spring * x_r[k].cwiseAbs2() -
                            0.5 * spring * curvature[k];
        out.times.push_back(times[k]);
        out.fields.push_back(masked(r, mask));
        out.masks.push_back(mask);
    }
    return out;
}

ResidualSeries qhj_residual_p(const SnapshotSeries& series, double mass, double spring) {
    std::vector<MomentumWaveFunction> momentum;
    momentum.reserve(series.snapshots.size());
    for (const auto& psi : series.snapshots) {
        momentum.push_back(to_momentum(psi));
    }
    return qhj_residual_p(momentum, mass, spring);
}

} // namespace qtlab
