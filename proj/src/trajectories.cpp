#include "qtlab/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qtlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using detail::Lookup;

struct GuidanceField {
    const Grid1D& grid;
    const std::vector<MadelungFields>& fields;
    double mass;

    /// velocity between snapshots k and k+1 at fraction tau of the interval
    Lookup velocity(Index k, double tau, double x, double& v) const {
        double a = 0.0;
        double b = 0.0;
        const Lookup la = detail::cubic_interpolate(grid, fields[k].grad_S, x, a);
        if (la != Lookup::Ok) {
            return la;
        }
        const Lookup lb = detail::cubic_interpolate(grid, fields[k + 1].grad_S, x, b);
        if (lb != Lookup::Ok) {
            return lb;
        }
        v = ((1.0 - tau) * a + tau * b) / mass;
        return Lookup::Ok;
    }
};

TruncationReason reason_for(Lookup l) {
    return l == Lookup::OutOfDomain ? TruncationReason::OutOfDomain : TruncationReason::MaskedRegion;
}

} // namespace

std::string to_string(TruncationReason reason) {
    switch (reason) {
    case TruncationReason::MaskedRegion:
        return "masked_region";
    case TruncationReason::OutOfDomain:
        return "out_of_domain";
    }
    return "unknown";
}

bool TrajectoryBundle::truncated(Index trajectory) const {
    return std::any_of(truncations.begin(), truncations.end(),
                       [&](const Truncation& t) { return t.trajectory == trajectory; });
}

namespace detail {

Lookup cubic_interpolate(const Grid1D& grid, const RealField& values, double x, double& out) {
    if (!std::isfinite(x)) {
        return Lookup::OutOfDomain;
    }
    const double s = (x - grid.x_min()) / grid.dx();
    const auto j = static_cast<Index>(std::floor(s));
    if (j - 1 < 0 || j + 2 > grid.size() - 1) {
        return Lookup::OutOfDomain;
    }
    const double u = s - static_cast<double>(j);
    const double f0 = values[j - 1];
    const double f1 = values[j];
    const double f2 = values[j + 1];
    const double f3 = values[j + 2];
    if (std::isnan(f0) || std::isnan(f1) || std::isnan(f2) || std::isnan(f3)) {
        return Lookup::Masked;
    }
    // Lagrange weights on nodes -1, 0, 1, 2
    const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    out = w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3;
    return Lookup::Ok;
}

} // namespace detail

RealField stratified_seeds(const WaveFunction& psi, Index count) {
    if (count < 1) {
        throw ConfigError("trajectory count must be positive");
    }
    const Grid1D& grid = psi.grid();
    const RealField rho = psi.density();
    const Index n = rho.size();
    RealField cdf(n);
    cdf[0] = 0.0;
    for (Index j = 1; j < n; ++j) {
        cdf[j] = cdf[j - 1] + 0.5 * grid.dx() * (rho[j - 1] + rho[j]);
    }
    cdf /= cdf[n - 1];

    RealField seeds(count);
    Index j = 0;
    for (Index i = 0; i < count; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        while (j + 1 < n - 1 && cdf[j + 1] < q) {
            ++j;
        }
        const double span = cdf[j + 1] - cdf[j];
        const double u = span > 0.0 ? (q - cdf[j]) / span : 0.5;
        seeds[i] = grid.x(j) + u * grid.dx();
    }
    return seeds;
}

TrajectoryBundle integrate_bundle(const SnapshotSeries& series, const RealField& seeds, double mass) {
    if (series.snapshots.empty()) {
        throw ConfigError("trajectory integration needs at least one snapshot");
    }
    if (!(mass > 0.0)) {
        throw ConfigError("mass must be positive");
    }
    const Grid1D& grid = series.grid();
    std::vector<MadelungFields> fields;
    fields.reserve(series.snapshots.size());
    for (const auto& psi : series.snapshots) {
        fields.push_back(decompose(psi, mass));
    }
    const auto times = series.times();
    const auto steps = static_cast<Index>(times.size());

    for (Index k = 0; k + 1 < steps; ++k) {
        const double vmax = fields[static_cast<size_t>(k)].mask.select(
                                fields[static_cast<size_t>(k)].grad_S.array().abs(), 0.0)
                                .maxCoeff() /
                            mass;
        if (vmax * (times[k + 1] - times[k]) >= 5.0 * grid.dx()) {
            throw NumericalError("snapshot spacing too coarse for the guidance field: "
                                 "max|v| dt_snap must stay below 5 dx");
        }
    }

    const Index count = seeds.size();
    TrajectoryBundle bundle;
    bundle.times = times;
    bundle.seeds = seeds;
    bundle.seed_rule = "explicit";
    bundle.positions = Eigen::MatrixXd::Constant(steps, count, kNaN);
    bundle.momenta = Eigen::MatrixXd::Constant(steps, count, kNaN);
    bundle.quantum_potential = Eigen::MatrixXd::Constant(steps, count, kNaN);

    const GuidanceField field{grid, fields, mass};

    auto record = [&](Index k, Index i, double x) -> Lookup {
        double p = 0.0;
        double q = 0.0;
        const Lookup lp = detail::cubic_interpolate(grid, fields[static_cast<size_t>(k)].grad_S, x, p);
        if (lp != Lookup::Ok) {
            return lp;
        }
        const Lookup lq = detail::cubic_interpolate(grid, fields[static_cast<size_t>(k)].Q, x, q);
        if (lq != Lookup::Ok) {
            return lq;
        }
        bundle.positions(k, i) = x;
        bundle.momenta(k, i) = p;
        bundle.quantum_potential(k, i) = q;
        return Lookup::Ok;
    };

    for (Index i = 0; i < count; ++i) {
        double x = seeds[i];
        Lookup status = record(0, i, x);
        if (status != Lookup::Ok) {
            bundle.truncations.push_back({i, -1, times[0], reason_for(status)});
            continue;
        }
        for (Index k = 0; k + 1 < steps; ++k) {
            const double h = times[k + 1] - times[k];
            double k1 = 0.0;
            double k2 = 0.0;
            double k3 = 0.0;
            double k4 = 0.0;
            const size_t kk = static_cast<size_t>(k);
            if ((status = field.velocity(kk, 0.0, x, k1)) == Lookup::Ok &&
                (status = field.velocity(kk, 0.5, x + 0.5 * h * k1, k2)) == Lookup::Ok &&
                (status = field.velocity(kk, 0.5, x + 0.5 * h * k2, k3)) == Lookup::Ok &&
                (status = field.velocity(kk, 1.0, x + h * k3, k4)) == Lookup::Ok) {
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                status = record(k + 1, i, x);
            }
            if (status != Lookup::Ok) {
                bundle.truncations.push_back({i, k, times[k], reason_for(status)});
                break;
            }
        }
    }
    return bundle;
}

void validate(const TwoSlitScenario& sc) {
    if (!(sc.slit_width > 0.0)) {
        throw ConfigError("slit width must be positive");
    }
    if (!(sc.separation > 4.0 * sc.slit_width)) {
        throw ConfigError("slit separation must exceed 4 slit widths");
    }
    if (!(sc.duration > 0.0)) {
        throw ConfigError("two-slit duration must be positive");
    }
    if (sc.trajectories < 1) {
        throw ConfigError("two-slit trajectory count must be positive");
    }
}

WaveFunction two_slit_state(const Grid1D& grid, const TwoSlitScenario& sc) {
    validate(sc);
    const WaveFunction upper = make_gaussian(grid, 0.5 * sc.separation, 0.0, sc.slit_width);
    const WaveFunction lower = make_gaussian(grid, -0.5 * sc.separation, 0.0, sc.slit_width);
    return WaveFunction(grid, upper.amps() + lower.amps()).normalized();
}

TwoSlitRun run_two_slit(const TwoSlitScenario& sc, const Grid1D& grid, const EvolutionConfig& cfg) {
    validate(sc);
    EvolutionConfig free = cfg;
    free.potential = potential::Free{};
    free.steps = static_cast<Index>(std::llround(sc.duration / cfg.dt));
    const WaveFunction psi0 = two_slit_state(grid, sc);
    TwoSlitRun run{evolve(psi0, free), {}};
    run.bundle = integrate_bundle(run.series, stratified_seeds(psi0, sc.trajectories), free.mass);
    run.bundle.seed_rule = "stratified_inverse_cdf";
    return run;
}

std::vector<HamiltonResidual> hamilton_check(const TrajectoryBundle& bundle,
                                             const SnapshotSeries& series, double mass,
                                             const Potential& v) {
    const Grid1D& grid = series.grid();
    const RealField dv = sample_gradient(v, grid);
    std::vector<RealField> force;
    force.reserve(series.snapshots.size());
    for (const auto& psi : series.snapshots) {
        const MadelungFields f = decompose(psi, mass);
        force.push_back(dv + f.grad_Q);
    }
    const auto& t = bundle.times;
    const auto steps = static_cast<Index>(t.size());

    std::vector<HamiltonResidual> out(static_cast<size_t>(bundle.count()));
    for (Index i = 0; i < bundle.count(); ++i) {
        HamiltonResidual& r = out[static_cast<size_t>(i)];
        for (Index k = 1; k + 1 < steps; ++k) {
            const double xm = bundle.positions(k - 1, i);
            const double xp = bundle.positions(k + 1, i);
            const double x = bundle.positions(k, i);
            if (std::isnan(xm) || std::isnan(xp) || std::isnan(x)) {
                continue;
            }
            double grad = 0.0;
            if (detail::cubic_interpolate(grid, force[static_cast<size_t>(k)], x, grad) != Lookup::Ok) {
                continue;
            }
            const double span = t[k + 1] - t[k - 1];
            const double xdot = (xp - xm) / span;
            const double pdot = (bundle.momenta(k + 1, i) - bundle.momenta(k - 1, i)) / span;
            r.r_x = std::max(r.r_x, std::abs(xdot - bundle.momenta(k, i) / mass));
            r.r_p = std::max(r.r_p, std::abs(pdot + grad));
            ++r.samples;
        }
    }
    return out;
}

Index crossing_violations(const TrajectoryBundle& bundle) {
    std::vector<Index> order(static_cast<size_t>(bundle.count()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return bundle.seeds[a] < bundle.seeds[b]; });
    Index violations = 0;
    for (Index k = 0; k < bundle.positions.rows(); ++k) {
        double previous = -std::numeric_limits<double>::infinity();
        for (Index i : order) {
            const double x = bundle.positions(k, i);
            if (std::isnan(x)) {
                continue;
            }
            if (!(x > previous)) {
                ++violations;
            }
            previous = x;
        }
    }
    return violations;
}

double endpoint_l1(const TrajectoryBundle& bundle, const WaveFunction& psi_final, Index bin_cells) {
    const Grid1D& grid = psi_final.grid();
    const Index n = grid.size();
    if (bin_cells < 1 || n % bin_cells != 0) {
        throw ConfigError("bin width must divide the grid size");
    }
    const Index bins = n / bin_cells;
    const RealField rho = psi_final.density();
    RealField expected = RealField::Zero(bins);
    for (Index j = 0; j < n; ++j) {
        const double right = j + 1 < n ? rho[j + 1] : 0.0;
        expected[j / bin_cells] += 0.5 * grid.dx() * (rho[j] + right);
    }
    expected /= expected.sum();

    RealField observed = RealField::Zero(bins);
    const Index last = bundle.positions.rows() - 1;
    Index used = 0;
    for (Index i = 0; i < bundle.count(); ++i) {
        const double x = bundle.positions(last, i);
        if (std::isnan(x)) {
            continue;
        }
        const auto b = static_cast<Index>(std::floor((x - grid.x_min()) / (grid.dx() * static_cast<double>(bin_cells))));
        observed[std::clamp<Index>(b, 0, bins - 1)] += 1.0;
        ++used;
    }
    if (used == 0) {
        throw NumericalError("no untruncated trajectories to histogram");
    }
    observed /= static_cast<double>(used);
    return (observed - expected).cwiseAbs().sum();
}

} // namespace qtlab
