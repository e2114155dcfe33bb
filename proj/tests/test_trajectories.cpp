#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qtlab/trajectories.hpp"

using namespace qtlab;

namespace {

WaveFunction coherent(const Grid1D& g, double q0, double p0) {
    return oracle::sample(g, 0.0, [&](double x) { return oracle::coherent_state(x, 0.0, q0, p0, 1.0, 1.0); });
}

SnapshotSeries run(const WaveFunction& psi0, double dt, Index steps, Index stride, Potential v) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.steps = steps;
    cfg.snapshot_stride = stride;
    cfg.potential = std::move(v);
    return evolve(psi0, cfg);
}

double worst(const std::vector<HamiltonResidual>& r, double HamiltonResidual::*field) {
    double w = 0.0;
    for (const auto& h : r) {
        w = std::max(w, h.*field);
    }
    return w;
}

} // namespace

TEST_CASE("cubic interpolation is exact for cubics") {
    const Grid1D g = Grid1D::centered(32, 8.0);
    RealField f(32);
    for (Index j = 0; j < 32; ++j) {
        const double x = g.x(j);
        f[j] = 1.0 - 2.0 * x + 0.5 * x * x * x;
    }
    double out = 0.0;
    REQUIRE(detail::cubic_interpolate(g, f, 0.3, out) == detail::Lookup::Ok);
    CHECK(out == doctest::Approx(1.0 - 0.6 + 0.5 * 0.027));
    CHECK(detail::cubic_interpolate(g, f, 5.0, out) == detail::Lookup::OutOfDomain);
    f[16] = std::nan("");
    CHECK(detail::cubic_interpolate(g, f, 0.1, out) == detail::Lookup::Masked);
}

TEST_CASE("stratified seeds follow the density quantiles") {
    const Grid1D g = Grid1D::centered(512, 40.0);
    const WaveFunction psi = make_gaussian(g, 1.0, 0.0, 1.0);
    const RealField seeds = stratified_seeds(psi, 1001);
    CHECK(std::abs(seeds[500] - 1.0) < 1e-4);
    for (Index i = 1; i < seeds.size(); ++i) {
        CHECK(seeds[i] > seeds[i - 1]);
    }
    // the first quartile of N(1, 1) sits at 1 - 0.6745
    CHECK(seeds[250] == doctest::Approx(1.0 - 0.6744897501960817).epsilon(1e-3));
    CHECK_THROWS_AS(stratified_seeds(psi, 0), ConfigError);
}

TEST_CASE("ground state trajectories stay put") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const SnapshotSeries s = run(coherent(g, 0.0, 0.0), 1e-3, 10000, 100, potential::Harmonic{1.0});
    RealField seeds(5);
    seeds << -1.5, -0.4, 0.0, 0.7, 2.1;
    const TrajectoryBundle b = integrate_bundle(s, seeds, 1.0);
    CHECK(b.truncations.empty());
    for (Index i = 0; i < seeds.size(); ++i) {
        CHECK((b.positions.col(i).array() - seeds[i]).abs().maxCoeff() < 1e-6);
    }
    const auto r = hamilton_check(b, s, 1.0, potential::Harmonic{1.0});
    CHECK(worst(r, &HamiltonResidual::r_x) < 1e-6);
    CHECK(worst(r, &HamiltonResidual::r_p) < 1e-6);
}

TEST_CASE("coherent state centre follows the classical orbit") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const SnapshotSeries s = run(coherent(g, 2.0, 0.0), 1e-3, 6000, 10, potential::Harmonic{1.0});
    RealField seeds(1);
    seeds << 2.0;
    const TrajectoryBundle b = integrate_bundle(s, seeds, 1.0);
    for (size_t k = 0; k < b.times.size(); ++k) {
        CHECK(std::abs(b.positions(static_cast<Index>(k), 0) - 2.0 * std::cos(b.times[k])) < 1e-4);
    }
    // the quantum potential along the path is the centre value omega/2
    CHECK((b.quantum_potential.col(0).array() - 0.5).abs().maxCoeff() < 1e-6);
}

TEST_CASE("hamilton equations along coherent-state paths") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const WaveFunction psi0 = coherent(g, 2.0, 0.0);
    const RealField seeds = stratified_seeds(psi0, 50);
    auto residuals = [&](Index stride) {
        const SnapshotSeries s = run(psi0, 1e-3, 3000, stride, potential::Harmonic{1.0});
        return hamilton_check(integrate_bundle(s, seeds, 1.0), s, 1.0, potential::Harmonic{1.0});
    };
    const auto coarse = residuals(10);
    const auto fine = residuals(5);
    CHECK(worst(coarse, &HamiltonResidual::r_x) < 1e-4);
    CHECK(worst(coarse, &HamiltonResidual::r_p) < 5e-3);
    CHECK(worst(coarse, &HamiltonResidual::r_p) / worst(fine, &HamiltonResidual::r_p) >= 1.8);
    CHECK(worst(coarse, &HamiltonResidual::r_x) / worst(fine, &HamiltonResidual::r_x) >= 1.8);
}

TEST_CASE("free gaussian symmetry seed") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const SnapshotSeries s = run(make_gaussian(g, 0.0, 0.0, 1.0), 1e-3, 2000, 10, potential::Free{});
    RealField seeds(1);
    seeds << 0.0;
    const TrajectoryBundle b = integrate_bundle(s, seeds, 1.0);
    CHECK(b.positions.col(0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coarse snapshots are rejected") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const SnapshotSeries s = run(make_gaussian(g, -5.0, 4.0, 1.0), 1e-3, 1000, 500, potential::Free{});
    RealField seeds(1);
    seeds << -5.0;
    CHECK_THROWS_AS(integrate_bundle(s, seeds, 1.0), NumericalError);
}

TEST_CASE("seeds outside the support are truncated, not fatal") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const SnapshotSeries s = run(make_gaussian(g, 0.0, 0.0, 1.0), 1e-3, 100, 10, potential::Free{});
    RealField seeds(3);
    seeds << 0.0, 15.0, 25.0;
    const TrajectoryBundle b = integrate_bundle(s, seeds, 1.0);
    REQUIRE(b.truncations.size() == 2);
    CHECK(b.truncations[0].trajectory == 1);
    CHECK(b.truncations[0].reason == TruncationReason::MaskedRegion);
    CHECK(b.truncations[1].reason == TruncationReason::OutOfDomain);
    CHECK(b.truncated(1));
    CHECK_FALSE(b.truncated(0));
    CHECK(std::isnan(b.positions(0, 1)));
}

TEST_CASE("two-slit scenario validation") {
    TwoSlitScenario sc;
    sc.separation = 3.0;
    CHECK_THROWS_AS(validate(sc), ConfigError);
    sc.separation = 8.0;
    sc.trajectories = 0;
    CHECK_THROWS_AS(validate(sc), ConfigError);
}

TEST_CASE("two-slit fan") {
    const Grid1D g = Grid1D::centered(512, 80.0);
    TwoSlitScenario sc;
    EvolutionConfig cfg;
    cfg.snapshot_stride = 10;
    const TwoSlitRun run = run_two_slit(sc, g, cfg);
    const TrajectoryBundle& b = run.bundle;
    REQUIRE(b.count() == 2000);
    CHECK(b.seed_rule == "stratified_inverse_cdf");
    CHECK(b.times.back() == doctest::Approx(6.0));
    CHECK(b.truncations.empty());
    CHECK(crossing_violations(b) == 0);
    CHECK(endpoint_l1(b, run.series.snapshots.back()) < 0.05);

    // paired seeds are mirror images, and the fan is mirror symmetric
    for (Index i = 0; i < 1000; ++i) {
        CHECK(std::abs(b.seeds[i] + b.seeds[1999 - i]) < 1e-9);
        CHECK(std::abs(b.positions(b.positions.rows() - 1, i) + b.positions(b.positions.rows() - 1, 1999 - i)) < 1e-6);
    }

    RealField centre(1);
    centre << 0.0;
    const TrajectoryBundle mid = integrate_bundle(run.series, centre, 1.0);
    CHECK(mid.positions.col(0).cwiseAbs().maxCoeff() < 1e-12);
}
