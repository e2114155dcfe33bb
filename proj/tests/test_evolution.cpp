#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtlab/evolution.hpp"

using namespace qtlab;

namespace {

WaveFunction ground_state(const Grid1D& g) {
    return oracle::sample(g, 0.0, [](double x) { return oracle::coherent_state(x, 0.0, 0.0, 0.0, 1.0, 1.0); });
}

double l2_to(const WaveFunction& psi, auto&& exact) {
    double acc = 0.0;
    for (Index j = 0; j < psi.size(); ++j) {
        acc += std::norm(psi[j] - exact(psi.grid().x(j)));
    }
    return std::sqrt(acc * psi.grid().dx());
}

double position_variance(const WaveFunction& psi) {
    const RealField x = psi.grid().positions();
    const RealField rho = psi.density();
    const double dx = psi.grid().dx();
    const double mean = x.cwiseProduct(rho).sum() * dx;
    return (x.array().square() * rho.array()).sum() * dx - mean * mean;
}

} // namespace

TEST_CASE("config validation") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    EvolutionConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(validate(cfg, g), ConfigError);
    cfg.dt = 1e-3;
    cfg.mass = 0.0;
    CHECK_THROWS_AS(validate(cfg, g), ConfigError);
    cfg.mass = 1.0;
    cfg.snapshot_stride = 0;
    CHECK_THROWS_AS(validate(cfg, g), ConfigError);
    cfg.snapshot_stride = 1;
    cfg.potential = potential::Harmonic{-1.0};
    CHECK_THROWS_AS(validate(cfg, g), ConfigError);
    cfg.potential = potential::Harmonic{1.0};
    CHECK_NOTHROW(validate(cfg, g));
    cfg.dt = 0.1;  // dt kmax^2 / 2 = 14 > 0.5
    CHECK_THROWS_AS(validate(cfg, g), NumericalError);
    cfg.dt = 1e-3;
    cfg.potential = potential::Barrier{1e4, 1.0};
    CHECK_THROWS_AS(validate(cfg, g), NumericalError);
}

TEST_CASE("zero steps returns the input") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const WaveFunction psi = make_gaussian(g, 1.0, 0.5, 1.0);
    EvolutionConfig cfg;
    const SnapshotSeries s = evolve(psi, cfg);
    REQUIRE(s.size() == 1);
    CHECK(s[0].amps() == psi.amps());
}

TEST_CASE("snapshot bookkeeping") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    EvolutionConfig cfg;
    cfg.steps = 25;
    cfg.snapshot_stride = 10;
    const SnapshotSeries s = evolve(make_gaussian(g, 0.0, 0.0, 1.0), cfg);
    REQUIRE(s.size() == 4);  // steps 0, 10, 20, 25
    CHECK(s[3].time() == doctest::Approx(0.025));
    CHECK_FALSE(s.uniform());
}

TEST_CASE("harmonic ground state only rotates its phase") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const WaveFunction psi0 = ground_state(g);
    EvolutionConfig cfg;
    cfg.steps = 1000;
    cfg.potential = potential::Harmonic{1.0};
    const SnapshotSeries s = evolve(psi0, cfg);
    const WaveFunction& psi = s.snapshots.back();
    const Complex phase = std::polar(1.0, -0.5 * psi.time());
    CHECK((psi.amps() - phase * psi0.amps()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("free gaussian against the analytic spreading solution") {
    const Grid1D g = Grid1D::centered(512, 60.0);
    const WaveFunction psi0 = make_gaussian(g, -2.0, 1.0, 1.0);
    EvolutionConfig cfg;
    cfg.steps = 1000;
    cfg.snapshot_stride = 1000;
    const WaveFunction psi = evolve(psi0, cfg).snapshots.back();
    CHECK(psi.time() == doctest::Approx(1.0));
    const double err = l2_to(psi, [](double x) { return oracle::free_gaussian(x, 1.0, -2.0, 1.0, 1.0); });
    CHECK(err < 1e-6);
    CHECK(std::abs(position_variance(psi) - 1.25) < 1e-6);
}

TEST_CASE("norm drift and energy conservation") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const WaveFunction psi0 = oracle::sample(g, 0.0, [](double x) { return oracle::coherent_state(x, 0.0, 2.0, 0.5, 1.0, 1.0); });
    const Potential v = potential::Harmonic{1.0};
    const double e0 = energy(psi0, 1.0, v);
    // E = omega/2 + (p^2 + K x^2)/2 for the coherent state
    CHECK(e0 == doctest::Approx(0.5 + 0.5 * (4.0 + 0.25)).epsilon(1e-10));

    auto worst_energy_drift = [&](double dt, Index steps) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.steps = steps;
        cfg.snapshot_stride = steps / 10;
        cfg.potential = v;
        double worst = 0.0;
        for (const auto& psi : evolve(psi0, cfg).snapshots) {
            CHECK(std::abs(psi.norm2() - 1.0) < 1e-10);
            worst = std::max(worst, std::abs(energy(psi, 1.0, v) - e0) / e0);
        }
        return worst;
    };
    // <H> is conserved by Strang splitting only up to O(dt^2)
    const double coarse = worst_energy_drift(1e-3, 1000);
    const double fine = worst_energy_drift(2.5e-4, 4000);
    CHECK(fine < 1e-8);
    CHECK(coarse / fine == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("strang stepping converges at second order") {
    // Strang splitting is exact without a potential, so the study uses the
    // oscillator, whose coherent states have closed-form evolution.
    const Grid1D g = Grid1D::centered(128, 24.0);
    auto exact = [](double t) {
        return [t](double x) { return oracle::coherent_state(x, t, 2.0, 0.0, 1.0, 1.0); };
    };
    const WaveFunction psi0 = oracle::sample(g, 0.0, exact(0.0));
    double previous = 0.0;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.steps = std::llround(1.0 / dt);
        cfg.snapshot_stride = cfg.steps;
        cfg.potential = potential::Harmonic{1.0};
        const WaveFunction psi = evolve(psi0, cfg).snapshots.back();
        const double err = l2_to(psi, exact(psi.time()));
        if (previous > 0.0) {
            CHECK(previous / err == doctest::Approx(4.0).epsilon(0.1));
        }
        previous = err;
    }
}

TEST_CASE("boundary leak is detected") {
    const Grid1D g = Grid1D::centered(128, 24.0);
    const WaveFunction psi0 = make_gaussian(g, 0.0, 6.0, 1.0);
    EvolutionConfig cfg;
    cfg.steps = 4000;
    CHECK_THROWS_AS(evolve(psi0, cfg), NumericalError);
}

TEST_CASE("kernel actions") {
    const KernelKind free = kernel::Free{};
    const KernelKind osc = kernel::Harmonic{1.0};
    CHECK(analytic_kernel_action(free, 1.0, 1.0, 0.0, 0.5) == doctest::Approx(1.0));
    CHECK(analytic_kernel_action(free, 1.0, 0.4, 0.4, 0.7) == 0.0);
    const double q = oracle::kPi / 2.0;
    CHECK(analytic_kernel_action(osc, 1.0, 0.7, 0.3, q) == doctest::Approx(-0.21));
    CHECK_THROWS_AS(analytic_kernel_action(osc, 1.0, 0.7, 0.3, oracle::kPi), NumericalError);
    CHECK_THROWS_AS(analytic_kernel_action(free, 1.0, 0.7, 0.3, 0.0), ConfigError);
}

TEST_CASE("dirac momenta examples") {
    const DiracMomenta f = dirac_momenta(kernel::Free{}, 1.0, 1.0, 0.0, 0.5);
    CHECK(f.final_momentum == doctest::Approx(2.0));
    CHECK(f.initial_momentum == doctest::Approx(2.0));
    const DiracMomenta h = dirac_momenta(kernel::Harmonic{1.0}, 1.0, 0.7, 0.3, oracle::kPi / 2.0);
    CHECK(h.final_momentum == doctest::Approx(-0.3));
    CHECK(h.initial_momentum == doctest::Approx(0.7));
    const DiracMomenta z = dirac_momenta(kernel::Free{}, 1.0, 0.3, 0.3, 0.5);
    CHECK(z.final_momentum == 0.0);
    CHECK(z.initial_momentum == 0.0);
}

TEST_CASE("analytic and finite-difference dirac momenta agree") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    std::uniform_real_distribution<double> dur(0.1, 2.9);
    for (int i = 0; i < 100; ++i) {
        const double x = pos(rng);
        const double x0 = pos(rng);
        const double eps = dur(rng);
        CHECK(dirac_momenta(kernel::Free{}, 1.0, x, x0, eps).max_relative_gap() < 1e-7);
        CHECK(dirac_momenta(kernel::Harmonic{1.0}, 1.0, x, x0, eps).max_relative_gap() < 1e-7);
    }
}

TEST_CASE("kernel propagation matches split-operator evolution") {
    SUBCASE("free gaussian") {
        const Grid1D g = Grid1D::centered(256, 40.0);
        const WaveFunction psi0 = make_gaussian(g, 0.0, 0.0, 1.0);
        EvolutionConfig cfg;
        cfg.steps = 1000;
        cfg.snapshot_stride = 1000;
        const WaveFunction a = evolve(psi0, cfg).snapshots.back();
        const WaveFunction b = kernel_propagate(psi0, kernel::Free{}, 1.0, 1.0);
        CHECK(l2_distance(a, b) < 1e-5);
    }
    SUBCASE("full oscillator period returns the state up to a phase") {
        const Grid1D g = Grid1D::centered(128, 24.0);
        const WaveFunction psi0 =
            oracle::sample(g, 0.0, [](double x) { return oracle::coherent_state(x, 0.0, 2.0, 0.0, 1.0, 1.0); });
        const WaveFunction b = kernel_propagate(psi0, kernel::Harmonic{1.0}, 1.0, 2.0 * oracle::kPi);
        const Complex overlap = inner_product(psi0, b);
        CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-6);
        CHECK(std::abs(overlap + 1.0) < 1e-6);  // the period sign
    }
    SUBCASE("short durations converge") {
        const Grid1D g = Grid1D::centered(128, 24.0);
        const WaveFunction psi0 =
            oracle::sample(g, 0.0, [](double x) { return oracle::coherent_state(x, 0.0, 2.0, 0.0, 1.0, 1.0); });
        double previous = 1.0;
        for (double eps : {0.1, 0.05, 0.025}) {
            EvolutionConfig cfg;
            cfg.dt = eps / 100.0;
            cfg.steps = 100;
            cfg.snapshot_stride = 100;
            cfg.potential = potential::Harmonic{1.0};
            const double err = l2_distance(evolve(psi0, cfg).snapshots.back(),
                                           kernel_propagate(psi0, kernel::Harmonic{1.0}, 1.0, eps));
            CHECK(err < previous);
            CHECK(err < 1e-5);
            previous = err;
        }
    }
}
