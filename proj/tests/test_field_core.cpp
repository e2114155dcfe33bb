#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtlab/field_core.hpp"

using namespace qtlab;

namespace {

Index argmax(const RealField& v) {
    Index i = 0;
    v.maxCoeff(&i);
    return i;
}

} // namespace

TEST_CASE("grid validates its shape") {
    CHECK_THROWS_AS(Grid1D(4, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid1D(100, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid1D(64, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(Grid1D(64, 0.0, -0.1), ConfigError);

    const Grid1D g = Grid1D::centered(64, 16.0);
    CHECK(g.dx() == doctest::Approx(0.25));
    CHECK(g.x(0) == doctest::Approx(-8.0));
    CHECK(g.length() == doctest::Approx(16.0));
    const RealField k = g.wavenumbers();
    CHECK(k.cwiseAbs().maxCoeff() == doctest::Approx(g.max_wavenumber()));
    CHECK(k[1] == doctest::Approx(2.0 * oracle::kPi / 16.0));
    CHECK(k[63] == doctest::Approx(-2.0 * oracle::kPi / 16.0));
}

TEST_CASE("wavefunction rejects non-finite amplitudes and size mismatch") {
    const Grid1D g = Grid1D::centered(16, 8.0);
    ComplexField amps = ComplexField::Ones(16);
    amps[3] = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(WaveFunction(g, amps), NumericalError);
    CHECK_THROWS_AS(WaveFunction(g, ComplexField::Ones(8)), ConfigError);
}

TEST_CASE("gaussian density and normalization") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const WaveFunction psi = make_gaussian(g, 0.0, 0.0, 1.0);
    CHECK(std::abs(psi.norm2() - 1.0) < 1e-12);
    const Index mid = 128;
    REQUIRE(g.x(mid) == doctest::Approx(0.0));
    CHECK(psi.density()[mid] == doctest::Approx(1.0 / std::sqrt(2.0 * oracle::kPi)).epsilon(1e-12));

    for (Index j = 0; j < g.size(); ++j) {
        CHECK(std::abs(psi[j] - oracle::free_gaussian(g.x(j), 0.0, 0.0, 0.0, 1.0)) < 1e-12);
    }
}

TEST_CASE("gaussian preconditions") {
    const Grid1D g = Grid1D::centered(64, 40.0);
    CHECK_THROWS_AS(make_gaussian(g, 0.0, 0.0, 1.0), NumericalError);  // sigma < 3 dx
    const Grid1D small = Grid1D::centered(256, 12.0);
    CHECK_THROWS_AS(make_gaussian(small, 0.0, 0.0, 1.0), NumericalError);  // tail leaks
}

TEST_CASE("momentum transform against direct summation") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const WaveFunction psi = make_gaussian(g, 1.5, 2.0, 1.0);
    const MomentumWaveFunction phi = to_momentum(psi);
    const RealField p = phi.momenta();
    for (Index j = 0; j < g.size(); j += 7) {
        CHECK(std::abs(phi.amps()[j] - oracle::direct_momentum(psi, p[j])) < 1e-12);
    }
    // peak at p0 = 2
    const RealField dens = phi.centered_amps().cwiseAbs2();
    CHECK(std::abs(phi.centered_momenta()[argmax(dens)] - 2.0) <= 0.5 * phi.dp());
}

TEST_CASE("momentum width of a unit gaussian is one half") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const MomentumWaveFunction phi = to_momentum(make_gaussian(g, 0.0, 0.0, 1.0));
    const RealField p = phi.centered_momenta();
    const RealField dens = phi.centered_amps().cwiseAbs2();
    const double mean = (p.cwiseProduct(dens)).sum() * phi.dp();
    const double var = (p.array().square() * dens.array()).sum() * phi.dp() - mean * mean;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::sqrt(var) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("translation only changes the momentum phase") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const RealField a = to_momentum(make_gaussian(g, 0.0, 0.0, 1.0)).amps().cwiseAbs();
    const RealField b = to_momentum(make_gaussian(g, 3.0, 0.0, 1.0)).amps().cwiseAbs();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("round trip and parseval on random states") {
    std::mt19937_64 rng(7);
    const Grid1D g = Grid1D::centered(512, 60.0);
    for (int trial = 0; trial < 20; ++trial) {
        const WaveFunction psi = oracle::random_superposition(g, rng);
        const MomentumWaveFunction phi = to_momentum(psi);
        CHECK(std::abs(phi.norm2() - psi.norm2()) / psi.norm2() < 1e-10);
        const WaveFunction back = to_position(phi);
        CHECK((back.amps() - psi.amps()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(back.time() == psi.time());
    }
}

TEST_CASE("spectral derivative") {
    const Grid1D g = Grid1D::centered(128, 20.0);
    SUBCASE("plane wave on the grid") {
        const double k1 = 5.0 * g.dk();
        const WaveFunction e = oracle::sample(g, 0.0, [&](double x) { return std::polar(1.0, k1 * x); });
        const ComplexField d = spectral_derivative(e, 1);
        CHECK((d - Complex(0.0, k1) * e.amps()).cwiseAbs().maxCoeff() < 1e-12);
        const ComplexField d2 = spectral_derivative(e, 2);
        CHECK((d2 + k1 * k1 * e.amps()).cwiseAbs().maxCoeff() < 1e-11);
    }
    SUBCASE("constant") {
        const WaveFunction c = oracle::sample(g, 0.0, [](double) { return Complex(0.3, -0.2); });
        CHECK(spectral_derivative(c, 1).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(spectral_derivative(c, 2).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("gaussian second derivative at the centre") {
        const Grid1D big = Grid1D::centered(256, 40.0);
        const WaveFunction psi = make_gaussian(big, 0.0, 0.0, 1.0);
        const ComplexField d2 = spectral_derivative(psi, 2);
        CHECK(std::abs(d2[128] - (-0.5) * psi[128]) < 1e-10);
    }
    SUBCASE("agrees with fourth order differences") {
        std::mt19937_64 rng(11);
        double previous = 0.0;
        for (Index n : {256, 512, 1024}) {
            const Grid1D fine = Grid1D::centered(n, 40.0);
            std::mt19937_64 local = rng;
            const WaveFunction psi = oracle::random_superposition(fine, local);
            const double err =
                (spectral_derivative(psi, 1) - oracle::fd4_derivative(psi.amps(), fine.dx())).cwiseAbs().maxCoeff();
            if (previous > 0.0) {
                // O(dx^4): halving dx cuts the gap by ~16
                CHECK(previous / err > 12.0);
            }
            previous = err;
        }
    }
}

TEST_CASE("spectral refinement interpolates band-limited data") {
    const Grid1D g = Grid1D::centered(64, 24.0);
    const WaveFunction psi =
        oracle::sample(g, 0.0, [](double x) { return oracle::free_gaussian(x, 0.0, 0.5, 1.0, 1.2); });
    const ComplexField fine = spectral_refine(psi.amps(), 4);
    REQUIRE(fine.size() == 256);
    for (Index j = 0; j < fine.size(); ++j) {
        const double x = g.x_min() + static_cast<double>(j) * g.dx() / 4.0;
        CHECK(std::abs(fine[j] - oracle::free_gaussian(x, 0.0, 0.5, 1.0, 1.2)) < 1e-9);
    }
}

TEST_CASE("inner product and distance") {
    const Grid1D g = Grid1D::centered(256, 40.0);
    const WaveFunction a = make_gaussian(g, 0.0, 0.0, 1.0);
    const WaveFunction b = make_gaussian(g, 1.0, 0.0, 1.0);
    // <a|b> for equal-width gaussians: exp(-d^2 / (8 sigma^2))
    CHECK(std::abs(inner_product(a, b) - std::exp(-1.0 / 8.0)) < 1e-12);
    CHECK(l2_distance(a, a) == 0.0);
    CHECK(l2_distance(a, b) == doctest::Approx(std::sqrt(2.0 - 2.0 * std::exp(-1.0 / 8.0))));
}
