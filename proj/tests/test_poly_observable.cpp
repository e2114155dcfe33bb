#include "doctest.h"

#include <cmath>
#include <random>

#include "qtlab/poly_observable.hpp"

using namespace qtlab;

namespace {

using C = std::complex<double>;
const Observable X = Observable::x();
const Observable P = Observable::p();

Observable random_poly(std::mt19937_64& rng, int degree) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    Observable out;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            out.add(a, b, C(coeff(rng), coeff(rng)));
        }
    }
    return out;
}

// Direct expansion of f(x,p) exp(i hbar/2 (<-d_x ->d_p - <-d_p ->d_x)) g(x,p)
// by repeated differentiation, independent of the closed-form weights.
Observable star_by_derivatives(const Observable& f, const Observable& g, double hbar) {
    auto product = [](const Observable& u, const Observable& v) {
        Observable out;
        for (int a1 = 0; a1 <= 12; ++a1)
            for (int a2 = 0; a1 + a2 <= 12; ++a2)
                for (int b1 = 0; b1 <= 12; ++b1)
                    for (int b2 = 0; b1 + b2 <= 12; ++b2) {
                        const C c = u.coeff(a1, a2) * v.coeff(b1, b2);
                        if (c != C(0)) {
                            out.add(a1 + b1, a2 + b2, c);
                        }
                    }
        return out;
    };
    Observable out;
    double factorial = 1.0;
    for (int k = 0; k <= 12; ++k) {
        if (k > 0) {
            factorial *= k;
        }
        const C scale = std::pow(C(0.0, hbar / 2.0), k) / factorial;
        for (int j = 0; j <= k; ++j) {
            // binomial(k, j) (d_x^{k-j} d_p^j f) (d_p^{k-j} d_x^j g) (-1)^j
            double binom = 1.0;
            for (int i = 1; i <= j; ++i) {
                binom = binom * (k - j + i) / i;
            }
            const double sign = j % 2 == 0 ? 1.0 : -1.0;
            out += product(f.derivative(k - j, j), g.derivative(j, k - j)) * (scale * binom * sign);
        }
    }
    return out;
}

} // namespace

TEST_CASE("monomials and degrees") {
    CHECK(Observable().degree() == -1);
    CHECK(Observable::constant(2.0).degree() == 0);
    CHECK(Observable::monomial(3, 4).degree() == 7);
    CHECK_THROWS_AS(Observable::monomial(7, 6), ConfigError);
    CHECK_THROWS_AS(Observable::monomial(-1, 2), ConfigError);
    const Observable d = Observable::monomial(3, 2, 2.0).derivative(1, 1);
    CHECK(d == Observable::monomial(2, 1, 12.0));
}

TEST_CASE("star product basics") {
    const double hbar = 0.5;
    const Observable xp = star(X, P, hbar);
    CHECK(xp == Observable::monomial(1, 1) + Observable::constant(C(0.0, hbar / 2.0)));
    const Observable px = star(P, X, hbar);
    CHECK(px == Observable::monomial(1, 1) + Observable::constant(C(0.0, -hbar / 2.0)));

    std::mt19937_64 rng(1);
    const Observable a = random_poly(rng, 5);
    CHECK(star(a, Observable::constant(1.0), hbar) == a);
    CHECK(star(Observable::constant(1.0), a, hbar) == a);
    CHECK_THROWS_AS(star(Observable::monomial(7, 0), Observable::monomial(0, 6), hbar), ConfigError);
}

TEST_CASE("star product agrees with the derivative expansion") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Observable a = random_poly(rng, 4);
        const Observable b = random_poly(rng, 4);
        for (double hbar : {1.0, 0.25}) {
            const Observable diff = star(a, b, hbar) - star_by_derivatives(a, b, hbar);
            CHECK(diff.max_abs_coeff() == 0.0);
        }
    }
}

TEST_CASE("star product is associative on coefficients") {
    CHECK(star(star(X, P, 1.0), P, 1.0) == star(X, star(P, P, 1.0), 1.0));
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Observable a = random_poly(rng, 4);
        const Observable b = random_poly(rng, 4);
        const Observable c = random_poly(rng, 4);
        for (double hbar : {1.0, 0.5, 0.125}) {
            CHECK(star(star(a, b, hbar), c, hbar) == star(a, star(b, c, hbar), hbar));
        }
    }
}

TEST_CASE("star product is bilinear") {
    std::mt19937_64 rng(8);
    const Observable a = random_poly(rng, 3);
    const Observable b = random_poly(rng, 3);
    const Observable c = random_poly(rng, 3);
    CHECK(star(a + b, c, 1.0) == star(a, c, 1.0) + star(b, c, 1.0));
    CHECK(star(a, b * C(2.0, -1.0), 1.0) == star(a, b, 1.0) * C(2.0, -1.0));
}

TEST_CASE("poisson bracket") {
    CHECK(poisson_bracket(X, P) == Observable::constant(1.0));
    CHECK(poisson_bracket(Observable::monomial(2, 0), Observable::monomial(0, 2)) == Observable::monomial(1, 1, 4.0));
    std::mt19937_64 rng(2);
    const Observable a = random_poly(rng, 5);
    CHECK(poisson_bracket(a, a).is_zero());
}

TEST_CASE("moyal and baker brackets") {
    for (double hbar : {1.0, 0.5, 0.03125}) {
        CHECK(moyal_bracket(Observable::monomial(2, 0), Observable::monomial(0, 2), hbar) ==
              Observable::monomial(1, 1, 4.0));
        CHECK(baker_bracket(X, P, hbar) == Observable::monomial(1, 1));
    }
    CHECK_THROWS_AS(moyal_bracket(X, P, 0.0), ConfigError);

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        Observable a;
        Observable b;
        for (int i = 0; i <= 5; ++i) {
            for (int j = 0; i + j <= 5; ++j) {
                a.add(i, j, static_cast<double>(static_cast<int>(rng() % 7) - 3));
                b.add(i, j, static_cast<double>(static_cast<int>(rng() % 7) - 3));
            }
        }
        const Observable m = moyal_bracket(a, b, 0.5);
        const Observable k = baker_bracket(a, b, 0.5);
        CHECK(m.is_real());
        CHECK(k.is_real());
        CHECK(m == moyal_bracket(b, a, 0.5) * C(-1.0));
        CHECK(k == baker_bracket(b, a, 0.5));
    }
}

TEST_CASE("moyal equals poisson when one symbol is at most quadratic") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const Observable q = random_poly(rng, 2);
        const Observable a = random_poly(rng, 6);
        for (double hbar : {1.0, 0.5}) {
            CHECK(moyal_bracket(q, a, hbar) == poisson_bracket(q, a));
            CHECK(moyal_bracket(a, q, hbar) == poisson_bracket(a, q));
        }
    }
}

TEST_CASE("moyal correction on cubics scales as hbar squared") {
    const Observable a = Observable::monomial(3, 0);
    const Observable b = Observable::monomial(0, 3);
    // {x^3, p^3}_M - {x^3, p^3} = -(3/2) hbar^2 from the third-order term
    std::vector<double> hbars{1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> size;
    for (double hbar : hbars) {
        const Observable d = moyal_bracket(a, b, hbar) - poisson_bracket(a, b);
        CHECK(d == Observable::constant(-1.5 * hbar * hbar));
        size.push_back(d.max_abs_coeff());
    }
    for (size_t i = 1; i < hbars.size(); ++i) {
        const double slope = std::log(size[i] / size[i - 1]) / std::log(hbars[i] / hbars[i - 1]);
        CHECK(std::abs(slope - 2.0) < 1e-9);
    }
}
