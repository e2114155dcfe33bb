#ifndef QTLAB_POLY_OBSERVABLE_HPP
#define QTLAB_POLY_OBSERVABLE_HPP

#include <algorithm>
#include <complex>
#include <ostream>

#include <Eigen/Core>

#include "qtlab/error.hpp"

namespace qtlab {

/**
 * Weyl symbol sum_{a,b} c_ab x^a p^b with total degree at most 12.
 *
 * Coefficients live in a dense (13 x 13) matrix indexed by the x and p
 * exponents; entries with a + b > 12 are always zero. With integer inputs
 * and a dyadic hbar every operation below is exact in binary floating point.
 */
template <typename Scalar = std::complex<double>>
class PolyObservable {
public:
    static constexpr int kMaxDegree = 12;
    using Coefficients = Eigen::Matrix<Scalar, kMaxDegree + 1, kMaxDegree + 1>;
    using RealScalar = typename Eigen::NumTraits<Scalar>::Real;

    PolyObservable() : c_(Coefficients::Zero()) {}

    static PolyObservable monomial(int x_power, int p_power, Scalar coeff = Scalar(1)) {
        PolyObservable out;
        out.add(x_power, p_power, coeff);
        return out;
    }
    static PolyObservable constant(Scalar value) { return monomial(0, 0, value); }
    static PolyObservable x() { return monomial(1, 0); }
    static PolyObservable p() { return monomial(0, 1); }

    Scalar coeff(int x_power, int p_power) const {
        if (x_power < 0 || p_power < 0 || x_power + p_power > kMaxDegree) {
            return Scalar(0);
        }
        return c_(x_power, p_power);
    }

    void add(int x_power, int p_power, Scalar value) {
        if (x_power < 0 || p_power < 0) {
            throw ConfigError("polynomial exponents must be non-negative");
        }
        if (x_power + p_power > kMaxDegree) {
            throw ConfigError("polynomial degree exceeds 12");
        }
        c_(x_power, p_power) += value;
    }

    const Coefficients& coefficients() const { return c_; }

    /// Total degree, -1 for the zero polynomial.
    int degree() const {
        int d = -1;
        for (int a = 0; a <= kMaxDegree; ++a) {
            for (int b = 0; a + b <= kMaxDegree; ++b) {
                if (c_(a, b) != Scalar(0)) {
                    d = std::max(d, a + b);
                }
            }
        }
        return d;
    }

    bool is_zero() const { return degree() < 0; }

    /// True when every coefficient has |Im| <= tol.
    bool is_real(RealScalar tol = RealScalar(0)) const {
        for (int a = 0; a <= kMaxDegree; ++a) {
            for (int b = 0; b <= kMaxDegree; ++b) {
                if (std::abs(std::imag(c_(a, b))) > tol) {
                    return false;
                }
            }
        }
        return true;
    }

    RealScalar max_abs_coeff() const { return c_.cwiseAbs().maxCoeff(); }

    /// d^i/dx^i d^j/dp^j
    PolyObservable derivative(int x_order, int p_order) const {
        PolyObservable out;
        for (int a = x_order; a <= kMaxDegree; ++a) {
            for (int b = p_order; a + b <= kMaxDegree; ++b) {
                if (c_(a, b) == Scalar(0)) {
                    continue;
                }
                const RealScalar f = falling(a, x_order) * falling(b, p_order);
                out.c_(a - x_order, b - p_order) += Scalar(f) * c_(a, b);
            }
        }
        return out;
    }

    PolyObservable& operator+=(const PolyObservable& o) {
        c_ += o.c_;
        return *this;
    }
    PolyObservable& operator-=(const PolyObservable& o) {
        c_ -= o.c_;
        return *this;
    }
    PolyObservable& operator*=(Scalar s) {
        c_ *= s;
        return *this;
    }
    friend PolyObservable operator+(PolyObservable a, const PolyObservable& b) { return a += b; }
    friend PolyObservable operator-(PolyObservable a, const PolyObservable& b) { return a -= b; }
    friend PolyObservable operator*(PolyObservable a, Scalar s) { return a *= s; }
    friend PolyObservable operator*(Scalar s, PolyObservable a) { return a *= s; }
    friend bool operator==(const PolyObservable& a, const PolyObservable& b) { return a.c_ == b.c_; }

    /// n (n-1) ... (n-k+1)
    static RealScalar falling(int n, int k) {
        RealScalar f(1);
        for (int i = 0; i < k; ++i) {
            f *= RealScalar(n - i);
        }
        return f;
    }

    static RealScalar binomial(int n, int k) {
        if (k < 0 || k > n) {
            return RealScalar(0);
        }
        RealScalar f(1);
        for (int i = 1; i <= k; ++i) {
            f = f * RealScalar(n - k + i) / RealScalar(i);
        }
        return f;
    }

private:
    Coefficients c_;
};

template <typename Scalar>
std::ostream& operator<<(std::ostream& os, const PolyObservable<Scalar>& poly) {
    bool first = true;
    for (int a = 0; a <= PolyObservable<Scalar>::kMaxDegree; ++a) {
        for (int b = 0; a + b <= PolyObservable<Scalar>::kMaxDegree; ++b) {
            const Scalar c = poly.coeff(a, b);
            if (c == Scalar(0)) {
                continue;
            }
            os << (first ? "" : " + ") << c << " x^" << a << " p^" << b;
            first = false;
        }
    }
    if (first) {
        os << "0";
    }
    return os;
}

/**
 * Moyal star product by the terminating Groenewold series
 *   a * b = sum_k (i hbar/2)^k / k! sum_j C(k,j) (-1)^j
 *           (d_x^{k-j} d_p^j a)(d_p^{k-j} d_x^j b).
 * Each monomial pair contributes integer multiples of (i hbar/2)^k.
 */
template <typename Scalar>
PolyObservable<Scalar> star(const PolyObservable<Scalar>& a, const PolyObservable<Scalar>& b,
                            typename PolyObservable<Scalar>::RealScalar hbar) {
    using Poly = PolyObservable<Scalar>;
    using Real = typename Poly::RealScalar;
    constexpr int kMax = Poly::kMaxDegree;
    const int da = a.degree();
    const int db = b.degree();
    Poly out;
    if (da < 0 || db < 0) {
        return out;
    }
    if (da + db > kMax) {
        throw ConfigError("star product degree overflow: deg a + deg b exceeds 12");
    }
    const Scalar half_i_hbar = Scalar(0, 1) * Scalar(hbar / Real(2));
    for (int a1 = 0; a1 <= da; ++a1) {
        for (int a2 = 0; a1 + a2 <= da; ++a2) {
            const Scalar ca = a.coeff(a1, a2);
            if (ca == Scalar(0)) {
                continue;
            }
            for (int b1 = 0; b1 <= db; ++b1) {
                for (int b2 = 0; b1 + b2 <= db; ++b2) {
                    const Scalar cb = b.coeff(b1, b2);
                    if (cb == Scalar(0)) {
                        continue;
                    }
                    Scalar power(1);
                    for (int k = 0; k <= a1 + a2 && k <= b1 + b2; ++k) {
                        for (int j = 0; j <= k; ++j) {
                            const int i = k - j;
                            if (i > a1 || j > a2 || i > b2 || j > b1) {
                                continue;
                            }
                            // the binomials absorb 1/(i! j!)
                            const Real weight = Poly::binomial(a1, i) * Poly::falling(b2, i) *
                                                Poly::binomial(a2, j) * Poly::falling(b1, j);
                            const Real sign = (j % 2 == 0) ? Real(1) : Real(-1);
                            out.add(a1 - i + b1 - j, a2 - j + b2 - i, power * Scalar(sign * weight) * ca * cb);
                        }
                        power *= half_i_hbar;
                    }
                }
            }
        }
    }
    return out;
}

/// Classical bracket d_x a d_p b - d_p a d_x b.
template <typename Scalar>
PolyObservable<Scalar> poisson_bracket(const PolyObservable<Scalar>& a, const PolyObservable<Scalar>& b) {
    using Poly = PolyObservable<Scalar>;
    auto product = [](const Poly& u, const Poly& v) {
        Poly out;
        const int du = u.degree();
        const int dv = v.degree();
        if (du < 0 || dv < 0) {
            return out;
        }
        if (du + dv > Poly::kMaxDegree) {
            throw ConfigError("poisson bracket degree overflow");
        }
        for (int a1 = 0; a1 <= du; ++a1) {
            for (int a2 = 0; a1 + a2 <= du; ++a2) {
                for (int b1 = 0; b1 <= dv; ++b1) {
                    for (int b2 = 0; b1 + b2 <= dv; ++b2) {
                        const Scalar c = u.coeff(a1, a2) * v.coeff(b1, b2);
                        if (c != Scalar(0)) {
                            out.add(a1 + b1, a2 + b2, c);
                        }
                    }
                }
            }
        }
        return out;
    };
    return product(a.derivative(1, 0), b.derivative(0, 1)) - product(a.derivative(0, 1), b.derivative(1, 0));
}

/// (a*b - b*a) / (i hbar); hbar = 0 is rejected, use poisson_bracket.
template <typename Scalar>
PolyObservable<Scalar> moyal_bracket(const PolyObservable<Scalar>& a, const PolyObservable<Scalar>& b,
                                     typename PolyObservable<Scalar>::RealScalar hbar) {
    if (hbar == 0) {
        throw ConfigError("moyal bracket needs hbar != 0; use poisson_bracket for the classical limit");
    }
    PolyObservable<Scalar> out = star(a, b, hbar) - star(b, a, hbar);
    out *= Scalar(0, -1) * Scalar(typename PolyObservable<Scalar>::RealScalar(1) / hbar);
    return out;
}

/// (a*b + b*a) / 2
template <typename Scalar>
PolyObservable<Scalar> baker_bracket(const PolyObservable<Scalar>& a, const PolyObservable<Scalar>& b,
                                     typename PolyObservable<Scalar>::RealScalar hbar) {
    PolyObservable<Scalar> out = star(a, b, hbar) + star(b, a, hbar);
    out *= Scalar(0.5);
    return out;
}

using Observable = PolyObservable<std::complex<double>>;

} // namespace qtlab

#endif
