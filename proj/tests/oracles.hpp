#pragma once

// Reference values computed without touching the library: power series for
// the Bessel functions, bisection on closed-form characteristic equations and
// the McMahon expansion for large Bessel zeros.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// J_n(x) by its power series in long double; accurate for x up to ~20.
inline long double bessel_j(int n, long double x)
{
    long double term = 1.0L;
    for (int i = 1; i <= n; ++i)
        term *= (x / 2.0L) / i;
    long double sum = term;
    const long double q = -(x * x) / 4.0L;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<long double>(m) * (m + n));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum))
            break;
    }
    return sum;
}

inline double bisect(const std::function<long double(long double)>& f, long double a, long double b)
{
    long double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const long double m = 0.5L * (a + b);
        const long double fm = f(m);
        if (fm == 0.0L)
            return static_cast<double>(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a <= 1e-18L * std::fabs(b))
            break;
    }
    return static_cast<double>(0.5L * (a + b));
}

/// s-th positive zero of J_n, bracketed by a scan in steps of 0.05.
inline double bessel_zero(int n, int s)
{
    auto f = [n](long double x) { return bessel_j(n, x); };
    long double a = 0.05L;
    long double fa = f(a);
    int found = 0;
    for (long double b = 0.1L; b < 40.0L; b += 0.05L) {
        const long double fb = f(b);
        if ((fa < 0) != (fb < 0) && ++found == s)
            return bisect(f, a, b);
        a = b;
        fa = fb;
    }
    return NAN;
}

/// s-th positive root of tan x = x, in (s pi, s pi + pi/2).
inline double tan_root(int s)
{
    const long double pi = std::numbers::pi_v<long double>;
    auto f = [](long double x) { return std::sin(x) - x * std::cos(x); };
    return bisect(f, s * pi + 1e-9L, s * pi + pi / 2 - 1e-9L);
}

/// McMahon's large-s expansion of the s-th zero of J_nu.
inline double mcmahon_zero(double nu, int s)
{
    const double mu = 4.0 * nu * nu;
    const double b = (s + nu / 2.0 - 0.25) * std::numbers::pi;
    const double e = 8.0 * b;
    return b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e) -
           32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * std::pow(e, 5));
}

}  // namespace oracle
