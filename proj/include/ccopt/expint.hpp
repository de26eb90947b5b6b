#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace ccopt {
namespace detail {

// Power series around 0: Ei(x) = gamma + ln|x| + sum_k x^k/(k*k!).
// Terms peak near k = |x| and decay factorially; fine in double for |x| <= 5.
inline double ei_series(double x) {
    constexpr double egamma = 0.57721566490153286060651209008240;
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return egamma + std::log(std::abs(x)) + sum;
}

// Continued fraction for E1(y), y > 0, in the scaled form
//   e^y * E1(y) = 1/(y+1- 1/(y+3- 4/(y+5- 9/(y+7- ...))))
// evaluated with the modified Lentz algorithm. Converges fast for y > 5.
inline double e1_scaled_cf(double y) {
    constexpr double tiny = 1e-300;
    double b = y + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k < 400; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

} // namespace detail

// Ei(x) for strictly negative arguments. |relative error| < 1e-10 over the
// supported domain (series for |x| <= 5, continued fraction beyond).
inline double exp_int_ei(double x) {
    if (!(x < 0.0))
        throw std::domain_error("exp_int_ei: argument must be negative");
    if (x >= -5.0) return detail::ei_series(x);
    // Ei(x) = -E1(-x) = -e^{x} * (e^{-x} E1(-x))
    return -std::exp(x) * detail::e1_scaled_cf(-x);
}

// e^y * Ei(-y) for y > 0. Stable for large y where e^y alone overflows;
// used by the fading-average rate formula in the form -log2(e)*e^y*Ei(-y).
inline double exp_int_ei_scaled(double y) {
    if (!(y > 0.0))
        throw std::domain_error("exp_int_ei_scaled: argument must be positive");
    if (y <= 5.0) return std::exp(y) * detail::ei_series(-y);
    return -detail::e1_scaled_cf(y);
}

} // namespace ccopt
