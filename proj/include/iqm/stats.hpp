#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iqm/errors.hpp"

namespace iqm {

namespace detail {

// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction,
// converging well below 1e-10 for the t-distribution arguments used here.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);

    // Use the symmetry relation where the fraction converges fastest.
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double f = d;

    for (int i = 1; i <= 300; ++i) {
        const double m = static_cast<double>(i);
        // even step
        double num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        f *= d * c;
        // odd step
        num = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(ln_front) * f / a;
}

}  // namespace detail

// Two-sided p-value for a t statistic: P(|T| >= |t|) with df degrees of
// freedom, via p = I_{df/(df+t^2)}(df/2, 1/2).
inline double t_test_p_value(double t, int df) {
    if (df < 1) throw ParamError("degrees of freedom must be >= 1, got " + std::to_string(df));
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return detail::incomplete_beta(df / 2.0, 0.5, x);
}

struct TTestResult {
    double t_statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    bool significant_at_5pct = false;
};

// Two-sided paired t-test on the differences xs - ys. All-zero differences
// are the defined no-evidence result (t = 0, p = 1); a nonzero constant
// difference saturates to t = +-inf, p = 0.
inline TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw ParamError("paired t-test needs equal-length samples, got " +
                         std::to_string(xs.size()) + " and " + std::to_string(ys.size()));
    const std::size_t n = xs.size();
    if (n < 2)
        throw ParamError("paired t-test needs at least 2 pairs, got " + std::to_string(n));

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += xs[i] - ys[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (xs[i] - ys[i]) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult r;
    r.degrees_of_freedom = static_cast<int>(n) - 1;
    if (sd == 0.0) {
        if (mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
    } else {
        r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
        r.p_value = t_test_p_value(r.t_statistic, r.degrees_of_freedom);
    }
    r.significant_at_5pct = r.p_value < 0.05;
    return r;
}

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
    int count = 0;
};

inline Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = static_cast<int>(values.size());
    if (s.count == 0) return s;
    for (double v : values) s.mean += v;
    s.mean /= s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / (s.count - 1));
    }
    return s;
}

}  // namespace iqm
