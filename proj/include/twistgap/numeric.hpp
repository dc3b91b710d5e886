#pragma once

// Log-domain arithmetic shared by every module. Partition functions in this
// library routinely reach e^{10^5}, and twist-induced differences routinely
// drop below e^{-1000}, so nothing is ever formed as a raw double.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace twistgap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A real number stored as sign * exp(log_abs). sign == 0 encodes zero.
struct SignedLog {
    double log_abs = kNegInf;
    int sign = 0;

    static SignedLog zero() { return {}; }
    static SignedLog from_log(double log_abs, int sign = 1) {
        if (sign == 0 || log_abs == kNegInf) return {};
        return {log_abs, sign > 0 ? 1 : -1};
    }
    static SignedLog from_value(double v) {
        if (v == 0.0) return {};
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    bool is_zero() const { return sign == 0; }
};

inline SignedLog operator*(SignedLog a, SignedLog b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.log_abs + b.log_abs, a.sign * b.sign};
}

inline SignedLog operator-(SignedLog a) { return {a.log_abs, -a.sign}; }

/// log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// log(sum_i e^{x_i}).
inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf || m == kInf) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Signed sum of log-domain terms. Cancellation between large terms of opposite
/// sign loses absolute precision relative to the largest term, as any sum does.
inline SignedLog signed_log_sum(std::span<const SignedLog> terms) {
    double m = kNegInf;
    for (const auto& t : terms)
        if (t.sign != 0) m = std::max(m, t.log_abs);
    if (m == kNegInf) return {};
    double pos = 0.0, neg = 0.0;
    for (const auto& t : terms) {
        if (t.sign > 0) pos += std::exp(t.log_abs - m);
        if (t.sign < 0) neg += std::exp(t.log_abs - m);
    }
    const double s = pos - neg;
    if (s == 0.0) return {};
    return {m + std::log(std::fabs(s)), s > 0 ? 1 : -1};
}

inline SignedLog operator+(SignedLog a, SignedLog b) {
    const SignedLog terms[2] = {a, b};
    return signed_log_sum(terms);
}

inline SignedLog operator-(SignedLog a, SignedLog b) { return a + (-b); }

/// log(1 - e^x) for x <= 0.
inline double log1mexp(double x) {
    if (x > 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return kNegInf;
    return x > -kLn2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

/// log(1 - e^{-y}) given log y, accurate even when y itself underflows.
inline double log_one_minus_exp_neg(double log_y) {
    if (log_y == kNegInf) return kNegInf;
    const double y = std::exp(log_y);
    if (y > 1e-3) return log1mexp(-y);
    if (y == 0.0) return log_y;
    return log_y + std::log(-std::expm1(-y) / y);
}

/// log(-log1p(-u)) for 0 < u < 1 given log u; stays finite when u underflows.
inline double log_neg_log1p_neg(double log_u) {
    const double u = std::exp(log_u);
    if (u == 0.0) return log_u;
    if (u < 1e-8) return log_u + std::log1p(u / 2.0);
    return std::log(-std::log1p(-u));
}

/// log(2 cosh x), overflow-safe.
inline double log_2cosh(double x) {
    const double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax));
}

/// log|2 sinh x| for x != 0.
inline double log_abs_2sinh(double x) {
    const double ax = std::fabs(x);
    return ax + log1mexp(-2.0 * ax);
}

/// log(-log tanh y) for y > 0: the log-magnitude of log tanh y.
inline double log_neg_log_tanh(double y) {
    // tanh y = 1 - w with w = 2 e^{-2y} / (1 + e^{-2y})
    const double log_w = kLn2 - 2.0 * y - std::log1p(std::exp(-2.0 * y));
    return log_neg_log1p_neg(log_w);
}

/// acosh(x) for x >= 1 written to keep precision near x = 1.
inline double acosh_stable(double x) {
    const double e = x - 1.0;
    if (e < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log1p(e + std::sqrt(e * (2.0 + e)));
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void add(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Worker count: explicit request, else TWISTGAP_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TWISTGAP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// True iff n = 2^k m for some k >= 1.
inline bool is_power_of_two_multiple(long long n, long long m) {
    if (m <= 0 || n <= 0 || n % m != 0) return false;
    long long q = n / m;
    if (q < 2) return false;
    return (q & (q - 1)) == 0;
}

}  // namespace twistgap
