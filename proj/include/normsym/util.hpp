#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

namespace normsym {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------- multi-index

// A multi-index is an exponent vector in N^d.
using MultiIndex = std::vector<int>;

inline int mi_abs(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

inline double mi_factorial(const MultiIndex& a) {
    double f = 1.0;
    for (int k : a)
        for (int j = 2; j <= k; ++j) f *= j;
    return f;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= j;
    return f;
}

inline MultiIndex mi_zero(int d) { return MultiIndex(d, 0); }

inline MultiIndex mi_unit(int d, int k) {
    MultiIndex a(d, 0);
    a[k] = 1;
    return a;
}

inline MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c(a);
    for (size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

inline bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c(a);
    for (size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

// binomial over multi-indices: prod_i C(a_i, b_i)
inline double mi_binom(const MultiIndex& a, const MultiIndex& b) {
    double r = 1.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double c = 1.0;
        for (int j = 0; j < b[i]; ++j) c = c * (a[i] - j) / (j + 1);
        r *= c;
    }
    return r;
}

// all multi-indices in N^d with |a| == total
inline void enumerate_exact(int d, int total, std::vector<MultiIndex>& out) {
    MultiIndex cur(d, 0);
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == d - 1) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= rem; ++k) {
            cur[pos] = k;
            rec(pos + 1, rem - k);
        }
    };
    if (d == 0) {
        if (total == 0) out.push_back({});
        return;
    }
    rec(0, total);
}

// all multi-indices with |a| <= maxtotal, graded lexicographic
inline std::vector<MultiIndex> enumerate_upto(int d, int maxtotal) {
    std::vector<MultiIndex> out;
    for (int t = 0; t <= maxtotal; ++t) enumerate_exact(d, t, out);
    return out;
}

// i^k for integer k (may be negative)
inline cplx ipow(long k) {
    long m = ((k % 4) + 4) % 4;
    switch (m) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

// ------------------------------------------------------------------ rationals

// Exact rational arithmetic for expansion coefficients; numerators and
// denominators stay tiny (products of factorials up to ~8!).
struct Rational {
    long long num = 0, den = 1;
    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }
    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(std::abs(num), den);
        if (g > 1) { num /= g; den /= g; }
    }
    Rational operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
    Rational operator/(const Rational& o) const { return Rational(num * o.den, den * o.num); }
    double value() const { return double(num) / double(den); }
};

// ----------------------------------------------------------------- quadrature

// Gauss-Legendre nodes/weights on [a,b]
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// --------------------------------------------------------------- least squares

// slope of least-squares line fit of y against x
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = (int)x.size();
    for (int i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

// log-log slope of |y| against r, skipping zero values
inline double fit_loglog_slope(const std::vector<double>& r, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < r.size(); ++i)
        if (std::abs(y[i]) > 1e-300) {
            lx.push_back(std::log(r[i]));
            ly.push_back(std::log(std::abs(y[i])));
        }
    if (lx.size() < 2) return -1e9; // identically zero: treat as infinitely steep decay
    return fit_slope(lx, ly);
}

// ------------------------------------------------------------------- parallel

// Blocked parallel for over [0, n). Results must be written to disjoint slots
// so the reduction order stays deterministic.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw == 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned t = 0; t < hw; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

// ------------------------------------------------------------------------ rng

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    double uniform(double a, double b) {
        std::uniform_real_distribution<double> d(a, b);
        return d(eng);
    }
    int uniform_int(int a, int b) {
        std::uniform_int_distribution<int> d(a, b);
        return d(eng);
    }
};

} // namespace normsym
