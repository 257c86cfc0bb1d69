#pragma once

#include "normsym/util.hpp"

#include <map>
#include <vector>

namespace normsym {

// Truncation shape: variables are split into consecutive groups; terms whose
// total degree within group g exceeds caps[g] are dropped. This keeps mixed
// jet computations (z-offsets, fiber offsets, radial shift) exact to the
// depth each direction actually needs without paying for the full tensor.
struct TruncShape {
    std::vector<int> group_sizes;
    std::vector<int> caps;

    TruncShape() = default;
    TruncShape(std::vector<int> sizes, std::vector<int> c)
        : group_sizes(std::move(sizes)), caps(std::move(c)) {}
    static TruncShape single(int nvars, int deg) { return TruncShape({nvars}, {deg}); }

    int nvars() const {
        int n = 0;
        for (int s : group_sizes) n += s;
        return n;
    }
    bool operator<(const TruncShape& o) const {
        if (group_sizes != o.group_sizes) return group_sizes < o.group_sizes;
        return caps < o.caps;
    }
    bool operator==(const TruncShape& o) const {
        return group_sizes == o.group_sizes && caps == o.caps;
    }
};

// Truncated multivariate Taylor polynomial around 0. Coefficients are Taylor
// coefficients: f(x) = sum_a coeff[a] x^a (the 1/a! lives inside coeff).
class Taylor {
  public:
    Taylor() = default;
    explicit Taylor(const TruncShape& shape);
    Taylor(int nvars, int deg) : Taylor(TruncShape::single(nvars, deg)) {}

    static Taylor constant(const TruncShape& shape, double c);
    static Taylor variable(const TruncShape& shape, int k, double base = 0.0);

    const TruncShape& shape() const { return shape_; }
    int nvars() const { return shape_.nvars(); }

    double& at(const MultiIndex& a);
    double at(const MultiIndex& a) const;
    double value() const { return coef_.empty() ? 0.0 : coef_[0]; }

    Taylor deriv(int k) const;

    // plain partial derivative at 0: a! * coefficient
    double partial(const MultiIndex& a) const { return at(a) * mi_factorial(a); }

    Taylor operator+(const Taylor& o) const;
    Taylor operator-(const Taylor& o) const;
    Taylor operator*(const Taylor& o) const;
    Taylor operator*(double s) const;
    Taylor operator+(double s) const;
    Taylor operator-(double s) const;
    Taylor& operator+=(const Taylor& o);

    // compose with a univariate analytic function given f^(k)(c0) at the
    // constant term c0, k = 0..(#derivatives provided)
    Taylor compose_univariate(const std::vector<double>& fderivs) const;

    Taylor inv() const;
    Taylor sqrt_() const;
    Taylor sin_() const;
    Taylor cos_() const;
    Taylor exp_() const;
    Taylor log_() const;
    Taylor pow_(double p) const;
    Taylor ipow(int n) const; // integer power by repeated multiplication

    // even power series applied to *this (typically *this = |z|^2):
    Taylor sinc_of_sq() const;    // sin(sqrt u)/sqrt u
    Taylor cosc_of_sq() const;    // (cos(sqrt u) - 1)/u
    Taylor invsinc_of_sq() const; // sqrt u / sin(sqrt u)

    const std::vector<MultiIndex>& exponents() const;
    int max_total_degree() const;

  private:
    TruncShape shape_;
    std::vector<double> coef_;

    int index_of(const MultiIndex& a) const;
    friend Taylor univariate_series_apply(const Taylor& u, const std::vector<double>& coefs);
};

// sum_k c_k u^k by Horner
Taylor univariate_series_apply(const Taylor& u, const std::vector<double>& coefs);

// reversion of a univariate power series s(u) = u + a2 u^2 + ... to u(s)
std::vector<double> series_reversion(const std::vector<double>& s_of_u, int deg);

struct CTaylor {
    Taylor re, im;
    CTaylor() = default;
    CTaylor(const Taylor& r) : re(r), im(Taylor(r.shape())) {}
    CTaylor(const Taylor& r, const Taylor& i) : re(r), im(i) {}
    CTaylor operator+(const CTaylor& o) const { return {re + o.re, im + o.im}; }
    CTaylor operator-(const CTaylor& o) const { return {re - o.re, im - o.im}; }
    CTaylor operator*(const CTaylor& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    CTaylor operator*(cplx s) const {
        Taylor r = re * s.real() - im * s.imag();
        Taylor i = re * s.imag() + im * s.real();
        return {r, i};
    }
    cplx partial(const MultiIndex& a) const { return {re.partial(a), im.partial(a)}; }
    cplx value() const { return {re.value(), im.value()}; }
};

// Gauss-Legendre nodes/weights on [a,b] (implemented in taylor.cpp)
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

} // namespace normsym
