#include "normsym/taylor.hpp"

#include "normsym/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace normsym {

// ------------------------------------------------ exponent table (memoized)

namespace {

struct ExpTable {
    std::vector<MultiIndex> exps;
    std::map<MultiIndex, int> pos;
    std::vector<std::vector<int>> gdeg; // per-term degree within each group
    // dense product table: prod[i*n+j] = index of exps[i]+exps[j], or -1
    std::vector<int> prod;
};

void enumerate_grouped(const TruncShape& sh, ExpTable& t) {
    int ng = (int)sh.group_sizes.size();
    // enumerate each group's exponent lists, then take products
    std::vector<std::vector<MultiIndex>> per(ng);
    for (int g = 0; g < ng; ++g) per[g] = enumerate_upto(sh.group_sizes[g], sh.caps[g]);
    MultiIndex cur;
    std::function<void(int)> rec = [&](int g) {
        if (g == ng) {
            t.exps.push_back(cur);
            return;
        }
        for (const auto& e : per[g]) {
            size_t n0 = cur.size();
            cur.insert(cur.end(), e.begin(), e.end());
            rec(g + 1);
            cur.resize(n0);
        }
    };
    rec(0);
    // sort graded-lex for reproducibility
    std::sort(t.exps.begin(), t.exps.end(), [](const MultiIndex& a, const MultiIndex& b) {
        int da = mi_abs(a), db = mi_abs(b);
        if (da != db) return da < db;
        return a < b;
    });
    for (int i = 0; i < (int)t.exps.size(); ++i) t.pos[t.exps[i]] = i;
    t.gdeg.resize(t.exps.size());
    for (size_t i = 0; i < t.exps.size(); ++i) {
        std::vector<int> gd(ng, 0);
        int v = 0;
        for (int g = 0; g < ng; ++g)
            for (int j = 0; j < sh.group_sizes[g]; ++j) gd[g] += t.exps[i][v++];
        t.gdeg[i] = gd;
    }
    size_t n = t.exps.size();
    t.prod.assign(n * n, -1);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            bool ok = true;
            for (int g = 0; g < ng && ok; ++g)
                if (t.gdeg[i][g] + t.gdeg[j][g] > sh.caps[g]) ok = false;
            if (!ok) continue;
            MultiIndex s = mi_add(t.exps[i], t.exps[j]);
            t.prod[i * n + j] = t.pos.at(s);
        }
}

const ExpTable& exp_table(const TruncShape& sh) {
    static std::map<TruncShape, ExpTable> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lk(mx);
    auto it = cache.find(sh);
    if (it != cache.end()) return it->second;
    ExpTable t;
    enumerate_grouped(sh, t);
    return cache.emplace(sh, std::move(t)).first->second;
}

} // namespace

Taylor::Taylor(const TruncShape& shape) : shape_(shape) {
    coef_.assign(exp_table(shape_).exps.size(), 0.0);
}

Taylor Taylor::constant(const TruncShape& shape, double c) {
    Taylor t(shape);
    t.coef_[0] = c;
    return t;
}

Taylor Taylor::variable(const TruncShape& shape, int k, double base) {
    Taylor t(shape);
    t.coef_[0] = base;
    MultiIndex u = mi_unit(shape.nvars(), k);
    int i = t.index_of(u);
    if (i < 0) throw Error("Taylor::variable: cap too small for linear term");
    t.coef_[i] = 1.0;
    return t;
}

const std::vector<MultiIndex>& Taylor::exponents() const { return exp_table(shape_).exps; }

int Taylor::max_total_degree() const {
    int s = 0;
    for (int c : shape_.caps) s += c;
    return s;
}

int Taylor::index_of(const MultiIndex& a) const {
    const auto& t = exp_table(shape_);
    auto it = t.pos.find(a);
    return it == t.pos.end() ? -1 : it->second;
}

double& Taylor::at(const MultiIndex& a) {
    int i = index_of(a);
    if (i < 0) throw Error("Taylor::at exponent outside truncation");
    return coef_[i];
}

double Taylor::at(const MultiIndex& a) const {
    int i = index_of(a);
    return i < 0 ? 0.0 : coef_[i];
}

Taylor Taylor::deriv(int k) const {
    Taylor r(shape_);
    const auto& exps = exponents();
    for (size_t i = 0; i < exps.size(); ++i) {
        if (coef_[i] == 0.0) continue;
        MultiIndex a = exps[i];
        if (a[k] == 0) continue;
        double c = coef_[i] * a[k];
        a[k] -= 1;
        r.at(a) += c;
    }
    return r;
}

Taylor Taylor::operator+(const Taylor& o) const {
    Taylor r(*this);
    for (size_t i = 0; i < coef_.size(); ++i) r.coef_[i] += o.coef_[i];
    return r;
}

Taylor& Taylor::operator+=(const Taylor& o) {
    for (size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
    return *this;
}

Taylor Taylor::operator-(const Taylor& o) const {
    Taylor r(*this);
    for (size_t i = 0; i < coef_.size(); ++i) r.coef_[i] -= o.coef_[i];
    return r;
}

Taylor Taylor::operator*(double s) const {
    Taylor r(*this);
    for (auto& c : r.coef_) c *= s;
    return r;
}

Taylor Taylor::operator+(double s) const {
    Taylor r(*this);
    r.coef_[0] += s;
    return r;
}

Taylor Taylor::operator-(double s) const {
    Taylor r(*this);
    r.coef_[0] -= s;
    return r;
}

Taylor Taylor::operator*(const Taylor& o) const {
    const auto& tab = exp_table(shape_);
    size_t n = coef_.size();
    Taylor r(shape_);
    for (size_t i = 0; i < n; ++i) {
        double ci = coef_[i];
        if (ci == 0.0) continue;
        const int* row = tab.prod.data() + i * n;
        for (size_t j = 0; j < n; ++j) {
            double cj = o.coef_[j];
            if (cj == 0.0) continue;
            int k = row[j];
            if (k >= 0) r.coef_[k] += ci * cj;
        }
    }
    return r;
}

Taylor Taylor::compose_univariate(const std::vector<double>& fd) const {
    Taylor h(*this);
    h.coef_[0] = 0.0;
    int K = std::min<int>((int)fd.size() - 1, max_total_degree());
    Taylor acc = Taylor::constant(shape_, fd[K] / factorial(K));
    for (int k = K - 1; k >= 0; --k) acc = acc * h + fd[k] / factorial(k);
    return acc;
}

Taylor Taylor::ipow(int n) const {
    Taylor acc = Taylor::constant(shape_, 1.0);
    for (int i = 0; i < n; ++i) acc = acc * (*this);
    return acc;
}

Taylor Taylor::inv() const {
    double c = value();
    if (std::abs(c) < 1e-300) throw Error("Taylor::inv at zero");
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    double p = 1.0 / c;
    for (int k = 0; k <= D; ++k) {
        fd[k] = p * factorial(k) * ((k % 2) ? -1.0 : 1.0);
        p /= c;
    }
    return compose_univariate(fd);
}

Taylor Taylor::sqrt_() const {
    double c = value();
    if (c <= 0) throw Error("Taylor::sqrt at nonpositive value");
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    fd[0] = std::sqrt(c);
    double coeff = 1.0;
    for (int k = 1; k <= D; ++k) {
        coeff *= (1.5 - k);
        fd[k] = fd[0] * coeff / std::pow(c, k);
    }
    return compose_univariate(fd);
}

Taylor Taylor::pow_(double pw) const {
    double c = value();
    if (c <= 0) throw Error("Taylor::pow at nonpositive base");
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    double coeff = 1.0;
    for (int k = 0; k <= D; ++k) {
        fd[k] = coeff * std::pow(c, pw - k);
        coeff *= (pw - k);
    }
    return compose_univariate(fd);
}

Taylor Taylor::sin_() const {
    double c = value();
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    for (int k = 0; k <= D; ++k) {
        switch (k % 4) {
            case 0: fd[k] = std::sin(c); break;
            case 1: fd[k] = std::cos(c); break;
            case 2: fd[k] = -std::sin(c); break;
            default: fd[k] = -std::cos(c); break;
        }
    }
    return compose_univariate(fd);
}

Taylor Taylor::cos_() const {
    double c = value();
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    for (int k = 0; k <= D; ++k) {
        switch (k % 4) {
            case 0: fd[k] = std::cos(c); break;
            case 1: fd[k] = -std::sin(c); break;
            case 2: fd[k] = -std::cos(c); break;
            default: fd[k] = std::sin(c); break;
        }
    }
    return compose_univariate(fd);
}

Taylor Taylor::exp_() const {
    double e = std::exp(value());
    std::vector<double> fd(max_total_degree() + 1, e);
    return compose_univariate(fd);
}

Taylor Taylor::log_() const {
    double c = value();
    if (c <= 0) throw Error("Taylor::log at nonpositive value");
    int D = max_total_degree();
    std::vector<double> fd(D + 1);
    fd[0] = std::log(c);
    double p = 1.0 / c, sgn = 1.0;
    for (int k = 1; k <= D; ++k) {
        fd[k] = sgn * factorial(k - 1) * p;
        p /= c;
        sgn = -sgn;
    }
    return compose_univariate(fd);
}

Taylor univariate_series_apply(const Taylor& u, const std::vector<double>& coefs) {
    int K = (int)coefs.size() - 1;
    Taylor acc = Taylor::constant(u.shape(), coefs[K]);
    for (int k = K - 1; k >= 0; --k) acc = acc * u + coefs[k];
    return acc;
}

namespace {
// univariate truncated series product, both indexed by power, length deg+1
std::vector<double> ser_mul(const std::vector<double>& a, const std::vector<double>& b, int deg) {
    std::vector<double> r(deg + 1, 0.0);
    for (int i = 0; i <= deg; ++i) {
        if (a[i] == 0.0) continue;
        for (int j = 0; j + i <= deg; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}
// composition s(u) for u with zero constant term
std::vector<double> ser_compose(const std::vector<double>& s, const std::vector<double>& u,
                                int deg) {
    std::vector<double> acc(deg + 1, 0.0);
    int K = std::min<int>((int)s.size() - 1, deg);
    acc[0] = s[K];
    for (int k = K - 1; k >= 0; --k) {
        acc = ser_mul(acc, u, deg);
        acc[0] += s[k];
    }
    return acc;
}
} // namespace

std::vector<double> series_reversion(const std::vector<double>& s, int deg) {
    // s(u) = u + a2 u^2 + ... ; find u(t) with s(u(t)) = t.
    // Fixed point u <- t + (u - s(u)) gains one correct degree per pass.
    std::vector<double> u(deg + 1, 0.0);
    u[1] = 1.0;
    for (int it = 0; it < deg; ++it) {
        auto su = ser_compose(s, u, deg);
        for (int i = 0; i <= deg; ++i) u[i] += (i == 1 ? 1.0 : 0.0) - su[i];
    }
    return u;
}

namespace {
std::vector<double> sinc_coef(int K) {
    std::vector<double> c(K + 1);
    for (int k = 0; k <= K; ++k) c[k] = ((k % 2) ? -1.0 : 1.0) / factorial(2 * k + 1);
    return c;
}
std::vector<double> cosc_coef(int K) {
    std::vector<double> c(K + 1);
    for (int k = 0; k <= K; ++k) c[k] = (((k + 1) % 2) ? -1.0 : 1.0) / factorial(2 * k + 2);
    return c;
}
std::vector<double> invsinc_coef(int K) {
    auto s = sinc_coef(K);
    std::vector<double> r(K + 1, 0.0);
    r[0] = 1.0;
    for (int n = 1; n <= K; ++n) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += r[j] * s[n - j];
        r[n] = -acc;
    }
    return r;
}
} // namespace

Taylor Taylor::sinc_of_sq() const {
    return univariate_series_apply(*this, sinc_coef(max_total_degree() / 2 + 3));
}
Taylor Taylor::cosc_of_sq() const {
    return univariate_series_apply(*this, cosc_coef(max_total_degree() / 2 + 3));
}
Taylor Taylor::invsinc_of_sq() const {
    return univariate_series_apply(*this, invsinc_coef(max_total_degree() / 2 + 3));
}

// --------------------------------------------------------- Gauss-Legendre

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (b - a) * (-t) + 0.5 * (a + b);
        w[i] = (b - a) / ((1.0 - t * t) * dp * dp);
    }
}

} // namespace normsym
