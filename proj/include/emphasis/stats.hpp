#pragma once

// Self-contained statistics kernel: ordinary least squares with standard
// errors and p-values, Welch and paired t-tests, an exact two-sided binomial
// sign test, and coefficient of variation. No external numeric dependencies;
// the Student-t tail is computed from the regularized incomplete beta
// function (continued fraction).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace emphasis {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<double> df;  // absent where no t distribution is involved
};

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> std_error;
    std::vector<double> t_stat;
    std::vector<double> p_value;
    double rss = 0.0;
    double residual_df = 0.0;
};

namespace detail {

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample variance (n-1 denominator), two-pass for accuracy.
inline double sample_variance(std::span<const double> xs) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cont_fraction(double a, double b, double x) {
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cont_fraction(a, b, x) / a;
    }
    return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

// Two-sided p-value P(|T_df| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_p_two_sided(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("student_t_p_two_sided: df must be positive");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

}  // namespace detail

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return detail::mean_of(xs);
}

inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_stddev: need at least two values");
    return std::sqrt(detail::sample_variance(xs));
}

// Coefficient of variation: sample sd / |mean|. Undefined at mean == 0.
inline double coefficient_of_variation(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("coefficient_of_variation: need at least two values");
    const double m = detail::mean_of(xs);
    if (m == 0.0) throw std::domain_error("coefficient_of_variation: undefined for zero mean");
    return std::sqrt(detail::sample_variance(xs)) / std::fabs(m);
}

// Ordinary least squares. X holds one row per observation; callers include
// the leading intercept column explicitly. Solved by Householder QR (never
// by forming X'X), with standard errors from s^2 (X'X)^-1 via R^-1.
inline OlsFit ols_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    const std::size_t n = X.size();
    if (n == 0) throw std::invalid_argument("ols_fit: empty design matrix");
    const std::size_t m = X[0].size();
    if (m == 0) throw std::invalid_argument("ols_fit: rows must have at least one column");
    for (const auto& row : X) {
        if (row.size() != m) throw std::invalid_argument("ols_fit: ragged design matrix");
    }
    if (y.size() != n) throw std::invalid_argument("ols_fit: response length does not match row count");
    if (n <= m) throw std::invalid_argument("ols_fit: need more observations than columns");

    // Column-major working copy; qy starts as y and becomes Q'y.
    std::vector<double> a(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[j * n + i] = X[i][j];
    }
    std::vector<double> qy = y;

    double max_col_norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[j * n + i] * a[j * n + i];
        max_col_norm = std::max(max_col_norm, std::sqrt(s));
    }
    const double tol = 1e-10 * std::max(max_col_norm, 1.0);

    std::vector<double> v(n);
    for (std::size_t k = 0; k < m; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a[k * n + i] * a[k * n + i];
        norm = std::sqrt(norm);
        if (norm < tol) {
            throw std::domain_error("ols_fit: design matrix is rank-deficient at column " +
                                    std::to_string(k));
        }
        const double pivot = a[k * n + k];
        const double alpha = (pivot >= 0.0) ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = a[k * n + i];
            if (i == k) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 > 0.0) {
            for (std::size_t j = k; j < m; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) dot += v[i] * a[j * n + i];
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = k; i < n; ++i) a[j * n + i] -= f * v[i];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * qy[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) qy[i] -= f * v[i];
        }
        a[k * n + k] = alpha;  // guard against rounding drift on the diagonal
        if (std::fabs(alpha) < tol) {
            throw std::domain_error("ols_fit: design matrix is rank-deficient at column " +
                                    std::to_string(k));
        }
    }

    // Back-substitute R beta = (Q'y)[0..m).
    OlsFit fit;
    fit.beta.assign(m, 0.0);
    for (std::size_t kk = m; kk-- > 0;) {
        double s = qy[kk];
        for (std::size_t j = kk + 1; j < m; ++j) s -= a[j * n + kk] * fit.beta[j];
        fit.beta[kk] = s / a[kk * n + kk];
    }

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < m; ++j) pred += X[i][j] * fit.beta[j];
        const double r = y[i] - pred;
        rss += r * r;
    }
    fit.rss = rss;
    fit.residual_df = static_cast<double>(n - m);
    const double s2 = rss / fit.residual_df;

    // R^-1 (upper triangular), then diag((X'X)^-1) = rows of R^-1 squared.
    std::vector<double> rinv(m * m, 0.0);  // column-major
    for (std::size_t col = 0; col < m; ++col) {
        for (std::size_t row = col + 1; row-- > 0;) {
            double s = (row == col) ? 1.0 : 0.0;
            for (std::size_t j = row + 1; j <= col; ++j) s -= a[j * n + row] * rinv[col * m + j];
            rinv[col * m + row] = s / a[row * n + row];
        }
    }

    fit.std_error.assign(m, 0.0);
    fit.t_stat.assign(m, 0.0);
    fit.p_value.assign(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        double c = 0.0;
        for (std::size_t col = j; col < m; ++col) {
            const double r = rinv[col * m + j];
            c += r * r;
        }
        const double se = std::sqrt(s2 * c);
        fit.std_error[j] = se;
        if (se > 0.0) {
            fit.t_stat[j] = fit.beta[j] / se;
            fit.p_value[j] = detail::student_t_p_two_sided(fit.t_stat[j], fit.residual_df);
        } else {
            // Exact fit: the estimate has no sampling noise.
            fit.t_stat[j] = (fit.beta[j] == 0.0)
                                ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(), fit.beta[j]);
            fit.p_value[j] = (fit.beta[j] == 0.0) ? 1.0 : 0.0;
        }
    }
    return fit;
}

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
inline TestResult t_test_independent(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("t_test_independent: each sample needs at least two values");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = detail::mean_of(a);
    const double mb = detail::mean_of(b);
    const double va = detail::sample_variance(a);
    const double vb = detail::sample_variance(b);
    const double se2 = va / na + vb / nb;

    TestResult out;
    if (se2 == 0.0) {
        // Both samples are constant. Equal means carry no evidence; unequal
        // constant means separate with certainty.
        out.df = na + nb - 2.0;
        if (ma == mb) {
            out.statistic = 0.0;
            out.p_value = 1.0;
        } else {
            out.statistic = std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
            out.p_value = 0.0;
        }
        return out;
    }
    const double t = (ma - mb) / std::sqrt(se2);
    const double df = se2 * se2 /
                      (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    out.statistic = t;
    out.df = df;
    out.p_value = detail::student_t_p_two_sided(t, df);
    return out;
}

// Paired t-test on element-wise differences.
inline TestResult t_test_paired(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("t_test_paired: samples differ in length");
    if (a.size() < 2) throw std::invalid_argument("t_test_paired: need at least two pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double md = detail::mean_of(d);
    const double vd = detail::sample_variance(d);
    const double n = static_cast<double>(d.size());

    TestResult out;
    out.df = n - 1.0;
    if (vd == 0.0) {
        if (md == 0.0) {
            out.statistic = 0.0;
            out.p_value = 1.0;
        } else {
            out.statistic = std::copysign(std::numeric_limits<double>::infinity(), md);
            out.p_value = 0.0;
        }
        return out;
    }
    out.statistic = md / std::sqrt(vd / n);
    out.p_value = detail::student_t_p_two_sided(out.statistic, n - 1.0);
    return out;
}

// Exact two-sided binomial sign test: p = min(1, 2 * P(X <= min(k, n-k)))
// for X ~ Binomial(n, 1/2). Summed in log space, smallest terms first.
inline TestResult sign_test(int n_pos, int n_neg) {
    if (n_pos < 0 || n_neg < 0) throw std::invalid_argument("sign_test: counts must be non-negative");
    const int n = n_pos + n_neg;
    if (n == 0) throw std::invalid_argument("sign_test: no non-tied pairs");
    const int k = std::min(n_pos, n_neg);

    const double log_half_n = -static_cast<double>(n) * std::log(2.0);
    double tail = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                                std::lgamma(n - i + 1.0) + log_half_n;
        tail += std::exp(log_term);
    }
    TestResult out;
    out.statistic = static_cast<double>(k);
    out.p_value = std::min(1.0, 2.0 * tail);
    return out;
}

}  // namespace emphasis
