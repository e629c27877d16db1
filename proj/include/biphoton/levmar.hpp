#pragma once

// Small dense Levenberg-Marquardt least-squares fitter with parameter
// covariance, plus a Nelder-Mead simplex for likelihood objectives.
// Residual functors fill a vector of (already weighted) residuals; the
// Jacobian is formed by forward differences with relative steps, so
// parameter magnitudes spanning many decades (beta2 ~ 1e-26) are fine.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

struct CurveFitOptions {
    int max_iterations = 200;
    double ftol = 1e-12;          // relative chi2 improvement
    double xtol = 1e-12;          // relative step size
    double initial_lambda = 1e-3; // LM damping
    std::vector<double> lower;    // optional box constraints
    std::vector<double> upper;
};

struct CurveFitResult {
    std::vector<double> params;
    std::vector<double> std_errors;              // sqrt(diag(cov))
    std::vector<std::vector<double>> covariance; // scaled by chi2/dof
    double chi2 = 0.0;
    int n_residuals = 0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// Solve A x = b for a small symmetric positive-definite system by
// Gaussian elimination with partial pivoting. Returns false if singular.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0 || !std::isfinite(a[pivot][col])) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double sum = b[r];
        for (std::size_t c = r + 1; c < n; ++c) sum -= a[r][c] * x[c];
        x[r] = sum / a[r][r];
        if (!std::isfinite(x[r])) return false;
    }
    return true;
}

inline bool invert_dense(const std::vector<std::vector<double>>& a,
                         std::vector<std::vector<double>>& inv) {
    const std::size_t n = a.size();
    inv.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0), col;
        e[j] = 1.0;
        if (!solve_dense(a, e, col)) return false;
        for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
    }
    return true;
}

inline double chi2_of(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

inline void clamp_to_box(std::vector<double>& p, const CurveFitOptions& opts) {
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j < opts.lower.size() && std::isfinite(opts.lower[j])) p[j] = std::max(p[j], opts.lower[j]);
        if (j < opts.upper.size() && std::isfinite(opts.upper[j])) p[j] = std::min(p[j], opts.upper[j]);
    }
}

} // namespace detail

// residuals: void(const std::vector<double>& params, std::vector<double>& r).
template <typename Residuals>
CurveFitResult fit_least_squares(Residuals&& residuals, std::vector<double> p0,
                                 const CurveFitOptions& opts = {}) {
    const std::size_t k = p0.size();
    if (k == 0) throw FitError("fit_least_squares: no parameters");
    detail::clamp_to_box(p0, opts);

    std::vector<double> r;
    residuals(p0, r);
    const std::size_t m = r.size();
    if (m < k) throw FitError("fit_least_squares: fewer residuals than parameters");

    double chi2 = detail::chi2_of(r);
    double lambda = opts.initial_lambda;
    std::vector<double> p = p0;

    std::vector<std::vector<double>> jac(m, std::vector<double>(k, 0.0));
    std::vector<double> r_step;
    CurveFitResult result;
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

    // Steps are relative to the parameter magnitude so scales spanning
    // many decades stay well-conditioned; an absolute step only for
    // parameters sitting exactly at zero.
    auto fd_step = [&](const std::vector<double>& params, std::size_t j) {
        double h = sqrt_eps * (params[j] != 0.0 ? std::abs(params[j]) : 1.0);
        if (j < opts.upper.size() && std::isfinite(opts.upper[j]) && params[j] + h > opts.upper[j])
            h = -h;
        return h;
    };

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        // Forward-difference Jacobian.
        for (std::size_t j = 0; j < k; ++j) {
            const double h = fd_step(p, j);
            std::vector<double> pj = p;
            pj[j] += h;
            residuals(pj, r_step);
            for (std::size_t i = 0; i < m; ++i) jac[i][j] = (r_step[i] - r[i]) / h;
        }

        // Normal equations J^T J delta = -J^T r with Marquardt damping.
        std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
        std::vector<double> jtr(k, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t a = 0; a < k; ++a) {
                jtr[a] += jac[i][a] * r[i];
                for (std::size_t b = a; b < k; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
            }
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        double grad_norm = 0.0;
        for (double g : jtr) grad_norm = std::max(grad_norm, std::abs(g));

        bool stepped = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            auto damped = jtj;
            for (std::size_t a = 0; a < k; ++a)
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
            std::vector<double> delta;
            std::vector<double> rhs(k);
            for (std::size_t a = 0; a < k; ++a) rhs[a] = -jtr[a];
            if (!detail::solve_dense(damped, rhs, delta)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = p;
            for (std::size_t a = 0; a < k; ++a) trial[a] += delta[a];
            detail::clamp_to_box(trial, opts);

            residuals(trial, r_step);
            const double trial_chi2 = detail::chi2_of(r_step);
            if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
                double step_norm = 0.0;
                for (std::size_t a = 0; a < k; ++a)
                    step_norm = std::max(step_norm, std::abs(trial[a] - p[a]) /
                                                        std::max(std::abs(p[a]), 1e-300));
                const double improvement = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
                p = trial;
                r = r_step;
                chi2 = trial_chi2;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (improvement < opts.ftol || step_norm < opts.xtol) {
                    result.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // Damping saturated: accept the current point as a (local) optimum.
            result.converged = true;
        }
        if (result.converged || grad_norm == 0.0) {
            result.converged = true;
            break;
        }
    }

    result.params = p;
    result.chi2 = chi2;
    result.n_residuals = static_cast<int>(m);
    result.iterations = iter + 1;

    // Covariance: (J^T J)^-1 scaled by the reduced chi-square.
    for (std::size_t j = 0; j < k; ++j) {
        const double h = fd_step(p, j);
        std::vector<double> pj = p;
        pj[j] += h;
        residuals(pj, r_step);
        for (std::size_t i = 0; i < m; ++i) jac[i][j] = (r_step[i] - r[i]) / h;
    }
    std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    std::vector<std::vector<double>> cov;
    if (detail::invert_dense(jtj, cov)) {
        const double dof = std::max<double>(1.0, static_cast<double>(m) - static_cast<double>(k));
        const double scale = chi2 / dof;
        result.covariance.assign(k, std::vector<double>(k, 0.0));
        result.std_errors.assign(k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) result.covariance[a][b] = cov[a][b] * scale;
            result.std_errors[a] = std::sqrt(std::max(result.covariance[a][a], 0.0));
        }
    } else {
        result.std_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

struct NelderMeadOptions {
    int max_iterations = 2000;
    double tolerance = 1e-10; // spread of simplex values
};

struct NelderMeadResult {
    std::vector<double> params;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

template <typename Fn>
NelderMeadResult minimize_nelder_mead(Fn&& fn, std::vector<double> p0, std::vector<double> steps,
                                      const NelderMeadOptions& opts = {}) {
    const std::size_t n = p0.size();
    if (steps.size() != n) throw FitError("minimize_nelder_mead: step size mismatch");

    std::vector<std::vector<double>> simplex(n + 1, p0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = fn(simplex[i]);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        // Order: best first.
        std::vector<std::size_t> order(n + 1);
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (values[a] != values[b]) return values[a] < values[b];
            return a < b;
        });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> v2;
            for (std::size_t i : order) {
                s2.push_back(simplex[i]);
                v2.push_back(values[i]);
            }
            simplex.swap(s2);
            values.swap(v2);
        }
        if (std::abs(values[n] - values[0]) <=
            opts.tolerance * (std::abs(values[0]) + std::abs(values[n]) + 1e-300)) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coeff * (simplex[n][j] - centroid[j]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = fn(reflected);
        if (fr < values[0]) {
            const auto expanded = blend(-2.0);
            const double fe = fn(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            const auto contracted = blend(fr < values[n] ? -0.5 : 0.5);
            const double fc = fn(contracted);
            if (fc < std::min(fr, values[n])) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = fn(simplex[i]);
                }
            }
        }
    }

    result.params = simplex[0];
    result.value = values[0];
    result.iterations = iter;
    return result;
}

} // namespace biphoton
