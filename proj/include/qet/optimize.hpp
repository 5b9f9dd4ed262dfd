// optimize.hpp — derivative-free maximization used by the phase-set
// optimizer: cyclic line maximization (dense scan over a full period plus
// golden-section refinement, sweeping the last coordinate first) followed
// by a Nelder-Mead polish. Deterministic throughout; objectives are smooth
// or rapidly oscillating 2pi-periodic functions of at most four phases.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace qet {

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

// Golden-section search for a maximum of f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-12) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

inline double nelder_mead_max(const Objective& f, std::vector<double>& x, double scale,
                              int max_iter = 600) {
    const size_t n = x.size();
    std::vector<std::vector<double>> simplex(n + 1, x);
    std::vector<double> val(n + 1);
    for (size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale;
    for (size_t i = 0; i <= n; ++i) val[i] = f(simplex[i]);

    auto order = [&]() {
        for (size_t i = 0; i <= n; ++i)
            for (size_t j = i + 1; j <= n; ++j)
                if (val[j] > val[i]) {
                    std::swap(val[i], val[j]);
                    std::swap(simplex[i], simplex[j]);
                }
    };
    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (val[0] - val[n] < 1e-14) break;
        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + t * (centroid[k] - simplex[n][k]);
            return p;
        };
        std::vector<double> refl = blend(1.0);
        const double frefl = f(refl);
        if (frefl > val[0]) {
            std::vector<double> exp_ = blend(2.0);
            const double fexp = f(exp_);
            if (fexp > frefl) {
                simplex[n] = exp_;
                val[n] = fexp;
            } else {
                simplex[n] = refl;
                val[n] = frefl;
            }
        } else if (frefl > val[n - 1]) {
            simplex[n] = refl;
            val[n] = frefl;
        } else {
            std::vector<double> con = blend(0.5);
            const double fcon = f(con);
            if (fcon > val[n]) {
                simplex[n] = con;
                val[n] = fcon;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t k = 0; k < n; ++k)
                        simplex[i][k] = 0.5 * (simplex[i][k] + simplex[0][k]);
                    val[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    x = simplex[0];
    return val[0];
}

}  // namespace detail

struct MaximizeOptions {
    int scan_points = 721;  // per full 2pi period; resolves splitting-ratio lobes
    int passes = 8;
    double polish_scale = 0.02;
};

struct MaximizeResult {
    std::vector<double> argmax;
    double value;
};

// Cyclic line maximization over full 2pi periods, sweeping the last
// coordinate first, then a simplex polish. Monotone: the result never falls
// below the seed objective.
inline MaximizeResult maximize(const Objective& f, std::vector<double> seed,
                               const MaximizeOptions& opt = {}) {
    std::vector<double> x = std::move(seed);
    double best = f(x);
    for (int pass = 0; pass < opt.passes; ++pass) {
        const double before = best;
        for (size_t ii = x.size(); ii-- > 0;) {
            const size_t i = ii;
            auto f1 = [&](double v) {
                std::vector<double> p = x;
                p[i] = v;
                return f(p);
            };
            const double lo = x[i] - M_PI, hi = x[i] + M_PI;
            const double step = (hi - lo) / (opt.scan_points - 1);
            double best_v = x[i], best_f = best;
            for (int k = 0; k < opt.scan_points; ++k) {
                const double v = lo + k * step;
                const double fv = f1(v);
                if (fv > best_f) {
                    best_f = fv;
                    best_v = v;
                }
            }
            const double refined = detail::golden_max(f1, best_v - step, best_v + step);
            const double frefined = f1(refined);
            if (frefined >= best_f && frefined > best) {
                best = frefined;
                x[i] = refined;
            } else if (best_f > best) {
                best = best_f;
                x[i] = best_v;
            }
        }
        if (best - before < 1e-13) break;
    }
    const double polished = detail::nelder_mead_max(f, x, opt.polish_scale);
    if (polished > best) best = polished;
    return {x, best};
}

}  // namespace qet
