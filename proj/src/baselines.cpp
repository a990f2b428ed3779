#include <eigopt/baselines.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

namespace eigopt {

double sawtooth_value(const LipschitzModel& model, double x) {
    double v = -kInf;
    for (size_t i = 0; i < model.points.size(); ++i)
        v = std::max(v, model.values[i] - model.lipschitz * std::abs(x - model.points[i]));
    return v;
}

OptResult piyavskii_shubert(const ScalarFunction& f, double a, double b, double lipschitz,
                            double eps, long max_iter) {
    if (!(a < b)) throw std::invalid_argument("piyavskii_shubert: requires a < b");
    if (!(lipschitz > 0.0)) throw std::invalid_argument("piyavskii_shubert: requires L > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("piyavskii_shubert: requires eps > 0");

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    LipschitzModel model;
    model.lipschitz = lipschitz;

    OptResult result;
    double upper = kInf;
    double xbest = a;

    auto evaluate = [&](double x, double lower_for_row) {
        const double v = f(x);
        if (!std::isfinite(v))
            throw std::runtime_error("piyavskii_shubert: f returned a non-finite value at x = " +
                                     std::to_string(x));
        ++result.evaluations;
        if (v < upper) {
            upper = v;
            xbest = x;
        }
        const auto pos = std::lower_bound(model.points.begin(), model.points.end(), x);
        model.values.insert(model.values.begin() + (pos - model.points.begin()), v);
        model.points.insert(pos, x);

        HistoryRow row;
        row.iter = result.evaluations - 1;
        row.x = RealVector::Constant(1, x);
        row.f = v;
        row.lower = lower_for_row;
        row.upper = upper;
        row.cumulative_evals = result.evaluations;
        row.elapsed_seconds = elapsed();
        result.history.push_back(row);
    };

    evaluate(a, -kInf);
    evaluate(b, -kInf);

    double lower = -kInf;
    while (true) {
        // The sawtooth minimum over [a, b] lies at a cone crossing between
        // adjacent samples (the envelope is piecewise linear with slopes
        // +-L): between x_i and x_{i+1} the deepest point is
        // ((f_i - f_{i+1}) / (2L) + (x_i + x_{i+1}) / 2).
        double cand_x = a;
        double cand_v = kInf;
        for (size_t i = 0; i + 1 < model.points.size(); ++i) {
            const double xi = model.points[i], xj = model.points[i + 1];
            const double fi = model.values[i], fj = model.values[i + 1];
            const double x = 0.5 * (xi + xj) + (fi - fj) / (2.0 * lipschitz);
            const double v = 0.5 * (fi + fj) - 0.5 * lipschitz * (xj - xi);
            if (v < cand_v) {
                cand_v = v;
                cand_x = std::clamp(x, xi, xj);
            }
        }
        lower = std::max(lower, cand_v);

        if (upper - lower <= eps) {
            result.status = Status::converged;
            break;
        }
        if (result.evaluations >= max_iter) {
            result.status = Status::budget;
            break;
        }
        const bool coincident = std::any_of(model.points.begin(), model.points.end(),
                                            [&](double p) { return std::abs(p - cand_x) <= 1e-14; });
        if (coincident) {
            result.status = Status::stalled;
            break;
        }
        evaluate(cand_x, lower);
    }

    result.value = upper;
    result.argmin = RealVector::Constant(1, xbest);
    result.lower = lower;
    result.upper = upper;
    return result;
}

GridOracleResult grid_oracle(const BoxFunction& f, const Box& box, int n_per_axis,
                             double lipschitz, int threads) {
    if (n_per_axis < 2) throw std::invalid_argument("grid_oracle: need N >= 2 per axis");
    const int d = box.dim();

    long total = 1;
    for (int k = 0; k < d; ++k) total *= n_per_axis;

    auto point_at = [&](long idx) {
        RealVector x(d);
        for (int k = 0; k < d; ++k) {
            const long i = idx % n_per_axis;
            idx /= n_per_axis;
            x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * double(i) / double(n_per_axis - 1);
        }
        return x;
    };

    struct Chunk {
        long argmin = -1;
        double min = kInf;
    };
    auto scan = [&](long begin, long end) {
        Chunk c;
        for (long idx = begin; idx < end; ++idx) {
            const double v = f(point_at(idx));
            if (v < c.min) {
                c.min = v;
                c.argmin = idx;
            }
        }
        return c;
    };

    Chunk best;
    if (threads > 1) {
        const long chunk = (total + threads - 1) / threads;
        std::vector<std::future<Chunk>> futures;
        for (long begin = 0; begin < total; begin += chunk)
            futures.push_back(std::async(std::launch::async, scan, begin,
                                         std::min(begin + chunk, total)));
        // Deterministic reduction in chunk order; strict < keeps the first
        // (lowest-index) minimizer on ties.
        for (auto& fut : futures) {
            const Chunk c = fut.get();
            if (c.min < best.min) best = c;
        }
    } else {
        best = scan(0, total);
    }

    double half_diag_sq = 0.0;
    for (int k = 0; k < d; ++k) {
        const double h = (box.hi[k] - box.lo[k]) / double(n_per_axis - 1);
        half_diag_sq += 0.25 * h * h;
    }

    GridOracleResult out;
    out.argmin = point_at(best.argmin);
    out.min = best.min;
    out.guarantee = lipschitz * std::sqrt(half_diag_sq);
    out.count = total;
    return out;
}

double fd_derivative(const ScalarFunction& f, double x, int order, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_derivative: requires h > 0");
    switch (order) {
        case 1: return (f(x + h) - f(x - h)) / (2.0 * h);
        case 2: return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        default: throw std::invalid_argument("fd_derivative: order must be 1 or 2");
    }
}

RealVector fd_gradient(const BoxFunction& f, const RealVector& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: requires h > 0");
    RealVector g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        RealVector fwd = x, bwd = x;
        fwd[k] += h;
        bwd[k] -= h;
        g[k] = (f(fwd) - f(bwd)) / (2.0 * h);
    }
    return g;
}

} // namespace eigopt
