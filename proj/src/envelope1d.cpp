#include <eigopt/envelope1d.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace eigopt {

namespace {

constexpr double kStallTol = 1e-14; // coincident-center cutoff

struct Branch {
    // q(x) = -gamma/2 x^2 + beta x + delta, the extension of one model side.
    double beta;
    double delta;
};

Branch branch_of(const Model1D& m, bool left) {
    const double s = left ? m.slope_left : m.slope_right;
    return {s + m.curvature * m.center,
            m.value - s * m.center - 0.5 * m.curvature * m.center * m.center};
}

} // namespace

double envelope_value(std::span<const Model1D> models, double x) {
    double v = -kInf;
    for (const Model1D& m : models) v = std::max(v, model_value(m, x));
    return v;
}

double model_value(const Model1D& m, double x) {
    const double dx = x - m.center;
    const double slope = dx < 0.0 ? m.slope_left : m.slope_right;
    return m.value + slope * dx - 0.5 * m.curvature * dx * dx;
}

SlopePair derivative_bundle(std::span<const double> branch_slopes) {
    if (branch_slopes.empty())
        throw std::invalid_argument("derivative_bundle: at least one branch derivative required");
    const auto [mn, mx] = std::minmax_element(branch_slopes.begin(), branch_slopes.end());
    return {*mx, *mn};
}

EnvelopeMin1D envelope_min(std::span<const Model1D> models, double a, double b) {
    if (models.empty()) throw std::invalid_argument("envelope_min: no models");
    if (!(a < b)) throw std::invalid_argument("envelope_min: requires a < b");

    std::vector<double> candidates;
    candidates.reserve(2 + models.size() + 2 * models.size() * models.size());
    candidates.push_back(a);
    candidates.push_back(b);
    for (const Model1D& m : models)
        if (m.center >= a && m.center <= b) candidates.push_back(m.center);

    // Pairwise branch crossings.  Equal curvature cancels the quadratic terms,
    // so two branches intersect where their affine parts agree.
    std::vector<Branch> branches;
    branches.reserve(2 * models.size());
    for (const Model1D& m : models) {
        branches.push_back(branch_of(m, true));
        branches.push_back(branch_of(m, false));
    }
    for (size_t i = 0; i < branches.size(); ++i) {
        for (size_t j = i + 1; j < branches.size(); ++j) {
            const double den = branches[i].beta - branches[j].beta;
            if (den == 0.0) continue; // parallel or identical
            const double x = (branches[j].delta - branches[i].delta) / den;
            if (std::isfinite(x) && x > a && x < b) candidates.push_back(x);
        }
    }

    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Ascending scan with strict improvement keeps ties at the smallest x.
    // The inner max aborts once it exceeds the incumbent.
    EnvelopeMin1D best{candidates.front(), kInf};
    for (const double x : candidates) {
        double v = -kInf;
        bool worse = false;
        for (const Model1D& m : models) {
            v = std::max(v, model_value(m, x));
            if (v > best.value) {
                worse = true;
                break;
            }
        }
        if (!worse && v < best.value) best = {x, v};
    }
    return best;
}

EnvelopeMin1D envelope_min(const EnvelopeState1D& state) {
    return envelope_min(state.models, state.a, state.b);
}

OptResult optimize_1d(const ScalarFunction1D& f, double a, double b, double gamma,
                      const OptimizeControls& controls) {
    if (!(a < b)) throw std::invalid_argument("optimize_1d: requires a < b");
    if (!(gamma > 0.0)) throw std::invalid_argument("optimize_1d: requires gamma > 0");
    if (!(controls.eps > 0.0)) throw std::invalid_argument("optimize_1d: requires eps > 0");

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    EnvelopeState1D state;
    state.a = a;
    state.b = b;

    OptResult result;
    result.lower = -kInf;
    result.upper = kInf;

    auto evaluate = [&](double x, double lower_for_row) {
        const FunctionSample1D sample = f(x);
        if (!std::isfinite(sample.value))
            throw std::runtime_error("optimize_1d: f returned a non-finite value at x = " +
                                     std::to_string(x));
        const SlopePair slopes = derivative_bundle(sample.branch_slopes);
        if (!std::isfinite(slopes.slope_left) || !std::isfinite(slopes.slope_right))
            throw std::runtime_error("optimize_1d: non-finite branch derivative at x = " +
                                     std::to_string(x));
        ++result.evaluations;

        if (sample.value < state.upper) {
            state.upper = sample.value;
            state.xbest = x;
        }

        Model1D m{x, sample.value, slopes.slope_left, slopes.slope_right, gamma};
        state.models.insert(
            std::upper_bound(state.models.begin(), state.models.end(), m,
                             [](const Model1D& p, const Model1D& q) { return p.center < q.center; }),
            m);

        HistoryRow row;
        row.iter = result.evaluations - 1;
        row.x = RealVector::Constant(1, x);
        row.f = sample.value;
        row.lower = lower_for_row;
        row.upper = state.upper;
        row.cumulative_evals = result.evaluations;
        row.elapsed_seconds = elapsed();
        state.history.push_back(row);
        return sample.value;
    };

    evaluate(a, -kInf);
    evaluate(b, -kInf);

    while (true) {
        const EnvelopeMin1D env = envelope_min(state);
        state.lower = std::max(state.lower, env.value);

        const double effective_upper = std::min(state.upper, controls.global_upper);
        if (effective_upper - state.lower <= controls.eps) {
            result.status = Status::converged;
            break;
        }
        if (controls.model_cap >= 0 && static_cast<long>(state.models.size()) >= controls.model_cap) {
            result.status = Status::budget;
            break;
        }
        if (result.evaluations >= controls.max_iter) {
            result.status = Status::budget;
            break;
        }
        const bool coincident = std::any_of(state.models.begin(), state.models.end(),
                                            [&](const Model1D& m) {
                                                return std::abs(m.center - env.x) <= kStallTol;
                                            });
        if (coincident) {
            result.status = Status::stalled;
            break;
        }

        const double fval = evaluate(env.x, state.lower);
        if (fval < state.lower - 1e-12 * (1.0 + std::abs(state.lower)))
            result.curvature_violated = true;
    }

    result.value = state.upper;
    result.argmin = RealVector::Constant(1, state.xbest);
    result.lower = state.lower;
    result.upper = state.upper;
    result.history = std::move(state.history);
    return result;
}

} // namespace eigopt
