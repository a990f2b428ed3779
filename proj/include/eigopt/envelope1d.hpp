////////////////////////////////////////////////////////////////////////////////
// envelope1d.hpp
//
// One-dimensional global minimization of continuous piecewise-analytic
// functions via piecewise-quadratic underestimators.  Each model is a downward
// parabola of shared curvature touching f at its center, with one slope per
// side (max / min of the branch derivatives there); the pointwise maximum of
// the models underestimates f everywhere when the curvature bound is valid,
// and its minimum over the interval certifies a lower bound.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_ENVELOPE1D_HPP
#define EIGOPT_ENVELOPE1D_HPP

#include <eigopt/types.hpp>

#include <functional>
#include <span>

namespace eigopt {

/// One underestimating model about center x_k:
///   x <  x_k :  value + slope_left  (x - x_k) - curvature/2 (x - x_k)^2
///   x >= x_k :  value + slope_right (x - x_k) - curvature/2 (x - x_k)^2
/// slope_left is the maximum and slope_right the minimum of the branch
/// derivatives at x_k; they coincide where f is differentiable.
struct Model1D {
    double center = 0.0;
    double value = 0.0;
    double slope_left = 0.0;
    double slope_right = 0.0;
    double curvature = 0.0; // gamma; shared by every model in a set
};

double model_value(const Model1D& m, double x);

struct SlopePair {
    double slope_left;  // max of branch derivatives
    double slope_right; // min of branch derivatives
};

/// Reduces the derivatives of the analytic branches active at a point to the
/// (max, min) pair used by the model.  Throws on empty input.
SlopePair derivative_bundle(std::span<const double> branch_slopes);

/// max_k model_value(models[k], x); -inf for an empty set.
double envelope_value(std::span<const Model1D> models, double x);

struct EnvelopeMin1D {
    double x = 0.0;
    double value = 0.0;
};

/// Exact global minimum of max_k model_value(models[k], x) over [a, b].
/// Candidates are the endpoints, the model centers, and all pairwise
/// intersections of parabola branches (equal curvature makes branch
/// differences affine, so each pair crosses at most once); the envelope is
/// concave between consecutive candidates.  Ties resolve to the smallest x.
EnvelopeMin1D envelope_min(std::span<const Model1D> models, double a, double b);

/// Model list plus certified bounds; single-writer, concurrent reads allowed.
struct EnvelopeState1D {
    double a = 0.0;
    double b = 0.0;
    std::vector<Model1D> models; // kept sorted by center
    double lower = -kInf;        // l_s, nondecreasing
    double upper = kInf;         // u_s, nonincreasing; equals f(xbest)
    double xbest = 0.0;
    std::vector<HistoryRow> history;
};

EnvelopeMin1D envelope_min(const EnvelopeState1D& state);

/// Value of f at a point together with the derivatives of the analytic
/// branches active there (one entry when f is smooth at x).
struct FunctionSample1D {
    double value = 0.0;
    std::vector<double> branch_slopes;
};

using ScalarFunction1D = std::function<FunctionSample1D(double)>;

/// Iterated envelope refinement on [a, b]: evaluate both endpoints, then
/// repeatedly evaluate f at the envelope minimizer until
/// min(global_upper, u) - l <= eps, the model cap, or max_iter.  A new center
/// within 1e-14 of an existing one terminates with status stalled.  Throws on
/// NaN from f.  Maximization is supported by negating f only.
OptResult optimize_1d(const ScalarFunction1D& f, double a, double b, double gamma,
                      const OptimizeControls& controls);

} // namespace eigopt

#endif
