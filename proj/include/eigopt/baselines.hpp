////////////////////////////////////////////////////////////////////////////////
// baselines.hpp
//
// Reference methods used for verification and comparisons: the
// Piyavskii-Shubert sawtooth algorithm (piecewise-linear lower bounds from a
// Lipschitz constant), brute-force grid search with a spacing-based
// guarantee, and central finite differences.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_BASELINES_HPP
#define EIGOPT_BASELINES_HPP

#include <eigopt/types.hpp>

#include <functional>

namespace eigopt {

using ScalarFunction = std::function<double(double)>;
using BoxFunction = std::function<double(const RealVector&)>;

/// Sample set with its Lipschitz constant; the sawtooth
/// max_i ( f(x_i) - L |x - x_i| ) lower-bounds f when L is valid.
struct LipschitzModel {
    std::vector<double> points; // sorted ascending
    std::vector<double> values; // values[i] = f(points[i])
    double lipschitz = 0.0;
};

/// Sawtooth value at x (lower bound on f when the constant is valid).
double sawtooth_value(const LipschitzModel& model, double x);

/// Classic sawtooth refinement on [a, b]: evaluate both endpoints, then
/// repeatedly evaluate at the sawtooth minimizer until u - l <= eps or
/// max_iter evaluations.  Evaluation counting matches the one-count-per-f
/// convention, including the two initial points.
OptResult piyavskii_shubert(const ScalarFunction& f, double a, double b, double lipschitz,
                            double eps, long max_iter);

struct GridOracleResult {
    RealVector argmin;
    double min = kInf;
    double guarantee = 0.0; // L * (half cell diagonal): |true min - min| bound
    long count = 0;         // evaluations performed
};

/// Exhaustive evaluation on an N-per-axis grid (endpoints included).  The
/// caller supplies the Lipschitz constant used for the guarantee.  Ties
/// resolve to the first grid point in row-major order.
GridOracleResult grid_oracle(const BoxFunction& f, const Box& box, int n_per_axis,
                             double lipschitz, int threads = 1);

/// Central difference of order 1 ((f(x+h) - f(x-h)) / 2h) or order 2
/// ((f(x+h) - 2 f(x) + f(x-h)) / h^2).
double fd_derivative(const ScalarFunction& f, double x, int order, double h);

/// Central-difference gradient, one axis at a time.
RealVector fd_gradient(const BoxFunction& f, const RealVector& x, double h);

} // namespace eigopt

#endif
