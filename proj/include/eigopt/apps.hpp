////////////////////////////////////////////////////////////////////////////////
// apps.hpp
//
// The five matrix-distance applications: numerical radius, distance to
// instability, H-infinity norm, distance to uncontrollability, and distance
// to the nearest defective matrix.  Each builds its objective as an analytic
// (singular-value) eigenvalue function with the analytic gradient and invokes
// the 1D or mesh-adaptive optimizer.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_APPS_HPP
#define EIGOPT_APPS_HPP

#include <eigopt/matfunc.hpp>
#include <eigopt/mesh.hpp>
#include <eigopt/types.hpp>

#include <optional>

namespace eigopt {

struct LTISystem {
    ComplexMatrix A; // n x n, stable for H-infinity use
    ComplexMatrix B; // n x m
    ComplexMatrix C; // p x n
    ComplexMatrix D; // p x m
};

struct SolverOptions {
    double eps = 1e-6;
    std::optional<double> gamma; // curvature bound; per-problem default when absent
    long max_iter = 5000;
    long n_q = 30;      // model cap per sub-box (2D problems)
    int max_depth = 12; // mesh recursion depth (2D problems)
    int threads = 1;
};

/// Result of one distance computation.  For minimization problems value
/// equals upper; for the maximized quantities (numerical radius, H-infinity
/// norm) value is the achieved maximum, i.e. the lower end of the certified
/// interval.  history holds the rows of the underlying minimization run.
struct DistanceResult {
    double value = 0.0;
    RealVector argmin; // theta, s, omega, or (lambda1, lambda2)
    double lower = -kInf;
    double upper = kInf;
    std::optional<double> inner_solution; // coupling parameter t* (defectiveness)
    Status status = Status::budget;
    long evaluations = 0;
    std::vector<HistoryRow> history;
    bool curvature_violated = false;
    double gamma_used = 0.0;
};

using Interval = std::pair<double, double>;

double spectral_norm(const ComplexMatrix& A);

/// max_theta lambda_1( (A e^{i theta} + A* e^{-i theta}) / 2 ) over [0, 2pi].
/// Default gamma is ||A||_2.
DistanceResult numerical_radius(const ComplexMatrix& A, const SolverOptions& opts = {});

/// min_omega sigma_min(A - i omega I).  Default interval [-2||A||, 2||A||]
/// (the minimizer lies inside since sigma_min(A - i omega I) >= |omega| -
/// ||A||); default gamma comes from estimate_gamma on the embedding.  Returns
/// 0 immediately when an evaluation hits sigma_min = 0.
DistanceResult dist_instability(const ComplexMatrix& A, std::optional<Interval> interval,
                                const SolverOptions& opts = {});

/// max_s sigma_1( C (i s I - A)^{-1} B + D ).  Requires a stable A.  Default
/// gamma is 1 / sigma_min(A); the default interval [-2(||A||+1), 2(||A||+1)]
/// is a heuristic reduction of the unbounded search to a finite one.
DistanceResult hinf_norm(const LTISystem& sys, std::optional<Interval> interval,
                         const SolverOptions& opts = {});

/// min_z sigma_n([A - zI, B]) over z = x + iy in the box (default: square of
/// half-width ||A|| + ||B|| centered at 0).  Default gamma = 2.  Requires
/// B no wider than A (m <= n).
DistanceResult dist_uncontrollability(const ComplexMatrix& A, const ComplexMatrix& B,
                                      std::optional<Box> box, const SolverOptions& opts = {});

/// min_lambda max_{t >= 0} sigma_{2n-1}([[A - lambda I, t I], [0,
/// A - lambda I]]); the smallest perturbation making A defective.  The inner
/// maximum sits at a finite coupling (sigma decays like 1/t); it is bracketed
/// by doubling and solved by a bisection-safeguarded secant iteration on
/// d sigma / dt.  gamma must be supplied explicitly.  Default box: square of
/// half-width 2 ||A||.
DistanceResult dist_defectiveness(const ComplexMatrix& A, std::optional<Box> box,
                                  const SolverOptions& opts = {});

// Objective builders, exposed for verification against independent oracles.

/// (A e^{i theta} + A* e^{-i theta}) / 2 with analytic first and second
/// derivatives.
HermitianMatrixFunction numerical_radius_function(const ComplexMatrix& A);

/// A - i omega I as a function of omega in R.
MatrixFunction instability_function(const ComplexMatrix& A);

/// H(i s) = C (i s I - A)^{-1} B + D as a function of s in R.
MatrixFunction transfer_function(const LTISystem& sys);

/// [A - (w1 + i w2) I, B] as a function of (w1, w2).
MatrixFunction uncontrollability_function(const ComplexMatrix& A, const ComplexMatrix& B);

/// [[A - lambda I, t I], [0, A - lambda I]] as a function of
/// lambda = (lambda1, lambda2) for fixed coupling t.
MatrixFunction defectiveness_function(const ComplexMatrix& A, double t);

/// Inner maximization over the coupling parameter at fixed lambda: maximizer
/// t*, the value sigma_{2n-1}(lambda, t*), and the outer gradient there.
struct DefectInnerSolution {
    double t = 0.0;
    double sigma = 0.0;
    RealVector gradient; // d sigma / d lambda at the inner maximizer
};

DefectInnerSolution defect_inner_max(const ComplexMatrix& A, const RealVector& lambda);

} // namespace eigopt

#endif
