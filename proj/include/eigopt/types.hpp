////////////////////////////////////////////////////////////////////////////////
// types.hpp
//
// Shared value types of the eigopt library: search boxes, optimizer results
// and convergence history records.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_TYPES_HPP
#define EIGOPT_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigopt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box { x : lo[j] <= x[j] <= hi[j] }.  Requires lo[j] < hi[j].
struct Box {
    RealVector lo;
    RealVector hi;

    Box() = default;
    Box(RealVector lo_, RealVector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.size() == 0)
            throw std::invalid_argument("Box: lo/hi must be nonempty and of equal dimension");
        for (Eigen::Index j = 0; j < lo.size(); ++j)
            if (!(lo[j] < hi[j]))
                throw std::invalid_argument("Box: requires lo[j] < hi[j] on every axis");
    }

    static Box interval(double a, double b) {
        RealVector lo(1), hi(1);
        lo[0] = a;
        hi[0] = b;
        return Box(lo, hi);
    }

    static Box rectangle(double x_lo, double x_hi, double y_lo, double y_hi) {
        RealVector lo(2), hi(2);
        lo << x_lo, y_lo;
        hi << x_hi, y_hi;
        return Box(lo, hi);
    }

    int dim() const { return static_cast<int>(lo.size()); }

    RealVector center() const { return 0.5 * (lo + hi); }

    RealVector widths() const { return hi - lo; }

    bool contains(const RealVector& x, double tol = 0.0) const {
        for (Eigen::Index j = 0; j < lo.size(); ++j)
            if (x[j] < lo[j] - tol || x[j] > hi[j] + tol) return false;
        return true;
    }
};

enum class Status { converged, budget, stalled, error };

std::string to_string(Status s);
Status status_from_string(const std::string& s);

/// One record per function evaluation made by an optimizer.  region_count and
/// vertex_count stay zero for one-dimensional runs.
struct HistoryRow {
    long iter = 0;
    RealVector x;
    double f = 0.0;
    double lower = -kInf;
    double upper = kInf;
    long cumulative_evals = 0;
    double elapsed_seconds = 0.0;
    int region_count = 0;
    long vertex_count = 0;
};

struct OptResult {
    Status status = Status::budget;
    double value = std::numeric_limits<double>::quiet_NaN(); // best f found; equals upper
    RealVector argmin;
    double lower = -kInf; // certified bound: lower <= min f <= upper
    double upper = kInf;
    long evaluations = 0;
    std::vector<HistoryRow> history;
    // Set when an evaluated f value fell below the piecewise-quadratic lower
    // envelope, i.e. the supplied curvature bound was too small.  The run
    // continues; the certificate [lower, upper] is unreliable in that case.
    bool curvature_violated = false;
    long vertex_ops = 0; // total candidate-vertex computations (2D bookkeeping)
};

/// Loop controls shared by the 1D and multi-dimensional optimizers.
struct OptimizeControls {
    double eps = 1e-6;
    long max_iter = 5000;
    // Cap on the number of quadratic models (the mesh driver's n_q); < 0 means
    // uncapped.
    long model_cap = -1;
    // Externally known upper bound on the global minimum; termination uses
    // min(global_upper, u_s) - l_s <= eps and enables region pruning.
    double global_upper = kInf;
};

} // namespace eigopt

#endif
