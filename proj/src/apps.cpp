#include <eigopt/apps.hpp>

#include <eigopt/envelope1d.hpp>

#include <cmath>
#include <numbers>

namespace eigopt {

namespace {

// Thrown by the singular-value objectives when an evaluation lands on
// sigma = 0; the distance is then exactly zero and the search stops.
struct ZeroSingularValue {
    RealVector omega;
    double value;
};

ComplexMatrix hermitian_part(const ComplexMatrix& M) { return 0.5 * (M + M.adjoint()); }

void require_square(const ComplexMatrix& A, const char* who) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": square nonempty matrix required");
}

// DistanceResult from a minimization run of a nonnegative objective.
DistanceResult from_min_run(OptResult&& r, double gamma) {
    DistanceResult d;
    d.value = r.upper;
    d.argmin = std::move(r.argmin);
    d.lower = std::max(r.lower, 0.0); // sigma >= 0 is always a valid floor
    d.upper = r.upper;
    d.status = r.status;
    d.evaluations = r.evaluations;
    d.history = std::move(r.history);
    d.curvature_violated = r.curvature_violated;
    d.gamma_used = gamma;
    return d;
}

// DistanceResult from a run that minimized -f; value is the achieved maximum
// of f, i.e. the lower end of the certified interval.
DistanceResult from_max_run(OptResult&& r, double gamma) {
    DistanceResult d;
    d.value = -r.upper;
    d.argmin = std::move(r.argmin);
    d.lower = -r.upper;
    d.upper = -r.lower;
    d.status = r.status;
    d.evaluations = r.evaluations;
    d.history = std::move(r.history);
    d.curvature_violated = r.curvature_violated;
    d.gamma_used = gamma;
    return d;
}

DistanceResult from_zero_hit(const ZeroSingularValue& z, long evaluations, double gamma) {
    DistanceResult d;
    d.value = 0.0;
    d.argmin = z.omega;
    d.lower = 0.0;
    d.upper = z.value;
    d.status = Status::converged;
    d.evaluations = evaluations;
    d.gamma_used = gamma;
    return d;
}

OptimizeControls controls_1d(const SolverOptions& opts) {
    OptimizeControls ctl;
    ctl.eps = opts.eps;
    ctl.max_iter = opts.max_iter;
    return ctl;
}

Algorithm2Controls controls_mesh(const SolverOptions& opts) {
    Algorithm2Controls ctl;
    ctl.eps = opts.eps;
    ctl.n_q = opts.n_q;
    ctl.max_depth = opts.max_depth;
    ctl.max_iter = opts.max_iter;
    ctl.threads = opts.threads;
    return ctl;
}

} // namespace

double spectral_norm(const ComplexMatrix& A) {
    if (A.size() == 0) return 0.0;
    return Eigen::BDCSVD<ComplexMatrix>(A).singularValues()(0);
}

HermitianMatrixFunction numerical_radius_function(const ComplexMatrix& A) {
    require_square(A, "numerical_radius");
    HermitianMatrixFunction F;
    F.dim_domain = 1;
    F.dim_matrix = static_cast<int>(A.rows());
    F.eval = [A](const RealVector& w) {
        return hermitian_part(std::polar(1.0, w[0]) * A);
    };
    F.partial = [A](const RealVector& w, int) {
        return hermitian_part(Complex(0.0, 1.0) * std::polar(1.0, w[0]) * A);
    };
    // d^2/d alpha^2 of A(theta + alpha p) is -A(theta) for p = +-1.
    F.second_partial_along = [A](const RealVector& w, const RealVector&) {
        return ComplexMatrix(-hermitian_part(std::polar(1.0, w[0]) * A));
    };
    return F;
}

MatrixFunction instability_function(const ComplexMatrix& A) {
    require_square(A, "dist_instability");
    const int n = static_cast<int>(A.rows());
    MatrixFunction B;
    B.dim_domain = 1;
    B.rows = n;
    B.cols = n;
    B.eval = [A, n](const RealVector& w) {
        return ComplexMatrix(A - Complex(0.0, w[0]) * ComplexMatrix::Identity(n, n));
    };
    B.partial = [n](const RealVector&, int) {
        return ComplexMatrix(Complex(0.0, -1.0) * ComplexMatrix::Identity(n, n));
    };
    B.second_partial_along = [n](const RealVector&, const RealVector&) {
        return ComplexMatrix(ComplexMatrix::Zero(n, n));
    };
    return B;
}

MatrixFunction transfer_function(const LTISystem& sys) {
    const int n = static_cast<int>(sys.A.rows());
    MatrixFunction H;
    H.dim_domain = 1;
    H.rows = static_cast<int>(sys.C.rows());
    H.cols = static_cast<int>(sys.B.cols());
    H.eval = [sys, n](const RealVector& w) {
        const ComplexMatrix M = Complex(0.0, w[0]) * ComplexMatrix::Identity(n, n) - sys.A;
        return ComplexMatrix(sys.C * M.partialPivLu().solve(sys.B) + sys.D);
    };
    // dH/ds = -i C (isI - A)^{-2} B
    H.partial = [sys, n](const RealVector& w, int) {
        const ComplexMatrix M = Complex(0.0, w[0]) * ComplexMatrix::Identity(n, n) - sys.A;
        const auto lu = M.partialPivLu();
        return ComplexMatrix(Complex(0.0, -1.0) * (sys.C * lu.solve(lu.solve(sys.B))));
    };
    // d^2H/ds^2 = -2 C (isI - A)^{-3} B
    H.second_partial_along = [sys, n](const RealVector& w, const RealVector&) {
        const ComplexMatrix M = Complex(0.0, w[0]) * ComplexMatrix::Identity(n, n) - sys.A;
        const auto lu = M.partialPivLu();
        return ComplexMatrix(-2.0 * (sys.C * lu.solve(lu.solve(lu.solve(sys.B)))));
    };
    return H;
}

MatrixFunction uncontrollability_function(const ComplexMatrix& A, const ComplexMatrix& B) {
    require_square(A, "dist_uncontrollability");
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (B.rows() != n)
        throw std::invalid_argument("dist_uncontrollability: A and B must have the same row count");
    if (m > n)
        throw std::invalid_argument("dist_uncontrollability: B must be no wider than A (m <= n)");

    ComplexMatrix d1 = ComplexMatrix::Zero(n, n + m);
    d1.leftCols(n) = -ComplexMatrix::Identity(n, n);
    ComplexMatrix d2 = ComplexMatrix::Zero(n, n + m);
    d2.leftCols(n) = Complex(0.0, -1.0) * ComplexMatrix::Identity(n, n);

    MatrixFunction F;
    F.dim_domain = 2;
    F.rows = n;
    F.cols = n + m;
    F.eval = [A, B, n, m](const RealVector& w) {
        ComplexMatrix M(n, n + m);
        M.leftCols(n) = A - Complex(w[0], w[1]) * ComplexMatrix::Identity(n, n);
        M.rightCols(m) = B;
        return M;
    };
    F.partial = [d1, d2](const RealVector&, int k) { return k == 0 ? d1 : d2; };
    F.second_partial_along = [n, m](const RealVector&, const RealVector&) {
        return ComplexMatrix(ComplexMatrix::Zero(n, n + m));
    };
    return F;
}

MatrixFunction defectiveness_function(const ComplexMatrix& A, double t) {
    require_square(A, "dist_defectiveness");
    const int n = static_cast<int>(A.rows());
    const int N = 2 * n;

    MatrixFunction F;
    F.dim_domain = 2;
    F.rows = N;
    F.cols = N;
    F.eval = [A, t, n, N](const RealVector& w) {
        ComplexMatrix M = ComplexMatrix::Zero(N, N);
        const ComplexMatrix S = A - Complex(w[0], w[1]) * ComplexMatrix::Identity(n, n);
        M.topLeftCorner(n, n) = S;
        M.bottomRightCorner(n, n) = S;
        M.topRightCorner(n, n) = t * ComplexMatrix::Identity(n, n);
        return M;
    };
    F.partial = [N](const RealVector&, int k) {
        ComplexMatrix D = -ComplexMatrix::Identity(N, N);
        if (k == 1) D *= Complex(0.0, 1.0); // d/d lambda_2 is -i I
        return D;
    };
    F.second_partial_along = [N](const RealVector&, const RealVector&) {
        return ComplexMatrix(ComplexMatrix::Zero(N, N));
    };
    return F;
}

DistanceResult numerical_radius(const ComplexMatrix& A, const SolverOptions& opts) {
    const HermitianMatrixFunction F = numerical_radius_function(A);
    double gamma = opts.gamma.value_or(spectral_norm(A));
    if (!opts.gamma && gamma <= 0.0) gamma = 1e-12; // A = 0: the objective is constant

    const ScalarFunction1D f = [&F](double theta) {
        const RealVector w = RealVector::Constant(1, theta);
        const EigenPoint ep = evaluate_eig(F, w, 1);
        const RealVector g = eig_gradient(F, ep);
        return FunctionSample1D{-ep.value, {-g[0]}}; // maximize by negation
    };
    OptResult r = optimize_1d(f, 0.0, 2.0 * std::numbers::pi, gamma, controls_1d(opts));
    return from_max_run(std::move(r), gamma);
}

DistanceResult dist_instability(const ComplexMatrix& A, std::optional<Interval> interval,
                                const SolverOptions& opts) {
    const MatrixFunction B = instability_function(A);
    const int n = B.rows;
    const double scale = spectral_norm(A);
    if (scale == 0.0) { // A = 0: sigma_min(-i omega I) = |omega|, minimal at 0
        DistanceResult d;
        d.value = 0.0;
        d.argmin = RealVector::Zero(1);
        d.lower = 0.0;
        d.upper = 0.0;
        d.status = Status::converged;
        d.gamma_used = opts.gamma.value_or(0.0);
        return d;
    }
    const Interval iv = interval.value_or(Interval{-2.0 * scale, 2.0 * scale});
    const double gamma =
        opts.gamma ? *opts.gamma
                   : estimate_gamma(embed_singular(B), Box::interval(iv.first, iv.second), n, 2, 32, 2.0);

    const double zero_tol = 1e-14 * (1.0 + scale);
    long evals = 0;
    const ScalarFunction1D f = [&](double omega) {
        const RealVector w = RealVector::Constant(1, omega);
        ++evals;
        const SingularTriple triple = evaluate_singular_triple(B, w, n);
        if (triple.value <= zero_tol) throw ZeroSingularValue{w, triple.value};
        return FunctionSample1D{triple.value, {sval_gradient(B, w, triple)[0]}};
    };
    try {
        OptResult r = optimize_1d(f, iv.first, iv.second, gamma, controls_1d(opts));
        return from_min_run(std::move(r), gamma);
    } catch (const ZeroSingularValue& z) {
        return from_zero_hit(z, evals, gamma);
    }
}

DistanceResult hinf_norm(const LTISystem& sys, std::optional<Interval> interval,
                         const SolverOptions& opts) {
    require_square(sys.A, "hinf_norm");
    const int n = static_cast<int>(sys.A.rows());
    if (sys.B.rows() != n || sys.C.cols() != n || sys.D.rows() != sys.C.rows() ||
        sys.D.cols() != sys.B.cols())
        throw std::invalid_argument("hinf_norm: inconsistent system dimensions");

    const Eigen::ComplexEigenSolver<ComplexMatrix> es(sys.A);
    if (es.info() != Eigen::Success) throw std::runtime_error("hinf_norm: eigensolver failed on A");
    if (es.eigenvalues().real().maxCoeff() >= 0.0)
        throw std::invalid_argument("hinf_norm: A must be stable (all eigenvalue real parts < 0)");

    const MatrixFunction H = transfer_function(sys);
    const Eigen::BDCSVD<ComplexMatrix> svdA(sys.A);
    const double sigma_min_A = svdA.singularValues()(n - 1);
    const double gamma = opts.gamma.value_or(1.0 / sigma_min_A);
    const double scale = spectral_norm(sys.A);
    const Interval iv = interval.value_or(Interval{-2.0 * (scale + 1.0), 2.0 * (scale + 1.0)});

    const ScalarFunction1D f = [&H](double s) {
        const RealVector w = RealVector::Constant(1, s);
        const SingularTriple triple = evaluate_singular_triple(H, w, 1);
        // sigma_1 = 0 only for the identically-zero transfer function, whose
        // derivative is 0 as well.
        const double slope = triple.value > 0.0 ? sval_gradient(H, w, triple)[0] : 0.0;
        return FunctionSample1D{-triple.value, {-slope}};
    };
    OptResult r = optimize_1d(f, iv.first, iv.second, gamma, controls_1d(opts));
    return from_max_run(std::move(r), gamma);
}

DistanceResult dist_uncontrollability(const ComplexMatrix& A, const ComplexMatrix& B,
                                      std::optional<Box> box, const SolverOptions& opts) {
    const MatrixFunction F = uncontrollability_function(A, B);
    const int n = F.rows;
    const double scale = spectral_norm(A) + spectral_norm(B);
    const double half = std::max(scale, 1.0);
    const Box domain = box.value_or(Box::rectangle(-half, half, -half, half));
    const double gamma = opts.gamma.value_or(2.0);

    const double zero_tol = 1e-14 * (1.0 + scale);
    long evals = 0;
    const GradientFunction f = [&](const RealVector& w) {
        ++evals;
        const SingularTriple triple = evaluate_singular_triple(F, w, n);
        if (triple.value <= zero_tol) throw ZeroSingularValue{w, triple.value};
        return ValueGradient{triple.value, sval_gradient(F, w, triple)};
    };
    try {
        OptResult r = algorithm2(f, domain, gamma, controls_mesh(opts));
        return from_min_run(std::move(r), gamma);
    } catch (const ZeroSingularValue& z) {
        return from_zero_hit(z, evals, gamma);
    }
}

namespace {

// Gradient of max_t sigma_{2n-1}(lambda, t) when the maximizer is a crossing
// of an increasing and a decreasing singular-value branch (the generic
// situation for normal A).  The crossing pair occupies embedding positions
// 2n-2 and 2n-1; diagonalizing the projected d/dt derivative recovers the two
// branches, and the value function's gradient is their convex combination
// weighted so that the t-derivatives cancel.
RealVector defect_kink_gradient(const ComplexMatrix& A, const RealVector& lambda, double t) {
    const int n = static_cast<int>(A.rows());
    const int N = 2 * n;
    const MatrixFunction Bl = defectiveness_function(A, t);
    const HermitianMatrixFunction E = embed_singular(Bl);
    const EigenDecomposition dec = decompose_hermitian(E, lambda);

    ComplexMatrix dBdt = ComplexMatrix::Zero(N, N);
    dBdt.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    ComplexMatrix dEdt = ComplexMatrix::Zero(2 * N, 2 * N);
    dEdt.topRightCorner(N, N) = dBdt;
    dEdt.bottomLeftCorner(N, N) = dBdt.adjoint();

    const ComplexVector va = dec.vectors.col(N - 3); // position 2n-2, 0-based
    const ComplexVector vb = dec.vectors.col(N - 2); // position 2n-1

    Eigen::Matrix2cd Mt;
    Mt(0, 0) = va.dot(dEdt * va);
    Mt(0, 1) = va.dot(dEdt * vb);
    Mt(1, 0) = std::conj(Mt(0, 1));
    Mt(1, 1) = vb.dot(dEdt * vb);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> pair(Mt);
    const double g_dec = pair.eigenvalues()(0); // decreasing branch slope
    const double g_inc = pair.eigenvalues()(1); // increasing branch slope

    const ComplexVector w_dec = va * pair.eigenvectors()(0, 0) + vb * pair.eigenvectors()(1, 0);
    const ComplexVector w_inc = va * pair.eigenvectors()(0, 1) + vb * pair.eigenvectors()(1, 1);

    RealVector out(2);
    for (int k = 0; k < 2; ++k) {
        const ComplexMatrix dE = E.partial(lambda, k);
        const double grad_dec = w_dec.dot(dE * w_dec).real();
        const double grad_inc = w_inc.dot(dE * w_inc).real();
        out[k] = (g_dec * grad_inc - g_inc * grad_dec) / (g_dec - g_inc);
    }
    return out;
}

// The coupled block matrix as a function of the coupling t at fixed lambda.
MatrixFunction defect_t_function(const ComplexMatrix& A, const RealVector& lambda) {
    const int n = static_cast<int>(A.rows());
    const int N = 2 * n;
    MatrixFunction Bt;
    Bt.dim_domain = 1;
    Bt.rows = N;
    Bt.cols = N;
    const ComplexMatrix S = A - Complex(lambda[0], lambda[1]) * ComplexMatrix::Identity(n, n);
    Bt.eval = [S, n, N](const RealVector& w) {
        ComplexMatrix M = ComplexMatrix::Zero(N, N);
        M.topLeftCorner(n, n) = S;
        M.bottomRightCorner(n, n) = S;
        M.topRightCorner(n, n) = w[0] * ComplexMatrix::Identity(n, n);
        return M;
    };
    Bt.partial = [n, N](const RealVector&, int) {
        ComplexMatrix D = ComplexMatrix::Zero(N, N);
        D.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
        return D;
    };
    Bt.second_partial_along = [N](const RealVector&, const RealVector&) {
        return ComplexMatrix(ComplexMatrix::Zero(N, N));
    };
    return Bt;
}

struct InnerSearch {
    double t = 0.0;
    SingularTriple triple;
    bool at_kink = false;
};

InnerSearch defect_inner_search(const ComplexMatrix& A, const RealVector& lambda) {
    const int N = 2 * static_cast<int>(A.rows());
    const int j = N - 1; // sigma_{2n-1}, second smallest
    const MatrixFunction Bt = defect_t_function(A, lambda);

    struct Probe {
        double t;
        SingularTriple triple;
        double slope;
    };
    auto probe = [&](double t) {
        const RealVector w = RealVector::Constant(1, t);
        SingularTriple triple = evaluate_singular_triple(Bt, w, j);
        const double slope =
            triple.value > 0.0 ? sval_gradient(Bt, w, triple)[0] : 0.0;
        return Probe{t, std::move(triple), slope};
    };

    // sigma_{2n-1}(t) rises from the doubled value at t = 0, peaks at a
    // finite coupling, and decays like 1/t afterwards.  The pair splitting at
    // t = 0 makes the derivative unreliable exactly there, so the left
    // boundary is probed at a small offset; the right bracket end is found by
    // doubling until the derivative turns negative.
    constexpr double kBoundaryOffset = 1e-5;
    constexpr double kTTol = 1e-10;
    constexpr int kBudget = 60;

    Probe best{0.0, evaluate_singular_triple(Bt, RealVector::Zero(1), j), 0.0};
    bool at_kink = false;

    const Probe at_h = probe(kBoundaryOffset);
    if (at_h.slope > 0.0) {
        Probe lo = at_h;
        Probe hi = probe(1.0);
        for (int doubling = 0; hi.slope >= 0.0; ++doubling) {
            if (doubling >= 60)
                throw std::runtime_error(
                    "dist_defectiveness: inner maximization failed to bracket at lambda = (" +
                    std::to_string(lambda[0]) + ", " + std::to_string(lambda[1]) + ")");
            if (hi.triple.value > best.triple.value) best = hi;
            lo = hi;
            hi = probe(2.0 * hi.t);
        }
        if (at_h.triple.value > best.triple.value) best = at_h;

        // d sigma / dt changes sign inside [lo, hi]: secant steps safeguarded
        // by bisection; tolerance relative to the coupling scale.
        const double t_tol = kTTol * (1.0 + hi.t);
        double prev_width = hi.t - lo.t;
        bool force_bisect = false;
        int iter = 0;
        for (; iter < kBudget && hi.t - lo.t > t_tol; ++iter) {
            const double width = hi.t - lo.t;
            double tc = hi.t - hi.slope * (hi.t - lo.t) / (hi.slope - lo.slope);
            const bool inside = tc > lo.t + 0.02 * width && tc < hi.t - 0.02 * width;
            if (force_bisect || !inside || !std::isfinite(tc)) tc = lo.t + 0.5 * width;

            Probe mid = probe(tc);
            if (mid.triple.value > best.triple.value) best = mid;
            if (mid.slope > 0.0)
                lo = std::move(mid);
            else
                hi = std::move(mid);
            force_bisect = hi.t - lo.t > 0.7 * prev_width;
            prev_width = hi.t - lo.t;
        }
        if (hi.t - lo.t > t_tol)
            throw std::runtime_error(
                "dist_defectiveness: inner secant iteration failed to converge at lambda = (" +
                std::to_string(lambda[0]) + ", " + std::to_string(lambda[1]) + ")");
        if (lo.triple.value > best.triple.value) best = lo;
        if (hi.triple.value > best.triple.value) best = hi;
        // A persistent slope jump across the final bracket marks a branch
        // crossing rather than a smooth stationary point.
        at_kink = lo.slope - hi.slope > 1e-6;
        if (at_kink) best.t = 0.5 * (lo.t + hi.t);
    }
    // else: decreasing at the left edge; the maximizer is t = 0 (the probed
    // value at t = 0 is already in best).

    return InnerSearch{best.t, std::move(best.triple), at_kink};
}

double defect_inner_value(const ComplexMatrix& A, const RealVector& lambda) {
    return defect_inner_search(A, lambda).triple.value;
}

} // namespace

DefectInnerSolution defect_inner_max(const ComplexMatrix& A, const RealVector& lambda) {
    require_square(A, "dist_defectiveness");
    const int N = 2 * static_cast<int>(A.rows());
    const int j = N - 1;
    InnerSearch search = defect_inner_search(A, lambda);

    DefectInnerSolution out;
    out.t = search.t;
    out.sigma = search.triple.value;
    if (out.sigma <= 0.0) {
        out.gradient = RealVector::Zero(2);
    } else if (search.at_kink) {
        out.gradient = defect_kink_gradient(A, lambda, out.t);
    } else {
        // Smooth maximizer (interior stationary point or boundary).  When the
        // singular value right above is tied as well (e.g. a repeated
        // eigenvalue of A, where the two diagonal blocks coincide for every
        // lambda, or exactly at a coalescence point), the eigenvectors mix
        // across blocks and the analytic formula is unusable; fall back to
        // central finite differences of the inner maximum.
        const EigenPoint above = evaluate_eig(embed_singular(defect_t_function(A, lambda)),
                                              RealVector::Constant(1, out.t), j - 1);
        if (above.value - out.sigma < 1e-8) {
            constexpr double h = 1e-6;
            RealVector g(2);
            for (int k = 0; k < 2; ++k) {
                RealVector fwd = lambda, bwd = lambda;
                fwd[k] += h;
                bwd[k] -= h;
                g[k] = (defect_inner_value(A, fwd) - defect_inner_value(A, bwd)) / (2.0 * h);
            }
            out.gradient = g;
        } else {
            // The derivative of max_t sigma(lambda, t) is the partial at t*.
            const MatrixFunction Bl = defectiveness_function(A, out.t);
            out.gradient = sval_gradient(Bl, lambda, search.triple);
        }
    }
    return out;
}

DistanceResult dist_defectiveness(const ComplexMatrix& A, std::optional<Box> box,
                                  const SolverOptions& opts) {
    require_square(A, "dist_defectiveness");
    if (A.rows() < 2)
        throw std::invalid_argument("dist_defectiveness: requires n >= 2");
    if (!opts.gamma)
        throw std::invalid_argument("dist_defectiveness: an explicit curvature bound gamma is "
                                    "required (no reliable default exists)");
    const double gamma = *opts.gamma;
    const double scale = spectral_norm(A);
    const double half = std::max(2.0 * scale, 1.0);
    const Box domain = box.value_or(Box::rectangle(-half, half, -half, half));

    const double zero_tol = 1e-14 * (1.0 + scale);
    long evals = 0;
    const GradientFunction f = [&](const RealVector& w) {
        ++evals;
        DefectInnerSolution inner = defect_inner_max(A, w);
        if (inner.sigma <= zero_tol) throw ZeroSingularValue{w, inner.sigma};
        return ValueGradient{inner.sigma, std::move(inner.gradient)};
    };
    try {
        OptResult r = algorithm2(f, domain, gamma, controls_mesh(opts));
        DistanceResult d = from_min_run(std::move(r), gamma);
        d.inner_solution = defect_inner_max(A, d.argmin).t;
        return d;
    } catch (const ZeroSingularValue& z) {
        DistanceResult d = from_zero_hit(z, evals, gamma);
        d.inner_solution = defect_inner_max(A, d.argmin).t;
        return d;
    }
}

} // namespace eigopt
