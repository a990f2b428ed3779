////////////////////////////////////////////////////////////////////////////////
// matfunc.hpp
//
// Analytic Hermitian matrix functions A(omega) over omega in R^d and the
// eigenvalue / singular-value machinery built on them: dense eigensolves with
// deterministic eigenvector phase, analytic first derivatives of eigenvalues
// and singular values, second derivatives along lines, the Hermitian embedding
// [[0, B], [B*, 0]] of rectangular matrix functions, and sampling-based
// curvature estimation.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_MATFUNC_HPP
#define EIGOPT_MATFUNC_HPP

#include <eigopt/types.hpp>

#include <functional>

namespace eigopt {

/// Hermitian matrix function omega in R^d -> C^{n x n} together with its
/// partial-derivative matrices.  eval(omega) and every partial(omega, k) must
/// be Hermitian to 1e-12 per entry; this is validated on use.
/// second_partial_along(omega, p) is (d^2/d alpha^2) A(omega + alpha p) at
/// alpha = 0 for a unit direction p; when absent it is replaced by central
/// finite differences of partial.
struct HermitianMatrixFunction {
    int dim_domain = 1; // d
    int dim_matrix = 0; // n
    std::function<ComplexMatrix(const RealVector&)> eval;
    std::function<ComplexMatrix(const RealVector&, int)> partial; // axis k, 0-based
    std::function<ComplexMatrix(const RealVector&, const RealVector&)> second_partial_along;
};

/// General analytic matrix function omega in R^d -> C^{rows x cols} (not
/// necessarily Hermitian); the domain of singular-value problems.
struct MatrixFunction {
    int dim_domain = 1;
    int rows = 0;
    int cols = 0;
    std::function<ComplexMatrix(const RealVector&)> eval;
    std::function<ComplexMatrix(const RealVector&, int)> partial;
    std::function<ComplexMatrix(const RealVector&, const RealVector&)> second_partial_along;
};

/// Eigenvalue j (1-based, descending order) of A(omega) with its unit
/// eigenvector and the distance to the nearest other eigenvalue.
struct EigenPoint {
    RealVector omega;
    int index = 1;        // j, 1-based rank among eigenvalues sorted descending
    double value = 0.0;   // lambda_j
    ComplexVector eigenvector;
    double gap = 0.0;     // min_{k != j} |lambda_j - lambda_k|
};

/// Consistent singular triple: B w = sigma u and B* u = sigma w with unit u, w.
struct SingularTriple {
    double value = 0.0;
    ComplexVector left;
    ComplexVector right;
};

/// Full descending eigenvalue list of A(omega); plumbing shared by
/// evaluate_eig and the curvature probes.
struct EigenDecomposition {
    RealVector values;       // sorted descending
    ComplexMatrix vectors;   // column j (0-based) pairs with values[j]
};

/// Dense Hermitian eigendecomposition with validation and deterministic
/// eigenvector phase (largest-magnitude component made real positive).
EigenDecomposition decompose_hermitian(const HermitianMatrixFunction& F, const RealVector& omega);

EigenPoint evaluate_eig(const HermitianMatrixFunction& F, const RealVector& omega, int j);

/// Gradient of the eigenvalue branch through ep: component k equals
/// v* (dA/d omega_k) v.  Valid as a branch derivative wherever the eigenvalue
/// is simple; one-sided for the ordered eigenvalue at crossings.
RealVector eig_gradient(const HermitianMatrixFunction& F, const EigenPoint& ep);

/// Second derivative of eigenvalue j along the line omega + alpha p at
/// alpha = 0:
///   v_j* A'' v_j + 2 sum_{k != j} |v_k* A' v_j|^2 / (lambda_j - lambda_k)
/// with A' = sum_k p_k dA/d omega_k.  Throws if the gap to the nearest other
/// eigenvalue is below 1e-8 (the sum is meaningless near degeneracy).
double eig_second_derivative_line(const HermitianMatrixFunction& F, const RealVector& omega,
                                  const RealVector& direction, int j);

/// Hermitian embedding [[0, B(omega)], [B(omega)*, 0]]; its j-th largest
/// eigenvalue equals sigma_j(B(omega)) for j <= min(rows, cols).
HermitianMatrixFunction embed_singular(const MatrixFunction& B);

/// j-th largest singular value of B(omega) with consistent unit left/right
/// vectors, computed through the Hermitian embedding.
SingularTriple evaluate_singular_triple(const MatrixFunction& B, const RealVector& omega, int j);

/// Gradient of the singular value branch through the triple: component k is
/// Real( u* (dB/d omega_k) w ).  Requires sigma > 0.
RealVector sval_gradient(const MatrixFunction& B, const RealVector& omega,
                         const SingularTriple& triple);

/// Samples |second derivative along lines| of eigenvalue index (the branch
/// pieces the optimizer of that eigenvalue sees) over the box and returns
/// safety * max.  A heuristic, not a certificate: the sampled maximum can
/// miss the true bound.  Near-degenerate samples are skipped; throws when
/// every sample is near-degenerate (caller should supply gamma manually).
double estimate_gamma(const HermitianMatrixFunction& F, const Box& box, int index, int n_lines,
                      int n_samples, double safety);

} // namespace eigopt

#endif
