#include <eigopt/matfunc.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace eigopt {

namespace {

constexpr double kHermitianTol = 1e-12;   // per-entry self-adjointness tolerance
constexpr double kDegenerateGap = 1e-8;   // below this the 1/(lambda_j - lambda_k) sum blows up
constexpr double kFdStep = 1e-5;          // central-difference step for the d^2A fallback

std::string format_point(const RealVector& omega) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < omega.size(); ++i)
        os << (i ? ", " : "") << omega[i];
    os << ")";
    return os.str();
}

void require_hermitian(const ComplexMatrix& A, const RealVector& omega, const char* what) {
    const double err = (A - A.adjoint()).cwiseAbs().maxCoeff();
    if (!(err <= kHermitianTol))
        throw std::invalid_argument(std::string(what) + " is not Hermitian at omega = " +
                                    format_point(omega) + " (max deviation " + std::to_string(err) + ")");
}

void require_index(int j, int n) {
    if (j < 1 || j > n)
        throw std::invalid_argument("eigenvalue index j = " + std::to_string(j) +
                                    " out of range 1.." + std::to_string(n));
}

// Makes the largest-magnitude component real positive.  Ties in magnitude go
// to the lowest index, so the result is deterministic for identical input.
void fix_phase(Eigen::Ref<ComplexVector> v) {
    Eigen::Index pivot = 0;
    double best = std::norm(v[0]);
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        const double m = std::norm(v[i]);
        if (m > best) {
            best = m;
            pivot = i;
        }
    }
    const Complex z = v[pivot];
    const double a = std::abs(z);
    if (a > 0.0) v *= std::conj(z) / a;
}

double gap_at(const RealVector& values, Eigen::Index col) {
    double g = kInf;
    for (Eigen::Index k = 0; k < values.size(); ++k)
        if (k != col) g = std::min(g, std::abs(values[col] - values[k]));
    return g;
}

// dA/d alpha = sum_k p_k dA/d omega_k at omega.
ComplexMatrix directional_partial(const HermitianMatrixFunction& F, const RealVector& omega,
                                  const RealVector& p) {
    ComplexMatrix D = ComplexMatrix::Zero(F.dim_matrix, F.dim_matrix);
    for (int k = 0; k < F.dim_domain; ++k) {
        if (p[k] == 0.0) continue;
        D += p[k] * F.partial(omega, k);
    }
    return D;
}

} // namespace

EigenDecomposition decompose_hermitian(const HermitianMatrixFunction& F, const RealVector& omega) {
    if (!F.eval || !F.partial) throw std::invalid_argument("HermitianMatrixFunction: eval/partial not set");
    if (omega.size() != F.dim_domain)
        throw std::invalid_argument("omega has dimension " + std::to_string(omega.size()) +
                                    ", expected " + std::to_string(F.dim_domain));
    if (!omega.allFinite())
        throw std::invalid_argument("omega is not finite: " + format_point(omega));

    const ComplexMatrix A = F.eval(omega);
    if (A.rows() != F.dim_matrix || A.cols() != F.dim_matrix)
        throw std::invalid_argument("eval returned a matrix of wrong size");
    require_hermitian(A, omega, "A(omega)");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Hermitian eigensolver failed to converge at omega = " + format_point(omega));

    const int n = F.dim_matrix;
    EigenDecomposition dec;
    dec.values.resize(n);
    dec.vectors.resize(n, n);
    // Eigen returns ascending order; expose descending.
    for (int j = 0; j < n; ++j) {
        dec.values[j] = es.eigenvalues()[n - 1 - j];
        dec.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
        fix_phase(dec.vectors.col(j));
    }
    return dec;
}

EigenPoint evaluate_eig(const HermitianMatrixFunction& F, const RealVector& omega, int j) {
    require_index(j, F.dim_matrix);
    const EigenDecomposition dec = decompose_hermitian(F, omega);

    EigenPoint ep;
    ep.omega = omega;
    ep.index = j;
    ep.value = dec.values[j - 1];
    ep.eigenvector = dec.vectors.col(j - 1);
    ep.gap = F.dim_matrix > 1 ? gap_at(dec.values, j - 1) : kInf;
    return ep;
}

RealVector eig_gradient(const HermitianMatrixFunction& F, const EigenPoint& ep) {
    RealVector g(F.dim_domain);
    for (int k = 0; k < F.dim_domain; ++k) {
        const ComplexMatrix dA = F.partial(ep.omega, k);
        require_hermitian(dA, ep.omega, "dA/d omega_k");
        const Complex raw = ep.eigenvector.dot(dA * ep.eigenvector); // v* dA v
        if (std::abs(raw.imag()) >= 1e-10)
            throw std::runtime_error("eig_gradient: v* dA v has non-negligible imaginary part " +
                                     std::to_string(raw.imag()));
        g[k] = raw.real();
    }
    return g;
}

double eig_second_derivative_line(const HermitianMatrixFunction& F, const RealVector& omega,
                                  const RealVector& direction, int j) {
    require_index(j, F.dim_matrix);
    if (direction.size() != F.dim_domain)
        throw std::invalid_argument("direction has wrong dimension");
    const double plen = direction.norm();
    if (!(plen > 0.0)) throw std::invalid_argument("direction must be nonzero");
    const RealVector p = direction / plen;

    const EigenDecomposition dec = decompose_hermitian(F, omega);
    const int n = F.dim_matrix;
    const double lambda_j = dec.values[j - 1];

    if (n > 1 && gap_at(dec.values, j - 1) < kDegenerateGap)
        throw std::runtime_error("eig_second_derivative_line: eigenvalue " + std::to_string(j) +
                                 " is numerically degenerate at omega = " + format_point(omega));

    ComplexMatrix A2;
    if (F.second_partial_along) {
        A2 = F.second_partial_along(omega, p);
    } else {
        // Central difference of the directional first derivative.
        const RealVector fwd = omega + kFdStep * p;
        const RealVector bwd = omega - kFdStep * p;
        A2 = (directional_partial(F, fwd, p) - directional_partial(F, bwd, p)) / (2.0 * kFdStep);
    }
    require_hermitian(A2, omega, "d^2A/d alpha^2");

    const ComplexMatrix A1 = directional_partial(F, omega, p);
    const ComplexVector vj = dec.vectors.col(j - 1);
    const ComplexVector A1vj = A1 * vj;

    double out = vj.dot(A2 * vj).real();
    for (int k = 0; k < n; ++k) {
        if (k == j - 1) continue;
        const Complex coupling = dec.vectors.col(k).dot(A1vj); // v_k* A' v_j
        out += 2.0 * std::norm(coupling) / (lambda_j - dec.values[k]);
    }
    return out;
}

HermitianMatrixFunction embed_singular(const MatrixFunction& B) {
    if (!B.eval || !B.partial) throw std::invalid_argument("MatrixFunction: eval/partial not set");
    const int n = B.rows, m = B.cols, N = n + m;

    auto embed = [n, m, N](const ComplexMatrix& Bval) {
        ComplexMatrix A = ComplexMatrix::Zero(N, N);
        A.topRightCorner(n, m) = Bval;
        A.bottomLeftCorner(m, n) = Bval.adjoint();
        return A;
    };

    HermitianMatrixFunction F;
    F.dim_domain = B.dim_domain;
    F.dim_matrix = N;
    F.eval = [embed, eval = B.eval](const RealVector& omega) { return embed(eval(omega)); };
    F.partial = [embed, partial = B.partial](const RealVector& omega, int k) {
        return embed(partial(omega, k));
    };
    if (B.second_partial_along)
        F.second_partial_along = [embed, second = B.second_partial_along](const RealVector& omega,
                                                                          const RealVector& p) {
            return embed(second(omega, p));
        };
    return F;
}

SingularTriple evaluate_singular_triple(const MatrixFunction& B, const RealVector& omega, int j) {
    if (j < 1 || j > std::min(B.rows, B.cols))
        throw std::invalid_argument("singular value index j = " + std::to_string(j) +
                                    " out of range 1.." + std::to_string(std::min(B.rows, B.cols)));
    const HermitianMatrixFunction F = embed_singular(B);
    const EigenPoint ep = evaluate_eig(F, omega, j);

    // Unit eigenvector [u; w] of the embedding has ||u|| = ||w|| = 1/sqrt(2);
    // scaling by sqrt(2) yields the consistent unit singular vectors.
    SingularTriple t;
    t.value = ep.value;
    t.left = std::sqrt(2.0) * ep.eigenvector.head(B.rows);
    t.right = std::sqrt(2.0) * ep.eigenvector.tail(B.cols);
    return t;
}

RealVector sval_gradient(const MatrixFunction& B, const RealVector& omega,
                         const SingularTriple& triple) {
    if (!(triple.value > 0.0))
        throw std::runtime_error("sval_gradient: sigma = 0 has no well-defined branch derivative; "
                                 "use the Hermitian embedding directly");
    RealVector g(B.dim_domain);
    for (int k = 0; k < B.dim_domain; ++k)
        g[k] = triple.left.dot(B.partial(omega, k) * triple.right).real(); // Real(u* dB w)
    return g;
}

double estimate_gamma(const HermitianMatrixFunction& F, const Box& box, int index, int n_lines,
                      int n_samples, double safety) {
    if (box.dim() != F.dim_domain) throw std::invalid_argument("estimate_gamma: box/function dimension mismatch");
    require_index(index, F.dim_matrix);
    if (n_lines < 1 || n_samples < 1) throw std::invalid_argument("estimate_gamma: need n_lines, n_samples >= 1");
    if (!(safety >= 1.0)) throw std::invalid_argument("estimate_gamma: safety factor must be >= 1");

    const int d = box.dim();
    std::mt19937_64 rng(0x6f70746d61747267ULL); // fixed seed: estimates are deterministic
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double worst = 0.0;
    long usable = 0;

    for (int line = 0; line < n_lines; ++line) {
        RealVector x0(d), p(d);
        for (int k = 0; k < d; ++k) x0[k] = box.lo[k] + unit(rng) * (box.hi[k] - box.lo[k]);
        if (d == 1) {
            p[0] = 1.0;
        } else {
            do {
                for (int k = 0; k < d; ++k) p[k] = gauss(rng);
            } while (p.norm() < 1e-8);
            p.normalize();
        }

        // Clip the line x0 + t p to the box.
        double t_lo = -kInf, t_hi = kInf;
        for (int k = 0; k < d; ++k) {
            if (p[k] == 0.0) continue;
            const double ta = (box.lo[k] - x0[k]) / p[k];
            const double tb = (box.hi[k] - x0[k]) / p[k];
            t_lo = std::max(t_lo, std::min(ta, tb));
            t_hi = std::min(t_hi, std::max(ta, tb));
        }

        for (int i = 0; i < n_samples; ++i) {
            const double t = n_samples == 1 ? 0.5 * (t_lo + t_hi)
                                            : t_lo + (t_hi - t_lo) * double(i) / double(n_samples - 1);
            const RealVector x = x0 + t * p;
            try {
                worst = std::max(worst, std::abs(eig_second_derivative_line(F, x, p, index)));
                ++usable;
            } catch (const std::runtime_error&) {
                // near-degenerate sample; skip
            }
        }
    }

    if (usable == 0)
        throw std::runtime_error("estimate_gamma: every sampled point was near-degenerate; "
                                 "supply gamma manually");
    return safety * worst;
}

} // namespace eigopt
