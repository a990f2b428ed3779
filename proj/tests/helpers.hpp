// Shared test utilities: seeded random instances, smooth matrix-function
// builders with exact derivatives, dense-grid envelope oracles, and history
// invariant checks.
#ifndef EIGOPT_TEST_HELPERS_HPP
#define EIGOPT_TEST_HELPERS_HPP

#include <eigopt/apps.hpp>
#include <eigopt/envelope1d.hpp>
#include <eigopt/envelope2d.hpp>
#include <eigopt/matfunc.hpp>

#include <random>

namespace eigopt::testing {

inline ComplexMatrix random_complex(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix A(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = Complex(g(rng), g(rng));
    return A;
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
    const ComplexMatrix R = random_complex(n, n, rng);
    return 0.5 * (R + R.adjoint());
}

// Random unitary from the QR factorization of a Gaussian matrix.
inline ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    const ComplexMatrix R = random_complex(n, n, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(R);
    return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

// Smooth Hermitian family with exact first and second derivatives:
//   d = 1:  A(w) = H0 + sin(w1) H1 + cos(w1) H2
//   d = 2:  A(w) = H0 + sin(w1) H1 + cos(w2) H2 + cos(w1 + w2) H3
// Coefficient matrices are normalized to unit spectral norm.
inline HermitianMatrixFunction random_smooth_function(int n, int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto coeff = [&] {
        ComplexMatrix H = random_hermitian(n, rng);
        return ComplexMatrix(H / spectral_norm(H));
    };
    const ComplexMatrix H0 = coeff(), H1 = coeff(), H2 = coeff();
    const ComplexMatrix H3 = d == 2 ? coeff() : ComplexMatrix();

    HermitianMatrixFunction F;
    F.dim_domain = d;
    F.dim_matrix = n;
    if (d == 1) {
        F.eval = [=](const RealVector& w) {
            return ComplexMatrix(H0 + std::sin(w[0]) * H1 + std::cos(w[0]) * H2);
        };
        F.partial = [=](const RealVector& w, int) {
            return ComplexMatrix(std::cos(w[0]) * H1 - std::sin(w[0]) * H2);
        };
        F.second_partial_along = [=](const RealVector& w, const RealVector& p) {
            return ComplexMatrix(p[0] * p[0] * (-std::sin(w[0]) * H1 - std::cos(w[0]) * H2));
        };
    } else {
        F.eval = [=](const RealVector& w) {
            return ComplexMatrix(H0 + std::sin(w[0]) * H1 + std::cos(w[1]) * H2 +
                                 std::cos(w[0] + w[1]) * H3);
        };
        F.partial = [=](const RealVector& w, int k) {
            ComplexMatrix out = -std::sin(w[0] + w[1]) * H3;
            if (k == 0)
                out += std::cos(w[0]) * H1;
            else
                out += -std::sin(w[1]) * H2;
            return out;
        };
        F.second_partial_along = [=](const RealVector& w, const RealVector& p) {
            const double q = p[0] + p[1];
            return ComplexMatrix(-p[0] * p[0] * std::sin(w[0]) * H1 -
                                 p[1] * p[1] * std::cos(w[1]) * H2 -
                                 q * q * std::cos(w[0] + w[1]) * H3);
        };
    }
    return F;
}

// Smooth rectangular family for singular-value tests:
//   d = 1:  B(w) = B0 + sin(w1) B1;   d = 2:  B(w) = B0 + sin(w1) B1 + cos(w2) B2
inline MatrixFunction random_smooth_rect(int rows, int cols, int d, uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto coeff = [&] {
        ComplexMatrix B = random_complex(rows, cols, rng);
        return ComplexMatrix(B / spectral_norm(B));
    };
    const ComplexMatrix B0 = coeff(), B1 = coeff();
    const ComplexMatrix B2 = d == 2 ? coeff() : ComplexMatrix();

    MatrixFunction F;
    F.dim_domain = d;
    F.rows = rows;
    F.cols = cols;
    if (d == 1) {
        F.eval = [=](const RealVector& w) { return ComplexMatrix(B0 + std::sin(w[0]) * B1); };
        F.partial = [=](const RealVector& w, int) { return ComplexMatrix(std::cos(w[0]) * B1); };
    } else {
        F.eval = [=](const RealVector& w) {
            return ComplexMatrix(B0 + std::sin(w[0]) * B1 + std::cos(w[1]) * B2);
        };
        F.partial = [=](const RealVector& w, int k) {
            return ComplexMatrix(k == 0 ? std::cos(w[0]) * B1 : -std::sin(w[1]) * B2);
        };
    }
    return F;
}

// Finite-difference discretization of the 2D Poisson operator on a g x g
// interior grid (n = g^2 unknowns, pentadiagonal, diagonal 4).
inline RealMatrix poisson_matrix(int g) {
    const int n = g * g;
    RealMatrix P = RealMatrix::Zero(n, n);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const int k = i * g + j;
            P(k, k) = 4.0;
            if (i > 0) P(k, k - g) = -1.0;
            if (i < g - 1) P(k, k + g) = -1.0;
            if (j > 0) P(k, k - 1) = -1.0;
            if (j < g - 1) P(k, k + 1) = -1.0;
        }
    return P;
}

// Poisson-random test matrix: P - (n/20) i R with Gaussian R.
inline ComplexMatrix poisson_random(int g, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int n = g * g;
    const RealMatrix P = poisson_matrix(g);
    ComplexMatrix R(n, n);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
    return P.cast<Complex>() - Complex(0.0, n / 20.0) * R;
}

// Banded Toeplitz matrix with constant diagonals; diags[k] is the diagonal at
// offset k - band (so diags.size() == 2 band + 1).
inline ComplexMatrix banded_toeplitz(int n, const std::vector<double>& diags) {
    const int band = static_cast<int>(diags.size()) / 2;
    ComplexMatrix T = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(i - j) <= band) T(i, j) = diags[static_cast<size_t>(j - i + band)];
    return T;
}

struct GridMin1D {
    double x = 0.0;
    double value = kInf;
};

// Dense evaluation of the 1D envelope; ties keep the smallest x.
inline GridMin1D envelope_grid_min(std::span<const Model1D> models, double a, double b, long N) {
    GridMin1D best;
    for (long i = 0; i < N; ++i) {
        const double x = a + (b - a) * double(i) / double(N - 1);
        const double v = envelope_value(models, x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

struct GridMin2D {
    Eigen::Vector2d x{0.0, 0.0};
    double value = kInf;
};

// Dense evaluation of the 2D envelope on an N x N grid.
inline GridMin2D envelope_grid_min_2d(std::span<const ModelND> models, const Box& box, long N) {
    GridMin2D best;
    RealVector x(2);
    for (long i = 0; i < N; ++i) {
        x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * double(i) / double(N - 1);
        for (long j = 0; j < N; ++j) {
            x[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * double(j) / double(N - 1);
            double v = -kInf;
            for (const ModelND& m : models) v = std::max(v, model_value(m, x));
            if (v < best.value) best = {x, v};
        }
    }
    return best;
}

// l nondecreasing, u nonincreasing, l <= u on every row.
inline bool history_invariants_hold(const std::vector<HistoryRow>& rows) {
    double prev_l = -kInf, prev_u = kInf;
    for (const HistoryRow& row : rows) {
        if (row.lower < prev_l || row.upper > prev_u) return false;
        if (row.lower > row.upper) return false;
        prev_l = row.lower;
        prev_u = row.upper;
    }
    return true;
}

} // namespace eigopt::testing

#endif
