#include "helpers.hpp"

#include <eigopt/envelope2d.hpp>

#include <doctest.h>

#include <random>

using namespace eigopt;
using namespace eigopt::testing;

namespace {

RealVector v2(double x, double y) {
    RealVector v(2);
    v << x, y;
    return v;
}

ModelND flat(double x, double y, double value, double gamma) {
    return {v2(x, y), value, RealVector::Zero(2), gamma};
}

// Sign agreement between the half-plane and q_keep >= q_other on a grid.
bool constraint_matches_dominance(const ModelND& keep, const ModelND& other,
                                  const DominanceConstraint& dc) {
    if (dc.kind != DominanceConstraint::Kind::halfplane) return false;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const RealVector x = v2(-3.0 + 0.3 * i, -3.0 + 0.3 * j);
            const double diff = model_value(keep, x) - model_value(other, x);
            const double side = dc.hp.normal.dot(Eigen::Vector2d(x[0], x[1])) - dc.hp.offset;
            if (std::abs(diff) < 1e-9) continue; // on the boundary
            if ((diff >= 0.0) != (side <= 0.0)) return false;
        }
    return true;
}

} // namespace

TEST_SUITE("envelope2d") {

TEST_CASE("model values") {
    const ModelND m{v2(1.0, 2.0), 3.0, v2(0.5, -0.5), 2.0};
    CHECK(model_value(m, v2(1.0, 2.0)) == 3.0); // exact at the center
    CHECK(model_value(m, v2(2.0, 2.0)) == doctest::Approx(3.0 + 0.5 - 1.0));

    const std::vector<RealVector> grads{v2(1.0, 0.0), v2(0.0, 1.0)};
    CHECK(general_model_value(v2(0.0, 0.0), 0.0, grads, 2.0, v2(1.0, -1.0)) ==
          doctest::Approx(-1.0 - 2.0)); // min linear term -1, quadratic -2
    CHECK_THROWS_AS(general_model_value(v2(0.0, 0.0), 0.0, {}, 2.0, v2(0.0, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("dominance constraints on closed-form pairs") {
    // Flat models at (0,0) and (1,0): perpendicular bisector x1 <= 1/2.
    const ModelND a = flat(0.0, 0.0, 0.0, 2.0), b = flat(1.0, 0.0, 0.0, 2.0);
    const DominanceConstraint dab = dominance_constraint(a, b);
    REQUIRE(dab.kind == DominanceConstraint::Kind::halfplane);
    CHECK(dab.hp.normal.y() == doctest::Approx(0.0));
    CHECK(dab.hp.offset / dab.hp.normal.x() == doctest::Approx(0.5));
    CHECK(constraint_matches_dominance(a, b, dab));

    // Identical centers, gradients (1,0) vs (0,0): boundary through the
    // shared center.
    ModelND g1 = flat(0.0, 0.0, 0.0, 2.0);
    g1.gradient = v2(1.0, 0.0);
    const ModelND g0 = flat(0.0, 0.0, 0.0, 2.0);
    const DominanceConstraint dg = dominance_constraint(g0, g1);
    REQUIRE(dg.kind == DominanceConstraint::Kind::halfplane);
    CHECK(std::abs(dg.hp.offset) <= 1e-14);
    CHECK(constraint_matches_dominance(g0, g1, dg));

    // Centers (0,0), (2,2), values 0 and -4, gamma = 2: region of the first
    // is x1 + x2 <= 3 (verified symbolically and against the grid check).
    const ModelND p = flat(0.0, 0.0, 0.0, 2.0);
    const ModelND q = flat(2.0, 2.0, -4.0, 2.0);
    const DominanceConstraint dpq = dominance_constraint(p, q);
    REQUIRE(dpq.kind == DominanceConstraint::Kind::halfplane);
    CHECK(dpq.hp.normal.x() == doctest::Approx(dpq.hp.normal.y()));
    CHECK(dpq.hp.offset / dpq.hp.normal.x() == doctest::Approx(3.0));
    CHECK(constraint_matches_dominance(p, q, dpq));
}

TEST_CASE("degenerate dominance pairs") {
    const ModelND a = flat(0.0, 0.0, 1.0, 2.0);
    const ModelND b = flat(0.0, 0.0, 0.0, 2.0);
    CHECK(dominance_constraint(a, b).kind == DominanceConstraint::Kind::all_space);
    CHECK(dominance_constraint(b, a).kind == DominanceConstraint::Kind::empty);
    CHECK(dominance_constraint(a, a).kind == DominanceConstraint::Kind::all_space);
}

TEST_CASE("vertex enumeration on the unit box") {
    const Box box = Box::rectangle(0.0, 1.0, 0.0, 1.0);

    QPRegion free;
    CHECK(enumerate_vertices(free, box).size() == 4);

    QPRegion half;
    half.cuts.push_back({{1.0, 0.0}, 0.5}); // x1 <= 1/2
    const auto hv = enumerate_vertices(half, box);
    CHECK(hv.size() == 4);
    for (const Vertex& v : hv) CHECK(v.point.x() <= 0.5 + 1e-9);

    QPRegion quarter;
    quarter.cuts.push_back({{1.0, 0.0}, 0.5});
    quarter.cuts.push_back({{0.0, 1.0}, 0.5});
    const auto qv = enumerate_vertices(quarter, box);
    CHECK(qv.size() == 4);
    double max_x = 0.0, max_y = 0.0;
    for (const Vertex& v : qv) {
        max_x = std::max(max_x, v.point.x());
        max_y = std::max(max_y, v.point.y());
    }
    CHECK(max_x == doctest::Approx(0.5));
    CHECK(max_y == doctest::Approx(0.5));
}

TEST_CASE("region QP on closed-form instances") {
    const Box box = Box::rectangle(0.0, 1.0, 0.0, 1.0);

    // Single model at the box center: value -0.5 at every corner,
    // lexicographic tie-break picks (0, 0).
    const ModelND center = flat(0.5, 0.5, 0.0, 2.0);
    QPRegion whole;
    whole.vertices = enumerate_vertices(whole, box);
    const auto rm = solve_region_qp(whole, center, box);
    REQUIRE(rm.has_value());
    CHECK(rm->value == doctest::Approx(-0.5));
    CHECK(rm->point.x() == doctest::Approx(0.0));
    CHECK(rm->point.y() == doctest::Approx(0.0));

    // Two flat models at (0,0) and (1,0): the first dominates on x1 <= 1/2
    // and its minimum there is -1.25 at (0.5, 1); matches the grid.
    const std::vector<ModelND> pair{flat(0.0, 0.0, 0.0, 2.0), flat(1.0, 0.0, 0.0, 2.0)};
    QPRegion r0;
    r0.cuts.push_back(dominance_constraint(pair[0], pair[1]).hp);
    r0.vertices = enumerate_vertices(r0, box);
    const auto rm0 = solve_region_qp(r0, pair[0], box);
    REQUIRE(rm0.has_value());
    CHECK(rm0->value == doctest::Approx(-1.25));
    CHECK(rm0->point.x() == doctest::Approx(0.5));
    CHECK(rm0->point.y() == doctest::Approx(1.0));
    const GridMin2D grid = envelope_grid_min_2d(pair, box, 2001);
    CHECK(std::abs(grid.value - (-1.25)) <= 1e-5);

    // Contradictory cuts make the region empty.
    QPRegion empty;
    empty.cuts.push_back({{1.0, 0.0}, -1.0}); // x1 <= -1
    empty.cuts.push_back({{-1.0, 0.0}, -1.0}); // x1 >= 1
    empty.vertices = enumerate_vertices(empty, box);
    CHECK_FALSE(solve_region_qp(empty, pair[0], box).has_value());
}

TEST_CASE("envelope_min_nd on closed-form model sets") {
    const Box box = Box::rectangle(0.0, 1.0, 0.0, 1.0);

    const std::vector<ModelND> single{flat(0.5, 0.5, 0.0, 2.0)};
    const EnvelopeMinND es = envelope_min_nd(single, box);
    CHECK(es.value == doctest::Approx(-0.5));

    const std::vector<ModelND> pair{flat(0.0, 0.0, 0.0, 2.0), flat(1.0, 0.0, 0.0, 2.0)};
    const EnvelopeMinND ep = envelope_min_nd(pair, box);
    CHECK(ep.value == doctest::Approx(-1.25));
    CHECK(ep.point[0] == doctest::Approx(0.5));
    CHECK(ep.point[1] == doctest::Approx(1.0));

    const std::vector<ModelND> corners{flat(0.0, 0.0, 0.0, 2.0), flat(1.0, 0.0, 0.0, 2.0),
                                       flat(0.0, 1.0, 0.0, 2.0), flat(1.0, 1.0, 0.0, 2.0)};
    const EnvelopeMinND ec = envelope_min_nd(corners, box);
    CHECK(ec.value == doctest::Approx(-0.5));
    CHECK(ec.point[0] == doctest::Approx(0.5));
    CHECK(ec.point[1] == doctest::Approx(0.5));
}

TEST_CASE("envelope_min_nd equals a dense grid on seeded model sets") {
    std::mt19937_64 rng(217);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int inst = 0; inst < 50; ++inst) {
        const Box box = Box::rectangle(-1.0, 1.0 + unit(rng), -1.5, 0.5 + unit(rng));
        const double gamma = 0.5 + 2.0 * unit(rng);
        const int count = 2 + inst % 6;
        std::vector<ModelND> models;
        double scale = 0.0;
        for (int k = 0; k < count; ++k) {
            ModelND m;
            m.center = v2(box.lo[0] + unit(rng) * (box.hi[0] - box.lo[0]),
                          box.lo[1] + unit(rng) * (box.hi[1] - box.lo[1]));
            m.value = 2.0 * unit(rng) - 1.0;
            m.gradient = v2(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
            m.curvature = gamma;
            models.push_back(m);
            scale = std::max(scale, m.gradient.lpNorm<Eigen::Infinity>());
        }
        const EnvelopeMinND em = envelope_min_nd(models, box);
        const long N = inst < 10 ? 2001 : 501; // a few dense, the rest coarse
        const GridMin2D grid = envelope_grid_min_2d(models, box, N);
        const double h = std::max(box.hi[0] - box.lo[0], box.hi[1] - box.lo[1]) / double(N - 1);
        const double lipschitz = scale + gamma * (box.hi - box.lo).norm();
        CHECK(em.value <= grid.value + 1e-10);
        CHECK(grid.value - em.value <= 2.0 * lipschitz * h);
    }
}

TEST_CASE("incremental updates preserve region minima away from the new cut") {
    const Box box = Box::rectangle(0.0, 1.0, 0.0, 1.0);
    EnvelopeStateND state;
    state.box = box;
    add_model(state, flat(0.1, 0.1, 0.0, 2.0));
    add_model(state, flat(0.9, 0.9, 0.0, 2.0));
    REQUIRE(state.regions[0].minimum.has_value());
    const RegionMinimum before = *state.regions[0].minimum;

    // A model tucked into the far corner: its dominance cut misses region 0.
    add_model(state, flat(0.95, 0.05, -0.05, 2.0));
    REQUIRE(state.regions[0].minimum.has_value());
    CHECK(state.regions[0].minimum->value == before.value);
    CHECK(state.regions[0].minimum->point == before.point);
}

TEST_CASE("incremental envelope equals from-scratch envelope") {
    std::mt19937_64 rng(881);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Box box = Box::rectangle(-1.0, 1.0, -1.0, 1.0);
    EnvelopeStateND state;
    state.box = box;
    std::vector<ModelND> models;
    double prev_lower = -kInf;
    for (int k = 0; k < 12; ++k) {
        ModelND m;
        m.center = v2(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
        m.value = unit(rng);
        m.gradient = v2(unit(rng) - 0.5, unit(rng) - 0.5);
        m.curvature = 1.5;
        models.push_back(m);
        add_model(state, m);

        const ActiveEnvelopeMin inc = envelope_min(state);
        const EnvelopeMinND fresh = envelope_min_nd(models, box);
        CHECK(inc.active_min == doctest::Approx(fresh.value).epsilon(1e-12));
        CHECK(inc.lower >= prev_lower - 1e-12); // envelope only rises
        prev_lower = inc.lower;
    }
}

TEST_CASE("adding a model at the previous argmin raises the envelope there") {
    const Box box = Box::rectangle(0.0, 1.0, 0.0, 1.0);
    EnvelopeStateND state;
    state.box = box;
    add_model(state, flat(0.5, 0.5, 0.0, 2.0));
    const ActiveEnvelopeMin em = envelope_min(state);
    const double old_lower = em.active_min;

    // New model evaluated at the argmin with some value f >= old envelope min.
    const double f_there = 0.3;
    ModelND next{RealVector(em.point), f_there, RealVector::Zero(2), 2.0};
    add_model(state, next);
    // The envelope at that point now equals f(x_{s+1}) >= old lower bound.
    double env_at = -kInf;
    for (const ModelND& m : state.models) env_at = std::max(env_at, model_value(m, RealVector(em.point)));
    CHECK(env_at == doctest::Approx(f_there));
    CHECK(env_at >= old_lower);
}

TEST_CASE("algorithm1 minimizes ||x||^2") {
    const GradientFunction f = [](const RealVector& x) {
        return ValueGradient{x.squaredNorm(), 2.0 * x};
    };
    const Box box = Box::rectangle(-1.0, 1.0, -1.0, 1.0);
    OptimizeControls ctl;
    ctl.eps = 1e-8;
    const OptResult r = algorithm1(f, box, 2.5, ctl);
    CHECK(r.status == Status::converged);
    CHECK(r.value <= 1e-8);
    CHECK(r.argmin.norm() <= 2e-4);
    CHECK(history_invariants_hold(r.history));
}

TEST_CASE("algorithm1 on sigma_min([A - zI, I]) with A = 0") {
    const MatrixFunction F = uncontrollability_function(ComplexMatrix::Zero(2, 2),
                                                        ComplexMatrix::Identity(2, 2));
    const GradientFunction f = [&F](const RealVector& w) {
        const SingularTriple t = evaluate_singular_triple(F, w, 2);
        return ValueGradient{t.value, sval_gradient(F, w, t)};
    };
    OptimizeControls ctl;
    ctl.eps = 1e-8;
    const OptResult r = algorithm1(f, Box::rectangle(-1.0, 1.0, -1.0, 1.0), 1.0, ctl);
    CHECK(r.status == Status::converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.argmin.norm() <= 1e-3);
}

TEST_CASE("algorithm1 agrees with a grid oracle on a seeded uncontrollability instance") {
    std::mt19937_64 rng(4242);
    const ComplexMatrix A = random_complex(6, 6, rng);
    const ComplexMatrix B = random_complex(6, 2, rng);
    const MatrixFunction F = uncontrollability_function(A, B);
    const GradientFunction f = [&F](const RealVector& w) {
        const SingularTriple t = evaluate_singular_triple(F, w, 6);
        return ValueGradient{t.value, sval_gradient(F, w, t)};
    };
    const Box box = Box::rectangle(-3.0, 3.0, -3.0, 3.0);
    OptimizeControls ctl;
    ctl.eps = 1e-3;
    ctl.max_iter = 2000;
    const OptResult r = algorithm1(f, box, 2.0, ctl);
    CHECK(r.status == Status::converged);

    auto sigma_min = [&F](const RealVector& w) {
        const ComplexMatrix M = F.eval(w);
        return Eigen::BDCSVD<ComplexMatrix>(M).singularValues()(5);
    };
    // sigma_min is 1-Lipschitz in z.
    long count = 0;
    double best = kInf;
    for (int i = 0; i < 501; ++i)
        for (int j = 0; j < 501; ++j) {
            const double v = sigma_min(v2(-3.0 + 6.0 * i / 500.0, -3.0 + 6.0 * j / 500.0));
            best = std::min(best, v);
            ++count;
        }
    const double guarantee = std::sqrt(2.0) * 0.5 * (6.0 / 500.0);
    CHECK(r.lower <= best + 1e-12);
    CHECK(best <= r.upper + 1e-12);
    CHECK(std::abs(r.value - best) <= ctl.eps + guarantee);
}

TEST_CASE("limit points reach the grid argmin on seeded smooth instances") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int inst = 0; inst < 10; ++inst) {
        // Two-gaussian landscape with a unique, well-separated minimum.
        const double cx1 = unit(rng) - 0.5, cy1 = unit(rng) - 0.5;
        const double cx2 = unit(rng) - 0.5, cy2 = unit(rng) - 0.5;
        auto f_val = [&](double x, double y) {
            const double d1 = (x - cx1) * (x - cx1) + (y - cy1) * (y - cy1);
            const double d2 = (x - cx2) * (x - cx2) + (y - cy2) * (y - cy2);
            return -std::exp(-2.0 * d1) - 0.5 * std::exp(-2.0 * d2);
        };
        const GradientFunction f = [&](const RealVector& w) {
            const double x = w[0], y = w[1];
            const double e1 = std::exp(-2.0 * ((x - cx1) * (x - cx1) + (y - cy1) * (y - cy1)));
            const double e2 = std::exp(-2.0 * ((x - cx2) * (x - cx2) + (y - cy2) * (y - cy2)));
            RealVector g(2);
            g[0] = 4.0 * (x - cx1) * e1 + 2.0 * (x - cx2) * e2;
            g[1] = 4.0 * (y - cy1) * e1 + 2.0 * (y - cy2) * e2;
            return ValueGradient{-e1 - 0.5 * e2, g};
        };
        const Box box = Box::rectangle(-1.0, 1.0, -1.0, 1.0);
        OptimizeControls ctl;
        ctl.eps = 1e-6;
        ctl.max_iter = 4000;
        const OptResult r = algorithm1(f, box, 8.0, ctl); // |f''| <= 4 along lines; margin
        REQUIRE(r.status == Status::converged);

        const int N = 801;
        double best = kInf;
        RealVector arg(2);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const double x = -1.0 + 2.0 * i / double(N - 1);
                const double y = -1.0 + 2.0 * j / double(N - 1);
                const double v = f_val(x, y);
                if (v < best) {
                    best = v;
                    arg = v2(x, y);
                }
            }
        CHECK(r.lower <= best + 1e-12);
        CHECK((r.argmin - arg).norm() <= 0.02);
    }
}

TEST_CASE("dimension guard") {
    const GradientFunction f = [](const RealVector& x) {
        return ValueGradient{x.squaredNorm(), 2.0 * x};
    };
    RealVector lo(3), hi(3);
    lo << -1, -1, -1;
    hi << 1, 1, 1;
    OptimizeControls ctl;
    CHECK_THROWS_AS(algorithm1(f, Box(lo, hi), 1.0, ctl), std::invalid_argument);
}

} // TEST_SUITE
