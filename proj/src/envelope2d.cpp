#include <eigopt/envelope2d.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace eigopt {

namespace {

constexpr double kParallelTol = 1e-12; // |cross| cutoff, scaled by the two normal lengths
constexpr double kStallTol = 1e-14;

bool lex_less(const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    if (p.x() != q.x()) return p.x() < q.x();
    return p.y() < q.y();
}

std::array<HalfPlane, 4> box_faces(const Box& box) {
    return {HalfPlane{{-1.0, 0.0}, -box.lo[0]}, HalfPlane{{1.0, 0.0}, box.hi[0]},
            HalfPlane{{0.0, -1.0}, -box.lo[1]}, HalfPlane{{0.0, 1.0}, box.hi[1]}};
}

HalfPlane boundary_line(const QPRegion& region, const std::array<HalfPlane, 4>& faces, int idx) {
    return idx < 4 ? faces[idx] : region.cuts[idx - 4];
}

bool satisfies(const HalfPlane& hp, const Eigen::Vector2d& p) {
    return hp.normal.dot(p) <= hp.offset + 1e-9 * (1.0 + std::abs(hp.offset));
}

bool feasible_point(const QPRegion& region, const std::array<HalfPlane, 4>& faces,
                    const Eigen::Vector2d& p) {
    for (const HalfPlane& f : faces)
        if (!satisfies(f, p)) return false;
    for (const HalfPlane& c : region.cuts)
        if (!satisfies(c, p)) return false;
    return true;
}

std::optional<Eigen::Vector2d> intersect(const HalfPlane& u, const HalfPlane& v) {
    const double cross = u.normal.x() * v.normal.y() - u.normal.y() * v.normal.x();
    if (std::abs(cross) < kParallelTol * u.normal.norm() * v.normal.norm()) return std::nullopt;
    return Eigen::Vector2d{(u.offset * v.normal.y() - v.offset * u.normal.y()) / cross,
                           (u.normal.x() * v.offset - v.normal.x() * u.offset) / cross};
}

std::vector<Vertex> enumerate_vertices_counted(const QPRegion& region, const Box& box, long& ops) {
    const auto faces = box_faces(box);
    const int total = 4 + static_cast<int>(region.cuts.size());
    std::vector<Vertex> out;
    for (int i = 0; i < total; ++i) {
        const HalfPlane li = boundary_line(region, faces, i);
        for (int j = i + 1; j < total; ++j) {
            const auto p = intersect(li, boundary_line(region, faces, j));
            if (!p) continue;
            ++ops;
            if (feasible_point(region, faces, *p)) out.push_back({*p, i, j, true});
        }
    }
    return out;
}

std::optional<RegionMinimum> min_over_vertices(const QPRegion& region, const ModelND& model) {
    std::optional<RegionMinimum> best;
    for (const Vertex& v : region.vertices) {
        if (!v.feasible) continue;
        const double val = model_value(model, v.point);
        if (!best || val < best->value ||
            (val == best->value && lex_less(v.point, best->point)))
            best = RegionMinimum{v.point, val};
    }
    return best;
}

// Fresh construction of model k's dominance region against all other models.
QPRegion build_region(int k, std::span<const ModelND> models, const Box& box, long& ops) {
    QPRegion region;
    region.owner = k;
    for (size_t l = 0; l < models.size(); ++l) {
        if (static_cast<int>(l) == k) continue;
        const DominanceConstraint dc = dominance_constraint(models[k], models[l]);
        if (dc.kind == DominanceConstraint::Kind::all_space) continue;
        if (dc.kind == DominanceConstraint::Kind::empty) {
            region.empty = true;
            return region;
        }
        region.cuts.push_back(dc.hp);
    }
    region.vertices = enumerate_vertices_counted(region, box, ops);
    region.minimum = min_over_vertices(region, models[k]);
    return region;
}

std::string format_point(const RealVector& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

} // namespace

double model_value(const ModelND& m, const RealVector& x) {
    const RealVector dx = x - m.center;
    return m.value + m.gradient.dot(dx) - 0.5 * m.curvature * dx.squaredNorm();
}

double general_model_value(const RealVector& center, double value,
                           const std::vector<RealVector>& gradients, double curvature,
                           const RealVector& x) {
    if (gradients.empty())
        throw std::invalid_argument("general_model_value: at least one gradient required");
    const RealVector dx = x - center;
    double lin = kInf;
    for (const RealVector& g : gradients) lin = std::min(lin, g.dot(dx));
    return value + lin - 0.5 * curvature * dx.squaredNorm();
}

DominanceConstraint dominance_constraint(const ModelND& keep, const ModelND& other) {
    const double gamma = keep.curvature;
    const Eigen::Vector2d xk = keep.center, xl = other.center;
    const Eigen::Vector2d gk = keep.gradient, gl = other.gradient;

    DominanceConstraint dc;
    dc.hp.normal = gl - gk + gamma * (xl - xk);
    dc.hp.offset = keep.value - other.value - gk.dot(xk) + gl.dot(xl) +
                   0.5 * gamma * (xl.squaredNorm() - xk.squaredNorm());

    const double scale =
        std::max(1.0, gamma * (xk.norm() + xl.norm()) + gk.norm() + gl.norm());
    if (dc.hp.normal.norm() <= 1e-14 * scale)
        dc.kind = dc.hp.offset >= 0.0 ? DominanceConstraint::Kind::all_space
                                      : DominanceConstraint::Kind::empty;
    return dc;
}

std::vector<Vertex> enumerate_vertices(const QPRegion& region, const Box& box) {
    if (box.dim() != 2) throw std::invalid_argument("enumerate_vertices: d = 2 only");
    long ops = 0;
    return enumerate_vertices_counted(region, box, ops);
}

std::optional<RegionMinimum> solve_region_qp(const QPRegion& region, const ModelND& model,
                                             const Box& box) {
    if (box.dim() != 2) throw std::invalid_argument("solve_region_qp: d = 2 only");
    if (region.empty) return std::nullopt;
    return min_over_vertices(region, model);
}

EnvelopeMinND envelope_min_nd(std::span<const ModelND> models, const Box& box) {
    if (models.empty()) throw std::invalid_argument("envelope_min_nd: no models");
    const int d = box.dim();
    if (d == 1) {
        std::vector<Model1D> m1;
        m1.reserve(models.size());
        for (const ModelND& m : models)
            m1.push_back({m.center[0], m.value, m.gradient[0], m.gradient[0], m.curvature});
        const EnvelopeMin1D em = envelope_min(m1, box.lo[0], box.hi[0]);
        return {RealVector::Constant(1, em.x), em.value};
    }
    if (d != 2) throw std::invalid_argument("envelope_min_nd: supported for d in {1, 2} only");

    long ops = 0;
    std::optional<RegionMinimum> best;
    for (size_t k = 0; k < models.size(); ++k) {
        const QPRegion region = build_region(static_cast<int>(k), models, box, ops);
        const auto rm = solve_region_qp(region, models[k], box);
        if (!rm) continue;
        if (!best || rm->value < best->value ||
            (rm->value == best->value && lex_less(rm->point, best->point)))
            best = rm;
    }
    if (!best) throw std::logic_error("envelope_min_nd: every region came out empty");
    return {RealVector(best->point), best->value};
}

void add_model(EnvelopeStateND& state, const ModelND& model) {
    const auto faces = box_faces(state.box);

    // Existing regions gain one constraint; pruned and empty regions are left
    // untouched (a stale cached minimum remains a valid bound over the larger
    // region it was computed for).
    for (QPRegion& region : state.regions) {
        if (region.pruned || region.empty) continue;
        const DominanceConstraint dc = dominance_constraint(state.models[region.owner], model);
        if (dc.kind == DominanceConstraint::Kind::all_space) continue;
        if (dc.kind == DominanceConstraint::Kind::empty) {
            region.empty = true;
            region.vertices.clear();
            region.minimum.reset();
            continue;
        }

        region.cuts.push_back(dc.hp);
        const int new_idx = 3 + static_cast<int>(region.cuts.size());

        bool cut_any = false;
        std::erase_if(region.vertices, [&](const Vertex& v) {
            const bool gone = !satisfies(dc.hp, v.point);
            cut_any |= gone;
            return gone;
        });

        bool added_any = false;
        for (int i = 0; i < new_idx; ++i) {
            const auto p = intersect(boundary_line(region, faces, i), dc.hp);
            if (!p) continue;
            ++state.vertex_ops;
            if (feasible_point(region, faces, *p)) {
                region.vertices.push_back({*p, i, new_idx, true});
                added_any = true;
            }
        }

        if (cut_any || added_any)
            region.minimum = min_over_vertices(region, state.models[region.owner]);
    }

    state.models.push_back(model);
    state.regions.push_back(build_region(static_cast<int>(state.models.size()) - 1, state.models,
                                         state.box, state.vertex_ops));
}

ActiveEnvelopeMin envelope_min(const EnvelopeStateND& state) {
    ActiveEnvelopeMin out;
    out.point.setZero();
    bool found = false;
    for (const QPRegion& region : state.regions) {
        if (region.pruned || region.empty || !region.minimum) continue;
        const RegionMinimum& rm = *region.minimum;
        if (!found || rm.value < out.active_min ||
            (rm.value == out.active_min && lex_less(rm.point, out.point))) {
            out.point = rm.point;
            out.active_min = rm.value;
            found = true;
        }
    }
    out.lower = std::min(out.active_min, state.pruned_floor);
    return out;
}

void prune_regions(EnvelopeStateND& state, double cutoff) {
    for (QPRegion& region : state.regions) {
        if (region.pruned || region.empty || !region.minimum) continue;
        if (region.minimum->value > cutoff) {
            region.pruned = true;
            state.pruned_floor = std::min(state.pruned_floor, region.minimum->value);
        }
    }
}

OptResult algorithm1(const GradientFunction& f, const Box& box, double gamma,
                     const OptimizeControls& controls) {
    if (!(gamma > 0.0)) throw std::invalid_argument("algorithm1: requires gamma > 0");
    if (!(controls.eps > 0.0)) throw std::invalid_argument("algorithm1: requires eps > 0");
    const int d = box.dim();
    if (d > 2)
        throw std::invalid_argument("algorithm1: the envelope QP is implemented for d in {1, 2}; "
                                    "got d = " + std::to_string(d));

    if (d == 1) {
        const ScalarFunction1D wrapped = [&f](double x) {
            const ValueGradient vg = f(RealVector::Constant(1, x));
            return FunctionSample1D{vg.value, {vg.gradient[0]}};
        };
        return optimize_1d(wrapped, box.lo[0], box.hi[0], gamma, controls);
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    EnvelopeStateND state;
    state.box = box;

    OptResult result;
    double lower = -kInf;
    double upper = kInf;
    RealVector xbest = box.center();
    long ops_at_row = 0;

    auto evaluate = [&](const RealVector& x, double lower_for_row) {
        const ValueGradient vg = f(x);
        if (!std::isfinite(vg.value) || !vg.gradient.allFinite() || vg.gradient.size() != d)
            throw std::runtime_error("algorithm1: f returned a non-finite value or bad gradient at " +
                                     format_point(x));
        ++result.evaluations;
        if (vg.value < upper) {
            upper = vg.value;
            xbest = x;
        }

        int active_regions = 0;
        for (const QPRegion& r : state.regions)
            if (!r.empty) ++active_regions;

        HistoryRow row;
        row.iter = result.evaluations - 1;
        row.x = x;
        row.f = vg.value;
        row.lower = lower_for_row;
        row.upper = upper;
        row.cumulative_evals = result.evaluations;
        row.elapsed_seconds = elapsed();
        row.region_count = active_regions;
        row.vertex_count = state.vertex_ops - ops_at_row;
        ops_at_row = state.vertex_ops;
        result.history.push_back(row);
        return vg;
    };

    const RealVector x0 = box.center();
    ValueGradient vg = evaluate(x0, -kInf);
    add_model(state, {x0, vg.value, vg.gradient, gamma});

    while (true) {
        const double effective_upper = std::min(upper, controls.global_upper);
        if (controls.global_upper < kInf)
            prune_regions(state, effective_upper - controls.eps);

        const ActiveEnvelopeMin env = envelope_min(state);
        lower = std::max(lower, env.lower);

        if (effective_upper - lower <= controls.eps) {
            result.status = Status::converged;
            break;
        }
        if (controls.model_cap >= 0 &&
            static_cast<long>(state.models.size()) >= controls.model_cap) {
            result.status = Status::budget;
            break;
        }
        if (result.evaluations >= controls.max_iter) {
            result.status = Status::budget;
            break;
        }
        if (env.active_min == kInf) { // every region pruned away
            result.status = Status::budget;
            break;
        }
        const RealVector xnext(env.point);
        const bool coincident =
            std::any_of(state.models.begin(), state.models.end(), [&](const ModelND& m) {
                return (m.center - xnext).lpNorm<Eigen::Infinity>() <= kStallTol;
            });
        if (coincident) {
            result.status = Status::stalled;
            break;
        }

        vg = evaluate(xnext, lower);
        if (vg.value < lower - 1e-12 * (1.0 + std::abs(lower)))
            result.curvature_violated = true;
        add_model(state, {xnext, vg.value, vg.gradient, gamma});
    }

    result.value = upper;
    result.argmin = xbest;
    result.lower = lower;
    result.upper = upper;
    result.vertex_ops = state.vertex_ops;
    return result;
}

} // namespace eigopt
