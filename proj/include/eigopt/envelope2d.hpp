////////////////////////////////////////////////////////////////////////////////
// envelope2d.hpp
//
// Multi-dimensional quadratic underestimators (d = 1 or 2) and the iterated
// envelope-refinement optimizer.  All models share the curvature gamma, so
// dominance sets { q_k >= q_l } are half-planes; minimizing the envelope over
// the box reduces to one concave QP per dominance region, solved exactly by
// enumerating the feasible vertices.  d = 1 delegates to the 1D module.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_ENVELOPE2D_HPP
#define EIGOPT_ENVELOPE2D_HPP

#include <eigopt/envelope1d.hpp>
#include <eigopt/types.hpp>

#include <optional>
#include <span>

namespace eigopt {

/// q_k(x) = value + gradient . (x - center) - curvature/2 ||x - center||^2
struct ModelND {
    RealVector center;
    double value = 0.0;
    RealVector gradient;
    double curvature = 0.0; // gamma; shared by every model in a set
};

double model_value(const ModelND& m, const RealVector& x);

/// Value of the multi-gradient model: value + min_j g_j . (x - center)
/// - curvature/2 ||x - center||^2.  Evaluation only; the envelope QP always
/// works with single-gradient models.
double general_model_value(const RealVector& center, double value,
                           const std::vector<RealVector>& gradients, double curvature,
                           const RealVector& x);

/// Half-plane { x : normal . x <= offset }.
struct HalfPlane {
    Eigen::Vector2d normal;
    double offset = 0.0;
};

/// { q_keep >= q_other } as a half-plane; the quadratic terms cancel because
/// the curvature is shared.  When the affine parts coincide the set is all of
/// R^d or empty ("degenerate pair").
struct DominanceConstraint {
    enum class Kind { halfplane, all_space, empty };
    Kind kind = Kind::halfplane;
    HalfPlane hp;
};

DominanceConstraint dominance_constraint(const ModelND& keep, const ModelND& other);

struct Vertex {
    Eigen::Vector2d point;
    int line_i = 0; // defining boundary pair; 0..3 are box faces, 4+ dominance cuts
    int line_j = 0;
    bool feasible = true;
};

struct RegionMinimum {
    Eigen::Vector2d point;
    double value = 0.0;
};

/// Dominance region of one model: the box intersected with its dominance
/// half-planes, represented by its vertices.  minimum is the cached QP
/// solution; empty when no feasible vertex exists.
struct QPRegion {
    int owner = 0;
    std::vector<HalfPlane> cuts; // dominance constraints only; box faces are implicit
    std::vector<Vertex> vertices;
    std::optional<RegionMinimum> minimum;
    bool pruned = false;
    bool empty = false; // a degenerate dominance pair emptied the region
};

/// All pairwise intersections of the region's boundary lines (4 box faces +
/// cuts), kept when feasible for every constraint within 1e-9 (1 + |offset|).
/// Near-parallel pairs (|cross| < 1e-12 scale) are skipped.  d = 2 only.
std::vector<Vertex> enumerate_vertices(const QPRegion& region, const Box& box);

/// Minimum of the concave q_k over the region; attained at a feasible vertex.
/// Ties break lexicographically by coordinates.  nullopt when the region is
/// empty.
std::optional<RegionMinimum> solve_region_qp(const QPRegion& region, const ModelND& model,
                                             const Box& box);

struct EnvelopeMinND {
    RealVector point;
    double value = 0.0;
};

/// Global minimum of max_k q_k over the box (builds all regions from
/// scratch).  d in {1, 2}.
EnvelopeMinND envelope_min_nd(std::span<const ModelND> models, const Box& box);

/// Incrementally maintained envelope: adding a model appends one constraint
/// to every existing region (vertices re-filtered, boundary vertices added,
/// minima recomputed only where the new cut bites) and builds the new model's
/// region by full enumeration.  Single-writer.
struct EnvelopeStateND {
    Box box;
    std::vector<ModelND> models;
    std::vector<QPRegion> regions;
    long vertex_ops = 0;        // candidate-vertex computations so far
    double pruned_floor = kInf; // min cached minimum among pruned regions
};

void add_model(EnvelopeStateND& state, const ModelND& model);

/// Minimum over the active (non-pruned) regions; lower additionally folds in
/// the bound certified by pruned regions.
struct ActiveEnvelopeMin {
    Eigen::Vector2d point;
    double active_min = kInf;
    double lower = kInf;
};

ActiveEnvelopeMin envelope_min(const EnvelopeStateND& state);

/// Marks regions whose cached minimum exceeds the cutoff; they are skipped by
/// later envelope minimizations and receive no further constraint updates.
void prune_regions(EnvelopeStateND& state, double cutoff);

struct ValueGradient {
    double value = 0.0;
    RealVector gradient;
};

using GradientFunction = std::function<ValueGradient(const RealVector&)>;

/// Iterated envelope refinement over a box (d in {1, 2}; larger d is
/// rejected).  Starts from the box center, maintains nondecreasing lower and
/// nonincreasing upper bounds, and terminates when
/// min(global_upper, u) - l <= eps, at the model cap, or at max_iter.
OptResult algorithm1(const GradientFunction& f, const Box& box, double gamma,
                     const OptimizeControls& controls);

} // namespace eigopt

#endif
