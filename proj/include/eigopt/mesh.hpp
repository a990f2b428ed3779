////////////////////////////////////////////////////////////////////////////////
// mesh.hpp
//
// Mesh-adaptive driver: recursive box subdivision with a capped envelope run
// per sub-box, greedy (smallest upper bound first) refinement order, and
// pruning of sub-boxes whose certified lower bound is within eps of the
// global upper bound.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_MESH_HPP
#define EIGOPT_MESH_HPP

#include <eigopt/envelope2d.hpp>
#include <eigopt/types.hpp>

namespace eigopt {

/// 2^d equal sub-boxes from axis-midpoint splits; union is the box, interiors
/// disjoint.  Child j takes the upper half on axis k iff bit k of j is set.
std::vector<Box> partition(const Box& box);

enum class SubBoxStatus { active, converged, pruned };

std::string to_string(SubBoxStatus s);

struct SubBox {
    Box box;
    double lower = -kInf; // l_j; includes bounds inherited from ancestors
    double upper = kInf;  // u_j, best f value found inside
    RealVector best;
    SubBoxStatus status = SubBoxStatus::active;
    int depth = 0;
};

struct Algorithm2Controls {
    double eps = 1e-6;
    long n_q = 30;       // model cap per sub-box run; < 0 means uncapped
    int max_depth = 12;  // sub-boxes at this depth are never partitioned further
    long max_iter = 5000; // evaluation cap per sub-box run
    int threads = 1;     // > 1 runs sibling sub-boxes concurrently
};

/// Runs the capped envelope optimizer on one sub-box, using global_upper for
/// early termination, and fills in bounds and status:
/// converged when u_j - l_j <= eps, pruned when global u - l_j <= eps,
/// active otherwise.  The run's own evaluations may improve on global_upper;
/// status uses the improved value.
SubBox run_subbox(const SubBox& sb, const GradientFunction& f, double gamma, double eps,
                  long n_q, long max_iter, double global_upper);

/// Mesh-adaptive minimization over the box.  max_depth = 0 skips subdivision
/// entirely and reduces to the plain envelope optimizer (with model cap n_q).
/// On success u - l <= eps; exhausting the depth budget reports status budget.
/// The trace, when requested, records every sub-box run in processing order.
OptResult algorithm2(const GradientFunction& f, const Box& box, double gamma,
                     const Algorithm2Controls& controls, std::vector<SubBox>* trace = nullptr);

} // namespace eigopt

#endif
