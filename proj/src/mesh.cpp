#include <eigopt/mesh.hpp>

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>

namespace eigopt {

namespace {

struct SubRun {
    SubBox sb;
    OptResult result;
};

struct MeshDriver {
    const GradientFunction& f;
    double gamma;
    Algorithm2Controls ctl;

    double upper = kInf;
    RealVector xbest;
    long evaluations = 0;
    long vertex_ops = 0;
    bool curvature_violated = false;
    std::vector<double> leaf_lower; // one entry per current leaf box
    std::vector<HistoryRow> history;
    std::vector<SubBox>* trace = nullptr;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    double driver_lower() const {
        return leaf_lower.empty()
                   ? -kInf
                   : *std::min_element(leaf_lower.begin(), leaf_lower.end());
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    SubRun execute(const SubBox& sb, double upper_snapshot) const {
        OptimizeControls oc;
        oc.eps = ctl.eps;
        oc.max_iter = ctl.max_iter;
        oc.model_cap = ctl.n_q;
        oc.global_upper = upper_snapshot;

        SubRun run;
        run.result = algorithm1(f, sb.box, gamma, oc);
        run.sb = sb;
        run.sb.lower = std::max(sb.lower, run.result.lower);
        run.sb.upper = run.result.upper;
        run.sb.best = run.result.argmin;
        return run;
    }

    // Folds a finished sub-box run into the global state (sequential, in a
    // deterministic order).  Assigns the status from the merged upper bound
    // and records trace and history.  Returns the trace index (or -1).
    long merge(SubRun& run) {
        const double upper_before = upper;
        const double frozen_lower = driver_lower();
        const double base_elapsed = elapsed() - (run.result.history.empty()
                                                     ? 0.0
                                                     : run.result.history.back().elapsed_seconds);
        for (HistoryRow row : run.result.history) {
            row.iter = static_cast<long>(history.size());
            row.lower = frozen_lower;
            row.upper = std::min(upper_before, row.upper);
            row.cumulative_evals = evaluations + row.cumulative_evals;
            row.elapsed_seconds = std::max(0.0, base_elapsed) + row.elapsed_seconds;
            history.push_back(row);
        }
        evaluations += run.result.evaluations;
        vertex_ops += run.result.vertex_ops;
        curvature_violated |= run.result.curvature_violated;
        if (run.sb.upper < upper) {
            upper = run.sb.upper;
            xbest = run.sb.best;
        }

        if (run.sb.upper - run.sb.lower <= ctl.eps)
            run.sb.status = SubBoxStatus::converged;
        else if (upper - run.sb.lower <= ctl.eps)
            run.sb.status = SubBoxStatus::pruned;
        else
            run.sb.status = SubBoxStatus::active;
        if (!trace) return -1;
        trace->push_back(run.sb);
        return static_cast<long>(trace->size()) - 1;
    }

    // Partitions, runs and merges all children of a node, then refines the
    // still-active ones in ascending-upper-bound order.
    void refine(const Box& box, int depth, double inherited_lower, size_t leaf_slot) {
        const std::vector<Box> children = partition(box);
        const size_t n = children.size();

        std::vector<SubBox> seeds(n);
        for (size_t j = 0; j < n; ++j)
            seeds[j] = SubBox{children[j], inherited_lower, kInf, {}, SubBoxStatus::active,
                              depth + 1};

        // The partitioned box's leaf entry is replaced by its children,
        // initialized with the inherited bound (valid over each child).
        leaf_lower[leaf_slot] = inherited_lower;
        std::vector<size_t> slots(n);
        slots[0] = leaf_slot;
        for (size_t j = 1; j < n; ++j) {
            slots[j] = leaf_lower.size();
            leaf_lower.push_back(inherited_lower);
        }

        std::vector<SubRun> runs(n);
        std::vector<long> trace_idx(n, -1);
        if (ctl.threads > 1) {
            const double snapshot = upper; // one snapshot per wave
            std::vector<std::future<SubRun>> futures;
            futures.reserve(n);
            for (size_t j = 0; j < n; ++j)
                futures.push_back(std::async(std::launch::async,
                                             [this, &seeds, j, snapshot] {
                                                 return execute(seeds[j], snapshot);
                                             }));
            for (size_t j = 0; j < n; ++j) runs[j] = futures[j].get();
            for (size_t j = 0; j < n; ++j) {
                leaf_lower[slots[j]] = runs[j].sb.lower;
                trace_idx[j] = merge(runs[j]);
            }
        } else {
            for (size_t j = 0; j < n; ++j) {
                runs[j] = execute(seeds[j], upper);
                leaf_lower[slots[j]] = runs[j].sb.lower;
                trace_idx[j] = merge(runs[j]);
            }
        }

        // Greedy order: smallest upper bound first; ties keep partition order.
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&runs](size_t a, size_t b) {
            return runs[a].sb.upper < runs[b].sb.upper;
        });

        for (const size_t j : order) {
            SubBox& child = runs[j].sb;
            if (upper - child.lower <= ctl.eps) {
                // Pruned at visit time (a sibling may have improved the upper
                // bound after this child's run was merged).
                if (child.status == SubBoxStatus::active) {
                    child.status = SubBoxStatus::pruned;
                    if (trace && trace_idx[j] >= 0)
                        (*trace)[trace_idx[j]].status = SubBoxStatus::pruned;
                }
                continue;
            }
            if (child.depth >= ctl.max_depth) continue; // depth budget exhausted
            refine(child.box, child.depth, child.lower, slots[j]);
        }
    }
};

} // namespace

std::string to_string(SubBoxStatus s) {
    switch (s) {
        case SubBoxStatus::active: return "active";
        case SubBoxStatus::converged: return "converged";
        case SubBoxStatus::pruned: return "pruned";
    }
    return "active";
}

std::vector<Box> partition(const Box& box) {
    const int d = box.dim();
    if (d > 2) throw std::invalid_argument("partition: d in {1, 2} only");
    const RealVector mid = box.center();

    std::vector<Box> out;
    out.reserve(size_t(1) << d);
    for (int j = 0; j < (1 << d); ++j) {
        RealVector lo = box.lo, hi = box.hi;
        for (int k = 0; k < d; ++k) {
            if (j & (1 << k))
                lo[k] = mid[k];
            else
                hi[k] = mid[k];
        }
        out.emplace_back(lo, hi);
    }
    return out;
}

SubBox run_subbox(const SubBox& sb, const GradientFunction& f, double gamma, double eps,
                  long n_q, long max_iter, double global_upper) {
    OptimizeControls oc;
    oc.eps = eps;
    oc.max_iter = max_iter;
    oc.model_cap = n_q;
    oc.global_upper = global_upper;

    const OptResult r = algorithm1(f, sb.box, gamma, oc);
    SubBox out = sb;
    out.lower = std::max(sb.lower, r.lower);
    out.upper = r.upper;
    out.best = r.argmin;

    const double u = std::min(global_upper, r.upper);
    if (out.upper - out.lower <= eps)
        out.status = SubBoxStatus::converged;
    else if (u - out.lower <= eps)
        out.status = SubBoxStatus::pruned;
    else
        out.status = SubBoxStatus::active;
    return out;
}

OptResult algorithm2(const GradientFunction& f, const Box& box, double gamma,
                     const Algorithm2Controls& controls, std::vector<SubBox>* trace) {
    if (!(controls.eps > 0.0)) throw std::invalid_argument("algorithm2: requires eps > 0");
    if (controls.n_q >= 0 && controls.n_q < 2)
        throw std::invalid_argument("algorithm2: requires n_q >= 2 (or < 0 for uncapped)");
    if (controls.max_depth < 0) throw std::invalid_argument("algorithm2: max_depth must be >= 0");

    if (controls.max_depth == 0) {
        // No subdivision: the driver degenerates to the plain envelope
        // optimizer on the whole box.
        OptimizeControls oc;
        oc.eps = controls.eps;
        oc.max_iter = controls.max_iter;
        oc.model_cap = controls.n_q;
        OptResult r = algorithm1(f, box, gamma, oc);
        if (trace) {
            SubBox root{box, r.lower, r.upper, r.argmin,
                        r.upper - r.lower <= controls.eps ? SubBoxStatus::converged
                                                          : SubBoxStatus::active,
                        0};
            trace->push_back(root);
        }
        return r;
    }

    MeshDriver driver{.f = f, .gamma = gamma, .ctl = controls};
    driver.trace = trace;
    driver.leaf_lower.push_back(-kInf);
    driver.refine(box, 0, -kInf, 0);

    OptResult out;
    out.value = driver.upper;
    out.argmin = driver.xbest;
    out.lower = driver.driver_lower();
    out.upper = driver.upper;
    out.evaluations = driver.evaluations;
    out.vertex_ops = driver.vertex_ops;
    out.curvature_violated = driver.curvature_violated;
    out.history = std::move(driver.history);
    out.status = out.upper - out.lower <= controls.eps ? Status::converged : Status::budget;
    return out;
}

} // namespace eigopt
