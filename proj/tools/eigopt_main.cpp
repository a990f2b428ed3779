// Command-line driver: reads Matrix Market inputs, runs one of the distance
// problems (or a baseline / synthetic demo), and writes a key = value report
// plus a CSV convergence history.
//
// Exit codes: 0 converged, 2 invalid input, 3 budget/stall, 1 numeric failure.

#include <eigopt/apps.hpp>
#include <eigopt/baselines.hpp>
#include <eigopt/envelope1d.hpp>
#include <eigopt/matrix_market.hpp>
#include <eigopt/report.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <random>

namespace {

using namespace eigopt;

int log_level() {
    const char* env = std::getenv("EIGOPT_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
}

ComplexMatrix load(const std::string& path, const char* role) {
    if (path.empty())
        throw CLI::ValidationError(std::string("--") + role,
                                   std::string("matrix ") + role + " is required for this problem");
    return read_matrix(path);
}

ComplexMatrix random_complex(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix A(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = Complex(g(rng), g(rng));
    return A;
}

struct Cli {
    std::string problem;
    std::string pathA, pathB, pathC, pathD;
    std::vector<double> box;
    std::vector<double> interval;
    double gamma = -1.0; // < 0: per-problem default
    double eps = 1e-6;
    long nq = 30;
    long max_iter = 5000;
    int max_depth = 12;
    std::string history_path;
    std::string out_path;
    int threads = 1;
    unsigned long seed = 1;
};

RunReport dispatch(const Cli& cli, std::vector<HistoryRow>& history, int& dim) {
    SolverOptions opts;
    opts.eps = cli.eps;
    if (cli.gamma >= 0.0) opts.gamma = cli.gamma;
    opts.max_iter = cli.max_iter;
    opts.n_q = cli.nq;
    opts.max_depth = cli.max_depth;
    opts.threads = cli.threads;

    std::optional<Interval> interval;
    if (!cli.interval.empty()) {
        if (cli.interval.size() != 2)
            throw CLI::ValidationError("--interval", "expects lo,hi");
        interval = Interval{cli.interval[0], cli.interval[1]};
    }
    std::optional<Box> box;
    if (!cli.box.empty()) {
        if (cli.box.size() == 2 && !interval) {
            interval = Interval{cli.box[0], cli.box[1]}; // 1D problems accept --box lo,hi
        } else if (cli.box.size() == 4) {
            box = Box::rectangle(cli.box[0], cli.box[1], cli.box[2], cli.box[3]);
        } else {
            throw CLI::ValidationError("--box", "expects x1lo,x1hi[,x2lo,x2hi]");
        }
    }

    RunReport report;
    report.problem = cli.problem;
    report.eps = cli.eps;

    auto fill = [&](const DistanceResult& d, int d_dim) {
        report.status = d.status;
        report.value = d.value;
        report.argmin = d.argmin;
        report.lower = d.lower;
        report.upper = d.upper;
        report.evaluations = d.evaluations;
        report.gamma = d.gamma_used;
        report.inner_solution = d.inner_solution;
        history = d.history;
        dim = d_dim;
    };

    if (cli.problem == "numrad") {
        fill(numerical_radius(load(cli.pathA, "A"), opts), 1);
    } else if (cli.problem == "instab") {
        fill(dist_instability(load(cli.pathA, "A"), interval, opts), 1);
    } else if (cli.problem == "hinf") {
        LTISystem sys{load(cli.pathA, "A"), load(cli.pathB, "B"), load(cli.pathC, "C"),
                      load(cli.pathD, "D")};
        fill(hinf_norm(sys, interval, opts), 1);
    } else if (cli.problem == "uncontrol") {
        fill(dist_uncontrollability(load(cli.pathA, "A"), load(cli.pathB, "B"), box, opts), 2);
    } else if (cli.problem == "defect") {
        fill(dist_defectiveness(load(cli.pathA, "A"), box, opts), 2);
    } else if (cli.problem == "envelope-demo") {
        // Synthetic seeded instance: largest eigenvalue of
        // H0 + cos(w) H1 + sin(w) H2 minimized over [0, 2 pi].
        std::mt19937_64 rng(cli.seed);
        const int n = 12;
        auto herm = [&rng, n] {
            const ComplexMatrix R = random_complex(n, n, rng);
            return ComplexMatrix(0.5 * (R + R.adjoint()));
        };
        const ComplexMatrix H0 = herm(), H1 = herm(), H2 = herm();
        HermitianMatrixFunction F;
        F.dim_domain = 1;
        F.dim_matrix = n;
        F.eval = [&](const RealVector& w) {
            return ComplexMatrix(H0 + std::cos(w[0]) * H1 + std::sin(w[0]) * H2);
        };
        F.partial = [&](const RealVector& w, int) {
            return ComplexMatrix(-std::sin(w[0]) * H1 + std::cos(w[0]) * H2);
        };
        F.second_partial_along = [&](const RealVector& w, const RealVector&) {
            return ComplexMatrix(-std::cos(w[0]) * H1 - std::sin(w[0]) * H2);
        };
        const double a = 0.0, b = 2.0 * std::numbers::pi;
        const double gamma =
            opts.gamma ? *opts.gamma : estimate_gamma(F, Box::interval(a, b), 1, 2, 48, 2.0);
        const ScalarFunction1D f = [&F](double x) {
            const EigenPoint ep = evaluate_eig(F, RealVector::Constant(1, x), 1);
            return FunctionSample1D{ep.value, {eig_gradient(F, ep)[0]}};
        };
        OptimizeControls ctl;
        ctl.eps = cli.eps;
        ctl.max_iter = cli.max_iter;
        const OptResult r = optimize_1d(f, a, b, gamma, ctl);
        report.status = r.status;
        report.value = r.value;
        report.argmin = r.argmin;
        report.lower = r.lower;
        report.upper = r.upper;
        report.evaluations = r.evaluations;
        report.gamma = gamma;
        history = r.history;
        dim = 1;
    } else if (cli.problem == "ps-baseline") {
        // Piyavskii-Shubert on the numerical-radius objective of A, with
        // L = gamma (default ||A||), for like-for-like comparisons.
        const ComplexMatrix A = load(cli.pathA, "A");
        const HermitianMatrixFunction F = numerical_radius_function(A);
        const double L = cli.gamma >= 0.0 ? cli.gamma : spectral_norm(A);
        const ScalarFunction f = [&F](double theta) {
            return -evaluate_eig(F, RealVector::Constant(1, theta), 1).value;
        };
        const OptResult r =
            piyavskii_shubert(f, 0.0, 2.0 * std::numbers::pi, L, cli.eps, cli.max_iter);
        report.status = r.status;
        report.value = -r.upper;
        report.argmin = r.argmin;
        report.lower = -r.upper;
        report.upper = -r.lower;
        report.evaluations = r.evaluations;
        report.gamma = L;
        history = r.history;
        dim = 1;
    } else {
        throw CLI::ValidationError("--problem", "unknown problem '" + cli.problem + "'");
    }
    return report;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global optimization of Hermitian eigenvalue and singular value functions"};
    Cli cli;

    app.add_option("--problem", cli.problem,
                   "one of: numrad, hinf, instab, uncontrol, defect, envelope-demo, ps-baseline")
        ->required();
    app.add_option("--A", cli.pathA, "Matrix Market file for A");
    app.add_option("--B", cli.pathB, "Matrix Market file for B");
    app.add_option("--C", cli.pathC, "Matrix Market file for C");
    app.add_option("--D", cli.pathD, "Matrix Market file for D");
    app.add_option("--box", cli.box, "search box x1lo,x1hi,x2lo,x2hi (2D problems)")->delimiter(',');
    app.add_option("--interval", cli.interval, "search interval lo,hi (1D problems)")->delimiter(',');
    app.add_option("--gamma", cli.gamma, "curvature bound (default: per-problem)");
    app.add_option("--eps", cli.eps, "termination tolerance on u - l");
    app.add_option("--nq", cli.nq, "model cap per sub-box (mesh driver)");
    app.add_option("--max-iter", cli.max_iter, "evaluation cap per optimizer run");
    app.add_option("--max-depth", cli.max_depth, "mesh subdivision depth cap");
    app.add_option("--history", cli.history_path, "write per-iteration CSV here");
    app.add_option("--out", cli.out_path, "write the key = value report here");
    app.add_option("--threads", cli.threads, "mesh/grid parallelism");
    app.add_option("--seed", cli.seed, "seed for synthetic instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        std::vector<HistoryRow> history;
        int dim = 1;
        const auto t0 = std::chrono::steady_clock::now();
        RunReport report = dispatch(cli, history, dim);
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (log_level() >= 1)
            std::cerr << "[eigopt] " << report.problem << ": " << report.evaluations
                      << " evaluations, status " << to_string(report.status) << "\n";
        if (log_level() >= 2)
            for (const HistoryRow& row : history)
                std::cerr << "[eigopt]   iter " << row.iter << " f " << row.f << " l " << row.lower
                          << " u " << row.upper << "\n";

        if (!cli.out_path.empty()) write_report_file(cli.out_path, report);
        if (!cli.history_path.empty()) write_history_csv_file(cli.history_path, history, dim);

        std::cout << "problem = " << report.problem << "\n"
                  << "status = " << to_string(report.status) << "\n"
                  << "value = " << report.value << "\n"
                  << "interval = [" << report.lower << ", " << report.upper << "]\n"
                  << "evaluations = " << report.evaluations << "\n";

        switch (report.status) {
            case Status::converged: return 0;
            case Status::budget:
            case Status::stalled: return 3;
            case Status::error: return 1;
        }
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MatrixMarketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
