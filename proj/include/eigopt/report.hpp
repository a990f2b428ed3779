////////////////////////////////////////////////////////////////////////////////
// report.hpp
//
// Flat key = value result files and CSV convergence histories.  All numeric
// fields are written with 17 significant digits so write-then-read round
// trips exactly.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_REPORT_HPP
#define EIGOPT_REPORT_HPP

#include <eigopt/types.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace eigopt {

std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct RunReport {
    std::string problem;
    Status status = Status::error;
    double value = 0.0;
    RealVector argmin;
    double lower = -kInf;
    double upper = kInf;
    long evaluations = 0;
    double wall_time_seconds = 0.0;
    double gamma = 0.0;
    double eps = 0.0;
    std::optional<double> inner_solution;
};

void write_report(std::ostream& out, const RunReport& report);
RunReport read_report(std::istream& in);
void write_report_file(const std::string& path, const RunReport& report);
RunReport read_report_file(const std::string& path);

/// Columns: iter, x1[, x2], f, l, u, cumulative_evals, elapsed_seconds.
void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows, int dim);
std::vector<HistoryRow> read_history_csv(std::istream& in);
void write_history_csv_file(const std::string& path, const std::vector<HistoryRow>& rows, int dim);

} // namespace eigopt

#endif
