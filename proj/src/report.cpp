#include <eigopt/report.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace eigopt {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("report: cannot parse number '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::budget: return "budget";
        case Status::stalled: return "stalled";
        case Status::error: return "error";
    }
    return "error";
}

Status status_from_string(const std::string& s) {
    if (s == "converged") return Status::converged;
    if (s == "budget") return Status::budget;
    if (s == "stalled") return Status::stalled;
    if (s == "error") return Status::error;
    throw std::runtime_error("report: unknown status '" + s + "'");
}

void write_report(std::ostream& out, const RunReport& r) {
    out << "problem = " << r.problem << "\n";
    out << "status = " << to_string(r.status) << "\n";
    out << "value = " << fmt(r.value) << "\n";
    out << "argmin =";
    for (Eigen::Index i = 0; i < r.argmin.size(); ++i) out << " " << fmt(r.argmin[i]);
    out << "\n";
    out << "lower = " << fmt(r.lower) << "\n";
    out << "upper = " << fmt(r.upper) << "\n";
    out << "evaluations = " << r.evaluations << "\n";
    out << "wall_time_seconds = " << fmt(r.wall_time_seconds) << "\n";
    out << "gamma = " << fmt(r.gamma) << "\n";
    out << "eps = " << fmt(r.eps) << "\n";
    if (r.inner_solution) out << "inner_solution = " << fmt(*r.inner_solution) << "\n";
}

RunReport read_report(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&kv](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("report: missing key '" + key + "'");
        return it->second;
    };

    RunReport r;
    r.problem = need("problem");
    r.status = status_from_string(need("status"));
    r.value = parse_double(need("value"));
    {
        std::istringstream as(need("argmin"));
        std::vector<double> xs;
        std::string tok;
        while (as >> tok) xs.push_back(parse_double(tok));
        r.argmin = Eigen::Map<RealVector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    }
    r.lower = parse_double(need("lower"));
    r.upper = parse_double(need("upper"));
    r.evaluations = std::stol(need("evaluations"));
    r.wall_time_seconds = parse_double(need("wall_time_seconds"));
    r.gamma = parse_double(need("gamma"));
    r.eps = parse_double(need("eps"));
    if (const auto it = kv.find("inner_solution"); it != kv.end())
        r.inner_solution = parse_double(it->second);
    return r;
}

void write_report_file(const std::string& path, const RunReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
    write_report(out, report);
}

RunReport read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report file: " + path);
    return read_report(in);
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows, int dim) {
    out << "iter";
    for (int k = 1; k <= dim; ++k) out << ",x" << k;
    out << ",f,l,u,cumulative_evals,elapsed_seconds\n";
    for (const HistoryRow& row : rows) {
        out << row.iter;
        for (int k = 0; k < dim; ++k) out << "," << fmt(k < row.x.size() ? row.x[k] : 0.0);
        out << "," << fmt(row.f) << "," << fmt(row.lower) << "," << fmt(row.upper) << ","
            << row.cumulative_evals << "," << fmt(row.elapsed_seconds) << "\n";
    }
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("history: empty file");
    long columns = 1 + static_cast<long>(std::count(line.begin(), line.end(), ','));
    const int dim = static_cast<int>(columns) - 6;
    if (dim < 1) throw std::runtime_error("history: malformed header '" + line + "'");

    std::vector<HistoryRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (static_cast<long>(cells.size()) != columns)
            throw std::runtime_error("history: row with wrong column count: '" + line + "'");

        HistoryRow row;
        row.iter = std::stol(cells[0]);
        row.x.resize(dim);
        for (int k = 0; k < dim; ++k) row.x[k] = parse_double(cells[1 + k]);
        row.f = parse_double(cells[1 + dim]);
        row.lower = parse_double(cells[2 + dim]);
        row.upper = parse_double(cells[3 + dim]);
        row.cumulative_evals = std::stol(cells[4 + dim]);
        row.elapsed_seconds = parse_double(cells[5 + dim]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_history_csv_file(const std::string& path, const std::vector<HistoryRow>& rows, int dim) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open history file for writing: " + path);
    write_history_csv(out, rows, dim);
}

} // namespace eigopt
