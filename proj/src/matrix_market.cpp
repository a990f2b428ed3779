#include <eigopt/matrix_market.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eigopt {

namespace {

enum class Format { array, coordinate };
enum class Field { real, complex_field, integer };
enum class Symmetry { general, symmetric, skew_symmetric, hermitian };

struct Reader {
    std::istream& in;
    std::string name;
    long line = 0;

    [[noreturn]] void fail(const std::string& what) const { throw MatrixMarketError(name, line, what); }

    // Next non-comment, non-blank line; false at EOF.
    bool next(std::string& out, bool allow_comments = true) {
        while (std::getline(in, out)) {
            ++line;
            const auto pos = out.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            if (allow_comments && out[pos] == '%') continue;
            return true;
        }
        return false;
    }
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

Complex parse_value(Reader& r, std::istringstream& is, Field field) {
    double re = 0.0, im = 0.0;
    if (!(is >> re)) r.fail("expected a numeric value");
    if (field == Field::complex_field && !(is >> im)) r.fail("expected an imaginary part");
    return {re, im};
}

Complex mirror(Complex v, Symmetry sym) {
    switch (sym) {
        case Symmetry::symmetric: return v;
        case Symmetry::skew_symmetric: return -v;
        case Symmetry::hermitian: return std::conj(v);
        case Symmetry::general: break;
    }
    return v;
}

} // namespace

ComplexMatrix read_matrix(std::istream& in, const std::string& name) {
    Reader r{in, name};

    std::string header;
    if (!std::getline(in, header)) r.fail("empty file");
    r.line = 1;
    std::istringstream hs(header);
    std::string banner, object, format_s, field_s, sym_s;
    hs >> banner >> object >> format_s >> field_s >> sym_s;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix")
        r.fail("expected a '%%MatrixMarket matrix ...' header");

    Format format;
    if (lower(format_s) == "array")
        format = Format::array;
    else if (lower(format_s) == "coordinate")
        format = Format::coordinate;
    else
        r.fail("unknown format '" + format_s + "'");

    Field field;
    const std::string f = lower(field_s);
    if (f == "real")
        field = Field::real;
    else if (f == "complex")
        field = Field::complex_field;
    else if (f == "integer")
        field = Field::integer;
    else if (f == "pattern")
        r.fail("pattern matrices carry no values and cannot be read as dense");
    else
        r.fail("unknown field '" + field_s + "'");

    Symmetry sym;
    const std::string s = lower(sym_s);
    if (s == "general")
        sym = Symmetry::general;
    else if (s == "symmetric")
        sym = Symmetry::symmetric;
    else if (s == "skew-symmetric")
        sym = Symmetry::skew_symmetric;
    else if (s == "hermitian")
        sym = Symmetry::hermitian;
    else
        r.fail("unknown symmetry '" + sym_s + "'");

    std::string sizes;
    if (!r.next(sizes)) r.fail("missing size line");
    std::istringstream ss(sizes);
    long rows = 0, cols = 0, nnz = 0;
    if (!(ss >> rows >> cols)) r.fail("malformed size line");
    if (rows <= 0 || cols <= 0) r.fail("matrix dimensions must be positive");
    if (sym != Symmetry::general && rows != cols)
        r.fail("symmetric/hermitian matrices must be square");

    ComplexMatrix A = ComplexMatrix::Zero(rows, cols);

    if (format == Format::array) {
        // Column-major stream of entries; symmetric variants store the lower
        // triangle only (skew-symmetric omits the diagonal).
        std::string entry;
        for (long j = 0; j < cols; ++j) {
            const long i_begin = sym == Symmetry::general ? 0
                                 : sym == Symmetry::skew_symmetric ? j + 1
                                                                   : j;
            for (long i = i_begin; i < rows; ++i) {
                if (!r.next(entry)) r.fail("unexpected end of file inside array data");
                std::istringstream is(entry);
                const Complex v = parse_value(r, is, field);
                A(i, j) = v;
                if (sym != Symmetry::general && i != j) A(j, i) = mirror(v, sym);
            }
        }
    } else {
        if (!(ss >> nnz)) r.fail("coordinate size line must carry the entry count");
        std::string entry;
        for (long e = 0; e < nnz; ++e) {
            if (!r.next(entry)) r.fail("unexpected end of file inside coordinate data");
            std::istringstream is(entry);
            long i = 0, j = 0;
            if (!(is >> i >> j)) r.fail("malformed coordinate entry");
            if (i < 1 || i > rows || j < 1 || j > cols) r.fail("coordinate indices out of range");
            const Complex v = parse_value(r, is, field);
            if (sym != Symmetry::general && j > i)
                r.fail("symmetric/hermitian coordinate files must store the lower triangle");
            A(i - 1, j - 1) += v; // duplicates assemble additively
            if (sym != Symmetry::general && i != j) A(j - 1, i - 1) += mirror(v, sym);
        }
    }
    return A;
}

ComplexMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError(path, 0, "cannot open matrix file");
    return read_matrix(in, path);
}

void write_matrix(std::ostream& out, const ComplexMatrix& A) {
    out << "%%MatrixMarket matrix array complex general\n";
    out << A.rows() << " " << A.cols() << "\n";
    char buf[96];
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", A(i, j).real(), A(i, j).imag());
            out << buf;
        }
}

} // namespace eigopt
