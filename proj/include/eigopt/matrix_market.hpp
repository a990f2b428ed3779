////////////////////////////////////////////////////////////////////////////////
// matrix_market.hpp
//
// Matrix Market exchange format reader (array and coordinate; real, complex,
// integer fields; general / symmetric / skew-symmetric / hermitian symmetry),
// expanded to a dense complex matrix.  Parse errors carry the line number.
////////////////////////////////////////////////////////////////////////////////
#ifndef EIGOPT_MATRIX_MARKET_HPP
#define EIGOPT_MATRIX_MARKET_HPP

#include <eigopt/types.hpp>

#include <iosfwd>
#include <string>

namespace eigopt {

struct MatrixMarketError : std::runtime_error {
    MatrixMarketError(const std::string& where, long line, const std::string& what)
        : std::runtime_error(where + ":" + std::to_string(line) + ": " + what) {}
};

ComplexMatrix read_matrix(std::istream& in, const std::string& name = "<stream>");
ComplexMatrix read_matrix(const std::string& path);

/// Writes a dense complex matrix in array/complex/general form (fixtures and
/// round-trip tests).
void write_matrix(std::ostream& out, const ComplexMatrix& A);

} // namespace eigopt

#endif
