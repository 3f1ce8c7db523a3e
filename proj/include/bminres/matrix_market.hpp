#pragma once

#include <iosfwd>
#include <string>

#include "bminres/block_vector.hpp"
#include "bminres/csr_matrix.hpp"

namespace bminres {

/// Reads `%%MatrixMarket matrix coordinate real|integer symmetric|general`.
/// Symmetric files list the lower triangle and are expanded. General files
/// must hold symmetric content. Throws ParseError (with the 1-based line
/// number) or NotSymmetric.
CsrSymmetricMatrix mm_read(const std::string& path);
CsrSymmetricMatrix mm_parse(std::istream& in);

/// Writes the lower triangle in symmetric coordinate format with shortest
/// round-trip decimals, so mm_read(mm_write(M)) == M exactly.
void mm_write(const std::string& path, const CsrSymmetricMatrix& m);
void mm_format(std::ostream& out, const CsrSymmetricMatrix& m);

/// Dense `%%MatrixMarket matrix array real general` (column-major).
BlockVector mm_read_dense(const std::string& path);
BlockVector mm_parse_dense(std::istream& in);
void mm_write_dense(const std::string& path, const BlockVector& x);
void mm_format_dense(std::ostream& out, const BlockVector& x);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace bminres
