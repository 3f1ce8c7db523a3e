#include "bminres/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "bminres/errors.hpp"

namespace bminres {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return value;
}

struct Header {
  std::string format;    // coordinate | array
  std::string field;     // real | integer
  std::string symmetry;  // symmetric | general
};

/// Reads the banner and skips comments; returns the first data line.
Header read_header(std::istream& in, std::size_t& line_no, std::string& size_line) {
  std::string line;
  line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++line_no;
  const auto tok = split_ws(line);
  if (tok.size() != 5 || lower(std::string(tok[0])) != "%%matrixmarket" || lower(std::string(tok[1])) != "matrix") {
    throw ParseError(line_no, "malformed Matrix Market banner");
  }
  Header h{lower(std::string(tok[2])), lower(std::string(tok[3])), lower(std::string(tok[4]))};
  if (h.format != "coordinate" && h.format != "array") throw ParseError(line_no, "unsupported format " + h.format);
  if (h.field != "real" && h.field != "integer") throw ParseError(line_no, "unsupported field " + h.field);
  if (h.symmetry != "symmetric" && h.symmetry != "general") {
    throw ParseError(line_no, "unsupported symmetry " + h.symmetry);
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = split_ws(line);
    if (t.empty() || t[0].front() == '%') continue;
    size_line = line;
    return h;
  }
  throw ParseError(line_no, "missing size line");
}

/// Next non-comment, non-blank line split into tokens; empty at end of input.
std::vector<std::string_view> next_data(std::istream& in, std::string& buf, std::size_t& line_no) {
  while (std::getline(in, buf)) {
    ++line_no;
    auto t = split_ws(buf);
    if (t.empty() || t[0].front() == '%') continue;
    return t;
  }
  return {};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

CsrSymmetricMatrix mm_parse(std::istream& in) {
  std::size_t line_no = 0;
  std::string size_line;
  const Header h = read_header(in, line_no, size_line);
  if (h.format != "coordinate") throw ParseError(1, "expected coordinate format for a sparse matrix");
  const auto sz = split_ws(size_line);
  if (sz.size() != 3) throw ParseError(line_no, "size line must hold rows, columns and entry count");
  const auto rows = parse_number<std::size_t>(sz[0], line_no, "row count");
  const auto cols = parse_number<std::size_t>(sz[1], line_no, "column count");
  const auto entries = parse_number<std::size_t>(sz[2], line_no, "entry count");
  if (rows != cols) throw ParseError(line_no, "matrix is not square");
  const bool symmetric = h.symmetry == "symmetric";

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  std::string buf;
  for (std::size_t k = 0; k < entries; ++k) {
    const auto t = next_data(in, buf, line_no);
    if (t.empty()) throw ParseError(line_no + 1, "expected " + std::to_string(entries) + " entries, found " + std::to_string(k));
    if (t.size() != 3) throw ParseError(line_no, "entry must hold row, column and value");
    const auto i = parse_number<std::size_t>(t[0], line_no, "row index");
    const auto j = parse_number<std::size_t>(t[1], line_no, "column index");
    const double v = h.field == "integer" ? static_cast<double>(parse_number<long long>(t[2], line_no, "value"))
                                          : parse_number<double>(t[2], line_no, "value");
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(line_no, "index out of range");
    if (symmetric && j > i) throw ParseError(line_no, "symmetric storage must list the lower triangle only");
    triplets.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) triplets.push_back({j - 1, i - 1, v});
  }
  if (!next_data(in, buf, line_no).empty()) throw ParseError(line_no, "more entries than declared");
  return CsrSymmetricMatrix::from_triplets(rows, std::move(triplets));
}

CsrSymmetricMatrix mm_read(const std::string& path) {
  auto in = open_in(path);
  return mm_parse(in);
}

void mm_format(std::ostream& out, const CsrSymmetricMatrix& m) {
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  std::size_t lower_count = 0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) lower_count += cols[k] <= i ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.n() << ' ' << m.n() << ' ' << lower_count << '\n';
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1] && cols[k] <= i; ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << format_double(vals[k]) << '\n';
    }
  }
}

void mm_write(const std::string& path, const CsrSymmetricMatrix& m) {
  auto out = open_out(path);
  mm_format(out, m);
  if (!out) throw Error("write to " + path + " failed");
}

BlockVector mm_parse_dense(std::istream& in) {
  std::size_t line_no = 0;
  std::string size_line;
  const Header h = read_header(in, line_no, size_line);
  if (h.format != "array" || h.symmetry != "general") {
    throw ParseError(1, "expected array general format for a dense block");
  }
  const auto sz = split_ws(size_line);
  if (sz.size() != 2) throw ParseError(line_no, "size line must hold rows and columns");
  const auto rows = parse_number<std::size_t>(sz[0], line_no, "row count");
  const auto cols = parse_number<std::size_t>(sz[1], line_no, "column count");
  BlockVector x(rows, cols);
  std::string buf;
  for (std::size_t k = 0; k < rows * cols; ++k) {
    const auto t = next_data(in, buf, line_no);
    if (t.empty()) throw ParseError(line_no + 1, "too few values");
    if (t.size() != 1) throw ParseError(line_no, "expected one value per line");
    x.data()[k] = parse_number<double>(t[0], line_no, "value");
  }
  if (!next_data(in, buf, line_no).empty()) throw ParseError(line_no, "more values than declared");
  return x;
}

BlockVector mm_read_dense(const std::string& path) {
  auto in = open_in(path);
  return mm_parse_dense(in);
}

void mm_format_dense(std::ostream& out, const BlockVector& x) {
  out << "%%MatrixMarket matrix array real general\n";
  out << x.rows() << ' ' << x.cols() << '\n';
  for (double v : x.data()) out << format_double(v) << '\n';
}

void mm_write_dense(const std::string& path, const BlockVector& x) {
  auto out = open_out(path);
  mm_format_dense(out, x);
  if (!out) throw Error("write to " + path + " failed");
}

}  // namespace bminres
