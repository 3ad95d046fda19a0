#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "padmm/lp.hpp"

namespace padmm {

struct ParseError : std::runtime_error {
  ParseError(std::size_t line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
  std::size_t line;
};

// Raw section contents before normalization. Field separation is by
// whitespace, which covers both the fixed and the free layout of every
// benchmark file in circulation.
struct MpsDocument {
  struct Row {
    char kind = 'N';  // N, E, L, G
    std::string name;
  };
  struct Entry {
    std::size_t col = 0;   // index into columns
    std::size_t row = 0;   // index into rows
    double value = 0.0;
  };
  struct BoundRecord {
    enum class Kind { lo, up, fx, fr, mi, pl, bv };
    Kind kind = Kind::lo;
    std::size_t col = 0;
    double value = 0.0;
  };

  std::string name;
  std::vector<Row> rows;
  std::vector<std::string> columns;          // in order of first appearance
  std::vector<Entry> entries;                // COLUMNS section
  std::vector<double> rhs;                   // per row, default 0
  std::vector<bool> has_range;
  std::vector<double> range;                 // per row
  std::vector<BoundRecord> bounds;           // in file order
  std::size_t objective_row = 0;             // first N row
};

MpsDocument parse_mps_document(std::istream& in);

/// Normalizes a document into the canonical instance: "<=" rows negated into
/// ">=", ranged rows split into a ">=" pair, default box [0, +inf).
LpInstance lp_from_document(const MpsDocument& doc);

LpInstance parse_mps(std::istream& in);
LpInstance parse_mps_string(const std::string& text);
/// Accepts plain or gzip-compressed files (sniffed by magic bytes).
LpInstance parse_mps_file(const std::string& path);

std::string write_mps(const LpInstance& lp);
void write_mps_file(const LpInstance& lp, const std::string& path);

/// Equality of the canonical forms: dimensions, costs, bounds, right-hand
/// sides, matrix entries and names all agree (values exactly by default).
bool canonical_equal(const LpInstance& a, const LpInstance& b, double tol = 0.0);

}  // namespace padmm
