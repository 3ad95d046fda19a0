#include "padmm/mps.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace padmm {

namespace {

// Bound magnitudes at or beyond this value are read as infinite, matching
// the 1e30 convention used by benchmark files.
constexpr double kBoundInf = 1e30;

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double parse_number(const std::string& raw, std::size_t line) {
  std::string s = raw;
  for (char& c : s)
    if (c == 'D' || c == 'd') c = 'E';  // legacy exponent marker
  if (!s.empty() && s.front() == '+') s.erase(s.begin());
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, "malformed numeric field '" + raw + "'");
  if (std::isnan(value)) throw ParseError(line, "NaN numeric field");
  return value;
}

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  return i < s.size() &&
         (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.');
}

enum class Section { none, name, objsense, rows, columns, rhs, ranges, bounds, endata };

struct SectionInfo {
  Section id;
  int order;  // relative position in a well-formed file
};

const std::map<std::string, SectionInfo> kSections = {
    {"NAME", {Section::name, 0}},     {"OBJSENSE", {Section::objsense, 1}},
    {"ROWS", {Section::rows, 2}},     {"COLUMNS", {Section::columns, 3}},
    {"RHS", {Section::rhs, 4}},       {"RANGES", {Section::ranges, 5}},
    {"BOUNDS", {Section::bounds, 6}}, {"ENDATA", {Section::endata, 7}},
};

}  // namespace

MpsDocument parse_mps_document(std::istream& in) {
  MpsDocument doc;
  std::unordered_map<std::string, std::size_t> row_index;
  std::unordered_map<std::string, std::size_t> col_index;
  std::set<std::pair<std::size_t, std::size_t>> seen_entries;
  bool have_objective = false;
  Section section = Section::none;
  int max_order = -1;
  bool saw_rows = false, saw_columns = false, saw_endata = false;
  std::string rhs_set, ranges_set, bounds_set;
  bool rhs_set_known = false, ranges_set_known = false, bounds_set_known = false;

  auto lookup_row = [&](const std::string& name, std::size_t line) {
    auto it = row_index.find(name);
    if (it == row_index.end())
      throw ParseError(line, "reference to undeclared row '" + name + "'");
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') continue;  // comment

    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    std::vector<std::string> f = split_fields(line);
    if (f.empty()) continue;

    if (header) {
      const std::string key = upper(f[0]);
      auto it = kSections.find(key);
      if (it == kSections.end())
        throw ParseError(lineno, "unknown section '" + f[0] + "'");
      if (it->second.order <= max_order)
        throw ParseError(lineno, "section " + key + " out of order");
      max_order = it->second.order;
      section = it->second.id;
      switch (section) {
        case Section::name:
          if (f.size() > 1) doc.name = f[1];
          break;
        case Section::rows: saw_rows = true; break;
        case Section::columns:
          if (!saw_rows) throw ParseError(lineno, "COLUMNS before ROWS");
          saw_columns = true;
          break;
        case Section::endata: saw_endata = true; break;
        default: break;
      }
      if (saw_endata) break;
      continue;
    }

    switch (section) {
      case Section::none:
        throw ParseError(lineno, "data before any section header");
      case Section::name:
      case Section::endata:
        throw ParseError(lineno, "unexpected data line");
      case Section::objsense: {
        const std::string sense = upper(f[0]);
        if (sense == "MAX" || sense == "MAXIMIZE")
          throw ParseError(lineno, "maximization objective not supported");
        if (sense != "MIN" && sense != "MINIMIZE")
          throw ParseError(lineno, "unknown objective sense '" + f[0] + "'");
        break;
      }
      case Section::rows: {
        if (f.size() != 2) throw ParseError(lineno, "ROWS line needs kind and name");
        const std::string kind = upper(f[0]);
        if (kind.size() != 1 || std::string("NELG").find(kind[0]) == std::string::npos)
          throw ParseError(lineno, "unknown row kind '" + f[0] + "'");
        if (row_index.count(f[1]))
          throw ParseError(lineno, "duplicate row name '" + f[1] + "'");
        row_index.emplace(f[1], doc.rows.size());
        doc.rows.push_back({kind[0], f[1]});
        if (kind[0] == 'N' && !have_objective) {
          doc.objective_row = doc.rows.size() - 1;
          have_objective = true;
        }
        break;
      }
      case Section::columns: {
        if (f.size() >= 3 && upper(f[1]) == "'MARKER'")
          throw ParseError(lineno, "integer markers are not supported");
        if (f.size() < 3 || f.size() % 2 == 0)
          throw ParseError(lineno, "COLUMNS line needs a column and (row,value) pairs");
        std::size_t col;
        auto it = col_index.find(f[0]);
        if (it == col_index.end()) {
          col = doc.columns.size();
          col_index.emplace(f[0], col);
          doc.columns.push_back(f[0]);
        } else {
          col = it->second;
        }
        for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
          const std::size_t row = lookup_row(f[i], lineno);
          const double value = parse_number(f[i + 1], lineno);
          if (!seen_entries.emplace(col, row).second)
            throw ParseError(lineno, "duplicate entry for column '" + f[0] +
                                         "' and row '" + f[i] + "'");
          doc.entries.push_back({col, row, value});
        }
        break;
      }
      case Section::rhs:
      case Section::ranges: {
        const bool is_rhs = section == Section::rhs;
        if (!saw_columns) throw ParseError(lineno, "RHS/RANGES before COLUMNS");
        // a missing set name leaves an even field count
        std::size_t start = 1;
        std::string set_name;
        if (f.size() % 2 == 0) {
          start = 0;
        } else {
          set_name = f[0];
        }
        if (f.size() - start < 2)
          throw ParseError(lineno, "RHS/RANGES line needs (row,value) pairs");
        std::string& active = is_rhs ? rhs_set : ranges_set;
        bool& known = is_rhs ? rhs_set_known : ranges_set_known;
        if (!known) {
          active = set_name;
          known = true;
        } else if (set_name != active) {
          break;  // only the first named set is used
        }
        if (doc.rhs.size() != doc.rows.size()) {
          doc.rhs.assign(doc.rows.size(), 0.0);
          doc.has_range.assign(doc.rows.size(), false);
          doc.range.assign(doc.rows.size(), 0.0);
        }
        for (std::size_t i = start; i + 1 < f.size(); i += 2) {
          const std::size_t row = lookup_row(f[i], lineno);
          const double value = parse_number(f[i + 1], lineno);
          if (is_rhs) {
            doc.rhs[row] = value;
          } else {
            if (doc.rows[row].kind == 'N')
              throw ParseError(lineno, "range on objective row");
            doc.has_range[row] = true;
            doc.range[row] = value;
          }
        }
        break;
      }
      case Section::bounds: {
        if (f.empty()) break;
        const std::string kind_s = upper(f[0]);
        MpsDocument::BoundRecord rec;
        bool needs_value = false;
        if (kind_s == "LO") { rec.kind = MpsDocument::BoundRecord::Kind::lo; needs_value = true; }
        else if (kind_s == "UP") { rec.kind = MpsDocument::BoundRecord::Kind::up; needs_value = true; }
        else if (kind_s == "FX") { rec.kind = MpsDocument::BoundRecord::Kind::fx; needs_value = true; }
        else if (kind_s == "FR") { rec.kind = MpsDocument::BoundRecord::Kind::fr; }
        else if (kind_s == "MI") { rec.kind = MpsDocument::BoundRecord::Kind::mi; }
        else if (kind_s == "PL") { rec.kind = MpsDocument::BoundRecord::Kind::pl; }
        else if (kind_s == "BV") { rec.kind = MpsDocument::BoundRecord::Kind::bv; }
        else throw ParseError(lineno, "unknown bound kind '" + f[0] + "'");

        // layouts: kind set col [value] or kind col [value]
        std::string set_name, col_name, value_s;
        if (needs_value) {
          if (f.size() == 4) { set_name = f[1]; col_name = f[2]; value_s = f[3]; }
          else if (f.size() == 3) { col_name = f[1]; value_s = f[2]; }
          else throw ParseError(lineno, "bound line needs a column and a value");
        } else {
          if (f.size() >= 3 && !looks_numeric(f[2])) { set_name = f[1]; col_name = f[2]; }
          else if (f.size() >= 2) { col_name = f[1]; }
          else throw ParseError(lineno, "bound line needs a column");
        }
        if (!bounds_set_known) {
          bounds_set = set_name;
          bounds_set_known = true;
        } else if (set_name != bounds_set) {
          break;
        }
        auto it = col_index.find(col_name);
        if (it == col_index.end())
          throw ParseError(lineno, "bound for undeclared column '" + col_name + "'");
        rec.col = it->second;
        if (needs_value) rec.value = parse_number(value_s, lineno);
        doc.bounds.push_back(rec);
        break;
      }
    }
  }

  if (!saw_endata) throw ParseError(lineno, "missing ENDATA section");
  if (!saw_rows) throw ParseError(lineno, "missing ROWS section");
  if (!saw_columns) throw ParseError(lineno, "missing COLUMNS section");
  if (!have_objective) throw ParseError(lineno, "no objective (N) row declared");
  if (doc.rhs.size() != doc.rows.size()) {
    doc.rhs.assign(doc.rows.size(), 0.0);
    doc.has_range.assign(doc.rows.size(), false);
    doc.range.assign(doc.rows.size(), 0.0);
  }
  return doc;
}

LpInstance lp_from_document(const MpsDocument& doc) {
  const std::size_t n = doc.columns.size();
  LpInstance lp;
  lp.name = doc.name.empty() ? "lp" : doc.name;
  lp.col_names = doc.columns;
  lp.cost.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kInf);

  // bounds applied in file order; an UP with negative value on a still
  // default lower bound drops the lower bound to -inf (legacy convention)
  std::vector<bool> lower_touched(n, false);
  for (const auto& b : doc.bounds) {
    using Kind = MpsDocument::BoundRecord::Kind;
    const std::size_t j = b.col;
    double v = b.value;
    if (std::abs(v) >= kBoundInf) v = v > 0 ? kInf : -kInf;
    switch (b.kind) {
      case Kind::lo: lp.lower[j] = v; lower_touched[j] = true; break;
      case Kind::up:
        lp.upper[j] = v;
        if (v < 0.0 && !lower_touched[j]) lp.lower[j] = -kInf;
        break;
      case Kind::fx: lp.lower[j] = lp.upper[j] = v; lower_touched[j] = true; break;
      case Kind::fr: lp.lower[j] = -kInf; lp.upper[j] = kInf; lower_touched[j] = true; break;
      case Kind::mi: lp.lower[j] = -kInf; lower_touched[j] = true; break;
      case Kind::pl: lp.upper[j] = kInf; break;
      case Kind::bv: lp.lower[j] = 0.0; lp.upper[j] = 1.0; lower_touched[j] = true; break;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!(lp.lower[j] <= lp.upper[j]))
      throw ParseError(0, "empty box for column '" + doc.columns[j] + "'");

  // collect per-row entries
  std::vector<std::vector<std::pair<std::size_t, double>>> row_entries(doc.rows.size());
  for (const auto& e : doc.entries) {
    if (e.row == doc.objective_row) {
      lp.cost[e.col] = e.value;
    } else if (doc.rows[e.row].kind != 'N') {
      row_entries[e.row].push_back({e.col, e.value});
    }
    // entries on secondary free rows are parsed but unused
  }
  lp.objective_constant = -doc.rhs[doc.objective_row];

  std::vector<Triplet> eq_t, ge_t;
  std::size_t eq_rows = 0, ge_rows = 0;
  lp.b_eq.clear();
  lp.b_ge.clear();

  auto emit_ge = [&](const std::vector<std::pair<std::size_t, double>>& entries,
                     double rhs, double sign, const std::string& name) {
    for (const auto& [col, value] : entries)
      ge_t.push_back({ge_rows, col, sign * value});
    lp.b_ge.push_back(sign * rhs);
    lp.row_names_ge.push_back(name);
    ++ge_rows;
  };
  auto emit_eq = [&](const std::vector<std::pair<std::size_t, double>>& entries,
                     double rhs, const std::string& name) {
    for (const auto& [col, value] : entries) eq_t.push_back({eq_rows, col, value});
    lp.b_eq.push_back(rhs);
    lp.row_names_eq.push_back(name);
    ++eq_rows;
  };

  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    if (row.kind == 'N') continue;
    const double rhs = doc.rhs[r];
    if (!doc.has_range[r]) {
      if (row.kind == 'E') emit_eq(row_entries[r], rhs, row.name);
      else if (row.kind == 'G') emit_ge(row_entries[r], rhs, 1.0, row.name);
      else emit_ge(row_entries[r], rhs, -1.0, row.name);  // L negated into G
    } else {
      // two-sided row [lo, hi]
      const double rng = doc.range[r];
      double lo, hi;
      if (row.kind == 'G') { lo = rhs; hi = rhs + std::abs(rng); }
      else if (row.kind == 'L') { lo = rhs - std::abs(rng); hi = rhs; }
      else { lo = rng >= 0 ? rhs : rhs + rng; hi = rng >= 0 ? rhs + rng : rhs; }
      if (lo == hi) {
        emit_eq(row_entries[r], lo, row.name);
      } else {
        emit_ge(row_entries[r], lo, 1.0, row.name + "_lo");
        emit_ge(row_entries[r], hi, -1.0, row.name + "_hi");
      }
    }
  }

  lp.a_eq = SparseMatrix::from_triplets(eq_rows, n, std::move(eq_t));
  lp.a_ge = SparseMatrix::from_triplets(ge_rows, n, std::move(ge_t));
  return lp;
}

LpInstance parse_mps(std::istream& in) {
  return lp_from_document(parse_mps_document(in));
}

LpInstance parse_mps_string(const std::string& text) {
  std::istringstream in(text);
  return parse_mps(in);
}

namespace {

std::string gunzip(const std::string& raw) {
  z_stream strm{};
  if (inflateInit2(&strm, 16 + MAX_WBITS) != Z_OK)
    throw std::runtime_error("gzip: inflateInit failed");
  std::string out;
  out.reserve(raw.size() * 4);
  char buf[1 << 16];
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
  strm.avail_in = static_cast<uInt>(raw.size());
  int rc = Z_OK;
  do {
    strm.next_out = reinterpret_cast<Bytef*>(buf);
    strm.avail_out = sizeof(buf);
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw ParseError(0, "corrupt gzip stream");
    }
    out.append(buf, sizeof(buf) - strm.avail_out);
  } while (rc != Z_STREAM_END && strm.avail_in > 0);
  inflateEnd(&strm);
  if (rc != Z_STREAM_END) throw ParseError(0, "truncated gzip stream");
  return out;
}

}  // namespace

LpInstance parse_mps_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
      static_cast<unsigned char>(raw[1]) == 0x8b)
    raw = gunzip(raw);
  LpInstance lp = parse_mps_string(raw);
  if (lp.name == "lp") {
    auto slash = path.find_last_of('/');
    lp.name = slash == std::string::npos ? path : path.substr(slash + 1);
  }
  return lp;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string write_mps(const LpInstance& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();

  auto row_name = [&](bool eq, std::size_t i) {
    const auto& names = eq ? lp.row_names_eq : lp.row_names_ge;
    if (i < names.size() && !names[i].empty()) return names[i];
    return std::string(eq ? "E" : "G") + std::to_string(i);
  };
  auto col_name = [&](std::size_t j) {
    if (j < lp.col_names.size() && !lp.col_names[j].empty()) return lp.col_names[j];
    return "C" + std::to_string(j);
  };
  std::string obj = "OBJ";
  {
    std::set<std::string> taken;
    for (std::size_t i = 0; i < lp.num_eq(); ++i) taken.insert(row_name(true, i));
    for (std::size_t i = 0; i < lp.num_ge(); ++i) taken.insert(row_name(false, i));
    while (taken.count(obj)) obj += "_";
  }

  std::ostringstream out;
  out << "NAME          " << (lp.name.empty() ? "lp" : lp.name) << "\n";
  out << "ROWS\n";
  out << " N  " << obj << "\n";
  for (std::size_t i = 0; i < lp.num_eq(); ++i) out << " E  " << row_name(true, i) << "\n";
  for (std::size_t i = 0; i < lp.num_ge(); ++i) out << " G  " << row_name(false, i) << "\n";

  // per-column entries; every column carries its objective coefficient so
  // that empty columns survive a round trip
  std::vector<std::vector<std::pair<std::string, double>>> col_entries(n);
  auto gather = [&](const SparseMatrix& a, bool eq) {
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t p = a.row_start()[r]; p < a.row_start()[r + 1]; ++p)
        col_entries[a.col_index()[p]].push_back({row_name(eq, r), a.values()[p]});
  };
  gather(lp.a_eq, true);
  gather(lp.a_ge, false);

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    out << "    " << col_name(j) << "  " << obj << "  " << fmt(lp.cost[j]) << "\n";
    for (const auto& [rname, value] : col_entries[j])
      out << "    " << col_name(j) << "  " << rname << "  " << fmt(value) << "\n";
  }

  out << "RHS\n";
  if (lp.objective_constant != 0.0)
    out << "    RHS  " << obj << "  " << fmt(-lp.objective_constant) << "\n";
  for (std::size_t i = 0; i < lp.num_eq(); ++i)
    if (lp.b_eq[i] != 0.0)
      out << "    RHS  " << row_name(true, i) << "  " << fmt(lp.b_eq[i]) << "\n";
  for (std::size_t i = 0; i < lp.num_ge(); ++i)
    if (lp.b_ge[i] != 0.0)
      out << "    RHS  " << row_name(false, i) << "  " << fmt(lp.b_ge[i]) << "\n";

  std::ostringstream bounds;
  for (std::size_t j = 0; j < n; ++j) {
    const double l = lp.lower[j], u = lp.upper[j];
    if (l == 0.0 && u == kInf) continue;
    if (l == u) {
      bounds << " FX BND  " << col_name(j) << "  " << fmt(l) << "\n";
      continue;
    }
    if (l == -kInf && u == kInf) {
      bounds << " FR BND  " << col_name(j) << "\n";
      continue;
    }
    if (l == -kInf) bounds << " MI BND  " << col_name(j) << "\n";
    else if (l != 0.0) bounds << " LO BND  " << col_name(j) << "  " << fmt(l) << "\n";
    if (u != kInf) bounds << " UP BND  " << col_name(j) << "  " << fmt(u) << "\n";
  }
  const std::string bounds_s = bounds.str();
  if (!bounds_s.empty()) out << "BOUNDS\n" << bounds_s;
  out << "ENDATA\n";
  return out.str();
}

void write_mps_file(const LpInstance& lp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << write_mps(lp);
}

namespace {

bool vec_equal(const Vec& a, const Vec& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;  // covers matching infinities
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

}  // namespace

bool canonical_equal(const LpInstance& a, const LpInstance& b, double tol) {
  return a.num_vars() == b.num_vars() && a.num_eq() == b.num_eq() &&
         a.num_ge() == b.num_ge() && vec_equal(a.cost, b.cost, tol) &&
         vec_equal(a.lower, b.lower, tol) && vec_equal(a.upper, b.upper, tol) &&
         vec_equal(a.b_eq, b.b_eq, tol) && vec_equal(a.b_ge, b.b_ge, tol) &&
         std::abs(a.objective_constant - b.objective_constant) <= tol &&
         a.a_eq.structurally_equal(b.a_eq, tol) &&
         a.a_ge.structurally_equal(b.a_ge, tol);
}

}  // namespace padmm
