#include "phaseret/io.hpp"

#include <fstream>
#include <sstream>

#include "phaseret/errors.hpp"

namespace phaseret::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

bool looks_like_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Field parse_field(const json& doc) {
  if (!doc.is_object()) throw ParseError("top level: expected a JSON object");
  if (!doc.contains("field")) throw ParseError("field: missing");
  const auto& f = doc["field"];
  if (f == "real") return Field::Real;
  if (f == "complex") return Field::Complex;
  throw ParseError("field: expected \"real\" or \"complex\"");
}

Index parse_dim(const json& doc) {
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
    throw ParseError("dim: expected a positive integer");
  return static_cast<Index>(doc["dim"].get<long long>());
}

Complex parse_entry(const json& e, Field field, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    const Complex z(e[0].get<double>(), e[1].get<double>());
    if (field == Field::Real && z.imag() != 0.0) throw ParseError(where + ": complex entry in a real file");
    return z;
  }
  throw ParseError(where + ": expected a number or [re, im] pair");
}

CVector parse_vector(const json& a, Field field, Index n, const std::string& where) {
  if (!a.is_array() || static_cast<Index>(a.size()) != n)
    throw ParseError(where + ": expected an array of " + std::to_string(n) + " entries");
  CVector v(n);
  for (Index k = 0; k < n; ++k) v(k) = parse_entry(a[static_cast<std::size_t>(k)], field, where + "[" + std::to_string(k) + "]");
  return v;
}

CMatrix parse_square(const json& a, Field field, Index n, const std::string& where) {
  if (!a.is_array()) throw ParseError(where + ": expected an array");
  CMatrix m(n, n);
  if (static_cast<Index>(a.size()) == n * n && (a.empty() || !a[0].is_array() || a[0].size() == 2)) {
    // Flat row-major. A first element of length 2 is a complex pair, not a row.
    for (Index k = 0; k < n * n; ++k)
      m(k / n, k % n) = parse_entry(a[static_cast<std::size_t>(k)], field, where + "[" + std::to_string(k) + "]");
    return m;
  }
  if (static_cast<Index>(a.size()) != n)
    throw ParseError(where + ": expected " + std::to_string(n) + " rows or " + std::to_string(n * n) + " entries");
  for (Index r = 0; r < n; ++r)
    m.row(r) = parse_vector(a[static_cast<std::size_t>(r)], field, n, where + "[" + std::to_string(r) + "]").transpose();
  return m;
}

struct CsvRow {
  std::size_t line;
  std::vector<double> values;
};

/// Rows of numbers; an empty optional marks a blank line.
std::vector<std::optional<CsvRow>> read_csv(const std::string& text) {
  std::vector<std::optional<CsvRow>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      out.emplace_back(std::nullopt);
      continue;
    }
    CsvRow row{lineno, {}};
    std::istringstream cells(line);
    std::string cell;
    std::size_t field_no = 0;
    while (std::getline(cells, cell, ',')) {
      ++field_no;
      try {
        std::size_t used = 0;
        row.values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ", field " + std::to_string(field_no) +
                         ": expected a number, got '" + cell + "'");
      }
    }
    out.emplace_back(std::move(row));
  }
  return out;
}

}  // namespace

Frame parse_frame(const std::string& text, bool csv, const Tolerances& tol) {
  if (csv) {
    std::vector<CsvRow> rows;
    for (auto& r : read_csv(text))
      if (r) rows.push_back(std::move(*r));
    if (rows.empty()) throw ParseError("csv: no vectors");
    const auto n = static_cast<Index>(rows.front().values.size());
    CMatrix v(n, static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (static_cast<Index>(rows[j].values.size()) != n)
        throw ParseError("line " + std::to_string(rows[j].line) + ": expected " + std::to_string(n) + " fields");
      for (Index k = 0; k < n; ++k) v(k, static_cast<Index>(j)) = rows[j].values[static_cast<std::size_t>(k)];
    }
    return Frame(Mat(Field::Real, std::move(v)), tol);
  }
  const json doc = parse_json(text);
  const Field field = parse_field(doc);
  const Index n = parse_dim(doc);
  if (!doc.contains("vectors") || !doc["vectors"].is_array() || doc["vectors"].empty())
    throw ParseError("vectors: expected a non-empty array");
  const auto& vs = doc["vectors"];
  CMatrix v(n, static_cast<Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j)
    v.col(static_cast<Index>(j)) = parse_vector(vs[j], field, n, "vectors[" + std::to_string(j) + "]");
  return Frame(Mat(field, std::move(v)), tol);
}

ProjectionFamily parse_family(const std::string& text, bool csv, const Tolerances& tol) {
  if (csv) {
    std::vector<std::vector<CsvRow>> blocks(1);
    for (auto& r : read_csv(text)) {
      if (!r) {
        if (!blocks.back().empty()) blocks.emplace_back();
      } else {
        blocks.back().push_back(std::move(*r));
      }
    }
    if (blocks.back().empty()) blocks.pop_back();
    if (blocks.empty()) throw ParseError("csv: no projections");
    const auto n = static_cast<Index>(blocks.front().size());
    std::vector<Mat> ps;
    for (auto& b : blocks) {
      if (static_cast<Index>(b.size()) != n)
        throw ParseError("line " + std::to_string(b.front().line) + ": projection block has " + std::to_string(b.size()) +
                         " rows, expected " + std::to_string(n));
      CMatrix m(n, n);
      for (Index r = 0; r < n; ++r) {
        const auto& row = b[static_cast<std::size_t>(r)];
        if (static_cast<Index>(row.values.size()) != n)
          throw ParseError("line " + std::to_string(row.line) + ": expected " + std::to_string(n) + " fields");
        for (Index c = 0; c < n; ++c) m(r, c) = row.values[static_cast<std::size_t>(c)];
      }
      ps.emplace_back(Field::Real, std::move(m));
    }
    return ProjectionFamily::from_projections(std::move(ps), tol);
  }
  const json doc = parse_json(text);
  const Field field = parse_field(doc);
  const Index n = parse_dim(doc);
  if (doc.contains("projections")) {
    const auto& arr = doc["projections"];
    if (!arr.is_array() || arr.empty()) throw ParseError("projections: expected a non-empty array");
    std::vector<Mat> ps;
    for (std::size_t i = 0; i < arr.size(); ++i)
      ps.emplace_back(field, parse_square(arr[i], field, n, "projections[" + std::to_string(i) + "]"));
    return ProjectionFamily::from_projections(std::move(ps), tol);
  }
  if (doc.contains("vectors")) return ProjectionFamily::rank_one(parse_frame(text, false, tol), tol);
  throw ParseError("expected a \"projections\" or \"vectors\" array");
}

std::pair<Mat, Mat> parse_witness(const std::string& text, Field field, Index dim) {
  const json doc = parse_json(text);
  const json& w = doc.contains("witness") ? doc["witness"] : doc;
  if (!w.is_object() || !w.contains("u") || !w.contains("v")) throw ParseError("witness: expected \"u\" and \"v\"");
  if (doc.contains("field") && parse_field(doc) != field) throw ParseError("field: witness and family fields differ");
  return {Mat(field, parse_vector(w["u"], field, dim, "u")), Mat(field, parse_vector(w["v"], field, dim, "v"))};
}

json entry_to_json(Complex z, Field field) {
  if (field == Field::Real) return z.real();
  return json::array({z.real(), z.imag()});
}

json column_to_json(const Mat& column) {
  json a = json::array();
  for (Index k = 0; k < column.rows(); ++k) a.push_back(entry_to_json(column(k, 0), column.field()));
  return a;
}

json frame_to_json(const Frame& f) {
  json vs = json::array();
  for (std::size_t j = 0; j < f.size(); ++j) vs.push_back(column_to_json(f.vector(j)));
  return {{"field", to_string(f.field())}, {"dim", f.dim()}, {"vectors", vs}};
}

json family_to_json(const ProjectionFamily& p) {
  json ps = json::array();
  for (const auto& m : p.projections()) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(entry_to_json(m(r, c), m.field()));
      rows.push_back(row);
    }
    ps.push_back(rows);
  }
  return {{"field", to_string(p.field())}, {"dim", p.dim()}, {"projections", ps}};
}

json witness_to_json(const PrWitness& w) {
  return {{"u", column_to_json(w.u)},
          {"v", column_to_json(w.v)},
          {"max_mismatch", w.max_mismatch},
          {"phase_gap", w.phase_gap}};
}

std::string index_set(const std::vector<std::size_t>& zero_based) {
  std::string s = "{";
  for (std::size_t k = 0; k < zero_based.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(zero_based[k] + 1);
  }
  return s + "}";
}

namespace {
json one_based(const std::vector<std::size_t>& idx) {
  json a = json::array();
  for (auto i : idx) a.push_back(i + 1);
  return a;
}
}  // namespace

json partition_to_json(const PartitionWitness& w, std::size_t m) {
  return {{"I", one_based(w.side_I)}, {"I_complement", one_based(w.side_Ic(m))},
          {"rank_I", w.rank_I}, {"rank_I_complement", w.rank_Ic}};
}

json verdict_to_json(const Verdict& v, std::size_t m) {
  json out = {{"status", to_string(v.status)}, {"method", v.method}};
  if (v.restart) out["restart"] = *v.restart;
  if (v.partition) out["partition"] = partition_to_json(*v.partition, m);
  if (v.point) out["point"] = column_to_json(*v.point);
  if (v.pr_witness) out["witness"] = witness_to_json(*v.pr_witness);
  return out;
}

}  // namespace phaseret::io
