#include "opfree/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "opfree/errors.hpp"

namespace opfree {

namespace {

using nlohmann::json;

Complex parse_entry(const json& j, const std::string& path) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw SchemaError(path, "expected a number or an [re, im] pair");
}

Mat parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  int cols = -1;
  Mat m;
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty())
      throw SchemaError(path + "[" + std::to_string(r) + "]", "expected a row array");
    if (cols < 0) {
      cols = static_cast<int>(row.size());
      m = Mat(rows, cols);
    } else if (static_cast<int>(row.size()) != cols) {
      throw SchemaError(path + "[" + std::to_string(r) + "]", "ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c)
      m(r, c) = parse_entry(row[c], path + "[" + std::to_string(r) + "][" +
                                        std::to_string(c) + "]");
  }
  return m;
}

Vec parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = parse_entry(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

CpMap parse_eta(const json& j, int d, const Tolerances& tol) {
  if (j.contains("kraus")) {
    const json& arr = j["kraus"];
    if (!arr.is_array()) throw SchemaError("eta.kraus", "expected an array of matrices");
    std::vector<Mat> kraus;
    for (size_t s = 0; s < arr.size(); ++s) {
      Mat k = parse_matrix(arr[s], "eta.kraus[" + std::to_string(s) + "]");
      if (k.rows() != d || k.cols() != d)
        throw SchemaError("eta.kraus[" + std::to_string(s) + "]",
                          "Kraus operator must be " + std::to_string(d) + "x" +
                              std::to_string(d));
      kraus.push_back(std::move(k));
    }
    return CpMap(d, std::move(kraus));
  }
  if (j.contains("choi")) {
    Mat choi = parse_matrix(j["choi"], "eta.choi");
    if (choi.rows() != d * d || choi.cols() != d * d)
      throw SchemaError("eta.choi", "Choi matrix must be d^2 x d^2");
    return kraus_from_choi(choi, tol);  // DomainError propagates on non-PSD input
  }
  throw SchemaError("eta", "expected 'kraus' or 'choi'");
}

BLaw parse_mu(const json& j, int d, int max_degree) {
  if (j.contains("realization")) {
    const json& r = j["realization"];
    if (!r.contains("s") || !r["s"].is_number_integer())
      throw SchemaError("mu.realization.s", "expected an integer multiplicity");
    const int s = r["s"].get<int>();
    if (s < 1) throw SchemaError("mu.realization.s", "multiplicity must be >= 1");
    if (!r.contains("xi_c")) throw SchemaError("mu.realization.xi_c", "missing unit vector");
    Vec c = parse_vector(r["xi_c"], "mu.realization.xi_c");
    if (c.size() != s) throw SchemaError("mu.realization.xi_c", "length must equal s");
    if (!r.contains("X")) throw SchemaError("mu.realization.X", "missing operator");
    Mat x = parse_matrix(r["X"], "mu.realization.X");
    if (x.rows() != s * d || x.cols() != s * d)
      throw SchemaError("mu.realization.X", "operator must be (s d) x (s d)");
    try {
      return BLaw::from_realization(PointedCorrespondence(d, c), x, max_degree);
    } catch (const DomainError& e) {
      throw SchemaError("mu.realization", e.what());
    }
  }
  if (!j.contains("R") || !j["R"].is_number())
    throw SchemaError("mu.R", "expected a numeric norm bound");
  const double radius = j["R"].get<double>();
  if (!j.contains("N") || !j["N"].is_number_integer())
    throw SchemaError("mu.N", "expected an integer max degree");
  const int n = j["N"].get<int>();
  if (!j.contains("moments") || !j["moments"].is_array())
    throw SchemaError("mu.moments", "expected an array of per-degree maps");
  const json& arr = j["moments"];
  if (static_cast<int>(arr.size()) != n)
    throw SchemaError("mu.moments", "expected exactly N per-degree entries");
  std::vector<std::vector<Mat>> maps(n);
  for (int k = 1; k <= n; ++k) {
    const json& deg = arr[k - 1];
    const std::string path = "mu.moments[" + std::to_string(k - 1) + "]";
    if (!deg.is_array()) throw SchemaError(path, "expected an array of matrices");
    if (static_cast<long>(deg.size()) != dense_map_size(d, k))
      throw SchemaError(path, "expected " + std::to_string(dense_map_size(d, k)) +
                                  " entries at degree " + std::to_string(k));
    for (size_t i = 0; i < deg.size(); ++i) {
      Mat entry = parse_matrix(deg[i], path + "[" + std::to_string(i) + "]");
      if (entry.rows() != d || entry.cols() != d)
        throw SchemaError(path + "[" + std::to_string(i) + "]", "entry must be d x d");
      maps[k - 1].push_back(std::move(entry));
    }
  }
  return BLaw(d, radius, std::move(maps));
}

}  // namespace

ProblemSpec parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  ProblemSpec spec;
  if (doc.contains("version")) {
    if (!doc["version"].is_string()) throw SchemaError("version", "expected a string");
    spec.version = doc["version"].get<std::string>();
  }
  if (!doc.contains("B") || !doc["B"].is_object())
    throw SchemaError("B", "missing algebra block");
  if (!doc["B"].contains("d") || !doc["B"]["d"].is_number_integer())
    throw SchemaError("B.d", "expected an integer dimension");
  spec.d = doc["B"]["d"].get<int>();
  if (spec.d < 1 || spec.d > 8) throw SchemaError("B.d", "dimension must be in 1..8");

  if (doc.contains("options")) {
    const json& o = doc["options"];
    if (!o.is_object()) throw SchemaError("options", "expected an object");
    auto read_int = [&](const char* key, int fallback) {
      if (!o.contains(key)) return fallback;
      if (!o[key].is_number_integer()) throw SchemaError(std::string("options.") + key, "expected an integer");
      return o[key].get<int>();
    };
    auto read_double = [&](const char* key, double fallback) {
      if (!o.contains(key)) return fallback;
      if (!o[key].is_number()) throw SchemaError(std::string("options.") + key, "expected a number");
      return o[key].get<double>();
    };
    spec.options.max_degree = read_int("max_degree", spec.options.max_degree);
    spec.options.depth = read_int("depth", spec.options.depth);
    spec.options.n = read_int("n", spec.options.n);
    if (o.contains("seed")) {
      if (!o["seed"].is_number_integer()) throw SchemaError("options.seed", "expected an integer");
      spec.options.seed = o["seed"].get<unsigned long long>();
    }
    spec.options.tol.eq_tol = read_double("eq_tol", spec.options.tol.eq_tol);
    spec.options.tol.psd_tol = read_double("psd_tol", spec.options.tol.psd_tol);
    spec.options.tol.newton_tol = read_double("newton_tol", spec.options.tol.newton_tol);
    spec.options.tol.validate();
  }
  if (spec.options.max_degree < 1 || spec.options.max_degree > 12)
    throw SchemaError("options.max_degree", "must be in 1..12");

  if (doc.contains("eta")) {
    if (!doc["eta"].is_object()) throw SchemaError("eta", "expected an object");
    spec.eta = parse_eta(doc["eta"], spec.d, spec.options.tol);
  }
  if (doc.contains("mu")) {
    if (!doc["mu"].is_object()) throw SchemaError("mu", "expected an object");
    spec.mu = parse_mu(doc["mu"], spec.d, spec.options.max_degree);
  }
  return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

Mat parse_matrix_text(const std::string& text, const std::string& field) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(field, std::string("invalid JSON: ") + e.what());
  }
  return parse_matrix(doc, field);
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << names[i];
  os_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i)
    os_ << (i ? "," : "") << format_full(values[i]);
  os_ << "\n";
}

std::vector<std::string> complex_block_headers(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      out.push_back(prefix + "_" + std::to_string(p) + std::to_string(q) + "_re");
      out.push_back(prefix + "_" + std::to_string(p) + std::to_string(q) + "_im");
    }
  return out;
}

void append_complex_block(std::vector<double>& row, const Mat& block) {
  for (int p = 0; p < block.rows(); ++p)
    for (int q = 0; q < block.cols(); ++q) {
      row.push_back(block(p, q).real());
      row.push_back(block(p, q).imag());
    }
}

}  // namespace opfree
