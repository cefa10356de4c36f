#pragma once

// Text formats: CSV datasets (label,x1,...,xL), model files as JSON and
// flat key=value configuration files.

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gfda/fisher.hpp"

namespace gfda::io {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace detail

/// Reads `label,x1,...,xL` rows. A first row whose second field is not a
/// number is taken as a header. L comes from the first data row. Classes are
/// returned in order of first appearance.
inline GroupedData read_dataset(std::istream& in, const std::string& source = "<stream>") {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Vector>> rows;
  std::string line;
  Index dim = -1;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && !parse_double(fields[1])) continue;
    }
    if (fields.size() < 2) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected label and at least one value");
    }
    const Index n = static_cast<Index>(fields.size()) - 1;
    if (dim < 0) dim = n;
    if (n != dim) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": " + std::to_string(n) + " values, expected " +
                            std::to_string(dim));
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i) {
      const auto v = parse_double(fields[static_cast<std::size_t>(i) + 1]);
      if (!v || !std::isfinite(*v)) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(i + 2) +
                              " is not a finite number");
      }
      x(i) = *v;
    }
    const std::string label = detail::trim(fields[0]);
    if (label.empty()) throw ValidationError(source + ":" + std::to_string(line_no) + ": empty label");
    auto [it, inserted] = rows.try_emplace(label);
    if (inserted) order.push_back(label);
    it->second.push_back(std::move(x));
  }
  if (order.empty()) throw ValidationError(source + ": no data rows");
  GroupedData out;
  for (const auto& label : order) {
    const auto& vs = rows[label];
    Matrix m(dim, static_cast<Index>(vs.size()));
    for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Index>(j)) = vs[j];
    out.push_back({label, std::move(m)});
  }
  return out;
}

inline GroupedData read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path + "'");
  return read_dataset(in, path);
}

inline void write_dataset(std::ostream& out, const GroupedData& data, bool header = true) {
  if (data.empty()) return;
  const Index dim = data.front().samples.rows();
  if (header) {
    out << "label";
    for (Index i = 1; i <= dim; ++i) out << ",x" << i;
    out << '\n';
  }
  for (const auto& c : data) {
    for (Index j = 0; j < c.samples.cols(); ++j) {
      out << c.label;
      for (Index i = 0; i < dim; ++i) out << ',' << format_double(c.samples(i, j));
      out << '\n';
    }
  }
}

using Json = nlohmann::json;

inline Json matrix_to_json(const Matrix& m) {
  Json cols = Json::array();
  for (Index j = 0; j < m.cols(); ++j) {
    Json col = Json::array();
    for (Index i = 0; i < m.rows(); ++i) col.push_back(m(i, j));
    cols.push_back(std::move(col));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"columns", std::move(cols)}};
}

inline Matrix matrix_from_json(const Json& j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const Json& data = j.at("columns");
  if (static_cast<Index>(data.size()) != cols) throw ValidationError("model file: column count mismatch");
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    const Json& col = data[static_cast<std::size_t>(c)];
    if (static_cast<Index>(col.size()) != rows) throw ValidationError("model file: row count mismatch");
    for (Index r = 0; r < rows; ++r) m(r, c) = col[static_cast<std::size_t>(r)].get<double>();
  }
  return m;
}

inline constexpr int kModelFormatVersion = 1;

inline Json model_to_json(const DiscriminantModel& m) {
  Json j;
  j["format"] = "gfda-model";
  j["version"] = kModelFormatVersion;
  j["method"] = std::string(method_name(m.method));
  j["normalized"] = m.normalized;
  j["normalize_refs"] = m.normalize_refs;
  j["within_fallback"] = m.within_fallback;
  j["labels"] = m.labels;
  j["basis"] = matrix_to_json(m.basis.matrix());
  j["whitening"] = m.whitening ? matrix_to_json(*m.whitening) : Json(nullptr);
  j["class_refs"] = matrix_to_json(m.class_refs);
  j["criterion_values"] = std::vector<double>(m.criterion_values.data(), m.criterion_values.data() + m.criterion_values.size());
  j["warnings"] = m.warnings;
  return j;
}

inline DiscriminantModel model_from_json(const Json& j) {
  try {
    if (j.at("format") != "gfda-model") throw ValidationError("not a model file");
    if (j.at("version").get<int>() != kModelFormatVersion) throw ValidationError("unsupported model file version");
    DiscriminantModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.normalized = j.at("normalized").get<bool>();
    m.normalize_refs = j.at("normalize_refs").get<bool>();
    m.within_fallback = j.at("within_fallback").get<bool>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.basis = OrthoBasis(matrix_from_json(j.at("basis")));
    if (!j.at("whitening").is_null()) m.whitening = matrix_from_json(j.at("whitening"));
    m.class_refs = matrix_from_json(j.at("class_refs"));
    const auto values = j.at("criterion_values").get<std::vector<double>>();
    m.criterion_values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (m.class_refs.cols() != static_cast<Index>(m.labels.size()) || m.class_refs.rows() != m.basis.dim()) {
      throw ValidationError("model file: class references do not match basis and labels");
    }
    if (m.whitening && m.whitening->rows() != m.basis.ambient_dim()) {
      throw ValidationError("model file: whitening map does not match basis");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

inline void save_model(const DiscriminantModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << model_to_json(m).dump(1) << '\n';
}

inline DiscriminantModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

/// Flat key=value pairs; '#' starts a comment, blank lines are skipped.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues read_key_values(std::istream& in, const std::string& source = "<stream>") {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ValidationError(source + ":" + std::to_string(line_no) + ": empty key");
    out[key] = detail::trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return read_key_values(in, path);
}

}  // namespace gfda::io
