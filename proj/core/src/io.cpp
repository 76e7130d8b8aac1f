#include "sdist/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json_support.hpp"
#include "sdist/error.hpp"

namespace sdist {

namespace detail {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const SquareMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(what) + ": expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

SquareMatrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(what) + ": expected a non-empty array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  SquareMatrix m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(i)], what);
    if (row.size() != rows) throw std::invalid_argument(std::string(what) + ": matrix must be square");
    m.row(i) = row.transpose();
  }
  return m;
}

json model_to_json_value(const DistributionModel& model) {
  json out;
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    out["type"] = "gaussian";
    out["means"] = json::array({vector_to_json(g->mean())});
    out["covariances"] = json::array({matrix_to_json(g->covariance())});
    return out;
  }
  const auto& mix = std::get<MixtureModel>(model);
  out["type"] = "mixture";
  out["weights"] = mix.weights();
  out["means"] = json::array();
  out["covariances"] = json::array();
  for (const auto& c : mix.components()) {
    out["means"].push_back(vector_to_json(c.mean()));
    out["covariances"].push_back(matrix_to_json(c.covariance()));
  }
  return out;
}

DistributionModel model_from_json_value(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model JSON: expected an object");
  const std::string type = j.value("type", "");
  if (!j.contains("means") || !j.contains("covariances")) {
    throw std::invalid_argument("model JSON: 'means' and 'covariances' are required");
  }
  const json& means = j.at("means");
  const json& covs = j.at("covariances");
  if (!means.is_array() || !covs.is_array() || means.size() != covs.size() || means.empty()) {
    throw std::invalid_argument("model JSON: 'means' and 'covariances' must be arrays of equal length");
  }
  std::vector<Vector> mu;
  std::vector<SquareMatrix> sigma;
  for (std::size_t k = 0; k < means.size(); ++k) {
    mu.push_back(vector_from_json(means[k], "means"));
    sigma.push_back(matrix_from_json(covs[k], "covariances"));
  }
  if (type == "gaussian") {
    if (mu.size() != 1) throw std::invalid_argument("model JSON: gaussian expects exactly one mean");
    return GaussianModel(mu[0], sigma[0]);
  }
  if (type == "mixture") {
    if (!j.contains("weights")) throw std::invalid_argument("model JSON: mixture requires 'weights'");
    return make_mixture(j.at("weights").get<std::vector<double>>(), mu, sigma);
  }
  throw std::invalid_argument("model JSON: unknown type '" + type + "'");
}

}  // namespace detail

namespace io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto result = std::from_chars(cell.data(), end, value);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

SampleSet read_samples_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_number = 0;
  bool first_content_line = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto cells = split_cells(text);
    if (first_content_line) {
      first_content_line = false;
      double probe = 0.0;
      bool all_numeric = true;
      for (auto c : cells) all_numeric = all_numeric && parse_number(c, probe);
      if (!all_numeric) continue;  // header row
    }
    if (columns == 0) columns = cells.size();
    if (cells.size() != columns) {
      throw ParseError("line " + std::to_string(line_number) + ": expected " + std::to_string(columns) +
                           " columns, found " + std::to_string(cells.size()),
                       line_number);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw ParseError("line " + std::to_string(line_number) + ", column " + std::to_string(c + 1) +
                             ": not a number: '" + std::string(cells[c]) + "'",
                         line_number, c + 1);
      }
      if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_number) + ", column " + std::to_string(c + 1) +
                             ": non-finite value",
                         line_number, c + 1);
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("no samples found", line_number);
  Matrix data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  std::copy(values.begin(), values.end(), data.data());
  return SampleSet(std::move(data));
}

SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  SampleSet s = read_samples_csv(in);
  return s.with_label(path.filename().string());
}

std::string format_double(double value) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

void write_samples_csv(const SampleSet& set, std::ostream& out) {
  const Matrix& m = set.data();
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

void save_samples(const SampleSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_samples_csv(set, out);
  if (!out) throw Error("write failed: " + path.string());
}

DistributionModel model_from_json(std::string_view text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what(), 0);
  }
  return detail::model_from_json_value(j);
}

std::string model_to_json(const DistributionModel& model) {
  return detail::model_to_json_value(model).dump(2);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DistributionModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

void save_model(const DistributionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << model_to_json(model) << '\n';
}

}  // namespace io
}  // namespace sdist
