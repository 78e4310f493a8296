#include "gsobol/csv_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "gsobol/errors.hpp"

namespace gsobol {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

std::size_t find_column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  fail(ErrorKind::Config, "CSV column '" + name + "' not found");
}

Matrix take_columns(const CsvTable& t, const std::string& prefix, Eigen::Index count) {
  Matrix out(t.values.rows(), count);
  for (Eigen::Index l = 0; l < count; ++l)
    out.col(l) = t.values.col(static_cast<Eigen::Index>(
        find_column(t, prefix + std::to_string(l + 1))));
  return out;
}

Eigen::Index count_prefixed(const CsvTable& t, const std::string& prefix) {
  Eigen::Index count = 0;
  while (true) {
    const std::string name = prefix + std::to_string(count + 1);
    bool found = false;
    for (const auto& h : t.header) found = found || h == name;
    if (!found) return count;
    ++count;
  }
}

}  // namespace

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    fail(ErrorKind::Domain, "CSV header and column count differ");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Config, "empty CSV input");
  t.header = split(line);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line);
    if (fields.size() != t.header.size())
      fail(ErrorKind::Config, "CSV line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || *end != '\0')
        fail(ErrorKind::Config, "CSV line " + std::to_string(line_no) + ": bad number '" + f + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return t;
}

void write_inputs_csv(std::ostream& out, const Matrix& x) {
  write_csv(out, numbered("x", x.cols()), x);
}

void write_sample_csv(std::ostream& out, const PickFreezeSample& s) {
  s.validate();
  auto header = numbered("y", s.k());
  const auto tail = numbered("yu", s.k());
  header.insert(header.end(), tail.begin(), tail.end());
  Matrix both(s.n(), 2 * s.k());
  both << s.y, s.yu;
  write_csv(out, header, both);
}

PickFreezeSample read_sample_csv(std::istream& in, const SubsetU& u, const std::string& model_id) {
  const CsvTable t = read_csv(in);
  const Eigen::Index k = count_prefixed(t, "y");
  if (k == 0 || count_prefixed(t, "yu") != k)
    fail(ErrorKind::Config, "sample CSV needs columns y1..yk and yu1..yuk");
  PickFreezeSample s;
  s.y = take_columns(t, "y", k);
  s.yu = take_columns(t, "yu", k);
  s.u = u;
  s.model_id = model_id;
  s.validate();
  return s;
}

void write_coefficients_csv(std::ostream& out, const FunctionalSample& fs) {
  fs.validate();
  auto header = numbered("c", fs.m_max());
  const auto tail = numbered("cu", fs.m_max());
  header.insert(header.end(), tail.begin(), tail.end());
  Matrix both(fs.n(), 2 * fs.m_max());
  both << fs.coeff_y, fs.coeff_yu;
  write_csv(out, header, both);
}

FunctionalSample read_coefficients_csv(std::istream& in, const SubsetU& u,
                                       const std::string& basis_id) {
  const CsvTable t = read_csv(in);
  const Eigen::Index m = count_prefixed(t, "c");
  if (m == 0 || count_prefixed(t, "cu") != m)
    fail(ErrorKind::Config, "coefficient CSV needs columns c1..cm and cu1..cum");
  FunctionalSample fs;
  fs.coeff_y = take_columns(t, "c", m);
  fs.coeff_yu = take_columns(t, "cu", m);
  fs.basis_id = basis_id;
  fs.u = u;
  fs.validate();
  return fs;
}

void write_basis_csv(std::ostream& out, const GridBasis& b) {
  std::vector<std::string> header{"grid", "weight"};
  const auto phis = numbered("phi", b.basis.cols());
  header.insert(header.end(), phis.begin(), phis.end());
  Matrix all(b.grid.size(), 2 + b.basis.cols());
  all << b.grid, b.weights, b.basis;
  write_csv(out, header, all);
}

GridBasis read_basis_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  GridBasis b;
  b.grid = t.values.col(static_cast<Eigen::Index>(find_column(t, "grid")));
  b.weights = t.values.col(static_cast<Eigen::Index>(find_column(t, "weight")));
  const Eigen::Index m = count_prefixed(t, "phi");
  if (m == 0) fail(ErrorKind::Config, "basis CSV needs columns phi1..phim");
  b.basis = take_columns(t, "phi", m);
  return b;
}

nlohmann::json subset_json(const SubsetU& u) { return u.indices(); }

nlohmann::json to_json(const IndexEstimate& est) {
  return {{"value", est.value},
          {"trace_cu", est.trace_cu},
          {"trace_sigma", est.trace_sigma},
          {"n", est.n},
          {"u", subset_json(est.u)}};
}

IndexEstimate index_estimate_from_json(const nlohmann::json& j) {
  IndexEstimate est;
  try {
    est.value = j.at("value").get<double>();
    est.trace_cu = j.at("trace_cu").get<double>();
    est.trace_sigma = j.at("trace_sigma").get<double>();
    est.n = j.at("n").get<std::size_t>();
    est.u = SubsetU(j.at("u").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed index estimate: ") + e.what());
  }
  return est;
}

nlohmann::json to_json(const CoverageReport& r) {
  return {{"model", r.model},       {"u", subset_json(r.u)},   {"N", r.n},
          {"reps", r.reps},         {"level", r.level},        {"coverage", r.coverage},
          {"mean_width", r.mean_width}, {"true_value", r.true_value}};
}

nlohmann::json to_json(const SampleSizePlan& plan) {
  return {{"t", plan.t},
          {"alpha", plan.alpha},
          {"V", plan.V},
          {"N_star", plan.n_star},
          {"bound_at_N_star", plan.bound_at_n_star}};
}

}  // namespace gsobol
