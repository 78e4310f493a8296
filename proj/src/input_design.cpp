#include "gsobol/input_design.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gsobol/errors.hpp"
#include "gsobol/rng.hpp"

namespace gsobol {

namespace {

void validate(const Distribution& d) {
  if (const auto* u = std::get_if<Uniform>(&d)) {
    if (!(std::isfinite(u->lo) && std::isfinite(u->hi) && u->lo < u->hi)) {
      std::ostringstream msg;
      msg << "uniform distribution requires finite lo < hi, got [" << u->lo
          << ", " << u->hi << "]";
      fail(ErrorKind::Config, msg.str());
    }
  }
}

void fill_column(const Distribution& d, Stream stream, Eigen::Ref<Vector> col) {
  if (std::holds_alternative<StandardGaussian>(d)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = normal(stream);
  } else {
    const auto& u = std::get<Uniform>(d);
    const double width = u.hi - u.lo;
    for (Eigen::Index i = 0; i < col.size(); ++i)
      col[i] = u.lo + width * stream.uniform01();
  }
}

}  // namespace

std::string describe(const Distribution& d) {
  if (std::holds_alternative<StandardGaussian>(d)) return "gaussian";
  const auto& u = std::get<Uniform>(d);
  std::ostringstream out;
  out << "uniform[" << u.lo << "," << u.hi << "]";
  return out.str();
}

InputSpec::InputSpec(std::vector<Distribution> dists) : dists_(std::move(dists)) {
  if (dists_.empty()) fail(ErrorKind::Config, "input spec needs at least one input");
  for (const auto& d : dists_) validate(d);
}

InputSpec InputSpec::iid(std::size_t p, const Distribution& d) {
  return InputSpec(std::vector<Distribution>(p, d));
}

SubsetU::SubsetU(std::initializer_list<int> indices)
    : SubsetU(std::vector<int>(indices)) {}

SubsetU::SubsetU(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    fail(ErrorKind::Domain, "subset contains a repeated index");
  if (!indices_.empty() && indices_.front() < 1)
    fail(ErrorKind::Domain, "subset indices are 1-based");
}

SubsetU SubsetU::parse(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "cannot parse subset index '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      fail(ErrorKind::Config, "cannot parse subset index '" + item + "'");
    out.push_back(v);
  }
  return SubsetU(std::move(out));
}

SubsetU SubsetU::full(std::size_t p) {
  std::vector<int> all(p);
  for (std::size_t j = 0; j < p; ++j) all[j] = static_cast<int>(j + 1);
  return SubsetU(std::move(all));
}

bool SubsetU::contains_column(std::size_t j) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(),
                            static_cast<int>(j + 1));
}

void SubsetU::validate(std::size_t p) const {
  for (int i : indices_) {
    if (i < 1 || static_cast<std::size_t>(i) > p) {
      fail(ErrorKind::Domain, "subset index " + std::to_string(i) +
                                  " outside {1.." + std::to_string(p) + "}");
    }
  }
}

SubsetU SubsetU::complement(std::size_t p) const {
  validate(p);
  std::vector<int> rest;
  for (std::size_t j = 0; j < p; ++j)
    if (!contains_column(j)) rest.push_back(static_cast<int>(j + 1));
  return SubsetU(std::move(rest));
}

SubsetU SubsetU::united(const SubsetU& other) const {
  std::vector<int> all;
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(all));
  return SubsetU(std::move(all));
}

std::string SubsetU::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(indices_[i]);
  }
  return out;
}

Matrix sample_inputs(const InputSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Domain, "sample_inputs needs n >= 1");
  const auto p = spec.dimension();
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j)
    fill_column(spec[j], Stream(stream_key(seed, "base", j)),
                x.col(static_cast<Eigen::Index>(j)));
  return x;
}

PickFreezeDesign pick_freeze_design(const InputSpec& spec, const SubsetU& u,
                                    const DesignConfig& cfg) {
  if (cfg.n_replicates < 2)
    fail(ErrorKind::Domain, "pick-freeze design needs N >= 2");
  u.validate(spec.dimension());
  PickFreezeDesign design;
  design.x = sample_inputs(spec, cfg.n_replicates, cfg.seed);
  design.x_prime = design.x;
  for (std::size_t j = 0; j < spec.dimension(); ++j) {
    if (u.contains_column(j)) continue;
    fill_column(spec[j], Stream(stream_key(cfg.seed, "prime", j)),
                design.x_prime.col(static_cast<Eigen::Index>(j)));
  }
  return design;
}

}  // namespace gsobol
