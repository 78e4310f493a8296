#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsobol/asymptotics.hpp"
#include "gsobol/concentration.hpp"
#include "gsobol/estimators.hpp"
#include "gsobol/functional.hpp"

namespace gsobol {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

// Numbers are written with %.17g so a read-back is bit-exact.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);
CsvTable read_csv(std::istream& in);

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count);

// Header x1..xp.
void write_inputs_csv(std::ostream& out, const Matrix& x);

// Columns y1..yk, yu1..yuk; one row per replicate.
void write_sample_csv(std::ostream& out, const PickFreezeSample& s);
PickFreezeSample read_sample_csv(std::istream& in, const SubsetU& u, const std::string& model_id);

// Columns c1..cm for Y followed by cu1..cum for Y^u.
void write_coefficients_csv(std::ostream& out, const FunctionalSample& fs);
FunctionalSample read_coefficients_csv(std::istream& in, const SubsetU& u,
                                       const std::string& basis_id);

// Basis specification: columns grid, weight, phi1..phim.
struct GridBasis {
  Vector grid;
  Vector weights;
  Matrix basis;
};
void write_basis_csv(std::ostream& out, const GridBasis& basis);
GridBasis read_basis_csv(std::istream& in);

nlohmann::json subset_json(const SubsetU& u);
nlohmann::json to_json(const IndexEstimate& est);
IndexEstimate index_estimate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CoverageReport& report);
nlohmann::json to_json(const SampleSizePlan& plan);

}  // namespace gsobol
