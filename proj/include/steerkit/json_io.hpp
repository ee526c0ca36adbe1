#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "steerkit/expsim.hpp"
#include "steerkit/qmat.hpp"
#include "steerkit/steering.hpp"

namespace steerkit {

/// {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

/// Parses and validates a density-matrix JSON document. validate = false
/// skips the Hermiticity/trace/positivity checks (the matrix is symmetrized
/// and trace-normalized instead).
DensityMatrix density_matrix_from_json(const nlohmann::json& j, bool validate = true,
                                       double tolerance = DensityMatrix::kDefaultTolerance);

nlohmann::json bracket_to_json(const RadiusBracket& b);
nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json tomography_to_json(const TomographyResult& t);
nlohmann::json report_to_json(const ExperimentReport& r);

/// Region CSV: header p,r,verdict_ab,verdict_ba,label.
void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells);

/// Counts CSV: header outcome_a,outcome_b,counts with tokens X0..Z1.
void write_counts_csv(std::ostream& os, const CountsTable& counts);

/// Parses a counts CSV; every one of the 36 outcome pairs must appear exactly
/// once. Throws ParseError otherwise.
CountsTable read_counts_csv(std::istream& is);

} // namespace steerkit
