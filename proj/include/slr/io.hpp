#pragma once

// File formats.
//
//   matrix     dense CSV, one row per line, or JSON {"dim": d, "rows": [[...], ...]}
//   dataset    one 0/1 string per line ("0110"), or CSV of 0/1 integers ("0,1,1,0")
//   model      JSON {"S": matrix, "R": {"rows": ...}, "Lambda": matrix}
//
// Numbers are written in shortest round-trip form, so write → read is exact
// and repeated runs produce identical bytes.

#include "slr/binary_dataset.hpp"
#include "slr/geometry.hpp"
#include "slr/latent_cg.hpp"
#include "slr/maxent.hpp"
#include "slr/solver.hpp"
#include "slr/symmetric_matrix.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace slr::io {

using Json = nlohmann::ordered_json;

/// Malformed input. `field()` names the offending key or location.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

std::string format_number(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

// Matrices ------------------------------------------------------------------

Json matrix_to_json(const SymMat& m);
Json matrix_to_json(const Eigen::MatrixXd& m);
SymMat symmetric_from_json(const Json& j, const std::string& field);
Eigen::MatrixXd dense_from_json(const Json& j, const std::string& field);

std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd dense_from_csv(const std::string& text, const std::string& field = "matrix");

/// Reads JSON when the first non-space character is '{', CSV otherwise.
SymMat read_symmetric(const std::filesystem::path& path);

// Datasets ------------------------------------------------------------------

enum class DatasetFormat { Lines, Csv };

std::string dataset_to_text(const BinaryDataset& data, DatasetFormat format);
/// Accepts either format; the row width fixes d.
BinaryDataset dataset_from_text(const std::string& text);

// Model ---------------------------------------------------------------------

Json model_to_json(const LatentCGModel& model);
LatentCGModel model_from_json(const Json& j);

// Solver --------------------------------------------------------------------

/// Unknown keys and wrongly typed values raise ValidationError.
SolverConfig solver_config_from_json(const Json& j, const std::string& prefix = "solver");
Json solver_config_to_json(const SolverConfig& config);
Json kkt_to_json(const KktReport& kkt);
Json solver_result_to_json(const SolverResult& result, double lambda_n, double gamma);
std::string path_to_csv(const std::vector<double>& lambdas, double gamma, const std::vector<SolverResult>& path);

// Diagnostics ---------------------------------------------------------------

Json stability_to_json(const StabilityEstimates& est);
Json gamma_range_to_json(const GammaRange& g);
Json gap_check_to_json(const GapCheck& g);
Json mu_to_json(const MuOmega& mu);
Json duality_report_to_json(const DualityReport& rep);
Json dual_kkt_to_json(const DualKkt& kkt);

// Typed field access for config parsing ------------------------------------

/// Throws ValidationError if `j` has a key outside `allowed`.
void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& prefix);
double get_number(const Json& j, const std::string& key, const std::string& prefix);
long long get_integer(const Json& j, const std::string& key, const std::string& prefix);
bool get_bool(const Json& j, const std::string& key, const std::string& prefix);

}  // namespace slr::io
