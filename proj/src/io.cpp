#include "slr/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace slr::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
}

namespace {

Json rows_of(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_double(const std::string& token, const std::string& field) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw ValidationError(field, "not a number: '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

}  // namespace

Json matrix_to_json(const SymMat& m) {
  Json j;
  j["dim"] = m.dim();
  j["rows"] = rows_of(m.matrix());
  return j;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json j;
  j["rows"] = rows_of(m);
  return j;
}

Eigen::MatrixXd dense_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("rows")) throw ValidationError(field, "expected an object with \"rows\"");
  const Json& rows = j.at("rows");
  if (!rows.is_array() || rows.empty()) throw ValidationError(field + ".rows", "expected a non-empty array");
  const std::size_t cols = rows.at(0).is_array() ? rows.at(0).size() : 0;
  if (cols == 0) throw ValidationError(field + ".rows", "rows must be non-empty arrays");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    const std::string where = field + ".rows[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != cols) throw ValidationError(where, "ragged row");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number()) throw ValidationError(where, "non-numeric entry");
      m(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
    }
  }
  return m;
}

SymMat symmetric_from_json(const Json& j, const std::string& field) {
  const Eigen::MatrixXd m = dense_from_json(j, field);
  if (m.rows() != m.cols()) throw ValidationError(field, "matrix is not square");
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer() || j.at("dim").get<long long>() != m.rows()) {
      throw ValidationError(field + ".dim", "does not match the number of rows");
    }
  }
  try {
    return SymMat::from(m);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(field, e.what());
  }
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd dense_from_csv(const std::string& text, const std::string& field) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw ValidationError(field, "empty matrix");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<double> row;
    for (const auto& tok : split(lines[i], ',')) row.push_back(to_double(tok, field + " line " + std::to_string(i + 1)));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError(field + " line " + std::to_string(i + 1), "ragged row");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  return m;
}

SymMat read_symmetric(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ValidationError(path.string(), e.what());
    }
    return symmetric_from_json(j, path.string());
  }
  const Eigen::MatrixXd m = dense_from_csv(text, path.string());
  if (m.rows() != m.cols()) throw ValidationError(path.string(), "matrix is not square");
  try {
    return SymMat::from(m);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path.string(), e.what());
  }
}

std::string dataset_to_text(const BinaryDataset& data, DatasetFormat format) {
  std::string out;
  const auto d = static_cast<std::size_t>(data.dim());
  out.reserve(data.count() * (format == DatasetFormat::Lines ? d + 1 : 2 * d));
  for (State s : data.states()) {
    for (int i = 0; i < data.dim(); ++i) {
      if (format == DatasetFormat::Csv && i > 0) out += ',';
      out += bit(s, i) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

BinaryDataset dataset_from_text(const std::string& text) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw ValidationError("dataset", "no samples");
  const bool csv = lines.front().find(',') != std::string::npos;
  std::optional<BinaryDataset> data;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string where = "dataset line " + std::to_string(k + 1);
    BitVector x;
    if (csv) {
      for (const auto& tok : split(lines[k], ',')) {
        const double v = to_double(tok, where);
        if (v != 0.0 && v != 1.0) throw ValidationError(where, "entries must be 0 or 1");
        x.push_back(static_cast<std::uint8_t>(v));
      }
    } else {
      for (char ch : lines[k]) {
        if (ch == ' ' || ch == '\t') continue;
        if (ch != '0' && ch != '1') throw ValidationError(where, "entries must be 0 or 1");
        x.push_back(static_cast<std::uint8_t>(ch - '0'));
      }
    }
    if (!data) {
      if (x.empty() || x.size() > static_cast<std::size_t>(kMaxPackedDim)) {
        throw ValidationError(where, "row width must be in [1, 64]");
      }
      data.emplace(static_cast<int>(x.size()));
      data->reserve(lines.size());
    }
    if (static_cast<int>(x.size()) != data->dim()) throw ValidationError(where, "row width differs from first row");
    data->push_back(x);
  }
  return *data;
}

Json model_to_json(const LatentCGModel& model) {
  Json j;
  j["S"] = matrix_to_json(model.s());
  j["R"] = matrix_to_json(model.r());
  j["Lambda"] = matrix_to_json(model.lambda());
  return j;
}

LatentCGModel model_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("model", "expected an object");
  check_keys(j, {"S", "R", "Lambda"}, "model");
  for (const char* key : {"S", "R", "Lambda"}) {
    if (!j.contains(key)) throw ValidationError(std::string("model.") + key, "missing");
  }
  SymMat s = symmetric_from_json(j.at("S"), "model.S");
  Eigen::MatrixXd r = dense_from_json(j.at("R"), "model.R");
  SymMat lambda = symmetric_from_json(j.at("Lambda"), "model.Lambda");
  try {
    return LatentCGModel(std::move(s), std::move(r), std::move(lambda));
  } catch (const std::invalid_argument& e) {
    throw ValidationError("model", e.what());
  }
}

void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError(prefix, "expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ValidationError(prefix + "." + item.key(), "unknown field");
    }
  }
}

double get_number(const Json& j, const std::string& key, const std::string& prefix) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(prefix + "." + key, "expected a number");
  return v.get<double>();
}

long long get_integer(const Json& j, const std::string& key, const std::string& prefix) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(prefix + "." + key, "expected an integer");
  return v.get<long long>();
}

bool get_bool(const Json& j, const std::string& key, const std::string& prefix) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ValidationError(prefix + "." + key, "expected a boolean");
  return v.get<bool>();
}

SolverConfig solver_config_from_json(const Json& j, const std::string& prefix) {
  check_keys(j,
             {"max_iterations", "rel_objective_tol", "kkt_tol", "initial_step", "backtracking_factor",
              "acceleration", "penalize_diagonal"},
             prefix);
  SolverConfig c;
  if (j.contains("max_iterations")) c.max_iterations = static_cast<int>(get_integer(j, "max_iterations", prefix));
  if (j.contains("rel_objective_tol")) c.rel_objective_tol = get_number(j, "rel_objective_tol", prefix);
  if (j.contains("kkt_tol")) c.kkt_tol = get_number(j, "kkt_tol", prefix);
  if (j.contains("initial_step")) c.initial_step = get_number(j, "initial_step", prefix);
  if (j.contains("backtracking_factor")) c.backtracking_factor = get_number(j, "backtracking_factor", prefix);
  if (j.contains("acceleration")) c.acceleration = get_bool(j, "acceleration", prefix);
  if (j.contains("penalize_diagonal")) c.penalize_diagonal = get_bool(j, "penalize_diagonal", prefix);
  if (c.max_iterations < 1) throw ValidationError(prefix + ".max_iterations", "must be >= 1");
  if (!(c.rel_objective_tol > 0)) throw ValidationError(prefix + ".rel_objective_tol", "must be > 0");
  if (!(c.kkt_tol > 0)) throw ValidationError(prefix + ".kkt_tol", "must be > 0");
  if (!(c.initial_step > 0)) throw ValidationError(prefix + ".initial_step", "must be > 0");
  if (!(c.backtracking_factor > 0 && c.backtracking_factor < 1)) {
    throw ValidationError(prefix + ".backtracking_factor", "must be in (0, 1)");
  }
  return c;
}

Json solver_config_to_json(const SolverConfig& c) {
  Json j;
  j["max_iterations"] = c.max_iterations;
  j["rel_objective_tol"] = c.rel_objective_tol;
  j["kkt_tol"] = c.kkt_tol;
  j["initial_step"] = c.initial_step;
  j["backtracking_factor"] = c.backtracking_factor;
  j["acceleration"] = c.acceleration;
  j["penalize_diagonal"] = c.penalize_diagonal;
  return j;
}

Json kkt_to_json(const KktReport& k) {
  Json j;
  j["omega_residual"] = k.omega_residual;
  j["omega_perp_slack"] = k.omega_perp_slack;
  j["t_residual"] = k.t_residual;
  j["t_perp_slack"] = k.t_perp_slack;
  j["t_perp_slack_psd"] = k.t_perp_slack_psd;
  j["strictly_dual_feasible"] = k.strictly_dual_feasible;
  j["optimal"] = k.optimal;
  j["support_size"] = k.support_size;
  j["rank"] = k.rank;
  return j;
}

Json solver_result_to_json(const SolverResult& r, double lambda_n, double gamma) {
  Json j;
  j["lambda"] = lambda_n;
  j["gamma"] = gamma;
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["S"] = matrix_to_json(r.estimate.s());
  j["L"] = matrix_to_json(r.estimate.l());
  j["kkt"] = kkt_to_json(r.kkt);
  return j;
}

std::string path_to_csv(const std::vector<double>& lambdas, double gamma, const std::vector<SolverResult>& path) {
  if (lambdas.size() != path.size()) throw std::invalid_argument("path_to_csv: size mismatch");
  std::string out = "lambda,gamma,objective,iterations,converged,support_size,rank,kkt_optimal\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& r = path[k];
    out += format_number(lambdas[k]) + ',' + format_number(gamma) + ',' + format_number(r.objective) + ',' +
           std::to_string(r.iterations) + ',' + (r.converged ? "1" : "0") + ',' +
           std::to_string(r.kkt.support_size) + ',' + std::to_string(r.kkt.rank) + ',' +
           (r.kkt.optimal ? "1" : "0") + '\n';
  }
  return out;
}

Json stability_to_json(const StabilityEstimates& e) {
  Json j;
  j["alpha_omega"] = e.alpha_omega;
  j["alpha_t"] = e.alpha_t;
  j["delta_omega"] = e.delta_omega;
  j["delta_t"] = e.delta_t;
  j["beta_omega"] = e.beta_omega;
  j["beta_t"] = e.beta_t;
  j["alpha"] = e.alpha();
  j["delta"] = e.delta();
  j["beta"] = e.beta();
  j["epsilon"] = e.epsilon;
  j["sample_count"] = e.sample_count;
  j["heuristic"] = e.heuristic;
  j["method"] = e.method_note;
  return j;
}

Json gamma_range_to_json(const GammaRange& g) {
  Json j;
  j["gamma_min"] = g.gamma_min;
  j["gamma_max"] = g.gamma_max;
  j["feasible"] = g.feasible;
  j["mu_xi"] = g.product;
  j["mu_xi_bound"] = g.product_bound;
  return j;
}

Json gap_check_to_json(const GapCheck& g) {
  Json j;
  j["s_ok"] = g.s_ok;
  j["sigma_ok"] = g.sigma_ok;
  j["s_min"] = g.s_min;
  j["sigma_min"] = g.sigma_min;
  j["s_threshold"] = g.s_threshold;
  j["sigma_threshold"] = g.sigma_threshold;
  j["s_vacuous"] = g.s_vacuous;
  j["sigma_vacuous"] = g.sigma_vacuous;
  return j;
}

Json mu_to_json(const MuOmega& mu) {
  Json j;
  j["exact"] = mu.exact ? Json(*mu.exact) : Json(nullptr);
  j["lower"] = mu.lower;
  j["upper"] = mu.upper;
  return j;
}

Json dual_kkt_to_json(const DualKkt& k) {
  Json j;
  j["s_residual"] = k.s_residual;
  j["s_slack"] = k.s_slack;
  j["l1_residual"] = k.l1_residual;
  j["l1_slack"] = k.l1_slack;
  j["l2_residual"] = k.l2_residual;
  j["l2_slack"] = k.l2_slack;
  return j;
}

Json duality_report_to_json(const DualityReport& r) {
  Json j;
  j["one_sided"] = r.one_sided;
  j["entropy"] = r.entropy;
  j["dual_objective"] = r.dual_objective;
  j["gap"] = r.gap;
  j["lagrangian_correction"] = r.lagrangian_correction;
  j["inf_violation"] = r.residuals.inf_violation;
  j["spec_violation"] = r.residuals.spec_violation;
  j["one_sided_violation"] = r.residuals.one_sided_violation;
  j["slackness_s"] = r.slackness_s;
  j["slackness_l1"] = r.slackness_l1;
  j["slackness_l2"] = r.slackness_l2;
  j["converged"] = r.converged;
  return j;
}

}  // namespace slr::io
