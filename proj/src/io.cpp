// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpo/errors.hpp"

namespace lpo {

namespace {

using nlohmann::json;

const json& require_key(const json& j, const char* key, const char* what) {
  if (!j.is_object())
    throw validation_error(std::string(what) + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end())
    throw validation_error(std::string(what) + ": missing key '" + key + "'");
  return *it;
}

int require_int(const json& j, const char* key, const char* what) {
  const json& v = require_key(j, key, what);
  if (!v.is_number_integer())
    throw validation_error(std::string(what) + ": key '" + key +
                           "' must be an integer");
  return v.get<int>();
}

double require_real(const json& j, const char* key, const char* what) {
  const json& v = require_key(j, key, what);
  if (!v.is_number())
    throw validation_error(std::string(what) + ": key '" + key +
                           "' must be a number");
  return v.get<double>();
}

std::vector<double> require_reals(const json& v, const char* what) {
  if (!v.is_array())
    throw validation_error(std::string(what) + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number())
      throw validation_error(std::string(what) + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Eigen::MatrixXd csr_from_json(const json& j) {
  const char* what = "matrix_from_json (csr)";
  const int rows = require_int(j, "rows", what);
  const int cols = require_int(j, "cols", what);
  if (rows < 0 || cols < 0)
    throw validation_error(std::string(what) + ": negative shape");
  const std::vector<double> indptr_raw =
      require_reals(require_key(j, "indptr", what), what);
  const std::vector<double> indices_raw =
      require_reals(require_key(j, "indices", what), what);
  const std::vector<double> data =
      require_reals(require_key(j, "data", what), what);
  if (indptr_raw.size() != static_cast<std::size_t>(rows) + 1)
    throw validation_error(std::string(what) + ": indptr must have rows+1 entries");
  if (indices_raw.size() != data.size())
    throw validation_error(std::string(what) + ": indices/data length mismatch");

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  std::size_t prev = 0;
  for (int i = 0; i < rows; ++i) {
    const auto lo = static_cast<std::size_t>(indptr_raw[i]);
    const auto hi = static_cast<std::size_t>(indptr_raw[i + 1]);
    if (lo != prev || hi < lo || hi > data.size())
      throw validation_error(std::string(what) + ": indptr is not a valid scan");
    prev = hi;
    for (std::size_t p = lo; p < hi; ++p) {
      const int c = static_cast<int>(indices_raw[p]);
      if (c < 0 || c >= cols)
        throw validation_error(std::string(what) + ": column index out of range");
      M(i, c) += data[p];
    }
  }
  if (prev != data.size())
    throw validation_error(std::string(what) + ": indptr does not cover all data");
  return M;
}

const char* method_name(ReductionMethod method) {
  switch (method) {
    case ReductionMethod::kBalancedTruncation:
      return "bt";
    case ReductionMethod::kQuadraticOutputBT:
      return "qobt";
    case ReductionMethod::kEnergyBased:
      return "energy";
  }
  return "unknown";
}

void append_number(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  line += buf;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw validation_error("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

json cp_to_json(const CpVector& w) {
  cp_validate(w);
  json factors = json::array();
  for (const Eigen::MatrixXd& f : w.factors)
    factors.push_back(std::vector<double>(f.data(), f.data() + f.size()));
  return json{{"order", w.order()},
              {"dim", w.dim()},
              {"rank", w.rank()},
              {"factors", std::move(factors)}};
}

CpVector cp_from_json(const json& j) {
  const char* what = "cp_from_json";
  const int order = require_int(j, "order", what);
  const int dim = require_int(j, "dim", what);
  const int rank = require_int(j, "rank", what);
  if (order < 1 || dim < 1 || rank < 0)
    throw validation_error(std::string(what) + ": need order >= 1, dim >= 1, rank >= 0");
  const json& factors = require_key(j, "factors", what);
  if (!factors.is_array() || factors.size() != static_cast<std::size_t>(order))
    throw validation_error(std::string(what) + ": need one factor array per slot");

  CpVector w;
  w.factors.reserve(order);
  for (const json& fj : factors) {
    const std::vector<double> flat = require_reals(fj, what);
    if (flat.size() != static_cast<std::size_t>(dim) * rank)
      throw validation_error(std::string(what) + ": factor has " +
                             std::to_string(flat.size()) + " entries, expected dim*rank = " +
                             std::to_string(static_cast<std::size_t>(dim) * rank));
    Eigen::MatrixXd f(dim, rank);
    if (rank > 0)
      f = Eigen::Map<const Eigen::MatrixXd>(flat.data(), dim, rank);
    w.factors.push_back(std::move(f));
  }
  return w;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (j.is_object()) {
    const json& fmt = require_key(j, "format", "matrix_from_json");
    if (!fmt.is_string() || fmt.get<std::string>() != "csr")
      throw validation_error("matrix_from_json: unknown matrix format, expected 'csr'");
    return csr_from_json(j);
  }
  if (!j.is_array())
    throw validation_error("matrix_from_json: expected row arrays or a csr object");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  std::vector<std::vector<double>> parsed;
  parsed.reserve(rows);
  for (const json& rj : j) parsed.push_back(require_reals(rj, "matrix_from_json"));
  const auto cols = static_cast<Eigen::Index>(parsed[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(parsed[i].size()) != cols)
      throw validation_error("matrix_from_json: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = parsed[i][k];
  }
  return M;
}

json system_to_json(const LPOSystem& sys) {
  json outputs = json::array();
  for (const CpVector& ck : sys.outputs) outputs.push_back(cp_to_json(ck));
  return json{{"n", sys.n()},       {"m", sys.m()},
              {"d", sys.d()},       {"A", matrix_to_json(sys.A)},
              {"B", matrix_to_json(sys.B)}, {"outputs", std::move(outputs)}};
}

LPOSystem system_from_json(const json& j) {
  const char* what = "system_from_json";
  const int n = require_int(j, "n", what);
  const int m = require_int(j, "m", what);
  const int d = require_int(j, "d", what);
  const Eigen::MatrixXd A = matrix_from_json(require_key(j, "A", what));
  const Eigen::MatrixXd B = matrix_from_json(require_key(j, "B", what));
  if (A.rows() != n || A.cols() != n)
    throw validation_error(std::string(what) + ": A is " + std::to_string(A.rows()) +
                           "x" + std::to_string(A.cols()) + ", file says n = " +
                           std::to_string(n));
  if (B.rows() != n || B.cols() != m)
    throw validation_error(std::string(what) + ": B shape does not match n, m");
  const json& outputs_json = require_key(j, "outputs", what);
  if (!outputs_json.is_array() || outputs_json.size() != static_cast<std::size_t>(d))
    throw validation_error(std::string(what) + ": need exactly d output coefficients");
  std::vector<CpVector> outputs;
  outputs.reserve(d);
  for (const json& cj : outputs_json) outputs.push_back(cp_from_json(cj));
  return make_lpo_system(A, B, std::move(outputs));
}

json energy_to_json(const EnergyFile& file) {
  if (file.w.empty())
    throw validation_error("energy_to_json: no coefficients to serialize");
  json coefficients = json::object();
  for (const auto& [k, wk] : file.w) coefficients[std::to_string(k)] = cp_to_json(wk);
  json per_degree = json::array();
  for (const CoefficientInfo& info : file.info)
    per_degree.push_back(json{{"k", info.k},
                              {"ell", info.ell},
                              {"capped", info.capped},
                              {"rhs_rank", info.rhs_rank},
                              {"rank", info.rank}});
  return json{{"dim", file.w.begin()->second.dim()},
              {"coefficients", std::move(coefficients)},
              {"metadata", json{{"tol", file.tol},
                                {"ell_override", file.ell_override},
                                {"per_degree", std::move(per_degree)}}}};
}

EnergyFile energy_from_json(const json& j) {
  const char* what = "energy_from_json";
  const int dim = require_int(j, "dim", what);
  const json& coefficients = require_key(j, "coefficients", what);
  if (!coefficients.is_object() || coefficients.empty())
    throw validation_error(std::string(what) + ": 'coefficients' must map degree to CP data");

  EnergyFile file;
  for (const auto& [key, value] : coefficients.items()) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw validation_error(std::string(what) + ": degree key '" + key +
                             "' is not an integer");
    }
    CpVector wk = cp_from_json(value);
    if (wk.order() != k)
      throw validation_error(std::string(what) + ": degree " + std::to_string(k) +
                             " entry has order " + std::to_string(wk.order()));
    if (wk.dim() != dim)
      throw validation_error(std::string(what) + ": coefficient dimension mismatch");
    file.w.emplace(k, std::move(wk));
  }

  const json& metadata = require_key(j, "metadata", what);
  file.tol = require_real(metadata, "tol", what);
  file.ell_override = require_int(metadata, "ell_override", what);
  const json& per_degree = require_key(metadata, "per_degree", what);
  if (!per_degree.is_array())
    throw validation_error(std::string(what) + ": 'per_degree' must be an array");
  for (const json& entry : per_degree) {
    CoefficientInfo info;
    info.k = require_int(entry, "k", what);
    info.ell = require_int(entry, "ell", what);
    const json& capped = require_key(entry, "capped", what);
    if (!capped.is_boolean())
      throw validation_error(std::string(what) + ": 'capped' must be a boolean");
    info.capped = capped.get<bool>();
    info.rhs_rank = require_int(entry, "rhs_rank", what);
    info.rank = require_int(entry, "rank", what);
    file.info.push_back(info);
  }
  return file;
}

json reduced_to_json(const ReducedModel& model) {
  json j = system_to_json(model.reduced);
  json provenance{{"method", method_name(model.method)},
                  {"r", model.r},
                  {"V", matrix_to_json(model.V)},
                  {"W", matrix_to_json(model.W)},
                  {"warnings", model.warnings}};
  if (model.hsv.size() > 0)
    provenance["hsv"] =
        std::vector<double>(model.hsv.data(), model.hsv.data() + model.hsv.size());
  if (model.method == ReductionMethod::kEnergyBased) {
    provenance["L"] = model.L;
    provenance["optimizer"] = json{{"iterations", model.optimizer.iterations},
                                   {"objective", model.optimizer.objective},
                                   {"grad_norm", model.optimizer.grad_norm},
                                   {"converged", model.optimizer.converged},
                                   {"stalled", model.optimizer.stalled}};
    json per_degree = json::array();
    for (const CoefficientInfo& info : model.coefficient_info)
      per_degree.push_back(json{{"k", info.k},
                                {"ell", info.ell},
                                {"capped", info.capped},
                                {"rhs_rank", info.rhs_rank},
                                {"rank", info.rank}});
    provenance["coefficients"] = std::move(per_degree);
  }
  j["provenance"] = std::move(provenance);
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw validation_error("cannot open '" + path + "' for reading");
  try {
    return json::parse(f);
  } catch (const json::parse_error& err) {
    throw validation_error("'" + path + "' is not valid JSON: " + err.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f = open_for_write(path);
  f << j.dump(2) << '\n';
  if (!f) throw validation_error("failed while writing '" + path + "'");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f = open_for_write(path);
  f << "t,y\n";
  std::string line;
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    line.clear();
    append_number(line, traj.times(i));
    line += ',';
    append_number(line, traj.outputs(i));
    line += '\n';
    f << line;
  }
  if (!f) throw validation_error("failed while writing '" + path + "'");
}

void write_comparison_csv(const std::string& path, const Trajectory& reference,
                          const Trajectory& test) {
  const ErrorMetrics metrics = error_metrics(reference, test);  // checks grids
  std::ofstream f = open_for_write(path);
  f << "t,y,yhat,abs_err\n";
  std::string line;
  for (Eigen::Index i = 0; i < reference.times.size(); ++i) {
    line.clear();
    append_number(line, reference.times(i));
    line += ',';
    append_number(line, reference.outputs(i));
    line += ',';
    append_number(line, test.outputs(i));
    line += ',';
    append_number(line, metrics.pointwise(i));
    line += '\n';
    f << line;
  }
  if (!f) throw validation_error("failed while writing '" + path + "'");
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw validation_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(f, line))
    throw validation_error("'" + path + "' is empty, expected a CSV header");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw validation_error("'" + path + "': malformed number on line " +
                               std::to_string(lineno));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw validation_error("'" + path + "': ragged row on line " +
                             std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd M(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index k = 0; k < M.cols(); ++k) M(i, k) = rows[i][k];
  return M;
}

}  // namespace lpo
