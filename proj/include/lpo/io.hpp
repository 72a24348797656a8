// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_IO_HPP
#define LPO_IO_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lpo/cp_tensor.hpp"
#include "lpo/kron_solver.hpp"
#include "lpo/mor.hpp"
#include "lpo/sim_bench.hpp"

namespace lpo {

/// CP vector as {"order", "dim", "rank", "factors": [...]}, one flat
/// column-major array of length dim*rank per slot.
nlohmann::json cp_to_json(const CpVector& w);
CpVector cp_from_json(const nlohmann::json& j);

/// Dense matrix as an array of row arrays.  matrix_from_json additionally
/// accepts a CSR object {"format": "csr", "rows", "cols", "indptr",
/// "indices", "data"} and densifies it.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// System file {"n", "m", "d", "A", "B", "outputs": [CP, ...]}; outputs[k-1]
/// holds the degree-k coefficient.  Extra keys (e.g. "provenance") are
/// ignored on load.
nlohmann::json system_to_json(const LPOSystem& sys);
LPOSystem system_from_json(const nlohmann::json& j);

/// Serialized energy-coefficient bundle: the coefficients plus the build
/// record needed to audit accuracy (per-degree quadrature level and ranks).
struct EnergyFile {
  std::map<int, CpVector> w;
  std::vector<CoefficientInfo> info;
  double tol = 1e-6;
  int ell_override = -1;  // -1 when the level was chosen automatically
};

/// {"dim", "coefficients": {"2": CP, ...}, "metadata": {"tol",
/// "ell_override", "per_degree": [{"k", "ell", "capped", "rhs_rank",
/// "rank"}, ...]}}.
nlohmann::json energy_to_json(const EnergyFile& file);
EnergyFile energy_from_json(const nlohmann::json& j);

/// Reduced model in the system schema (loadable by system_from_json) plus a
/// "provenance" block: method, r, bases V/W, Hankel values, ball radius and
/// optimizer summary for the energy method, and any warnings.
nlohmann::json reduced_to_json(const ReducedModel& model);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// CSV "t,y" (write_trajectory_csv) or "t,y,yhat,abs_err"
/// (write_comparison_csv), 17 significant digits per value.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_comparison_csv(const std::string& path, const Trajectory& reference,
                          const Trajectory& test);

/// Numeric CSV body (header skipped), one row per line.
Eigen::MatrixXd read_csv(const std::string& path);

}  // namespace lpo

#endif  // LPO_IO_HPP
