#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icsa/anonymize.hpp"
#include "icsa/rng.hpp"
#include "icsa/types.hpp"

namespace icsa {

struct ScenarioInstance {
  RowMatrix x;
  Vector y_clean;
  Vector y_contaminated;
  IndexSet outliers;  // ascending
  Vector beta;
  Vector sigma_eigenvalues;  // diagonal of Lambda (scenario 2) or of Sigma (scenario 1)
  Matrix sigma_rotation;     // Q (scenario 2), identity for scenario 1

  // (X, y~) as one p + 1 column matrix.
  RowMatrix stacked() const;
};

// beta_j = (-1)^{j+1} / sqrt(j), j = 1..p
Vector scenario_beta(int p);

// X ~ N(0, diag(p, ..., 1)), single response outlier in the last row.
ScenarioInstance gen_scenario1(int n, int p, double kappa, RngStream& rng);
// X ~ N(0, Q Lambda Q'), response outliers on ceil(0.1 n) random rows.
ScenarioInstance gen_scenario2(int n, int p, double kappa, RngStream& rng);

std::size_t scenario2_outlier_count(int n);

struct CellConfig {
  int scenario = 1;
  int n = 40;
  int p = 3;  // features; the anonymized data has p + 1 columns
  double kappa = 0;
};

struct MetricsRecord {
  double ore = 0;
  double utility_distance = 0;
};

struct ReplicationResult {
  std::optional<MetricsRecord> record;  // empty on failure
  std::string failure;
};

// Data come from `data_rng`, latent fit and permutations from `anon_rng`.
ReplicationResult run_replication(const CellConfig& cell, const Method& method,
                                  RngStream& data_rng, RngStream& anon_rng,
                                  bool identity_permutations = false);

struct GridConfig {
  std::vector<int> scenarios{1};
  std::vector<int> ns{40};
  std::vector<int> ps{3};
  std::vector<double> kappas{16};
  std::vector<Method> methods;
  int replications = 200;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  // n in {20,40,120,240,480}, p + 1 in {4,8,16,32}, kappa in {0,2,4,8,16},
  // 1000 replications.
  static GridConfig full();
  // n in {40,120}, p + 1 in {4,8}, kappa in {0,8,16}, 50 replications.
  static GridConfig desk();
};

struct CellResult {
  CellConfig cell;
  std::string method;
  std::vector<double> ore;      // successful replications, replication order
  std::vector<double> utility;
  std::size_t failures = 0;
};

// Stream ids: data stream = key(scenario, n, p, kappa, replication) and
// anonymization stream = key(scenario, n, p, kappa, method name hash,
// replication), so every method sees the same datasets.
std::uint64_t data_stream_id(const CellConfig& cell, std::size_t replication);
std::uint64_t anon_stream_id(const CellConfig& cell, const std::string& method,
                             std::size_t replication);

CellResult run_cell(const CellConfig& cell, const Method& method, int replications,
                    std::uint64_t seed, unsigned jobs);

struct GridRow {
  int scenario, n, p;
  double kappa;
  std::string method;
  std::string metric;  // "ore" | "utility"
  double median, q1, q3;
  std::size_t failures;
};

std::vector<GridRow> summarize(const CellResult& result);
std::vector<GridRow> run_grid(const GridConfig& cfg);

inline constexpr const char* kGridCsvHeader = "scenario,n,p,kappa,method,metric,median,q1,q3,failures";
std::string grid_csv(const std::vector<GridRow>& rows);

}  // namespace icsa
