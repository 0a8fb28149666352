#include "icsa/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "icsa/csv.hpp"
#include "icsa/error.hpp"
#include "icsa/linalg.hpp"
#include "icsa/metrics.hpp"
#include "icsa/parallel.hpp"

namespace icsa {

RowMatrix ScenarioInstance::stacked() const {
  RowMatrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()) = y_contaminated;
  return out;
}

Vector scenario_beta(int p) {
  Vector beta(p);
  for (int j = 1; j <= p; ++j) beta(j - 1) = (j % 2 == 1 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(j));
  return beta;
}

std::size_t scenario2_outlier_count(int n) {
  return static_cast<std::size_t>(std::ceil(0.1 * n - 1e-9));
}

namespace {

constexpr double kDeltaSd = 0.4;

void fill_response(ScenarioInstance& s, RngStream& rng) {
  s.y_clean = s.x * s.beta;
  for (Eigen::Index i = 0; i < s.y_clean.size(); ++i) s.y_clean(i) += rng.normal();
  s.y_contaminated = s.y_clean;
}

}  // namespace

ScenarioInstance gen_scenario1(int n, int p, double kappa, RngStream& rng) {
  if (n < 2 || p < 1) throw Error(ErrorCode::InvalidDimension, "scenario 1 needs n >= 2 and p >= 1");
  ScenarioInstance s;
  s.beta = scenario_beta(p);
  s.sigma_eigenvalues.resize(p);
  for (int j = 0; j < p; ++j) s.sigma_eigenvalues(j) = p - j;
  s.sigma_rotation = Matrix::Identity(p, p);
  s.x.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) s.x(i, j) = std::sqrt(s.sigma_eigenvalues(j)) * rng.normal();
  fill_response(s, rng);
  s.outliers = {static_cast<std::size_t>(n - 1)};
  s.y_contaminated(n - 1) += kappa + kDeltaSd * rng.normal();
  return s;
}

ScenarioInstance gen_scenario2(int n, int p, double kappa, RngStream& rng) {
  if (n < 10 || p < 1) throw Error(ErrorCode::InvalidDimension, "scenario 2 needs n >= 10 and p >= 1");
  ScenarioInstance s;
  s.beta = scenario_beta(p);
  s.sigma_rotation = random_orthogonal(p, rng);
  std::vector<double> lambda(p);
  for (int j = 1; j <= p; ++j) lambda[j - 1] = static_cast<double>(p - j + 1) / p + rng.uniform(0.0, 0.05);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  s.sigma_eigenvalues = Eigen::Map<Vector>(lambda.data(), p);

  RowMatrix g(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  s.x = g * s.sigma_eigenvalues.cwiseSqrt().asDiagonal() * s.sigma_rotation.transpose();
  fill_response(s, rng);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i-- > 1;) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
  s.outliers.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(scenario2_outlier_count(n)));
  std::sort(s.outliers.begin(), s.outliers.end());
  for (std::size_t i : s.outliers)
    s.y_contaminated(static_cast<Eigen::Index>(i)) += kappa + kDeltaSd * rng.normal();
  return s;
}

ReplicationResult run_replication(const CellConfig& cell, const Method& method,
                                  RngStream& data_rng, RngStream& anon_rng,
                                  bool identity_permutations) {
  const ScenarioInstance inst = cell.scenario == 1 ? gen_scenario1(cell.n, cell.p, cell.kappa, data_rng)
                                                   : gen_scenario2(cell.n, cell.p, cell.kappa, data_rng);
  const RowMatrix data = inst.stacked();
  ReplicationResult result;
  try {
    AnonymizationRequest request = AnonymizationRequest::from_method(method);
    request.identity_permutations = identity_permutations;
    const Anonymizer anonymizer(data, request, anon_rng);
    const RowMatrix anon = anonymizer.draw(anon_rng);
    MetricsRecord rec;
    rec.ore = ore(data, anon, inst.outliers);
    const Vector beta_hat = ols(anon.leftCols(cell.p), anon.col(cell.p));
    rec.utility_distance = utility_distance(inst.beta, beta_hat);
    result.record = rec;
  } catch (const Error& e) {
    result.failure = e.what();
  }
  return result;
}

GridConfig GridConfig::full() {
  GridConfig g;
  g.scenarios = {1, 2};
  g.ns = {20, 40, 120, 240, 480};
  g.ps = {3, 7, 15, 31};
  g.kappas = {0, 2, 4, 8, 16};
  for (const auto& name : method_names()) g.methods.push_back(method_by_name(name));
  g.replications = 1000;
  return g;
}

GridConfig GridConfig::desk() {
  GridConfig g;
  g.scenarios = {1, 2};
  g.ns = {40, 120};
  g.ps = {3, 7};
  g.kappas = {0, 8, 16};
  for (const auto& name : method_names()) g.methods.push_back(method_by_name(name));
  g.replications = 50;
  return g;
}

namespace {

std::uint64_t kappa_bits(double kappa) { return std::bit_cast<std::uint64_t>(kappa); }

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t data_stream_id(const CellConfig& cell, std::size_t replication) {
  return stream_key(1, cell.scenario, cell.n, cell.p, kappa_bits(cell.kappa), replication);
}

std::uint64_t anon_stream_id(const CellConfig& cell, const std::string& method,
                             std::size_t replication) {
  return stream_key(2, cell.scenario, cell.n, cell.p, kappa_bits(cell.kappa), name_hash(method),
                    replication);
}

CellResult run_cell(const CellConfig& cell, const Method& method, int replications,
                    std::uint64_t seed, unsigned jobs) {
  std::vector<ReplicationResult> results(static_cast<std::size_t>(replications));
  parallel_for(results.size(), jobs, [&](std::size_t r) {
    RngStream data_rng(seed, data_stream_id(cell, r));
    RngStream anon_rng(seed, anon_stream_id(cell, method.name, r));
    results[r] = run_replication(cell, method, data_rng, anon_rng);
  });
  CellResult out;
  out.cell = cell;
  out.method = method.name;
  for (const auto& r : results) {
    if (r.record) {
      out.ore.push_back(r.record->ore);
      out.utility.push_back(r.record->utility_distance);
    } else {
      ++out.failures;
    }
  }
  return out;
}

std::vector<GridRow> summarize(const CellResult& result) {
  std::vector<GridRow> rows;
  const auto& c = result.cell;
  for (const auto& [metric, values] : {std::pair{"ore", &result.ore}, std::pair{"utility", &result.utility}}) {
    GridRow row{c.scenario, c.n, c.p, c.kappa, result.method, metric, std::nan(""), std::nan(""),
                std::nan(""), result.failures};
    if (!values->empty()) {
      row.median = median(*values);
      row.q1 = quantile(*values, 0.25);
      row.q3 = quantile(*values, 0.75);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<GridRow> run_grid(const GridConfig& cfg) {
  if (cfg.scenarios.empty() || cfg.ns.empty() || cfg.ps.empty() || cfg.kappas.empty() || cfg.methods.empty())
    throw Error(ErrorCode::InvalidSpec, "empty simulation grid");
  std::vector<GridRow> rows;
  for (int scenario : cfg.scenarios)
    for (int n : cfg.ns)
      for (int p : cfg.ps)
        for (double kappa : cfg.kappas)
          for (const Method& m : cfg.methods) {
            const CellConfig cell{scenario, n, p, kappa};
            const auto summary = summarize(run_cell(cell, m, cfg.replications, cfg.seed, cfg.jobs));
            rows.insert(rows.end(), summary.begin(), summary.end());
          }
  return rows;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << kGridCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.n << ',' << r.p << ',' << format_double(r.kappa) << ',' << r.method << ','
        << r.metric << ',' << format_double(r.median) << ',' << format_double(r.q1) << ','
        << format_double(r.q3) << ',' << r.failures << '\n';
  }
  return out.str();
}

}  // namespace icsa
