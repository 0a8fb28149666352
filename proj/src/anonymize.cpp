#include "icsa/anonymize.hpp"

#include <algorithm>
#include <numeric>

#include "icsa/error.hpp"

namespace icsa {

Method sa_method() { return {"sa", ScatterSpec::identity(), ScatterSpec::mean_cov()}; }

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"sa",      "i-i",      "ii-i",     "ii-ii",  "iii75-i",
                                              "iii50-i", "iii75-ii", "iii50-ii", "iii-iii"};
  return names;
}

Method method_by_name(const std::string& name) {
  using S = ScatterSpec;
  if (name == "sa") return sa_method();
  if (name == "i-i") return {name, S::mean_cov(), S::cov4()};
  if (name == "ii-i") return {name, S::hr(), S::mean_cov()};
  if (name == "ii-ii") return {name, S::hr(), S::tyler()};
  if (name == "iii75-i") return {name, S::mcd(0.75), S::mean_cov()};
  if (name == "iii50-i") return {name, S::mcd(0.5), S::mean_cov()};
  if (name == "iii75-ii") return {name, S::mcd(0.75), S::hr()};
  if (name == "iii50-ii") return {name, S::mcd(0.5), S::hr()};
  if (name == "iii-iii") return {name, S::mcd(0.5), S::mcd(0.75)};
  throw Error(ErrorCode::InvalidSpec, "unknown method '" + name + "'");
}

AnonymizationRequest AnonymizationRequest::from_method(const Method& m, IndexSet binary) {
  AnonymizationRequest r;
  r.spec1 = m.spec1;
  r.spec2 = m.spec2;
  r.binary_columns = std::move(binary);
  return r;
}

RowMatrix permute_columns(const RowMatrix& z, RngStream& rng) {
  const std::size_t n = static_cast<std::size_t>(z.rows());
  RowMatrix out(z.rows(), z.cols());
  std::vector<std::size_t> perm(n);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i-- > 1;) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    for (std::size_t i = 0; i < n; ++i)
      out(static_cast<Eigen::Index>(i), j) = z(static_cast<Eigen::Index>(perm[i]), j);
  }
  return out;
}

std::vector<double> rediscretize_binary(const std::vector<double>& anonymized,
                                        const std::vector<double>& original) {
  if (anonymized.size() != original.size())
    throw Error(ErrorCode::ShapeError, "column lengths differ");
  std::size_t ones = 0;
  for (double v : original) {
    if (v != 0.0 && v != 1.0) throw Error(ErrorCode::InvalidColumnKind, "original column is not binary");
    ones += v == 1.0;
  }
  std::vector<std::size_t> order(anonymized.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return anonymized[a] > anonymized[b]; });
  std::vector<double> out(anonymized.size(), 0.0);
  for (std::size_t k = 0; k < ones; ++k) out[order[k]] = 1.0;
  return out;
}

Anonymizer::Anonymizer(const RowMatrix& x, const AnonymizationRequest& request, RngStream& fit_rng)
    : original_(x), request_(request) {
  for (std::size_t j : request_.binary_columns) {
    if (j >= static_cast<std::size_t>(x.cols()))
      throw Error(ErrorCode::InvalidColumnKind, "binary column index out of range");
    const auto col = x.col(static_cast<Eigen::Index>(j));
    if (!col.unaryExpr([](double v) { return v == 0.0 || v == 1.0; }).all())
      throw Error(ErrorCode::InvalidColumnKind, "column " + std::to_string(j) + " is not binary");
  }
  fit_ = fit_ics(x, request_.spec1, request_.spec2, fit_rng);
}

RowMatrix Anonymizer::draw_continuous(RngStream& rng) const {
  if (request_.identity_permutations) return fit_.model.back_transform(fit_.scores);
  return fit_.model.back_transform(permute_columns(fit_.scores, rng));
}

RowMatrix Anonymizer::draw(RngStream& rng) const {
  RowMatrix out = draw_continuous(rng);
  const Eigen::Index n = out.rows();
  for (std::size_t j : request_.binary_columns) {
    const auto c = static_cast<Eigen::Index>(j);
    std::vector<double> anon(n), orig(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      anon[i] = out(i, c);
      orig[i] = original_(i, c);
    }
    const std::vector<double> bin = rediscretize_binary(anon, orig);
    for (Eigen::Index i = 0; i < n; ++i) out(i, c) = bin[i];
  }
  return out;
}

DataMatrix anonymize(const DataMatrix& x, const AnonymizationRequest& request, RngStream& rng) {
  const Anonymizer anonymizer(x.values, request, rng);
  DataMatrix out;
  out.values = anonymizer.draw(rng);
  out.names = x.names;
  out.kinds = x.kinds;
  return out;
}

}  // namespace icsa
