#include "icsa/ics.hpp"

#include "icsa/error.hpp"
#include "icsa/linalg.hpp"

namespace icsa {

namespace {

template <class Fn>
auto staged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.message());
  }
}

}  // namespace

RowMatrix IcsModel::transform(const RowMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim())
    throw Error(ErrorCode::ShapeError, "column count does not match the fitted model");
  return (x.rowwise() - location.transpose()) * s1_inv_sqrt * rotation;
}

RowMatrix IcsModel::back_transform(const RowMatrix& scores) const {
  if (static_cast<std::size_t>(scores.cols()) != dim())
    throw Error(ErrorCode::ShapeError, "score column count does not match the fitted model");
  RowMatrix out = scores * rotation.transpose() * s1_sqrt;
  out.rowwise() += location.transpose();
  return out;
}

RowMatrix back_transform(const RowMatrix& scores, const IcsModel& model) {
  return model.back_transform(scores);
}

IcsFit fit_ics(const RowMatrix& x, const ScatterSpec& spec1, const ScatterSpec& spec2,
               RngStream& rng) {
  IcsFit fit;
  IcsModel& m = fit.model;
  m.spec1 = spec1;
  m.spec2 = spec2;

  const ScatterEstimate first = staged("S1", [&] { return estimate(x, spec1, rng); });
  m.location = first.location;
  m.s1_inv_sqrt = staged("S1", [&] { return sym_pow(first.scatter, SymPower::InvSqrt, RankTest::ScaleFree); });
  m.s1_sqrt = sym_pow(first.scatter, SymPower::Sqrt, RankTest::ScaleFree);

  const RowMatrix standardized = (x.rowwise() - m.location.transpose()) * m.s1_inv_sqrt;
  const ScatterEstimate second = staged("S2", [&] { return estimate(standardized, spec2, rng); });
  const EigenPair eig = staged("S2", [&] {
    sym_pow(second.scatter, SymPower::InvSqrt, RankTest::ScaleFree);  // positive definiteness check
    return sym_eigen(second.scatter);
  });
  m.rotation = eig.vectors;
  m.eigenvalues = eig.values;
  fit.scores = standardized * m.rotation;
  return fit;
}

}  // namespace icsa
