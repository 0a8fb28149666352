#pragma once

#include "icsa/rng.hpp"
#include "icsa/scatter.hpp"
#include "icsa/types.hpp"

namespace icsa {

struct IcsModel {
  Vector location;   // T(X)
  Matrix s1_inv_sqrt;
  Matrix s1_sqrt;
  Matrix rotation;   // eigenvectors of S2 on the standardized data
  Vector eigenvalues;
  ScatterSpec spec1;
  ScatterSpec spec2;

  std::size_t dim() const { return static_cast<std::size_t>(location.size()); }

  // (X - 1 T') S1^{-1/2} V
  RowMatrix transform(const RowMatrix& x) const;
  // Z V' S1^{1/2} + 1 T'
  RowMatrix back_transform(const RowMatrix& scores) const;
};

struct IcsFit {
  IcsModel model;
  RowMatrix scores;
};

// Errors raised by either scatter are rethrown with an "S1:" or "S2:" prefix
// and their original code.
IcsFit fit_ics(const RowMatrix& x, const ScatterSpec& spec1, const ScatterSpec& spec2,
               RngStream& rng);

RowMatrix back_transform(const RowMatrix& scores, const IcsModel& model);

}  // namespace icsa
