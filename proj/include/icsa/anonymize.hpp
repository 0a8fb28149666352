#pragma once

#include <string>
#include <vector>

#include "icsa/ics.hpp"
#include "icsa/rng.hpp"
#include "icsa/scatter.hpp"
#include "icsa/types.hpp"

namespace icsa {

// A named (S1, S2) pair. SA is (Identity, MeanCov).
struct Method {
  std::string name;
  ScatterSpec spec1;
  ScatterSpec spec2;
};

Method sa_method();
// One of: sa, i-i, ii-i, ii-ii, iii75-i, iii50-i, iii75-ii, iii50-ii, iii-iii.
// Throws InvalidSpec for anything else.
Method method_by_name(const std::string& name);
const std::vector<std::string>& method_names();

struct AnonymizationRequest {
  ScatterSpec spec1 = ScatterSpec::identity();
  ScatterSpec spec2 = ScatterSpec::mean_cov();
  IndexSet binary_columns;
  bool identity_permutations = false;  // test hook: Z* = Z

  static AnonymizationRequest from_method(const Method& m, IndexSet binary = {});
};

// Independently permutes each column. Column j (in order) uses Fisher-Yates:
// perm = 0..n-1; for i = n-1 down to 1, k = rng.uniform_index(i + 1),
// swap(perm[i], perm[k]); then out(i, j) = z(perm[i], j).
RowMatrix permute_columns(const RowMatrix& z, RngStream& rng);

// The k largest anonymized values become 1 where k is the count of ones in
// the original column; equal values favor the lower row index.
std::vector<double> rediscretize_binary(const std::vector<double>& anonymized,
                                        const std::vector<double>& original);

// Fits the latent model once and draws any number of anonymized copies.
class Anonymizer {
 public:
  Anonymizer(const RowMatrix& x, const AnonymizationRequest& request, RngStream& fit_rng);

  const IcsFit& fit() const { return fit_; }

  // Latent permutation and back-transform, before rediscretization.
  RowMatrix draw_continuous(RngStream& rng) const;
  RowMatrix draw(RngStream& rng) const;

 private:
  RowMatrix original_;
  AnonymizationRequest request_;
  IcsFit fit_;
};

// Fit and one draw, both from `rng`. Names and kinds carry over.
DataMatrix anonymize(const DataMatrix& x, const AnonymizationRequest& request, RngStream& rng);

}  // namespace icsa
