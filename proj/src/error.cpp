#include "icsa/error.hpp"

#include "icsa/types.hpp"

namespace icsa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::SingularScatter: return "SingularScatter";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DegenerateRow: return "DegenerateRow";
    case ErrorCode::InsufficientSubsetSize: return "InsufficientSubsetSize";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidColumnKind: return "InvalidColumnKind";
    case ErrorCode::UndefinedNormalization: return "UndefinedNormalization";
    case ErrorCode::EmptyOutlierSet: return "EmptyOutlierSet";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::ConditionNotMet: return "ConditionNotMet";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IngestError: return "IngestError";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularScatter:
    case ErrorCode::NotConverged:
    case ErrorCode::DegenerateRow:
    case ErrorCode::SingularDesign:
    case ErrorCode::DegenerateResponse:
    case ErrorCode::UndefinedRatio:
    case ErrorCode::UndefinedNormalization:
      return true;
    default:
      return false;
  }
}

IndexSet DataMatrix::binary_columns() const {
  IndexSet out;
  for (std::size_t j = 0; j < kinds.size(); ++j)
    if (kinds[j] == ColumnKind::Binary) out.push_back(j);
  return out;
}

DataMatrix DataMatrix::from_values(RowMatrix values) {
  DataMatrix d;
  d.values = std::move(values);
  for (Eigen::Index j = 0; j < d.values.cols(); ++j) d.names.push_back("x" + std::to_string(j + 1));
  d.kinds.assign(d.names.size(), ColumnKind::Numeric);
  return d;
}

}  // namespace icsa
