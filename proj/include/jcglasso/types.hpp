#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace jcglasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using MatrixList = std::vector<Matrix>;

/// Failure categories. `to_string` gives the stable kebab-case tag that
/// prefixes every `Error::what()`.
enum class ErrorKind {
  InvalidParameters,
  ShapeError,
  InvalidRegion,
  ConditioningFailure,
  InvalidStats,
  DegenerateVariable,
  InvalidGrid,
  DegeneratePath,
  InvalidConfig,
  ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jcglasso
