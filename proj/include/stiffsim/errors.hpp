#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stiffsim {

// The Padé denominator could not be factored; the order is too low for the
// norm of the (scaled) argument.
class SingularDenominatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMassMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The integrated state became non-finite or left the bounded region.
class IntegrationDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The reference run used as ground truth did not stay bounded.
class GroundTruthDivergedError : public IntegrationDivergedError {
 public:
  using IntegrationDivergedError::IntegrationDivergedError;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace stiffsim
