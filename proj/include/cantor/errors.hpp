#ifndef CANTOR_ERRORS_HPP
#define CANTOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cantor {

// Conditioning cylinder has measure zero.
struct ConditioningOnNull : std::runtime_error {
  explicit ConditioningOnNull(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested cylinder has measure zero where a positive one is required.
struct NullCylinder : std::runtime_error {
  explicit NullCylinder(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration or iteration budget exceeded.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver did not reach its tolerance.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

// Entropy has no closed form for this model family.
struct NoClosedForm : std::runtime_error {
  explicit NoClosedForm(const std::string& msg) : std::runtime_error(msg) {}
};

// Model violates a structural invariant (shapes, row sums, weights).
struct InvalidModel : std::runtime_error {
  explicit InvalidModel(const std::string& msg) : std::runtime_error(msg) {}
};

// Report files disagree on schema.
struct SchemaMismatch : std::runtime_error {
  explicit SchemaMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cantor

#endif
