#pragma once

#include <stdexcept>
#include <string>

namespace podfv {

/// Base class for every error raised by the library. The category maps onto
/// the CLI exit codes.
class Error : public std::runtime_error {
public:
  enum class Category { InvalidArgument, MissingInput, StaleArtifact, Dimension, SolverFailure };

  Error(Category category, const std::string& what) : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

private:
  Category category_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(Category::InvalidArgument, what) {}
};

struct MissingInput : Error {
  explicit MissingInput(const std::string& what) : Error(Category::MissingInput, what) {}
};

struct StaleArtifact : Error {
  explicit StaleArtifact(const std::string& what) : Error(Category::StaleArtifact, what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(Category::Dimension, what) {}
};

struct SolverFailure : Error {
  explicit SolverFailure(const std::string& what) : Error(Category::SolverFailure, what) {}
};

}  // namespace podfv
