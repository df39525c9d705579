#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace gkp {

// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input failed validation. Carries per-field diagnostics so callers (the
// HTTP service in particular) can report exactly which field was wrong.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message,
                           std::map<std::string, std::string> fields = {})
      : Error(message), fields_(std::move(fields)) {}

  const std::map<std::string, std::string>& fields() const { return fields_; }

 private:
  std::map<std::string, std::string> fields_;
};

// A required artifact (model file, table, dataset) is not available.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkp
