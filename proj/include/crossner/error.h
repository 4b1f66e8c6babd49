#pragma once

#include <stdexcept>
#include <string>

namespace crossner {

// Every failure surfaced by the library carries a short machine-parsable
// category ("dimension", "config", "data", ...) next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

struct DataError : Error {
  explicit DataError(const std::string& m) : Error("data", m) {}
};

struct ParseError : Error {
  ParseError(const std::string& m, std::size_t line)
      : Error("parse", "line " + std::to_string(line) + ": " + m), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error("contract", m) {}
};

struct TrainingError : Error {
  explicit TrainingError(const std::string& m) : Error("divergence", m) {}
};

struct CheckpointError : Error {
  explicit CheckpointError(const std::string& m) : Error("checkpoint", m) {}

 protected:
  CheckpointError(std::string category, const std::string& m) : Error(std::move(category), m) {}
};

struct CheckpointVersionError : CheckpointError {
  explicit CheckpointVersionError(const std::string& m)
      : CheckpointError("checkpoint-version", m) {}
};

struct CheckpointShapeError : CheckpointError {
  explicit CheckpointShapeError(const std::string& m)
      : CheckpointError("checkpoint-shape", m) {}
};

struct CheckpointTruncatedError : CheckpointError {
  explicit CheckpointTruncatedError(const std::string& m)
      : CheckpointError("checkpoint-truncated", m) {}
};

}  // namespace crossner
