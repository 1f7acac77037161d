#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spcc {

// Base of every error raised by the engine. `code()` is the stable,
// machine-readable name used by the CLI and the HTTP API.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SPCC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

SPCC_DEFINE_ERROR(ParseError);
SPCC_DEFINE_ERROR(PreconditionViolation);
SPCC_DEFINE_ERROR(CycleError);
SPCC_DEFINE_ERROR(UnknownInstance);
SPCC_DEFINE_ERROR(UnknownView);
SPCC_DEFINE_ERROR(UnknownStep);
SPCC_DEFINE_ERROR(UnknownTechnique);
SPCC_DEFINE_ERROR(DuplicateTechnique);
SPCC_DEFINE_ERROR(EmptyField);
SPCC_DEFINE_ERROR(UnitMismatch);
SPCC_DEFINE_ERROR(InsufficientData);
SPCC_DEFINE_ERROR(EncodingError);
SPCC_DEFINE_ERROR(UnknownProject);
SPCC_DEFINE_ERROR(UnknownSource);
SPCC_DEFINE_ERROR(StorageError);
SPCC_DEFINE_ERROR(DuplicateProject);
SPCC_DEFINE_ERROR(DuplicateBatch);
SPCC_DEFINE_ERROR(NoResults);
SPCC_DEFINE_ERROR(CorruptPackage);
SPCC_DEFINE_ERROR(UnknownPackage);
SPCC_DEFINE_ERROR(AccessDenied);
SPCC_DEFINE_ERROR(InvalidToken);

#undef SPCC_DEFINE_ERROR

class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string param, const std::string& reason)
      : Error("SchemaViolation", param + ": " + reason),
        param_(std::move(param)),
        reason_(reason) {}

  const std::string& param() const noexcept { return param_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string param_;
  std::string reason_;
};

// Raised by a technique evaluator that rejects its inputs. The engine
// records it against the instance instead of aborting the evaluation.
class TechniqueError : public Error {
 public:
  TechniqueError(std::string instance_id, const std::string& cause)
      : Error("TechniqueError", instance_id + ": " + cause),
        instance_id_(std::move(instance_id)),
        cause_(cause) {}

  const std::string& instance_id() const noexcept { return instance_id_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string instance_id_;
  std::string cause_;
};

class UncoveredMetric : public Error {
 public:
  explicit UncoveredMetric(std::vector<std::string> metrics)
      : Error("UncoveredMetric", join(metrics)), metrics_(std::move(metrics)) {}

  const std::vector<std::string>& metrics() const noexcept { return metrics_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "metrics mapped to no process step:";
    for (const auto& m : items) out += " " + m;
    return out;
  }

  std::vector<std::string> metrics_;
};

// Registration rejected; `findings()` carries the individual report lines.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<std::string> findings)
      : Error("ValidationFailed", summarize(findings)), findings_(std::move(findings)) {}

  const std::vector<std::string>& findings() const noexcept { return findings_; }

 private:
  static std::string summarize(const std::vector<std::string>& findings) {
    std::string out = "validation failed";
    for (const auto& f : findings) out += "; " + f;
    return out;
  }

  std::vector<std::string> findings_;
};

}  // namespace spcc
