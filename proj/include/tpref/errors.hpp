#pragma once

#include <stdexcept>
#include <string>

namespace tpref {

enum class ErrorKind {
  kCycleDetected,
  kMalformedLine,
  kEmptyTaxonomy,
  kUnknownValue,
  kSyntaxError,
  kAmbiguousBareValue,
  kUnsatisfiableClause,
  kCapacityExceeded,
  kDomainTooLarge,
  kInsufficientRoots,
  kEmptyRequest,
  kInsufficientAttributes,
  kInvalidCharacter,
  kIoError,
  kInvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Resource caps get their own exit status at the CLI (3); all other
  // input-level failures map to 2.
  bool is_resource_cap() const {
    return kind_ == ErrorKind::kCapacityExceeded ||
           kind_ == ErrorKind::kDomainTooLarge;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace tpref
