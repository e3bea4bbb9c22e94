#pragma once

#include <stdexcept>
#include <string>

namespace lesionq {

/// Failures reading or writing files, or inputs outside the supported formats.
/// The CLI maps these to exit code 2.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that parse fine but violate a domain invariant. Exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFormat : public FormatError {
 public:
  using FormatError::FormatError;
};
class CorruptHeader : public FormatError {
 public:
  using FormatError::FormatError;
};
class TruncatedData : public FormatError {
 public:
  using FormatError::FormatError;
};
class IoFailure : public FormatError {
 public:
  using FormatError::FormatError;
};
class UnreadableImage : public FormatError {
 public:
  using FormatError::FormatError;
};
class EmptyDirectory : public FormatError {
 public:
  using FormatError::FormatError;
};
class MissingPair : public FormatError {
 public:
  using FormatError::FormatError;
};

class InconsistentDimensions : public DomainError {
 public:
  using DomainError::DomainError;
};
class ShapeMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};
class DegenerateInput : public DomainError {
 public:
  using DomainError::DomainError;
};
class NoOverlap : public DomainError {
 public:
  using DomainError::DomainError;
};
class EmptyRange : public DomainError {
 public:
  using DomainError::DomainError;
};
class InvalidArgument : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace lesionq
