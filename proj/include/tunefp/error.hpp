#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tunefp {

enum class ErrorKind {
  DecodeError,
  UnsupportedFormat,
  InsufficientAudio,
  DomainError,
  ShapeError,
  NoOnsets,
  InsufficientData,
  NotFound,
  InvalidK,
  TagsMissing,
  DuplicateTrack,
  ParseError,
  SchemaError,
  EmptyCorpus,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::InsufficientAudio: return "InsufficientAudio";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::NoOnsets: return "NoOnsets";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::TagsMissing: return "TagsMissing";
    case ErrorKind::DuplicateTrack: return "DuplicateTrack";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace tunefp
