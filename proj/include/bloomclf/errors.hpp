#pragma once

#include <stdexcept>
#include <string>

namespace bloomclf {

// Every recoverable failure in the library is one of these kinds. The CLI
// maps them to exit code 2 (bad input) and everything else to exit code 1.
enum class ErrorKind {
    EmptyText,
    ParseError,
    UnknownLabel,
    EmptyCorpus,
    ClassTooSmall,
    EmptyVocabulary,
    SingleClass,
    DimensionMismatch,
    NonFiniteLoss,
    NegativeCount,
    VersionMismatch,
    CorruptFile,
    LengthMismatch,
    IndexOutOfRange,
    EmptyMatrix,
    NotACoarsening,
    InsufficientData,
    EmptyBank,
    IoError,
    InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          message_(std::move(message)) {}

    ErrorKind kind() const noexcept { return kind_; }
    // The detail text without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace bloomclf
