#include "bloomclf/errors.hpp"

namespace bloomclf {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptyText: return "EmptyText";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::ClassTooSmall: return "ClassTooSmall";
        case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorKind::NegativeCount: return "NegativeCount";
        case ErrorKind::VersionMismatch: return "VersionMismatch";
        case ErrorKind::CorruptFile: return "CorruptFile";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::EmptyMatrix: return "EmptyMatrix";
        case ErrorKind::NotACoarsening: return "NotACoarsening";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::EmptyBank: return "EmptyBank";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace bloomclf
