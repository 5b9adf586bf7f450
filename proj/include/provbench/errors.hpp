#pragma once

#include <stdexcept>
#include <string>

namespace provbench {

// Every failure mode the engine can report. The coarse category decides the
// process exit code: validation -> 1, integrity -> 2, usage -> 3.
enum class ErrorKind {
    // canonical serialization
    NonFiniteNumber,
    DuplicateKey,
    // store
    UnknownParent,
    NotFound,
    IntegrityMismatch,
    StoreReadFailure,
    StoreWriteFailure,
    // provenance graph
    DanglingParent,
    CycleDetected,
    NotInGraph,
    UnsupportedFormat,
    // panel
    SchemaError,
    UnpairedItem,
    UnknownChannel,
    DuplicateId,
    MissingSummary,
    // scoring
    NonPositiveWindow,
    ChannelMismatch,
    EmptyChannelSet,
    NoPreset,
    MissingWeights,
    // statistics
    EmptySide,
    EmptyPairs,
    TooFewPairs,
    SingleClass,
    EmptySample,
    NoPositives,
    // embedding
    ZeroVarianceColumn,
    DimensionMismatch,
    KindMismatch,
    KTooLarge,
    // workflow
    MissingArtifact,
    Usage,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Exit-code category per the CLI contract.
    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::NotFound:
            case ErrorKind::IntegrityMismatch:
            case ErrorKind::StoreReadFailure:
            case ErrorKind::StoreWriteFailure:
            case ErrorKind::DanglingParent:
            case ErrorKind::CycleDetected:
            case ErrorKind::MissingArtifact:
                return 2;
            case ErrorKind::Usage:
            case ErrorKind::UnsupportedFormat:
                return 3;
            default:
                return 1;
        }
    }

private:
    ErrorKind kind_;
};

const char* error_kind_name(ErrorKind kind) noexcept;

} // namespace provbench
