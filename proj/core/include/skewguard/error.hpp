#pragma once

#include <stdexcept>
#include <string>

namespace skewguard {

// Machine-parsable error categories. The CLI maps these onto exit codes and
// prints them verbatim, so renaming one is a breaking change.
enum class Errc {
    // numerics
    NotPositiveDefinite,
    SingularMatrix,
    DimensionMismatch,
    InvalidProbability,
    InvalidArgument,
    // data ingestion / scaling
    ParseError,
    MissingValue,
    NonBinaryLabel,
    ZeroScaleColumn,
    IoError,
    InvalidLabeling,
    // robust estimation
    TooFewRows,
    SingularData,
    EmptyInlierSet,
    ZeroVarianceColumn,
    SingularInformation,
    // metrics
    LengthMismatch,
    OneClassOnly,
    NoPositives,
    // simulation / benchmark
    InvalidDimension,
    BenchmarkFailure,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }
    const char* category() const { return errc_name(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace skewguard
