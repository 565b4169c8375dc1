#pragma once

#include <stdexcept>
#include <string>

namespace mpmimo {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg) : Error("not positive definite: " + msg) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& msg) : Error("convergence failure: " + msg) {}
};

struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg) : Error("singular matrix: " + msg) {}
};

// -- network-parameter ingestion --

struct SyntaxError : Error {
    int line;
    SyntaxError(int line_, const std::string& reason)
        : Error("syntax error at line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct UnsupportedFormat : Error {
    explicit UnsupportedFormat(const std::string& msg) : Error("unsupported format: " + msg) {}
};

struct NonMonotoneFrequency : Error {
    explicit NonMonotoneFrequency(const std::string& msg)
        : Error("non-monotone frequency: " + msg) {}
};

struct SingularConversion : Error {
    explicit SingularConversion(const std::string& msg) : Error("singular conversion: " + msg) {}
};

struct OutOfBand : Error {
    explicit OutOfBand(const std::string& msg) : Error("frequency out of band: " + msg) {}
};

struct WrongKind : Error {
    explicit WrongKind(const std::string& msg) : Error("wrong parameter kind: " + msg) {}
};

struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& msg) : Error("numerical failure: " + msg) {}
};

// -- channel assembly --

struct NonPassivePort : Error {
    explicit NonPassivePort(const std::string& msg) : Error("non-passive port: " + msg) {}
};

struct NonPassiveArray : Error {
    explicit NonPassiveArray(const std::string& msg) : Error("non-passive array: " + msg) {}
};

struct SingularTermination : Error {
    explicit SingularTermination(const std::string& msg)
        : Error("singular termination: " + msg) {}
};

// -- rate / experiments / cli --

struct AllZeroGains : Error {
    explicit AllZeroGains(const std::string& msg) : Error("all channel gains zero: " + msg) {}
};

struct ConfigError : Error {
    std::string field;
    ConfigError(const std::string& field_, const std::string& msg)
        : Error("config error at '" + field_ + "': " + msg), field(field_) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

}  // namespace mpmimo
