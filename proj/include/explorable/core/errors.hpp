#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace explorable {

// Broad classes used by the CLI to choose exit codes.
enum class ErrorClass { finding, not_found, toolchain, config, input };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string &what) : std::runtime_error(what), class_(cls) {}
    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

#define EXPLORABLE_ERROR(Name, Class)                                                            \
    class Name : public Error {                                                                 \
    public:                                                                                      \
        explicit Name(const std::string &what) : Error(ErrorClass::Class, #Name ": " + what) {} \
    }

EXPLORABLE_ERROR(EmptyProof, input);
EXPLORABLE_ERROR(SchemaVersionMismatch, config);
EXPLORABLE_ERROR(ToolchainMissing, toolchain);
EXPLORABLE_ERROR(PositionOutsideProof, input);
EXPLORABLE_ERROR(QueryFailed, toolchain);
EXPLORABLE_ERROR(NoTurnstile, input);
EXPLORABLE_ERROR(DuplicateHypothesisName, input);
EXPLORABLE_ERROR(UnannotatedBlock, input);
EXPLORABLE_ERROR(FixtureMiss, config);
EXPLORABLE_ERROR(ProviderHTTPError, toolchain);
EXPLORABLE_ERROR(UnlinkableStep, input);
EXPLORABLE_ERROR(CycleDetected, input);
EXPLORABLE_ERROR(UnboundInput, input);
EXPLORABLE_ERROR(MissingOracle, config);
EXPLORABLE_ERROR(RangeTooLarge, config);
EXPLORABLE_ERROR(MissingKey, input);
EXPLORABLE_ERROR(NotFound, not_found);
EXPLORABLE_ERROR(ConfigError, config);
EXPLORABLE_ERROR(OracleError, input);
EXPLORABLE_ERROR(InvalidBinding, input);

#undef EXPLORABLE_ERROR

class MalformedBundle : public Error {
public:
    MalformedBundle(std::string field_path, const std::string &what)
        : Error(ErrorClass::config, "MalformedBundle at " + field_path + ": " + what), path_(std::move(field_path)) {}
    const std::string &field_path() const noexcept { return path_; }

private:
    std::string path_;
};

// A generate -> check loop ran out of attempts; `detail` describes the last failure.
class ExhaustedAttempts : public Error {
public:
    ExhaustedAttempts(int attempts, const std::string &detail)
        : Error(ErrorClass::finding, "ExhaustedAttempts after " + std::to_string(attempts) + " attempt(s): " + detail),
          attempts_(attempts)
    {
    }
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

class Timeout : public Error {
public:
    explicit Timeout(double seconds)
        : Error(ErrorClass::toolchain, "Timeout: toolchain exceeded " + std::to_string(seconds) + " s"), seconds_(seconds) {}
    double seconds() const noexcept { return seconds_; }

private:
    double seconds_;
};

} // namespace explorable
