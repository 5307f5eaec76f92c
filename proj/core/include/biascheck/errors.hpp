#pragma once

#include <stdexcept>
#include <string>

namespace biascheck {

// Base for every error raised by the harness. The CLI maps subclasses to
// exit codes: ConfigError -> 2, FailureBudgetError -> 3, MissingArtifactsError -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or invalid CLI arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or missing input data (claims files, knowledge stores, run artifacts).
class DataError : public Error {
public:
    using Error::Error;
};

// A remote endpoint could not be reached after the retry budget.
class TransportError : public Error {
public:
    TransportError(const std::string& endpoint, const std::string& detail)
        : Error("transport failure contacting " + endpoint + ": " + detail), endpoint_(endpoint) {}
    const std::string& endpoint() const { return endpoint_; }

private:
    std::string endpoint_;
};

// The provider answered with an error payload (not retried).
class ProviderError : public Error {
public:
    using Error::Error;
};

// More claims failed than the configured failure budget allows.
class FailureBudgetError : public Error {
public:
    using Error::Error;
};

// A referenced run or artifact file does not exist.
class MissingArtifactsError : public Error {
public:
    using Error::Error;
};

}  // namespace biascheck
