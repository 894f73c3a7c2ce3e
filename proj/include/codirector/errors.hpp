#pragma once

#include <stdexcept>
#include <string>

namespace codirector {

// Error taxonomy mirrored by the CLI exit codes (see tools/main.cpp).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Backend unreachable, timed out, or retry budget exhausted.
struct TransportError : std::runtime_error {
    int status = 0;
    explicit TransportError(const std::string& msg, int http_status = 0)
        : std::runtime_error(msg), status(http_status) {}
};

// A structured document (judge report, backend payload) violated its schema.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IngestionError : std::runtime_error {
    explicit IngestionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller asked for data the contract says is not present (e.g. reward
// extraction from a report without efficacy scores).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace codirector
