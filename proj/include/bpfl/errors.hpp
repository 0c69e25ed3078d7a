#pragma once

#include <stdexcept>
#include <string>

namespace bpfl {

/// Invalid experiment or key configuration (bad schema value, undersized key, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A protocol-level failure: empty share list, tampered aggregate, aborted setup.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed serialized data (wrong magic, truncated payload, bad frame).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// The honest-prover contract was violated (witness does not satisfy the circuit).
struct ProverError : std::runtime_error {
    explicit ProverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bpfl
