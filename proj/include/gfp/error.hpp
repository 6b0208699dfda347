// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfp {

enum class ErrorCode {
    // core
    EmptyHint,
    NoMarkerAndNotNumeric,
    UnparsableNumber,
    InvalidArgument,
    // teacher
    MissingSolution,
    MalformedJson,
    MissingKey,
    WrongType,
    EmptyField,
    TransportError,
    HttpStatusError,
    CredentialMissing,
    // executor
    SandboxSpawnFailure,
    // dataset / io
    UnknownProblemId,
    IoError,
    SchemaError,
    // inference
    EndpointError,
    MissingGoldHints,
    // evaluator
    EmptyRecordSet,
    DuplicateFraction,
};

std::string_view to_string(ErrorCode code);

// Parse failures of a teacher reply are grouped so callers can tell them
// apart from transport problems.
constexpr bool is_parse_error(ErrorCode code) {
    return code == ErrorCode::MalformedJson || code == ErrorCode::MissingKey ||
           code == ErrorCode::WrongType || code == ErrorCode::EmptyField;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace gfp
