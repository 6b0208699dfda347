// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/error.hpp"

namespace gfp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyHint: return "EmptyHint";
    case ErrorCode::NoMarkerAndNotNumeric: return "NoMarkerAndNotNumeric";
    case ErrorCode::UnparsableNumber: return "UnparsableNumber";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingSolution: return "MissingSolution";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::WrongType: return "WrongType";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::HttpStatusError: return "HttpStatusError";
    case ErrorCode::CredentialMissing: return "CredentialMissing";
    case ErrorCode::SandboxSpawnFailure: return "SandboxSpawnFailure";
    case ErrorCode::UnknownProblemId: return "UnknownProblemId";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EndpointError: return "EndpointError";
    case ErrorCode::MissingGoldHints: return "MissingGoldHints";
    case ErrorCode::EmptyRecordSet: return "EmptyRecordSet";
    case ErrorCode::DuplicateFraction: return "DuplicateFraction";
    }
    return "UnknownError";
}

} // namespace gfp
