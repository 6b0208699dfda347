// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Thin blocking HTTP client used by the teacher and generation clients.
namespace gfp::http {

struct Url {
    std::string scheme_host_port; // "http://127.0.0.1:8080"
    std::string path;             // "/v1/chat/completions", "/" when absent
};

/// Throws InvalidArgument for anything other than an http(s) URL.
Url parse_url(std::string_view url);

struct Response {
    int status = 0;
    std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// POSTs a JSON body. Throws TransportError when no HTTP response arrives
/// (connection refused, timeout, TLS failure). Any status code is returned.
Response post_json(std::string_view url, const std::string& body, const Headers& headers,
                   std::chrono::milliseconds timeout);

/// True if something at `url` answers HTTP at all, whatever the status.
bool reachable(std::string_view url, std::chrono::milliseconds timeout);

} // namespace gfp::http
