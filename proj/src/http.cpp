// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/http.hpp"

#include "gfp/error.hpp"

#include <httplib.h>

namespace gfp::http {
namespace {

httplib::Client make_client(const Url& url, std::chrono::milliseconds timeout) {
    httplib::Client client(url.scheme_host_port);
    auto secs = static_cast<time_t>(timeout.count() / 1000);
    auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    return client;
}

} // namespace

Url parse_url(std::string_view url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "URL must start with http:// or https://: " + std::string(url));
    }
    std::string_view scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme: " + std::string(url));
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    Url out;
    out.scheme_host_port = std::string(url.substr(0, path_start));
    out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
    if (out.scheme_host_port.size() == scheme_end + 3) {
        throw Error(ErrorCode::InvalidArgument, "URL has no host: " + std::string(url));
    }
    return out;
}

Response post_json(std::string_view url, const std::string& body, const Headers& headers,
                   std::chrono::milliseconds timeout) {
    Url parsed = parse_url(url);
    httplib::Client client = make_client(parsed, timeout);
    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);
    auto result = client.Post(parsed.path, hdrs, body, "application/json");
    if (!result) {
        throw Error(ErrorCode::TransportError,
                    "POST " + parsed.scheme_host_port + parsed.path + " failed: " + httplib::to_string(result.error()));
    }
    return Response{result->status, result->body};
}

bool reachable(std::string_view url, std::chrono::milliseconds timeout) {
    Url parsed = parse_url(url);
    httplib::Client client = make_client(parsed, timeout);
    return static_cast<bool>(client.Get("/"));
}

} // namespace gfp::http
