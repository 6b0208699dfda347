// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace gfp {

using ordered_json = nlohmann::ordered_json;

/// Serializes one JSON value onto a single line. Invalid UTF-8 in strings is
/// replaced rather than rejected, since model generations are not trusted.
std::string dump_line(const ordered_json& value);

/// Integral values become JSON integers ("18", not "18.0").
ordered_json number_to_json(double value);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Calls `fn(line_number, parsed)` for every non-blank line, 1-based.
/// Throws IoError if the file cannot be opened and SchemaError naming the
/// line when a line is not valid JSON.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const ordered_json&)>& fn);

} // namespace gfp
