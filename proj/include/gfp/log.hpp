// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

// Minimal stderr logger. Messages are written whole under a lock so lines
// from worker threads never interleave.
namespace gfp::log {

enum class Level { Debug, Info, Warn, Error };

void set_quiet(bool quiet);
void set_level(Level level);

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

} // namespace gfp::log
