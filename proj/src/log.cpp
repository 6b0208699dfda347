// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace gfp::log {
namespace {

std::atomic<bool> g_quiet{false};
std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;

const char* tag(Level level) {
    switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    }
    return "?";
}

} // namespace

void set_quiet(bool quiet) { g_quiet = quiet; }
void set_level(Level level) { g_level = level; }

void write(Level level, std::string_view message) {
    // --quiet still lets errors through.
    if (level < g_level.load() || (g_quiet.load() && level != Level::Error)) return;
    std::string line = "[gfp ";
    line += tag(level);
    line += "] ";
    line += message;
    line += '\n';
    std::lock_guard lock(g_mutex);
    std::cerr << line << std::flush;
}

} // namespace gfp::log
