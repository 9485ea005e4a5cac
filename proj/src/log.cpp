// Copyright 2026 The Arcoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arcoref/log.hpp"

#include <atomic>
#include <iostream>

namespace arcoref {

namespace {
std::atomic<LogLevel> threshold{LogLevel::kInfo};

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::kDebug: return "debug";
    case LogLevel::kInfo: return "info";
    case LogLevel::kWarning: return "warning";
    case LogLevel::kError: return "error";
    case LogLevel::kSilent: break;
  }
  return "";
}
}  // namespace

void set_log_level(LogLevel level) { threshold = level; }

LogLevel log_level() { return threshold; }

void log(LogLevel level, const std::string& message) {
  if (level < threshold.load() || level == LogLevel::kSilent) return;
  std::cerr << "[" << level_name(level) << "] " << message << '\n';
}

}  // namespace arcoref
