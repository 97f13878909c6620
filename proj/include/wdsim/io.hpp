// Copyright 2026 The wdsim Authors
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

// Deterministic number formatting and atomic file output.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace wds::io {

/// printf "%.17g", which round-trips every finite double.
std::string format_double(double v);

/// Writes `content` to a temporary file in the target directory and renames
/// it over `path`. Parent directories are created. Throws std::runtime_error.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace wds::io
