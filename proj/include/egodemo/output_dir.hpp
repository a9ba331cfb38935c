// Copyright 2026 The EgoDemo Authors
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

#pragma once

#include <filesystem>
#include <string>

namespace egodemo {

// Output directories are assembled in "<dir>.partial" and renamed into place
// once complete. A non-empty existing `dir` is replaced only if it contains
// `marker`, i.e. it was produced by us.
std::filesystem::path staging_dir_for(const std::filesystem::path& dir);
void commit_staging_dir(const std::filesystem::path& staging, const std::filesystem::path& dir,
                        const std::string& marker);

}  // namespace egodemo
