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

#include "egodemo/error.hpp"

namespace egodemo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid-argument";
    case ErrorKind::kData:
      return "data";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

namespace {

std::string format_parse_error(const std::string& source, int line,
                               const std::string& element, const std::string& detail) {
  std::string msg = source;
  if (line > 0) msg += ":" + std::to_string(line);
  if (!element.empty()) msg += ": <" + element + ">";
  msg += ": " + detail;
  return msg;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& element,
                       const std::string& detail)
    : DataError(format_parse_error(source, line, element, detail)),
      line_(line),
      element_(element) {}

}  // namespace egodemo
