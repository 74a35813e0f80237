// Copyright 2026 The coheval Authors.
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

#ifndef COHEVAL_TEXT_H_
#define COHEVAL_TEXT_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coheval {

// Lowercases ASCII letters, splits on whitespace and strips leading and
// trailing ASCII punctuation from every piece. Pieces that are pure
// punctuation are dropped. Non-ASCII bytes pass through untouched.
std::vector<std::string> tokenize(std::string_view text);

std::string_view trim(std::string_view text);

std::string join(std::span<const std::string> parts, std::string_view sep);

}  // namespace coheval

#endif  // COHEVAL_TEXT_H_
