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

#ifndef COHEVAL_IO_H_
#define COHEVAL_IO_H_

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace coheval {

// Opens a file for reading or throws Error("file not found: ...").
std::ifstream open_input(const std::filesystem::path& path,
                         std::ios::openmode mode = std::ios::in);

// Collects complete file contents in memory and writes them on commit(),
// each through a temporary sibling that is renamed into place. Nothing is
// written when the batch is dropped without commit().
class OutputBatch {
 public:
  void add(std::filesystem::path path, std::string contents);
  void commit() const;

  const std::vector<std::pair<std::filesystem::path, std::string>>& files() const {
    return files_;
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Keeps [A-Za-z0-9._-], maps everything else to '_'.
std::string filename_safe(std::string_view name);

}  // namespace coheval

#endif  // COHEVAL_IO_H_
