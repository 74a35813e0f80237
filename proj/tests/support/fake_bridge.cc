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

// Minimal stand-in for the inference bridge, speaking its line protocol on
// stdin/stdout with the pseudo-embedding backend.
//
//   fake_bridge [--dim N] [--answer-limit N] [--nli-bad-sum]
//
// --answer-limit stops answering (and exits) after N responses.

#include <cstdlib>
#include <iostream>
#include <string>

#include "coheval/nli.h"
#include "json.hpp"
#include "support/synthetic.h"

int main(int argc, char** argv) {
  std::size_t dim = 16;
  long limit = -1;
  bool bad_sum = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--dim" && i + 1 < argc) {
      dim = std::strtoul(argv[++i], nullptr, 10);
    } else if (arg == "--answer-limit" && i + 1 < argc) {
      limit = std::strtol(argv[++i], nullptr, 10);
    } else if (arg == "--nli-bad-sum") {
      bad_sum = true;
    }
  }
  using json = nlohmann::json;
  long answered = 0;
  for (std::string line; std::getline(std::cin, line);) {
    if (limit >= 0 && answered >= limit) return 0;
    json req;
    try {
      req = json::parse(line);
    } catch (const json::parse_error&) {
      std::cout << R"({"error":"malformed request","key":null})" << std::endl;
      continue;
    }
    const std::string op = req.value("op", "");
    if (op == "end") return 0;
    json resp;
    if (op == "embed") {
      resp["key"] = req.at("key");
      resp["vector"] = coheval::testing::pseudo_sentence_vector(
          req.at("text").get<std::string>(), dim, "bridge");
    } else if (op == "nli") {
      const auto p = coheval::heuristic_nli_baseline(req.at("premise").get<std::string>(),
                                                     req.at("hypothesis").get<std::string>());
      resp["key"] = req.at("key");
      resp["probs"] = {{"entailment", p.probs[0]},
                       {"neutral", p.probs[1]},
                       {"contradiction", bad_sum ? 0.5 : p.probs[2]}};
    } else {
      resp["error"] = "unknown op";
      resp["key"] = nullptr;
    }
    std::cout << resp.dump() << std::endl;
    ++answered;
  }
  return 0;
}
