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

#ifndef COHEVAL_BRIDGE_H_
#define COHEVAL_BRIDGE_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "coheval/embeddings.h"

namespace coheval {

// Bidirectional line-delimited byte stream to the inference bridge.
class LineChannel {
 public:
  virtual ~LineChannel() = default;

  // Writes `line` followed by '\n' and flushes.
  virtual void write_line(std::string_view line) = 0;
  // Next line without its terminator; nullopt at end of stream.
  virtual std::optional<std::string> read_line() = 0;
};

// Endpoint forms:
//   exec:<shell command>   spawn the bridge, talk over its stdin/stdout
//   tcp:<host>:<port>      connect to a listening bridge
// Throws BridgeError when the endpoint cannot be reached.
std::unique_ptr<LineChannel> open_channel(std::string_view endpoint);

// Sends one `embed` request per text and reads the answer before sending the
// next, then sends `end`. Any error line, key mismatch, early end of stream
// or dimension change aborts with BridgeError naming the key.
SentenceEmbeddingStore embed_texts_via_bridge(std::span<const KeyedText> texts,
                                              LineChannel& channel,
                                              std::string store_name = "bridge");

// Convenience overload that opens and closes the endpoint.
SentenceEmbeddingStore embed_texts_via_bridge(std::span<const KeyedText> texts,
                                              std::string_view endpoint,
                                              std::string store_name = "bridge");

}  // namespace coheval

#endif  // COHEVAL_BRIDGE_H_
