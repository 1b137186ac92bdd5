// Copyright 2026 The relseq Authors
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

// Run manifest: configuration snapshot plus content digests of every input
// and output file, enough to reproduce a run. Timestamps live here and only
// here, so the data files themselves stay byte-stable.

#ifndef RELSEQ_MANIFEST_HPP_
#define RELSEQ_MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "relseq/corpus.hpp"
#include "relseq/util.hpp"
#include "relseq/version.hpp"

namespace relseq {

struct RunManifest {
  std::string tool = std::string(kToolName) + " " + kToolVersion;
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a64 digest
  std::vector<std::pair<std::string, std::string>> outputs;
  long duration_ms = 0;

  void add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), fnv1a64_hex(read_file(path)));
  }
  void add_output(const std::filesystem::path& path) {
    outputs.emplace_back(path.string(), fnv1a64_hex(read_file(path)));
  }

  Json to_json() const {
    Json j = Json::object();
    j["tool"] = tool;
    j["command"] = command;
    Json cfg = Json::object();
    for (const auto& [key, value] : config) cfg[key] = value;
    j["config"] = std::move(cfg);
    auto files = [](const std::vector<std::pair<std::string, std::string>>& entries) {
      Json arr = Json::array();
      for (const auto& [path, digest] : entries)
        arr.push_back(Json{{"path", path}, {"fnv1a64", digest}});
      return arr;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["duration-ms"] = duration_ms;
    return j;
  }

  void save(const std::filesystem::path& path) const {
    write_file(path, to_json().dump(2) + "\n");
  }
};

}  // namespace relseq

#endif  // RELSEQ_MANIFEST_HPP_
