// Copyright 2026 The TTML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "model/model_io.h"

#include <set>

#include "common/error.h"
#include "common/files.h"
#include "model/container.h"

namespace ttml {

using nlohmann::json;

std::vector<uint8_t> SerializeModel(const ModelGraph& graph) {
  Validate(graph);
  json nodes = json::array();
  std::vector<NamedBlob> blobs;
  std::set<std::string> written;
  for (const GraphNode& n : graph.nodes) {
    json j = {{"id", n.id}, {"op", OpName(n.op)}, {"inputs", n.inputs}, {"weights", n.weight_refs}};
    switch (n.op) {
      case OpKind::kConv2d:
      case OpKind::kDepthwiseConv2d:
        j["stride"] = n.params.stride;
        j["padding"] = PaddingName(n.params.padding);
        break;
      case OpKind::kActivation:
        j["activation"] = ActivationName(n.params.activation);
        break;
      case OpKind::kDropoutMarker:
        j["rate"] = n.params.dropout_rate;
        break;
      default:
        break;
    }
    nodes.push_back(std::move(j));
    for (const std::string& w : n.weight_refs) {
      if (written.insert(w).second) blobs.push_back({w, graph.weights.at(w)});
    }
  }
  json manifest = {{"format", "ttml"},
                   {"name", graph.name},
                   {"input_shape", graph.input_shape},
                   {"nodes", std::move(nodes)},
                   {"metadata", graph.metadata}};
  return EncodeContainer(kModelMagic, manifest, blobs);
}

ModelGraph DeserializeModel(std::span<const uint8_t> bytes) {
  Container c = DecodeContainer(bytes, kModelMagic);
  ModelGraph g;
  try {
    const json& m = c.manifest;
    g.name = m.at("name").get<std::string>();
    g.input_shape = m.at("input_shape").get<Shape>();
    g.metadata = m.at("metadata").get<std::map<std::string, std::string>>();
    for (const json& j : m.at("nodes")) {
      GraphNode n;
      n.id = j.at("id").get<std::string>();
      n.op = ParseOp(j.at("op").get<std::string>());
      n.inputs = j.at("inputs").get<std::vector<std::string>>();
      n.weight_refs = j.at("weights").get<std::vector<std::string>>();
      if (j.contains("stride")) n.params.stride = j["stride"].get<int64_t>();
      if (j.contains("padding")) n.params.padding = ParsePadding(j["padding"].get<std::string>());
      if (j.contains("activation")) {
        n.params.activation = ParseActivation(j["activation"].get<std::string>());
      }
      if (j.contains("rate")) n.params.dropout_rate = j["rate"].get<float>();
      g.nodes.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kFormatError, std::string("malformed model manifest: ") + e.what());
  }
  for (NamedBlob& b : c.blobs) {
    if (!g.weights.emplace(b.id, std::move(b.tensor)).second) {
      Fail(ErrorCode::kFormatError, "duplicate blob '" + b.id + "'");
    }
  }
  Validate(g);
  return g;
}

uint64_t SaveModel(const ModelGraph& graph, const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = SerializeModel(graph);
  WriteFileBytes(path, bytes);
  return bytes.size();
}

ModelGraph LoadModel(const std::filesystem::path& path) {
  return DeserializeModel(ReadFileBytes(path));
}

std::string InspectModelFile(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return ReadManifestText(bytes, kModelMagic);
}

}  // namespace ttml
