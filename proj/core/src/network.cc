// Copyright 2026 The Momentfuse Authors
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

#include "momentfuse/network.h"

#include <fstream>
#include <random>
#include <string>

#include "momentfuse/binary_io.h"

namespace mf {

namespace {
constexpr std::string_view kCheckpointMagic = "MFNN1";

std::string Describe(std::size_t index, LayerKind kind,
                     const std::string& what) {
  return "layer " + std::to_string(index) + " (" +
         std::string(LayerKindName(kind)) + "): " + what;
}
}  // namespace

LayerError::LayerError(std::size_t index, LayerKind kind,
                       const std::string& what)
    : ShapeError(Describe(index, kind, what)), index_(index), kind_(kind) {}

Network::Network(const Network& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->Clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Layer& Network::Add(std::unique_ptr<Layer> layer) {
  layers_.push_back(std::move(layer));
  return *layers_.back();
}

std::vector<LayerSpec> Network::specs() const {
  std::vector<LayerSpec> out;
  out.reserve(layers_.size());
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

std::vector<Shape> Network::InferShapes(const Shape& input) const {
  std::vector<Shape> shapes;
  Shape current = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      current = layers_[i]->OutputShape(current);
    } catch (const LayerError&) {
      throw;
    } catch (const ShapeError& e) {
      throw LayerError(i, layers_[i]->spec().kind, e.what());
    }
    shapes.push_back(current);
  }
  return shapes;
}

Tensor Network::Forward(const Tensor& input, Mode mode) {
  InferShapes(input.shape());
  Tensor x = input;
  for (auto& l : layers_) x = l->Forward(x, mode);
  return x;
}

Tensor Network::Infer(const Tensor& input) const {
  InferShapes(input.shape());
  Tensor x = input;
  for (const auto& l : layers_) x = l->Infer(x);
  return x;
}

Tensor Network::Backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    try {
      g = layers_[i]->Backward(g);
    } catch (const StateError& e) {
      throw StateError(Describe(i, layers_[i]->spec().kind, e.what()));
    } catch (const ShapeError& e) {
      throw LayerError(i, layers_[i]->spec().kind, e.what());
    }
  }
  return g;
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (Parameter* p : l->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : layers_) {
    const Layer& cl = *l;
    for (const Parameter* p : cl.parameters()) out.push_back(p);
  }
  return out;
}

std::vector<Parameter*> Network::trainable_parameters() {
  std::vector<Parameter*> out;
  for (Parameter* p : parameters()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

std::size_t Network::NumTrainableValues() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) {
    if (p->trainable) n += p->value.size();
  }
  return n;
}

void Network::Initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : layers_) l->Initialize(rng);
}

void WriteCheckpoint(const Network& net, std::ostream& os) {
  binio::WriteMagic(os, kCheckpointMagic);
  binio::WriteU32(os, binio::CheckedU32(net.size(), "layer count"));
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Layer& layer = net.layer(i);
    const LayerSpec spec = layer.spec();
    binio::WriteU32(os, static_cast<std::uint32_t>(spec.kind));
    binio::WriteU32(os, binio::CheckedU32(spec.dims.size(), "dim count"));
    for (std::uint32_t d : spec.dims) binio::WriteU32(os, d);
    const auto params = layer.parameters();
    binio::WriteU32(os, binio::CheckedU32(params.size(), "parameter count"));
    for (const Parameter* p : params) {
      const Shape& s = p->value.shape();
      binio::WriteU32(os, binio::CheckedU32(s.size(), "rank"));
      for (std::size_t d : s) binio::WriteU32(os, binio::CheckedU32(d, "extent"));
      binio::WriteF32Array(os, p->value.data(), p->value.size());
    }
  }
  if (!os) throw FormatError("checkpoint: write failed");
}

Network ReadCheckpoint(std::istream& is) {
  binio::ExpectMagic(is, kCheckpointMagic, "checkpoint");
  const std::uint32_t count = binio::ReadU32(is, "checkpoint layer count");
  Network net;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = "checkpoint layer " + std::to_string(i);
    LayerSpec spec;
    spec.kind = static_cast<LayerKind>(binio::ReadU32(is, where));
    const std::uint32_t ndims = binio::ReadU32(is, where);
    if (ndims > 16) throw FormatError(where + ": implausible dim count");
    for (std::uint32_t d = 0; d < ndims; ++d) {
      spec.dims.push_back(binio::ReadU32(is, where));
    }
    Layer& layer = net.Add(MakeLayer(spec));
    auto params = layer.parameters();
    const std::uint32_t nparams = binio::ReadU32(is, where);
    if (nparams != params.size()) {
      throw FormatError(where + ": expected " + std::to_string(params.size()) +
                        " parameters, found " + std::to_string(nparams));
    }
    for (Parameter* p : params) {
      const std::uint32_t rank = binio::ReadU32(is, where);
      Shape shape;
      for (std::uint32_t r = 0; r < rank; ++r) {
        shape.push_back(binio::ReadU32(is, where));
      }
      if (shape != p->value.shape()) {
        throw FormatError(where + ": parameter " + p->name + " has shape " +
                          ShapeToString(shape) + ", expected " +
                          ShapeToString(p->value.shape()));
      }
      binio::ReadF32Array(is, p->value.data(), p->value.size(), where);
    }
  }
  return net;
}

void SaveCheckpoint(const Network& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write checkpoint " + path.string());
  WriteCheckpoint(net, os);
}

Network LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read checkpoint " + path.string());
  return ReadCheckpoint(is);
}

}  // namespace mf
