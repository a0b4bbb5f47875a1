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

#ifndef MOMENTFUSE_BINARY_IO_H_
#define MOMENTFUSE_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

// Little-endian primitives shared by the MF* binary formats. Values are
// encoded byte by byte so files are identical across hosts.
namespace mf::binio {

void WriteMagic(std::ostream& os, std::string_view magic);
// Throws FormatError naming `what` if the next bytes differ from `magic`.
void ExpectMagic(std::istream& is, std::string_view magic,
                 const std::string& what);

void WriteU32(std::ostream& os, std::uint32_t v);
void WriteF32(std::ostream& os, float v);
std::uint32_t ReadU32(std::istream& is, const std::string& what);
float ReadF32(std::istream& is, const std::string& what);

// Bulk f32 helpers for payloads.
void WriteF32Array(std::ostream& os, const double* values, std::size_t n);
void ReadF32Array(std::istream& is, double* out, std::size_t n,
                  const std::string& what);

// Narrowing used by every writer; throws FormatError if `n` overflows u32.
std::uint32_t CheckedU32(std::size_t n, const std::string& what);

}  // namespace mf::binio

#endif  // MOMENTFUSE_BINARY_IO_H_
