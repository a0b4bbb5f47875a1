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

#include "momentfuse/binary_io.h"

#include <bit>
#include <cstring>
#include <limits>
#include <vector>

#include "momentfuse/error.h"

namespace mf::binio {
namespace {

void ReadExact(std::istream& is, char* buf, std::size_t n,
               const std::string& what) {
  is.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw FormatError("truncated " + what);
  }
}

}  // namespace

void WriteMagic(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void ExpectMagic(std::istream& is, std::string_view magic,
                 const std::string& what) {
  std::string buf(magic.size(), '\0');
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(is.gcount()) != magic.size() || buf != magic) {
    throw FormatError(what + ": bad magic, expected \"" + std::string(magic) +
                      "\"");
  }
}

void WriteU32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

void WriteF32(std::ostream& os, float v) {
  WriteU32(os, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t ReadU32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  ReadExact(is, reinterpret_cast<char*>(b), 4, what);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

float ReadF32(std::istream& is, const std::string& what) {
  return std::bit_cast<float>(ReadU32(is, what));
}

void WriteF32Array(std::ostream& os, const double* values, std::size_t n) {
  std::vector<char> buf(n * 4);
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    buf[4 * i] = static_cast<char>(u & 0xff);
    buf[4 * i + 1] = static_cast<char>((u >> 8) & 0xff);
    buf[4 * i + 2] = static_cast<char>((u >> 16) & 0xff);
    buf[4 * i + 3] = static_cast<char>((u >> 24) & 0xff);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void ReadF32Array(std::istream& is, double* out, std::size_t n,
                  const std::string& what) {
  std::vector<unsigned char> buf(n * 4);
  ReadExact(is, reinterpret_cast<char*>(buf.data()), buf.size(), what);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                            (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                            (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                            (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
    out[i] = static_cast<double>(std::bit_cast<float>(u));
  }
}

std::uint32_t CheckedU32(std::size_t n, const std::string& what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(what + " does not fit in u32");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace mf::binio
