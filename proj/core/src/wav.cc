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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "momentfuse/binary_io.h"
#include "momentfuse/dsp.h"
#include "momentfuse/error.h"

namespace mf::dsp {
namespace {

std::uint16_t U16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t U32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                         std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
      std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
    throw FormatError(name + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id(bytes.begin() + static_cast<long>(pos),
                         bytes.begin() + static_cast<long>(pos) + 4);
    const std::size_t len = U32(&bytes[pos + 4]);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size()) {
      throw FormatError(name + ": truncated chunk '" + id + "'");
    }
    if (id == "fmt ") {
      if (len < 16) throw FormatError(name + ": short fmt chunk");
      format = U16(&bytes[body]);
      channels = U16(&bytes[body + 2]);
      rate = U32(&bytes[body + 4]);
      bits = U16(&bytes[body + 14]);
    } else if (id == "data") {
      data = &bytes[body];
      data_len = len;
    }
    pos = body + len + (len & 1);
  }
  if (format != 1 || bits != 16) {
    throw FormatError(name + ": only 16-bit PCM WAV is supported");
  }
  if (channels == 0 || rate == 0) throw FormatError(name + ": bad fmt chunk");
  if (data == nullptr) throw FormatError(name + ": missing data chunk");

  const std::size_t frames = data_len / (2u * channels);
  AudioBuffer audio;
  audio.sample_rate = static_cast<double>(rate);
  audio.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto raw =
          static_cast<std::int16_t>(U16(data + 2 * (f * channels + c)));
      acc += static_cast<double>(raw) / 32768.0;
    }
    audio.samples[f] = acc / static_cast<double>(channels);
  }
  return audio;
}

void WriteWav(const AudioBuffer& audio, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  const std::uint32_t data_len =
      binio::CheckedU32(audio.samples.size() * 2, "wav data size");
  os.write("RIFF", 4);
  binio::WriteU32(os, 36 + data_len);
  os.write("WAVEfmt ", 8);
  binio::WriteU32(os, 16);
  PutU16(os, 1);  // PCM
  PutU16(os, 1);  // mono
  binio::WriteU32(os, rate);
  binio::WriteU32(os, rate * 2);
  PutU16(os, 2);
  PutU16(os, 16);
  os.write("data", 4);
  binio::WriteU32(os, data_len);
  for (double s : audio.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
    PutU16(os, static_cast<std::uint16_t>(v));
  }
  if (!os) throw FormatError("wav: write failed for " + path.string());
}

}  // namespace mf::dsp
