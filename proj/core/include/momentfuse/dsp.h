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

#ifndef MOMENTFUSE_DSP_H_
#define MOMENTFUSE_DSP_H_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "momentfuse/tensor.h"

namespace mf::dsp {

inline constexpr double kDefaultSampleRate = 44100.0;

struct AudioBuffer {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;
};

// frames x n_mels, row-major.
struct LogMelMatrix {
  std::size_t frames = 0;
  std::size_t n_mels = 0;
  std::size_t hop = 512;
  std::size_t window = 1024;
  std::vector<double> values;

  double at(std::size_t frame, std::size_t mel) const {
    return values[frame * n_mels + mel];
  }
  std::span<const double> frame(std::size_t f) const {
    return std::span<const double>(values).subspan(f * n_mels, n_mels);
  }
};

// In-place complex DFT. Radix-2 when the size is a power of two, direct
// summation otherwise.
void Dft(std::vector<std::complex<double>>& data);

// |DFT| bins 0..W/2 of a real frame of even length W >= 2.
std::vector<double> DftMagnitude(std::span<const double> frame);

// Periodic Hann window of length n.
std::vector<double> HannWindow(std::size_t n);

// Slaney mel scale: linear (200/3 Hz per mel) below 1 kHz, logarithmic
// above with 27 mels per factor 6.4 in frequency.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters on the Slaney scale with area ("slaney") normalization:
// band edges at n_mels + 2 points evenly spaced in mel between f_min and
// f_max, each triangle scaled by 2 / (upper_edge_hz - lower_edge_hz).
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate,
                double f_min = 0.0, double f_max = -1.0);

  std::size_t n_mels() const { return n_mels_; }
  std::size_t n_bins() const { return n_bins_; }
  // Peak frequency of each triangle.
  const std::vector<double>& center_frequencies() const { return centers_; }
  double weight(std::size_t mel, std::size_t bin) const {
    return weights_[mel * n_bins_ + bin];
  }
  // mel energies from a power spectrum of n_bins() values.
  std::vector<double> Apply(std::span<const double> power) const;

 private:
  std::size_t n_mels_, n_bins_;
  std::vector<double> centers_;
  std::vector<double> weights_;
};

struct LogMelOptions {
  std::size_t n_mels = 128;
  std::size_t hop = 512;
  std::size_t window = 1024;
  double expected_sample_rate = kDefaultSampleRate;
  // Accept any positive rate instead of requiring expected_sample_rate.
  bool allow_any_sample_rate = false;
  double log_floor = 1e-10;
};

// Centered frames (reflect padding of window/2 on both sides), periodic Hann
// window, power spectrum, mel filterbank, natural log of max(x, log_floor).
// Frame count is floor(N / hop) + 1.
LogMelMatrix LogMel(const AudioBuffer& audio, const LogMelOptions& options = {});

enum class PadMode { kMean, kZero };

// Non-overlapping chunks of seg_len frames, each shaped [1, seg_len, n_mels].
// A short final chunk is completed with its own mean frame (kMean) or with
// zeros (kZero).
std::vector<Tensor> Segment(const LogMelMatrix& mel, std::size_t seg_len = 128,
                            PadMode pad = PadMode::kMean);

// "MFLM1": magic, u32 frames, u32 n_mels, little-endian f32 row-major.
void WriteLogMel(const LogMelMatrix& mel, std::ostream& os);
LogMelMatrix ReadLogMel(std::istream& is);
void SaveLogMel(const LogMelMatrix& mel, const std::filesystem::path& path);
LogMelMatrix LoadLogMel(const std::filesystem::path& path);

// 16-bit PCM WAV. Multi-channel input is downmixed by averaging channels.
AudioBuffer ReadWav(const std::filesystem::path& path);
// Writes 16-bit mono PCM; samples are clipped to [-1, 1].
void WriteWav(const AudioBuffer& audio, const std::filesystem::path& path);

}  // namespace mf::dsp

#endif  // MOMENTFUSE_DSP_H_
