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

#include "momentfuse/dsp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "momentfuse/binary_io.h"
#include "momentfuse/error.h"

namespace mf::dsp {
namespace {

constexpr std::string_view kLogMelMagic = "MFLM1";

// Slaney constants.
constexpr double kMelLinearStep = 200.0 / 3.0;
constexpr double kMelBreakHz = 1000.0;
constexpr double kMelBreak = kMelBreakHz / kMelLinearStep;  // 15

double MelLogStep() { return std::log(6.4) / 27.0; }

bool IsPowerOfTwo(std::size_t n) { return n && (n & (n - 1)) == 0; }

void FftRadix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles taken from one table so error does not accumulate by recurrence.
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + half] * twiddle[k * stride];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

void DftDirect(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi *
                         static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  a = std::move(out);
}

// numpy-style "reflect" (edge sample not repeated), folded for any offset.
std::size_t ReflectIndex(long i, std::size_t n) {
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

void Dft(std::vector<std::complex<double>>& data) {
  if (data.empty()) return;
  if (IsPowerOfTwo(data.size())) {
    FftRadix2(data);
  } else {
    DftDirect(data);
  }
}

std::vector<double> DftMagnitude(std::span<const double> frame) {
  const std::size_t w = frame.size();
  if (w < 2 || w % 2 != 0) {
    throw ValidationError("dft_magnitude: frame length must be even and >= 2");
  }
  std::vector<std::complex<double>> buf(w);
  for (std::size_t i = 0; i < w; ++i) {
    if (!std::isfinite(frame[i])) {
      throw ValidationError("dft_magnitude: non-finite sample at index " +
                            std::to_string(i));
    }
    buf[i] = frame[i];
  }
  Dft(buf);
  std::vector<double> mag(w / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

double HzToMel(double hz) {
  if (hz < kMelBreakHz) return hz / kMelLinearStep;
  return kMelBreak + std::log(hz / kMelBreakHz) / MelLogStep();
}

double MelToHz(double mel) {
  if (mel < kMelBreak) return mel * kMelLinearStep;
  return kMelBreakHz * std::exp(MelLogStep() * (mel - kMelBreak));
}

MelFilterbank::MelFilterbank(std::size_t n_mels, std::size_t n_fft,
                             double sample_rate, double f_min, double f_max)
    : n_mels_(n_mels), n_bins_(n_fft / 2 + 1) {
  if (n_mels == 0 || n_fft < 2 || !(sample_rate > 0.0)) {
    throw ValidationError("mel filterbank: invalid configuration");
  }
  if (f_max < 0.0) f_max = sample_rate / 2.0;
  if (!(f_min >= 0.0) || !(f_max > f_min)) {
    throw ValidationError("mel filterbank: need 0 <= f_min < f_max");
  }
  const double mel_lo = HzToMel(f_min);
  const double mel_hi = HzToMel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1));
  }
  centers_.assign(edges.begin() + 1, edges.end() - 1);
  weights_.assign(n_mels * n_bins_, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < n_bins_; ++k) {
      const double f = sample_rate * static_cast<double>(k) /
                       static_cast<double>(n_fft);
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      weights_[m * n_bins_ + k] =
          std::max(0.0, std::min(rising, falling)) * norm;
    }
  }
}

std::vector<double> MelFilterbank::Apply(std::span<const double> power) const {
  if (power.size() != n_bins_) {
    throw ShapeError("mel filterbank: expected " + std::to_string(n_bins_) +
                     " bins, got " + std::to_string(power.size()));
  }
  std::vector<double> out(n_mels_, 0.0);
  for (std::size_t m = 0; m < n_mels_; ++m) {
    const double* w = weights_.data() + m * n_bins_;
    double acc = 0.0;
    for (std::size_t k = 0; k < n_bins_; ++k) acc += w[k] * power[k];
    out[m] = acc;
  }
  return out;
}

LogMelMatrix LogMel(const AudioBuffer& audio, const LogMelOptions& options) {
  if (audio.samples.empty()) throw ValidationError("logmel: empty audio");
  if (!(audio.sample_rate > 0.0)) {
    throw ValidationError("logmel: sample rate must be positive");
  }
  if (!options.allow_any_sample_rate &&
      audio.sample_rate != options.expected_sample_rate) {
    throw ValidationError(
        "logmel: sample rate " + std::to_string(audio.sample_rate) +
        " Hz, expected " + std::to_string(options.expected_sample_rate) +
        " Hz (resample first or allow any rate)");
  }
  if (options.hop == 0 || options.window < 2 || options.window % 2 != 0) {
    throw ValidationError("logmel: hop must be > 0 and window even >= 2");
  }
  for (double s : audio.samples) {
    if (!std::isfinite(s)) throw ValidationError("logmel: non-finite sample");
  }

  const std::size_t n = audio.samples.size();
  const std::size_t win = options.window;
  const long half = static_cast<long>(win / 2);
  const std::size_t frames = n / options.hop + 1;
  const std::vector<double> window = HannWindow(win);
  const MelFilterbank bank(options.n_mels, win, audio.sample_rate);

  LogMelMatrix out;
  out.frames = frames;
  out.n_mels = options.n_mels;
  out.hop = options.hop;
  out.window = win;
  out.values.resize(frames * options.n_mels);

  std::vector<std::complex<double>> buf(win);
  std::vector<double> power(win / 2 + 1);
  for (std::size_t f = 0; f < frames; ++f) {
    const long start = static_cast<long>(f * options.hop) - half;
    for (std::size_t i = 0; i < win; ++i) {
      buf[i] = audio.samples[ReflectIndex(start + static_cast<long>(i), n)] *
               window[i];
    }
    Dft(buf);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
    const std::vector<double> mel = bank.Apply(power);
    for (std::size_t m = 0; m < options.n_mels; ++m) {
      out.values[f * options.n_mels + m] =
          std::log(std::max(mel[m], options.log_floor));
    }
  }
  return out;
}

std::vector<Tensor> Segment(const LogMelMatrix& mel, std::size_t seg_len,
                            PadMode pad) {
  if (mel.frames == 0) throw ValidationError("segment: logmel has no frames");
  if (seg_len == 0) throw ValidationError("segment: seg_len must be > 0");
  const std::size_t nm = mel.n_mels;
  const std::size_t count = (mel.frames + seg_len - 1) / seg_len;
  std::vector<Tensor> segments;
  segments.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t first = s * seg_len;
    const std::size_t real = std::min(seg_len, mel.frames - first);
    Tensor seg({1, seg_len, nm});
    std::copy_n(mel.values.begin() + static_cast<long>(first * nm), real * nm,
                seg.data());
    if (real < seg_len && pad == PadMode::kMean) {
      std::vector<double> mean(nm, 0.0);
      for (std::size_t f = 0; f < real; ++f) {
        for (std::size_t m = 0; m < nm; ++m) mean[m] += seg[f * nm + m];
      }
      for (double& v : mean) v /= static_cast<double>(real);
      for (std::size_t f = real; f < seg_len; ++f) {
        std::copy(mean.begin(), mean.end(), seg.data() + f * nm);
      }
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

void WriteLogMel(const LogMelMatrix& mel, std::ostream& os) {
  binio::WriteMagic(os, kLogMelMagic);
  binio::WriteU32(os, binio::CheckedU32(mel.frames, "frame count"));
  binio::WriteU32(os, binio::CheckedU32(mel.n_mels, "mel count"));
  binio::WriteF32Array(os, mel.values.data(), mel.values.size());
  if (!os) throw FormatError("logmel: write failed");
}

LogMelMatrix ReadLogMel(std::istream& is) {
  binio::ExpectMagic(is, kLogMelMagic, "logmel file");
  LogMelMatrix mel;
  mel.frames = binio::ReadU32(is, "logmel header");
  mel.n_mels = binio::ReadU32(is, "logmel header");
  mel.values.resize(mel.frames * mel.n_mels);
  binio::ReadF32Array(is, mel.values.data(), mel.values.size(),
                      "logmel payload");
  return mel;
}

void SaveLogMel(const LogMelMatrix& mel, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  WriteLogMel(mel, os);
}

LogMelMatrix LoadLogMel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read " + path.string());
  return ReadLogMel(is);
}

}  // namespace mf::dsp
