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

// Slow reference implementations used to cross-check the library.

#ifndef MOMENTFUSE_TESTS_ORACLES_H_
#define MOMENTFUSE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "momentfuse/tensor.h"

namespace mf::oracle {

inline Tensor RandomTensor(Shape shape, std::mt19937_64& rng,
                           double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.storage()) v = u(rng);
  return t;
}

// Direct summation; input [N,C,H,W], weight [O,C,K,K].
inline Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
                     std::size_t stride, std::size_t pad) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t o = w.dim(0), k = w.dim(2);
  const std::size_t oh = (h + 2 * pad - k) / stride + 1;
  const std::size_t ow = (wd + 2 * pad - k) / stride + 1;
  Tensor y({n, o, oh, ow});
  for (std::size_t bi = 0; bi < n; ++bi)
    for (std::size_t oc = 0; oc < o; ++oc)
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
          double acc = b[oc];
          for (std::size_t ic = 0; ic < c; ++ic)
            for (std::size_t ki = 0; ki < k; ++ki)
              for (std::size_t kj = 0; kj < k; ++kj) {
                const long r = static_cast<long>(i * stride + ki) - static_cast<long>(pad);
                const long s = static_cast<long>(j * stride + kj) - static_cast<long>(pad);
                if (r < 0 || s < 0 || r >= static_cast<long>(h) ||
                    s >= static_cast<long>(wd)) {
                  continue;
                }
                acc += x[((bi * c + ic) * h + r) * wd + s] *
                       w[((oc * c + ic) * k + ki) * k + kj];
              }
          y[((bi * o + oc) * oh + i) * ow + j] = acc;
        }
  return y;
}

inline Tensor MaxPool2x2(const Tensor& x) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor y({n, c, h / 2, w / 2});
  for (std::size_t p = 0; p < n * c; ++p)
    for (std::size_t i = 0; i < h / 2; ++i)
      for (std::size_t j = 0; j < w / 2; ++j) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t di = 0; di < 2; ++di)
          for (std::size_t dj = 0; dj < 2; ++dj)
            m = std::max(m, x[(p * h + 2 * i + di) * w + 2 * j + dj]);
        y[(p * (h / 2) + i) * (w / 2) + j] = m;
      }
  return y;
}

inline Tensor Dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(0);
  Tensor y({n, out});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * x[r * in + i];
      y[r * out + o] = acc;
    }
  return y;
}

// Per-channel normalisation with the given statistics.
inline Tensor BatchNormEval(const Tensor& x, const Tensor& gamma,
                            const Tensor& beta, const Tensor& mean,
                            const Tensor& var, double eps) {
  Tensor y = x;
  const std::size_t n = x.dim(0), c = x.dim(1);
  const std::size_t area = x.size() / (n * c);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t s = 0; s < area; ++s) {
        double& v = y[(b * c + ch) * area + s];
        v = gamma[ch] * (v - mean[ch]) / std::sqrt(var[ch] + eps) + beta[ch];
      }
  return y;
}

inline Tensor Relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.storage()) v = v > 0.0 ? v : 0.0;
  return y;
}

inline Tensor GlobalAvgPool(const Tensor& x) {
  const std::size_t n = x.dim(0), c = x.dim(1);
  const std::size_t area = x.dim(2) * x.dim(3);
  Tensor y({n, c});
  for (std::size_t p = 0; p < n * c; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < area; ++i) s += x[p * area + i];
    y[p] = s / static_cast<double>(area);
  }
  return y;
}

inline std::vector<std::complex<double>> Dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
      acc += x[t] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  return out;
}

// Labels by descending probability, ascending index on ties, via full sort.
inline std::vector<std::size_t> SortedLabels(std::span<const double> probs) {
  std::vector<std::size_t> idx(probs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });
  return idx;
}

// One sample: min over the k produced labels of d(l_j, g), d = 0 on a match.
inline int SampleError(std::span<const double> probs, std::size_t truth,
                       std::size_t k) {
  const auto labels = SortedLabels(probs);
  int e = 1;
  for (std::size_t j = 0; j < k; ++j) e = std::min(e, labels[j] == truth ? 0 : 1);
  return e;
}

inline double Cosine(std::span<const double> u, std::span<const double> v) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return uv / std::sqrt(uu * vv);
}

inline double Huber(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - y[i]);
    s += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  return s / static_cast<double>(x.size());
}

// Independent mel formulas: linear 200/3 Hz per mel below 1 kHz, then
// logarithmic with 27 mels per factor 6.4.
inline double SlaneyHzToMel(double hz) {
  const double lin = hz / (200.0 / 3.0);
  if (hz < 1000.0) return lin;
  return 15.0 + std::log(hz / 1000.0) * 27.0 / std::log(6.4);
}
inline double SlaneyMelToHz(double mel) {
  if (mel < 15.0) return mel * 200.0 / 3.0;
  return 1000.0 * std::exp((mel - 15.0) * std::log(6.4) / 27.0);
}

// Index of the mel band whose centre lies nearest `hz`, from scratch.
inline std::size_t NearestMelCenter(double hz, std::size_t n_mels, double sr) {
  const double top = SlaneyHzToMel(sr / 2.0);
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double c = SlaneyMelToHz(top * static_cast<double>(m + 1) /
                                static_cast<double>(n_mels + 1));
    if (std::abs(c - hz) < best_d) {
      best_d = std::abs(c - hz);
      best = m;
    }
  }
  return best;
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("momentfuse_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mf::oracle

#endif  // MOMENTFUSE_TESTS_ORACLES_H_
