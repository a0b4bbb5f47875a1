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

#include "momentfuse/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "momentfuse/error.h"

namespace mf {
namespace {

void CheckAligned(std::span<const Prediction> predictions,
                  std::span<const std::size_t> truths) {
  if (predictions.empty()) throw ValidationError("no predictions to score");
  if (predictions.size() != truths.size()) {
    throw ValidationError("predictions and ground truths are misaligned (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(truths.size()) + ")");
  }
}

bool InTopK(const Prediction& p, std::size_t truth, std::size_t k) {
  // Counting strictly better classes avoids a sort: the truth is in the
  // top-k exactly when fewer than k classes precede it in the tie-broken
  // order.
  const double pt = p.probs.at(truth);
  std::size_t ahead = 0;
  for (std::size_t c = 0; c < p.probs.size(); ++c) {
    if (p.probs[c] > pt || (p.probs[c] == pt && c < truth)) ++ahead;
    if (ahead >= k) return false;
  }
  return true;
}

std::string Percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * v << "%";
  return os.str();
}

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::vector<std::size_t> TopKLabels(std::span<const double> probs,
                                    std::size_t k) {
  if (k < 1) throw ValidationError("top-k: k must be >= 1");
  if (k > probs.size()) {
    throw ValidationError("top-k: k = " + std::to_string(k) + " exceeds " +
                          std::to_string(probs.size()) + " classes");
  }
  std::vector<std::size_t> idx(probs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (probs[a] != probs[b]) return probs[a] > probs[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

std::size_t TopKHits(std::span<const Prediction> predictions,
                     std::span<const std::size_t> truths, std::size_t k) {
  CheckAligned(predictions, truths);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::size_t c = predictions[i].probs.size();
    if (k < 1 || k > c) {
      throw ValidationError("top-k: k = " + std::to_string(k) +
                            " invalid for " + std::to_string(c) + " classes");
    }
    if (truths[i] >= c) {
      throw ValidationError("ground truth " + std::to_string(truths[i]) +
                            " outside " + std::to_string(c) + " classes");
    }
    if (InTopK(predictions[i], truths[i], k)) ++hits;
  }
  return hits;
}

std::size_t ErrorCount(std::span<const Prediction> predictions,
                       std::span<const std::size_t> truths, std::size_t k) {
  return predictions.size() - TopKHits(predictions, truths, k);
}

double ErrorScore(std::span<const Prediction> predictions,
                  std::span<const std::size_t> truths, std::size_t k) {
  return 1.0 - TopKAccuracy(predictions, truths, k);
}

double TopKAccuracy(std::span<const Prediction> predictions,
                    std::span<const std::size_t> truths, std::size_t k) {
  const std::size_t hits = TopKHits(predictions, truths, k);
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

EvalResult Evaluate(std::span<const Prediction> predictions,
                    std::span<const std::size_t> truths,
                    std::size_t n_classes) {
  CheckAligned(predictions, truths);
  for (const auto& p : predictions) {
    if (p.probs.size() != n_classes) {
      throw ValidationError("prediction for '" + p.sample_id + "' has " +
                            std::to_string(p.probs.size()) + " classes, expected " +
                            std::to_string(n_classes));
    }
  }
  for (std::size_t t : truths) {
    if (t >= n_classes) {
      throw ValidationError("label index " + std::to_string(t) +
                            " outside the class list");
    }
  }
  EvalResult r;
  r.samples = predictions.size();
  r.classes = n_classes;
  const std::size_t kmax = std::min<std::size_t>(5, n_classes);
  for (std::size_t k = 1; k <= kmax; ++k) {
    r.error_by_k[k] = ErrorScore(predictions, truths, k);
  }
  r.top1 = TopKAccuracy(predictions, truths, 1);
  r.top5 = TopKAccuracy(predictions, truths, kmax);

  std::vector<std::size_t> hits(n_classes, 0);
  r.per_class_count.assign(n_classes, 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    ++r.per_class_count[truths[i]];
    if (InTopK(predictions[i], truths[i], 1)) ++hits[truths[i]];
  }
  r.per_class.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (r.per_class_count[c] > 0) {
      r.per_class[c] = static_cast<double>(hits[c]) /
                       static_cast<double>(r.per_class_count[c]);
    }
  }
  return r;
}

std::string RenderReportText(const std::string& title, const EvalResult& result,
                             const ClassList& classes) {
  std::ostringstream os;
  os << title << "\n";
  os << "samples " << result.samples << "  top-1 " << Percent(result.top1)
     << "  top-5 " << Percent(result.top5) << "\n";
  os << "error score by k:";
  for (const auto& [k, e] : result.error_by_k) os << "  e@" << k << "=" << Fixed(e, 4);
  os << "\n\n";

  std::size_t width = 5;
  for (const auto& n : classes.names()) width = std::max(width, n.size());
  auto cell = [&](std::size_t c) {
    std::ostringstream cs;
    cs << std::left << std::setw(static_cast<int>(width)) << classes.name(c)
       << "  "
       << std::right << std::setw(5)
       << (result.per_class[c] ? Fixed(*result.per_class[c], 3) : "  n/a");
    return cs.str();
  };
  const std::size_t rows = (classes.size() + 1) / 2;
  std::ostringstream head;
  head << std::left << std::setw(static_cast<int>(width)) << "class" << "  "
       << "  acc";
  os << head.str() << "    " << head.str() << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    os << cell(i);
    if (i + rows < classes.size()) os << "    " << cell(i + rows);
    os << "\n";
  }
  os << "\nper-class accuracy is top-1\n";
  return os.str();
}

std::string RenderReportTsv(const std::string& title, const EvalResult& result,
                            const ClassList& classes) {
  std::ostringstream os;
  os << "configuration\t" << title << "\n";
  os << "samples\t" << result.samples << "\n";
  os << "top1\t" << Fixed(result.top1, 6) << "\n";
  os << "top5\t" << Fixed(result.top5, 6) << "\n";
  for (const auto& [k, e] : result.error_by_k) {
    os << "error@" << k << "\t" << Fixed(e, 6) << "\n";
  }
  os << "class\tlabel\tcount\ttop1\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    os << c << "\t" << classes.name(c) << "\t" << result.per_class_count.at(c)
       << "\t"
       << (result.per_class.at(c) ? Fixed(*result.per_class[c], 6) : "NA")
       << "\n";
  }
  return os.str();
}

std::string RenderPredictionsTsv(std::span<const Prediction> predictions) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& p : predictions) {
    os << p.sample_id;
    for (double v : p.probs) os << "\t" << v;
    os << "\n";
  }
  return os.str();
}

std::vector<Prediction> ParsePredictionsTsv(std::istream& is,
                                            const std::string& source) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    Prediction p;
    std::size_t start = 0;
    bool first = true;
    while (start <= line.size()) {
      const std::size_t tab = std::min(line.find('\t', start), line.size());
      const std::string_view cell(line.data() + start, tab - start);
      if (first) {
        p.sample_id = std::string(cell);
        first = false;
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size() ||
            !std::isfinite(v) || v < 0.0) {
          throw FormatError(where + ": bad probability '" + std::string(cell) + "'");
        }
        p.probs.push_back(v);
      }
      start = tab + 1;
    }
    if (p.sample_id.empty() || p.probs.empty()) {
      throw FormatError(where + ": expected sample_id and probabilities");
    }
    if (!out.empty() && out.front().probs.size() != p.probs.size()) {
      throw FormatError(where + ": class count differs from the first row");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace mf
