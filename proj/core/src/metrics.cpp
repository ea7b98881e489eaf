/* Copyright 2026 The semcurate Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "semcurate/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "semcurate/error.hpp"

namespace semcurate {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : k_(num_classes), counts_(num_classes * num_classes, 0), void_pred_(num_classes, 0) {
  if (num_classes == 0 || num_classes >= kVoidId) {
    throw Error(ErrorKind::kInvalidArgument, "confusion matrix needs 1..254 classes");
  }
}

void ConfusionMatrix::accumulate(const SemanticMap& prediction, const SemanticMap& ground_truth) {
  if (!prediction.same_shape(ground_truth)) {
    throw Error(ErrorKind::kInvalidArgument,
                "dimension mismatch: prediction " + std::to_string(prediction.width()) + "x" +
                    std::to_string(prediction.height()) + " vs ground truth " +
                    std::to_string(ground_truth.width()) + "x" +
                    std::to_string(ground_truth.height()));
  }
  const auto gt = ground_truth.data();
  const auto pr = prediction.data();
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const ClassId g = gt[i];
    if (g == kVoidId) continue;
    if (g >= k_) {
      throw Error(ErrorKind::kValidation, "ground truth class " + std::to_string(g) +
                                              " outside taxonomy of " + std::to_string(k_));
    }
    const ClassId p = pr[i];
    if (p == kVoidId) {
      ++void_pred_[g];
    } else if (p >= k_) {
      throw Error(ErrorKind::kValidation,
                  "predicted class " + std::to_string(p) + " outside taxonomy of " + std::to_string(k_));
    } else {
      ++counts_[g * k_ + p];
    }
    ++total_;
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw Error(ErrorKind::kInvalidArgument, "confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  for (std::size_t i = 0; i < k_; ++i) void_pred_[i] += other.void_pred_[i];
  total_ += other.total_;
}

std::uint64_t ConfusionMatrix::row_sum(ClassId gt) const {
  std::uint64_t s = void_pred_[gt];
  for (std::size_t p = 0; p < k_; ++p) s += counts_[gt * k_ + p];
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(ClassId pred) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < k_; ++g) s += counts_[g * k_ + pred];
  return s;
}

ConfusionMatrix accumulate(ConfusionMatrix cm, const SemanticMap& prediction,
                           const SemanticMap& ground_truth) {
  cm.accumulate(prediction, ground_truth);
  return cm;
}

std::optional<double> IouReport::iou_value(ClassId c) const {
  if (c >= per_class.size() || !per_class[c].iou) return std::nullopt;
  return static_cast<double>(*per_class[c].iou);
}

IouReport iou_report(const ConfusionMatrix& cm, const ClassSet& evaluated) {
  if (evaluated.empty()) throw Error(ErrorKind::kInvalidArgument, "evaluated class set is empty");
  for (ClassId c : evaluated) {
    if (c >= cm.num_classes()) {
      throw Error(ErrorKind::kInvalidArgument, "evaluated class " + std::to_string(c) +
                                                   " outside the confusion matrix");
    }
  }
  IouReport report;
  report.evaluated = evaluated;
  report.per_class.resize(cm.num_classes());
  Rational sum{0};
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const auto id = static_cast<ClassId>(c);
    ClassIou& row = report.per_class[c];
    row.tp = cm.count(id, id);
    row.fn = cm.row_sum(id) - row.tp;
    row.fp = cm.column_sum(id) - row.tp;
    if (!evaluated.contains(id)) continue;
    const std::uint64_t denom = row.tp + row.fp + row.fn;
    row.iou = denom == 0 ? Rational(0) : Rational(row.tp, denom);
    sum += *row.iou;
  }
  report.miou = sum / Rational(evaluated.size());
  return report;
}

namespace {

std::string percent(const Rational& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * static_cast<double>(r);
  return os.str();
}

}  // namespace

std::string format_iou_table(const IouReport& report, const ClassTaxonomy& taxonomy,
                             const std::string& row_label) {
  std::vector<std::string> header{"Method", "mIoU"};
  std::vector<std::string> row{row_label, percent(report.miou)};
  for (const auto& info : taxonomy.classes()) {
    header.push_back(info.short_name);
    const bool has = info.id < report.per_class.size() && report.per_class[info.id].iou;
    row.push_back(has ? percent(*report.per_class[info.id].iou) : "-");
  }
  std::ostringstream os;
  for (int line = 0; line < 2; ++line) {
    const auto& cells = line == 0 ? header : row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t width = std::max(header[i].size(), row[i].size());
      if (i > 0) os << " | ";
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width)) << cells[i];
      } else {
        os << std::right << std::setw(static_cast<int>(width)) << cells[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string serialize_iou_report(const IouReport& report, const ClassTaxonomy& taxonomy) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& row = report.per_class[c];
    nlohmann::json j = {{"class", c},
                        {"name", taxonomy.contains(static_cast<ClassId>(c))
                                     ? taxonomy.info(static_cast<ClassId>(c)).name
                                     : std::string()},
                        {"tp", row.tp},
                        {"fp", row.fp},
                        {"fn", row.fn}};
    if (row.iou) {
      j["iou"] = static_cast<double>(*row.iou);
      j["iou_exact"] = rational_string(*row.iou);
    } else {
      j["iou"] = nullptr;
    }
    classes.push_back(std::move(j));
  }
  return nlohmann::json{{"miou", report.miou_value()},
                        {"miou_exact", rational_string(report.miou)},
                        {"evaluated", report.evaluated},
                        {"per_class", classes}}
      .dump();
}

}  // namespace semcurate
