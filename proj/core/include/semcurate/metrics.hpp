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

#ifndef SEMCURATE_METRICS_HPP_
#define SEMCURATE_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semcurate/label_map.hpp"
#include "semcurate/mcoc.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {

// K x K counts, ground truth by row and prediction by column. Void ground
// truth is skipped; a void prediction on labeled ground truth lands in a
// per-row overflow column and counts only as a false negative.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);

  std::size_t num_classes() const noexcept { return k_; }

  void accumulate(const SemanticMap& prediction, const SemanticMap& ground_truth);
  void merge(const ConfusionMatrix& other);

  std::uint64_t count(ClassId gt, ClassId pred) const { return counts_[gt * k_ + pred]; }
  std::uint64_t void_predictions(ClassId gt) const { return void_pred_[gt]; }
  // Labeled ground-truth pixels seen so far.
  std::uint64_t total() const noexcept { return total_; }

  std::uint64_t row_sum(ClassId gt) const;  // includes the overflow column
  std::uint64_t column_sum(ClassId pred) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> void_pred_;
  std::uint64_t total_ = 0;
};

ConfusionMatrix accumulate(ConfusionMatrix cm, const SemanticMap& prediction,
                           const SemanticMap& ground_truth);

struct ClassIou {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::optional<Rational> iou;  // empty when the class is not evaluated

  bool operator==(const ClassIou&) const = default;
};

struct IouReport {
  std::vector<ClassIou> per_class;  // indexed by class id
  ClassSet evaluated;
  Rational miou{0};

  double miou_value() const { return static_cast<double>(miou); }
  std::optional<double> iou_value(ClassId c) const;
};

// IoU = TP / (TP + FP + FN) per evaluated class; a class with no pixels on
// either side scores 0. mIoU averages the evaluated classes only.
IouReport iou_report(const ConfusionMatrix& cm, const ClassSet& evaluated);

// Aligned table in taxonomy order: `<label> | mIoU | Rd | Sdwk | ...`, values
// in percent with one decimal, "-" for classes outside the evaluated set.
std::string format_iou_table(const IouReport& report, const ClassTaxonomy& taxonomy,
                             const std::string& row_label = "result");
std::string serialize_iou_report(const IouReport& report, const ClassTaxonomy& taxonomy);

}  // namespace semcurate

#endif  // SEMCURATE_METRICS_HPP_
