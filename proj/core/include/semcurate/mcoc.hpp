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

#ifndef SEMCURATE_MCOC_HPP_
#define SEMCURATE_MCOC_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semcurate/components.hpp"
#include "semcurate/label_map.hpp"
#include "semcurate/taxonomy.hpp"

namespace semcurate {

// Mean Class-wise Object Consistency: every connected component of the
// source map is checked against the candidate's re-estimated labels. A
// component is accepted when a single predicted class covers at least tau
// of its pixels; per-class acceptance rates are averaged over the classes
// present in the source. All ratios are kept exact.

using Rational = boost::multiprecision::cpp_rational;

enum class AcceptanceMode {
  kLiteral,  // dominant fraction >= tau
  kStrict,   // ... and the dominant class equals the source class
};

std::string_view to_string(AcceptanceMode mode);
AcceptanceMode parse_acceptance_mode(std::string_view text);

// Threshold held as an exact decimal fraction (nine digits).
class Threshold {
 public:
  static Threshold from_double(double tau);
  Threshold(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  // count / total >= threshold, in integers.
  bool admits(std::size_t count, std::size_t total) const;

  bool operator==(const Threshold&) const = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

struct Dominance {
  std::optional<ClassId> dominant_class;  // empty when every pixel is void
  std::size_t dominant_count = 0;
  std::size_t size = 0;

  double fraction() const noexcept {
    return size == 0 ? 0.0 : static_cast<double>(dominant_count) / static_cast<double>(size);
  }
};

// Per-class pixel shares of component `index` under `prediction`. Void
// predictions count toward no class; ties go to the lowest class id.
Dominance component_alpha(const ComponentSet& components, std::size_t index,
                          const SemanticMap& prediction);

struct ComponentScore {
  std::size_t component_id = 0;
  ClassId source_class = kVoidId;
  std::optional<ClassId> dominant_class;
  std::size_t dominant_count = 0;
  std::size_t size = 0;
  bool accepted = false;

  double dominant_fraction() const noexcept {
    return size == 0 ? 0.0 : static_cast<double>(dominant_count) / static_cast<double>(size);
  }
  bool operator==(const ComponentScore&) const = default;
};

struct ClassAcceptance {
  std::size_t accepted = 0;
  std::size_t total = 0;

  Rational ratio() const { return Rational(accepted, total); }
  bool operator==(const ClassAcceptance&) const = default;
};

struct ScoreOptions {
  double tau = 0.7;
  AcceptanceMode mode = AcceptanceMode::kLiteral;
  Connectivity connectivity = Connectivity::kFour;
};

struct McocReport {
  std::size_t candidate_id = 0;
  Threshold tau = Threshold::from_double(0.7);
  AcceptanceMode mode = AcceptanceMode::kLiteral;
  Connectivity connectivity = Connectivity::kFour;
  std::vector<ComponentScore> per_component;
  std::map<ClassId, ClassAcceptance> per_class;  // keys = classes present in the source
  Rational score_exact{0};

  double score() const { return static_cast<double>(score_exact); }
  ClassSet classes_present() const;

  bool operator==(const McocReport&) const = default;
};

McocReport score_candidate(const SemanticMap& source, const SemanticMap& prediction,
                           const ScoreOptions& options = {}, std::size_t candidate_id = 0);
// Reuses precomputed source components.
McocReport score_candidate(const ComponentSet& source_components, const SemanticMap& prediction,
                           const ScoreOptions& options = {}, std::size_t candidate_id = 0);

struct SelectionResult {
  std::string source_id;
  std::vector<std::size_t> ranked;    // candidate ids, best first
  std::vector<std::size_t> selected;  // first min(k, N) of ranked
  std::vector<McocReport> reports;    // in input order
};

// Descending score, ties by ascending candidate id.
SelectionResult rank_and_select(std::string source_id, std::vector<McocReport> reports,
                                std::size_t k);

enum class LabelPairing {
  kPseudo,    // re-estimated labels of the generated image
  kOriginal,  // the synthetic source labels (ablation only)
};

std::string_view to_string(LabelPairing pairing);
LabelPairing parse_label_pairing(std::string_view text);

struct CandidateFiles {
  std::string image_ref;
  std::string pseudo_label_ref;
};

struct CuratedPair {
  std::string source_id;
  std::size_t candidate_id = 0;
  std::string image_ref;
  std::string label_ref;
  Rational score{0};

  bool operator==(const CuratedPair&) const = default;
};

// One pair per selected candidate, in selection order.
std::vector<CuratedPair> pair_with_pseudolabels(
    const SelectionResult& selection, const std::map<std::size_t, CandidateFiles>& candidates,
    LabelPairing pairing = LabelPairing::kPseudo, const std::string& original_label_ref = {});

// Audit-log line (JSON) and its inverse.
std::string serialize_report(const McocReport& report, const ClassTaxonomy* taxonomy = nullptr);
McocReport parse_report(std::string_view line);

std::string rational_string(const Rational& r);
Rational parse_rational(std::string_view text);

}  // namespace semcurate

#endif  // SEMCURATE_MCOC_HPP_
