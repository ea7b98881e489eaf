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
#include "semcurate/mcoc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "semcurate/error.hpp"

namespace semcurate {
namespace {

using nlohmann::json;

void check_same_dims(int sw, int sh, const SemanticMap& prediction) {
  if (sw != prediction.width() || sh != prediction.height()) {
    throw Error(ErrorKind::kInvalidArgument,
                "dimension mismatch: source " + std::to_string(sw) + "x" + std::to_string(sh) +
                    " vs prediction " + std::to_string(prediction.width()) + "x" +
                    std::to_string(prediction.height()));
  }
}

Dominance dominance_of(const Component& comp, const SemanticMap& prediction) {
  std::array<std::size_t, 256> counts{};
  for (const Pixel& p : comp.pixels) ++counts[prediction.at(p.x, p.y)];
  Dominance d;
  d.size = comp.size();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (c == kVoidId) continue;
    if (counts[c] > d.dominant_count) {
      d.dominant_count = counts[c];
      d.dominant_class = static_cast<ClassId>(c);
    }
  }
  return d;
}

}  // namespace

std::string_view to_string(AcceptanceMode mode) {
  return mode == AcceptanceMode::kStrict ? "strict" : "literal";
}

AcceptanceMode parse_acceptance_mode(std::string_view text) {
  if (text == "literal") return AcceptanceMode::kLiteral;
  if (text == "strict") return AcceptanceMode::kStrict;
  throw Error(ErrorKind::kInvalidArgument, "unknown acceptance mode '" + std::string(text) + "'");
}

Threshold Threshold::from_double(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0 || tau > 1.0) {
    throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0, 1]");
  }
  return Threshold(std::llround(tau * 1e9), 1'000'000'000);
}

Threshold::Threshold(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num > den) {
    throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0, 1]");
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

bool Threshold::admits(std::size_t count, std::size_t total) const {
  using i128 = __int128;
  return static_cast<i128>(count) * den_ >= static_cast<i128>(num_) * static_cast<i128>(total);
}

Dominance component_alpha(const ComponentSet& components, std::size_t index,
                          const SemanticMap& prediction) {
  check_same_dims(components.width(), components.height(), prediction);
  if (index >= components.size()) {
    throw Error(ErrorKind::kInvalidArgument, "component index out of range");
  }
  return dominance_of(components[index], prediction);
}

ClassSet McocReport::classes_present() const {
  ClassSet out;
  for (const auto& [c, _] : per_class) out.insert(c);
  return out;
}

McocReport score_candidate(const SemanticMap& source, const SemanticMap& prediction,
                           const ScoreOptions& options, std::size_t candidate_id) {
  check_same_dims(source.width(), source.height(), prediction);
  return score_candidate(connected_components(source, options.connectivity), prediction, options,
                         candidate_id);
}

McocReport score_candidate(const ComponentSet& components, const SemanticMap& prediction,
                           const ScoreOptions& options, std::size_t candidate_id) {
  check_same_dims(components.width(), components.height(), prediction);
  if (components.size() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "source map is entirely void");
  }
  McocReport report;
  report.candidate_id = candidate_id;
  report.tau = Threshold::from_double(options.tau);
  report.mode = options.mode;
  report.connectivity = components.connectivity();
  report.per_component.reserve(components.size());

  for (const Component& comp : components.components()) {
    const Dominance d = dominance_of(comp, prediction);
    ComponentScore s;
    s.component_id = comp.component_id;
    s.source_class = comp.class_id;
    s.dominant_class = d.dominant_class;
    s.dominant_count = d.dominant_count;
    s.size = d.size;
    s.accepted = d.dominant_class.has_value() && report.tau.admits(d.dominant_count, d.size);
    if (options.mode == AcceptanceMode::kStrict) {
      s.accepted = s.accepted && *d.dominant_class == comp.class_id;
    }
    auto& cls = report.per_class[comp.class_id];
    ++cls.total;
    if (s.accepted) ++cls.accepted;
    report.per_component.push_back(s);
  }

  Rational sum{0};
  for (const auto& [_, acc] : report.per_class) sum += acc.ratio();
  report.score_exact = sum / Rational(report.per_class.size());
  return report;
}

SelectionResult rank_and_select(std::string source_id, std::vector<McocReport> reports,
                                std::size_t k) {
  if (reports.empty()) throw Error(ErrorKind::kInvalidArgument, "no candidate reports to rank");
  if (k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be at least 1");
  std::set<std::size_t> ids;
  for (const auto& r : reports) {
    if (!ids.insert(r.candidate_id).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate candidate id " + std::to_string(r.candidate_id));
    }
  }

  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (reports[a].score_exact != reports[b].score_exact) {
      return reports[a].score_exact > reports[b].score_exact;
    }
    return reports[a].candidate_id < reports[b].candidate_id;
  });

  SelectionResult result;
  result.source_id = std::move(source_id);
  for (std::size_t i : order) result.ranked.push_back(reports[i].candidate_id);
  const std::size_t take = std::min(k, reports.size());
  result.selected.assign(result.ranked.begin(), result.ranked.begin() + static_cast<std::ptrdiff_t>(take));
  result.reports = std::move(reports);
  return result;
}

std::string_view to_string(LabelPairing pairing) {
  return pairing == LabelPairing::kOriginal ? "original" : "pseudo";
}

LabelPairing parse_label_pairing(std::string_view text) {
  if (text == "pseudo") return LabelPairing::kPseudo;
  if (text == "original") return LabelPairing::kOriginal;
  throw Error(ErrorKind::kInvalidArgument, "unknown label pairing '" + std::string(text) + "'");
}

std::vector<CuratedPair> pair_with_pseudolabels(const SelectionResult& selection,
                                                const std::map<std::size_t, CandidateFiles>& candidates,
                                                LabelPairing pairing,
                                                const std::string& original_label_ref) {
  if (pairing == LabelPairing::kOriginal && original_label_ref.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "original-label pairing needs the source label ref");
  }
  std::vector<CuratedPair> out;
  out.reserve(selection.selected.size());
  for (std::size_t id : selection.selected) {
    auto it = candidates.find(id);
    if (it == candidates.end() || it->second.image_ref.empty() ||
        (pairing == LabelPairing::kPseudo && it->second.pseudo_label_ref.empty())) {
      throw Error(ErrorKind::kInvalidArgument, "source '" + selection.source_id +
                                                   "': missing prediction for selected candidate " +
                                                   std::to_string(id));
    }
    CuratedPair p;
    p.source_id = selection.source_id;
    p.candidate_id = id;
    p.image_ref = it->second.image_ref;
    p.label_ref = pairing == LabelPairing::kPseudo ? it->second.pseudo_label_ref : original_label_ref;
    for (const auto& r : selection.reports) {
      if (r.candidate_id == id) p.score = r.score_exact;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string rational_string(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(boost::multiprecision::cpp_int(std::string(text)));
    }
    boost::multiprecision::cpp_int num(std::string(text.substr(0, slash)));
    boost::multiprecision::cpp_int den(std::string(text.substr(slash + 1)));
    if (den == 0) throw Error(ErrorKind::kParse, "zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw Error(ErrorKind::kParse, "bad rational '" + std::string(text) + "'");
  }
}

std::string serialize_report(const McocReport& r, const ClassTaxonomy* taxonomy) {
  json classes = json::array();
  for (const auto& [c, acc] : r.per_class) {
    json row = {{"class", c}, {"accepted", acc.accepted}, {"total", acc.total}};
    if (taxonomy && taxonomy->contains(c)) row["name"] = taxonomy->info(c).name;
    classes.push_back(std::move(row));
  }
  json comps = json::array();
  for (const auto& s : r.per_component) {
    comps.push_back({{"id", s.component_id},
                     {"source", s.source_class},
                     {"dominant", s.dominant_class ? json(*s.dominant_class) : json(nullptr)},
                     {"count", s.dominant_count},
                     {"size", s.size},
                     {"accepted", s.accepted}});
  }
  json j = {{"candidate", r.candidate_id},
            {"tau", std::to_string(r.tau.num()) + "/" + std::to_string(r.tau.den())},
            {"mode", std::string(to_string(r.mode))},
            {"connectivity", static_cast<int>(r.connectivity)},
            {"score", r.score()},
            {"score_exact", rational_string(r.score_exact)},
            {"per_class", std::move(classes)},
            {"per_component", std::move(comps)}};
  return j.dump();
}

McocReport parse_report(std::string_view line) {
  try {
    const json j = json::parse(line);
    McocReport r;
    r.candidate_id = j.at("candidate").get<std::size_t>();
    const auto tau = j.at("tau").get<std::string>();
    const auto slash = tau.find('/');
    if (slash == std::string::npos) throw Error(ErrorKind::kParse, "bad tau '" + tau + "'");
    r.tau = Threshold(std::stoll(tau.substr(0, slash)), std::stoll(tau.substr(slash + 1)));
    r.mode = parse_acceptance_mode(j.at("mode").get<std::string>());
    r.connectivity = j.at("connectivity").get<int>() == 8 ? Connectivity::kEight : Connectivity::kFour;
    r.score_exact = parse_rational(j.at("score_exact").get<std::string>());
    for (const auto& row : j.at("per_class")) {
      r.per_class[row.at("class").get<ClassId>()] =
          ClassAcceptance{row.at("accepted").get<std::size_t>(), row.at("total").get<std::size_t>()};
    }
    for (const auto& c : j.at("per_component")) {
      ComponentScore s;
      s.component_id = c.at("id").get<std::size_t>();
      s.source_class = c.at("source").get<ClassId>();
      if (!c.at("dominant").is_null()) s.dominant_class = c.at("dominant").get<ClassId>();
      s.dominant_count = c.at("count").get<std::size_t>();
      s.size = c.at("size").get<std::size_t>();
      s.accepted = c.at("accepted").get<bool>();
      r.per_component.push_back(s);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("mcoc report: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::kParse, "mcoc report: bad number");
  }
}

}  // namespace semcurate
