#pragma once

// PubTabNet-style ingestion and the end-to-end scoring harness. Files are
// line-delimited JSON, streamed one record at a time so memory stays flat on
// the full-size splits.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tsrlab/arch.hpp"
#include "tsrlab/errors.hpp"
#include "tsrlab/grammar.hpp"
#include "tsrlab/teds.hpp"
#include "tsrlab/token.hpp"
#include "tsrlab/version.hpp"

namespace tsrlab {

struct AnnotationRecord {
  std::string filename;
  std::string split;
  std::vector<std::string> structure_tokens;
};

struct PredictionRecord {
  std::string filename;
  std::vector<std::string> tokens;
  std::optional<std::string> html;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> messages;
};

namespace detail {

inline void skip_line(LoadStats* stats, std::size_t line_no, const std::string& why, bool strict) {
  if (strict) fail(Errc::format_error, "line " + std::to_string(line_no) + ": " + why);
  if (stats) {
    ++stats->skipped;
    stats->messages.push_back("line " + std::to_string(line_no) + ": " + why);
  }
}

}  // namespace detail

/// Streams annotation records; malformed lines are counted and skipped
/// (or fatal under `strict`). `split_filter` empty keeps every split.
inline std::vector<AnnotationRecord> load_annotations(const std::string& path,
                                                      const std::string& split_filter = "",
                                                      LoadStats* stats = nullptr,
                                                      bool strict = false) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_failure, "cannot read " + path);
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (stats) ++stats->lines;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      detail::skip_line(stats, line_no, "not a JSON object", strict);
      continue;
    }
    if (!j.contains("filename") || !j["filename"].is_string()) {
      detail::skip_line(stats, line_no, "missing filename", strict);
      continue;
    }
    const auto tokens = j.find("html") != j.end() && j["html"].is_object()
                            ? j["html"].value("structure", nlohmann::json::object())
                            : nlohmann::json::object();
    if (!tokens.is_object() || !tokens.contains("tokens") || !tokens["tokens"].is_array()) {
      detail::skip_line(stats, line_no, "missing html.structure.tokens", strict);
      continue;
    }
    AnnotationRecord rec;
    rec.filename = j["filename"].get<std::string>();
    rec.split = j.value("split", "");
    bool ok = true;
    for (const auto& t : tokens["tokens"]) {
      if (!t.is_string()) {
        ok = false;
        break;
      }
      rec.structure_tokens.push_back(t.get<std::string>());
    }
    if (!ok) {
      detail::skip_line(stats, line_no, "non-string structure token", strict);
      continue;
    }
    if (!split_filter.empty() && rec.split != split_filter) continue;
    if (stats) ++stats->loaded;
    out.push_back(std::move(rec));
  }
  return out;
}

/// Predictions join on filename and carry either a token array or a raw
/// structure string.
inline std::vector<PredictionRecord> load_predictions(const std::string& path,
                                                      LoadStats* stats = nullptr,
                                                      bool strict = false) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_failure, "cannot read " + path);
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (stats) ++stats->lines;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("filename") ||
        !j["filename"].is_string()) {
      detail::skip_line(stats, line_no, "not a prediction record", strict);
      continue;
    }
    PredictionRecord rec;
    rec.filename = j["filename"].get<std::string>();
    if (j.contains("tokens") && j["tokens"].is_array()) {
      for (const auto& t : j["tokens"]) {
        if (t.is_string()) rec.tokens.push_back(t.get<std::string>());
      }
    } else if (j.contains("html") && j["html"].is_string()) {
      rec.html = j["html"].get<std::string>();
    } else {
      detail::skip_line(stats, line_no, "needs tokens[] or html", strict);
      continue;
    }
    if (stats) ++stats->loaded;
    out.push_back(std::move(rec));
  }
  return out;
}

inline nlohmann::ordered_json annotation_to_json(const AnnotationRecord& rec) {
  nlohmann::ordered_json j;
  j["filename"] = rec.filename;
  if (!rec.split.empty()) j["split"] = rec.split;
  j["html"]["structure"]["tokens"] = rec.structure_tokens;
  return j;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalOptions {
  int workers = 0;  // <= 0: hardware concurrency
};

struct EvalResult {
  TedsReport report;
  std::vector<std::string> flags;
  std::size_t n_samples = 0;
  std::size_t n_simple = 0;
  std::size_t n_complex = 0;
};

/// Joins predictions onto annotations by filename and scores each pair.
/// Missing or unparseable predictions score 0 and are flagged; annotations
/// that do not tokenize or parse are flagged and skipped. Worker count never
/// changes the result: samples land in slots keyed by annotation order.
inline EvalResult evaluate(const std::vector<AnnotationRecord>& annotations,
                           const std::vector<PredictionRecord>& predictions,
                           const EvalOptions& options = {}) {
  std::unordered_map<std::string, const PredictionRecord*> by_name;
  std::vector<std::string> early_flags;
  for (const auto& p : predictions) {
    if (!by_name.emplace(p.filename, &p).second) {
      early_flags.push_back("duplicate prediction for " + p.filename + " (last one wins)");
      by_name[p.filename] = &p;
    }
  }
  std::size_t matched = 0;
  for (const auto& a : annotations) matched += by_name.count(a.filename);
  if (matched == 0) fail(Errc::empty_join, "no prediction filename matches any annotation");

  struct Slot {
    std::optional<SampleScore> score;
    std::vector<std::string> flags;
  };
  std::vector<Slot> slots(annotations.size());

  auto score_one = [&](std::size_t i) {
    const AnnotationRecord& gt = annotations[i];
    Slot& slot = slots[i];
    TokenSequence gt_seq;
    TableTree gt_tree;
    try {
      gt_seq = tokenize(gt.structure_tokens, std::max<std::size_t>(kDefaultMaxLen, gt.structure_tokens.size()));
      gt_tree = parse(gt_seq);
    } catch (const Error& e) {
      slot.flags.push_back(gt.filename + ": ground truth rejected (" + e.what() + "); skipped");
      return;
    }
    const TableClass cls = classify(gt_tree);
    const auto it = by_name.find(gt.filename);
    if (it == by_name.end()) {
      slot.flags.push_back(gt.filename + ": missing prediction, scored 0");
      slot.score = SampleScore{gt.filename, cls, 0.0};
      return;
    }
    const PredictionRecord& pred = *it->second;
    const std::vector<std::string> raw =
        !pred.tokens.empty() || !pred.html ? pred.tokens : lex_structure(*pred.html);
    double value = 0.0;
    try {
      const TokenSequence pred_seq =
          tokenize(raw, std::max<std::size_t>(kDefaultMaxLen, raw.size()));
      value = teds_score(parse(pred_seq), gt_tree);
    } catch (const Error& e) {
      slot.flags.push_back(gt.filename + ": unparseable prediction (" + e.what() + "), scored 0");
      value = 0.0;
    }
    slot.score = SampleScore{gt.filename, cls, value};
  };

  int workers = options.workers > 0 ? options.workers
                                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(annotations.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < annotations.size(); ++i) score_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < annotations.size(); i = next.fetch_add(1)) {
          score_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  EvalResult result;
  result.flags = std::move(early_flags);
  std::vector<SampleScore> scores;
  for (Slot& s : slots) {
    for (auto& f : s.flags) result.flags.push_back(std::move(f));
    if (s.score) scores.push_back(std::move(*s.score));
  }
  std::unordered_set<std::string> known;
  known.reserve(annotations.size());
  for (const auto& a : annotations) known.insert(a.filename);
  for (const auto& p : predictions) {
    if (!known.count(p.filename)) {
      result.flags.push_back(p.filename + ": prediction without annotation, ignored");
    }
  }
  if (scores.empty()) fail(Errc::empty_join, "no sample could be scored");
  result.n_samples = scores.size();
  for (const auto& s : scores) {
    if (s.cls == TableClass::Simple) {
      ++result.n_simple;
    } else {
      ++result.n_complex;
    }
  }
  result.report = aggregate(std::move(scores));
  return result;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline nlohmann::ordered_json eval_report_json(const EvalResult& r, bool per_sample = false) {
  nlohmann::ordered_json j;
  j["tool"] = "tsrlab";
  j["version"] = std::string(kVersion);
  j["vocab_manifest_fnv1a64"] = hex64(vocabulary_manifest_hash());
  j["node_counting"] = "tree sizes include the synthetic table root";
  j["n_samples"] = r.n_samples;
  j["n_simple"] = r.n_simple;
  j["n_complex"] = r.n_complex;
  if (r.report.simple_mean) j["teds_simple"] = *r.report.simple_mean;
  if (r.report.complex_mean) j["teds_complex"] = *r.report.complex_mean;
  j["teds_all"] = r.report.all_mean;
  j["flags"] = r.flags;
  if (per_sample) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : r.report.per_sample) {
      arr.push_back({{"filename", s.id},
                     {"class", s.cls == TableClass::Simple ? "simple" : "complex"},
                     {"teds", s.score}});
    }
    j["per_sample"] = arr;
  }
  return j;
}

inline nlohmann::ordered_json analysis_report_json(const AnalysisReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["params"] = r.params;
  j["macs"] = r.macs;
  j["flops"] = r.flops;
  j["n_conv"] = r.n_conv;
  if (r.kernel) {
    j["kernel"] = *r.kernel;
  } else {
    j["kernel"] = nullptr;
  }
  j["rf"] = r.rf;
  j["rf_ratio"] = r.rf_ratio;
  j["seq_len"] = r.seq_len;
  j["input_size"] = {r.input_h, r.input_w};
  j["params_by_stage"] = {{"visual_encoder", r.param_stages.visual_encoder},
                          {"transformer_encoder", r.param_stages.transformer_encoder},
                          {"transformer_decoder", r.param_stages.transformer_decoder},
                          {"embedding", r.param_stages.embedding},
                          {"head", r.param_stages.head}};
  j["macs_by_stage"] = {{"visual_encoder", r.mac_stages.visual_encoder},
                        {"transformer_encoder", r.mac_stages.transformer_encoder},
                        {"transformer_decoder", r.mac_stages.transformer_decoder},
                        {"embedding", r.mac_stages.embedding},
                        {"head", r.mac_stages.head}};
  return j;
}

}  // namespace tsrlab
