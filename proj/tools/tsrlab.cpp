// Command-line front end: architecture analysis, TEDS evaluation, receptive
// field probing, the toy training demo, and tokenizer round-trips.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsrlab/tsrlab.hpp"

namespace {

using namespace tsrlab;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TSRLAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    std::cerr << "warning: TSRLAB_SEED is not an integer, using 42\n";
  }
  return 42;
}

std::string in_millions(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fM", static_cast<double>(v) / 1e6);
  return buf;
}

std::string in_giga(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fG", static_cast<double>(v) / 1e9);
  return buf;
}

std::string two_dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void print_rows(const std::vector<AnalysisReport>& rows, std::ostream& out) {
  out << std::left << std::setw(16) << "Model" << std::right << std::setw(10) << "#Param"
      << std::setw(10) << "MAC" << std::setw(7) << "#Conv" << std::setw(8) << "Kernel"
      << std::setw(6) << "RF" << std::setw(13) << "RF ratio(%)" << std::setw(7) << "N" << "\n";
  out << std::string(77, '-') << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(16) << r.name << std::right << std::setw(10)
        << in_millions(r.params) << std::setw(10) << in_giga(r.macs) << std::setw(7) << r.n_conv
        << std::setw(8) << (r.kernel ? std::to_string(*r.kernel) : "-") << std::setw(6) << r.rf
        << std::setw(13) << two_dp(r.rf_ratio) << std::setw(7) << r.seq_len << "\n";
  }
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path == "-") return std::cout;
  file.open(path);
  if (!file) fail(Errc::io_failure, "cannot write " + path);
  return file;
}

int run_analyze(const std::vector<std::string>& names, bool all, int input_size, int decode_len,
                const std::string& json_path) {
  std::vector<std::string> chosen = names;
  if (all || chosen.empty()) {
    for (const auto& n : preset_names()) {
      if (n.rfind("toy-", 0) != 0) chosen.push_back(n);
    }
  }
  std::vector<AnalysisReport> rows;
  for (const auto& name : chosen) rows.push_back(report(preset(name, input_size), decode_len));
  print_rows(rows, std::cout);
  if (!json_path.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(analysis_report_json(r));
    std::ofstream file;
    open_or_stdout(file, json_path) << arr.dump(2) << "\n";
  }
  return 0;
}

int run_teds(const std::string& gt_path, const std::string& pred_path, const std::string& split,
             const std::string& report_path, bool per_sample, int workers, bool strict) {
  LoadStats gt_stats, pred_stats;
  const auto gts = load_annotations(gt_path, split, &gt_stats, strict);
  const auto preds = load_predictions(pred_path, &pred_stats, strict);
  std::cout << "annotations: " << gts.size() << " loaded, " << gt_stats.skipped << " skipped\n";
  std::cout << "predictions: " << preds.size() << " loaded, " << pred_stats.skipped << " skipped\n";
  EvalOptions options;
  options.workers = workers;
  const EvalResult result = evaluate(gts, preds, options);
  std::cout << "samples: " << result.n_samples << " (" << result.n_simple << " simple, "
            << result.n_complex << " complex)\n";
  if (result.report.simple_mean) std::cout << "teds simple:  " << two_dp(*result.report.simple_mean) << "\n";
  if (result.report.complex_mean) std::cout << "teds complex: " << two_dp(*result.report.complex_mean) << "\n";
  std::cout << "teds all:     " << two_dp(result.report.all_mean) << "\n";
  if (!result.flags.empty()) {
    std::cout << "flags: " << result.flags.size() << "\n";
    for (std::size_t i = 0; i < result.flags.size() && i < 10; ++i) {
      std::cout << "  " << result.flags[i] << "\n";
    }
    if (result.flags.size() > 10) std::cout << "  ...\n";
  }
  if (!report_path.empty()) {
    std::ofstream file;
    open_or_stdout(file, report_path) << eval_report_json(result, per_sample).dump(2) << "\n";
  }
  return 0;
}

int run_probe_rf(const std::string& name, int input_size, int extra_positions,
                 std::uint64_t seed) {
  const FullModelSpec spec = preset(name, input_size);
  const nn::ModelInstance model = nn::make_model(spec, seed);
  const LayerGeometry geo = final_geometry(spec.encoder);
  std::cout << name << ": input " << spec.encoder.input_h << "x" << spec.encoder.input_w
            << ", feature map " << geo.out_h << "x" << geo.out_w << ", theoretical rf " << geo.rf
            << " (ratio " << two_dp(rf_ratio(spec.encoder)) << "%)\n";

  std::vector<std::pair<int, int>> positions{{0, 0},
                                             {geo.out_h / 2, geo.out_w / 2},
                                             {geo.out_h - 1, geo.out_w - 1}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < extra_positions; ++i) {
    positions.emplace_back(static_cast<int>(rng() % geo.out_h),
                           static_cast<int>(rng() % geo.out_w));
  }
  bool all_match = true;
  for (const auto& [r, c] : positions) {
    const PixelBox expected = input_window(spec.encoder, r, c);
    const PixelBox measured = nn::empirical_rf(model, r, c);
    const bool match = expected == measured;
    all_match = all_match && match;
    std::cout << "  out(" << r << "," << c << "): expected rows [" << expected.r0 << ","
              << expected.r1 << "] cols [" << expected.c0 << "," << expected.c1 << "], measured "
              << measured.height() << "x" << measured.width() << (match ? "  OK" : "  MISMATCH")
              << "\n";
  }
  std::cout << (all_match ? "all positions match the traced window\n"
                          : "empirical support disagrees with the trace\n");
  return all_match ? 0 : 2;
}

int run_toy_train(const std::string& name, int n_samples, int steps, double lr,
                  double weight_decay, double dropout, std::uint64_t seed,
                  const std::string& curve_path, const std::string& ckpt_path) {
  const FullModelSpec spec = preset(name);
  nn::ModelInstance model = nn::make_model(spec, seed);
  const auto samples = nn::make_toy_dataset(n_samples, seed + 1, spec.encoder.input_h,
                                            static_cast<std::size_t>(spec.max_len));
  nn::TrainConfig cfg;
  cfg.lr = lr;
  cfg.weight_decay = weight_decay;
  cfg.dropout = dropout;
  std::cout << name << ": " << model.scalar_count() << " parameters, " << n_samples
            << " samples, " << steps << " steps, lr " << lr << "\n";
  const auto losses = nn::train_toy(model, samples, steps, cfg);
  const int stride = std::max(1, steps / 10);
  for (int s = 0; s < steps; s += stride) {
    std::cout << "  step " << std::setw(4) << s + 1 << "  loss " << losses[static_cast<std::size_t>(s)] << "\n";
  }
  std::cout << "final loss: " << losses.back() << "\n";

  int matched = 0;
  for (const auto& s : samples) {
    const TokenSequence decoded =
        nn::greedy_decode(model, s.image, static_cast<int>(s.target.size()) + 2);
    matched += decoded == s.target;
  }
  std::cout << "greedy decode reproduces " << matched << "/" << samples.size() << " targets\n";

  if (!curve_path.empty()) {
    std::ofstream file;
    auto& out = open_or_stdout(file, curve_path);
    out << "step,loss\n";
    for (std::size_t s = 0; s < losses.size(); ++s) out << s + 1 << "," << losses[s] << "\n";
  }
  if (!ckpt_path.empty()) {
    nn::save_checkpoint(model, ckpt_path);
    std::cout << "checkpoint written to " << ckpt_path << "\n";
  }
  return 0;
}

int run_tokenize(const std::string& html, bool show_ids) {
  const std::vector<std::string> raw = lex_structure(html);
  const TokenSequence seq = tokenize(raw, std::max<std::size_t>(kDefaultMaxLen, raw.size()));
  if (show_ids) {
    for (const Token& t : seq.tokens) {
      std::cout << std::setw(3) << t.id() << "  " << t.surface() << "\n";
    }
  }
  const std::string round = detokenize(seq);  // throws on <unk>
  std::cout << round << "\n";
  if (round != html) {
    std::cerr << "round-trip differs from the input (input is not canonical)\n";
    return 2;
  }
  std::cout << "round-trip OK (" << seq.size() << " tokens)\n";
  return 0;
}

int run_vocab(const std::string& out_path, bool show_hash) {
  if (show_hash) {
    std::cout << hex64(vocabulary_manifest_hash()) << "\n";
    return 0;
  }
  std::ofstream file;
  open_or_stdout(file, out_path) << vocabulary_manifest();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"table-structure lab: grammar, similarity scoring, architecture analysis"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "model complexity and geometry per preset");
  std::vector<std::string> names;
  bool all = false;
  int input_size = 0;
  int decode_len = 0;
  std::string json_path;
  analyze->add_option("--preset", names, "preset name (repeatable)");
  analyze->add_flag("--all", all, "every non-toy preset");
  analyze->add_option("--input-size", input_size, "override the input side in pixels");
  analyze->add_option("--decode-len", decode_len, "decoder pass length for MACs (default max_len)");
  analyze->add_option("--json", json_path, "write report rows as JSON ('-' for stdout)");

  // teds
  auto* teds_cmd = app.add_subcommand("teds", "score predictions against annotations");
  std::string gt_path, pred_path, split, report_path;
  bool per_sample = false, strict = false;
  int workers = 0;
  teds_cmd->add_option("--gt", gt_path, "annotation JSONL")->required();
  teds_cmd->add_option("--pred", pred_path, "prediction JSONL")->required();
  teds_cmd->add_option("--split", split, "keep only this annotation split");
  teds_cmd->add_option("--report", report_path, "write the JSON report here ('-' for stdout)");
  teds_cmd->add_flag("--per-sample", per_sample, "include per-sample scores in the report");
  teds_cmd->add_option("--workers", workers, "scoring threads (default: hardware)");
  teds_cmd->add_flag("--strict", strict, "fail on the first malformed input line");

  // probe-rf
  auto* probe = app.add_subcommand("probe-rf", "compare theoretical vs measured receptive fields");
  std::string probe_preset = "toy-convstem";
  int probe_input = 0, probe_extra = 3;
  std::uint64_t seed = default_seed();
  probe->add_option("--preset", probe_preset, "instantiable preset (default toy-convstem)");
  probe->add_option("--input-size", probe_input, "override the input side in pixels");
  probe->add_option("--positions", probe_extra, "extra random probe positions");
  probe->add_option("--seed", seed, "RNG seed (env TSRLAB_SEED)");

  // toy-train
  auto* toy = app.add_subcommand("toy-train", "overfit the toy dataset and decode it back");
  std::string toy_preset = "toy-linearproj", curve_path, ckpt_path;
  int toy_samples = 8, toy_steps = 500;
  double lr = 2e-3, weight_decay = 0.0, dropout = 0.0;
  std::uint64_t toy_seed = default_seed();
  toy->add_option("--preset", toy_preset, "toy-linearproj or toy-convstem");
  toy->add_option("--samples", toy_samples, "dataset size (max 64)");
  toy->add_option("--steps", toy_steps, "optimizer steps");
  toy->add_option("--lr", lr, "learning rate");
  toy->add_option("--weight-decay", weight_decay, "decoupled weight decay");
  toy->add_option("--dropout", dropout, "residual dropout rate");
  toy->add_option("--seed", toy_seed, "RNG seed (env TSRLAB_SEED)");
  toy->add_option("--curve", curve_path, "write step,loss CSV here");
  toy->add_option("--checkpoint", ckpt_path, "write final parameters here");

  // tokenize
  auto* tok = app.add_subcommand("tokenize", "lex a structure string and round-trip it");
  std::string html;
  bool show_ids = false;
  tok->add_option("--html", html, "canonical structure string")->required();
  tok->add_flag("--ids", show_ids, "print one id/surface line per token");

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "print the versioned token id manifest");
  std::string vocab_out = "-";
  bool vocab_hash = false;
  vocab_cmd->add_option("--out", vocab_out, "target file ('-' for stdout)");
  vocab_cmd->add_flag("--hash", vocab_hash, "print the manifest hash only");

  try {
    app.parse(argc, argv);
    if (*analyze) return run_analyze(names, all, input_size, decode_len, json_path);
    if (*teds_cmd) return run_teds(gt_path, pred_path, split, report_path, per_sample, workers, strict);
    if (*probe) return run_probe_rf(probe_preset, probe_input, probe_extra, seed);
    if (*toy) return run_toy_train(toy_preset, toy_samples, toy_steps, lr, weight_decay, dropout,
                                   toy_seed, curve_path, ckpt_path);
    if (*tok) return run_tokenize(html, show_ids);
    if (*vocab_cmd) return run_vocab(vocab_out, vocab_hash);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::unknown_preset ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
