// Command-line front end for the arbor shared library. Everything goes
// through the public C API; diagnostics go to stderr, data to files or
// stdout. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arbor.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int exit_code_for(arbor_status status) {
  switch (status) {
    case ARBOR_OK:
      return kExitOk;
    case ARBOR_ERROR_IO:
    case ARBOR_ERROR_CONFIG:
    case ARBOR_ERROR_ARGUMENT:
      return kExitUsage;
    default:
      return kExitData;
  }
}

// Fails the current subcommand with the library's error message.
struct CommandError {
  int code;
};

void check(arbor_status status) {
  if (status == ARBOR_OK) return;
  std::fprintf(stderr, "arbor: %s\n", arbor_last_error());
  throw CommandError{exit_code_for(status)};
}

struct TreebankDeleter {
  void operator()(arbor_treebank* tb) const { arbor_treebank_free(tb); }
};
struct ConfigDeleter {
  void operator()(arbor_config* c) const { arbor_config_free(c); }
};
struct ModelDeleter {
  void operator()(arbor_model* m) const { arbor_model_free(m); }
};
struct MetricsDeleter {
  void operator()(arbor_metrics* m) const { arbor_metrics_free(m); }
};

using TreebankPtr = std::unique_ptr<arbor_treebank, TreebankDeleter>;
using ConfigPtr = std::unique_ptr<arbor_config, ConfigDeleter>;
using ModelPtr = std::unique_ptr<arbor_model, ModelDeleter>;
using MetricsPtr = std::unique_ptr<arbor_metrics, MetricsDeleter>;

TreebankPtr read_treebank(const std::string& path) {
  arbor_treebank* tb = nullptr;
  check(arbor_treebank_read(path.c_str(), nullptr, &tb));
  return TreebankPtr(tb);
}

std::string take_string(char* s) {
  std::string out(s ? s : "");
  arbor_string_free(s);
  return out;
}

void emit(const std::string& data, const std::string& output_path) {
  if (output_path.empty()) {
    std::fwrite(data.data(), 1, data.size(), stdout);
    return;
  }
  std::FILE* f = std::fopen(output_path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "arbor: cannot open '%s' for writing\n", output_path.c_str());
    throw CommandError{kExitUsage};
  }
  std::fwrite(data.data(), 1, data.size(), f);
  std::fclose(f);
}

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> treebank_paths;
  std::string out_path;
  bool quiet = false;
};

int run_train(const TrainArgs& args) {
  ConfigPtr config;
  {
    arbor_config* raw = nullptr;
    if (args.config_path.empty())
      check(arbor_config_default(&raw));
    else
      check(arbor_config_read(args.config_path.c_str(), &raw));
    config.reset(raw);
  }

  std::vector<TreebankPtr> treebanks;
  std::vector<const arbor_treebank*> handles;
  for (const std::string& path : args.treebank_paths) {
    treebanks.push_back(read_treebank(path));
    handles.push_back(treebanks.back().get());
  }

  ModelPtr model;
  {
    arbor_model* raw = nullptr;
    check(arbor_train(config.get(), handles.data(), handles.size(), args.quiet ? 0 : 1, &raw));
    model.reset(raw);
  }
  check(arbor_model_write(model.get(), args.out_path.c_str()));

  // Report training-set attachment scores with the model as written to
  // disk, so `parse` + `eval` on the same data reproduce the numbers.
  ModelPtr reloaded;
  {
    arbor_model* raw = nullptr;
    check(arbor_model_read(args.out_path.c_str(), &raw));
    reloaded.reset(raw);
  }
  const arbor_model* member = reloaded.get();
  std::vector<TreebankPtr> parsed;
  std::vector<const arbor_treebank*> gold_handles, system_handles;
  for (const TreebankPtr& tb : treebanks) {
    arbor_treebank* out = nullptr;
    check(arbor_parse(&member, 1, tb.get(), /*add_dummy_punct=*/0, /*threads=*/1, &out));
    parsed.emplace_back(out);
    gold_handles.push_back(tb.get());
    system_handles.push_back(out);
  }
  MetricsPtr metrics;
  {
    arbor_metrics* raw = nullptr;
    check(arbor_evaluate(gold_handles.data(), system_handles.data(), gold_handles.size(),
                         /*strip_subtypes=*/1, &raw));
    metrics.reset(raw);
  }
  double las = 0.0;
  check(arbor_metrics_value(metrics.get(),
                            gold_handles.size() > 1 ? ARBOR_METRICS_MACRO : 0, "las", &las));
  std::fprintf(stderr, "arbor: model written to %s\n", args.out_path.c_str());
  std::fprintf(stderr, "arbor: training-set LAS: %.2f\n", las);
  return kExitOk;
}

struct ParseArgs {
  std::vector<std::string> model_paths;
  std::string input_path;
  std::string output_path;
  bool add_dummy_punct = false;
  bool use_gold_upos = false;
  int threads = 1;
};

int run_parse(const ParseArgs& args) {
  std::vector<ModelPtr> models;
  std::vector<const arbor_model*> handles;
  for (const std::string& path : args.model_paths) {
    arbor_model* raw = nullptr;
    check(arbor_model_read(path.c_str(), &raw));
    models.emplace_back(raw);
    handles.push_back(raw);
  }
  if (args.use_gold_upos) {
    for (std::size_t i = 0; i < handles.size(); ++i) {
      if (!arbor_model_uses_gold_upos(handles[i])) {
        std::fprintf(stderr, "arbor: --use-gold-upos given, but model '%s' has no gold "
                             "UPOS channel\n",
                     args.model_paths[i].c_str());
        return kExitUsage;
      }
    }
  }

  TreebankPtr input = read_treebank(args.input_path);
  TreebankPtr output;
  {
    arbor_treebank* raw = nullptr;
    check(arbor_parse(handles.data(), handles.size(), input.get(),
                      args.add_dummy_punct ? 1 : 0, args.threads, &raw));
    output.reset(raw);
  }
  char* text = nullptr;
  check(arbor_treebank_serialize(output.get(), &text));
  emit(take_string(text), args.output_path);
  return kExitOk;
}

struct EvalArgs {
  std::vector<std::string> gold_paths;
  std::vector<std::string> system_paths;
  bool strict_deprel = false;
  bool json = false;
};

int run_eval(const EvalArgs& args) {
  if (args.gold_paths.size() != args.system_paths.size()) {
    std::fprintf(stderr, "arbor: --gold and --system must be given the same number of times\n");
    return kExitUsage;
  }
  std::vector<TreebankPtr> treebanks;
  std::vector<const arbor_treebank*> gold, system;
  for (const std::string& path : args.gold_paths) {
    treebanks.push_back(read_treebank(path));
    gold.push_back(treebanks.back().get());
  }
  for (const std::string& path : args.system_paths) {
    treebanks.push_back(read_treebank(path));
    system.push_back(treebanks.back().get());
  }
  MetricsPtr metrics;
  {
    arbor_metrics* raw = nullptr;
    check(arbor_evaluate(gold.data(), system.data(), gold.size(),
                         args.strict_deprel ? 0 : 1, &raw));
    metrics.reset(raw);
  }
  char* text = nullptr;
  check(args.json ? arbor_metrics_json(metrics.get(), &text)
                  : arbor_metrics_text(metrics.get(), &text));
  emit(take_string(text), "");
  return kExitOk;
}

struct HarmonizeArgs {
  std::string input_path;
  std::string output_path;
  std::string rules_path;
  bool fixed_to_flat = false;
  bool relabel_dep = false;
};

int run_harmonize(const HarmonizeArgs& args) {
  TreebankPtr input = read_treebank(args.input_path);
  TreebankPtr output;
  {
    arbor_treebank* raw = nullptr;
    check(arbor_harmonize(input.get(), args.fixed_to_flat ? 1 : 0, args.relabel_dep ? 1 : 0,
                          args.rules_path.empty() ? nullptr : args.rules_path.c_str(), &raw));
    output.reset(raw);
  }
  char* text = nullptr;
  check(arbor_treebank_serialize(output.get(), &text));
  emit(take_string(text), args.output_path);
  return kExitOk;
}

int run_sample_report(const std::vector<std::string>& treebank_paths) {
  std::vector<TreebankPtr> treebanks;
  std::vector<const arbor_treebank*> handles;
  for (const std::string& path : treebank_paths) {
    treebanks.push_back(read_treebank(path));
    handles.push_back(treebanks.back().get());
  }
  char* text = nullptr;
  check(arbor_sample_report(handles.data(), handles.size(), &text));
  emit(take_string(text), "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arbor — graph-based dependency parsing toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", arbor_version());

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a parsing model");
  train->add_option("--config", train_args.config_path, "JSON config file (strict keys)");
  train->add_option("--treebank", train_args.treebank_paths, "training CoNLL-U file (repeatable)")
      ->required();
  train->add_option("--out", train_args.out_path, "output model file")->required();
  train->add_flag("--quiet", train_args.quiet, "suppress per-epoch progress");

  ParseArgs parse_args;
  CLI::App* parse = app.add_subcommand("parse", "Annotate a CoNLL-U file");
  parse->add_option("--model", parse_args.model_paths,
                    "model file; repeat for a probability-averaging ensemble")
      ->required();
  parse->add_option("--input", parse_args.input_path, "input CoNLL-U file")->required();
  parse->add_option("--output", parse_args.output_path, "output CoNLL-U file (default stdout)");
  parse->add_flag("--add-dummy-punct", parse_args.add_dummy_punct,
                  "append a temporary sentence-final period before decoding");
  parse->add_flag("--use-gold-upos", parse_args.use_gold_upos,
                  "require models that read gold UPOS from the input");
  parse->add_option("--threads", parse_args.threads, "worker threads for prediction")
      ->default_val(1)
      ->check(CLI::PositiveNumber);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score system output against gold");
  eval->add_option("--gold", eval_args.gold_paths, "gold CoNLL-U file (repeatable)")->required();
  eval->add_option("--system", eval_args.system_paths, "system CoNLL-U file (repeatable)")
      ->required();
  bool strip_subtypes_flag = false;
  CLI::Option* strip_opt =
      eval->add_flag("--strip-subtypes", strip_subtypes_flag,
                     "compare deprels by the part before ':' (default)");
  eval->add_flag("--strict-deprel", eval_args.strict_deprel, "compare full deprel strings")
      ->excludes(strip_opt);
  eval->add_flag("--json", eval_args.json, "machine-readable report");

  HarmonizeArgs harmonize_args;
  CLI::App* harmonize = app.add_subcommand("harmonize", "Rewrite annotation styles");
  harmonize->add_option("--input", harmonize_args.input_path, "input CoNLL-U file")->required();
  harmonize->add_option("--output", harmonize_args.output_path,
                        "output CoNLL-U file (default stdout)");
  harmonize->add_flag("--fixed-to-flat", harmonize_args.fixed_to_flat,
                      "rewrite fixed to flat between numerals");
  harmonize->add_flag("--relabel-dep", harmonize_args.relabel_dep,
                      "replace dep via the rule table");
  harmonize->add_option("--rules", harmonize_args.rules_path,
                        "rule table file (default: built-in rules)");

  std::vector<std::string> report_paths;
  CLI::App* report = app.add_subcommand("sample-report", "Show sqrt-proportional sampling weights");
  report->add_option("--treebank", report_paths, "CoNLL-U file (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(train_args);
    if (parse->parsed()) return run_parse(parse_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (harmonize->parsed()) return run_harmonize(harmonize_args);
    if (report->parsed()) return run_sample_report(report_paths);
  } catch (const CommandError& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "arbor: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
