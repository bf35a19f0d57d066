#include "arbor.h"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "conllu.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "harmonizer.hpp"
#include "model.hpp"
#include "model_io.hpp"
#include "sampler.hpp"
#include "trainer.hpp"

struct arbor_treebank {
  arbor::Treebank tb;
};

struct arbor_config {
  arbor::ModelConfig model;
  arbor::TrainSchedule schedule;
};

struct arbor_model {
  arbor::ParserModel model;
};

struct arbor_metrics {
  arbor::MetricReport report;
};

namespace {

thread_local std::string g_last_error;

arbor_status status_of(arbor::ErrorCode code) {
  switch (code) {
    case arbor::ErrorCode::Io: return ARBOR_ERROR_IO;
    case arbor::ErrorCode::Malformed: return ARBOR_ERROR_MALFORMED;
    case arbor::ErrorCode::Config: return ARBOR_ERROR_CONFIG;
    case arbor::ErrorCode::Data: return ARBOR_ERROR_DATA;
    case arbor::ErrorCode::Limit: return ARBOR_ERROR_LIMIT;
    case arbor::ErrorCode::InvalidArg: return ARBOR_ERROR_ARGUMENT;
  }
  return ARBOR_ERROR_INTERNAL;
}

template <typename F>
arbor_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ARBOR_OK;
  } catch (const arbor::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ARBOR_ERROR_INTERNAL;
  }
}

arbor_status invalid(const char* what) {
  g_last_error = what;
  return ARBOR_ERROR_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

class StderrObserver : public arbor::TrainObserver {
 public:
  void epoch_finished(int stage, int epoch, int total_epochs, double mean_loss) override {
    std::fprintf(stderr, "arbor: stage %d epoch %d/%d mean loss %.4f\n", stage, epoch,
                 total_epochs, mean_loss);
  }
};

}  // namespace

extern "C" {

const char* arbor_version(void) { return "1.0.0"; }

const char* arbor_last_error(void) { return g_last_error.c_str(); }

void arbor_string_free(char* s) { delete[] s; }

/* ------------------------------------------------------------------ */

arbor_status arbor_treebank_parse(const char* text, const char* name, arbor_treebank** out) {
  if (!text || !out) return invalid("text and out must not be null");
  return guarded([&] {
    auto tb = std::make_unique<arbor_treebank>();
    tb->tb = arbor::parse_conllu(text, name ? name : "treebank");
    *out = tb.release();
  });
}

arbor_status arbor_treebank_read(const char* path, const char* name_or_null,
                                 arbor_treebank** out) {
  if (!path || !out) return invalid("path and out must not be null");
  return guarded([&] {
    std::string name;
    if (name_or_null) {
      name = name_or_null;
    } else {
      name = path;
      if (auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
      if (auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0)
        name = name.substr(0, dot);
    }
    auto tb = std::make_unique<arbor_treebank>();
    tb->tb = arbor::parse_conllu(arbor::read_file(path), name);
    *out = tb.release();
  });
}

arbor_status arbor_treebank_write(const arbor_treebank* tb, const char* path) {
  if (!tb || !path) return invalid("treebank and path must not be null");
  return guarded([&] { arbor::write_file(path, arbor::serialize_conllu(tb->tb)); });
}

arbor_status arbor_treebank_serialize(const arbor_treebank* tb, char** out) {
  if (!tb || !out) return invalid("treebank and out must not be null");
  return guarded([&] { *out = copy_string(arbor::serialize_conllu(tb->tb)); });
}

size_t arbor_treebank_sentence_count(const arbor_treebank* tb) {
  return tb ? tb->tb.sentence_count() : 0;
}

size_t arbor_treebank_token_count(const arbor_treebank* tb) {
  return tb ? tb->tb.token_count() : 0;
}

const char* arbor_treebank_name(const arbor_treebank* tb) {
  return tb ? tb->tb.name.c_str() : "";
}

arbor_status arbor_treebank_validate_trees(const arbor_treebank* tb) {
  if (!tb) return invalid("treebank must not be null");
  return guarded([&] {
    for (std::size_t i = 0; i < tb->tb.sentences.size(); ++i) {
      arbor::TreeCheck check = arbor::validate_tree(tb->tb.sentences[i]);
      if (!check.ok())
        arbor::fail(arbor::ErrorCode::Data,
                    "sentence " + std::to_string(i) + " is not a single-rooted tree");
    }
  });
}

void arbor_treebank_free(arbor_treebank* tb) { delete tb; }

/* ------------------------------------------------------------------ */

arbor_status arbor_config_default(arbor_config** out) {
  if (!out) return invalid("out must not be null");
  return guarded([&] { *out = new arbor_config(); });
}

arbor_status arbor_config_parse(const char* json_text, arbor_config** out) {
  if (!json_text || !out) return invalid("json_text and out must not be null");
  return guarded([&] {
    auto config = std::make_unique<arbor_config>();
    arbor::parse_config_file(json_text, config->model, config->schedule);
    *out = config.release();
  });
}

arbor_status arbor_config_read(const char* path, arbor_config** out) {
  if (!path || !out) return invalid("path and out must not be null");
  return guarded([&] {
    auto config = std::make_unique<arbor_config>();
    arbor::parse_config_file(arbor::read_file(path), config->model, config->schedule);
    *out = config.release();
  });
}

void arbor_config_free(arbor_config* config) { delete config; }

/* ------------------------------------------------------------------ */

arbor_status arbor_train(const arbor_config* config, const arbor_treebank* const* treebanks,
                         size_t n_treebanks, int verbose, arbor_model** out) {
  if (!config || !treebanks || !out) return invalid("config, treebanks, out must not be null");
  return guarded([&] {
    std::vector<arbor::Treebank> tbs;
    tbs.reserve(n_treebanks);
    for (size_t i = 0; i < n_treebanks; ++i) {
      if (!treebanks[i]) arbor::fail(arbor::ErrorCode::InvalidArg, "null treebank handle");
      tbs.push_back(treebanks[i]->tb);
    }
    StderrObserver observer;
    auto model = std::make_unique<arbor_model>();
    model->model =
        arbor::train(config->model, config->schedule, tbs, verbose ? &observer : nullptr);
    *out = model.release();
  });
}

arbor_status arbor_model_read(const char* path, arbor_model** out) {
  if (!path || !out) return invalid("path and out must not be null");
  return guarded([&] {
    auto model = std::make_unique<arbor_model>();
    model->model = arbor::load_model(path);
    *out = model.release();
  });
}

arbor_status arbor_model_write(const arbor_model* model, const char* path) {
  if (!model || !path) return invalid("model and path must not be null");
  return guarded([&] { arbor::save_model(model->model, path); });
}

int arbor_model_uses_gold_upos(const arbor_model* model) {
  return model && model->model.config.use_gold_upos() ? 1 : 0;
}

void arbor_model_free(arbor_model* model) { delete model; }

arbor_status arbor_parse(const arbor_model* const* models, size_t n_models,
                         const arbor_treebank* input, int add_dummy_punct, int threads,
                         arbor_treebank** out) {
  if (!models || n_models == 0 || !input || !out)
    return invalid("models, input, out must not be null and n_models must be > 0");
  return guarded([&] {
    std::vector<const arbor::ParserModel*> member_models;
    for (size_t i = 0; i < n_models; ++i) {
      if (!models[i]) arbor::fail(arbor::ErrorCode::InvalidArg, "null model handle");
      member_models.push_back(&models[i]->model);
    }

    auto result = std::make_unique<arbor_treebank>();
    result->tb.name = input->tb.name;
    result->tb.sentences.resize(input->tb.sentences.size());

    auto parse_one = [&](std::size_t index) {
      arbor::Sentence sentence = input->tb.sentences[index];
      arbor::DummyPunctMarker marker;
      if (add_dummy_punct) marker = arbor::add_dummy_punct(sentence);
      arbor::Sentence annotated =
          n_models == 1 ? arbor::predict(*member_models[0], sentence)
                        : arbor::ensemble_predict(member_models, sentence);
      arbor::strip_dummy_punct(annotated, marker);
      result->tb.sentences[index] = std::move(annotated);
    };

    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(input->tb.sentences.size())));
    if (workers == 1) {
      for (std::size_t i = 0; i < input->tb.sentences.size(); ++i) parse_one(i);
    } else {
      std::atomic<std::size_t> cursor{0};
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            while (true) {
              std::size_t i = cursor.fetch_add(1);
              if (i >= input->tb.sentences.size()) break;
              parse_one(i);
            }
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
      for (std::thread& t : pool) t.join();
      for (const std::exception_ptr& failure : failures)
        if (failure) std::rethrow_exception(failure);
    }
    *out = result.release();
  });
}

/* ------------------------------------------------------------------ */

arbor_status arbor_harmonize(const arbor_treebank* input, int fixed_to_flat, int relabel_dep,
                             const char* rules_path_or_null, arbor_treebank** out) {
  if (!input || !out) return invalid("input and out must not be null");
  return guarded([&] {
    auto result = std::make_unique<arbor_treebank>();
    result->tb = input->tb;
    if (fixed_to_flat) result->tb = arbor::fixed_numerals_to_flat(std::move(result->tb));
    if (relabel_dep) {
      std::vector<arbor::DepRule> rules =
          rules_path_or_null
              ? arbor::parse_rule_table(arbor::read_file(rules_path_or_null))
              : arbor::default_dep_rules();
      result->tb = arbor::relabel_dep(std::move(result->tb), rules);
    }
    *out = result.release();
  });
}

/* ------------------------------------------------------------------ */

arbor_status arbor_evaluate(const arbor_treebank* const* gold,
                            const arbor_treebank* const* system, size_t n_treebanks,
                            int strip_subtypes, arbor_metrics** out) {
  if (!gold || !system || n_treebanks == 0 || !out)
    return invalid("gold, system, out must not be null and n_treebanks must be > 0");
  return guarded([&] {
    std::vector<arbor::Treebank> g, s;
    for (size_t i = 0; i < n_treebanks; ++i) {
      if (!gold[i] || !system[i]) arbor::fail(arbor::ErrorCode::InvalidArg, "null treebank handle");
      g.push_back(gold[i]->tb);
      s.push_back(system[i]->tb);
    }
    auto metrics = std::make_unique<arbor_metrics>();
    metrics->report = arbor::evaluate_treebanks(g, s, strip_subtypes != 0);
    *out = metrics.release();
  });
}

arbor_status arbor_metrics_text(const arbor_metrics* metrics, char** out) {
  if (!metrics || !out) return invalid("metrics and out must not be null");
  return guarded([&] { *out = copy_string(arbor::metrics_text(metrics->report)); });
}

arbor_status arbor_metrics_json(const arbor_metrics* metrics, char** out) {
  if (!metrics || !out) return invalid("metrics and out must not be null");
  return guarded([&] { *out = copy_string(arbor::metrics_json(metrics->report)); });
}

arbor_status arbor_metrics_value(const arbor_metrics* metrics, size_t treebank_index,
                                 const char* metric, double* out) {
  if (!metrics || !metric || !out) return invalid("metrics, metric, out must not be null");
  return guarded([&] {
    const arbor::MetricReport& report = metrics->report;
    double uas, las, upos, ufeats;
    if (treebank_index == ARBOR_METRICS_MACRO) {
      uas = report.macro_uas;
      las = report.macro_las;
      upos = report.macro_upos;
      ufeats = report.macro_ufeats;
    } else {
      if (treebank_index >= report.per_treebank.size())
        arbor::fail(arbor::ErrorCode::InvalidArg, "treebank index out of range");
      const arbor::TreebankScores& tb = report.per_treebank[treebank_index];
      uas = tb.uas;
      las = tb.las;
      upos = tb.upos_acc;
      ufeats = tb.ufeats_acc;
    }
    std::string_view name(metric);
    if (name == "uas")
      *out = uas;
    else if (name == "las")
      *out = las;
    else if (name == "upos")
      *out = upos;
    else if (name == "ufeats")
      *out = ufeats;
    else
      arbor::fail(arbor::ErrorCode::InvalidArg,
                  "metric must be one of uas, las, upos, ufeats");
  });
}

void arbor_metrics_free(arbor_metrics* metrics) { delete metrics; }

/* ------------------------------------------------------------------ */

arbor_status arbor_sample_report(const arbor_treebank* const* treebanks, size_t n_treebanks,
                                 char** out) {
  if (!treebanks || n_treebanks == 0 || !out)
    return invalid("treebanks and out must not be null and n_treebanks must be > 0");
  return guarded([&] {
    std::vector<std::string> names;
    std::vector<std::size_t> counts;
    for (size_t i = 0; i < n_treebanks; ++i) {
      if (!treebanks[i]) arbor::fail(arbor::ErrorCode::InvalidArg, "null treebank handle");
      names.push_back(treebanks[i]->tb.name);
      counts.push_back(treebanks[i]->tb.sentence_count());
    }
    *out = copy_string(arbor::sample_report(names, counts));
  });
}

}  // extern "C"
