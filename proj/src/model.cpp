#include "model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "rng.hpp"

namespace arbor {

namespace {

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string emb_name(std::size_t channel) { return "emb." + std::to_string(channel); }

std::string lstm_name(int layer, int dir, const char* what) {
  return "lstm." + std::to_string(layer) + (dir == 0 ? ".fwd." : ".bwd.") + what;
}

bool is_bias(std::string_view name) { return name.ends_with(".b"); }

double lse(const Vector& v) {
  double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

Vector softmax_vec(const Vector& v) {
  double m = v.maxCoeff();
  Vector e = (v.array() - m).exp().matrix();
  return e / e.sum();
}

int argmax_index(const Vector& v, int skip = -1) {
  int best = -1;
  for (int i = 0; i < v.size(); ++i) {
    if (i == skip) continue;
    if (best == -1 || v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

bool ModelConfig::use_gold_upos() const {
  return std::any_of(channels.begin(), channels.end(),
                     [](const ChannelConfig& c) { return c.source == ChannelSource::Upos; });
}

int ModelConfig::encoder_input_dim() const {
  int dim = 0;
  for (const ChannelConfig& c : channels) dim += c.dim;
  return dim;
}

void ModelConfig::validate() const {
  if (channels.empty()) fail(ErrorCode::Config, "model needs at least one input channel");
  for (const ChannelConfig& c : channels)
    if (c.dim < 1) fail(ErrorCode::Config, "channel embedding dim must be >= 1");
  if (lstm_layers < 1 || lstm_dim < 1 || head_hidden_dim < 1 || qk_dim < 1)
    fail(ErrorCode::Config, "all architecture dimensions must be >= 1");
}

Vocabularies build_vocabularies(const ModelConfig& config, std::span<const Treebank> tbs) {
  Vocabularies v;
  for (std::size_t k = 0; k < config.channels.size(); ++k)
    v.channel.push_back(Vocab::with_unknown());
  for (const Treebank& tb : tbs) {
    for (const Sentence& s : tb.sentences) {
      for (const Token& tok : s.tokens) {
        for (std::size_t k = 0; k < config.channels.size(); ++k) {
          if (config.channels[k].source == ChannelSource::Form)
            v.channel[k].add(config.case_fold ? fold_case(tok.form) : tok.form);
          else
            v.channel[k].add(tok.upos);
        }
        v.labels.add(tok.deprel);
        v.upos.add(tok.upos);
        v.feats.add(serialize_feats(tok.feats));
      }
    }
  }
  return v;
}

Matrix& ParserModel::param(std::string_view name) {
  auto it = param_index.find(std::string(name));
  if (it == param_index.end()) fail(ErrorCode::InvalidArg, "no parameter named " + std::string(name));
  return params[it->second].value;
}

const Matrix& ParserModel::param(std::string_view name) const {
  return const_cast<ParserModel*>(this)->param(name);
}

void ParserModel::rebuild_index() {
  param_index.clear();
  for (std::size_t i = 0; i < params.size(); ++i)
    param_index.emplace(params[i].name, static_cast<int>(i));
}

std::vector<ParamShape> param_layout(const ModelConfig& config, const Vocabularies& vocabs) {
  const int enc_in = config.encoder_input_dim();
  const int H = config.lstm_dim;
  const int enc_out = config.encoder_output_dim();
  const int hid = config.head_hidden_dim;
  const int qk = config.qk_dim;

  std::vector<ParamShape> layout;
  for (std::size_t k = 0; k < config.channels.size(); ++k)
    layout.push_back({emb_name(k), vocabs.channel[k].size(), config.channels[k].dim});
  for (int l = 0; l < config.lstm_layers; ++l) {
    const int in_dim = l == 0 ? enc_in : enc_out;
    for (int dir = 0; dir < 2; ++dir) {
      layout.push_back({lstm_name(l, dir, "W"), 4 * H, in_dim});
      layout.push_back({lstm_name(l, dir, "U"), 4 * H, H});
      layout.push_back({lstm_name(l, dir, "b"), 4 * H, 1});
    }
  }
  layout.push_back({"root", enc_out, 1});
  for (const char* head : {"arc_q", "arc_k"}) {
    layout.push_back({std::string(head) + ".hidden.W", hid, enc_out});
    layout.push_back({std::string(head) + ".hidden.b", hid, 1});
    layout.push_back({std::string(head) + ".out.W", qk, hid});
    layout.push_back({std::string(head) + ".out.b", qk, 1});
  }
  layout.push_back({"label.hidden.W", hid, 2 * enc_out});
  layout.push_back({"label.hidden.b", hid, 1});
  layout.push_back({"label.out.W", vocabs.labels.size(), hid});
  layout.push_back({"label.out.b", vocabs.labels.size(), 1});
  layout.push_back({"upos.hidden.W", hid, enc_out});
  layout.push_back({"upos.hidden.b", hid, 1});
  layout.push_back({"upos.out.W", vocabs.upos.size(), hid});
  layout.push_back({"upos.out.b", vocabs.upos.size(), 1});
  layout.push_back({"feats.hidden.W", hid, enc_out});
  layout.push_back({"feats.hidden.b", hid, 1});
  layout.push_back({"feats.out.W", vocabs.feats.size(), hid});
  layout.push_back({"feats.out.b", vocabs.feats.size(), 1});
  return layout;
}

ParserModel init_model(const ModelConfig& config, Vocabularies vocabs) {
  config.validate();
  if (vocabs.channel.size() != config.channels.size())
    fail(ErrorCode::InvalidArg, "vocabularies do not match the channel list");
  if (vocabs.labels.size() < 1 || vocabs.upos.size() < 1 || vocabs.feats.size() < 1)
    fail(ErrorCode::Data, "EmptyTreebank: target vocabularies are empty");

  ParserModel model;
  model.config = config;
  model.vocabs = std::move(vocabs);
  for (const ParamShape& shape : param_layout(config, model.vocabs))
    model.params.push_back({shape.name, Matrix::Zero(shape.rows, shape.cols)});

  std::mt19937_64 rng(config.seed);
  for (Param& p : model.params) {
    if (is_bias(p.name)) continue;  // biases stay zero
    const double r = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
    for (Eigen::Index i = 0; i < p.value.rows(); ++i)
      for (Eigen::Index j = 0; j < p.value.cols(); ++j)
        p.value(i, j) = uniform_range(rng, -r, r);
  }
  model.rebuild_index();
  return model;
}

// ---------------------------------------------------------------------------
// Forward pass with a trace for reverse mode.

namespace {

struct LstmDirTrace {
  // All indexed by token position 0..n-1 regardless of direction.
  std::vector<Vector> i, f, g, o, c, tanh_c, h;
};

struct Mlp2Trace {
  Matrix input;  // in_dim × cols
  Matrix pre;    // hid × cols
  Matrix hid;    // hid × cols (relu of pre)
  Matrix out;    // out_dim × cols
};

struct Trace {
  int n = 0;
  std::vector<std::vector<int>> ids;  // per channel, per token
  std::vector<Matrix> layer_inputs;   // per lstm layer
  std::vector<std::array<LstmDirTrace, 2>> lstm;
  Matrix enc;  // enc_out × (n + 1); column 0 is the root representation
  Mlp2Trace q, k, label, upos, feats;
  Matrix scores;  // (n + 1) × n, self arcs at -inf
  std::vector<Vector> head_probs;
  std::vector<int> argmax_heads;
  std::vector<int> label_cond_heads;
};

struct HeadRefs {
  const Matrix *Wh, *bh, *Wo, *bo;
};

HeadRefs head_refs(const ParserModel& m, const std::string& prefix) {
  return {&m.param(prefix + ".hidden.W"), &m.param(prefix + ".hidden.b"),
          &m.param(prefix + ".out.W"), &m.param(prefix + ".out.b")};
}

void mlp_forward(const HeadRefs& p, Matrix input, Mlp2Trace& tr) {
  tr.input = std::move(input);
  tr.pre = (*p.Wh * tr.input).colwise() + p.bh->col(0);
  tr.hid = tr.pre.cwiseMax(0.0);
  tr.out = (*p.Wo * tr.hid).colwise() + p.bo->col(0);
}

void lstm_forward(const Matrix& W, const Matrix& U, const Vector& b, const Matrix& X,
                  bool reverse, LstmDirTrace& tr, Matrix& out, int row_offset) {
  const int n = static_cast<int>(X.cols());
  const int H = static_cast<int>(U.cols());
  tr.i.resize(n);
  tr.f.resize(n);
  tr.g.resize(n);
  tr.o.resize(n);
  tr.c.resize(n);
  tr.tanh_c.resize(n);
  tr.h.resize(n);

  const Matrix WX = W * X;
  Vector h_prev = Vector::Zero(H);
  Vector c_prev = Vector::Zero(H);
  for (int step = 0; step < n; ++step) {
    const int t = reverse ? n - 1 - step : step;
    Vector z = WX.col(t) + U * h_prev + b;
    Vector zi = z.segment(0, H), zf = z.segment(H, H), zg = z.segment(2 * H, H),
           zo = z.segment(3 * H, H);
    tr.i[t] = (1.0 / (1.0 + (-zi.array()).exp())).matrix();
    tr.f[t] = (1.0 / (1.0 + (-zf.array()).exp())).matrix();
    tr.g[t] = zg.array().tanh().matrix();
    tr.o[t] = (1.0 / (1.0 + (-zo.array()).exp())).matrix();
    tr.c[t] = tr.f[t].cwiseProduct(c_prev) + tr.i[t].cwiseProduct(tr.g[t]);
    tr.tanh_c[t] = tr.c[t].array().tanh().matrix();
    tr.h[t] = tr.o[t].cwiseProduct(tr.tanh_c[t]);
    out.block(row_offset, t, H, 1) = tr.h[t];
    h_prev = tr.h[t];
    c_prev = tr.c[t];
  }
}

Trace run_forward(const ParserModel& model, const Sentence& sentence,
                  const std::vector<int>* label_heads) {
  const ModelConfig& cfg = model.config;
  const int n = sentence.size();
  if (n < 1) fail(ErrorCode::InvalidArg, "cannot score an empty sentence");

  Trace tr;
  tr.n = n;

  // Input channels.
  tr.ids.resize(cfg.channels.size());
  for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
    tr.ids[k].resize(n);
    for (int t = 0; t < n; ++t) {
      const Token& tok = sentence.tokens[t];
      if (cfg.channels[k].source == ChannelSource::Form) {
        tr.ids[k][t] = model.vocabs.channel[k].find_or_unknown(
            cfg.case_fold ? fold_case(tok.form) : tok.form);
      } else {
        if (tok.upos == "_")
          fail(ErrorCode::Data, "MissingGoldUpos: token " + std::to_string(tok.id) +
                                    " ('" + tok.form + "') has no UPOS tag");
        tr.ids[k][t] = model.vocabs.channel[k].find_or_unknown(tok.upos);
      }
    }
  }

  Matrix x0(cfg.encoder_input_dim(), n);
  {
    int offset = 0;
    for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
      const Matrix& emb = model.param(emb_name(k));
      for (int t = 0; t < n; ++t)
        x0.block(offset, t, cfg.channels[k].dim, 1) = emb.row(tr.ids[k][t]).transpose();
      offset += cfg.channels[k].dim;
    }
  }

  // Stacked bidirectional recurrences.
  const int H = cfg.lstm_dim;
  tr.layer_inputs.resize(cfg.lstm_layers);
  tr.lstm.resize(cfg.lstm_layers);
  Matrix layer_in = std::move(x0);
  Matrix layer_out;
  for (int l = 0; l < cfg.lstm_layers; ++l) {
    tr.layer_inputs[l] = std::move(layer_in);
    layer_out = Matrix::Zero(2 * H, n);
    for (int dir = 0; dir < 2; ++dir) {
      lstm_forward(model.param(lstm_name(l, dir, "W")), model.param(lstm_name(l, dir, "U")),
                   model.param(lstm_name(l, dir, "b")).col(0), tr.layer_inputs[l], dir == 1,
                   tr.lstm[l][dir], layer_out, dir * H);
    }
    layer_in = layer_out;
  }

  tr.enc.resize(cfg.encoder_output_dim(), n + 1);
  tr.enc.col(0) = model.param("root").col(0);
  tr.enc.rightCols(n) = layer_out;

  // Arc attention: score(h, d) = query(d) . key(h).
  mlp_forward(head_refs(model, "arc_q"), tr.enc.rightCols(n), tr.q);
  mlp_forward(head_refs(model, "arc_k"), tr.enc, tr.k);
  tr.scores = tr.k.out.transpose() * tr.q.out;  // (n + 1) × n
  for (int d = 1; d <= n; ++d) tr.scores(d, d - 1) = kNegativeInfinity;

  tr.head_probs.resize(n);
  tr.argmax_heads.resize(n);
  for (int d = 1; d <= n; ++d) {
    tr.head_probs[d - 1] = softmax_vec(tr.scores.col(d - 1));
    tr.argmax_heads[d - 1] = argmax_index(tr.scores.col(d - 1), d);
  }

  tr.label_cond_heads = label_heads ? *label_heads : tr.argmax_heads;
  if (static_cast<int>(tr.label_cond_heads.size()) != n)
    fail(ErrorCode::InvalidArg, "label conditioning heads do not match sentence length");
  Matrix label_in(2 * cfg.encoder_output_dim(), n);
  for (int d = 1; d <= n; ++d) {
    const int h = tr.label_cond_heads[d - 1];
    if (h < 0 || h > n || h == d)
      fail(ErrorCode::InvalidArg, "label conditioning head out of range");
    label_in.col(d - 1) << tr.enc.col(d), tr.enc.col(h);
  }
  mlp_forward(head_refs(model, "label"), std::move(label_in), tr.label);
  mlp_forward(head_refs(model, "upos"), tr.enc.rightCols(n), tr.upos);
  mlp_forward(head_refs(model, "feats"), tr.enc.rightCols(n), tr.feats);
  return tr;
}

ScoredSentence scored_from_trace(const Trace& tr) {
  ScoredSentence out;
  out.n = tr.n;
  out.arc_scores = ArcScores::make(tr.n);
  for (int d = 1; d <= tr.n; ++d)
    for (int h = 0; h <= tr.n; ++h)
      if (h != d) out.arc_scores.set(h, d, tr.scores(h, d - 1));
  out.head_probs = tr.head_probs;
  out.argmax_heads = tr.argmax_heads;
  out.label_probs.resize(tr.n);
  out.upos_probs.resize(tr.n);
  out.feats_probs.resize(tr.n);
  for (int t = 0; t < tr.n; ++t) {
    out.label_probs[t] = softmax_vec(tr.label.out.col(t));
    out.upos_probs[t] = softmax_vec(tr.upos.out.col(t));
    out.feats_probs[t] = softmax_vec(tr.feats.out.col(t));
  }
  return out;
}

struct GoldIndices {
  std::vector<int> heads, labels, upos, feats;
};

GoldIndices gold_indices(const Vocabularies& vocabs, const Sentence& sentence) {
  GoldIndices gold;
  const int n = sentence.size();
  for (const Token& tok : sentence.tokens) {
    if (tok.head == kHeadUnset || tok.head < 0 || tok.head > n || tok.head == tok.id)
      fail(ErrorCode::Data, "missing or invalid gold head for token " + std::to_string(tok.id));
    gold.heads.push_back(tok.head);
    int label = vocabs.labels.find(tok.deprel);
    if (label < 0)
      fail(ErrorCode::Data, "UnknownLabel: deprel '" + tok.deprel +
                                "' is not in the training vocabulary");
    gold.labels.push_back(label);
    int upos = vocabs.upos.find(tok.upos);
    if (upos < 0)
      fail(ErrorCode::Data, "UnknownLabel: UPOS '" + tok.upos +
                                "' is not in the training vocabulary");
    gold.upos.push_back(upos);
    std::string bundle = serialize_feats(tok.feats);
    int feats = vocabs.feats.find(bundle);
    if (feats < 0)
      fail(ErrorCode::Data, "UnknownLabel: feature bundle '" + bundle +
                                "' is not in the training vocabulary");
    gold.feats.push_back(feats);
  }
  return gold;
}

// Token-averaged sum of the four cross-entropies.
double trace_loss(const Trace& tr, const GoldIndices& gold) {
  double total = 0.0;
  for (int t = 0; t < tr.n; ++t) {
    total += lse(tr.scores.col(t)) - tr.scores(gold.heads[t], t);
    total += lse(tr.label.out.col(t)) - tr.label.out(gold.labels[t], t);
    total += lse(tr.upos.out.col(t)) - tr.upos.out(gold.upos[t], t);
    total += lse(tr.feats.out.col(t)) - tr.feats.out(gold.feats[t], t);
  }
  return total / tr.n;
}

}  // namespace

ScoredSentence forward(const ParserModel& model, const Sentence& sentence,
                       const std::vector<int>* label_heads) {
  return scored_from_trace(run_forward(model, sentence, label_heads));
}

double loss(const ParserModel& model, const Sentence& sentence) {
  Trace tr = run_forward(model, sentence, nullptr);
  return trace_loss(tr, gold_indices(model.vocabs, sentence));
}

// ---------------------------------------------------------------------------
// Reverse mode.

namespace {

struct HeadGradRefs {
  Matrix *Wh, *bh, *Wo, *bo;
};

HeadGradRefs head_grad_refs(const ParserModel& m, GradientList& grads,
                            const std::string& prefix) {
  auto at = [&](const std::string& name) -> Matrix* {
    return &grads[m.param_index.at(name)];
  };
  return {at(prefix + ".hidden.W"), at(prefix + ".hidden.b"), at(prefix + ".out.W"),
          at(prefix + ".out.b")};
}

// dOut is the gradient at the MLP output; returns the gradient at its input.
Matrix mlp_backward(const HeadRefs& p, const Mlp2Trace& tr, const Matrix& d_out,
                    const HeadGradRefs& g) {
  g.Wo->noalias() += d_out * tr.hid.transpose();
  g.bo->col(0).noalias() += d_out.rowwise().sum();
  Matrix d_hid = p.Wo->transpose() * d_out;
  Matrix d_pre = d_hid.cwiseProduct((tr.pre.array() > 0.0).cast<double>().matrix());
  g.Wh->noalias() += d_pre * tr.input.transpose();
  g.bh->col(0).noalias() += d_pre.rowwise().sum();
  return p.Wh->transpose() * d_pre;
}

void lstm_backward(const Matrix& W, const Matrix& U, const LstmDirTrace& tr,
                   const Matrix& X, bool reverse, const Matrix& d_h_out, Matrix& gW,
                   Matrix& gU, Matrix& gb, Matrix& d_x) {
  const int n = static_cast<int>(X.cols());
  const int H = static_cast<int>(U.cols());

  Matrix dz_all = Matrix::Zero(4 * H, n);
  Vector dh_rec = Vector::Zero(H);
  Vector dc_rec = Vector::Zero(H);
  for (int step = n - 1; step >= 0; --step) {
    const int t = reverse ? n - 1 - step : step;
    const bool first = step == 0;
    const int t_prev = reverse ? t + 1 : t - 1;

    Vector dh = d_h_out.col(t) + dh_rec;
    Vector d_o = dh.cwiseProduct(tr.tanh_c[t]);
    Vector dc = dh.cwiseProduct(tr.o[t])
                    .cwiseProduct((1.0 - tr.tanh_c[t].array().square()).matrix()) +
                dc_rec;
    Vector c_prev = first ? Vector::Zero(H) : tr.c[t_prev];
    Vector d_i = dc.cwiseProduct(tr.g[t]);
    Vector d_g = dc.cwiseProduct(tr.i[t]);
    Vector d_f = dc.cwiseProduct(c_prev);
    dc_rec = dc.cwiseProduct(tr.f[t]);

    Vector dz(4 * H);
    dz.segment(0, H) =
        d_i.cwiseProduct(tr.i[t]).cwiseProduct((1.0 - tr.i[t].array()).matrix());
    dz.segment(H, H) =
        d_f.cwiseProduct(tr.f[t]).cwiseProduct((1.0 - tr.f[t].array()).matrix());
    dz.segment(2 * H, H) = d_g.cwiseProduct((1.0 - tr.g[t].array().square()).matrix());
    dz.segment(3 * H, H) =
        d_o.cwiseProduct(tr.o[t]).cwiseProduct((1.0 - tr.o[t].array()).matrix());
    dz_all.col(t) = dz;
    dh_rec.noalias() = U.transpose() * dz;
  }

  Matrix h_prev = Matrix::Zero(H, n);
  for (int t = 0; t < n; ++t) {
    const int t_prev = reverse ? t + 1 : t - 1;
    if (t_prev >= 0 && t_prev < n) h_prev.col(t) = tr.h[t_prev];
  }
  gW.noalias() += dz_all * X.transpose();
  gU.noalias() += dz_all * h_prev.transpose();
  gb.col(0).noalias() += dz_all.rowwise().sum();
  d_x.noalias() += W.transpose() * dz_all;
}

// Accumulates weight * d(sentence loss)/d(params) into grads; returns the
// sentence loss.
double backward(const ParserModel& model, const Trace& tr, const GoldIndices& gold,
                double weight, GradientList& grads) {
  const ModelConfig& cfg = model.config;
  const int n = tr.n;
  const int enc_out = cfg.encoder_output_dim();
  const double tok_w = weight / n;

  Matrix d_enc = Matrix::Zero(enc_out, n + 1);

  // Classification heads: d(logits) = p - onehot(gold), token-weighted.
  auto softmax_grad = [&](const Matrix& logits, const std::vector<int>& gold_ids) {
    Matrix d = Matrix::Zero(logits.rows(), logits.cols());
    for (int t = 0; t < n; ++t) {
      Vector p = softmax_vec(logits.col(t));
      d.col(t) = tok_w * p;
      d(gold_ids[t], t) -= tok_w;
    }
    return d;
  };

  Matrix d_upos_in = mlp_backward(head_refs(model, "upos"), tr.upos,
                                  softmax_grad(tr.upos.out, gold.upos),
                                  head_grad_refs(model, grads, "upos"));
  Matrix d_feats_in = mlp_backward(head_refs(model, "feats"), tr.feats,
                                   softmax_grad(tr.feats.out, gold.feats),
                                   head_grad_refs(model, grads, "feats"));
  Matrix d_label_in = mlp_backward(head_refs(model, "label"), tr.label,
                                   softmax_grad(tr.label.out, gold.labels),
                                   head_grad_refs(model, grads, "label"));
  d_enc.rightCols(n) += d_upos_in + d_feats_in;
  for (int d = 1; d <= n; ++d) {
    d_enc.col(d) += d_label_in.col(d - 1).head(enc_out);
    d_enc.col(tr.label_cond_heads[d - 1]) += d_label_in.col(d - 1).tail(enc_out);
  }

  // Head-attachment cross-entropy through the dot-product attention.
  Matrix d_scores = Matrix::Zero(n + 1, n);
  for (int d = 1; d <= n; ++d) {
    d_scores.col(d - 1) = tok_w * tr.head_probs[d - 1];
    d_scores(gold.heads[d - 1], d - 1) -= tok_w;
    d_scores(d, d - 1) = 0.0;  // masked self arc
  }
  Matrix d_q = tr.k.out * d_scores;              // qk × n
  Matrix d_k = tr.q.out * d_scores.transpose();  // qk × (n + 1)
  d_enc.rightCols(n) += mlp_backward(head_refs(model, "arc_q"), tr.q, d_q,
                                     head_grad_refs(model, grads, "arc_q"));
  d_enc += mlp_backward(head_refs(model, "arc_k"), tr.k, d_k,
                        head_grad_refs(model, grads, "arc_k"));

  grads[model.param_index.at("root")].col(0) += d_enc.col(0);

  // Through the stacked BiLSTM.
  const int H = cfg.lstm_dim;
  Matrix d_layer = d_enc.rightCols(n);
  for (int l = cfg.lstm_layers - 1; l >= 0; --l) {
    Matrix d_input = Matrix::Zero(tr.layer_inputs[l].rows(), n);
    for (int dir = 0; dir < 2; ++dir) {
      lstm_backward(model.param(lstm_name(l, dir, "W")), model.param(lstm_name(l, dir, "U")),
                    tr.lstm[l][dir], tr.layer_inputs[l], dir == 1,
                    d_layer.middleRows(dir * H, H),
                    grads[model.param_index.at(lstm_name(l, dir, "W"))],
                    grads[model.param_index.at(lstm_name(l, dir, "U"))],
                    grads[model.param_index.at(lstm_name(l, dir, "b"))], d_input);
    }
    d_layer = std::move(d_input);
  }

  // Scatter into the embedding tables.
  int offset = 0;
  for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
    Matrix& g_emb = grads[model.param_index.at(emb_name(k))];
    for (int t = 0; t < n; ++t)
      g_emb.row(tr.ids[k][t]) += d_layer.col(t).segment(offset, cfg.channels[k].dim).transpose();
    offset += cfg.channels[k].dim;
  }

  return trace_loss(tr, gold);
}

}  // namespace

GradientList gradients(const ParserModel& model, std::span<const Sentence* const> batch,
                       double* mean_loss) {
  if (batch.empty()) fail(ErrorCode::InvalidArg, "gradient of an empty batch");
  GradientList grads;
  grads.reserve(model.params.size());
  for (const Param& p : model.params)
    grads.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));

  const double weight = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const Sentence* sentence : batch) {
    Trace tr = run_forward(model, *sentence, nullptr);
    GoldIndices gold = gold_indices(model.vocabs, *sentence);
    total += backward(model, tr, gold, weight, grads);
  }
  if (mean_loss) *mean_loss = total * weight;
  return grads;
}

std::vector<int> decode_heads(const ScoredSentence& scored) {
  ArcScores log_scores = ArcScores::make(scored.n);
  for (int d = 1; d <= scored.n; ++d)
    for (int h = 0; h <= scored.n; ++h)
      if (h != d) log_scores.set(h, d, std::log(scored.head_probs[d - 1][h] + 1e-12));
  return decode_mst(log_scores);
}

Sentence annotate(const ModelConfig& config, const Vocabularies& vocabs,
                  const ScoredSentence& scored, Sentence sentence) {
  if (scored.n != sentence.size())
    fail(ErrorCode::InvalidArg, "scored sentence does not match the input length");
  std::vector<int> heads = decode_heads(scored);
  for (int t = 0; t < scored.n; ++t) {
    Token& tok = sentence.tokens[t];
    tok.head = heads[t];
    tok.deprel = vocabs.labels.item(argmax_index(scored.label_probs[t]));
    if (!config.use_gold_upos()) tok.upos = vocabs.upos.item(argmax_index(scored.upos_probs[t]));
    tok.feats = parse_feats(vocabs.feats.item(argmax_index(scored.feats_probs[t])));
  }
  return sentence;
}

Sentence predict(const ParserModel& model, const Sentence& sentence) {
  return annotate(model.config, model.vocabs, forward(model, sentence), sentence);
}

}  // namespace arbor
