// Copyright 2026 The seqfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqfuzz/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'F', 'Z', 'M', 'D', 'L', '1'};

template <typename T>
using Map = Eigen::Map<kernels::Mat<T>>;
template <typename T>
using CMap = Eigen::Map<const kernels::Mat<T>>;
template <typename T>
using VMap = Eigen::Map<kernels::Vec<T>>;
template <typename T>
using CVMap = Eigen::Map<const kernels::Vec<T>>;

// Parameter views over a flat array (params or gradient).
template <typename T, typename P>
struct Views {
  using M = std::conditional_t<std::is_const_v<P>, CMap<T>, Map<T>>;
  using V = std::conditional_t<std::is_const_v<P>, CVMap<T>, VMap<T>>;
  M emb, enc_wx, enc_wh, dec_wx, dec_wh, out_w;
  V enc_bx, enc_bh, dec_bx, dec_bh, out_b;

  Views(P* base, const typename ModelT<T>::Layout& l, Eigen::Index E, Eigen::Index H, Eigen::Index V_,
        Eigen::Index Din)
      : emb(base + l.emb, E, V_),
        enc_wx(base + l.enc_wx, 3 * H, E),
        enc_wh(base + l.enc_wh, 3 * H, H),
        dec_wx(base + l.dec_wx, 3 * H, Din),
        dec_wh(base + l.dec_wh, 3 * H, H),
        out_w(base + l.out_w, V_, H),
        enc_bx(base + l.enc_bx, 3 * H),
        enc_bh(base + l.enc_bh, 3 * H),
        dec_bx(base + l.dec_bx, 3 * H),
        dec_bh(base + l.dec_bh, 3 * H),
        out_b(base + l.out_b, V_) {}
};

template <typename T>
struct StepCache {
  kernels::Mat<T> x, h_prev, gh;
  kernels::Vec<T> mask;
  kernels::GateCache<T> gates;
  std::vector<int> tokens;
};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ModelError("truncated checkpoint");
}

}  // namespace

template <typename T>
ModelT<T>::ModelT(const Hyperparams& hp, std::size_t num_rules, std::uint64_t grammar_hash)
    : hp_(hp), vocab_(static_cast<int>(num_rules) + kFirstRuleToken), grammar_hash_(grammar_hash) {
  if (hp.embedding_dim <= 0 || hp.hidden_dim <= 0 || hp.max_seq_len <= 0 || hp.batch_size <= 0)
    throw ModelError("hyperparameters must be positive");
  const std::size_t E = hp.embedding_dim, H = hp.hidden_dim, V = vocab_;
  const std::size_t Din = E + (hp.z_per_step ? H : 0);
  std::size_t off = 0;
  auto take = [&off](std::size_t n) {
    auto at = off;
    off += n;
    return at;
  };
  layout_.emb = take(E * V);
  layout_.enc_wx = take(3 * H * E);
  layout_.enc_wh = take(3 * H * H);
  layout_.enc_bx = take(3 * H);
  layout_.enc_bh = take(3 * H);
  layout_.dec_wx = take(3 * H * Din);
  layout_.dec_wh = take(3 * H * H);
  layout_.dec_bx = take(3 * H);
  layout_.dec_bh = take(3 * H);
  layout_.out_w = take(V * H);
  layout_.out_b = take(V);
  layout_.total = off;

  params_.assign(off, T(0));
  Rng rng(hp.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double k = 1.0 / std::sqrt(static_cast<double>(H));
  std::uniform_real_distribution<double> uniform(-k, k);
  for (std::size_t i = 0; i < layout_.enc_wx; ++i) params_[i] = static_cast<T>(normal(rng));
  for (std::size_t i = layout_.enc_wx; i < off; ++i) params_[i] = static_cast<T>(uniform(rng));
}

template <typename T>
bool ModelT<T>::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
void ModelT<T>::check_sequence(const RuleSequence& x) const {
  if (x.grammar_hash != grammar_hash_) throw ModelError("sequence was built against a different grammar");
  if (static_cast<int>(x.tokens.size()) > hp_.max_seq_len)
    throw ModelError("sequence of " + std::to_string(x.tokens.size()) + " tokens exceeds max_seq_len " +
                     std::to_string(hp_.max_seq_len));
  for (auto t : x.tokens)
    if (static_cast<int>(t) + kFirstRuleToken >= vocab_) throw ModelError("token out of vocabulary");
}

template <typename T>
std::vector<int> ModelT<T>::token_ids(const RuleSequence& x) const {
  std::vector<int> ids;
  ids.reserve(x.tokens.size());
  for (auto t : x.tokens) ids.push_back(static_cast<int>(t) + kFirstRuleToken);
  return ids;
}

template <typename T>
typename ModelT<T>::Mat ModelT<T>::encode_batch(const std::vector<const RuleSequence*>& xs) const {
  const Eigen::Index E = hp_.embedding_dim, H = hp_.hidden_dim, B = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index Din = E + (hp_.z_per_step ? H : 0);
  Views<T, const T> w(params_.data(), layout_, E, H, vocab_, Din);
  std::vector<std::vector<int>> ids;
  std::size_t len = 0;
  for (const auto* x : xs) {
    check_sequence(*x);
    ids.push_back(token_ids(*x));
    len = std::max(len, ids.back().size());
  }
  Mat h = Mat::Zero(H, B), h_next, X(E, B);
  Vec mask(B);
  kernels::GateCache<T> cache;
  for (std::size_t t = 0; t < len; ++t) {
    for (Eigen::Index j = 0; j < B; ++j) {
      bool live = t < ids[j].size();
      mask(j) = live ? T(1) : T(0);
      X.col(j) = w.emb.col(live ? ids[j][t] : kPadToken);
    }
    Mat gx = (w.enc_wx * X).colwise() + w.enc_bx;
    Mat gh = (w.enc_wh * h).colwise() + w.enc_bh;
    kernels::gru_forward<T>(gx, gh, h, mask, cache, h_next);
    h.swap(h_next);
  }
  return h;
}

template <typename T>
typename ModelT<T>::Vec ModelT<T>::encode(const RuleSequence& x) const {
  return encode_batch({&x}).col(0);
}

template <typename T>
std::vector<std::vector<RuleId>> ModelT<T>::decode_batch(const Mat& z) const {
  const Eigen::Index E = hp_.embedding_dim, H = hp_.hidden_dim, B = z.cols();
  const Eigen::Index Din = E + (hp_.z_per_step ? H : 0);
  if (z.rows() != H) throw ModelError("embedding has the wrong dimension");
  Views<T, const T> w(params_.data(), layout_, E, H, vocab_, Din);
  std::vector<std::vector<RuleId>> out(B);
  std::vector<bool> done(B, false);
  std::vector<int> prev(B, kSosToken), next(B);
  Mat h = z, h_next, X(Din, B);
  Vec mask = Vec::Ones(B);
  kernels::GateCache<T> cache;
  for (int step = 0; step < hp_.max_seq_len; ++step) {
    for (Eigen::Index j = 0; j < B; ++j) {
      X.col(j).head(E) = w.emb.col(prev[j]);
      if (hp_.z_per_step) X.col(j).tail(H) = z.col(j);
    }
    Mat gx = (w.dec_wx * X).colwise() + w.dec_bx;
    Mat gh = (w.dec_wh * h).colwise() + w.dec_bh;
    kernels::gru_forward<T>(gx, gh, h, mask, cache, h_next);
    h.swap(h_next);
    Mat logits = (w.out_w * h).colwise() + w.out_b;
    kernels::argmax_columns<T>(logits, kEosToken, next.data());
    bool all_done = true;
    for (Eigen::Index j = 0; j < B; ++j) {
      if (done[j]) continue;
      if (next[j] == kEosToken) {
        done[j] = true;
      } else {
        out[j].push_back(static_cast<RuleId>(next[j] - kFirstRuleToken));
        all_done = false;
      }
      prev[j] = next[j];
    }
    if (all_done) break;
  }
  return out;
}

template <typename T>
std::vector<RuleId> ModelT<T>::decode(const Vec& z) const {
  Mat zm = z;
  return decode_batch(zm).front();
}

template <typename T>
T ModelT<T>::loss(const std::vector<const RuleSequence*>& batch, std::vector<T>* grad) const {
  const Eigen::Index E = hp_.embedding_dim, H = hp_.hidden_dim, V = vocab_;
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index Din = E + (hp_.z_per_step ? H : 0);
  Views<T, const T> w(params_.data(), layout_, E, H, V, Din);

  std::vector<std::vector<int>> ids;
  std::size_t len = 0;
  for (const auto* x : batch) {
    check_sequence(*x);
    ids.push_back(token_ids(*x));
    len = std::max(len, ids.back().size());
  }

  // Encoder.
  std::vector<StepCache<T>> enc(len);
  Mat h = Mat::Zero(H, B), h_next;
  for (std::size_t t = 0; t < len; ++t) {
    auto& c = enc[t];
    c.x.resize(E, B);
    c.mask.resize(B);
    c.tokens.resize(B);
    for (Eigen::Index j = 0; j < B; ++j) {
      bool live = t < ids[j].size();
      c.mask(j) = live ? T(1) : T(0);
      c.tokens[j] = live ? ids[j][t] : kPadToken;
      c.x.col(j) = w.emb.col(c.tokens[j]);
    }
    Mat gx = (w.enc_wx * c.x).colwise() + w.enc_bx;
    c.gh = (w.enc_wh * h).colwise() + w.enc_bh;
    c.h_prev = h;
    kernels::gru_forward<T>(gx, c.gh, h, c.mask, c.gates, h_next);
    h.swap(h_next);
  }
  const Mat z = h;

  // Decoder with teacher forcing; targets are the tokens then <eos>.
  const std::size_t steps = len + 1;
  std::vector<StepCache<T>> dec(steps);
  std::vector<Mat> h_out(steps), dlogits(steps);
  std::vector<std::vector<T>> weights(steps, std::vector<T>(B));
  T total_weight = 0;
  for (std::size_t t = 0; t < steps; ++t)
    for (Eigen::Index j = 0; j < B; ++j) {
      weights[t][j] = t <= ids[j].size() ? T(1) : T(0);
      total_weight += weights[t][j];
    }
  const T scale = T(1) / total_weight;
  T loss_sum = 0;
  Vec col_losses;
  std::vector<int> targets(B);
  for (std::size_t t = 0; t < steps; ++t) {
    auto& c = dec[t];
    c.x.resize(Din, B);
    c.mask = Vec::Ones(B);
    c.tokens.resize(B);
    for (Eigen::Index j = 0; j < B; ++j) {
      c.tokens[j] = t == 0 ? kSosToken : (t - 1 < ids[j].size() ? ids[j][t - 1] : kPadToken);
      c.x.col(j).head(E) = w.emb.col(c.tokens[j]);
      if (hp_.z_per_step) c.x.col(j).tail(H) = z.col(j);
      targets[j] = t < ids[j].size() ? ids[j][t] : (t == ids[j].size() ? kEosToken : kPadToken);
    }
    Mat gx = (w.dec_wx * c.x).colwise() + w.dec_bx;
    c.gh = (w.dec_wh * h).colwise() + w.dec_bh;
    c.h_prev = h;
    kernels::gru_forward<T>(gx, c.gh, h, c.mask, c.gates, h_next);
    h.swap(h_next);
    h_out[t] = h;
    Mat logits = (w.out_w * h).colwise() + w.out_b;
    kernels::softmax_xent<T>(logits, targets.data(), weights[t].data(), scale, col_losses, dlogits[t]);
    for (Eigen::Index j = 0; j < B; ++j) loss_sum += col_losses(j);
  }
  const T loss_value = loss_sum / total_weight;
  if (!grad) return loss_value;

  grad->assign(layout_.total, T(0));
  Views<T, T> d(grad->data(), layout_, E, H, V, Din);
  Mat dh = Mat::Zero(H, B), dgx, dgh, dh_prev;
  Mat dz = Mat::Zero(H, B);
  for (std::size_t t = steps; t-- > 0;) {
    const auto& c = dec[t];
    d.out_w.noalias() += dlogits[t] * h_out[t].transpose();
    d.out_b += dlogits[t].rowwise().sum();
    dh.noalias() += w.out_w.transpose() * dlogits[t];
    kernels::gru_backward<T>(dh, c.gh, c.h_prev, c.mask, c.gates, dgx, dgh, dh_prev);
    d.dec_wx.noalias() += dgx * c.x.transpose();
    d.dec_bx += dgx.rowwise().sum();
    d.dec_wh.noalias() += dgh * c.h_prev.transpose();
    d.dec_bh += dgh.rowwise().sum();
    Mat dx = w.dec_wx.transpose() * dgx;
    for (Eigen::Index j = 0; j < B; ++j) d.emb.col(c.tokens[j]) += dx.col(j).head(E);
    if (hp_.z_per_step) dz += dx.bottomRows(H);
    dh = dh_prev;
    dh.noalias() += w.dec_wh.transpose() * dgh;
  }
  dh += dz;
  for (std::size_t t = len; t-- > 0;) {
    const auto& c = enc[t];
    kernels::gru_backward<T>(dh, c.gh, c.h_prev, c.mask, c.gates, dgx, dgh, dh_prev);
    d.enc_wx.noalias() += dgx * c.x.transpose();
    d.enc_bx += dgx.rowwise().sum();
    d.enc_wh.noalias() += dgh * c.h_prev.transpose();
    d.enc_bh += dgh.rowwise().sum();
    Mat dx = w.enc_wx.transpose() * dgx;
    for (Eigen::Index j = 0; j < B; ++j)
      if (c.mask(j) != T(0)) d.emb.col(c.tokens[j]) += dx.col(j);
    dh = dh_prev;
    dh.noalias() += w.enc_wh.transpose() * dgh;
  }
  return loss_value;
}

template <typename T>
void ModelT<T>::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, static_cast<std::uint32_t>(sizeof(T)));
  write_pod(out, hp_.batch_size);
  write_pod(out, hp_.steps);
  write_pod(out, hp_.learning_rate);
  write_pod(out, hp_.embedding_dim);
  write_pod(out, hp_.hidden_dim);
  write_pod(out, hp_.max_seq_len);
  write_pod(out, hp_.rng_seed);
  write_pod(out, static_cast<std::uint8_t>(hp_.z_per_step));
  write_pod(out, static_cast<std::uint8_t>(hp_.shuffle));
  write_pod(out, hp_.clip_norm);
  write_pod(out, vocab_);
  write_pod(out, grammar_hash_);
  write_pod(out, trained_steps_);
  write_pod(out, static_cast<std::uint64_t>(params_.size()));
  out.write(reinterpret_cast<const char*>(params_.data()), static_cast<std::streamsize>(params_.size() * sizeof(T)));
  if (!out) throw ModelError("cannot write " + path);
}

template <typename T>
ModelT<T> ModelT<T>::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ModelError(path + " is not a model checkpoint");
  std::uint32_t width;
  read_pod(in, width);
  if (width != sizeof(T)) throw ModelError("checkpoint scalar width mismatch");
  Hyperparams hp;
  std::uint8_t z_per_step, shuffle;
  read_pod(in, hp.batch_size);
  read_pod(in, hp.steps);
  read_pod(in, hp.learning_rate);
  read_pod(in, hp.embedding_dim);
  read_pod(in, hp.hidden_dim);
  read_pod(in, hp.max_seq_len);
  read_pod(in, hp.rng_seed);
  read_pod(in, z_per_step);
  read_pod(in, shuffle);
  read_pod(in, hp.clip_norm);
  hp.z_per_step = z_per_step != 0;
  hp.shuffle = shuffle != 0;
  int vocab;
  std::uint64_t hash, count;
  int trained;
  read_pod(in, vocab);
  read_pod(in, hash);
  read_pod(in, trained);
  read_pod(in, count);
  ModelT m(hp, static_cast<std::size_t>(vocab - kFirstRuleToken), hash);
  if (count != m.params_.size()) throw ModelError("checkpoint parameter count mismatch");
  in.read(reinterpret_cast<char*>(m.params_.data()), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw ModelError("truncated checkpoint");
  m.trained_steps_ = trained;
  return m;
}

template class ModelT<float>;
template class ModelT<double>;

Model train(const std::vector<RuleSequence>& corpus, const Grammar& g, const Hyperparams& hp, TrainReport* report,
            const std::function<void(int, double)>& progress) {
  if (corpus.empty()) throw ModelError("empty training corpus");
  Model m(hp, g.size(), g.hash());
  for (const auto& x : corpus) {
    if (x.grammar_hash != g.hash()) throw ModelError("corpus sequence built against a different grammar");
    if (static_cast<int>(x.tokens.size()) > hp.max_seq_len)
      throw ModelError("corpus sequence of " + std::to_string(x.tokens.size()) + " tokens exceeds max_seq_len");
  }

  auto& p = m.params();
  std::vector<float> grad, m1(p.size(), 0.0f), m2(p.size(), 0.0f);
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  Rng rng(hp.rng_seed ^ 0x5eedULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  if (hp.shuffle) std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  for (int step = 0; step < hp.steps; ++step) {
    std::vector<const RuleSequence*> batch;
    for (int b = 0; b < hp.batch_size; ++b) {
      if (cursor == order.size()) {
        cursor = 0;
        if (hp.shuffle) std::shuffle(order.begin(), order.end(), rng);
      }
      batch.push_back(&corpus[order[cursor++]]);
    }
    float loss = m.loss(batch, &grad);
    if (hp.clip_norm > 0) {
      double norm = 0;
      for (float v : grad) norm += static_cast<double>(v) * v;
      norm = std::sqrt(norm);
      if (norm > hp.clip_norm) {
        auto f = static_cast<float>(hp.clip_norm / norm);
        for (float& v : grad) v *= f;
      }
    }
    const double c1 = 1.0 - std::pow(beta1, step + 1), c2 = 1.0 - std::pow(beta2, step + 1);
    const auto lr = static_cast<float>(hp.learning_rate * std::sqrt(c2) / c1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m1[i] = static_cast<float>(beta1) * m1[i] + static_cast<float>(1 - beta1) * grad[i];
      m2[i] = static_cast<float>(beta2) * m2[i] + static_cast<float>(1 - beta2) * grad[i] * grad[i];
      p[i] -= lr * m1[i] / (std::sqrt(m2[i]) + static_cast<float>(adam_eps * std::sqrt(c2)));
    }
    m.set_trained_steps(step + 1);
    if (report) report->losses.push_back(loss);
    if (progress) progress(step, loss);
  }
  return m;
}

double reconstruction_accuracy(const Model& m, const std::vector<RuleSequence>& corpus) {
  std::size_t hits = 0, total = 0;
  const std::size_t chunk = 64;
  for (std::size_t start = 0; start < corpus.size(); start += chunk) {
    std::vector<const RuleSequence*> xs;
    for (std::size_t i = start; i < std::min(corpus.size(), start + chunk); ++i) xs.push_back(&corpus[i]);
    auto decoded = m.decode_batch(m.encode_batch(xs));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto& a = xs[i]->tokens;
      const auto& b = decoded[i];
      for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) hits += a[k] == b[k];
      total += std::max(a.size(), b.size());
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 1.0;
}

double numeric_gradient_check(const ModelT<double>& m, const RuleSequence& x, int samples, double h,
                              std::uint64_t seed, double eps) {
  std::vector<const RuleSequence*> batch{&x};
  std::vector<double> grad;
  m.loss(batch, &grad);
  const auto& l = m.layout();
  std::vector<std::pair<std::size_t, std::size_t>> tensors{
      {l.emb, l.enc_wx},       {l.enc_wx, l.enc_wh}, {l.enc_wh, l.enc_bx}, {l.enc_bx, l.enc_bh},
      {l.enc_bh, l.dec_wx},    {l.dec_wx, l.dec_wh}, {l.dec_wh, l.dec_bx}, {l.dec_bx, l.dec_bh},
      {l.dec_bh, l.out_w},     {l.out_w, l.out_b},   {l.out_b, l.total}};
  Rng rng(seed);
  ModelT<double> probe = m;
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    auto [lo, hi] = tensors[static_cast<std::size_t>(s) % tensors.size()];
    auto i = std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
    const double orig = probe.params()[i];
    probe.params()[i] = orig + h;
    double up = probe.loss(batch, nullptr);
    probe.params()[i] = orig - h;
    double down = probe.loss(batch, nullptr);
    probe.params()[i] = orig;
    double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(grad[i] - numeric) / (std::abs(grad[i]) + eps));
  }
  return worst;
}

}  // namespace seqfuzz
