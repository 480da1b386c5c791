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

#include "seqfuzz/kernels.hpp"

#include <cmath>

namespace seqfuzz::kernels {

namespace {

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void forward_column(Eigen::Index j, const Mat<T>& gx, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                    GateCache<T>& c, Mat<T>& h_out) {
  const Eigen::Index H = h.rows();
  const bool active = mask(j) != T(0);
  for (Eigen::Index i = 0; i < H; ++i) {
    T r = sigmoid(gx(i, j) + gh(i, j));
    T u = sigmoid(gx(H + i, j) + gh(H + i, j));
    T n = std::tanh(gx(2 * H + i, j) + r * gh(2 * H + i, j));
    c.r(i, j) = r;
    c.u(i, j) = u;
    c.n(i, j) = n;
    h_out(i, j) = active ? (T(1) - u) * n + u * h(i, j) : h(i, j);
  }
}

template <typename T>
void backward_column(Eigen::Index j, const Mat<T>& dh_out, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                     const GateCache<T>& c, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh) {
  const Eigen::Index H = h.rows();
  if (mask(j) == T(0)) {
    for (Eigen::Index i = 0; i < 3 * H; ++i) dgx(i, j) = dgh(i, j) = T(0);
    for (Eigen::Index i = 0; i < H; ++i) dh(i, j) = dh_out(i, j);
    return;
  }
  for (Eigen::Index i = 0; i < H; ++i) {
    T g = dh_out(i, j);
    T r = c.r(i, j), u = c.u(i, j), n = c.n(i, j);
    T dn = g * (T(1) - u) * (T(1) - n * n);
    T du = g * (h(i, j) - n) * u * (T(1) - u);
    T dr = dn * gh(2 * H + i, j) * r * (T(1) - r);
    dgx(i, j) = dr;
    dgx(H + i, j) = du;
    dgx(2 * H + i, j) = dn;
    dgh(i, j) = dr;
    dgh(H + i, j) = du;
    dgh(2 * H + i, j) = dn * r;
    dh(i, j) = g * u;
  }
}

template <typename T>
T xent_column(Eigen::Index j, const Mat<T>& logits, const int* targets, const T* weights, T scale,
              Mat<T>& dlogits) {
  const Eigen::Index V = logits.rows();
  T w = weights[j];
  if (w == T(0)) {
    for (Eigen::Index i = 0; i < V; ++i) dlogits(i, j) = T(0);
    return T(0);
  }
  T mx = logits.col(j).maxCoeff();
  T sum = 0;
  for (Eigen::Index i = 0; i < V; ++i) {
    T e = std::exp(logits(i, j) - mx);
    dlogits(i, j) = e;
    sum += e;
  }
  for (Eigen::Index i = 0; i < V; ++i) dlogits(i, j) = dlogits(i, j) / sum * w * scale;
  dlogits(targets[j], j) -= w * scale;
  return w * (std::log(sum) + mx - logits(targets[j], j));
}

template <typename T>
void prepare(const Mat<T>& h, GateCache<T>& c, Mat<T>& h_out) {
  c.r.resize(h.rows(), h.cols());
  c.u.resize(h.rows(), h.cols());
  c.n.resize(h.rows(), h.cols());
  h_out.resize(h.rows(), h.cols());
}

template <typename T>
void prepare_backward(const Mat<T>& h, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh) {
  dgx.resize(3 * h.rows(), h.cols());
  dgh.resize(3 * h.rows(), h.cols());
  dh.resize(h.rows(), h.cols());
}

}  // namespace

template <typename T>
void gru_forward(const Mat<T>& gx, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask, GateCache<T>& c,
                 Mat<T>& h_out) {
  prepare(h, c, h_out);
  const Eigen::Index B = h.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < B; ++j) forward_column(j, gx, gh, h, mask, c, h_out);
}

template <typename T>
void gru_forward_serial(const Mat<T>& gx, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask, GateCache<T>& c,
                        Mat<T>& h_out) {
  prepare(h, c, h_out);
  for (Eigen::Index j = 0; j < h.cols(); ++j) forward_column(j, gx, gh, h, mask, c, h_out);
}

template <typename T>
void gru_backward(const Mat<T>& dh_out, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                  const GateCache<T>& c, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh) {
  prepare_backward(h, dgx, dgh, dh);
  const Eigen::Index B = h.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < B; ++j) backward_column(j, dh_out, gh, h, mask, c, dgx, dgh, dh);
}

template <typename T>
void gru_backward_serial(const Mat<T>& dh_out, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                         const GateCache<T>& c, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh) {
  prepare_backward(h, dgx, dgh, dh);
  for (Eigen::Index j = 0; j < h.cols(); ++j) backward_column(j, dh_out, gh, h, mask, c, dgx, dgh, dh);
}

template <typename T>
void softmax_xent(const Mat<T>& logits, const int* targets, const T* weights, T scale, Vec<T>& losses,
                  Mat<T>& dlogits) {
  const Eigen::Index B = logits.cols();
  losses.resize(B);
  dlogits.resize(logits.rows(), B);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < B; ++j) losses(j) = xent_column(j, logits, targets, weights, scale, dlogits);
}

template <typename T>
void softmax_xent_serial(const Mat<T>& logits, const int* targets, const T* weights, T scale, Vec<T>& losses,
                         Mat<T>& dlogits) {
  losses.resize(logits.cols());
  dlogits.resize(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j)
    losses(j) = xent_column(j, logits, targets, weights, scale, dlogits);
}

template <typename T>
void argmax_columns(const Mat<T>& logits, int first, int* out) {
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    Eigen::Index best;
    logits.col(j).tail(logits.rows() - first).maxCoeff(&best);
    out[j] = static_cast<int>(best) + first;
  }
}

#define SEQFUZZ_KERNELS(T)                                                                                       \
  template void gru_forward<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&, const Vec<T>&, GateCache<T>&,      \
                               Mat<T>&);                                                                        \
  template void gru_forward_serial<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&, const Vec<T>&,              \
                                      GateCache<T>&, Mat<T>&);                                                  \
  template void gru_backward<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&, const Vec<T>&,                    \
                                const GateCache<T>&, Mat<T>&, Mat<T>&, Mat<T>&);                                \
  template void gru_backward_serial<T>(const Mat<T>&, const Mat<T>&, const Mat<T>&, const Vec<T>&,             \
                                       const GateCache<T>&, Mat<T>&, Mat<T>&, Mat<T>&);                         \
  template void softmax_xent<T>(const Mat<T>&, const int*, const T*, T, Vec<T>&, Mat<T>&);                      \
  template void softmax_xent_serial<T>(const Mat<T>&, const int*, const T*, T, Vec<T>&, Mat<T>&);               \
  template void argmax_columns<T>(const Mat<T>&, int, int*);

SEQFUZZ_KERNELS(float)
SEQFUZZ_KERNELS(double)

#undef SEQFUZZ_KERNELS

}  // namespace seqfuzz::kernels
