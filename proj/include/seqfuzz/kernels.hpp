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

#pragma once

#include <Eigen/Dense>

namespace seqfuzz::kernels {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Elementwise GRU cell math for a batch (one column per sequence), with
// gate pre-activations stacked [reset; update; new] as in PyTorch:
//   r = σ(gx_r + gh_r)   u = σ(gx_u + gh_u)   n = tanh(gx_n + r ∘ gh_n)
//   h' = (1 − u) ∘ n + u ∘ h
// Columns with mask 0 carry h through unchanged. The parallel versions
// split columns across OpenMP threads; the serial versions are the
// reference and produce bit-identical results.
template <typename T>
struct GateCache {
  Mat<T> r, u, n;
};

template <typename T>
void gru_forward(const Mat<T>& gx, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask, GateCache<T>& c,
                 Mat<T>& h_out);
template <typename T>
void gru_forward_serial(const Mat<T>& gx, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask, GateCache<T>& c,
                        Mat<T>& h_out);

// Given dL/dh', writes gradients w.r.t. gx, gh and h (the latter
// overwritten, not accumulated).
template <typename T>
void gru_backward(const Mat<T>& dh_out, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                  const GateCache<T>& c, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh);
template <typename T>
void gru_backward_serial(const Mat<T>& dh_out, const Mat<T>& gh, const Mat<T>& h, const Vec<T>& mask,
                         const GateCache<T>& c, Mat<T>& dgx, Mat<T>& dgh, Mat<T>& dh);

// Weighted softmax cross-entropy per column. Writes per-column losses
// (already weighted) and dL/dlogits scaled by `scale`.
template <typename T>
void softmax_xent(const Mat<T>& logits, const int* targets, const T* weights, T scale, Vec<T>& losses,
                  Mat<T>& dlogits);
template <typename T>
void softmax_xent_serial(const Mat<T>& logits, const int* targets, const T* weights, T scale, Vec<T>& losses,
                         Mat<T>& dlogits);

// Column-wise argmax over rows [first, rows).
template <typename T>
void argmax_columns(const Mat<T>& logits, int first, int* out);

}  // namespace seqfuzz::kernels
