#pragma once

// Straight-line scalar evaluation of the character CNN and the encoder: correlations, cross representations,
// four GRUs, three attention poolings and the concatenated sentence vector. Reads only
// parameter values; shares no code with the library kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mean/attention.hpp"
#include "mean/classifier.hpp"
#include "mean/embeddings.hpp"
#include "oracles.hpp"

namespace oracle {

// Scalar-loop character CNN: tanh projection, right padding, windowed filters, mean over positions.
inline Vec reference_char_cnn(const std::vector<std::size_t>& ids, const mean::CharCnnParams& p) {
  const std::size_t c_mid = p.proj.rows();
  Vec out;
  for (const auto& br : p.branches) {
    const std::size_t w = br.window;
    const std::size_t len = std::max(ids.size(), w);
    Mat a = zeros(c_mid, len);  // zero columns for the right padding
    for (std::size_t j = 0; j < ids.size(); ++j)
      for (std::size_t c = 0; c < c_mid; ++c) a[c][j] = std::tanh(p.proj(c, ids[j]));
    const std::size_t positions = len - w + 1;
    for (std::size_t o = 0; o < br.weight.rows(); ++o) {
      double acc = 0.0;
      for (std::size_t pos = 0; pos < positions; ++pos) {
        double s = br.bias(o, 0);
        for (std::size_t k = 0; k < w; ++k)
          for (std::size_t c = 0; c < c_mid; ++c) s += br.weight(o, k * c_mid + c) * a[c][pos + k];
        acc += std::tanh(s);
      }
      out.push_back(acc / static_cast<double>(positions));
    }
  }
  return out;
}

struct ReferenceGru {
  Mat wz, wr, wh, uz, ur, uh;
  Vec bz, br, bh;

  explicit ReferenceGru(const mean::GruParams& p)
      : wz(to_mat(p.w_z)), wr(to_mat(p.w_r)), wh(to_mat(p.w_h)),
        uz(to_mat(p.u_z)), ur(to_mat(p.u_r)), uh(to_mat(p.u_h)),
        bz(column(to_mat(p.b_z), 0)), br(column(to_mat(p.b_r), 0)), bh(column(to_mat(p.b_h), 0)) {}

  /// One step: returns h' from x and the previous state h.
  Vec cell(const Vec& x, const Vec& h) const {
    const std::size_t n = bz.size();
    Vec out(n);
    // Reset gates are needed for every unit before any candidate is formed.
    Vec r(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double az = bz[i], ar = br[i];
      for (std::size_t k = 0; k < x.size(); ++k) {
        az += wz[i][k] * x[k];
        ar += wr[i][k] * x[k];
      }
      for (std::size_t k = 0; k < n; ++k) {
        az += uz[i][k] * h[k];
        ar += ur[i][k] * h[k];
      }
      z[i] = sigmoid(az);
      r[i] = sigmoid(ar);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double ah = bh[i];
      for (std::size_t k = 0; k < x.size(); ++k) ah += wh[i][k] * x[k];
      for (std::size_t k = 0; k < n; ++k) ah += uh[i][k] * (r[k] * h[k]);
      const double cand = std::tanh(ah);
      out[i] = (1.0 - z[i]) * h[i] + z[i] * cand;
    }
    return out;
  }

  /// Hidden states h_1..h_n as the columns of an h×n matrix.
  Mat encode(const Mat& x) const {
    const std::size_t n = bz.size(), steps = x[0].size();
    Mat hs = zeros(n, steps);
    Vec h(n, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      h = cell(column(x, t), h);
      for (std::size_t i = 0; i < n; ++i) hs[i][t] = h[i];
    }
    return hs;
  }
};

struct ReferenceAttention {
  Vec output;
  Vec alpha;
};

inline ReferenceAttention reference_attend(const Mat& hc, const Mat& hr, const mean::AttentionParams& p) {
  const Mat w = to_mat(p.w);
  const Vec u = column(to_mat(p.u), 0);
  const std::size_t h = hc.size(), t = hc[0].size(), m = hr[0].size();
  Vec q(h, 0.0);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < m; ++j) q[i] += hr[i][j];
    q[i] /= static_cast<double>(m);
  }
  Vec scores(t, 0.0);
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t a = 0; a < w.size(); ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < h; ++i) s += w[a][i] * hc[i][j] + w[a][h + i] * q[i];
      scores[j] += u[a] * std::tanh(s);
    }
  }
  ReferenceAttention out;
  out.alpha = softmax(scores);
  out.output.assign(h, 0.0);
  for (std::size_t j = 0; j < t; ++j)
    for (std::size_t i = 0; i < h; ++i) out.output[i] += out.alpha[j] * hc[i][j];
  return out;
}

struct ReferenceRep {
  std::array<Vec, 3> outputs;  // sentiment, intensity, negation
  std::array<Vec, 3> alpha;
  Vec combined;
  std::array<Mat, 3> correlation;
  Mat cross_context;
};

/// Embedding matrices in path order: context, sentiment, intensity, negation.
inline ReferenceRep reference_sentence(const Mat& wc, const std::array<Mat, 3>& wr, const mean::EncoderParams& p) {
  ReferenceRep rep;
  std::array<Mat, 3> xr;
  Mat xc = zeros(wc.size(), wc[0].size());
  for (std::size_t r = 0; r < 3; ++r) {
    rep.correlation[r] = matmul(transpose(wc), wr[r]);
    xr[r] = matmul(wc, rep.correlation[r]);
    xc = add(xc, matmul(wr[r], transpose(rep.correlation[r])));
  }
  rep.cross_context = xc;
  const Mat hc = ReferenceGru(p.gru[0]).encode(xc);
  for (std::size_t r = 0; r < 3; ++r) {
    const Mat hr = ReferenceGru(p.gru[1 + r]).encode(xr[r]);
    auto att = reference_attend(hc, hr, p.attention[r]);
    rep.outputs[r] = att.output;
    rep.alpha[r] = att.alpha;
    rep.combined.insert(rep.combined.end(), att.output.begin(), att.output.end());
  }
  return rep;
}

/// softmax(W·o + b).
inline Vec reference_predict(const Vec& combined, const mean::ClassifierParams& p) {
  const Mat w = to_mat(p.w);
  Vec logits = matvec(w, combined);
  for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += p.b(c, 0);
  return softmax(logits);
}

/// ‖O·Oᵀ − ψI‖²_F with rows o1, o2, o3.
inline double reference_penalty(const std::array<Vec, 3>& o, double psi) {
  double total = 0.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < o[a].size(); ++i) g += o[a][i] * o[b][i];
      if (a == b) g -= psi;
      total += g * g;
    }
  return total;
}

}  // namespace oracle
