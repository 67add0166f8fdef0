#include "mean/attention.hpp"

#include <stdexcept>
#include <vector>

#include "mean/ops.hpp"

namespace mean {

CorrelationSet correlations(const Tensor& context, const Tensor& sentiment, const Tensor& intensity,
                            const Tensor& negation) {
  const std::size_t d = context.rows();
  for (const Tensor* w : {&sentiment, &intensity, &negation}) {
    if (w->rows() != d) {
      throw DimensionError("correlations: embedding dims differ, context " + shape_string(context.shape()) +
                           " vs resource " + shape_string(w->shape()));
    }
  }
  const Tensor ct = transpose(context);
  return {matmul(ct, sentiment), matmul(ct, intensity), matmul(ct, negation)};
}

CrossRepresentations cross_representations(const Tensor& context, const Tensor& sentiment,
                                           const Tensor& intensity, const Tensor& negation,
                                           const CorrelationSet& m) {
  CrossRepresentations x;
  x.sentiment = matmul(context, m.sentiment);
  x.intensity = matmul(context, m.intensity);
  x.negation = matmul(context, m.negation);
  x.context = add(add(matmul(sentiment, transpose(m.sentiment)), matmul(intensity, transpose(m.intensity))),
                  matmul(negation, transpose(m.negation)));
  return x;
}

void GruParams::append_parameters(ParameterList& out, const std::string& prefix) const {
  out.push_back({prefix + ".w_z", w_z, true});
  out.push_back({prefix + ".w_r", w_r, true});
  out.push_back({prefix + ".w_h", w_h, true});
  out.push_back({prefix + ".u_z", u_z, true});
  out.push_back({prefix + ".u_r", u_r, true});
  out.push_back({prefix + ".u_h", u_h, true});
  out.push_back({prefix + ".b_z", b_z, false});
  out.push_back({prefix + ".b_r", b_r, false});
  out.push_back({prefix + ".b_h", b_h, false});
}

GruParams GruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  auto w = [&] { return Tensor::zeros({hidden_dim, input_dim}, true); };
  auto u = [&] { return Tensor::zeros({hidden_dim, hidden_dim}, true); };
  auto b = [&] { return Tensor::zeros({hidden_dim, 1}, true); };
  return {w(), w(), w(), u(), u(), u(), b(), b(), b()};
}

Tensor gru_encode(const Tensor& inputs, const GruParams& p) {
  if (inputs.rank() != 2 || inputs.cols() == 0) throw DimensionError("gru_encode: needs a d×n matrix");
  if (inputs.rows() != p.input_dim()) {
    throw DimensionError("gru_encode: input " + shape_string(inputs.shape()) + " vs weights " +
                         shape_string(p.w_z.shape()));
  }
  const std::size_t n = inputs.cols();
  const Tensor xz = add_col_broadcast(matmul(p.w_z, inputs), p.b_z);
  const Tensor xr = add_col_broadcast(matmul(p.w_r, inputs), p.b_r);
  const Tensor xh = add_col_broadcast(matmul(p.w_h, inputs), p.b_h);
  Tensor h = Tensor::zeros({p.hidden_dim(), 1});
  std::vector<Tensor> states;
  states.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Tensor z = sigmoid(add(slice_cols(xz, t, t + 1), matmul(p.u_z, h)));
    const Tensor r = sigmoid(add(slice_cols(xr, t, t + 1), matmul(p.u_r, h)));
    const Tensor candidate = tanh(add(slice_cols(xh, t, t + 1), matmul(p.u_h, mul(r, h))));
    h = add(h, mul(z, sub(candidate, h)));
    states.push_back(h);
  }
  return concat(states, Axis::Cols);
}

void AttentionParams::append_parameters(ParameterList& out, const std::string& prefix) const {
  out.push_back({prefix + ".w", w, true});
  out.push_back({prefix + ".u", u, true});
}

AttentionParams AttentionParams::zeros(std::size_t hidden_dim, std::size_t att_dim) {
  return {Tensor::zeros({att_dim, 2 * hidden_dim}, true), Tensor::zeros({att_dim, 1}, true)};
}

Attended attend(const Tensor& context_hidden, const Tensor& resource_hidden,
                const AttentionParams& params) {
  if (context_hidden.rows() != resource_hidden.rows()) {
    throw DimensionError("attend: hidden sizes differ, " + shape_string(context_hidden.shape()) + " vs " +
                         shape_string(resource_hidden.shape()));
  }
  if (params.w.cols() != 2 * context_hidden.rows() || params.u.rows() != params.w.rows()) {
    throw DimensionError("attend: parameters " + shape_string(params.w.shape()) + ", " +
                         shape_string(params.u.shape()) + " do not match hidden size " +
                         std::to_string(context_hidden.rows()));
  }
  const std::size_t t = context_hidden.cols();
  Attended out;
  out.query = mean_axis(resource_hidden, Axis::Cols);
  const Tensor stacked[] = {context_hidden, repeat_cols(out.query, t)};
  const Tensor energies = tanh(matmul(params.w, concat(stacked, Axis::Rows)));
  out.scores = matmul(transpose(params.u), energies);
  out.alpha = softmax_rows(out.scores);
  out.output = matmul(context_hidden, transpose(out.alpha));
  return out;
}

std::string_view gru_name(std::size_t index) {
  static constexpr std::string_view names[] = {"context", "sentiment", "intensity", "negation"};
  return names[index];
}

void EncoderParams::append_parameters(ParameterList& out) const {
  for (std::size_t g = 0; g < gru.size(); ++g) {
    gru[g].append_parameters(out, "gru." + std::string(gru_name(g)));
  }
  for (auto p : kPaths) {
    attention[static_cast<std::size_t>(p)].append_parameters(out, "attention." + std::string(to_string(p)));
  }
}

SentenceRep sentence_representation(const Tensor& context, const Tensor& sentiment,
                                    const Tensor& intensity, const Tensor& negation,
                                    const EncoderParams& params, const EncoderOptions& options) {
  if (options.mode == Mode::Train && options.dropout_rate > 0.0 && !options.rng) {
    throw std::invalid_argument("sentence_representation: train-mode dropout needs an rng");
  }
  SentenceRep rep;
  rep.correlation = correlations(context, sentiment, intensity, negation);
  rep.cross = cross_representations(context, sentiment, intensity, negation, rep.correlation);

  auto encode = [&](const Tensor& x, const GruParams& gru) {
    if (options.mode == Mode::Train && options.dropout_rate > 0.0) {
      return gru_encode(apply_dropout(x, options.dropout_rate, *options.rng, options.mode), gru);
    }
    return gru_encode(x, gru);
  };

  const Tensor context_hidden = encode(rep.cross.context, params.context_gru());
  const std::array<const Tensor*, kNumPaths> resource_inputs = {
      &rep.cross.sentiment, &rep.cross.intensity, &rep.cross.negation};
  const std::size_t h = params.context_gru().hidden_dim();
  for (auto path : kPaths) {
    const auto idx = static_cast<std::size_t>(path);
    if (!options.path_enabled[idx]) {
      rep.outputs[idx] = Tensor::zeros({h, 1});
      continue;
    }
    const Tensor resource_hidden = encode(*resource_inputs[idx], params.resource_gru(path));
    auto attended = attend(context_hidden, resource_hidden, params.path_attention(path));
    rep.outputs[idx] = attended.output;
    rep.alpha[idx] = attended.alpha;
  }
  rep.combined = concat(rep.outputs, Axis::Rows);
  return rep;
}

}  // namespace mean
