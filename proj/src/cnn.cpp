#include "swarmtune/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "swarmtune/errors.hpp"
#include "swarmtune/serialize.hpp"

namespace swarmtune {

namespace {

constexpr const char* kParamNames[6] = {"conv_kernels", "conv_bias",      "dense1_weights",
                                        "dense1_bias",  "dense2_weights", "dense2_bias"};

void he_fill(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (auto& v : t.values()) v = sigma * rng.normal();
}

void check_batch_shape(const CnnModel& model, const Tensor& batch) {
  if (batch.rank() != 4) throw DimensionError("batch must have rank 4 [B,H,W,C]");
  if (static_cast<int>(batch.dim(1)) != model.in_height ||
      static_cast<int>(batch.dim(2)) != model.in_width ||
      static_cast<int>(batch.dim(3)) != model.in_channels) {
    throw DimensionError("batch shape does not match model input shape");
  }
}

// Scratch space shared by every image in one pass. The conv kernels are
// repacked [ky][kx][c][f] so the innermost loops run contiguously over
// filters, and gradients accumulate in the same layout until the end.
struct PassBuffers {
  std::vector<double> xpad;     // (H+2) x (W+2) x C, zero border
  std::vector<double> kernels;  // repacked weights
  std::vector<double> a1;       // H x W x F, post-ReLU conv output
  std::vector<double> pool;     // H/2 x W/2 x F
  std::vector<std::uint8_t> pool_arg;  // winner within each 2x2 window (0..3)
  std::vector<double> z2, a2, mask, d2, logits, probs;
  std::vector<double> dlogits, dz2, dpool, dz1;
  std::vector<double> conv_w_acc;  // repacked kernel-gradient accumulator
  double softmax_max = 0.0;
  double softmax_lse = 0.0;  // log-sum-exp of shifted logits
};

void allocate_buffers(const CnnModel& model, PassBuffers& b) {
  const std::size_t H = model.in_height, W = model.in_width, C = model.in_channels;
  const std::size_t F = model.num_filters(), Nd = model.dense_units(), K = model.num_classes();
  b.xpad.assign((H + 2) * (W + 2) * C, 0.0);
  b.a1.assign(H * W * F, 0.0);
  b.pool.assign((H / 2) * (W / 2) * F, 0.0);
  b.pool_arg.assign(b.pool.size(), 0);
  b.z2.assign(Nd, 0.0);
  b.a2.assign(Nd, 0.0);
  b.mask.assign(Nd, 1.0);
  b.d2.assign(Nd, 0.0);
  b.logits.assign(K, 0.0);
  b.probs.assign(K, 0.0);
  b.dlogits.assign(K, 0.0);
  b.dz2.assign(Nd, 0.0);
  b.dpool.assign(b.pool.size(), 0.0);
  b.dz1.assign(b.a1.size(), 0.0);
}

void repack_kernels(const CnnModel& model, std::vector<double>& out) {
  const std::size_t F = model.num_filters(), C = model.in_channels;
  out.assign(9 * C * F, 0.0);
  const double* src = model.conv_kernels.data();
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t k = 0; k < 9; ++k) {
      for (std::size_t c = 0; c < C; ++c) {
        out[(k * C + c) * F + f] = src[(f * 9 + k) * C + c];
      }
    }
  }
}

// One image through the full stack; activations stay in the buffers for the
// backward pass. rng is consulted only when training with dropout enabled.
void forward_image(const CnnModel& model, const double* image, bool training, Rng* rng,
                   PassBuffers& b) {
  const int H = model.in_height, W = model.in_width, C = model.in_channels;
  const int F = model.num_filters(), Nd = model.dense_units(), K = model.num_classes();
  const int HP = H / 2, WP = W / 2;
  const int PW = W + 2;

  std::fill(b.xpad.begin(), b.xpad.end(), 0.0);
  for (int y = 0; y < H; ++y) {
    std::memcpy(&b.xpad[(static_cast<std::size_t>(y + 1) * PW + 1) * C],
                image + static_cast<std::size_t>(y) * W * C, sizeof(double) * W * C);
  }

  const double* bias = model.conv_bias.data();
  for (int oy = 0; oy < H; ++oy) {
    for (int ox = 0; ox < W; ++ox) {
      double* out = &b.a1[(static_cast<std::size_t>(oy) * W + ox) * F];
      for (int f = 0; f < F; ++f) out[f] = bias[f];
      for (int k = 0; k < 9; ++k) {
        const int ky = k / 3, kx = k % 3;
        const double* in = &b.xpad[(static_cast<std::size_t>(oy + ky) * PW + (ox + kx)) * C];
        const double* wrow = &b.kernels[static_cast<std::size_t>(k) * C * F];
        for (int c = 0; c < C; ++c) {
          const double xv = in[c];
          const double* w = &wrow[static_cast<std::size_t>(c) * F];
          for (int f = 0; f < F; ++f) out[f] += xv * w[f];
        }
      }
      for (int f = 0; f < F; ++f) out[f] = out[f] > 0.0 ? out[f] : 0.0;
    }
  }

  for (int py = 0; py < HP; ++py) {
    for (int px = 0; px < WP; ++px) {
      const double* r0 = &b.a1[(static_cast<std::size_t>(2 * py) * W + 2 * px) * F];
      const double* r1 = &b.a1[(static_cast<std::size_t>(2 * py + 1) * W + 2 * px) * F];
      double* out = &b.pool[(static_cast<std::size_t>(py) * WP + px) * F];
      std::uint8_t* arg = &b.pool_arg[(static_cast<std::size_t>(py) * WP + px) * F];
      for (int f = 0; f < F; ++f) {
        // Ties keep the first (lowest) window position so pooling is a
        // deterministic function of the activations.
        double best = r0[f];
        std::uint8_t a = 0;
        if (r0[F + f] > best) { best = r0[F + f]; a = 1; }
        if (r1[f] > best) { best = r1[f]; a = 2; }
        if (r1[F + f] > best) { best = r1[F + f]; a = 3; }
        out[f] = best;
        arg[f] = a;
      }
    }
  }

  const std::size_t flat = model.flattened_dim();
  const double* W1 = model.dense1_weights.data();
  const double* b1 = model.dense1_bias.data();
  for (int u = 0; u < Nd; ++u) b.z2[u] = b1[u];
  for (std::size_t k = 0; k < flat; ++k) {
    const double pk = b.pool[k];
    if (pk == 0.0) continue;  // ReLU + pool leave plenty of exact zeros
    const double* w = &W1[k * Nd];
    for (int u = 0; u < Nd; ++u) b.z2[u] += pk * w[u];
  }
  for (int u = 0; u < Nd; ++u) b.a2[u] = b.z2[u] > 0.0 ? b.z2[u] : 0.0;

  if (training && model.dropout_rate > 0.0) {
    fill_dropout_mask(b.mask, model.dropout_rate, *rng);
    for (int u = 0; u < Nd; ++u) b.d2[u] = b.a2[u] * b.mask[u];
  } else {
    std::fill(b.mask.begin(), b.mask.end(), 1.0);
    std::copy(b.a2.begin(), b.a2.end(), b.d2.begin());
  }

  const double* W2 = model.dense2_weights.data();
  const double* b2 = model.dense2_bias.data();
  for (int j = 0; j < K; ++j) b.logits[j] = b2[j];
  for (int u = 0; u < Nd; ++u) {
    const double du = b.d2[u];
    if (du == 0.0) continue;
    const double* w = &W2[static_cast<std::size_t>(u) * K];
    for (int j = 0; j < K; ++j) b.logits[j] += du * w[j];
  }

  // Max-shifted softmax; the shifted log-sum-exp doubles as the loss term.
  double mx = b.logits[0];
  for (int j = 1; j < K; ++j) mx = std::max(mx, b.logits[j]);
  double sum = 0.0;
  for (int j = 0; j < K; ++j) {
    b.probs[j] = std::exp(b.logits[j] - mx);
    sum += b.probs[j];
  }
  for (int j = 0; j < K; ++j) b.probs[j] /= sum;
  b.softmax_max = mx;
  b.softmax_lse = std::log(sum);
}

Tensor forward_impl(const CnnModel& model, const Tensor& batch, bool training, Rng* rng) {
  check_batch_shape(model, batch);
  if (training && model.dropout_rate > 0.0 && rng == nullptr) {
    throw ConfigError("training-mode forward with dropout requires a random source");
  }
  const std::size_t B = batch.dim(0);
  const std::size_t K = model.num_classes();
  const std::size_t per_image =
      static_cast<std::size_t>(model.in_height) * model.in_width * model.in_channels;

  PassBuffers b;
  allocate_buffers(model, b);
  repack_kernels(model, b.kernels);

  Tensor probs({B, K});
  for (std::size_t i = 0; i < B; ++i) {
    forward_image(model, batch.data() + i * per_image, training, rng, b);
    std::memcpy(probs.data() + i * K, b.probs.data(), sizeof(double) * K);
  }
  debug_check_finite(probs, "forward produced non-finite probabilities");
  return probs;
}

void ensure_like(Tensor& t, const Tensor& ref) {
  if (t.shape() != ref.shape()) {
    t = Tensor(ref.shape());
  } else {
    t.fill(0.0);
  }
}

void gather_batch(const Dataset& data, const std::vector<std::size_t>& order, std::size_t start,
                  std::size_t count, Tensor& batch, std::vector<int>& labels) {
  const std::size_t H = data.height(), W = data.width(), C = data.channels();
  const std::size_t per_image = H * W * C;
  if (batch.rank() != 4 || batch.dim(0) != count || batch.dim(1) != H || batch.dim(2) != W ||
      batch.dim(3) != C) {
    batch = Tensor({count, H, W, C});
  }
  labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t idx = order[start + i];
    std::memcpy(batch.data() + i * per_image, data.images.data() + idx * per_image,
                sizeof(double) * per_image);
    labels[i] = data.labels[idx];
  }
}

int argmax_lowest(const double* values, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (values[j] > values[best]) best = j;
  }
  return static_cast<int>(best);
}

}  // namespace

std::vector<Tensor*> parameter_tensors(CnnModel& model) {
  return {&model.conv_kernels,   &model.conv_bias,      &model.dense1_weights,
          &model.dense1_bias,    &model.dense2_weights, &model.dense2_bias};
}

std::vector<const Tensor*> parameter_tensors(const CnnModel& model) {
  return {&model.conv_kernels,   &model.conv_bias,      &model.dense1_weights,
          &model.dense1_bias,    &model.dense2_weights, &model.dense2_bias};
}

std::vector<Tensor*> parameter_tensors(CnnGrads& grads) {
  return {&grads.conv_kernels,   &grads.conv_bias,      &grads.dense1_weights,
          &grads.dense1_bias,    &grads.dense2_weights, &grads.dense2_bias};
}

std::vector<const Tensor*> parameter_tensors(const CnnGrads& grads) {
  return {&grads.conv_kernels,   &grads.conv_bias,      &grads.dense1_weights,
          &grads.dense1_bias,    &grads.dense2_weights, &grads.dense2_bias};
}

CnnModel build_model(int num_filters, int dense_units, double dropout_rate, int height, int width,
                     int channels, int num_classes, Rng& rng) {
  if (num_filters < 1 || dense_units < 1 || channels < 1) {
    throw ConfigError("model layer sizes must be positive");
  }
  if (num_classes < 2) throw ConfigError("model needs at least 2 classes");
  if (height < 2 || width < 2 || height % 2 != 0 || width % 2 != 0) {
    throw ConfigError("model input dimensions must be even and >= 2");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0,1)");
  }

  CnnModel model;
  model.dropout_rate = dropout_rate;
  model.in_height = height;
  model.in_width = width;
  model.in_channels = channels;
  const auto F = static_cast<std::size_t>(num_filters);
  const auto C = static_cast<std::size_t>(channels);
  const auto Nd = static_cast<std::size_t>(dense_units);
  const auto K = static_cast<std::size_t>(num_classes);
  const std::size_t flat = F * (height / 2) * (width / 2);
  model.conv_kernels = Tensor({F, 3, 3, C});
  model.conv_bias = Tensor({F});
  model.dense1_weights = Tensor({flat, Nd});
  model.dense1_bias = Tensor({Nd});
  model.dense2_weights = Tensor({Nd, K});
  model.dense2_bias = Tensor({K});
  he_fill(model.conv_kernels, 9 * C, rng);
  he_fill(model.dense1_weights, flat, rng);
  he_fill(model.dense2_weights, Nd, rng);
  return model;
}

CnnGrads make_grads_like(const CnnModel& model) {
  CnnGrads grads;
  grads.conv_kernels = Tensor(model.conv_kernels.shape());
  grads.conv_bias = Tensor(model.conv_bias.shape());
  grads.dense1_weights = Tensor(model.dense1_weights.shape());
  grads.dense1_bias = Tensor(model.dense1_bias.shape());
  grads.dense2_weights = Tensor(model.dense2_weights.shape());
  grads.dense2_bias = Tensor(model.dense2_bias.shape());
  return grads;
}

void fill_dropout_mask(std::vector<double>& mask, double dropout_rate, Rng& rng) {
  const double inv_keep = 1.0 / (1.0 - dropout_rate);
  for (double& m : mask) m = rng.uniform() < dropout_rate ? 0.0 : inv_keep;
}

Tensor conv_features(const CnnModel& model, const Tensor& batch) {
  check_batch_shape(model, batch);
  const std::size_t B = batch.dim(0);
  const std::size_t H = model.in_height;
  const std::size_t W = model.in_width;
  const std::size_t F = model.num_filters();
  const std::size_t per_image = H * W * model.in_channels;

  PassBuffers b;
  allocate_buffers(model, b);
  repack_kernels(model, b.kernels);

  Tensor features({B, H, W, F});
  for (std::size_t i = 0; i < B; ++i) {
    forward_image(model, batch.data() + i * per_image, false, nullptr, b);
    std::memcpy(features.data() + i * b.a1.size(), b.a1.data(), sizeof(double) * b.a1.size());
  }
  return features;
}

Tensor forward(const CnnModel& model, const Tensor& batch) {
  return forward_impl(model, batch, false, nullptr);
}

Tensor forward(const CnnModel& model, const Tensor& batch, bool training, Rng& rng) {
  return forward_impl(model, batch, training, &rng);
}

double loss_and_grads(const CnnModel& model, const Tensor& batch, const std::vector<int>& labels,
                      bool training, Rng* rng, CnnGrads& grads, std::size_t* correct_count) {
  check_batch_shape(model, batch);
  const std::size_t B = batch.dim(0);
  if (B == 0) throw DimensionError("empty batch");
  if (labels.size() != B) throw DimensionError("label count does not match batch size");
  const int K = model.num_classes();
  for (int t : labels) {
    if (t < 0 || t >= K) throw InputError("label out of range for model classes");
  }
  if (training && model.dropout_rate > 0.0 && rng == nullptr) {
    throw ConfigError("training with dropout requires a random source");
  }

  const int H = model.in_height, W = model.in_width, C = model.in_channels;
  const int F = model.num_filters(), Nd = model.dense_units();
  const int PW = W + 2;
  const std::size_t flat = model.flattened_dim();
  const std::size_t per_image = static_cast<std::size_t>(H) * W * C;

  PassBuffers b;
  allocate_buffers(model, b);
  repack_kernels(model, b.kernels);
  b.conv_w_acc.assign(b.kernels.size(), 0.0);

  ensure_like(grads.conv_kernels, model.conv_kernels);
  ensure_like(grads.conv_bias, model.conv_bias);
  ensure_like(grads.dense1_weights, model.dense1_weights);
  ensure_like(grads.dense1_bias, model.dense1_bias);
  ensure_like(grads.dense2_weights, model.dense2_weights);
  ensure_like(grads.dense2_bias, model.dense2_bias);

  const double* W1 = model.dense1_weights.data();
  const double* W2 = model.dense2_weights.data();
  double* gW1 = grads.dense1_weights.data();
  double* gb1 = grads.dense1_bias.data();
  double* gW2 = grads.dense2_weights.data();
  double* gb2 = grads.dense2_bias.data();
  double* gbc = grads.conv_bias.data();

  const double inv_b = 1.0 / static_cast<double>(B);
  double loss_sum = 0.0;
  std::size_t correct = 0;

  for (std::size_t i = 0; i < B; ++i) {
    forward_image(model, batch.data() + i * per_image, training, rng, b);
    const int t = labels[i];
    loss_sum += (b.softmax_max + b.softmax_lse) - b.logits[t];
    if (argmax_lowest(b.probs.data(), K) == t) ++correct;

    // Softmax + cross-entropy collapse to probs - onehot; the 1/B factor rides
    // along from here so every accumulated gradient is already batch-averaged.
    for (int j = 0; j < K; ++j) {
      b.dlogits[j] = (b.probs[j] - (j == t ? 1.0 : 0.0)) * inv_b;
    }

    for (int j = 0; j < K; ++j) gb2[j] += b.dlogits[j];
    for (int u = 0; u < Nd; ++u) {
      const double* w = &W2[static_cast<std::size_t>(u) * K];
      double* gw = &gW2[static_cast<std::size_t>(u) * K];
      const double du = b.d2[u];
      double acc = 0.0;
      for (int j = 0; j < K; ++j) {
        acc += w[j] * b.dlogits[j];
        gw[j] += du * b.dlogits[j];
      }
      // back through dropout scaling, then the dense ReLU
      b.dz2[u] = b.a2[u] > 0.0 ? acc * b.mask[u] : 0.0;
    }

    for (int u = 0; u < Nd; ++u) gb1[u] += b.dz2[u];
    for (std::size_t k = 0; k < flat; ++k) {
      const double pk = b.pool[k];
      const double* w = &W1[k * Nd];
      double acc = 0.0;
      if (pk != 0.0) {
        double* gw = &gW1[k * Nd];
        for (int u = 0; u < Nd; ++u) {
          acc += w[u] * b.dz2[u];
          gw[u] += pk * b.dz2[u];
        }
      } else {
        for (int u = 0; u < Nd; ++u) acc += w[u] * b.dz2[u];
      }
      b.dpool[k] = acc;
    }

    // Route pooled gradients back to the winning conv activation; the ReLU
    // gate is a1 > 0 (a zero maximum means the whole window was clamped).
    std::fill(b.dz1.begin(), b.dz1.end(), 0.0);
    const int HP = H / 2, WP = W / 2;
    for (int py = 0; py < HP; ++py) {
      for (int px = 0; px < WP; ++px) {
        const std::size_t cell = (static_cast<std::size_t>(py) * WP + px) * F;
        for (int f = 0; f < F; ++f) {
          const double g = b.dpool[cell + f];
          if (g == 0.0) continue;
          const std::uint8_t a = b.pool_arg[cell + f];
          const int oy = 2 * py + (a >> 1);
          const int ox = 2 * px + (a & 1);
          const std::size_t loc = (static_cast<std::size_t>(oy) * W + ox) * F + f;
          if (b.a1[loc] > 0.0) b.dz1[loc] += g;
        }
      }
    }

    for (int oy = 0; oy < H; ++oy) {
      for (int ox = 0; ox < W; ++ox) {
        const double* dz = &b.dz1[(static_cast<std::size_t>(oy) * W + ox) * F];
        bool any = false;
        for (int f = 0; f < F; ++f) {
          if (dz[f] != 0.0) { any = true; break; }
        }
        if (!any) continue;  // pooling zeroes at least 3 of every 4 rows
        for (int f = 0; f < F; ++f) gbc[f] += dz[f];
        for (int k = 0; k < 9; ++k) {
          const int ky = k / 3, kx = k % 3;
          const double* in = &b.xpad[(static_cast<std::size_t>(oy + ky) * PW + (ox + kx)) * C];
          double* grow = &b.conv_w_acc[static_cast<std::size_t>(k) * C * F];
          for (int c = 0; c < C; ++c) {
            const double xv = in[c];
            if (xv == 0.0) continue;
            double* g = &grow[static_cast<std::size_t>(c) * F];
            for (int f = 0; f < F; ++f) g[f] += xv * dz[f];
          }
        }
      }
    }
  }

  // Un-repack the kernel gradients into the model's [F,3,3,C] layout.
  double* gck = grads.conv_kernels.data();
  for (int f = 0; f < F; ++f) {
    for (int k = 0; k < 9; ++k) {
      for (int c = 0; c < C; ++c) {
        gck[(static_cast<std::size_t>(f) * 9 + k) * C + c] =
            b.conv_w_acc[(static_cast<std::size_t>(k) * C + c) * F + f];
      }
    }
  }

  const double loss = loss_sum * inv_b;
  if (!std::isfinite(loss)) throw DivergenceError("training loss is not finite");
  debug_check_finite(grads.conv_kernels, "non-finite conv kernel gradient");
  debug_check_finite(grads.dense1_weights, "non-finite dense gradient");
  if (correct_count != nullptr) *correct_count = correct;
  return loss;
}

AdamState make_adam_state(const CnnModel& model) {
  AdamState state;
  for (const Tensor* t : parameter_tensors(model)) {
    state.first_moment.emplace_back(t->size(), 0.0);
    state.second_moment.emplace_back(t->size(), 0.0);
  }
  return state;
}

void adam_update(std::size_t n, double* param, const double* grad, double* m, double* v,
                 std::size_t step, double learning_rate, double beta1, double beta2,
                 double epsilon) {
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    param[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

void adam_step(CnnModel& model, const CnnGrads& grads, AdamState& state, double learning_rate) {
  auto params = parameter_tensors(model);
  auto gparams = parameter_tensors(grads);
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw DimensionError("adam state does not match model layout");
  }
  ++state.step_count;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != gparams[i]->shape() ||
        state.first_moment[i].size() != params[i]->size()) {
      throw DimensionError("gradient shape does not match parameter shape");
    }
    adam_update(params[i]->size(), params[i]->data(), gparams[i]->data(),
                state.first_moment[i].data(), state.second_moment[i].data(), state.step_count,
                learning_rate, state.beta1, state.beta2, state.epsilon);
  }
}

TrainResult train(const HyperParams& hp, const Dataset& data, std::size_t epochs,
                  std::size_t batch_size, std::uint64_t seed) {
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (data.train_indices.empty()) throw ConfigError("train: dataset has an empty train split");
  if (hp.num_filters < 1 || hp.dense_units < 1) {
    throw ConfigError("train: layer sizes must be positive");
  }
  if (!(hp.dropout_rate >= 0.0 && hp.dropout_rate < 1.0)) {
    throw ConfigError("train: dropout rate must be in [0,1)");
  }
  if (!std::isfinite(hp.learning_rate)) throw ConfigError("train: learning rate must be finite");

  // Separate streams for weight init and for the shuffle/dropout draws keep
  // the initial model independent of epoch count and batch size.
  Rng init_rng(mix_seed(seed, 0));
  TrainResult result{
      build_model(hp.num_filters, hp.dense_units, hp.dropout_rate, data.height(), data.width(),
                  data.channels(), static_cast<int>(data.num_classes()), init_rng),
      {}};
  CnnModel& model = result.model;
  Rng loop_rng(mix_seed(seed, 1));

  AdamState adam = make_adam_state(model);
  CnnGrads grads = make_grads_like(model);
  std::vector<std::size_t> order = data.train_indices;
  const std::size_t n = order.size();
  Tensor batch;
  std::vector<int> labels;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    loop_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      gather_batch(data, order, start, count, batch, labels);
      std::size_t batch_correct = 0;
      const double loss =
          loss_and_grads(model, batch, labels, true, &loop_rng, grads, &batch_correct);
      adam_step(model, grads, adam, hp.learning_rate);
      loss_sum += loss * static_cast<double>(count);
      correct += batch_correct;
    }
    result.history.push_back(
        {loss_sum / static_cast<double>(n), static_cast<double>(correct) / static_cast<double>(n)});
  }
  return result;
}

EvalResult evaluate_model(const CnnModel& model, const Dataset& data) {
  if (data.test_indices.empty()) throw ConfigError("evaluate: dataset has an empty test split");
  if (data.height() != model.in_height || data.width() != model.in_width ||
      data.channels() != model.in_channels) {
    throw DimensionError("dataset image shape does not match model input shape");
  }
  const std::size_t K = model.num_classes();

  EvalResult result;
  result.predictions.reserve(data.test_indices.size());
  constexpr std::size_t kChunk = 64;
  Tensor batch;
  std::vector<int> labels;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.test_indices.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, data.test_indices.size() - start);
    gather_batch(data, data.test_indices, start, count, batch, labels);
    const Tensor probs = forward(model, batch);
    for (std::size_t i = 0; i < count; ++i) {
      const int pred = argmax_lowest(probs.data() + i * K, K);
      result.predictions.push_back(pred);
      if (pred == labels[i]) ++correct;
    }
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(data.test_indices.size());
  return result;
}

void save_model(const CnnModel& model, const std::filesystem::path& path) {
  Container entries;
  entries.emplace_back(
      "meta", std::vector<double>{static_cast<double>(model.in_height),
                                  static_cast<double>(model.in_width),
                                  static_cast<double>(model.in_channels),
                                  static_cast<double>(model.num_classes()),
                                  static_cast<double>(model.num_filters()),
                                  static_cast<double>(model.dense_units()), model.dropout_rate});
  auto params = parameter_tensors(model);
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double> shape;
    for (std::size_t d : params[i]->shape()) shape.push_back(static_cast<double>(d));
    entries.emplace_back(std::string(kParamNames[i]) + ".shape", std::move(shape));
    entries.emplace_back(kParamNames[i], params[i]->values());
  }
  write_container(path, entries);
}

CnnModel load_model(const std::filesystem::path& path) {
  const std::string source = path.string();
  const Container entries = read_container(path);

  const auto& meta = container_entry(entries, "meta", source);
  if (meta.size() != 7) throw ParseError(source + ": malformed meta entry");
  auto meta_int = [&](std::size_t i, const char* what) {
    const double v = meta[i];
    if (!(v >= 1.0 && v <= 1e9) || v != std::floor(v)) {
      throw ParseError(source + ": meta field '" + what + "' is not a positive integer");
    }
    return static_cast<int>(v);
  };

  CnnModel model;
  model.in_height = meta_int(0, "height");
  model.in_width = meta_int(1, "width");
  model.in_channels = meta_int(2, "channels");
  const int num_classes = meta_int(3, "classes");
  const int num_filters = meta_int(4, "filters");
  const int dense_units = meta_int(5, "dense_units");
  model.dropout_rate = meta[6];
  if (!(model.dropout_rate >= 0.0 && model.dropout_rate < 1.0)) {
    throw ParseError(source + ": dropout rate outside [0,1)");
  }

  auto targets = parameter_tensors(model);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string name = kParamNames[i];
    const auto& shape_vals = container_entry(entries, name + ".shape", source);
    std::vector<std::size_t> shape;
    for (double v : shape_vals) {
      if (!(v >= 0.0 && v <= 1e9) || v != std::floor(v)) {
        throw ParseError(source + ": bad shape for entry '" + name + "'");
      }
      shape.push_back(static_cast<std::size_t>(v));
    }
    const auto& values = container_entry(entries, name, source);
    try {
      *targets[i] = Tensor(shape, values);
    } catch (const DimensionError&) {
      throw ParseError(source + ": entry '" + name + "' data does not match its shape");
    }
  }

  const std::size_t expected_flat = static_cast<std::size_t>(num_filters) *
                                    (model.in_height / 2) * (model.in_width / 2);
  const bool consistent =
      model.conv_kernels.shape() == std::vector<std::size_t>{static_cast<std::size_t>(num_filters),
                                                             3, 3,
                                                             static_cast<std::size_t>(
                                                                 model.in_channels)} &&
      model.conv_bias.size() == static_cast<std::size_t>(num_filters) &&
      model.dense1_weights.shape() ==
          std::vector<std::size_t>{expected_flat, static_cast<std::size_t>(dense_units)} &&
      model.dense1_bias.size() == static_cast<std::size_t>(dense_units) &&
      model.dense2_weights.shape() == std::vector<std::size_t>{static_cast<std::size_t>(
                                                                   dense_units),
                                                               static_cast<std::size_t>(
                                                                   num_classes)} &&
      model.dense2_bias.size() == static_cast<std::size_t>(num_classes);
  if (!consistent) {
    throw ParseError(source + ": parameter shapes disagree with the meta entry");
  }
  return model;
}

}  // namespace swarmtune
