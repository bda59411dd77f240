#pragma once

// Feedforward and convolutional networks trained with Adam on a
// class-weighted binary cross entropy. Layers follow the published model
// table: same-padding convolutions, floor max-pooling, channels-wise batch
// norm with four stored statistics per channel, inverted dropout.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "wai/grid.hpp"
#include "wai/rng.hpp"

namespace wai {

struct TensorShape {
  int c = 1, h = 1, w = 1;
  int size() const { return c * h * w; }
};

using Matrix = Eigen::MatrixXd;

struct ParamBlock {
  std::string name;
  Matrix* value = nullptr;
  Matrix* grad = nullptr;  // null for non-trainable state (running stats)
};

class Layer {
 public:
  virtual ~Layer() = default;
  // Initializes weights for the given input shape; returns the output shape.
  virtual TensorShape init(TensorShape input, Rng& rng) = 0;
  virtual void forward(const Matrix& x, Matrix& y, bool training, Rng& rng) = 0;
  virtual void backward(const Matrix& dy, Matrix& dx) = 0;
  virtual std::vector<ParamBlock> trainable() { return {}; }
  virtual std::vector<ParamBlock> state() { return {}; }
  virtual std::string kind() const = 0;
};

namespace nn_detail {

// Scaled uniform fan-in init: U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
inline void uniform_fan_in(Matrix& w, int fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      w(i, j) = rng.uniform(-limit, limit);
    }
  }
}

}  // namespace nn_detail

class DenseLayer : public Layer {
 public:
  explicit DenseLayer(int units) : units_(units) {}

  TensorShape init(TensorShape input, Rng& rng) override {
    in_features_ = input.size();
    w_.resize(units_, in_features_);
    b_ = Matrix::Zero(units_, 1);
    nn_detail::uniform_fan_in(w_, in_features_, rng);
    dw_ = Matrix::Zero(units_, in_features_);
    db_ = Matrix::Zero(units_, 1);
    return {units_, 1, 1};
  }

  void forward(const Matrix& x, Matrix& y, bool, Rng&) override {
    x_ = x;
    y = w_ * x;
    y.colwise() += b_.col(0);
  }

  void backward(const Matrix& dy, Matrix& dx) override {
    dw_ = dy * x_.transpose();
    db_ = dy.rowwise().sum();
    dx = w_.transpose() * dy;
  }

  std::vector<ParamBlock> trainable() override {
    return {{"w", &w_, &dw_}, {"b", &b_, &db_}};
  }
  std::string kind() const override { return "dense(" + std::to_string(units_) + ")"; }

  Matrix& weights() { return w_; }
  Matrix& bias() { return b_; }

 private:
  int units_;
  int in_features_ = 0;
  Matrix w_, b_, dw_, db_, x_;
};

class ReluLayer : public Layer {
 public:
  TensorShape init(TensorShape input, Rng&) override { return input; }

  void forward(const Matrix& x, Matrix& y, bool, Rng&) override {
    mask_ = (x.array() > 0.0).cast<double>();
    y = x.cwiseProduct(mask_);
  }

  void backward(const Matrix& dy, Matrix& dx) override { dx = dy.cwiseProduct(mask_); }
  std::string kind() const override { return "relu"; }

 private:
  Matrix mask_;
};

// Inverted dropout: kept activations scaled by 1/keep at train time.
class DropoutLayer : public Layer {
 public:
  explicit DropoutLayer(double rate) : rate_(rate) {}

  TensorShape init(TensorShape input, Rng&) override { return input; }

  void forward(const Matrix& x, Matrix& y, bool training, Rng& rng) override {
    if (!training || rate_ <= 0.0) {
      mask_.resize(0, 0);
      y = x;
      return;
    }
    const double keep = 1.0 - rate_;
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        mask_(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
      }
    }
    y = x.cwiseProduct(mask_);
  }

  void backward(const Matrix& dy, Matrix& dx) override {
    dx = mask_.size() == 0 ? dy : dy.cwiseProduct(mask_);
  }
  std::string kind() const override { return "dropout"; }

 private:
  double rate_;
  Matrix mask_;
};

class FlattenLayer : public Layer {
 public:
  TensorShape init(TensorShape input, Rng&) override { return {input.size(), 1, 1}; }
  void forward(const Matrix& x, Matrix& y, bool, Rng&) override { y = x; }
  void backward(const Matrix& dy, Matrix& dx) override { dx = dy; }
  std::string kind() const override { return "flatten"; }
};

// Same-padding 2D convolution via im2col + GEMM. Odd kernel sizes only.
class Conv2dLayer : public Layer {
 public:
  Conv2dLayer(int filters, int kh, int kw) : filters_(filters), kh_(kh), kw_(kw) {}

  TensorShape init(TensorShape input, Rng& rng) override {
    in_ = input;
    const int fan_in = input.c * kh_ * kw_;
    w_.resize(filters_, fan_in);
    b_ = Matrix::Zero(filters_, 1);
    nn_detail::uniform_fan_in(w_, fan_in, rng);
    dw_ = Matrix::Zero(filters_, fan_in);
    db_ = Matrix::Zero(filters_, 1);
    return {filters_, input.h, input.w};
  }

  void forward(const Matrix& x, Matrix& y, bool, Rng&) override {
    x_ = x;
    const int hw = in_.h * in_.w;
    y.resize(static_cast<Eigen::Index>(filters_) * hw, x.cols());
    Matrix col(w_.cols(), hw);
    for (Eigen::Index s = 0; s < x.cols(); ++s) {
      im2col(x.col(s), col);
      Eigen::Map<Matrix> out(y.col(s).data(), filters_, hw);
      out.noalias() = w_ * col;
      out.colwise() += b_.col(0);
    }
  }

  void backward(const Matrix& dy, Matrix& dx) override {
    const int hw = in_.h * in_.w;
    dw_.setZero();
    db_.setZero();
    dx = Matrix::Zero(x_.rows(), x_.cols());
    Matrix col(w_.cols(), hw);
    Matrix dcol(w_.cols(), hw);
    for (Eigen::Index s = 0; s < x_.cols(); ++s) {
      Eigen::Map<const Matrix> dout(dy.col(s).data(), filters_, hw);
      im2col(x_.col(s), col);
      dw_.noalias() += dout * col.transpose();
      db_ += dout.rowwise().sum();
      dcol.noalias() = w_.transpose() * dout;
      col2im(dcol, dx.col(s));
    }
  }

  std::vector<ParamBlock> trainable() override {
    return {{"w", &w_, &dw_}, {"b", &b_, &db_}};
  }
  std::string kind() const override {
    return "conv(" + std::to_string(filters_) + "," + std::to_string(kh_) + "x" +
           std::to_string(kw_) + ")";
  }

 private:
  template <typename Col>
  void im2col(const Col& x, Matrix& col) const {
    const int ph = (kh_ - 1) / 2;
    const int pw = (kw_ - 1) / 2;
    for (int c = 0; c < in_.c; ++c) {
      const int chan_off = c * in_.h * in_.w;
      for (int di = 0; di < kh_; ++di) {
        for (int dj = 0; dj < kw_; ++dj) {
          const int row = (c * kh_ + di) * kw_ + dj;
          for (int i = 0; i < in_.h; ++i) {
            const int si = i + di - ph;
            double* dst = col.data() + static_cast<size_t>(i) * in_.w * col.rows() + row;
            if (si < 0 || si >= in_.h) {
              for (int j = 0; j < in_.w; ++j) dst[static_cast<size_t>(j) * col.rows()] = 0.0;
              continue;
            }
            for (int j = 0; j < in_.w; ++j) {
              const int sj = j + dj - pw;
              dst[static_cast<size_t>(j) * col.rows()] =
                  (sj < 0 || sj >= in_.w) ? 0.0 : x(chan_off + si * in_.w + sj);
            }
          }
        }
      }
    }
  }

  template <typename Col>
  void col2im(const Matrix& dcol, Col&& dx) const {
    const int ph = (kh_ - 1) / 2;
    const int pw = (kw_ - 1) / 2;
    for (int c = 0; c < in_.c; ++c) {
      const int chan_off = c * in_.h * in_.w;
      for (int di = 0; di < kh_; ++di) {
        for (int dj = 0; dj < kw_; ++dj) {
          const int row = (c * kh_ + di) * kw_ + dj;
          for (int i = 0; i < in_.h; ++i) {
            const int si = i + di - ph;
            if (si < 0 || si >= in_.h) continue;
            const double* src = dcol.data() + static_cast<size_t>(i) * in_.w * dcol.rows() + row;
            for (int j = 0; j < in_.w; ++j) {
              const int sj = j + dj - pw;
              if (sj < 0 || sj >= in_.w) continue;
              dx(chan_off + si * in_.w + sj) += src[static_cast<size_t>(j) * dcol.rows()];
            }
          }
        }
      }
    }
  }

  int filters_, kh_, kw_;
  TensorShape in_;
  Matrix w_, b_, dw_, db_, x_;
};

// Max pooling with stride equal to the pool size; output dims floor-divided.
class MaxPoolLayer : public Layer {
 public:
  MaxPoolLayer(int ph, int pw) : ph_(ph), pw_(pw) {}

  TensorShape init(TensorShape input, Rng&) override {
    in_ = input;
    out_ = {input.c, input.h / ph_, input.w / pw_};
    return out_;
  }

  void forward(const Matrix& x, Matrix& y, bool, Rng&) override {
    in_rows_ = x.rows();
    y.resize(static_cast<Eigen::Index>(out_.size()), x.cols());
    argmax_.resize(out_.size(), x.cols());
    for (Eigen::Index s = 0; s < x.cols(); ++s) {
      const double* xs = x.col(s).data();
      for (int c = 0; c < in_.c; ++c) {
        for (int oi = 0; oi < out_.h; ++oi) {
          for (int oj = 0; oj < out_.w; ++oj) {
            int best_idx = -1;
            double best = -1e300;
            for (int di = 0; di < ph_; ++di) {
              for (int dj = 0; dj < pw_; ++dj) {
                const int idx = (c * in_.h + oi * ph_ + di) * in_.w + oj * pw_ + dj;
                if (xs[idx] > best) {
                  best = xs[idx];
                  best_idx = idx;
                }
              }
            }
            const int out_idx = (c * out_.h + oi) * out_.w + oj;
            y(out_idx, s) = best;
            argmax_(out_idx, s) = best_idx;
          }
        }
      }
    }
  }

  void backward(const Matrix& dy, Matrix& dx) override {
    dx = Matrix::Zero(in_rows_, dy.cols());
    for (Eigen::Index s = 0; s < dy.cols(); ++s) {
      for (Eigen::Index i = 0; i < dy.rows(); ++i) {
        dx(argmax_(i, s), s) += dy(i, s);
      }
    }
  }
  std::string kind() const override {
    return "maxpool(" + std::to_string(ph_) + "x" + std::to_string(pw_) + ")";
  }

 private:
  int ph_, pw_;
  TensorShape in_, out_;
  Eigen::Index in_rows_ = 0;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> argmax_;
};

// Per-channel batch normalization. Training uses batch statistics and
// updates exponential moving averages (momentum 0.9); inference uses the
// moving averages. eps = 1e-5.
class BatchNormLayer : public Layer {
 public:
  static constexpr double kMomentum = 0.9;
  static constexpr double kEps = 1e-5;

  TensorShape init(TensorShape input, Rng&) override {
    shape_ = input;
    gamma_ = Matrix::Ones(input.c, 1);
    beta_ = Matrix::Zero(input.c, 1);
    dgamma_ = Matrix::Zero(input.c, 1);
    dbeta_ = Matrix::Zero(input.c, 1);
    running_mean_ = Matrix::Zero(input.c, 1);
    running_var_ = Matrix::Ones(input.c, 1);
    return input;
  }

  void forward(const Matrix& x, Matrix& y, bool training, Rng&) override {
    const int hw = shape_.h * shape_.w;
    const Eigen::Index batch = x.cols();
    y.resize(x.rows(), batch);
    training_ = training;
    if (training) {
      xhat_.resize(x.rows(), batch);
      inv_std_.resize(shape_.c);
      mean_.resize(shape_.c);
    }
    for (int c = 0; c < shape_.c; ++c) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(c) * hw;
      auto xc = x.middleRows(r0, hw);
      double mu, var;
      if (training) {
        const double n = static_cast<double>(hw) * static_cast<double>(batch);
        mu = xc.sum() / n;
        var = (xc.array() - mu).square().sum() / n;
        running_mean_(c, 0) = kMomentum * running_mean_(c, 0) + (1.0 - kMomentum) * mu;
        running_var_(c, 0) = kMomentum * running_var_(c, 0) + (1.0 - kMomentum) * var;
        mean_[c] = mu;
        inv_std_[c] = 1.0 / std::sqrt(var + kEps);
        xhat_.middleRows(r0, hw) = (xc.array() - mu) * inv_std_[c];
        y.middleRows(r0, hw) =
            gamma_(c, 0) * xhat_.middleRows(r0, hw).array() + beta_(c, 0);
      } else {
        mu = running_mean_(c, 0);
        var = running_var_(c, 0);
        const double inv = 1.0 / std::sqrt(var + kEps);
        y.middleRows(r0, hw) = ((xc.array() - mu) * inv) * gamma_(c, 0) + beta_(c, 0);
      }
    }
  }

  void backward(const Matrix& dy, Matrix& dx) override {
    if (!training_) throw NumericError("batchnorm: backward without training forward");
    const int hw = shape_.h * shape_.w;
    dx.resize(dy.rows(), dy.cols());
    for (int c = 0; c < shape_.c; ++c) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(c) * hw;
      auto dyc = dy.middleRows(r0, hw);
      auto xh = xhat_.middleRows(r0, hw);
      const double n = static_cast<double>(hw) * static_cast<double>(dy.cols());
      const double sum_dy = dyc.sum();
      const double sum_dy_xhat = dyc.cwiseProduct(xh).sum();
      dgamma_(c, 0) = sum_dy_xhat;
      dbeta_(c, 0) = sum_dy;
      dx.middleRows(r0, hw) =
          (gamma_(c, 0) * inv_std_[c] / n) *
          (n * dyc.array() - sum_dy - xh.array() * sum_dy_xhat);
    }
  }

  std::vector<ParamBlock> trainable() override {
    return {{"gamma", &gamma_, &dgamma_}, {"beta", &beta_, &dbeta_}};
  }
  std::vector<ParamBlock> state() override {
    return {{"running_mean", &running_mean_, nullptr}, {"running_var", &running_var_, nullptr}};
  }
  std::string kind() const override { return "batchnorm(" + std::to_string(shape_.c) + ")"; }

 private:
  TensorShape shape_;
  Matrix gamma_, beta_, dgamma_, dbeta_, running_mean_, running_var_, xhat_;
  std::vector<double> inv_std_, mean_;
  bool training_ = false;
};

// Layer stack ending in a single logit; the sigmoid lives in the loss and
// in predict_proba, which keeps training numerically stable.
class Network {
 public:
  Network() : rng_(0) {}

  Network& add(std::unique_ptr<Layer> layer) {
    layers_.push_back(std::move(layer));
    return *this;
  }

  void init(TensorShape input, uint64_t seed) {
    input_shape_ = input;
    rng_ = Rng(derive_stream(seed, hash_name("nn-init")));
    TensorShape shape = input;
    for (auto& l : layers_) shape = l->init(shape, rng_);
    if (shape.size() != 1) throw NumericError("network must end in a single output unit");
  }

  Matrix forward(const Matrix& x, bool training) {
    Matrix a = x;
    Matrix b;
    for (auto& l : layers_) {
      l->forward(a, b, training, rng_);
      std::swap(a, b);
    }
    return a;  // 1 x batch logits
  }

  void backward(const Matrix& dlogits) {
    Matrix d = dlogits;
    Matrix dprev;
    for (size_t i = layers_.size(); i-- > 0;) {
      layers_[i]->backward(d, dprev);
      std::swap(d, dprev);
    }
  }

  std::vector<ParamBlock> trainable_blocks() {
    std::vector<ParamBlock> out;
    for (size_t i = 0; i < layers_.size(); ++i) {
      for (ParamBlock b : layers_[i]->trainable()) {
        b.name = "layer" + std::to_string(i) + "." + b.name;
        out.push_back(b);
      }
    }
    return out;
  }

  std::vector<ParamBlock> state_blocks() {
    std::vector<ParamBlock> out;
    for (size_t i = 0; i < layers_.size(); ++i) {
      for (ParamBlock b : layers_[i]->state()) {
        b.name = "layer" + std::to_string(i) + "." + b.name;
        out.push_back(b);
      }
    }
    return out;
  }

  // Weights + biases + all four batch-norm statistics per channel.
  long parameter_count() {
    long n = 0;
    for (ParamBlock& b : trainable_blocks()) n += b.value->size();
    for (ParamBlock& b : state_blocks()) n += b.value->size();
    return n;
  }

  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }
  TensorShape input_shape() const { return input_shape_; }
  Rng& rng() { return rng_; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  TensorShape input_shape_;
  Rng rng_;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct BceResult {
  double loss = 0.0;
  Matrix dlogits;
};

// Weighted BCE: -mean(w y log p + (1-y) log(1-p)), computed on logits.
inline BceResult weighted_bce_with_logits(const Matrix& logits, const std::vector<uint8_t>& y,
                                          double ome_weight) {
  const Eigen::Index batch = logits.cols();
  BceResult r;
  r.dlogits.resize(1, batch);
  auto softplus = [](double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); };
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double z = logits(0, i);
    const double w = y[i] ? ome_weight : 1.0;
    const double term = y[i] ? softplus(-z) : softplus(z);
    r.loss += w * term;
    const double p = sigmoid(z);
    r.dlogits(0, i) = w * (p - static_cast<double>(y[i]));
  }
  r.loss /= static_cast<double>(batch);
  r.dlogits /= static_cast<double>(batch);
  return r;
}

class AdamOptimizer {
 public:
  void attach(const std::vector<ParamBlock>& blocks) {
    m_.clear();
    v_.clear();
    for (const ParamBlock& b : blocks) {
      m_.push_back(Matrix::Zero(b.value->rows(), b.value->cols()));
      v_.push_back(Matrix::Zero(b.value->rows(), b.value->cols()));
    }
    t_ = 0;
  }

  void step(std::vector<ParamBlock>& blocks, double lr, double beta1, double beta2, double eps) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (size_t i = 0; i < blocks.size(); ++i) {
      const Matrix& g = *blocks[i].grad;
      m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
      v_[i] = beta2 * v_[i] + (1.0 - beta2) * g.cwiseProduct(g);
      blocks[i].value->array() -=
          lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps);
    }
  }

 private:
  std::vector<Matrix> m_, v_;
  long t_ = 0;
};

struct TrainingConfig {
  uint64_t seed = 0;
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double ome_class_weight = 1.0;
};

// Fixed epoch budget, seeded shuffling, no early stopping. Aborts with
// diagnostics if the loss goes non-finite.
inline void train_network(Network& net, const Matrix& x, const std::vector<uint8_t>& y,
                          const TrainingConfig& cfg) {
  if (x.cols() != static_cast<Eigen::Index>(y.size())) {
    throw ValidationError("train_network: feature/label count mismatch");
  }
  std::vector<ParamBlock> blocks = net.trainable_blocks();
  AdamOptimizer adam;
  adam.attach(blocks);

  const Eigen::Index n = x.cols();
  std::vector<int> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    net.rng().shuffle(order);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Matrix xb(x.rows(), bs);
      std::vector<uint8_t> yb(bs);
      for (Eigen::Index i = 0; i < bs; ++i) {
        xb.col(i) = x.col(order[start + i]);
        yb[i] = y[order[start + i]];
      }
      const Matrix logits = net.forward(xb, true);
      const BceResult bce = weighted_bce_with_logits(logits, yb, cfg.ome_class_weight);
      if (!std::isfinite(bce.loss)) {
        std::string layer_hint = "loss";
        Matrix probe = xb;
        Matrix out;
        for (const auto& l : net.layers()) {
          l->forward(probe, out, false, net.rng());
          if (!out.allFinite()) {
            layer_hint = l->kind();
            break;
          }
          std::swap(probe, out);
        }
        throw NumericError("train_network: non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(start / cfg.batch_size) + " (first at " +
                           layer_hint + ")");
      }
      net.backward(bce.dlogits);
      adam.step(blocks, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    }
  }
}

inline Eigen::VectorXd predict_proba_batch(Network& net, const Matrix& x) {
  const Matrix logits = net.forward(x, false);
  Eigen::VectorXd p(logits.cols());
  for (Eigen::Index i = 0; i < logits.cols(); ++i) p(i) = sigmoid(logits(0, i));
  return p;
}

enum class NetArch : uint8_t { Fnn1, Fnn2, Cnn1, Cnn2, CnnSmall };

inline const char* to_string(NetArch a) {
  switch (a) {
    case NetArch::Fnn1: return "fnn1";
    case NetArch::Fnn2: return "fnn2";
    case NetArch::Cnn1: return "cnn1";
    case NetArch::Cnn2: return "cnn2";
    case NetArch::CnnSmall: return "cnn-small";
  }
  return "fnn1";
}

inline NetArch net_arch_from_string(const std::string& s) {
  if (s == "fnn1") return NetArch::Fnn1;
  if (s == "fnn2") return NetArch::Fnn2;
  if (s == "cnn1") return NetArch::Cnn1;
  if (s == "cnn2") return NetArch::Cnn2;
  if (s == "cnn-small" || s == "cnn_small") return NetArch::CnnSmall;
  throw ValidationError("unknown network architecture \"" + s + "\"");
}

inline bool is_cnn(NetArch a) {
  return a == NetArch::Cnn1 || a == NetArch::Cnn2 || a == NetArch::CnnSmall;
}

// Architectures from the published model table. FNNs take the 5457-vector;
// CNNs take the 1x107x51 image.
inline Network build_network(NetArch arch, uint64_t seed) {
  Network net;
  switch (arch) {
    case NetArch::Fnn1:
      net.add(std::make_unique<DenseLayer>(1000))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(100))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(1));
      net.init({kGridPoints, 1, 1}, seed);
      break;
    case NetArch::Fnn2:
      net.add(std::make_unique<DenseLayer>(1000))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(500))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(100))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(1));
      net.init({kGridPoints, 1, 1}, seed);
      break;
    case NetArch::Cnn1:
      net.add(std::make_unique<Conv2dLayer>(20, 21, 11))
          .add(std::make_unique<MaxPoolLayer>(3, 2))
          .add(std::make_unique<BatchNormLayer>())
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<FlattenLayer>())
          .add(std::make_unique<DenseLayer>(100))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(1));
      net.init({1, kFrequencyBins, kPressureBins}, seed);
      break;
    case NetArch::Cnn2:
      net.add(std::make_unique<Conv2dLayer>(20, 21, 11))
          .add(std::make_unique<MaxPoolLayer>(3, 2))
          .add(std::make_unique<BatchNormLayer>())
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<Conv2dLayer>(40, 11, 7))
          .add(std::make_unique<BatchNormLayer>())
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<Conv2dLayer>(60, 3, 3))
          .add(std::make_unique<BatchNormLayer>())
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<FlattenLayer>())
          .add(std::make_unique<DenseLayer>(100))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.25))
          .add(std::make_unique<DenseLayer>(1));
      net.init({1, kFrequencyBins, kPressureBins}, seed);
      break;
    case NetArch::CnnSmall:
      net.add(std::make_unique<Conv2dLayer>(4, 7, 5))
          .add(std::make_unique<MaxPoolLayer>(4, 4))
          .add(std::make_unique<BatchNormLayer>())
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<FlattenLayer>())
          .add(std::make_unique<DenseLayer>(16))
          .add(std::make_unique<ReluLayer>())
          .add(std::make_unique<DropoutLayer>(0.2))
          .add(std::make_unique<DenseLayer>(1));
      net.init({1, kFrequencyBins, kPressureBins}, seed);
      break;
  }
  return net;
}

inline long parameter_count(NetArch arch) {
  Network net = build_network(arch, 0);
  return net.parameter_count();
}

}  // namespace wai
