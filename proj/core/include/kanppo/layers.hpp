#ifndef KANPPO_LAYERS_HPP_
#define KANPPO_LAYERS_HPP_

#include <memory>
#include <span>
#include <vector>

#include "kanppo/matrix.hpp"
#include "kanppo/rng.hpp"
#include "kanppo/spline.hpp"

namespace kanppo {

enum class Activation { kTanh, kIdentity };
enum class NetworkKind { kMlp, kKan };

struct LayerCache {
  Vec input;
  Vec aux;  // dense: activated output; kan: per-input (span, local basis values)
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;
  virtual size_t param_count() const = 0;
  virtual void forward(std::span<const double> x, Vec& y, LayerCache* cache) const = 0;
  // Accumulates parameter gradients into param_grads (length param_count())
  // and writes dL/dx into grad_x.
  virtual void backward(const LayerCache& cache, std::span<const double> grad_y,
                        std::span<double> grad_x, std::span<double> param_grads) const = 0;
  virtual void get_params(std::span<double> out) const = 0;
  virtual void set_params(std::span<const double> in) = 0;
};

// Fully connected layer, parameters n_in*n_out weights + n_out biases,
// flat layout [W row-major | b].
class DenseLayer : public Layer {
 public:
  DenseLayer(int n_in, int n_out, Activation activation);

  int in_dim() const override { return weights_.cols(); }
  int out_dim() const override { return weights_.rows(); }
  size_t param_count() const override { return weights_.size() + biases_.size(); }
  void forward(std::span<const double> x, Vec& y, LayerCache* cache) const override;
  void backward(const LayerCache& cache, std::span<const double> grad_y,
                std::span<double> grad_x, std::span<double> param_grads) const override;
  void get_params(std::span<double> out) const override;
  void set_params(std::span<const double> in) override;

  Activation activation() const { return activation_; }
  Matrix& weights() { return weights_; }
  Vec& biases() { return biases_; }

 private:
  Matrix weights_;
  Vec biases_;
  Activation activation_;
};

// One spline function per (output, input) edge; node j sums its incoming
// edge outputs. Parameters are the spline coefficients only, g+k per edge,
// flat layout coeffs[((j*n_in)+i)*basis + m].
class KANLayer : public Layer {
 public:
  KANLayer(int n_in, int n_out, const SplineConfig& config);

  int in_dim() const override { return n_in_; }
  int out_dim() const override { return n_out_; }
  size_t param_count() const override { return coeffs_.size(); }
  void forward(std::span<const double> x, Vec& y, LayerCache* cache) const override;
  void backward(const LayerCache& cache, std::span<const double> grad_y,
                std::span<double> grad_x, std::span<double> param_grads) const override;
  void get_params(std::span<double> out) const override;
  void set_params(std::span<const double> in) override;

  const SplineConfig& config() const { return config_; }
  // Copies out edge (j, i) as a standalone EdgeFunction.
  EdgeFunction edge(int j, int i) const;

 private:
  int n_in_;
  int n_out_;
  SplineConfig config_;
  Vec coeffs_;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
};

// Flat per-parameter gradient accumulator matching a network's layout.
struct GradBuffer {
  explicit GradBuffer(size_t n = 0) : grads(n, 0.0) {}
  Vec grads;
  void zero() { std::fill(grads.begin(), grads.end(), 0.0); }
  size_t size() const { return grads.size(); }
};

class Network {
 public:
  Network() = default;

  // dims = {in, hidden..., out}; hidden layers use `hidden`, output identity.
  static Network mlp(const std::vector<int>& dims, Activation hidden = Activation::kTanh);
  static Network kan(const std::vector<int>& dims, const SplineConfig& config);
  // Assembles a network from pre-built layers (checkpoint restore).
  static Network from_layers(std::vector<std::unique_ptr<Layer>> layers, NetworkKind kind);

  NetworkKind kind() const { return kind_; }
  int in_dim() const;
  int out_dim() const;
  size_t param_count() const;
  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

  Vec forward(std::span<const double> x, ForwardCache* cache = nullptr) const;
  // grads must match param_count(); returns dL/dx. Throws on a cache that
  // does not match this network's layer structure.
  Vec backward(const ForwardCache& cache, std::span<const double> grad_y,
               GradBuffer& grads) const;

  void get_params(std::span<double> out) const;
  void set_params(std::span<const double> in);
  Vec params() const;

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  NetworkKind kind_ = NetworkKind::kMlp;
};

// Exact trainable-parameter count. KAN layers contribute spline coefficients
// only; the policy's log_std lives outside the Network and is not counted.
size_t count_params(const Network& net);

struct InitScheme {
  double kan_sigma = 0.1;    // spline coefficients ~ N(0, sigma^2); 0 gives the zero function
  double dense_gain = 1.0;   // hidden dense layers, uniform with variance gain^2/n_in
  double output_gain = 1.0;  // final dense layer
};

void init_params(Network& net, Rng& rng, const InitScheme& scheme);

}  // namespace kanppo

#endif  // KANPPO_LAYERS_HPP_
