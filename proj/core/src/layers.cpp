#include "kanppo/layers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kanppo {

namespace {

void check_dim(int got, int want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << ": expected length " << want << ", got " << got;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

// ---------- DenseLayer ----------

DenseLayer::DenseLayer(int n_in, int n_out, Activation activation)
    : weights_(n_out, n_in), biases_(n_out, 0.0), activation_(activation) {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("DenseLayer: dims must be >= 1");
}

void DenseLayer::forward(std::span<const double> x, Vec& y, LayerCache* cache) const {
  check_dim(static_cast<int>(x.size()), in_dim(), "DenseLayer::forward input");
  y = matvec(weights_, x);
  for (int j = 0; j < out_dim(); ++j) {
    y[j] += biases_[j];
    if (activation_ == Activation::kTanh) y[j] = std::tanh(y[j]);
  }
  if (cache) {
    cache->input.assign(x.begin(), x.end());
    cache->aux = y;  // activated output, enough to form tanh' = 1 - y^2
  }
}

void DenseLayer::backward(const LayerCache& cache, std::span<const double> grad_y,
                          std::span<double> grad_x, std::span<double> param_grads) const {
  const int ni = in_dim();
  const int no = out_dim();
  check_dim(static_cast<int>(cache.input.size()), ni, "DenseLayer::backward cache");
  check_dim(static_cast<int>(grad_y.size()), no, "DenseLayer::backward grad_y");
  std::fill(grad_x.begin(), grad_x.end(), 0.0);
  for (int j = 0; j < no; ++j) {
    double gz = grad_y[j];
    if (activation_ == Activation::kTanh) {
      const double yj = cache.aux[j];
      gz *= 1.0 - yj * yj;
    }
    double* wg = param_grads.data() + static_cast<size_t>(j) * ni;
    for (int i = 0; i < ni; ++i) {
      wg[i] += gz * cache.input[i];
      grad_x[i] += weights_.at(j, i) * gz;
    }
    param_grads[weights_.size() + j] += gz;
  }
}

void DenseLayer::get_params(std::span<double> out) const {
  std::copy(weights_.data().begin(), weights_.data().end(), out.begin());
  std::copy(biases_.begin(), biases_.end(), out.begin() + weights_.size());
}

void DenseLayer::set_params(std::span<const double> in) {
  std::copy(in.begin(), in.begin() + weights_.size(), weights_.data().begin());
  std::copy(in.begin() + weights_.size(), in.end(), biases_.begin());
}

// ---------- KANLayer ----------

KANLayer::KANLayer(int n_in, int n_out, const SplineConfig& config)
    : n_in_(n_in), n_out_(n_out), config_(config) {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("KANLayer: dims must be >= 1");
  config_.validate();
  coeffs_.assign(static_cast<size_t>(n_in) * n_out * config_.basis_count(), 0.0);
}

void KANLayer::forward(std::span<const double> x, Vec& y, LayerCache* cache) const {
  check_dim(static_cast<int>(x.size()), n_in_, "KANLayer::forward input");
  const int k = config_.order_k;
  const int nb = config_.basis_count();
  const int stride = k + 2;  // per input: span index then k+1 local values

  // One basis evaluation per input, shared by all outgoing edges.
  Vec local(static_cast<size_t>(n_in_) * stride);
  for (int i = 0; i < n_in_; ++i) {
    double xc = x[i];
    if (!std::isfinite(xc)) throw std::invalid_argument("KANLayer: input must be finite");
    xc = std::clamp(xc, config_.range_min, config_.range_max);
    const int span = detail::find_span(config_, xc);
    local[static_cast<size_t>(i) * stride] = span;
    detail::local_basis(config_, span, xc,
                        std::span<double>(local.data() + i * stride + 1, k + 1));
  }

  y.assign(n_out_, 0.0);
  for (int j = 0; j < n_out_; ++j) {
    double s = 0.0;
    for (int i = 0; i < n_in_; ++i) {
      const double* li = local.data() + static_cast<size_t>(i) * stride;
      const int span = static_cast<int>(li[0]);
      const double* c = coeffs_.data() + (static_cast<size_t>(j) * n_in_ + i) * nb;
      for (int r = 0; r <= k; ++r) s += c[span - k + r] * li[1 + r];
    }
    y[j] = s;
  }

  if (cache) {
    cache->input.assign(x.begin(), x.end());
    cache->aux = std::move(local);
  }
}

void KANLayer::backward(const LayerCache& cache, std::span<const double> grad_y,
                        std::span<double> grad_x, std::span<double> param_grads) const {
  check_dim(static_cast<int>(cache.input.size()), n_in_, "KANLayer::backward cache");
  check_dim(static_cast<int>(grad_y.size()), n_out_, "KANLayer::backward grad_y");
  const int k = config_.order_k;
  const int nb = config_.basis_count();
  const int stride = k + 2;

  // dL/dc_{j,i,m} = grad_y[j] * B_m(x_i), nonzero only on the local support.
  for (int j = 0; j < n_out_; ++j) {
    const double gy = grad_y[j];
    if (gy == 0.0) continue;
    for (int i = 0; i < n_in_; ++i) {
      const double* li = cache.aux.data() + static_cast<size_t>(i) * stride;
      const int span = static_cast<int>(li[0]);
      double* cg = param_grads.data() + (static_cast<size_t>(j) * n_in_ + i) * nb;
      for (int r = 0; r <= k; ++r) cg[span - k + r] += gy * li[1 + r];
    }
  }

  // dL/dx_i = sum_j grad_y[j] * phi'_{j,i}(x_i); zero where the input was
  // clamped (the clamp makes the edge locally constant).
  std::fill(grad_x.begin(), grad_x.end(), 0.0);
  double deriv[16];
  for (int i = 0; i < n_in_; ++i) {
    const double xi = cache.input[i];
    if (xi < config_.range_min || xi > config_.range_max) continue;
    const double* li = cache.aux.data() + static_cast<size_t>(i) * stride;
    const int span = static_cast<int>(li[0]);
    detail::local_basis_derivatives(config_, span, xi, std::span<double>(deriv, k + 1));
    double gx = 0.0;
    for (int j = 0; j < n_out_; ++j) {
      const double gy = grad_y[j];
      if (gy == 0.0) continue;
      const double* c = coeffs_.data() + (static_cast<size_t>(j) * n_in_ + i) * nb;
      double dphi = 0.0;
      for (int r = 0; r <= k; ++r) dphi += c[span - k + r] * deriv[r];
      gx += gy * dphi;
    }
    grad_x[i] = gx;
  }
}

void KANLayer::get_params(std::span<double> out) const {
  std::copy(coeffs_.begin(), coeffs_.end(), out.begin());
}

void KANLayer::set_params(std::span<const double> in) {
  std::copy(in.begin(), in.end(), coeffs_.begin());
}

EdgeFunction KANLayer::edge(int j, int i) const {
  const int nb = config_.basis_count();
  const double* c = coeffs_.data() + (static_cast<size_t>(j) * n_in_ + i) * nb;
  return EdgeFunction{config_, Vec(c, c + nb)};
}

// ---------- Network ----------

Network Network::mlp(const std::vector<int>& dims, Activation hidden) {
  if (dims.size() < 2) throw std::invalid_argument("Network::mlp: need at least in and out dims");
  Network net;
  net.kind_ = NetworkKind::kMlp;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const bool last = (l + 2 == dims.size());
    net.layers_.push_back(
        std::make_unique<DenseLayer>(dims[l], dims[l + 1], last ? Activation::kIdentity : hidden));
  }
  return net;
}

Network Network::kan(const std::vector<int>& dims, const SplineConfig& config) {
  if (dims.size() < 2) throw std::invalid_argument("Network::kan: need at least in and out dims");
  Network net;
  net.kind_ = NetworkKind::kKan;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    net.layers_.push_back(std::make_unique<KANLayer>(dims[l], dims[l + 1], config));
  }
  return net;
}

Network Network::from_layers(std::vector<std::unique_ptr<Layer>> layers, NetworkKind kind) {
  if (layers.empty()) throw std::invalid_argument("Network::from_layers: no layers");
  for (size_t l = 0; l + 1 < layers.size(); ++l) {
    if (layers[l]->out_dim() != layers[l + 1]->in_dim()) {
      throw std::invalid_argument("Network::from_layers: adjacent layer dims do not chain");
    }
  }
  Network net;
  net.layers_ = std::move(layers);
  net.kind_ = kind;
  return net;
}

int Network::in_dim() const { return layers_.front()->in_dim(); }
int Network::out_dim() const { return layers_.back()->out_dim(); }

size_t Network::param_count() const {
  size_t n = 0;
  for (const auto& l : layers_) n += l->param_count();
  return n;
}

Vec Network::forward(std::span<const double> x, ForwardCache* cache) const {
  if (cache) cache->layers.resize(layers_.size());
  Vec cur(x.begin(), x.end());
  Vec next;
  for (size_t l = 0; l < layers_.size(); ++l) {
    layers_[l]->forward(cur, next, cache ? &cache->layers[l] : nullptr);
    cur.swap(next);
  }
  return cur;
}

Vec Network::backward(const ForwardCache& cache, std::span<const double> grad_y,
                      GradBuffer& grads) const {
  if (cache.layers.size() != layers_.size()) {
    throw std::invalid_argument("Network::backward: cache does not match network");
  }
  if (grads.size() != param_count()) {
    throw std::invalid_argument("Network::backward: grad buffer does not match parameter count");
  }
  // Offsets of each layer's slice of the flat parameter vector.
  std::vector<size_t> offset(layers_.size() + 1, 0);
  for (size_t l = 0; l < layers_.size(); ++l) offset[l + 1] = offset[l] + layers_[l]->param_count();

  Vec gy(grad_y.begin(), grad_y.end());
  for (size_t l = layers_.size(); l-- > 0;) {
    check_dim(static_cast<int>(cache.layers[l].input.size()), layers_[l]->in_dim(),
              "Network::backward cache layer");
    Vec gx(layers_[l]->in_dim(), 0.0);
    layers_[l]->backward(cache.layers[l], gy, gx,
                         std::span<double>(grads.grads.data() + offset[l],
                                           layers_[l]->param_count()));
    gy.swap(gx);
  }
  return gy;
}

void Network::get_params(std::span<double> out) const {
  size_t off = 0;
  for (const auto& l : layers_) {
    l->get_params(out.subspan(off, l->param_count()));
    off += l->param_count();
  }
}

void Network::set_params(std::span<const double> in) {
  if (in.size() != param_count()) {
    throw std::invalid_argument("Network::set_params: length does not match parameter count");
  }
  size_t off = 0;
  for (auto& l : layers_) {
    l->set_params(in.subspan(off, l->param_count()));
    off += l->param_count();
  }
}

Vec Network::params() const {
  Vec p(param_count());
  get_params(p);
  return p;
}

size_t count_params(const Network& net) { return net.param_count(); }

void init_params(Network& net, Rng& rng, const InitScheme& scheme) {
  const auto& layers = net.layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    const bool last = (l + 1 == layers.size());
    Vec p(layers[l]->param_count());
    if (auto* dense = dynamic_cast<DenseLayer*>(layers[l].get())) {
      const double gain = last ? scheme.output_gain : scheme.dense_gain;
      // U[-a, a] with a = gain*sqrt(3/n_in) has variance gain^2/n_in.
      const double a = gain * std::sqrt(3.0 / dense->in_dim());
      const size_t nw = static_cast<size_t>(dense->in_dim()) * dense->out_dim();
      for (size_t i = 0; i < nw; ++i) p[i] = rng.uniform(-a, a);
      // biases stay zero
      dense->set_params(p);
    } else {
      for (auto& v : p) v = scheme.kan_sigma > 0.0 ? rng.gaussian(0.0, scheme.kan_sigma) : 0.0;
      layers[l]->set_params(p);
    }
  }
}

}  // namespace kanppo
