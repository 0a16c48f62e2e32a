#include <doctest.h>

#include <cmath>
#include <vector>

#include "kanppo/layers.hpp"
#include "kanppo/rng.hpp"
#include "oracles.hpp"

using namespace kanppo;

namespace {

// Straight-line MLP evaluation written independently of the Layer classes.
Vec mlp_oracle_forward(const std::vector<Matrix>& weights, const std::vector<Vec>& biases,
                       const Vec& x, bool tanh_hidden) {
  Vec cur = x;
  for (size_t l = 0; l < weights.size(); ++l) {
    Vec next(weights[l].rows(), 0.0);
    for (int j = 0; j < weights[l].rows(); ++j) {
      double s = biases[l][j];
      for (int i = 0; i < weights[l].cols(); ++i) s += weights[l].at(j, i) * cur[i];
      next[j] = (tanh_hidden && l + 1 < weights.size()) ? std::tanh(s) : s;
    }
    cur = next;
  }
  return cur;
}

Vec random_vec(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("KAN layer with zero coefficients computes the zero function") {
  SplineConfig cfg;
  Network net = Network::kan({4, 3}, cfg);
  Rng rng(1);
  const Vec y = net.forward(random_vec(4, rng));
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("1x1 KAN layer equals spline_eval of its single edge") {
  SplineConfig cfg;
  KANLayer layer(1, 1, cfg);
  Rng rng(2);
  Vec coeffs(cfg.basis_count());
  for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
  layer.set_params(coeffs);
  const EdgeFunction edge = layer.edge(0, 0);
  for (double x = -1.3; x <= 1.3; x += 0.07) {
    Vec y;
    layer.forward(Vec{x}, y, nullptr);
    CHECK(y[0] == spline_eval(edge, x));
  }
}

TEST_CASE("KAN layer additivity: output is the exact sum of per-edge evals") {
  SplineConfig cfg;
  Rng rng(3);
  KANLayer layer(5, 3, cfg);
  Vec coeffs(layer.param_count());
  for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
  layer.set_params(coeffs);
  const Vec x = random_vec(5, rng, -1.5, 1.5);
  Vec y;
  layer.forward(x, y, nullptr);
  for (int j = 0; j < 3; ++j) {
    double want = 0.0;
    for (int i = 0; i < 5; ++i) want += spline_eval(layer.edge(j, i), x[i]);
    CHECK(y[j] == want);
  }
}

TEST_CASE("MLP forward matches an independent straight-line evaluation") {
  Rng rng(4);
  Network net = Network::mlp({17, 64, 64, 6});
  InitScheme scheme;
  init_params(net, rng, scheme);

  // Pull the parameters into plain matrices for the oracle.
  std::vector<Matrix> weights;
  std::vector<Vec> biases;
  const Vec params = net.params();
  size_t off = 0;
  for (const std::vector<int> shape : {std::vector<int>{64, 17}, {64, 64}, {6, 64}}) {
    const int rows = shape[0], cols = shape[1];
    Matrix w(rows, cols, Vec(params.begin() + off, params.begin() + off + rows * cols));
    off += static_cast<size_t>(rows) * cols;
    Vec b(params.begin() + off, params.begin() + off + rows);
    off += rows;
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  REQUIRE(off == params.size());

  for (int trial = 0; trial < 25; ++trial) {
    const Vec x = random_vec(17, rng);
    const Vec got = net.forward(x);
    const Vec want = mlp_oracle_forward(weights, biases, x, true);
    for (int j = 0; j < 6; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-14));
  }
}

TEST_CASE("forward determinism: identical parameters and input give identical bits") {
  SplineConfig cfg;
  Rng rng(5);
  Network net = Network::kan({7, 4}, cfg);
  init_params(net, rng, InitScheme{});
  const Vec x = random_vec(7, rng);
  const Vec a = net.forward(x);
  const Vec b = net.forward(x);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("backward: zero upstream gradient yields zero everywhere") {
  SplineConfig cfg;
  Rng rng(6);
  Network net = Network::kan({3, 2}, cfg);
  init_params(net, rng, InitScheme{});
  ForwardCache cache;
  net.forward(random_vec(3, rng), &cache);
  GradBuffer grads(net.param_count());
  const Vec gx = net.backward(cache, Vec(2, 0.0), grads);
  for (double g : grads.grads) CHECK(g == 0.0);
  for (double g : gx) CHECK(g == 0.0);
}

TEST_CASE("backward: single-edge KAN grads equal spline_grad_coeffs scaled by grad_y") {
  SplineConfig cfg;
  Rng rng(7);
  KANLayer layer(1, 1, cfg);
  Vec coeffs(cfg.basis_count());
  for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
  layer.set_params(coeffs);
  const double x = 0.31;
  Vec y;
  LayerCache cache;
  layer.forward(Vec{x}, y, &cache);
  Vec grads(layer.param_count(), 0.0);
  Vec gx(1, 0.0);
  const double gy = -2.5;
  layer.backward(cache, Vec{gy}, gx, grads);
  const Vec basis = spline_grad_coeffs(layer.edge(0, 0), x);
  for (int m = 0; m < cfg.basis_count(); ++m) {
    CHECK(grads[m] == doctest::Approx(gy * basis[m]).epsilon(1e-14));
  }
  const double want_gx = gy * spline_grad_input(layer.edge(0, 0), x);
  CHECK(gx[0] == doctest::Approx(want_gx).epsilon(1e-12));
}

TEST_CASE("gradient check: all four architectures on a quadratic test loss") {
  // Loss: 0.5 * sum_j (y_j - target_j)^2 at a frozen input. Both small and
  // paper-width variants; every parameter against central differences.
  struct Case {
    std::vector<int> dims;
    bool kan;
  };
  const std::vector<Case> cases = {
      {{3, 8, 8, 2}, false},  // mlp a2 shape, small
      {{3, 8, 2}, false},     // mlp a1 shape, small
      {{3, 2}, true},         // kan actor, small
      {{3, 1}, true},         // kan critic, small
      {{17, 64, 64, 6}, false},
      {{17, 6}, true},
  };
  SplineConfig spline_cfg;
  Rng rng(8);
  for (const auto& c : cases) {
    Network net = c.kan ? Network::kan(c.dims, spline_cfg) : Network::mlp(c.dims);
    init_params(net, rng, InitScheme{0.3, 1.0, 1.0});
    const Vec x = random_vec(c.dims.front(), rng, -0.9, 0.9);
    const Vec target = random_vec(c.dims.back(), rng);

    Vec params = net.params();
    const auto loss = [&]() {
      net.set_params(params);
      const Vec y = net.forward(x);
      double s = 0.0;
      for (size_t j = 0; j < y.size(); ++j) s += 0.5 * (y[j] - target[j]) * (y[j] - target[j]);
      return s;
    };

    // Analytic gradient.
    net.set_params(params);
    ForwardCache cache;
    const Vec y = net.forward(x, &cache);
    Vec gy(y.size());
    for (size_t j = 0; j < y.size(); ++j) gy[j] = y[j] - target[j];
    GradBuffer grads(net.param_count());
    net.backward(cache, gy, grads);

    // Spot-check a deterministic subset for the big nets, all for small.
    const size_t stride = net.param_count() > 2000 ? 37 : 1;
    double max_err = 0.0;
    for (size_t i = 0; i < params.size(); i += stride) {
      const double fd = oracles::central_difference(loss, params[i], 1e-6);
      max_err = std::max(max_err, oracles::rel_error(grads.grads[i], fd));
    }
    net.set_params(params);
    CHECK(max_err < 1e-5);
  }
}

TEST_CASE("count_params reproduces every actor entry of the parameter table") {
  SplineConfig cfg;  // k=2, g=3
  struct Row {
    int obs, act;
    size_t mlp2, mlp1, kan;
  };
  const std::vector<Row> rows = {
      {17, 6, 5702, 1542, 510},  // HalfCheetah-v4
      {17, 6, 5702, 1542, 510},  // Walker2d-v4
      {11, 3, 5123, 963, 165},   // Hopper-v4
      {4, 1, 4545, 385, 20},     // InvertedPendulum-v4
      {8, 2, 4866, 706, 80},     // Swimmer-v4
      {23, 7, 6151, 1991, 805},  // Pusher-v4
  };
  for (const auto& r : rows) {
    CHECK(count_params(Network::mlp({r.obs, 64, 64, r.act})) == r.mlp2);
    CHECK(count_params(Network::mlp({r.obs, 64, r.act})) == r.mlp1);
    CHECK(count_params(Network::kan({r.obs, r.act}, cfg)) == r.kan);
  }
}

TEST_CASE("init_params: sigma 0 gives the zero function") {
  SplineConfig cfg;
  Network net = Network::kan({4, 2}, cfg);
  Rng rng(9);
  init_params(net, rng, InitScheme{0.0, 1.0, 1.0});
  const Vec y = net.forward(random_vec(4, rng));
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("init_params: fixed seed reproduces parameters") {
  SplineConfig cfg;
  Network a = Network::kan({5, 3}, cfg);
  Network b = Network::kan({5, 3}, cfg);
  Rng ra(77);
  Rng rb(77);
  init_params(a, ra, InitScheme{});
  init_params(b, rb, InitScheme{});
  const Vec pa = a.params();
  const Vec pb = b.params();
  for (size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("init_params: dense fan-in variance within 20% of 1/n_in") {
  Network net = Network::mlp({100, 100, 1});
  Rng rng(10);
  init_params(net, rng, InitScheme{});
  const Vec params = net.params();
  // First layer weights: 100*100 draws with target variance 1/100.
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100 * 100;
  for (int i = 0; i < n; ++i) {
    sum += params[i];
    sum_sq += params[i] * params[i];
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(var > 0.8 / 100.0);
  CHECK(var < 1.2 / 100.0);
}

TEST_CASE("network invariants: dim chaining is validated") {
  std::vector<std::unique_ptr<Layer>> layers;
  layers.push_back(std::make_unique<DenseLayer>(3, 4, Activation::kTanh));
  layers.push_back(std::make_unique<DenseLayer>(5, 2, Activation::kIdentity));
  CHECK_THROWS_AS(Network::from_layers(std::move(layers), NetworkKind::kMlp),
                  std::invalid_argument);
}

TEST_CASE("forward rejects wrong input length; backward rejects wrong cache") {
  Network net = Network::mlp({3, 4, 2});
  CHECK_THROWS_AS(net.forward(Vec{1.0, 2.0}), std::invalid_argument);
  ForwardCache cache;
  net.forward(Vec{1.0, 2.0, 3.0}, &cache);
  Network other = Network::mlp({3, 2});
  GradBuffer grads(other.param_count());
  CHECK_THROWS_AS(other.backward(cache, Vec{1.0, 1.0}, grads), std::invalid_argument);
}
