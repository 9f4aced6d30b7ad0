#include "doctest.h"
#include "support.hpp"

#include "sacher/errors.hpp"
#include "sacher/mlp.hpp"

using namespace sacher;
using sacher::testing::numeric_gradient;
using sacher::testing::relative_error;

TEST_CASE("zero network outputs zero") {
  Mlp net({3, 4, 2});
  const Eigen::MatrixXd out = net.predict(Eigen::MatrixXd::Ones(3, 5));
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 5);
  CHECK(out.isZero(0.0));
}

TEST_CASE("hand-set 1-1-1 network") {
  Mlp net({1, 1, 1});
  net.mutable_weight(0)(0, 0) = 2.0;
  net.mutable_bias(0)(0) = -1.0;
  net.mutable_weight(1)(0, 0) = 3.0;
  net.mutable_bias(1)(0) = 1.0;
  Eigen::VectorXd x(1);
  x << 1.0;
  // relu(2*1 - 1) * 3 + 1
  CHECK(net.predict_one(x)(0) == doctest::Approx(4.0));
  x << -1.0;
  CHECK(net.predict_one(x)(0) == doctest::Approx(1.0));
}

TEST_CASE("wrong input length is a contract violation") {
  Mlp net({3, 4, 1});
  CHECK_THROWS_AS(net.forward(Eigen::MatrixXd::Ones(2, 1)), ContractViolation);
  CHECK_THROWS_AS(net.predict(Eigen::MatrixXd::Ones(4, 1)), ContractViolation);
  CHECK_THROWS_AS(Mlp({3}), ContractViolation);
}

TEST_CASE("linear layer: weight gradient is input times output gradient") {
  std::mt19937_64 rng(3);
  Mlp net({3, 1});
  net.init_uniform(rng);
  Eigen::MatrixXd x(3, 1);
  x << 0.5, -2.0, 1.5;
  const ForwardResult f = net.forward(x);
  Eigen::MatrixXd g(1, 1);
  g << 1.7;
  const MlpGradients grads = net.backward(f.tape, g);
  for (int i = 0; i < 3; ++i) CHECK(grads.params(i) == doctest::Approx(x(i, 0) * 1.7));
  CHECK(grads.params(3) == doctest::Approx(1.7));
  for (int i = 0; i < 3; ++i) CHECK(grads.input(i, 0) == doctest::Approx(net.weight(0)(0, i) * 1.7));
}

TEST_CASE("ReLU subgradient at exactly zero is zero") {
  Mlp net({1, 1, 1});
  net.mutable_weight(0)(0, 0) = 1.0;
  net.mutable_weight(1)(0, 0) = 1.0;
  const ForwardResult f = net.forward(Eigen::MatrixXd::Zero(1, 1));
  const MlpGradients g = net.backward(f.tape, Eigen::MatrixXd::Ones(1, 1));
  // weight0, bias0 sit behind the kink; weight1 sees a zero input; bias1 gets 1.
  CHECK(g.params(0) == 0.0);
  CHECK(g.params(1) == 0.0);
  CHECK(g.params(2) == 0.0);
  CHECK(g.params(3) == 1.0);
  CHECK(g.input(0, 0) == 0.0);
}

TEST_CASE("backward matches central differences on random small nets") {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> width(1, 8);
  std::uniform_int_distribution<int> io(1, 5);
  std::uniform_int_distribution<int> out_dim(1, 3);
  std::uniform_int_distribution<int> depth(1, 2);
  std::uniform_int_distribution<int> batch(1, 4);
  double worst = 0.0;
  int trials = 0;
  while (trials < 120) {
    std::vector<int> dims{io(rng)};
    const int hidden_layers = depth(rng);
    for (int h = 0; h < hidden_layers; ++h) dims.push_back(width(rng));
    dims.push_back(out_dim(rng));
    Mlp net = sacher::testing::random_mlp(dims, rng);
    const Eigen::MatrixXd x = sacher::testing::random_matrix(dims.front(), batch(rng), rng);
    const Eigen::MatrixXd w = sacher::testing::random_matrix(dims.back(), x.cols(), rng);
    const ForwardResult f = net.forward(x);
    if (sacher::testing::min_abs_hidden_preactivation(f.tape) < 1e-3) continue;
    const MlpGradients g = net.backward(f.tape, w);

    Mlp probe = net;
    const auto objective_params = [&](const Eigen::VectorXd& p) {
      probe.set_params(p);
      return probe.predict(x).cwiseProduct(w).sum();
    };
    const auto objective_input = [&](const Eigen::VectorXd& flat) {
      const Eigen::MatrixXd xi = Eigen::Map<const Eigen::MatrixXd>(flat.data(), x.rows(), x.cols());
      return net.predict(xi).cwiseProduct(w).sum();
    };
    const Eigen::VectorXd np = numeric_gradient(objective_params, net.params());
    const Eigen::VectorXd flat_x = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd nx = numeric_gradient(objective_input, flat_x);
    const Eigen::VectorXd ax = Eigen::Map<const Eigen::VectorXd>(g.input.data(), g.input.size());
    worst = std::max({worst, relative_error(g.params, np), relative_error(ax, nx)});
    ++trials;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("stale tapes are rejected") {
  std::mt19937_64 rng(5);
  Mlp net = sacher::testing::random_mlp({2, 3, 1}, rng);
  const ForwardResult f = net.forward(Eigen::MatrixXd::Ones(2, 2));
  Mlp other = net;
  CHECK_THROWS_AS(other.backward(f.tape, Eigen::MatrixXd::Ones(1, 2)), ContractViolation);
  CHECK_THROWS_AS(net.backward(f.tape, Eigen::MatrixXd::Ones(1, 3)), ContractViolation);
  net.mutable_params()(0) += 1.0;
  CHECK_THROWS_AS(net.backward(f.tape, Eigen::MatrixXd::Ones(1, 2)), ContractViolation);
}

TEST_CASE("initialization is deterministic and within fan-in bounds") {
  std::mt19937_64 a(11), b(11);
  Mlp n1({7, 16, 1}), n2({7, 16, 1});
  n1.init_uniform(a);
  n2.init_uniform(b);
  CHECK(n1.params() == n2.params());
  CHECK(n1.weight(0).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(7.0));
  CHECK(n1.weight(1).cwiseAbs().maxCoeff() <= 1.0 / 4.0);
  CHECK(n1.bias(0).isZero(0.0));
}
