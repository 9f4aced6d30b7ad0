#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "sacher/mlp.hpp"

namespace sacher::testing {

// Central differences of a scalar function, one coordinate at a time.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        Eigen::VectorXd x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

// max |a - n| / max(max|a|, max|n|, tiny): one number per gradient vector.
inline double relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double scale =
      std::max({analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff(), 1e-12});
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline Mlp random_mlp(std::vector<int> dims, std::mt19937_64& rng) {
  Mlp net(std::move(dims));
  net.init_uniform(rng);
  // Nonzero biases so every layer's bias gradient is exercised.
  std::normal_distribution<double> n(0.0, 0.1);
  for (int l = 0; l < net.num_layers(); ++l) {
    auto b = net.mutable_bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = n(rng);
  }
  return net;
}

}  // namespace sacher::testing

namespace sacher::testing {

// Central differences are only meaningful away from ReLU kinks; callers redraw
// inputs whose hidden pre-activations sit too close to zero.
inline double min_abs_hidden_preactivation(const GradientTape& tape) {
  double m = INFINITY;
  for (std::size_t l = 0; l + 1 < tape.pre_activations.size(); ++l)
    m = std::min(m, tape.pre_activations[l].cwiseAbs().minCoeff());
  return m;
}

}  // namespace sacher::testing
