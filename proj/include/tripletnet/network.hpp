#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace tripletnet {

// Two square fully-connected layers: sigmoid, then tanh. Every layer
// width equals the input dimension.
struct NetworkParams {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;

  Eigen::Index dim() const { return W1.rows(); }
};

struct LossConfig {
  double margin = 1.0;
};

// One training example with features already transformed for the network.
struct TripletExample {
  Eigen::VectorXd anchor;
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;
};

struct Gradients {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
  double loss = 0.0;
};

// Glorot-uniform weights in [-sqrt(6/2d), +sqrt(6/2d)], zero biases.
NetworkParams init_params(Eigen::Index dim, std::uint64_t seed);

// f(x) = tanh(W2 * sigmoid(W1 x + b1) + b2); every output entry in (-1, 1).
Eigen::VectorXd forward(const NetworkParams& params, const Eigen::VectorXd& x);

// Sum over the batch of [ ||f(a)-f(p)||^2 - ||f(a)-f(n)||^2 + margin ]_+ .
double triplet_loss(const NetworkParams& params,
                    const std::vector<TripletExample>& batch,
                    const LossConfig& config);

// Exact analytic gradients of the batch loss. Triplets with an inactive
// hinge contribute nothing; the subgradient at exactly zero is zero.
Gradients backward(const NetworkParams& params,
                   const std::vector<TripletExample>& batch,
                   const LossConfig& config);

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
};

// Central-difference check of backward on a seeded subsample of at least
// max_coords coordinates per parameter tensor (all of them for small nets).
GradCheckReport grad_check(const NetworkParams& params,
                           const std::vector<TripletExample>& batch,
                           const LossConfig& config, double step,
                           double tolerance, std::uint64_t seed = 0,
                           std::size_t max_coords = 200);

}  // namespace tripletnet
