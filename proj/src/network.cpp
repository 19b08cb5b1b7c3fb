#include "tripletnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tripletnet/errors.hpp"
#include "tripletnet/rng.hpp"

namespace tripletnet {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

struct LegActivations {
  Eigen::VectorXd input;
  Eigen::VectorXd hidden;  // sigmoid(W1 x + b1)
  Eigen::VectorXd output;  // tanh(W2 h + b2)
};

LegActivations run_leg(const NetworkParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.dim()) {
    throw DataError("forward: input dimension " + std::to_string(x.size()) +
                    " does not match network dimension " +
                    std::to_string(params.dim()));
  }
  LegActivations act;
  act.input = x;
  act.hidden = sigmoid(params.W1 * x + params.b1);
  act.output = (params.W2 * act.hidden + params.b2).array().tanh();
  return act;
}

// Backprop one leg given dL/d(output); accumulates into grads.
void backprop_leg(const NetworkParams& params, const LegActivations& act,
                  const Eigen::VectorXd& d_output, Gradients& grads) {
  Eigen::VectorXd dz2 =
      d_output.cwiseProduct(Eigen::VectorXd::Ones(act.output.size()) -
                            act.output.cwiseAbs2());
  grads.W2.noalias() += dz2 * act.hidden.transpose();
  grads.b2 += dz2;
  Eigen::VectorXd dh = params.W2.transpose() * dz2;
  Eigen::VectorXd dz1 = dh.cwiseProduct(
      act.hidden.cwiseProduct(Eigen::VectorXd::Ones(act.hidden.size()) - act.hidden));
  grads.W1.noalias() += dz1 * act.input.transpose();
  grads.b1 += dz1;
}

void check_batch(const std::vector<TripletExample>& batch, const LossConfig& config) {
  if (batch.empty()) throw DataError("empty triplet batch");
  if (!(config.margin > 0.0)) throw DataError("margin must be > 0");
}

}  // namespace

NetworkParams init_params(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw DataError("network dimension must be >= 1");
  double bound = std::sqrt(6.0 / (2.0 * static_cast<double>(dim)));
  std::mt19937_64 rng{mix64(seed)};
  std::uniform_real_distribution<double> uni(-bound, bound);

  NetworkParams params;
  params.W1.resize(dim, dim);
  params.W2.resize(dim, dim);
  // Fixed row-major fill order so the layout is part of the contract.
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) params.W1(i, j) = uni(rng);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) params.W2(i, j) = uni(rng);
  params.b1 = Eigen::VectorXd::Zero(dim);
  params.b2 = Eigen::VectorXd::Zero(dim);
  return params;
}

Eigen::VectorXd forward(const NetworkParams& params, const Eigen::VectorXd& x) {
  return run_leg(params, x).output;
}

double triplet_loss(const NetworkParams& params,
                    const std::vector<TripletExample>& batch,
                    const LossConfig& config) {
  check_batch(batch, config);
  double total = 0.0;
  for (const TripletExample& t : batch) {
    Eigen::VectorXd fa = forward(params, t.anchor);
    Eigen::VectorXd fp = forward(params, t.positive);
    Eigen::VectorXd fn = forward(params, t.negative);
    double hinge = (fa - fp).squaredNorm() - (fa - fn).squaredNorm() + config.margin;
    if (hinge > 0.0) total += hinge;
  }
  return total;
}

Gradients backward(const NetworkParams& params,
                   const std::vector<TripletExample>& batch,
                   const LossConfig& config) {
  check_batch(batch, config);
  Eigen::Index d = params.dim();
  Gradients grads;
  grads.W1 = Eigen::MatrixXd::Zero(d, d);
  grads.W2 = Eigen::MatrixXd::Zero(d, d);
  grads.b1 = Eigen::VectorXd::Zero(d);
  grads.b2 = Eigen::VectorXd::Zero(d);

  for (const TripletExample& t : batch) {
    LegActivations a = run_leg(params, t.anchor);
    LegActivations p = run_leg(params, t.positive);
    LegActivations n = run_leg(params, t.negative);

    double hinge = (a.output - p.output).squaredNorm() -
                   (a.output - n.output).squaredNorm() + config.margin;
    if (hinge <= 0.0) continue;  // subgradient at the kink is 0
    grads.loss += hinge;

    backprop_leg(params, a, 2.0 * (n.output - p.output), grads);
    backprop_leg(params, p, 2.0 * (p.output - a.output), grads);
    backprop_leg(params, n, 2.0 * (a.output - n.output), grads);
  }
  return grads;
}

GradCheckReport grad_check(const NetworkParams& params,
                           const std::vector<TripletExample>& batch,
                           const LossConfig& config, double step,
                           double tolerance, std::uint64_t seed,
                           std::size_t max_coords) {
  if (!(step > 0.0)) throw DataError("grad_check: step must be > 0");

  Gradients analytic = backward(params, batch, config);
  NetworkParams probe = params;
  std::mt19937_64 rng{mix64(seed)};
  double max_rel_err = 0.0;

  auto check_tensor = [&](Eigen::Map<Eigen::VectorXd> values,
                          const Eigen::VectorXd& grad_flat) {
    std::vector<Eigen::Index> coords(static_cast<std::size_t>(values.size()));
    std::iota(coords.begin(), coords.end(), Eigen::Index{0});
    if (coords.size() > max_coords) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords);
    }
    for (Eigen::Index c : coords) {
      double saved = values[c];
      values[c] = saved + step;
      double up = triplet_loss(probe, batch, config);
      values[c] = saved - step;
      double down = triplet_loss(probe, batch, config);
      values[c] = saved;

      double numeric = (up - down) / (2.0 * step);
      double exact = grad_flat[c];
      double denom = std::max(std::abs(numeric), std::abs(exact));
      double err = denom == 0.0
                       ? 0.0
                       : std::abs(numeric - exact) / std::max(denom, 1e-6);
      max_rel_err = std::max(max_rel_err, err);
    }
  };

  Eigen::Index d = params.dim();
  check_tensor({probe.W1.data(), d * d}, Eigen::VectorXd::Map(analytic.W1.data(), d * d));
  check_tensor({probe.b1.data(), d}, analytic.b1);
  check_tensor({probe.W2.data(), d * d}, Eigen::VectorXd::Map(analytic.W2.data(), d * d));
  check_tensor({probe.b2.data(), d}, analytic.b2);

  return {max_rel_err, max_rel_err < tolerance};
}

}  // namespace tripletnet
