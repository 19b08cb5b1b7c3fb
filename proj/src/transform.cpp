#include "tripletnet/transform.hpp"

#include <cmath>

#include "tripletnet/errors.hpp"

namespace tripletnet {

namespace {

// Two-pass mean/variance; the second pass works on centered values.
template <typename RowFn>
ZScoreStats fit_impl(Eigen::Index dim, std::size_t n, RowFn for_each_row) {
  if (n == 0) throw DataError("fit_zscore: empty input");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for_each_row([&](const Eigen::VectorXd& v) { mean += v; });
  mean /= static_cast<double>(n);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for_each_row([&](const Eigen::VectorXd& v) {
    var += (v - mean).cwiseAbs2();
  });
  var /= static_cast<double>(n);  // population variance

  return {std::move(mean), var.cwiseSqrt()};
}

}  // namespace

ZScoreStats fit_zscore(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) throw DataError("fit_zscore: empty input");
  Eigen::Index dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw DataError("fit_zscore: inconsistent dimensions");
  }
  return fit_impl(dim, rows.size(), [&](auto&& f) {
    for (const auto& r : rows) f(r);
  });
}

ZScoreStats fit_zscore_train(const Corpus& corpus) {
  auto train = corpus.indices_in(Split::Train);
  if (train.empty()) throw DataError("fit_zscore_train: corpus has no Train records");
  return fit_impl(corpus.dim, train.size(), [&](auto&& f) {
    for (std::size_t i : train) f(corpus.records[i].features);
  });
}

std::vector<Eigen::Index> ZScoreStats::zero_std_dims() const {
  std::vector<Eigen::Index> dims;
  for (Eigen::Index i = 0; i < stddev.size(); ++i) {
    if (stddev[i] == 0.0) dims.push_back(i);
  }
  return dims;
}

Eigen::VectorXd apply_zscore(const ZScoreStats& stats, const Eigen::VectorXd& v) {
  if (v.size() != stats.mean.size()) {
    throw DataError("apply_zscore: dimension mismatch");
  }
  Eigen::VectorXd out = v - stats.mean;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (stats.stddev[i] > 0.0) out[i] /= stats.stddev[i];
  }
  return out;
}

double l2_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw DataError("l2_distance: dimension mismatch");
  return (u - v).norm();
}

}  // namespace tripletnet
