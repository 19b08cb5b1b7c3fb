#pragma once

#include <Eigen/Core>

#include <vector>

#include "tripletnet/dataset.hpp"

namespace tripletnet {

// Per-dimension mean and population standard deviation.
struct ZScoreStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  std::vector<Eigen::Index> zero_std_dims() const;
};

ZScoreStats fit_zscore(const std::vector<Eigen::VectorXd>& rows);

// Streams over the corpus's Train records without copying features.
ZScoreStats fit_zscore_train(const Corpus& corpus);

// Constant dimensions (std == 0) are centered but not divided.
Eigen::VectorXd apply_zscore(const ZScoreStats& stats, const Eigen::VectorXd& v);

double l2_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace tripletnet
