#pragma once

#include <Eigen/Core>

namespace ecoplex::stats {

double mean(const Eigen::VectorXd& x);

// Population standard deviation (divide by N).
double stddev(const Eigen::VectorXd& x);

// Pearson correlation; returns 0 when either side has zero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Spearman rank correlation with average ranks for ties.
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Average ranks (1-based, ties share the mean rank).
Eigen::VectorXd ranks(const Eigen::VectorXd& x);

}  // namespace ecoplex::stats
