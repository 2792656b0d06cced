#pragma once

// A regression sample: circular responses on [0, 2*pi), the raw covariates,
// and the expanded design where every circular covariate contributes a
// (cos, sin) column pair ahead of the linear columns.

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mixcirc/circular.hpp"
#include "mixcirc/errors.hpp"

namespace mixcirc {

class Dataset {
 public:
  Dataset() = default;

  Dataset(Eigen::VectorXd theta, Eigen::MatrixXd circular_cov, Eigen::MatrixXd linear_cov,
          std::vector<std::string> circular_names = {}, std::vector<std::string> linear_names = {})
      : theta_(std::move(theta)),
        circular_cov_(std::move(circular_cov)),
        linear_cov_(std::move(linear_cov)),
        circular_names_(std::move(circular_names)),
        linear_names_(std::move(linear_names)) {
    const Eigen::Index n = theta_.size();
    if (circular_cov_.size() == 0) circular_cov_.resize(n, 0);
    if (linear_cov_.size() == 0) linear_cov_.resize(n, 0);
    if (circular_cov_.rows() != n || linear_cov_.rows() != n) {
      throw DomainError("Dataset: covariate row counts do not match the response length");
    }
    for (Eigen::Index i = 0; i < n; ++i) theta_[i] = wrap_angle(theta_[i]);
    if (!circular_cov_.allFinite() || !linear_cov_.allFinite()) {
      throw DomainError("Dataset: covariates must be finite");
    }
    if (circular_names_.empty()) {
      for (Eigen::Index j = 0; j < circular_cov_.cols(); ++j) {
        circular_names_.push_back("c" + std::to_string(j + 1));
      }
    }
    if (linear_names_.empty()) {
      for (Eigen::Index j = 0; j < linear_cov_.cols(); ++j) {
        linear_names_.push_back("x" + std::to_string(j + 1));
      }
    }
    if (static_cast<Eigen::Index>(circular_names_.size()) != circular_cov_.cols() ||
        static_cast<Eigen::Index>(linear_names_.size()) != linear_cov_.cols()) {
      throw DomainError("Dataset: covariate name counts do not match the covariate columns");
    }
    build_design();
  }

  int n() const { return static_cast<int>(theta_.size()); }
  int q() const { return static_cast<int>(circular_cov_.cols()); }
  int p() const { return static_cast<int>(linear_cov_.cols()); }
  int dim() const { return 2 * q() + p(); }

  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::MatrixXd& circular_cov() const { return circular_cov_; }
  const Eigen::MatrixXd& linear_cov() const { return linear_cov_; }
  const std::vector<std::string>& circular_names() const { return circular_names_; }
  const std::vector<std::string>& linear_names() const { return linear_names_; }

  std::string design_column_name(int j) const {
    if (j < 0 || j >= dim()) throw DomainError("design_column_name: column out of range");
    if (j < 2 * q()) {
      const std::string& base = circular_names_[static_cast<std::size_t>(j / 2)];
      return (j % 2 == 0 ? "cos(" : "sin(") + base + ")";
    }
    return linear_names_[static_cast<std::size_t>(j - 2 * q())];
  }

  // Same covariates, new responses. Keeps the already expanded design, which
  // matters when thousands of bootstrap replicates share one covariate set.
  Dataset with_theta(Eigen::VectorXd theta) const {
    if (theta.size() != theta_.size()) {
      throw DomainError("with_theta: response length does not match the dataset");
    }
    Dataset out(*this);
    out.theta_ = std::move(theta);
    for (Eigen::Index i = 0; i < out.theta_.size(); ++i) {
      out.theta_[i] = wrap_angle(out.theta_[i]);
    }
    return out;
  }

  // Responses rotated by delta, covariates untouched.
  Dataset rotated(double delta) const {
    Eigen::VectorXd t = theta_;
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = wrap_angle(t[i] + delta);
    return with_theta(std::move(t));
  }

  // Rows reordered by `order` (a permutation of 0..n-1).
  Dataset permuted(const std::vector<int>& order) const {
    if (static_cast<int>(order.size()) != n()) {
      throw DomainError("permuted: order length does not match the dataset");
    }
    Eigen::VectorXd t(theta_.size());
    Eigen::MatrixXd c(circular_cov_.rows(), circular_cov_.cols());
    Eigen::MatrixXd l(linear_cov_.rows(), linear_cov_.cols());
    std::vector<char> seen(order.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int src = order[i];
      if (src < 0 || src >= n() || seen[static_cast<std::size_t>(src)]) {
        throw DomainError("permuted: order is not a permutation of the row indices");
      }
      seen[static_cast<std::size_t>(src)] = 1;
      t[static_cast<Eigen::Index>(i)] = theta_[src];
      c.row(static_cast<Eigen::Index>(i)) = circular_cov_.row(src);
      l.row(static_cast<Eigen::Index>(i)) = linear_cov_.row(src);
    }
    return Dataset(std::move(t), std::move(c), std::move(l), circular_names_, linear_names_);
  }

 private:
  void build_design() {
    const Eigen::Index n = theta_.size();
    design_.resize(n, 2 * circular_cov_.cols() + linear_cov_.cols());
    for (Eigen::Index j = 0; j < circular_cov_.cols(); ++j) {
      design_.col(2 * j) = circular_cov_.col(j).array().cos();
      design_.col(2 * j + 1) = circular_cov_.col(j).array().sin();
    }
    design_.rightCols(linear_cov_.cols()) = linear_cov_;
  }

  Eigen::VectorXd theta_;
  Eigen::MatrixXd circular_cov_;
  Eigen::MatrixXd linear_cov_;
  Eigen::MatrixXd design_;
  std::vector<std::string> circular_names_;
  std::vector<std::string> linear_names_;
};

}  // namespace mixcirc
