#pragma once

// Estimate quality: component matching against a reference, RMSE tables with
// wrapped location errors, classification error and adjusted Rand index for
// hard labels, and circular correlation measures.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mixcirc/circular.hpp"
#include "mixcirc/errors.hpp"
#include "mixcirc/mixture.hpp"

namespace mixcirc {

struct ComponentMatching {
  // permutation[j] is the estimated component assigned to reference j.
  std::vector<int> permutation;
  double cost = 0.0;
};

// Exhaustive assignment of estimated components to reference components,
// minimizing the summed wrapped location distance plus weight distance.
// Ties resolve to the lexicographically smallest permutation.
inline ComponentMatching match_components(const std::vector<ComponentParams>& estimated,
                                          const std::vector<ComponentParams>& reference) {
  const int k = static_cast<int>(reference.size());
  if (static_cast<int>(estimated.size()) != k || k == 0) {
    throw DomainError("match_components: component counts differ or are zero");
  }
  if (k > 8) throw DomainError("match_components: exhaustive matching supports at most 8 components");

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  ComponentMatching best;
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int j = 0; j < k; ++j) {
      const ComponentParams& e = estimated[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
      const ComponentParams& r = reference[static_cast<std::size_t>(j)];
      cost += angle_distance(e.mu, r.mu) + std::abs(e.pi - r.pi);
    }
    if (cost < best.cost) {
      best.cost = cost;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::vector<ComponentParams> apply_matching(const std::vector<ComponentParams>& estimated,
                                                   const ComponentMatching& matching) {
  std::vector<ComponentParams> out;
  out.reserve(matching.permutation.size());
  for (int idx : matching.permutation) {
    if (idx < 0 || idx >= static_cast<int>(estimated.size())) {
      throw DomainError("apply_matching: permutation index out of range");
    }
    out.push_back(estimated[static_cast<std::size_t>(idx)]);
  }
  return out;
}

// Signed estimation errors in the canonical flat order; location errors are
// wrapped into (-pi, pi] so that estimates across the 0/2*pi seam do not
// register as large.
inline Eigen::VectorXd parameter_errors(const std::vector<ComponentParams>& aligned,
                                        const std::vector<ComponentParams>& reference) {
  const int k = static_cast<int>(reference.size());
  if (static_cast<int>(aligned.size()) != k || k == 0) {
    throw DomainError("parameter_errors: component counts differ or are zero");
  }
  Eigen::VectorXd err = flatten_parameters(aligned) - flatten_parameters(reference);
  for (int j = 0; j < k; ++j) {
    err[k + j] = wrap_signed(aligned[static_cast<std::size_t>(j)].mu -
                             reference[static_cast<std::size_t>(j)].mu);
  }
  return err;
}

struct RmseTable {
  std::vector<std::string> parameter;
  Eigen::VectorXd rmse;
};

// Root mean squared error over replicate error vectors (all equal length,
// produced by parameter_errors).
inline RmseTable rmse_table(const std::vector<Eigen::VectorXd>& errors, int k, int dim) {
  if (errors.empty()) throw DomainError("rmse_table: no replicates");
  RmseTable out;
  out.parameter = parameter_names(k, dim);
  const Eigen::Index width = static_cast<Eigen::Index>(out.parameter.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(width);
  for (const Eigen::VectorXd& e : errors) {
    if (e.size() != width) throw DomainError("rmse_table: replicate length mismatch");
    acc += e.cwiseAbs2();
  }
  out.rmse = (acc / static_cast<double>(errors.size())).cwiseSqrt();
  return out;
}

namespace detail {

// Remap arbitrary integer labels to 0..k-1 in order of first appearance.
inline std::vector<int> dense_labels(const std::vector<int>& labels, int& k_out) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  k_out = static_cast<int>(remap.size());
  return out;
}

inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, ins1] = ab.try_emplace(a[i], b[i]);
    if (it1->second != b[i]) return false;
    auto [it2, ins2] = ba.try_emplace(b[i], a[i]);
    if (it2->second != a[i]) return false;
  }
  return true;
}

}  // namespace detail

// Smallest misclassification rate over all ways of relabeling `predicted`
// onto `reference`.
inline double class_error(const std::vector<int>& predicted, const std::vector<int>& reference) {
  if (predicted.size() != reference.size() || predicted.empty()) {
    throw DomainError("class_error: label vectors must be nonempty and the same length");
  }
  int ka = 0, kb = 0;
  const std::vector<int> a = detail::dense_labels(predicted, ka);
  const std::vector<int> b = detail::dense_labels(reference, kb);
  const int k = std::max(ka, kb);
  if (k > 8) throw DomainError("class_error: exhaustive relabeling supports at most 8 labels");

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = predicted.size() + 1;
  do {
    std::size_t mism = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (perm[static_cast<std::size_t>(a[i])] != b[i]) ++mism;
    }
    best = std::min(best, mism);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(predicted.size());
}

// Hubert-Arabie adjusted Rand index. When the adjustment denominator
// vanishes (both partitions trivial in the same way), identical partitions
// score 1 and anything else 0.
inline double adjusted_rand_index(const std::vector<int>& a_in, const std::vector<int>& b_in) {
  if (a_in.size() != b_in.size() || a_in.empty()) {
    throw DomainError("adjusted_rand_index: label vectors must be nonempty and the same length");
  }
  int ka = 0, kb = 0;
  const std::vector<int> a = detail::dense_labels(a_in, ka);
  const std::vector<int> b = detail::dense_labels(b_in, kb);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) table(a[i], b[i]) += 1.0;

  const auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
  double sum_cells = 0.0;
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < kb; ++j) sum_cells += choose2(table(i, j));
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (int i = 0; i < ka; ++i) sum_rows += choose2(table.row(i).sum());
  for (int j = 0; j < kb; ++j) sum_cols += choose2(table.col(j).sum());
  const double pairs = choose2(static_cast<double>(a.size()));
  const double expected = sum_rows * sum_cols / pairs;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  const double denom = maximum - expected;
  if (std::abs(denom) < 1e-12) return detail::same_partition(a, b) ? 1.0 : 0.0;
  return (sum_cells - expected) / denom;
}

// Pearson correlation; throws when either variance vanishes.
inline double pearson_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("pearson_correlation: need two equal-length samples of size >= 2");
  }
  const Eigen::ArrayXd xc = x.array() - x.mean();
  const Eigen::ArrayXd yc = y.array() - y.mean();
  const double denom = std::sqrt(xc.square().sum() * yc.square().sum());
  if (!(denom > 0.0)) throw DegeneracyError("pearson_correlation: zero variance");
  return (xc * yc).sum() / denom;
}

// Circular-circular correlation from the sine residuals about each sample's
// mean direction.
inline double circ_circ_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DomainError("circ_circ_correlation: need two equal-length samples of size >= 2");
  }
  const double abar = std::atan2(a.array().sin().sum(), a.array().cos().sum());
  const double bbar = std::atan2(b.array().sin().sum(), b.array().cos().sum());
  const Eigen::ArrayXd sa = (a.array() - abar).sin();
  const Eigen::ArrayXd sb = (b.array() - bbar).sin();
  const double denom = std::sqrt(sa.square().sum() * sb.square().sum());
  if (!(denom > 0.0)) {
    throw DegeneracyError("circ_circ_correlation: zero sine residuals, correlation undefined");
  }
  return (sa * sb).sum() / denom;
}

// Circular-linear association: the multiple correlation of x with
// (cos theta, sin theta), reported as the nonnegative square root of R^2.
inline double circ_linear_correlation(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
  if (theta.size() != x.size() || theta.size() < 3) {
    throw DomainError("circ_linear_correlation: need two equal-length samples of size >= 3");
  }
  const Eigen::VectorXd c = theta.array().cos();
  const Eigen::VectorXd s = theta.array().sin();
  const double rxc = pearson_correlation(x, c);
  const double rxs = pearson_correlation(x, s);
  const double rcs = pearson_correlation(c, s);
  const double denom = 1.0 - rcs * rcs;
  if (!(denom > 1e-12)) {
    throw DegeneracyError("circ_linear_correlation: cos and sin of the angles are collinear");
  }
  double r2 = (rxc * rxc + rxs * rxs - 2.0 * rxc * rxs * rcs) / denom;
  r2 = std::min(1.0, std::max(0.0, r2));
  return std::sqrt(r2);
}

struct CorrelationInput {
  std::string name;
  Eigen::VectorXd values;
  bool circular = false;
};

// Symmetric association matrix over a mixed set of circular and linear
// variables, dispatching to the appropriate pairwise measure.
inline Eigen::MatrixXd correlation_matrix(const std::vector<CorrelationInput>& cols) {
  const int m = static_cast<int>(cols.size());
  if (m == 0) throw DomainError("correlation_matrix: no variables");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const CorrelationInput& a = cols[static_cast<std::size_t>(i)];
      const CorrelationInput& b = cols[static_cast<std::size_t>(j)];
      double r = 0.0;
      if (a.circular && b.circular) {
        r = circ_circ_correlation(a.values, b.values);
      } else if (!a.circular && !b.circular) {
        r = pearson_correlation(a.values, b.values);
      } else if (a.circular) {
        r = circ_linear_correlation(a.values, b.values);
      } else {
        r = circ_linear_correlation(b.values, a.values);
      }
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  return out;
}

}  // namespace mixcirc
