#pragma once

// Parametric bootstrap inference for a fitted mixture: covariates stay
// fixed, responses are redrawn from the fitted model, each replicate is
// refitted and matched back to the original components, and the spread of
// the matched parameters yields standard errors and percentile intervals.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mixcirc/circular.hpp"
#include "mixcirc/dataset.hpp"
#include "mixcirc/errors.hpp"
#include "mixcirc/eval.hpp"
#include "mixcirc/mixture.hpp"
#include "mixcirc/parallel.hpp"
#include "mixcirc/rng.hpp"

namespace mixcirc {

struct BootstrapOptions {
  // Restart policy for replicate refits: this many random starts plus the
  // original fit as a warm start.
  int restarts = 10;
  EmOptions em;
  // Above this failure fraction the summaries are not reported at all.
  double max_failure_frac = 0.20;
  int threads = 1;
};

struct BootstrapResult {
  std::vector<std::string> parameter;
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  Eigen::VectorXd ci_lower;
  Eigen::VectorXd ci_upper;
  // Raw matched replicate draws, one row per successful replicate.
  Eigen::MatrixXd replicates;
  int requested = 0;
  int failed = 0;
  int capped_replicates = 0;
  std::vector<std::string> failure_notes;
};

namespace detail {

// Linear interpolation quantile on sorted values (the common "type 7" rule).
inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
  const std::size_t m = sorted.size();
  const double h = (static_cast<double>(m) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= m) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

// Per-row response draw from a fitted mixture at the dataset's covariates.
inline Eigen::VectorXd sample_responses(const std::vector<ComponentParams>& comps,
                                        const Eigen::MatrixXd& centers, Rng& rng) {
  const int n = static_cast<int>(centers.rows());
  const int k = static_cast<int>(comps.size());
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) {
    const double u = runif(rng);
    int label = k - 1;
    double cum = 0.0;
    for (int j = 0; j < k; ++j) {
      cum += comps[static_cast<std::size_t>(j)].pi;
      if (u < cum) {
        label = j;
        break;
      }
    }
    theta[i] = vm_sample(centers(i, label), comps[static_cast<std::size_t>(label)].kappa, rng);
  }
  return theta;
}

// B parametric-bootstrap replicates. Replicate i derives a response stream
// and a refit stream from derive_seed(seed, i); refits warm start at the
// original estimate next to the random starts. Location parameters are
// recentered into (mu_hat - pi, mu_hat + pi] before their spread is
// summarized, and the interval endpoints are wrapped back onto [0, 2*pi).
inline BootstrapResult parametric_bootstrap(const MixtureFit& fit, const Dataset& data, int b,
                                            std::uint64_t seed,
                                            const BootstrapOptions& options = {}) {
  if (b < 2) throw DomainError("parametric_bootstrap: need at least 2 replicates");
  if (fit.k() < 1) throw DomainError("parametric_bootstrap: fit has no components");
  if (!fit.diagnostics.converged) {
    throw DomainError("parametric_bootstrap: the fit did not converge, refusing to resample it");
  }
  detail::check_components(fit.components, data, "parametric_bootstrap");

  const int k = fit.k();
  const int dim = data.dim();
  const int width = k * (3 + dim);

  // Fitted mean directions per row and component, computed once; replicates
  // only redraw responses.
  Eigen::MatrixXd centers(data.n(), k);
  for (int j = 0; j < k; ++j) {
    const ComponentParams& c = fit.components[static_cast<std::size_t>(j)];
    const Eigen::VectorXd t = data.design() * c.beta;
    centers.col(j) = c.mu + 2.0 * t.array().atan();
  }

  Eigen::MatrixXd draws(b, width);
  std::vector<char> ok(static_cast<std::size_t>(b), 0);
  std::vector<std::string> notes(static_cast<std::size_t>(b));
  std::vector<char> capped(static_cast<std::size_t>(b), 0);

  parallel_for(b, options.threads, [&](int i) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    try {
      Rng rng = make_rng(derive_seed(rep_seed, 0));
      const Eigen::VectorXd theta = sample_responses(fit.components, centers, rng);
      const Dataset boot = data.with_theta(theta);
      const MixtureFit refit = multi_start_fit(boot, k, options.restarts, derive_seed(rep_seed, 1),
                                               options.em, &fit.components);
      const ComponentMatching matching = match_components(refit.components, fit.components);
      const std::vector<ComponentParams> aligned = apply_matching(refit.components, matching);
      draws.row(i) = flatten_parameters(aligned);
      capped[static_cast<std::size_t>(i)] = refit.diagnostics.flags.kappa_capped ? 1 : 0;
      ok[static_cast<std::size_t>(i)] = 1;
    } catch (const Error& e) {
      notes[static_cast<std::size_t>(i)] = std::string(e.kind()) + ": " + e.what();
    }
  });

  BootstrapResult out;
  out.requested = b;
  out.parameter = parameter_names(k, dim);
  out.estimate = flatten_parameters(fit.components);

  std::vector<int> kept;
  for (int i = 0; i < b; ++i) {
    if (ok[static_cast<std::size_t>(i)]) {
      kept.push_back(i);
      out.capped_replicates += capped[static_cast<std::size_t>(i)];
    } else {
      out.failed += 1;
      out.failure_notes.push_back("replicate " + std::to_string(i) + ": " +
                                  notes[static_cast<std::size_t>(i)]);
    }
  }
  if (out.failed > options.max_failure_frac * b) {
    std::map<std::string, int> tally;
    for (const std::string& note : out.failure_notes) {
      const std::string cause = note.substr(note.find(": ") + 2);
      tally[cause] += 1;
    }
    std::string detail_msg;
    for (const auto& [cause, count] : tally) {
      detail_msg += "\n  " + std::to_string(count) + "x " + cause;
    }
    throw BootstrapUnreliableError(
        "parametric_bootstrap: " + std::to_string(out.failed) + " of " + std::to_string(b) +
        " replicates failed (limit " +
        std::to_string(static_cast<int>(options.max_failure_frac * 100)) + "%); causes:" +
        detail_msg);
  }
  if (kept.size() < 2) {
    throw BootstrapUnreliableError("parametric_bootstrap: fewer than 2 usable replicates");
  }

  out.replicates.resize(static_cast<Eigen::Index>(kept.size()), width);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    out.replicates.row(static_cast<Eigen::Index>(r)) = draws.row(kept[r]);
  }

  out.se.resize(width);
  out.ci_lower.resize(width);
  out.ci_upper.resize(width);
  const double m = static_cast<double>(kept.size());
  for (int jcol = 0; jcol < width; ++jcol) {
    const bool is_mu = jcol >= k && jcol < 2 * k;
    std::vector<double> values(kept.size());
    for (std::size_t r = 0; r < kept.size(); ++r) {
      double v = out.replicates(static_cast<Eigen::Index>(r), jcol);
      if (is_mu) v = out.estimate[jcol] + wrap_signed(v - out.estimate[jcol]);
      values[r] = v;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= m;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.se[jcol] = std::sqrt(ss / (m - 1.0));

    std::sort(values.begin(), values.end());
    double lo = detail::sorted_quantile(values, 0.025);
    double hi = detail::sorted_quantile(values, 0.975);
    if (is_mu) {
      lo = wrap_angle(lo);
      hi = wrap_angle(hi);
    }
    out.ci_lower[jcol] = lo;
    out.ci_upper[jcol] = hi;
  }
  return out;
}

}  // namespace mixcirc
