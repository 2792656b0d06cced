#pragma once

// Finite mixtures of von Mises regressions fitted by EM. The E-step works in
// log space throughout; the M-step reuses the weighted single-component
// updates with responsibility columns as weights. Each M-step sub-update is
// an exact (or damped ascent) maximizer of the complete-data objective, so
// the observed loglik trace never decreases.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixcirc/dataset.hpp"
#include "mixcirc/errors.hpp"
#include "mixcirc/parallel.hpp"
#include "mixcirc/regression.hpp"
#include "mixcirc/rng.hpp"

namespace mixcirc {

struct ComponentParams {
  double pi = 1.0;
  double mu = 0.0;
  double kappa = 0.0;
  Eigen::VectorXd beta;
};

struct EmOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  int max_inner = 25;
  // A component whose posterior mass falls to this fraction of n aborts the
  // run; multi-start treats that as one failed start.
  double empty_component_frac = 1e-6;
};

struct MixtureFit {
  std::vector<ComponentParams> components;
  double loglik = std::numeric_limits<double>::quiet_NaN();
  int df = 0;
  double bic = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd responsibilities;
  FitDiagnostics diagnostics;
  int restarts_used = 0;
  std::vector<double> start_logliks;

  int k() const { return static_cast<int>(components.size()); }
};

// Free parameters: k-1 mixing weights plus (mu, kappa, B) per component.
inline int mixture_df(int k, int q, int p) { return (k - 1) + k * (2 + 2 * q + p); }

inline double bic_score(double loglik, int df, int n) {
  return -2.0 * loglik + std::log(static_cast<double>(n)) * df;
}

// Canonical flat parameter order shared by simulation tables and bootstrap
// summaries: all weights, all locations, all concentrations, then the
// coefficient block of each component.
inline std::vector<std::string> parameter_names(int k, int dim) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(k * (3 + dim)));
  for (int j = 0; j < k; ++j) names.push_back("pi_" + std::to_string(j + 1));
  for (int j = 0; j < k; ++j) names.push_back("mu_" + std::to_string(j + 1));
  for (int j = 0; j < k; ++j) names.push_back("kappa_" + std::to_string(j + 1));
  for (int j = 0; j < k; ++j) {
    for (int d = 0; d < dim; ++d) {
      names.push_back("beta_" + std::to_string(j + 1) + "_" + std::to_string(d + 1));
    }
  }
  return names;
}

inline Eigen::VectorXd flatten_parameters(const std::vector<ComponentParams>& comps) {
  const int k = static_cast<int>(comps.size());
  if (k == 0) throw DomainError("flatten_parameters: no components");
  const int dim = static_cast<int>(comps[0].beta.size());
  Eigen::VectorXd out(k * (3 + dim));
  for (int j = 0; j < k; ++j) out[j] = comps[static_cast<std::size_t>(j)].pi;
  for (int j = 0; j < k; ++j) out[k + j] = comps[static_cast<std::size_t>(j)].mu;
  for (int j = 0; j < k; ++j) out[2 * k + j] = comps[static_cast<std::size_t>(j)].kappa;
  for (int j = 0; j < k; ++j) {
    out.segment(3 * k + j * dim, dim) = comps[static_cast<std::size_t>(j)].beta;
  }
  return out;
}

namespace detail {

inline void check_components(const std::vector<ComponentParams>& comps, const Dataset& data,
                             const char* fn) {
  if (comps.empty()) throw DomainError(std::string(fn) + ": no components");
  double total = 0.0;
  for (const ComponentParams& c : comps) {
    if (!(c.pi > 0.0) || !std::isfinite(c.pi)) {
      throw DomainError(std::string(fn) + ": mixing weights must be positive and finite");
    }
    if (c.beta.size() != data.dim()) {
      throw DomainError(std::string(fn) + ": coefficient length does not match the design width");
    }
    total += c.pi;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw DomainError(std::string(fn) + ": mixing weights sum to " + std::to_string(total) +
                      ", expected 1");
  }
}

}  // namespace detail

struct EStepResult {
  Eigen::MatrixXd gamma;
  Eigen::VectorXd row_loglik;
  double loglik = 0.0;
};

// Responsibilities and the observed loglik at the given parameters, computed
// rowwise as a log-sum-exp so extreme concentrations cannot overflow.
inline EStepResult e_step(const Dataset& data, const std::vector<ComponentParams>& comps) {
  detail::check_components(comps, data, "e_step");
  const int n = data.n();
  const int k = static_cast<int>(comps.size());
  if (n == 0) throw DomainError("e_step: empty dataset");

  Eigen::MatrixXd log_weighted(n, k);
  for (int j = 0; j < k; ++j) {
    const ComponentParams& c = comps[static_cast<std::size_t>(j)];
    log_weighted.col(j) =
        loglik_terms(CircRegParams{c.mu, c.kappa, c.beta}, data, std::log(c.pi));
  }

  EStepResult out;
  const Eigen::VectorXd row_max = log_weighted.rowwise().maxCoeff();
  out.row_loglik =
      row_max.array() +
      (log_weighted.colwise() - row_max).array().exp().rowwise().sum().log();
  out.gamma = (log_weighted.colwise() - out.row_loglik).array().exp();
  out.loglik = out.row_loglik.sum();
  return out;
}

// Mixing-weight update, normalized by the actual responsibility total so the
// weights sum to one to machine precision.
inline Eigen::VectorXd m_step_pi(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() == 0 || gamma.cols() == 0) throw DomainError("m_step_pi: empty responsibilities");
  const Eigen::VectorXd mass = gamma.colwise().sum();
  const double total = mass.sum();
  if (!(total > 0.0)) throw DomainError("m_step_pi: responsibilities sum to zero");
  return mass / total;
}

// One full EM run from an explicit start. Throws EmptyComponentError or
// DegenerateDirectionError when a component collapses; multi_start_fit turns
// those into failed starts.
inline MixtureFit em_fit(const Dataset& data, std::vector<ComponentParams> comps,
                         const EmOptions& options = {}) {
  detail::check_components(comps, data, "em_fit");
  const int n = data.n();
  const int k = static_cast<int>(comps.size());
  if (n <= k * (data.dim() + 2)) {
    throw DomainError("em_fit: need more than k*(dim+2) = " +
                      std::to_string(k * (data.dim() + 2)) + " observations, got " +
                      std::to_string(n));
  }
  check_design(data);
  {
    double total = 0.0;
    for (const ComponentParams& c : comps) total += c.pi;
    for (ComponentParams& c : comps) c.pi /= total;
  }

  MixtureFit fit;
  FitDiagnostics& diag = fit.diagnostics;
  Eigen::MatrixXd gamma;
  double loglik = std::numeric_limits<double>::quiet_NaN();
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    EStepResult es = e_step(data, comps);
    diag.loglik_trace.push_back(es.loglik);
    gamma = std::move(es.gamma);
    loglik = es.loglik;
    if (iter > 0 && detail::rel_converged(loglik, prev, options.tol)) {
      diag.converged = true;
      break;
    }
    prev = loglik;

    const Eigen::VectorXd mass = gamma.colwise().sum();
    for (int j = 0; j < k; ++j) {
      if (mass[j] <= options.empty_component_frac * n) {
        throw EmptyComponentError(
            j, "em_fit: component " + std::to_string(j + 1) + " holds posterior mass " +
                   std::to_string(mass[j]) + " of " + std::to_string(n) + " observations");
      }
    }
    const Eigen::VectorXd pi = mass / mass.sum();

    bool any_capped = false;
    for (int j = 0; j < k; ++j) {
      ComponentParams& c = comps[static_cast<std::size_t>(j)];
      c.pi = pi[j];
      const auto w = gamma.col(j);
      c.mu = update_mu(w, c.beta, data);
      const ConcentrationEstimate est = update_kappa(w, c.mu, c.beta, data);
      c.kappa = est.kappa;
      any_capped = any_capped || est.capped;

      CircRegParams single{c.mu, c.kappa, c.beta};
      const NewtonRun run = maximize_beta(w, single, data, options.max_inner);
      c.beta = std::move(single.beta);
      diag.flags.hessian_regularized = diag.flags.hessian_regularized || run.regularized;
      diag.flags.step_halved = diag.flags.step_halved || run.halved;
    }
    diag.flags.kappa_capped = any_capped;
  }

  if (!diag.converged) {
    EStepResult es = e_step(data, comps);
    diag.loglik_trace.push_back(es.loglik);
    gamma = std::move(es.gamma);
    loglik = es.loglik;
  }

  diag.iterations = static_cast<int>(diag.loglik_trace.size()) - 1;
  diag.final_loglik = loglik;

  fit.components = std::move(comps);
  fit.loglik = loglik;
  fit.df = mixture_df(k, data.q(), data.p());
  fit.bic = bic_score(loglik, fit.df, n);
  fit.responsibilities = std::move(gamma);
  return fit;
}

// Random EM start. Draw order is fixed: one Dirichlet(5) weight vector,
// then per component a location on [0, 2*pi), a concentration on [1, 10],
// and the coefficients on [-1/2, 1/2] entrywise.
inline std::vector<ComponentParams> random_init(int k, int q, int p, Rng& rng) {
  if (k < 1) throw DomainError("random_init: k must be at least 1");
  const std::vector<double> pi = rdirichlet(rng, 5.0, k);
  std::vector<ComponentParams> comps(static_cast<std::size_t>(k));
  const int dim = 2 * q + p;
  for (int j = 0; j < k; ++j) {
    ComponentParams& c = comps[static_cast<std::size_t>(j)];
    c.pi = pi[static_cast<std::size_t>(j)];
    c.mu = runif(rng, 0.0, kTwoPi);
    c.kappa = runif(rng, 1.0, 10.0);
    c.beta.resize(dim);
    for (int d = 0; d < dim; ++d) c.beta[d] = runif(rng, -0.5, 0.5);
  }
  return comps;
}

// Best-of-restarts EM. Start s draws its init from derive_seed(seed, s), so
// results do not depend on the thread count; an optional warm start runs as
// one extra start after the random ones. Ties in the final loglik resolve to
// the lowest start index. Throws FittingFailedError with one cause per start
// when every start fails.
inline MixtureFit multi_start_fit(const Dataset& data, int k, int restarts, std::uint64_t seed,
                                  const EmOptions& options = {},
                                  const std::vector<ComponentParams>* warm_start = nullptr,
                                  int threads = 1) {
  if (k < 1) throw DomainError("multi_start_fit: k must be at least 1");
  const int total = restarts + (warm_start != nullptr ? 1 : 0);
  if (total < 1) throw DomainError("multi_start_fit: needs at least one start");

  std::vector<std::optional<MixtureFit>> fits(static_cast<std::size_t>(total));
  std::vector<std::string> notes(static_cast<std::size_t>(total));
  parallel_for(total, threads, [&](int s) {
    try {
      std::vector<ComponentParams> init;
      if (s < restarts) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        init = random_init(k, data.q(), data.p(), rng);
      } else {
        init = *warm_start;
      }
      fits[static_cast<std::size_t>(s)] = em_fit(data, std::move(init), options);
    } catch (const Error& e) {
      notes[static_cast<std::size_t>(s)] = std::string(e.kind()) + ": " + e.what();
    }
  });

  int best = -1;
  std::vector<double> start_logliks(static_cast<std::size_t>(total),
                                    std::numeric_limits<double>::quiet_NaN());
  for (int s = 0; s < total; ++s) {
    if (!fits[static_cast<std::size_t>(s)]) continue;
    start_logliks[static_cast<std::size_t>(s)] = fits[static_cast<std::size_t>(s)]->loglik;
    if (best < 0 || fits[static_cast<std::size_t>(s)]->loglik > fits[static_cast<std::size_t>(best)]->loglik) {
      best = s;
    }
  }
  if (best < 0) {
    throw FittingFailedError(
        "multi_start_fit: all " + std::to_string(total) + " starts failed", std::move(notes));
  }
  MixtureFit fit = std::move(*fits[static_cast<std::size_t>(best)]);
  fit.restarts_used = restarts;
  fit.start_logliks = std::move(start_logliks);
  return fit;
}

struct BicRow {
  int k = 0;
  bool ok = false;
  double loglik = std::numeric_limits<double>::quiet_NaN();
  int df = 0;
  double bic = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct BicScanResult {
  std::vector<BicRow> rows;
  int selected_k = 0;
  MixtureFit best;
};

// Fit k = 1..k_max, each by multi-start seeded from derive_seed(seed, k),
// and select the smallest BIC among the fits that succeeded.
inline BicScanResult bic_scan(const Dataset& data, int k_max, int restarts, std::uint64_t seed,
                              const EmOptions& options = {}, int threads = 1) {
  if (k_max < 1) throw DomainError("bic_scan: k_max must be at least 1");
  BicScanResult out;
  std::vector<MixtureFit> fits(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    BicRow row;
    row.k = k;
    try {
      MixtureFit fit = multi_start_fit(data, k, restarts, derive_seed(seed, static_cast<std::uint64_t>(k)),
                                       options, nullptr, threads);
      row.ok = true;
      row.loglik = fit.loglik;
      row.df = fit.df;
      row.bic = fit.bic;
      fits[static_cast<std::size_t>(k - 1)] = std::move(fit);
    } catch (const Error& e) {
      row.note = std::string(e.kind()) + ": " + e.what();
    }
    out.rows.push_back(std::move(row));
  }
  int best_k = 0;
  for (const BicRow& row : out.rows) {
    if (!row.ok) continue;
    if (best_k == 0 || row.bic < out.rows[static_cast<std::size_t>(best_k - 1)].bic) best_k = row.k;
  }
  if (best_k == 0) throw FittingFailedError("bic_scan: no k produced a successful fit", {});
  out.selected_k = best_k;
  out.best = std::move(fits[static_cast<std::size_t>(best_k - 1)]);
  return out;
}

// MAP labels (0-based component indices); posterior ties resolve to the
// lowest index.
inline std::vector<int> map_cluster(const Eigen::MatrixXd& gamma) {
  std::vector<int> labels(static_cast<std::size_t>(gamma.rows()));
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    int arg = 0;
    double best = gamma(i, 0);
    for (Eigen::Index j = 1; j < gamma.cols(); ++j) {
      if (gamma(i, j) > best) {
        best = gamma(i, j);
        arg = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return labels;
}

}  // namespace mixcirc
