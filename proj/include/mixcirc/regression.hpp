#pragma once

// Single-component von Mises regression with circular and linear covariates:
// theta_i ~ VM(mu + g(x_i' B), kappa), g(t) = 2*atan(t).
//
// Everything is written against a weight vector. The plain fit passes unit
// weights, the mixture M-step passes a responsibility column; both therefore
// run the exact same arithmetic, which is what makes the one-component
// mixture reduce to this fit bit for bit.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mixcirc/bessel.hpp"
#include "mixcirc/circular.hpp"
#include "mixcirc/dataset.hpp"
#include "mixcirc/errors.hpp"

namespace mixcirc {

struct CircRegParams {
  double mu = 0.0;
  double kappa = 0.0;
  Eigen::VectorXd beta;
};

struct FitFlags {
  bool kappa_capped = false;
  bool hessian_regularized = false;
  bool step_halved = false;
};

struct FitDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_loglik = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> loglik_trace;
  FitFlags flags;
};

struct FitOptions {
  double tol = 1e-8;
  int max_outer = 500;
  int max_inner = 25;
};

// The model has no intercept: mu is the location and a constant design
// column would alias it through the link. Rank deficiency is reported with
// the offending column names.
inline void check_design(const Dataset& data) {
  if (data.n() == 0) throw DomainError("check_design: empty dataset");
  const Eigen::MatrixXd& X = data.design();
  for (int j = 0; j < data.dim(); ++j) {
    const double span = X.col(j).maxCoeff() - X.col(j).minCoeff();
    const double scale = X.col(j).cwiseAbs().maxCoeff();
    if (span <= 1e-12 * std::max(1.0, scale)) {
      throw DesignError("design column '" + data.design_column_name(j) +
                        "' is constant; the model has no intercept and the location "
                        "parameter already plays that role");
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const int rank = static_cast<int>(qr.rank());
  if (rank < data.dim()) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (int j = rank; j < data.dim(); ++j) {
      if (!cols.empty()) cols += ", ";
      cols += "'" + data.design_column_name(perm[j]) + "'";
    }
    throw DesignError("design matrix is rank deficient (rank " + std::to_string(rank) + " of " +
                      std::to_string(data.dim()) + "); dependent columns: " + cols);
  }
}

namespace detail {

// Per-row quantities for a fixed coefficient vector. resid_sin/resid_cos
// hold sin/cos of (theta - g(t)) without the location, so rotating in a
// candidate mu later is plain arithmetic instead of new transcendentals.
struct LinkState {
  Eigen::VectorXd t;
  Eigen::VectorXd link;
  Eigen::VectorXd resid_sin;
  Eigen::VectorXd resid_cos;

  static LinkState make(const Dataset& data, const Eigen::VectorXd& beta) {
    LinkState s;
    s.t.noalias() = data.design() * beta;
    s.link = 2.0 * s.t.array().atan();
    const Eigen::ArrayXd w = data.theta().array() - s.link.array();
    s.resid_sin = w.sin();
    s.resid_cos = w.cos();
    return s;
  }

  // sin(theta - mu - g) and cos(theta - mu - g) by angle subtraction.
  Eigen::VectorXd residual_sin(double mu) const {
    const double c = std::cos(mu), s = std::sin(mu);
    return resid_sin * c - resid_cos * s;
  }
  Eigen::VectorXd residual_cos(double mu) const {
    const double c = std::cos(mu), s = std::sin(mu);
    return resid_cos * c + resid_sin * s;
  }
  double weighted_cos_sum(const Eigen::Ref<const Eigen::VectorXd>& w, double mu) const {
    const double c = std::cos(mu), s = std::sin(mu);
    return c * w.dot(resid_cos) + s * w.dot(resid_sin);
  }
};

inline void check_params(const CircRegParams& params, const Dataset& data, const char* fn) {
  if (!(params.kappa >= 0.0) || !std::isfinite(params.kappa)) {
    throw DomainError(std::string(fn) + ": concentration must be finite and nonnegative");
  }
  if (!std::isfinite(params.mu)) {
    throw DomainError(std::string(fn) + ": location must be finite");
  }
  if (params.beta.size() != data.dim()) {
    throw DomainError(std::string(fn) + ": coefficient length " +
                      std::to_string(params.beta.size()) + " does not match the design width " +
                      std::to_string(data.dim()));
  }
  if (!params.beta.allFinite()) {
    throw DomainError(std::string(fn) + ": coefficients must be finite");
  }
}

inline bool rel_converged(double ll, double prev, double tol) {
  return std::abs(ll - prev) <= tol * std::max(1.0, std::abs(prev));
}

}  // namespace detail

// Per-observation log density column for fixed parameters. Shared by the
// plain loglik and the mixture E-step so both accumulate identically.
inline Eigen::VectorXd loglik_terms(const CircRegParams& params, const Dataset& data,
                                    double shift = 0.0) {
  detail::check_params(params, data, "loglik_terms");
  const detail::LinkState state = detail::LinkState::make(data, params.beta);
  const double base = shift - std::log(kTwoPi) - log_bessel_i0(params.kappa);
  return (params.kappa * state.residual_cos(params.mu).array() + base).matrix();
}

inline double loglik(const CircRegParams& params, const Dataset& data) {
  if (data.n() == 0) throw DomainError("loglik: empty dataset");
  return loglik_terms(params, data).sum();
}

inline double weighted_loglik(const Eigen::Ref<const Eigen::VectorXd>& w,
                              const CircRegParams& params, const Dataset& data) {
  if (data.n() == 0) throw DomainError("weighted_loglik: empty dataset");
  if (w.size() != data.n()) throw DomainError("weighted_loglik: weight length mismatch");
  return w.dot(loglik_terms(params, data));
}

// Closed-form location update: the direction of the weighted resultant of
// the link-adjusted responses. Throws when that resultant is numerically
// zero relative to the total weight.
inline double update_mu(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::VectorXd& beta,
                        const Dataset& data) {
  if (w.size() != data.n()) throw DomainError("update_mu: weight length mismatch");
  const detail::LinkState state = detail::LinkState::make(data, beta);
  const double s = w.dot(state.resid_sin);
  const double c = w.dot(state.resid_cos);
  const double resultant = std::hypot(s, c);
  const double total = w.sum();
  if (!(resultant > 1e-12 * total)) {
    throw DegenerateDirectionError(
        "update_mu: link-adjusted responses have a vanishing resultant, no mean direction");
  }
  return wrap_angle(std::atan2(s, c));
}

inline double update_mu(const Eigen::VectorXd& beta, const Dataset& data) {
  return update_mu(Eigen::VectorXd::Ones(data.n()), beta, data);
}

// Concentration update: invert A at the weighted mean cosine residual.
// Nonpositive mean cosine clamps to kappa = 0, the boundary maximizer.
inline ConcentrationEstimate update_kappa(const Eigen::Ref<const Eigen::VectorXd>& w, double mu,
                                          const Eigen::VectorXd& beta, const Dataset& data) {
  if (w.size() != data.n()) throw DomainError("update_kappa: weight length mismatch");
  const double total = w.sum();
  if (!(total > 0.0)) throw DomainError("update_kappa: total weight must be positive");
  const detail::LinkState state = detail::LinkState::make(data, beta);
  const double mean_cos = state.weighted_cos_sum(w, mu) / total;
  if (mean_cos <= 0.0) return {0.0, false, true};
  return concentration_from_resultant(mean_cos);
}

inline ConcentrationEstimate update_kappa(double mu, const Eigen::VectorXd& beta,
                                          const Dataset& data) {
  return update_kappa(Eigen::VectorXd::Ones(data.n()), mu, beta, data);
}

// d/dB of the weighted loglik: kappa * X' (w . g'(t) . sin(residual)).
inline Eigen::VectorXd loglik_gradient_beta(const Eigen::Ref<const Eigen::VectorXd>& w,
                                            const CircRegParams& params, const Dataset& data) {
  detail::check_params(params, data, "loglik_gradient_beta");
  if (w.size() != data.n()) throw DomainError("loglik_gradient_beta: weight length mismatch");
  const detail::LinkState state = detail::LinkState::make(data, params.beta);
  const Eigen::ArrayXd gp = 2.0 / (1.0 + state.t.array().square());
  const Eigen::ArrayXd u = state.residual_sin(params.mu).array();
  return params.kappa * (data.design().transpose() * (w.array() * gp * u).matrix());
}

// d2/dB2 of the weighted loglik:
// kappa * X' diag(w . (g''(t) sin(residual) - g'(t)^2 cos(residual))) X.
inline Eigen::MatrixXd loglik_hessian_beta(const Eigen::Ref<const Eigen::VectorXd>& w,
                                           const CircRegParams& params, const Dataset& data) {
  detail::check_params(params, data, "loglik_hessian_beta");
  if (w.size() != data.n()) throw DomainError("loglik_hessian_beta: weight length mismatch");
  const detail::LinkState state = detail::LinkState::make(data, params.beta);
  const Eigen::ArrayXd denom = 1.0 + state.t.array().square();
  const Eigen::ArrayXd gp = 2.0 / denom;
  const Eigen::ArrayXd gpp = -4.0 * state.t.array() / denom.square();
  const Eigen::ArrayXd u = state.residual_sin(params.mu).array();
  const Eigen::ArrayXd v = state.residual_cos(params.mu).array();
  const Eigen::VectorXd h = (w.array() * (gpp * u - gp.square() * v)).matrix();
  return params.kappa * (data.design().transpose() * h.asDiagonal() * data.design());
}

namespace detail {

struct BetaStepOutcome {
  bool moved = false;
  bool stationary = false;
  bool regularized = false;
  bool halved = false;
  Eigen::VectorXd beta;
  LinkState state;
  double objective = 0.0;
};

// One damped Newton iteration on B at fixed mu, kappa, weights. `objective`
// is the varying part of the loglik, sum_i w_i cos(theta_i - mu - g(t_i)).
// The negated Hessian gets a growing ridge until it factorizes, and the step
// is halved until the objective does not decrease.
inline BetaStepOutcome beta_step(const Eigen::Ref<const Eigen::VectorXd>& w, double mu,
                                 double kappa, const Eigen::VectorXd& beta,
                                 const LinkState& state, double objective, const Dataset& data) {
  BetaStepOutcome out;
  out.beta = beta;
  out.state = state;
  out.objective = objective;

  const Eigen::ArrayXd denom = 1.0 + state.t.array().square();
  const Eigen::ArrayXd gp = 2.0 / denom;
  const Eigen::ArrayXd u = state.residual_sin(mu).array();
  const Eigen::VectorXd grad =
      kappa * (data.design().transpose() * (w.array() * gp * u).matrix());
  const double grad_scale = std::max(1.0, kappa * w.sum());
  if (grad.cwiseAbs().maxCoeff() <= 1e-10 * grad_scale) {
    out.stationary = true;
    return out;
  }

  const Eigen::ArrayXd gpp = -4.0 * state.t.array() / denom.square();
  const Eigen::ArrayXd v = state.residual_cos(mu).array();
  const Eigen::VectorXd hdiag = (w.array() * (gpp * u - gp.square() * v)).matrix();
  const Eigen::MatrixXd neg_hessian =
      -kappa * (data.design().transpose() * hdiag.asDiagonal() * data.design());

  Eigen::MatrixXd m = neg_hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  double ridge = 0.0;
  while (llt.info() != Eigen::Success) {
    ridge = (ridge == 0.0) ? 1e-8 : ridge * 10.0;
    out.regularized = true;
    if (ridge > 1e16) return out;
    m = neg_hessian + ridge * Eigen::MatrixXd::Identity(data.dim(), data.dim());
    llt.compute(m);
  }
  const Eigen::VectorXd direction = llt.solve(grad);
  if (!direction.allFinite()) return out;

  double step = 1.0;
  for (int half = 0; half < 20; ++half) {
    const Eigen::VectorXd candidate = beta + step * direction;
    const LinkState cand_state = LinkState::make(data, candidate);
    const double cand_obj = w.dot(cand_state.residual_cos(mu));
    if (cand_obj >= objective) {
      out.moved = true;
      out.halved = half > 0;
      out.beta = candidate;
      out.state = cand_state;
      out.objective = cand_obj;
      return out;
    }
    step *= 0.5;
  }
  out.halved = true;
  return out;
}

}  // namespace detail

struct NewtonStep {
  Eigen::VectorXd beta;
  bool moved = false;
  bool stationary = false;
  bool regularized = false;
  bool halved = false;
};

// One exposed Newton iteration from the given parameters; state and
// objective are rebuilt from scratch.
inline NewtonStep newton_step_beta(const Eigen::Ref<const Eigen::VectorXd>& w,
                                   const CircRegParams& params, const Dataset& data) {
  detail::check_params(params, data, "newton_step_beta");
  if (w.size() != data.n()) throw DomainError("newton_step_beta: weight length mismatch");
  const detail::LinkState state = detail::LinkState::make(data, params.beta);
  const double objective = w.dot(state.residual_cos(params.mu));
  const detail::BetaStepOutcome out =
      detail::beta_step(w, params.mu, params.kappa, params.beta, state, objective, data);
  return {out.beta, out.moved, out.stationary, out.regularized, out.halved};
}

inline NewtonStep newton_step_beta(const CircRegParams& params, const Dataset& data) {
  return newton_step_beta(Eigen::VectorXd::Ones(data.n()), params, data);
}

struct NewtonRun {
  int iterations = 0;
  bool regularized = false;
  bool halved = false;
};

// Inner Newton loop: iterate damped steps until the gradient vanishes, the
// step stalls, or max_inner is reached. Updates params.beta in place and
// never decreases the objective.
inline NewtonRun maximize_beta(const Eigen::Ref<const Eigen::VectorXd>& w, CircRegParams& params,
                               const Dataset& data, int max_inner) {
  detail::check_params(params, data, "maximize_beta");
  if (w.size() != data.n()) throw DomainError("maximize_beta: weight length mismatch");
  NewtonRun run;
  detail::LinkState state = detail::LinkState::make(data, params.beta);
  double objective = w.dot(state.residual_cos(params.mu));
  for (int it = 0; it < max_inner; ++it) {
    detail::BetaStepOutcome out =
        detail::beta_step(w, params.mu, params.kappa, params.beta, state, objective, data);
    run.regularized = run.regularized || out.regularized;
    run.halved = run.halved || out.halved;
    if (!out.moved) break;
    ++run.iterations;
    const double shift = (out.beta - params.beta).cwiseAbs().maxCoeff();
    params.beta = std::move(out.beta);
    state = std::move(out.state);
    objective = out.objective;
    if (shift <= 1e-12 * (1.0 + params.beta.cwiseAbs().maxCoeff())) break;
  }
  return run;
}

// Full coordinate-ascent fit: closed-form mu, A-inverse kappa, Newton B,
// repeated until the relative loglik change drops below tol. The loglik
// trace is evaluated once per cycle before the updates, so with the weights
// fixed at one the sequence matches a one-component mixture exactly.
inline std::pair<CircRegParams, FitDiagnostics> fit_circreg(const Dataset& data,
                                                            Eigen::VectorXd beta0 = {},
                                                            const FitOptions& options = {}) {
  if (data.n() == 0) throw DomainError("fit_circreg: empty dataset");
  if (data.n() <= data.dim() + 2) {
    throw DomainError("fit_circreg: need more than dim+2 = " + std::to_string(data.dim() + 2) +
                      " observations, got " + std::to_string(data.n()));
  }
  check_design(data);
  if (beta0.size() == 0) beta0 = Eigen::VectorXd::Zero(data.dim());
  if (beta0.size() != data.dim()) {
    throw DomainError("fit_circreg: starting coefficients do not match the design width");
  }
  if (!beta0.allFinite()) throw DomainError("fit_circreg: starting coefficients must be finite");

  const Eigen::VectorXd w = Eigen::VectorXd::Ones(data.n());
  CircRegParams params{0.0, 0.0, std::move(beta0)};
  FitDiagnostics diag;
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (int outer = 0; outer < options.max_outer; ++outer) {
    const double ll = loglik(params, data);
    diag.loglik_trace.push_back(ll);
    if (outer > 0 && detail::rel_converged(ll, prev, options.tol)) {
      diag.converged = true;
      break;
    }
    prev = ll;

    params.mu = update_mu(w, params.beta, data);
    const ConcentrationEstimate est = update_kappa(w, params.mu, params.beta, data);
    params.kappa = est.kappa;
    diag.flags.kappa_capped = est.capped;
    const NewtonRun run = maximize_beta(w, params, data, options.max_inner);
    diag.flags.hessian_regularized = diag.flags.hessian_regularized || run.regularized;
    diag.flags.step_halved = diag.flags.step_halved || run.halved;
  }
  if (!diag.converged) diag.loglik_trace.push_back(loglik(params, data));

  diag.iterations = static_cast<int>(diag.loglik_trace.size()) - 1;
  diag.final_loglik = diag.loglik_trace.back();
  return {std::move(params), std::move(diag)};
}

}  // namespace mixcirc
