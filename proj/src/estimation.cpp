#include "dpdwald/estimation.hpp"

#include "dpdwald/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpd {

namespace {

void require_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("tuning parameter beta must be >= 0");
}

void check_sample(const ModelFamily& family, const Sample& sample) {
  for (double x : sample.values()) family.check_observation(x);
  const auto [lo, hi] = std::minmax_element(sample.values().begin(), sample.values().end());
  if (family.dim() >= 2 && *lo == *hi)
    throw DegenerateSampleError(family.name() + ": sample has zero variance");
  if (family.name() == "exponential" && *hi == 0.0)
    throw DegenerateSampleError("exponential: all observations are zero");
}

// Unconstrained coordinates: log for positive parameters, otherwise the
// parameter divided by a fixed reference scale.
struct Coordinates {
  std::vector<bool> positive;
  Vector ref;

  Vector to_phi(const Theta& theta) const {
    Vector phi(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      phi(i) = positive[static_cast<std::size_t>(i)] ? std::log(theta(i)) : theta(i) / ref(i);
    return phi;
  }
  Theta to_theta(const Vector& phi) const {
    Theta theta(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i)
      theta(i) = positive[static_cast<std::size_t>(i)] ? std::exp(phi(i)) : phi(i) * ref(i);
    return theta;
  }
  Vector jacobian(const Theta& theta) const {
    Vector d(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      d(i) = positive[static_cast<std::size_t>(i)] ? theta(i) : ref(i);
    return d;
  }
};

struct Evaluation {
  bool ok = false;
  double objective = kInfinity;
  Vector gradient;  // with respect to phi
  double gnorm = kInfinity;
};

class NewtonSolver {
public:
  NewtonSolver(const ModelFamily& family, const Sample& sample, double beta, const FitOptions& options,
               Coordinates coords)
      : family_(family), sample_(sample), beta_(beta), options_(options), coords_(std::move(coords)) {}

  Evaluation evaluate(const Vector& phi) const {
    Evaluation e;
    if (!phi.allFinite()) return e;
    const Theta theta = coords_.to_theta(phi);
    if (!family_.in_domain(theta)) return e;
    try {
      e.objective = dpd_objective(family_, theta, beta_, sample_);
      const Vector r = estimating_residual(family_, theta, beta_, sample_);
      e.gradient = -(1.0 + beta_) * r.cwiseProduct(coords_.jacobian(theta));
      e.gnorm = residual_norm(family_, theta, beta_, r);
    } catch (const NumericError&) {
      return e;
    } catch (const DomainError&) {
      return e;
    }
    e.ok = std::isfinite(e.objective) && e.gradient.allFinite() && std::isfinite(e.gnorm);
    return e;
  }

  Matrix hessian(const Vector& phi) const {
    const auto p = phi.size();
    Matrix h(p, p);
    constexpr double step = 1e-5;
    for (Eigen::Index j = 0; j < p; ++j) {
      Vector up = phi;
      Vector dn = phi;
      up(j) += step;
      dn(j) -= step;
      const Evaluation a = evaluate(up);
      const Evaluation b = evaluate(dn);
      if (!a.ok || !b.ok) throw NumericError("Hessian evaluation left the parameter space");
      h.col(j) = (a.gradient - b.gradient) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
  }

  FitCandidate run(const Theta& start) const {
    FitCandidate c;
    c.start = start;
    Vector phi = coords_.to_phi(start);
    Evaluation cur = evaluate(phi);
    if (!cur.ok) {
      c.theta = start;
      c.objective = kInfinity;
      c.gradient_norm = kInfinity;
      return c;
    }
    double last_step = kInfinity;
    int it = 0;
    for (; it < options_.max_iterations; ++it) {
      if (cur.gnorm < options_.gradient_tolerance && last_step < options_.step_tolerance) {
        c.converged = true;
        break;
      }
      Vector dir;
      try {
        dir = newton_direction(phi, cur.gradient);
      } catch (const NumericError&) {
        dir = -cur.gradient;
      }
      const double cap = 2.0;
      const double biggest = dir.cwiseAbs().maxCoeff();
      if (biggest > cap) dir *= cap / biggest;

      double t = 1.0;
      bool accepted = false;
      Evaluation next;
      const double slope = cur.gradient.dot(dir);
      while (t > 1e-12) {
        next = evaluate(phi + t * dir);
        if (next.ok) {
          const bool armijo = next.objective <= cur.objective + 1e-4 * t * std::min(slope, 0.0);
          // Near the optimum objective differences drown in rounding, so a
          // clear drop in the residual is accepted as progress instead.
          const bool flat = next.objective <= cur.objective + 1e-13 * (1.0 + std::fabs(cur.objective)) &&
                            next.gnorm < 0.9 * cur.gnorm;
          if (armijo || flat) {
            accepted = true;
            break;
          }
        }
        t *= 0.5;
      }
      if (!accepted) {
        // No further progress possible: converged if the residual is already small.
        c.converged = cur.gnorm < options_.gradient_tolerance;
        break;
      }
      last_step = t * dir.cwiseAbs().maxCoeff();
      phi += t * dir;
      cur = next;
    }
    if (!c.converged && cur.gnorm < options_.gradient_tolerance && last_step < options_.step_tolerance)
      c.converged = true;
    c.theta = coords_.to_theta(phi);
    c.objective = cur.objective;
    c.gradient_norm = cur.gnorm;
    c.iterations = it;
    return c;
  }

private:
  Vector newton_direction(const Vector& phi, const Vector& g) const {
    const Matrix h = hessian(phi);
    if (!h.allFinite()) throw NumericError("non-finite Hessian");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    Vector lambda = eig.eigenvalues();
    const double top = lambda.cwiseAbs().maxCoeff();
    if (!(top > 0.0)) throw NumericError("zero Hessian");
    // Modified Newton: flip and floor eigenvalues so the step is a descent direction.
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = std::max(std::fabs(lambda(i)), 1e-10 * top);
    const Matrix& v = eig.eigenvectors();
    return -(v * (v.transpose() * g).cwiseQuotient(lambda));
  }

  const ModelFamily& family_;
  const Sample& sample_;
  double beta_;
  const FitOptions& options_;
  Coordinates coords_;
};

FitCandidate run_fixed_point(const ModelFamily& family, const Sample& sample, double beta, double start,
                             const FitOptions& options) {
  FitCandidate c;
  c.start = make_theta({start});
  double theta = start;
  int it = 0;
  bool ok = true;
  for (; it < options.max_iterations; ++it) {
    double next = 0.0;
    try {
      next = exp_fixed_point_step(sample, beta, theta);
    } catch (const NumericError&) {
      ok = false;
      break;
    }
    if (!(next > 0.0) || !std::isfinite(next)) {
      ok = false;
      break;
    }
    const double step = std::fabs(next - theta) / theta;
    theta = next;
    if (step < options.step_tolerance) break;
  }
  c.theta = make_theta({theta});
  c.iterations = it + 1;
  if (ok) {
    c.objective = dpd_objective(family, c.theta, beta, sample);
    c.gradient_norm = residual_norm(family, c.theta, beta, estimating_residual(family, c.theta, beta, sample));
    c.converged = c.gradient_norm < options.gradient_tolerance && it < options.max_iterations;
  } else {
    c.objective = kInfinity;
    c.gradient_norm = kInfinity;
  }
  return c;
}

bool same_point(const Theta& a, const Theta& b) {
  return ((a - b).cwiseAbs().array() <= 1e-7 * (a.cwiseAbs().array() + 1e-300)).all();
}

}  // namespace

double dpd_objective(const ModelFamily& family, const Theta& theta, double beta, const Sample& sample) {
  require_beta(beta);
  family.check_theta(theta);
  const double n = static_cast<double>(sample.size());
  if (beta == 0.0) {
    double s = 0.0;
    for (double x : sample.values()) {
      family.check_observation(x);
      s += family.log_density(theta, x);
    }
    return -s / n;
  }
  double s = 0.0;
  for (double x : sample.values()) {
    family.check_observation(x);
    s += std::exp(beta * family.log_density(theta, x));
  }
  return family.density_power_integral(theta, 1.0 + beta) - (1.0 + 1.0 / beta) * s / n;
}

Vector estimating_residual(const ModelFamily& family, const Theta& theta, double beta, const Sample& sample) {
  require_beta(beta);
  family.check_theta(theta);
  Vector r = Vector::Zero(static_cast<Eigen::Index>(family.dim()));
  for (double x : sample.values()) {
    family.check_observation(x);
    const double w = beta == 0.0 ? 1.0 : std::exp(beta * family.log_density(theta, x));
    if (w == 0.0) continue;
    r += w * family.score(theta, x);
  }
  r /= static_cast<double>(sample.size());
  if (beta > 0.0) r -= family.score_power_integral(theta, 1.0 + beta);
  return r;
}

double residual_norm(const ModelFamily& family, const Theta& theta, double beta, const Vector& residual) {
  const Vector scale = family.coordinate_scale(theta);
  const double mass = beta == 0.0 ? 1.0 : family.density_power_integral(theta, 1.0 + beta);
  return residual.cwiseProduct(scale).cwiseAbs().maxCoeff() / mass;
}

double exp_fixed_point_step(const Sample& sample, double beta, double theta) {
  require_beta(beta);
  if (!(theta > 0.0)) throw DomainError("exp_fixed_point_step: theta must be positive");
  double num = 0.0;
  double den = 0.0;
  for (double x : sample.values()) {
    const double w = std::exp(-beta * x / theta);
    num += x * w;
    den += w;
  }
  den -= static_cast<double>(sample.size()) * beta / ((1.0 + beta) * (1.0 + beta));
  if (!(den > 0.0)) throw NumericError("exp_fixed_point_step: denominator is not positive");
  return num / den;
}

MdpdeFit fit_mdpde(FamilyPtr family_ptr, const Sample& sample, double beta, const FitOptions& options) {
  if (!family_ptr) throw InputError("fit_mdpde: no model family");
  require_beta(beta);
  const ModelFamily& family = *family_ptr;
  check_sample(family, sample);
  if (options.init) family.check_theta(*options.init);

  std::vector<Theta> starts;
  if (options.init) starts.push_back(*options.init);
  if (options.multistart || starts.empty()) {
    for (auto& s : family.starting_points(sample.values())) starts.push_back(std::move(s));
  }
  if (!options.multistart) starts.resize(1);
  if (starts.empty()) throw DegenerateSampleError(family.name() + ": no usable starting value");

  const bool exponential = family.name() == "exponential";
  Solver solver = options.solver;
  if (solver == Solver::fixed_point && !exponential)
    throw InputError("fit_mdpde: the fixed-point solver is only available for the exponential family");
  if (solver == Solver::automatic) solver = exponential ? Solver::fixed_point : Solver::newton;

  Coordinates coords;
  coords.positive = family.positive_coordinates();
  coords.ref = family.coordinate_scale(starts.front());
  const NewtonSolver newton(family, sample, beta, options, coords);

  MdpdeFit fit;
  fit.family = family_ptr;
  fit.beta = beta;
  fit.n = sample.size();
  fit.solver = solver == Solver::fixed_point ? "fixed_point" : "newton";

  for (const Theta& start : starts) {
    FitCandidate c;
    if (solver == Solver::fixed_point) {
      c = run_fixed_point(family, sample, beta, start(0), options);
      if (!c.converged) {
        // Fall back to the damped gradient path from the same start.
        FitCandidate d = newton.run(start);
        d.iterations += c.iterations;
        c = d;
      }
    } else {
      c = newton.run(start);
    }
    fit.candidates.push_back(c);
  }

  const FitCandidate* best = nullptr;
  for (const auto& c : fit.candidates) {
    if (!c.converged) continue;
    if (!best || c.objective < best->objective - 1e-14 * std::fabs(best->objective)) best = &c;
  }
  if (!best) {
    const FitCandidate* closest = &fit.candidates.front();
    for (const auto& c : fit.candidates)
      if (c.gradient_norm < closest->gradient_norm) closest = &c;
    throw ConvergenceError(family.name() + ": MDPDE solver did not converge (best residual " +
                               std::to_string(closest->gradient_norm) + ")",
                           closest->theta);
  }

  fit.theta_hat = best->theta;
  fit.objective_value = best->objective;
  fit.converged = true;
  fit.iterations = best->iterations;
  fit.gradient_norm = best->gradient_norm;

  // Drop duplicate candidates so diagnostics list distinct local optima.
  std::vector<FitCandidate> distinct;
  for (const auto& c : fit.candidates) {
    const bool dup = std::any_of(distinct.begin(), distinct.end(), [&](const FitCandidate& d) {
      return d.converged && c.converged && same_point(d.theta, c.theta);
    });
    if (!dup) distinct.push_back(c);
  }
  fit.candidates = std::move(distinct);

  fit.J = j_matrix(family, fit.theta_hat, beta);
  fit.K = k_matrix(family, fit.theta_hat, beta);
  fit.Sigma = sandwich_covariance(family, fit.theta_hat, beta);
  return fit;
}

std::vector<std::optional<MdpdeFit>> fit_mdpde_path(FamilyPtr family, const Sample& sample,
                                                    const std::vector<double>& betas,
                                                    const FitOptions& options,
                                                    std::vector<std::string>* errors) {
  std::vector<std::optional<MdpdeFit>> fits(betas.size());
  if (errors) errors->assign(betas.size(), std::string());
  FitOptions opts = options;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    try {
      fits[i] = fit_mdpde(family, sample, betas[i], opts);
      opts.init = fits[i]->theta_hat;
    } catch (const NumericError& e) {
      if (errors) (*errors)[i] = e.what();
    }
  }
  return fits;
}

}  // namespace dpd
