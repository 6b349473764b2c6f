#include "qmcgs/param_opt.hpp"

#include <cmath>

namespace qmcgs {

namespace {

constexpr double kZeroLoss = 1e-12;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

FrobeniusObjective::FrobeniusObjective(Matrix target, FrobeniusForm form)
    : target_(std::move(target)), form_(form) {}

double FrobeniusObjective::value(const Matrix& u) const {
  const double l = frobenius_distance(target_, u);
  return form_ == FrobeniusForm::Norm ? l : 0.5 * l * l;
}

double FrobeniusObjective::value_and_gradient(const Matrix& u, Matrix& grad) const {
  grad = u - target_;
  const double l = frobenius_norm(grad);
  if (form_ == FrobeniusForm::HalfSquared) return 0.5 * l * l;
  if (l <= kZeroLoss) {
    grad = Matrix(u.rows(), u.cols());
  } else {
    grad *= 1.0 / l;
  }
  return l;
}

double loss(const Circuit& c, const Matrix& target) { return frobenius_distance(target, evaluate(c)); }

std::vector<double> loss_gradient(const Circuit& c, const Matrix& target) {
  const Matrix u = evaluate(c);
  Matrix diff = u - target;
  const double l = frobenius_norm(diff);
  if (l <= kZeroLoss) return std::vector<double>(c.param_count(), 0.0);
  auto g = contract_jacobian(c, diff);
  for (double& x : g) x /= l;
  return g;
}

DescentResult gradient_descent(const Circuit& c, const Objective& objective,
                               const DescentConfig& cfg) {
  Circuit work = c;
  DescentResult out;
  out.params = c.params();
  Matrix grad_u;
  Matrix u = evaluate(work);
  double value = objective.value_and_gradient(u, grad_u);
  out.initial_value = value;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const auto grad = contract_jacobian(work, grad_u, u);
    if (grad.empty() || norm2(grad) < cfg.grad_tol) break;
    std::vector<double> next = out.params;
    for (std::size_t j = 0; j < next.size(); ++j) next[j] -= cfg.step * grad[j];
    work.set_params(next);
    Matrix next_grad;
    Matrix next_u = evaluate(work);
    const double next_value = objective.value_and_gradient(next_u, next_grad);
    if (next_value > value) {
      work.set_params(out.params);
      out.rolled_back = true;
      break;
    }
    out.params = std::move(next);
    const bool stalled = cfg.stall_tol > 0.0 && value - next_value < cfg.stall_tol * value;
    value = next_value;
    grad_u = std::move(next_grad);
    u = std::move(next_u);
    ++out.iters;
    if (stalled) break;
  }
  out.final_value = value;
  return out;
}

DescentResult gradient_descent(const Circuit& c, const Matrix& target, const DescentConfig& cfg,
                               FrobeniusForm form) {
  const FrobeniusObjective objective(target, form);
  DescentResult r = gradient_descent(c, objective, cfg);
  if (form == FrobeniusForm::HalfSquared) {
    r.initial_value = std::sqrt(2.0 * r.initial_value);
    r.final_value = std::sqrt(2.0 * r.final_value);
  }
  return r;
}

}  // namespace qmcgs
