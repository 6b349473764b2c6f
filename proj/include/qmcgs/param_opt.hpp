#pragma once

// Continuous-parameter optimisation of a fixed gate sequence: Frobenius loss
// against a target operator, its analytic gradient, fixed-step descent.

#include <cstddef>
#include <vector>

#include "qmcgs/circuit.hpp"
#include "qmcgs/tensor.hpp"

namespace qmcgs {

// Real-valued function of the circuit unitary. The gradient G is defined by
// df = Re tr(G^H dU), so df/dphi_j = Re tr(G^H dU/dphi_j).
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Matrix& u) const = 0;
  virtual double value_and_gradient(const Matrix& u, Matrix& grad) const = 0;
};

enum class FrobeniusForm {
  Norm,         // ||O - U||_F
  HalfSquared,  // ||O - U||_F^2 / 2
};

class FrobeniusObjective final : public Objective {
 public:
  explicit FrobeniusObjective(Matrix target, FrobeniusForm form = FrobeniusForm::HalfSquared);
  double value(const Matrix& u) const override;
  double value_and_gradient(const Matrix& u, Matrix& grad) const override;
  const Matrix& target() const { return target_; }

 private:
  Matrix target_;
  FrobeniusForm form_;
};

struct DescentConfig {
  double step = 0.2;
  std::size_t max_iters = 100;
  double grad_tol = 1e-8;
  // Stop once a step lowers the objective by less than this fraction of its
  // value (0 disables). Runs that stall this early cannot reach a small loss
  // within the iteration cap.
  double stall_tol = 0.0;
};

struct DescentResult {
  std::vector<double> params;
  double initial_value = 0.0;
  double final_value = 0.0;
  std::size_t iters = 0;     // accepted update steps
  bool rolled_back = false;  // a step increased the objective and was undone
};

// L(Phi) = ||O - U(Phi)||_F. Throws DimensionError on shape mismatch.
double loss(const Circuit& c, const Matrix& target);

// dL/dphi_j = Re tr[(U - O)^H dU/dphi_j] / L. At L <= 1e-12 the norm is not
// differentiable and the zero vector is returned.
std::vector<double> loss_gradient(const Circuit& c, const Matrix& target);

// Phi <- Phi - step * grad f(Phi) on the given objective. Stops after
// max_iters updates, when |grad| < grad_tol, or when an update would raise the
// objective (that update is rolled back). The result never exceeds the start.
DescentResult gradient_descent(const Circuit& c, const Objective& objective,
                               const DescentConfig& cfg);

// Descent toward a target operator. The iteration runs on the half-squared
// loss by default; final_value and initial_value are always reported as the
// Frobenius loss L.
DescentResult gradient_descent(const Circuit& c, const Matrix& target, const DescentConfig& cfg,
                               FrobeniusForm form = FrobeniusForm::HalfSquared);

}  // namespace qmcgs
