#include "hsfuse/hqs.hpp"

#include "hsfuse/gradient.hpp"
#include "hsfuse/vstep.hpp"

namespace hsfuse {

void HqsConfig::validate() const {
  if (!(mu >= 0.0) || !(nu >= 0.0)) throw ValidationError("mu and nu must be non-negative");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (max_iter < 1) throw ValidationError("iteration cap must be >= 1");
  if (!(rel_tol > 0.0)) throw ValidationError("relative tolerance must be positive");
  if (!(rho_growth >= 1.0)) throw ValidationError("rho growth factor must be >= 1");
}

namespace {

double data_terms(const HsiCube& x, const HsiCube& y, const HsiCube& z, const DegradationModel& model) {
  const Observation o = degrade(model, x);
  return squared_norm(y - o.y) + squared_norm(z - o.z);
}

double lagrangian(const SpatialGradOp& lap, const HsiCube& x, const HsiCube& v, const HsiCube& y,
                  const HsiCube& z, const DegradationModel& model, const HsiCube& xt, double mu, double nu,
                  double rho) {
  return data_terms(x, y, z, model) + rho * squared_norm(x - v) + regularizer_value(lap, v, xt, mu, nu);
}

}  // namespace

double objective_value(const HsiCube& x, const HsiCube& v, const HsiCube& y, const HsiCube& z,
                       const DegradationModel& model, const HsiCube& xt, const HqsConfig& cfg) {
  if (x.dims() != model.hr_dims() || v.dims() != x.dims() || xt.dims() != x.dims())
    throw DimensionError("objective: X, V and prior must all be " + model.hr_dims().str());
  const SpatialGradOp lap(x.height(), x.width());
  return lagrangian(lap, x, v, y, z, model, xt, cfg.mu, cfg.nu, cfg.rho);
}

FusionResult fuse(const HsiCube& y, const HsiCube& z, const DegradationModel& model, const HsiCube& xt,
                  const HqsConfig& cfg) {
  cfg.validate();
  const Dims hr = model.hr_dims();
  if (xt.dims() != hr) throw DimensionError("prior is " + xt.dims().str() + ", model expects " + hr.str());
  if (y.dims() != model.lr_dims() || z.dims() != model.rgb_dims())
    throw DimensionError("observations do not match the degradation model");

  const SpatialGradOp lap(hr.height, hr.width);
  FusionResult result;
  HsiCube v = xt;
  HsiCube x_prev;
  double rho = cfg.rho;

  for (int k = 0; k < cfg.max_iter; ++k) {
    const SylvesterSolution xs = solve(build_system(model, y, z, v, rho), k > 0 ? &x_prev : nullptr);
    if (xs.residual > 1e-6)
      throw NumericalError("X-step residual " + std::to_string(xs.residual) + " exceeds 1e-6");
    result.sylvester_residuals.push_back(xs.residual);
    result.x_step_methods.push_back(xs.method);
    const HsiCube& x = xs.x;
    if (cfg.track_objective)
      result.x_step_trace.push_back(lagrangian(lap, x, v, y, z, model, xt, cfg.mu, cfg.nu, rho));

    v = vstep(x, xt, lap, cfg.mu / rho, cfg.nu / rho);
    if (cfg.track_objective)
      result.objective_trace.push_back(lagrangian(lap, x, v, y, z, model, xt, cfg.mu, cfg.nu, rho));

    result.iterations = k + 1;
    const bool settled = k > 0 && norm(x - x_prev) <= cfg.rel_tol * norm(x_prev);
    x_prev = x;
    if (settled) {
      result.converged = true;
      break;
    }
    rho *= cfg.rho_growth;
  }
  result.x_hat = std::move(x_prev);
  return result;
}

}  // namespace hsfuse
