#pragma once

#include <Eigen/Core>
#include <vector>

#include "bsdelab/bsde/regression.hpp"
#include "bsdelab/core/generator.hpp"
#include "bsdelab/sde/paths.hpp"
#include "bsdelab/sde/stopping.hpp"

namespace bsdelab {

enum class Scheme { ExplicitBackwardEuler, ImplicitY };

struct SolverConfig {
  RegressionBasis basis = RegressionBasis::polynomial(3);
  int picard_max = 50;
  double picard_tol = 1e-12;
  double z_clip = 0.0;  // 0 = auto (10 / gamma); driver sees z clipped to this radius
  Scheme scheme = Scheme::ImplicitY;
};

struct SolverDiagnostics {
  int picard_iterations = 0;        // max over time steps
  double picard_residual = 0.0;     // worst final residual
  double regression_condition = 1.0;
  double clipped_fraction = 0.0;    // driver evaluations that hit z_clip
  std::vector<std::vector<double>> picard_histories;  // residual per iteration, per step
};

struct BsdeSolution {
  TimeGrid grid;
  int dim_z = 1;
  Eigen::MatrixXd y;  // (n_steps+1) x n_paths
  Eigen::MatrixXd z;  // (n_steps*dim_z) x n_paths, step-major rows
  // Variance-reduced estimate of Y at t_0: the per-path total
  // xi + int g dt - int Zhat dB, averaged over paths. The subtracted
  // martingale removes the terminal's sampling noise; the std error is the
  // per-path spread of that total. Regression coefficients are shared by
  // every path, so their noise is invisible to this spread — when it
  // matters (nonlinear drivers at tight tolerances), average independent
  // solves and use the replicate spread instead, as the representation
  // tasks do via n_replicates.
  double y0 = 0.0;
  double y0_std_error = 0.0;
  SolverDiagnostics diag;

  auto z_at(int step) const { return z.middleRows(static_cast<Eigen::Index>(step) * dim_z, dim_z); }
};

// Backward regression scheme for Y_t = xi + int g(s,Y,Z) ds - int Z dB.
// Z_k = E[Y_{k+1} dB_k | state_k] / dt and Y_k = E[Y_{k+1} | state_k]
// + g(t_k, y, Z_k) dt, with y the fixed point of the implicit relation
// (ImplicitY, solved by Picard iteration) or the conditional mean itself
// (ExplicitBackwardEuler). `states` supplies the regression state; pass
// nullptr to regress on the Brownian paths. `stop` freezes Y and zeroes Z
// at and after the per-path stopping index.
BsdeSolution solve_bsde(const GeneratorSpec& gen, const Eigen::VectorXd& terminal,
                        const PathEnsemble& brownian, const PathEnsemble* states,
                        const HittingTimes* stop, const SolverConfig& cfg);

}  // namespace bsdelab
