#pragma once

#include "spc/optimality.hpp"

#include <vector>

namespace spc {

/// Energy: h^2 residual and h jump weights. L2: h^4 and h^3.
enum class Scaling { Energy, L2 };

struct EstimatorWeights {
  double state = 1.0;
  double adjoint = 1.0;
  double control = 1.0;
  double subgradient = 1.0;
};

/// Per-triangle indicator contributions (all >= 0).
struct IndicatorSet {
  Scaling scaling = Scaling::Energy;
  EstimatorWeights weights;
  std::vector<double> ey;
  std::vector<double> ep;
  std::vector<double> eu;
  std::vector<double> elam;

  /// E_K = (w1 ey^2 + w2 ep^2 + w3 eu^2 + w4 elam^2)^(1/2) for every K.
  std::vector<double> element_totals() const;
};

struct ResidualIndicators {
  std::vector<double> state;
  std::vector<double> adjoint;
};

struct ControlIndicators {
  std::vector<double> control;
  std::vector<double> subgradient;
};

/// ey_K^2 = h^s |u + f|_K^2 + h^(s-1) sum over interior sides of K of
/// |[grad y . n]|^2 |side|, with s = 2 (Energy) or 4 (L2); ep_K likewise
/// with residual y - y_omega and the jumps of grad p. h = diam(K).
ResidualIndicators state_adjoint_indicators(const Mesh& mesh, const Solution& sol,
                                            const ProblemData& data,
                                            Scaling scaling);

/// L2(K) norms of u~ - u and lambda~ - lambda, with (u~, lambda~) induced by
/// the discrete adjoint. Zero for VD.
ControlIndicators control_subgradient_indicators(const Mesh& mesh,
                                                 const Solution& sol,
                                                 const ProblemData& data);

/// All four contributions; eu and elam are left zero for VD.
IndicatorSet compute_indicators(const Mesh& mesh, const Solution& sol,
                                const ProblemData& data, Scaling scaling,
                                const EstimatorWeights& weights = {});

/// (sum over K of E_K^2)^(1/2).
double total_estimator(const IndicatorSet& ind);

/// (sum over K of h^(2(kappa+1)) |g - P g|_K^2)^(1/2), P the L2(K) projection
/// onto polynomials of degree kappa in {0, 1}.
double data_oscillation(const Mesh& mesh, const ScalarFn& g, int kappa);

/// Residual indicators of a P1Interior approximation z_h of -lap z = g.
std::vector<double> poisson_indicators(const Mesh& mesh, const FeFunction& zh,
                                       const ScalarFn& g, Scaling scaling);

}  // namespace spc
