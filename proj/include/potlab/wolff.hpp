#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "potlab/measure.hpp"
#include "potlab/young.hpp"

namespace potlab {

/// r -> |mu|(B_r(x0)) for a fixed center.
using BallMass = std::function<double(double)>;

struct WolffOptions {
  int levels = 40;
  int nodes = 8;
  int fit_levels = 8;
};

struct WolffResult {
  /// Integral including the extrapolated tail; the partial sum when divergent.
  double value = 0.0;
  bool divergent = false;
  /// Fitted ratio of consecutive shell contributions near the center.
  double decay_ratio = 0.0;
  int levels = 0;
  bool closed_form = false;
  /// Contribution of r in [2^{-k-1} R, 2^{-k} R].
  std::vector<double> shells;
};

/// int_0^R g^{-1}(|mu|(B_r(x0)) / r^{n-1}) dr on dyadic shells.
WolffResult wolff_potential(const YoungFunction& G, const BallMass& mass, double R, int n = 2,
                            const WolffOptions& opt = {});

/// As above; a single atom at x0 under a power law is evaluated in closed form.
WolffResult wolff_potential(const YoungFunction& G, const MeasureData& mu, Point x0, double R,
                            const WolffOptions& opt = {});

/// sum_{k=1}^{levels} R_k g^{-1}(|mu|(B_{R_k}) / R_k^{n-1}) with R_k = 2^{1-k} R.
double wolff_dyadic_sum(const YoungFunction& G, const BallMass& mass, double R, int n = 2, int levels = 40);
double wolff_dyadic_sum(const YoungFunction& G, const MeasureData& mu, Point x0, double R, int levels = 40);

/// Samples (rho, rho g^{-1}(|mu|(B_rho) / rho^{n-1})) at rho = 2^{-k} R, k = 0..levels-1.
std::vector<std::pair<double, double>> shrink_profile(const YoungFunction& G, const BallMass& mass, double R,
                                                      int n = 2, int levels = 20);

struct RearrangementBound {
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs; 0 when both vanish.
  double ratio = 0.0;
  bool lhs_divergent = false;
  bool rhs_divergent = false;
  /// rhs vanished, so no ratio is defined.
  bool undefined_ratio = false;
  /// lhs diverges while rhs is finite.
  bool inconsistent = false;
};

/// Wolff potential of F dx at x against
/// int_0^{|B_R|} t^{1/n} g^{-1}(t^{1/n} |F|**(t)) dt / t, with F restricted to B_R(x).
RearrangementBound rearrangement_bound(const YoungFunction& G, const GridDensity& F, Point x, double R,
                                       const WolffOptions& opt = {});

/// Header "x0,y0,R,value,divergent,levels,decay_ratio,closed_form".
void write_wolff_csv_header(std::ostream& os);
void write_wolff_csv_row(std::ostream& os, Point x0, double R, const WolffResult& result);

}  // namespace potlab
