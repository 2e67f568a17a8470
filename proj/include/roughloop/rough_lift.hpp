#pragma once

#include <Eigen/Dense>

#include "roughloop/dyadic_paths.hpp"

namespace roughloop {

// Exact Stieltjes integral C(x,y)_{s,t} = int_s^t (x_u - x_s) dy_u of the
// piecewise-linear interpolants. For vector paths the result has
// x.dim() * y.dim() components, (i,j) at index i * y.dim() + j.
SimplexGrid iterated_integral(const SampledPath& x, const SampledPath& y);

struct Level2Lift {
  SampledPath path;
  SimplexGrid area;  // d*d components C(w^i, w^j)

  int dim() const { return path.dim(); }
  SimplexGrid area_component(int i, int j) const { return area.component_grid(i * dim() + j); }
};

Level2Lift lift(const SampledPath& w);

// C_{s,t} - C_{s,r} - C_{r,t} - (w_r - w_s) (x) (w_t - w_r) at grid indices s <= r <= t.
Eigen::MatrixXd chen_defect(const Level2Lift& L, std::size_t s, std::size_t r, std::size_t t);

// max over the grid of |C(w^i,w^j) + C(w^j,w^i) - (w^i_t - w^i_s)(w^j_t - w^j_s)|.
double ibp_defect(const Level2Lift& L);

double omega_distance(const Level2Lift& a, const Level2Lift& b, const BesovParams& p);

// B(x,w) = int (x_u - x_s) dw_u against the stored w; scalar paths.
SimplexGrid wiener_integral_B(const SampledPath& x, const SampledPath& w);
// B(w,x) = xbar * wbar - B(x,w).
SimplexGrid wiener_integral_B_reversed(const SampledPath& x, const SampledPath& w);

}  // namespace roughloop
