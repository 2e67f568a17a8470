#include "roughloop/rough_lift.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace roughloop {

SimplexGrid iterated_integral(const SampledPath& x, const SampledPath& y) {
  if (x.level() != y.level()) fail(ErrorCode::level_mismatch, "iterated_integral: levels differ");
  std::vector<SimplexGrid> parts;
  parts.reserve(static_cast<std::size_t>(x.dim() * y.dim()));
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < y.dim(); ++j) parts.push_back(SimplexGrid::area(x.component(i), y.component(j), x.level()));
  return parts.size() == 1 ? parts.front() : SimplexGrid::stack(parts);
}

Level2Lift lift(const SampledPath& w) { return Level2Lift{w, iterated_integral(w, w)}; }

Eigen::MatrixXd chen_defect(const Level2Lift& L, std::size_t s, std::size_t r, std::size_t t) {
  require(s <= r && r <= t && t < L.path.size(), ErrorCode::out_of_range, "chen_defect: need s <= r <= t on the grid");
  const int d = L.dim();
  Eigen::MatrixXd D(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int c = i * d + j;
      D(i, j) = L.area.value(c, s, t) - L.area.value(c, s, r) - L.area.value(c, r, t) -
                (L.path.at(r, i) - L.path.at(s, i)) * (L.path.at(t, j) - L.path.at(r, j));
    }
  return D;
}

double ibp_defect(const Level2Lift& L) {
  const int d = L.dim();
  const std::size_t n1 = L.path.size();
  std::vector<double> cij(n1), cji(n1);
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      auto xi = L.path.component(i);
      auto xj = L.path.component(j);
      for (std::size_t s = 0; s < n1; ++s) {
        L.area.row(i * d + j, s, cij.data());
        L.area.row(j * d + i, s, cji.data());
        for (std::size_t k = s; k < n1; ++k) {
          const double sym = (xi[k] - xi[s]) * (xj[k] - xj[s]);
          worst = std::max(worst, std::abs(cij[k - s] + cji[k - s] - sym));
        }
      }
    }
  return worst;
}

double omega_distance(const Level2Lift& a, const Level2Lift& b, const BesovParams& p) {
  require_same_shape(a.path, b.path, "omega_distance");
  const int d = a.dim();
  double dist = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      SimplexGrid diff = a.area_component(i, j) - b.area_component(i, j);
      dist = std::max(dist, hoelder_norm(diff, p.theta));
    }
  const SampledPath delta = a.path - b.path;
  for (int i = 0; i < d; ++i) dist = std::max(dist, path_besov_norm(delta.component_path(i), p.m, p.theta_prime / 2.0));
  return dist;
}

SimplexGrid wiener_integral_B(const SampledPath& x, const SampledPath& w) {
  require(x.dim() == 1 && w.dim() == 1, ErrorCode::invalid_argument, "wiener_integral_B: scalar paths expected");
  return iterated_integral(x, w);
}

SimplexGrid wiener_integral_B_reversed(const SampledPath& x, const SampledPath& w) {
  require(x.dim() == 1 && w.dim() == 1, ErrorCode::invalid_argument, "wiener_integral_B: scalar paths expected");
  if (x.level() != w.level()) fail(ErrorCode::level_mismatch, "wiener_integral_B: levels differ");
  return SimplexGrid::product(x.component(0), w.component(0), x.level()) - iterated_integral(x, w);
}

}  // namespace roughloop
