#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "disorder/errors.hpp"

namespace disorder {

using KnotsPtr = std::shared_ptr<const std::vector<double>>;

// Chebyshev-extrema knots on [0,1]: x_j = (1 - cos(j pi / (n-1))) / 2.
// Clusters knots near both endpoints, where the value functions are steep
// and the boundary limits need resolution.
inline KnotsPtr cosine_grid(std::size_t n) {
  if (n < 3) throw domain_error("cosine_grid: need at least 3 knots");
  auto knots = std::make_shared<std::vector<double>>(n);
  const double step = M_PI / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    (*knots)[j] = 0.5 * (1.0 - std::cos(static_cast<double>(j) * step));
  knots->front() = 0.0;
  knots->back() = 1.0;
  return knots;
}

// A function tabulated on a fixed strictly increasing knot vector spanning
// [0,1]; evaluation between knots is piecewise linear.
class GridFunction {
public:
  GridFunction(KnotsPtr knots, std::vector<double> ordinates)
      : knots_(std::move(knots)), ordinates_(std::move(ordinates)) {
    if (!knots_ || knots_->size() != ordinates_.size() || knots_->size() < 2)
      throw domain_error("GridFunction: knot/ordinate size mismatch");
    if (knots_->front() != 0.0 || knots_->back() != 1.0)
      throw domain_error("GridFunction: knots must span [0,1]");
    for (std::size_t i = 1; i < knots_->size(); ++i)
      if (!((*knots_)[i] > (*knots_)[i - 1]))
        throw domain_error("GridFunction: knots must be strictly increasing");
  }

  template <class F>
  static GridFunction tabulate(const KnotsPtr& knots, F&& f) {
    std::vector<double> ord(knots->size());
    for (std::size_t i = 0; i < knots->size(); ++i) ord[i] = f((*knots)[i]);
    return GridFunction(knots, std::move(ord));
  }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
      throw domain_error("GridFunction: evaluation outside [0,1]");
    const auto& k = *knots_;
    if (x <= k.front()) return ordinates_.front();
    if (x >= k.back()) return ordinates_.back();
    const auto it = std::upper_bound(k.begin(), k.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - k.begin());
    const double t = (x - k[i - 1]) / (k[i] - k[i - 1]);
    return ordinates_[i - 1] + t * (ordinates_[i] - ordinates_[i - 1]);
  }

  const std::vector<double>& knots() const { return *knots_; }
  const KnotsPtr& knots_ptr() const { return knots_; }
  const std::vector<double>& ordinates() const { return ordinates_; }
  std::vector<double>& ordinates() { return ordinates_; }
  std::size_t size() const { return ordinates_.size(); }

  double sup_diff(const GridFunction& other) const {
    if (other.size() != size())
      throw domain_error("GridFunction: sup_diff over mismatched grids");
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      m = std::max(m, std::abs(ordinates_[i] - other.ordinates_[i]));
    return m;
  }

  // Largest discrete second difference over interior knots, expressed as a
  // chord defect: how far the value at knot i sits below the chord joining
  // its neighbours. Nonpositive (up to rounding) iff the data are concave.
  double concavity_violation() const {
    const auto& k = *knots_;
    double worst = -1.0 / 0.0;
    for (std::size_t i = 1; i + 1 < size(); ++i) {
      const double a = (k[i + 1] - k[i]) / (k[i + 1] - k[i - 1]);
      const double chord = a * ordinates_[i - 1] + (1.0 - a) * ordinates_[i + 1];
      worst = std::max(worst, chord - ordinates_[i]);
    }
    return worst;
  }

  // Replaces the ordinates with their least concave majorant (the upper
  // hull of the tabulated points). Returns the largest pointwise change.
  double project_concave() {
    const auto& k = *knots_;
    std::vector<std::size_t> hull;
    hull.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2], b = hull.back();
        const double cross = (k[b] - k[a]) * (ordinates_[i] - ordinates_[a]) -
                             (k[i] - k[a]) * (ordinates_[b] - ordinates_[a]);
        if (cross >= 0.0)
          hull.pop_back();  // b lies on or below chord a--i
        else
          break;
      }
      hull.push_back(i);
    }
    double changed = 0.0;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      while (seg + 1 < hull.size() && hull[seg + 1] < i) ++seg;
      const std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
      double v = ordinates_[i];
      if (a != b && i > a && i < b) {
        const double t = (k[i] - k[a]) / (k[b] - k[a]);
        v = ordinates_[a] + t * (ordinates_[b] - ordinates_[a]);
      }
      changed = std::max(changed, std::abs(v - ordinates_[i]));
      ordinates_[i] = v;
    }
    return changed;
  }

  // Metadata carried along the value iteration.
  bool is_concave_expected = false;
  int derived_from_iteration = -1;

private:
  KnotsPtr knots_;
  std::vector<double> ordinates_;
};

}  // namespace disorder
