#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "disorder/errors.hpp"
#include "disorder/grid.hpp"
#include "disorder/model.hpp"
#include "disorder/quadrature.hpp"

namespace disorder {

struct SolverOptions {
  int grid_size = 2001;
  double quadrature_tol = 1e-10;  // target relative quadrature accuracy
  double bisect_tol = 1e-12;      // absolute tolerance on the threshold
  double epsilon = 1e-3;          // value-iteration accuracy target
  int min_iterations = 0;         // extra floor on the iteration count
  int max_extra_iterations = 400;
};

// Solution of B[w](r) = 0 with diagnostics.
struct ThresholdSolve {
  double r = 0.0;           // unique root of B[w]
  double d = 0.0;           // root of -g - lambda w(S(.)) + lambda h
  double bracket_lo = 0.0;  // closed-form r[h]
  double bracket_hi = 0.0;  // closed-form r[0]
  double residual = 0.0;    // |B[w](r)| at termination
  int iterations = 0;
};

// Iterations needed so that (1-p)^n <= epsilon. The tiny nudge keeps exact
// ratios (e.g. ln 0.01 / ln 0.1) from rounding up a step.
inline int min_iterations_for(double epsilon, double p) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw domain_error("min_iterations_for: epsilon must lie in (0,1)");
  if (p >= 1.0) return 1;
  const double ratio = std::log(epsilon) / std::log1p(-p);
  return std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
}

// Closed forms of B[w] for the extreme inputs w = 0 and w = h, and of their
// roots. The roots bracket the threshold for every admissible concave w.
inline double closed_form_B_zero(double r, const ModelParams& params,
                                 const Roots& roots) {
  const double k = (roots.m1 - 1.0) * params.c / params.lambda;
  return psi(r, roots) / (r * (1.0 - r)) * (-r * (k + roots.m1) + roots.m1);
}

inline double closed_form_B_h(double r, const ModelParams& params,
                              const Roots& roots) {
  const double k = (roots.m1 - 1.0) * params.c / params.lambda;
  const double m1p = roots.m1 * params.p;
  return psi(r, roots) / (r * (1.0 - r)) * (-r * (k + m1p) + m1p);
}

inline double closed_form_root_zero(const ModelParams& params,
                                    const Roots& roots) {
  const double k = (roots.m1 - 1.0) * params.c / params.lambda;
  return roots.m1 / (k + roots.m1);
}

inline double closed_form_root_h(const ModelParams& params,
                                 const Roots& roots) {
  const double k = (roots.m1 - 1.0) * params.c / params.lambda;
  return roots.m1 * params.p / (k + roots.m1 * params.p);
}

// One value-iteration run: the iterates v_0..v_N, their thresholds, and the
// certificates attached to the final iterate.
struct ValueIteration {
  ModelParams params;
  std::vector<GridFunction> values;  // v_0 .. v_N
  std::vector<double> thresholds;    // pi_1 .. pi_N; thresholds[n-1] = pi_n
  int n_final = 0;
  double sup_error_bound = 0.0;       // (1-p)^n_final
  double fixed_point_residual = 0.0;  // sup |J[v_N] - v_N|
  int concavity_repairs = 0;

  const GridFunction& final_value() const { return values.back(); }
  double value_at(double pi) const { return values.back()(pi); }
  double threshold() const { return thresholds.back(); }
  double threshold_at(int n) const {
    if (n < 1 || n > n_final)
      throw request_more_error("threshold_at: iterate index out of range");
    return thresholds[static_cast<std::size_t>(n - 1)];
  }

  // Index and threshold of the rule whose Bayes risk exceeds the optimum by
  // at most eps.
  std::pair<int, double> epsilon_optimal_rule(double eps) const {
    const int n = min_iterations_for(eps, params.p);
    if (n > n_final)
      throw request_more_error(
          "epsilon_optimal_rule: need " + std::to_string(n) +
          " iterates, have " + std::to_string(n_final));
    return {n, threshold_at(n)};
  }
};

// Dynamic-programming engine on a fixed tabulation grid. All methods are
// const; a solver instance may be shared by concurrent readers.
class ValueSolver {
public:
  explicit ValueSolver(const ModelParams& params, SolverOptions opts = {},
                       bool allow_zero_cost = false)
      : params_(params), opts_(opts) {
    params_.validate(allow_zero_cost);
    if (opts_.grid_size < 3)
      throw domain_error("SolverOptions: grid_size too small");
    if (!(opts_.bisect_tol > 0.0))
      throw domain_error("SolverOptions: bisect_tol must be positive");
    gauss_order_ = gauss_order(opts_.quadrature_tol);
    roots_ = compute_roots(params_);
    knots_ = cosine_grid(static_cast<std::size_t>(opts_.grid_size));
    mesh_ = build_integration_mesh(*knots_, params_.p, kMinCellWidth);
    knot_mesh_index_.resize(knots_->size());
    for (std::size_t i = 0; i < knots_->size(); ++i) {
      const auto it =
          std::lower_bound(mesh_.begin(), mesh_.end(), (*knots_)[i]);
      knot_mesh_index_[i] = static_cast<std::size_t>(it - mesh_.begin());
    }
  }

  static int gauss_order(double quadrature_tol) {
    if (!(quadrature_tol > 0.0))
      throw domain_error("SolverOptions: quadrature_tol must be positive");
    const int order =
        static_cast<int>(std::lround(-std::log10(quadrature_tol)));
    return std::clamp(order, 2, 10);
  }

  const ModelParams& params() const { return params_; }
  const Roots& roots() const { return roots_; }
  const SolverOptions& options() const { return opts_; }
  const KnotsPtr& knots() const { return knots_; }

  GridFunction terminal_cost() const {
    auto g = GridFunction::tabulate(knots_, [](double x) { return 1.0 - x; });
    g.is_concave_expected = true;
    g.derived_from_iteration = 0;
    return g;
  }

  // Integrand of the exit-time expectation: which = 1 pairs the running
  // cost with eta, which = 2 with psi.
  double integrand_u(const GridFunction& w, double y, int which) const {
    if (!(y > 0.0 && y < 1.0))
      throw domain_error("integrand_u: y must lie in (0,1)");
    if (which != 1 && which != 2)
      throw domain_error("integrand_u: which must be 1 or 2");
    const double f = running_cost(w, y);
    const double scale = 2.0 / ((roots_.m1 - roots_.m2) * sigma_sq(y, params_));
    return f * scale * (which == 1 ? eta(y, roots_) : psi(y, roots_));
  }

  // B[w](r) = int_0^r 2 psi(y)/sigma^2(y) [lambda h - g - lambda w(S(y))] dy.
  // Its sign at r tells on which side of r the smooth-fit threshold lies.
  double compute_B(const GridFunction& w, double r) const {
    if (!(r > 0.0 && r < 1.0))
      throw domain_error("compute_B: r must lie in (0,1)");
    const auto f = [&](double y) {
      return params_.lambda * cost_h(y) - running_cost(w, y);
    };
    const PsiCumulative table = build_psi_cumulative(f, r);
    return eval_psi_cumulative(table, f, r);
  }

  // Unique root of B[w] inside the closed-form bracket, by bisection.
  // Requires a concave w; a sign violation at a bracket end signals that
  // the concavity assumption is broken.
  ThresholdSolve solve_threshold(const GridFunction& w) const {
    params_.validate(/*allow_zero_cost=*/false);
    check_bounds(w, "solve_threshold");
    check_concave(w, "solve_threshold");
    ThresholdSolve out;
    out.bracket_lo = closed_form_root_h(params_, roots_);
    out.bracket_hi = closed_form_root_zero(params_, roots_);
    out.d = solve_d(w);

    const auto f = [&](double y) {
      return params_.lambda * cost_h(y) - running_cost(w, y);
    };
    const PsiCumulative table = build_psi_cumulative(f, out.bracket_hi);
    const auto B = [&](double r) { return eval_psi_cumulative(table, f, r); };

    double lo = out.bracket_lo, hi = out.bracket_hi;
    const double b_lo = B(lo), b_hi = B(hi);
    const double sign_tol = 1e-6 * (1.0 + std::abs(b_lo) + std::abs(b_hi));
    if (b_lo < -sign_tol || b_hi > sign_tol)
      throw inconsistency_error(
          "solve_threshold: B[w] sign conditions violated at the bracket "
          "ends (w not admissibly concave)");
    if (b_lo <= 0.0) {  // root sits at the lower bracket end (w = h case)
      out.r = lo;
      out.residual = std::abs(b_lo);
      return out;
    }
    int it = 0;
    while (hi - lo > opts_.bisect_tol && it < 200) {
      const double mid = 0.5 * (lo + hi);
      if (B(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
      ++it;
    }
    out.r = 0.5 * (lo + hi);
    out.residual = std::abs(B(out.r));
    out.iterations = it;
    return out;
  }

  // Exit-time expectation H_r[w] tabulated on the grid: solves
  // (A0 - lambda) H + g + lambda w(S(.)) = 0 on (0,r), equals h on [r,1],
  // and takes the value w(p) at 0. Requires only 0 <= w <= h; the result is
  // concave only when r is the smooth-fit threshold of a concave w.
  GridFunction apply_H(const GridFunction& w, double r) const {
    if (!(r > 0.0 && r < 1.0))
      throw domain_error("apply_H: r must lie in (0,1)");
    check_bounds(w, "apply_H");
    const auto f = [&](double y) { return running_cost(w, y); };
    // the cumulative table integrates f * 2 psi / sigma^2; dividing by
    // m1 - m2 turns it into the integral of u_2
    const double inv_wronskian = 1.0 / (roots_.m1 - roots_.m2);
    const auto u1 = [&](double y) {
      return 2.0 * f(y) * eta(y, roots_) /
             ((roots_.m1 - roots_.m2) * sigma_sq(y, params_));
    };

    const PsiCumulative table = build_psi_cumulative(f, r);
    const double I2_r = inv_wronskian * eval_psi_cumulative(table, f, r);
    const double psi_r = psi(r, roots_);
    const double coef_a = (cost_h(r) - eta(r, roots_) * I2_r) / psi_r;

    const auto& knots = *knots_;
    std::vector<double> ord(knots.size());
    ord[0] = w(jump_map(0.0, params_.p));
    std::size_t i = knots.size() - 1;
    for (; i >= 1 && knots[i] >= r; --i) ord[i] = cost_h(knots[i]);

    // Downward sweep from r accumulating I1(x) = int_x^r u1; recorded at
    // every knot below r. Positive terms only, so no cancellation.
    double acc = 0.0;
    double upper = r;
    for (; i >= 1; --i) {
      acc += integrate_over(knots[i], upper, u1);
      upper = knots[i];
      const double I2 = inv_wronskian * table.cum[knot_mesh_index_[i]];
      ord[i] = psi(knots[i], roots_) * (coef_a + acc) +
               eta(knots[i], roots_) * I2;
    }
    for (double v : ord)
      if (!std::isfinite(v))
        throw numeric_error("apply_H: non-finite ordinate", 0.0);

    GridFunction out(knots_, std::move(ord));
    out.is_concave_expected = false;
    return out;
  }

  // J[w] = H_{r[w]}[w] together with the threshold diagnostics.
  std::pair<GridFunction, ThresholdSolve> apply_J(const GridFunction& w) const {
    ThresholdSolve ts = solve_threshold(w);
    GridFunction out = apply_H(w, ts.r);
    out.is_concave_expected = true;
    return {std::move(out), ts};
  }

  // Value iteration v_0 = h, v_{n+1} = J[v_n]: at least
  // ceil(ln eps / ln(1-p)) steps, then until the successive sup-difference
  // falls below eps/2.
  ValueIteration value_iterate() const {
    params_.validate(/*allow_zero_cost=*/false);
    const double eps = opts_.epsilon;
    const int n_star =
        std::max(min_iterations_for(eps, params_.p), opts_.min_iterations);
    ValueIteration vi;
    vi.params = params_;
    vi.values.push_back(terminal_cost());

    const GridFunction h = terminal_cost();
    int n = 0;
    double supdiff = std::numeric_limits<double>::infinity();
    while (n < n_star || supdiff > 0.5 * eps) {
      if (n >= n_star + opts_.max_extra_iterations)
        throw numeric_error(
            "value_iterate: sup-difference failed to reach epsilon/2",
            supdiff);
      auto [next, ts] = apply_J(vi.values.back());
      ++n;
      next.derived_from_iteration = n;
      tidy_iterate(next, h, vi.concavity_repairs);
      supdiff = next.sup_diff(vi.values.back());
      vi.values.push_back(std::move(next));
      vi.thresholds.push_back(ts.r);
    }
    vi.n_final = n;
    vi.sup_error_bound = std::pow(1.0 - params_.p, n);
    vi.fixed_point_residual =
        apply_J(vi.values.back()).first.sup_diff(vi.values.back());
    return vi;
  }

private:
  static constexpr double kMinCellWidth = 1e-12;

  // g(y) + lambda w(S(y)): the running cost seen by the pre-arrival
  // diffusion. Well defined on [0,1).
  double running_cost(const GridFunction& w, double y) const {
    return cost_g(y, params_.c) + params_.lambda * w(jump_map(y, params_.p));
  }

  void check_bounds(const GridFunction& w, const char* where) const {
    const auto& k = w.knots();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = w.ordinates()[i];
      if (!(v >= -1e-8 && v <= cost_h(k[i]) + 1e-8))
        throw inconsistency_error(std::string(where) +
                                  ": w violates 0 <= w <= h");
    }
  }

  void check_concave(const GridFunction& w, const char* where) const {
    if (w.concavity_violation() > 1e-7)
      throw inconsistency_error(std::string(where) + ": w is not concave");
  }

  // Root of -g - lambda w(S(.)) + lambda h on (0,1); convex, positive at 0
  // and negative at 1 when c > 0.
  double solve_d(const GridFunction& w) const {
    const auto q = [&](double x) {
      return params_.lambda * cost_h(x) - running_cost(w, x);
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (q(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Sum of per-cell Gauss integrals over [a,b], split at the interior mesh
  // points so the integrand is smooth within every cell.
  template <class F>
  double integrate_over(double a, double b, const F& f) const {
    double acc = 0.0;
    auto it = std::upper_bound(mesh_.begin(), mesh_.end(), a);
    double lo = a;
    const GaussRule& rule = gauss_rule(gauss_order_);
    while (it != mesh_.end() && *it < b) {
      acc += integrate_cell(f, lo, *it, rule);
      lo = *it;
      ++it;
    }
    acc += integrate_cell(f, lo, b, rule);
    return acc;
  }

  // Cumulative integral of f(y) * 2 psi(y)/sigma^2(y) from 0, stored at
  // every mesh point up to x_max.
  struct PsiCumulative {
    std::vector<double> cum;  // cum[m] = integral over [0, mesh[m]]
    std::size_t built = 0;    // valid for indices <= built
  };

  // Closed form for the leftmost piece [0,b]: with 2 psi/sigma^2 =
  // psi''/lambda, integration by parts against the secant of f gives
  // (f(b) psi'(b) - f'[0,b] psi(b)) / lambda; the boundary terms at 0
  // vanish. Plain quadrature cannot resolve the y^(m1-2) mass of this
  // piece when m1 is close to 1.
  template <class F>
  double left_stub(const F& f, double b) const {
    const double fb = f(b), f0 = f(0.0);
    return (fb * psi_prime(b, roots_) - ((fb - f0) / b) * psi(b, roots_)) /
           params_.lambda;
  }

  template <class F>
  PsiCumulative build_psi_cumulative(const F& f, double x_max) const {
    PsiCumulative t;
    t.cum.assign(mesh_.size(), 0.0);
    const auto integrand = [&](double y) {
      return f(y) * 2.0 * psi(y, roots_) / sigma_sq(y, params_);
    };
    const GaussRule& rule = gauss_rule(gauss_order_);
    t.cum[1] = left_stub(f, mesh_[1]);
    std::size_t m = 2;
    for (; m < mesh_.size() && mesh_[m - 1] < x_max; ++m)
      t.cum[m] = t.cum[m - 1] +
                 integrate_cell(integrand, mesh_[m - 1], mesh_[m], rule);
    t.built = m - 1;
    if (!std::isfinite(t.cum[t.built]))
      throw numeric_error("psi-weighted cumulative integral overflowed",
                          t.cum[t.built]);
    return t;
  }

  template <class F>
  double eval_psi_cumulative(const PsiCumulative& t, const F& f,
                             double x) const {
    if (x <= mesh_[1]) return left_stub(f, x);
    const auto integrand = [&](double y) {
      return f(y) * 2.0 * psi(y, roots_) / sigma_sq(y, params_);
    };
    std::size_t m = static_cast<std::size_t>(
        std::upper_bound(mesh_.begin(), mesh_.end(), x) - mesh_.begin() - 1);
    m = std::min(m, t.built);
    double val = t.cum[m];
    if (x > mesh_[m])
      val += integrate_cell(integrand, mesh_[m], x, gauss_rule(gauss_order_));
    return val;
  }

  // Clamp rounding-level bound breaches and repair concavity defects that
  // exceed tolerance; larger breaches are structural errors.
  void tidy_iterate(GridFunction& v, const GridFunction& h,
                    int& repairs) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      double& x = v.ordinates()[i];
      const double cap = h.ordinates()[i];
      if (x < -1e-8 || x > cap + 1e-8)
        throw inconsistency_error(
            "value_iterate: iterate violates 0 <= v <= h");
      x = std::clamp(x, 0.0, cap);
    }
    if (v.concavity_violation() > 1e-8) {
      v.project_concave();
      ++repairs;
    }
  }

  ModelParams params_;
  SolverOptions opts_;
  Roots roots_;
  KnotsPtr knots_;
  std::vector<double> mesh_;
  std::vector<std::size_t> knot_mesh_index_;
  int gauss_order_ = 10;
};

}  // namespace disorder
