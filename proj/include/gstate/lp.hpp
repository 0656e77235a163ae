#pragma once
// Tiny exact-arithmetic-free linear program in three free variables, used
// for Chebyshev centres and for maximising piecewise-affine concave
// functions over polygons.

#include <array>
#include <span>

namespace gstate {

// a . z <= b
struct Halfspace3 {
  std::array<double, 3> a{};
  double b = 0.0;
};

struct Lp3Result {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  std::array<double, 3> z{};
  double value = 0.0;
};

// maximise c . z subject to every halfspace. Solved through the dual
// (min b.w, A^T w = c, w >= 0) by a two-phase tableau simplex with Bland's rule.
Lp3Result maximize3(const std::array<double, 3>& c, std::span<const Halfspace3> constraints);

}  // namespace gstate
