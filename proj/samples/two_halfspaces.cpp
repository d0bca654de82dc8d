// Halpern iteration for the projection of u = (1, 1) onto the third quadrant
// {x1 <= 0, x2 <= 0}, using S = (P1 + P2) / 2, checked against the oracle.

#include <iostream>

#include "fixedpoint/iterate.hpp"
#include "fixedpoint/oracle.hpp"

int main() {
  using namespace fixedpoint;

  const ConvexSet h1 = make_halfspace(Vector{1.0, 0.0}, 0.0);
  const ConvexSet h2 = make_halfspace(Vector{0.0, 1.0}, 0.0);
  const Operator s = convex_combo({0.5, 0.5}, {projection_operator(h1), projection_operator(h2)});

  const Vector u{1.0, 1.0};
  const OracleResult q = project_intersection_oracle({h1, h2}, u);

  StopRule stop;
  stop.target_tol = 1e-3;
  const IterationTrace trace = halpern(constant_sequence(s), u, u, default_alpha(), stop, q.value);

  const Vector& x = trace.final_iterate;
  std::cout << "oracle Qu      = (" << q.value[0] << ", " << q.value[1] << ")  via "
            << to_string(q.method) << '\n'
            << "final iterate  = (" << x[0] << ", " << x[1] << ")\n"
            << "iterations     = " << trace.iterations() << " (" << to_string(trace.stop_reason)
            << ")\n"
            << "distance to Qu = " << trace.dist_to_ref.back() << '\n';
  return trace.stop_reason == StopReason::max_iters ? 1 : 0;
}
