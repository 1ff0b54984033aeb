// Walks through the main objects: a spectral shift function between two
// small matrices, the bounds it satisfies, and a surface-disorder ensemble.

#include <iostream>

#include "ssf/bounds.hpp"
#include "ssf/ensemble.hpp"
#include "ssf/format.hpp"

int main() {
  using ssf::format_double;

  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 0) = 2.0;
  const ssf::SymmetricOperator A(a);
  const ssf::SymmetricOperator C(c);
  const ssf::SymmetricOperator B(a + c);

  const auto xi = ssf::spectral_shift(A, B);
  std::cout << "xi(.; A+C, A):\n";
  for (std::size_t i = 0; i < xi.pieces(); ++i) {
    const auto [lo, hi] = xi.piece(i);
    std::cout << "  [" << format_double(lo) << ", " << format_double(hi) << ") -> " << format_double(xi.values()[i]) << '\n';
  }
  std::cout << "integral = " << format_double(ssf::step_integral(xi)) << " (tr C = 2)\n\n";

  for (const auto& r : {ssf::check_chn_lp_bound(A, C, 2.0), ssf::check_rank_bound(A, C),
                        ssf::check_trace_formula(A, C, ssf::TestFunction::gaussian(0.0, 1.0))})
    std::cout << r.name << ": lhs " << format_double(r.lhs) << ", rhs " << format_double(r.rhs) << (r.holds ? "  ok" : "  FAILED") << '\n';

  ssf::SurfaceFamily family;
  family.W = 6;
  family.P = 4;
  const auto res = ssf::estimate_surface_density(family, 12, ssf::DisorderSpec::uniform(0.0, 1.0), ssf::LambdaGrid{-5.0, 6.0, 12}, 20, 7);
  std::cout << "\nnormalized surface SSF, L = 12, 20 realizations:\n";
  const auto pts = res.grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    std::cout << "  lambda " << format_double(pts[i]) << ": mean " << format_double(res.mean[i]) << '\n';
  return 0;
}
