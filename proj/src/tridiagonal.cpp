#include "dysonlab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dysonlab/errors.hpp"

namespace dysonlab {

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& diag,
                                        const Eigen::Ref<const Eigen::VectorXd>& offdiag) {
  const Eigen::Index n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() != n - 1)
    throw DomainError("tridiagonal_eigenvalues: off-diagonal must have size n - 1");

  Eigen::VectorXd d = diag;
  // e(i) couples rows i and i + 1; e(n - 1) is a sentinel zero.
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e.head(n - 1) = offdiag;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const long budget = 50L * n;
  long sweeps = 0;

  for (Eigen::Index l = 0; l < n; ++l) {
    for (;;) {
      Eigen::Index m = l;
      for (; m < n - 1; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > budget)
        throw NumericError("tridiagonal_eigenvalues: QL iteration did not converge");

      // Wilkinson shift from the leading 2x2 block.
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = std::hypot(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));

      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (Eigen::Index i = m - 1; i >= l; --i) {
        double f = s * e(i);
        const double b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        if (r == 0.0) {
          d(i + 1) -= p;
          e(m) = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + 2.0 * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0.0;
    }
  }
  std::sort(d.data(), d.data() + n);
  return d;
}

}  // namespace dysonlab
