#pragma once

#include <Eigen/Core>

namespace dysonlab {

/// Eigenvalues of the symmetric tridiagonal matrix with main diagonal `diag`
/// (size n) and sub-diagonal `offdiag` (size n - 1), by the implicit-shift QL
/// method with Wilkinson shifts. Returned in ascending order.
///
/// Throws NumericError when the total number of QL sweeps exceeds 50 n.
Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& diag,
                                        const Eigen::Ref<const Eigen::VectorXd>& offdiag);

}  // namespace dysonlab
