#pragma once

#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// Unweighted path-graph Laplacian: tridiagonal with -1 couplings, the state
/// weight family behind the worked n = 7 design instance.
inline SymMatrix q2_path(int n) {
    if (n < 2) throw ValidationError("q2_path: need n >= 2");
    Matrix q(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        q(i, i) += 1.0;
        q(i + 1, i + 1) += 1.0;
        q(i, i + 1) -= 1.0;
        q(i + 1, i) -= 1.0;
    }
    return SymMatrix(std::move(q));
}

/// The consensus-complement projector I - 1 1^T/n, the isotropic state weight.
inline SymMatrix q2_projector(int n) {
    if (n < 2) throw ValidationError("q2_projector: need n >= 2");
    Matrix q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / n;
    return SymMatrix(std::move(q));
}

} // namespace lapsync
