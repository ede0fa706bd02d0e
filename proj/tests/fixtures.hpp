// Shared hand-built instances.
#pragma once

#include "sdplr/model.hpp"

namespace fixtures {

/// 3x3 instance whose plain SDP dual has optimum -1 while the primal optimum
/// is 0; adding the trace bound 1 closes the gap. Constraints:
///   2 X_13 = 0, 2 X_23 = 0, X_11 = 0, 2 X_12 - 2 X_33 = -2.
inline sdplr::Problem duality_gap_problem() {
    using sdplr::Constraint;
    using sdplr::SparseSym;
    sdplr::Problem P;
    P.n = 3;
    P.cost = sdplr::Cost(SparseSym(3, {{0, 1, 0.5}}));
    P.constraints.push_back(Constraint::general(SparseSym(3, {{0, 2, 1.0}}), 0.0));
    P.constraints.push_back(Constraint::general(SparseSym(3, {{1, 2, 1.0}}), 0.0));
    P.constraints.push_back(Constraint::general(SparseSym(3, {{0, 0, 1.0}}), 0.0));
    P.constraints.push_back(
        Constraint::general(SparseSym(3, {{0, 1, 1.0}, {2, 2, -2.0}}), -2.0));
    P.b = {0.0, 0.0, 0.0, -2.0};
    P.trace_bound = 1.0;
    P.sense_flip = false;
    return P;
}

}  // namespace fixtures
