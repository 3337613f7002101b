// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense monolithic solvers used as oracles: the full coupled systems are
// assembled without static condensation and solved with dense LU. Kept
// independent of the production assembly paths.

#ifndef HDGMD_TESTS_ORACLES_HPP
#define HDGMD_TESTS_ORACLES_HPP

#include "hdgmd/flow.hpp"
#include "hdgmd/transport.hpp"

namespace hdgmd::oracles {

/// Full (u, p, p_hat) saddle system with the constant kernel removed by
/// bordering; p and p_hat shifted to zero pressure mean.
FlowSolution solve_darcy_dense(const FeSpace& space, const PhysicalModel& model,
                               const Discretization& disc, const CellField& c_prev, double t);

/// Full (theta, q, c, c_hat) system.
TransportSolution solve_transport_dense(const FeSpace& space, const PhysicalModel& model,
                                        const Discretization& disc, const CellField& c_prev,
                                        const VelocityInput& velocity, double t);

} // namespace hdgmd::oracles

#endif
