// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/flow.hpp"

#include <cmath>

namespace hdgmd {

FlowSolver::FlowSolver(const FeSpace& space, const PhysicalModel& model, const Discretization& disc)
    : space_(&space), model_(&model), disc_(&disc) {
  const_cell_ = project_cells(space, [](const Vec2&) { return 1.0; });
  const_face_ = project_faces(space, [](const Vec2&) { return 1.0; });
  domain_area_ = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) domain_area_ += space.mesh().cell_area(e);

  // RT degree-of-freedom matrices: global-normal face moments first, then
  // interior moments against the vector P_{k-1} basis. Shared by every
  // reconstruction on this mesh.
  const Mesh& mesh = space.mesh();
  const int nrt = space.rt_dim();
  const int nf = space.face_dim();
  const int nsub = space.sub_basis.size();
  rt_lu_.resize(mesh.num_cells());
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      Eigen::MatrixXd dof = Eigen::MatrixXd::Zero(nrt, nrt);
      for (int lf = 0; lf < 3; ++lf) {
        const Vec2 n = ctx.face_normal(lf);
        for (int q = 0; q < ctx.nfq(); ++q) {
          const double w = ctx.face_weight(lf, q);
          for (int j = 0; j < nf; ++j) {
            const double mu = ctx.face_mu(lf, q, j);
            for (int b = 0; b < nrt; ++b)
              dof(lf * nf + j, b) += w * mu * ctx.rt_trace_value(lf, q, b).dot(n);
          }
        }
      }
      for (int q = 0; q < ctx.nq(); ++q) {
        const double w = ctx.weight(q);
        for (int m = 0; m < nsub; ++m) {
          const double phi = ctx.sub_value(q, m);
          for (int b = 0; b < nrt; ++b) {
            const Vec2 rv = ctx.rt_value(q, b);
            dof(3 * nf + 2 * m, b) += w * phi * rv.x();
            dof(3 * nf + 2 * m + 1, b) += w * phi * rv.y();
          }
        }
      }
      rt_lu_[e].compute(dof);
    }
  });
}

FlowSolver::SourceSlice FlowSolver::source_slice(double t) const {
  SourceSlice slice{model_, t, 0.0};
  if (model_->flow_forcing) {
    double integral = 0.0;
    for (int e = 0; e < space_->mesh().num_cells(); ++e) {
      ElementContext ctx(*space_, e);
      for (int q = 0; q < ctx.nq(); ++q)
        integral += ctx.weight(q) * model_->flow_forcing(ctx.point(q), t);
    }
    slice.shift = integral / domain_area_;
  }
  return slice;
}

FlowSolution FlowSolver::solve(const CellField& c_prev, double t) const {
  const FeSpace& space = *space_;
  const Mesh& mesh = space.mesh();
  const int nk = space.cell_dim();
  const int nu = 2 * nk;
  const int nint = nu + nk;
  const int nf = space.face_dim();
  const int ntr = 3 * nf;
  const double sigma = disc_->sigma_u;

  const SourceSlice source = source_slice(t);

  // Discrete compatibility of the sources.
  {
    double integral = 0.0, scale = 0.0;
    for (int e = 0; e < mesh.num_cells(); ++e) {
      ElementContext ctx(space, e);
      for (int q = 0; q < ctx.nq(); ++q) {
        const Vec2 x = ctx.point(q);
        const double w = ctx.weight(q);
        integral += w * source(x);
        scale += w * (std::abs(model_->f_inject(x, t)) + std::abs(model_->f_produce(x, t)) +
                      (model_->flow_forcing ? std::abs(model_->flow_forcing(x, t)) : 0.0));
      }
    }
    if (std::abs(integral) > 1e-9 * std::max(scale, 1e-12))
      throw SolverError("flow: incompatible sources, net injection " + std::to_string(integral));
  }

  CondensedSystem condensed(mesh.num_faces(), nf);
  condensed.reserve(mesh.num_cells());

  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      const int region = mesh.region_tags[e];
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nint, nint);
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nint, ntr);
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(ntr, nint);
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(ntr, ntr);
      Eigen::VectorXd F = Eigen::VectorXd::Zero(nint);

      for (int q = 0; q < ctx.nq(); ++q) {
        const double w = ctx.weight(q);
        const double cval = eval_scalar(ctx, c_prev.cell(e), q);
        const Mat2 kinv = model_->resistivity(region, cval);
        const double fval = source(ctx.point(q));
        for (int i = 0; i < nk; ++i) {
          const double phi_i = ctx.value(q, i);
          const Vec2 grad_i = ctx.gradient(q, i);
          F[nu + i] += w * fval * phi_i;
          for (int j = 0; j < nk; ++j) {
            const double phi_j = ctx.value(q, j);
            const Vec2 grad_j = ctx.gradient(q, j);
            // (K^-1 u, r)
            for (int d = 0; d < 2; ++d)
              for (int dd = 0; dd < 2; ++dd)
                A(2 * i + d, 2 * j + dd) += w * kinv(d, dd) * phi_i * phi_j;
            // -(p, div r) and (div u, s)
            for (int d = 0; d < 2; ++d) {
              A(2 * i + d, nu + j) -= w * phi_j * grad_i[d];
              A(nu + i, 2 * j + d) += w * phi_i * grad_j[d];
            }
          }
        }
      }

      for (int lf = 0; lf < 3; ++lf) {
        const int sgn = ctx.normal_sign(lf);
        const Vec2 ne = sgn * ctx.face_normal(lf);
        for (int q = 0; q < ctx.nfq(); ++q) {
          const double w = ctx.face_weight(lf, q);
          for (int i = 0; i < nk; ++i) {
            const double ti = ctx.trace_value(lf, q, i);
            for (int j = 0; j < nk; ++j)
              A(nu + i, nu + j) += w * sigma * ti * ctx.trace_value(lf, q, j);
            for (int j = 0; j < nf; ++j) {
              const double mu = ctx.face_mu(lf, q, j);
              for (int d = 0; d < 2; ++d) {
                C(2 * i + d, lf * nf + j) += w * mu * ti * ne[d];
                D(lf * nf + j, 2 * i + d) += w * mu * ti * ne[d];
              }
              C(nu + i, lf * nf + j) -= w * sigma * ti * mu;
              D(lf * nf + j, nu + i) += w * sigma * mu * ti;
            }
          }
          for (int j = 0; j < nf; ++j)
            for (int jj = 0; jj < nf; ++jj)
              E(lf * nf + j, lf * nf + jj) -=
                  w * sigma * ctx.face_mu(lf, q, j) * ctx.face_mu(lf, q, jj);
        }
      }

      const std::array<int, 3> faces = {ctx.face_id(0), ctx.face_id(1), ctx.face_id(2)};
      condensed.set_element(e, faces, A, C, D, E, F, Eigen::VectorXd::Zero(ntr));
    }
  });

  SparseSystem trace_system = condensed.assemble_trace();
  Eigen::VectorXd nullvec(space.num_trace_dofs());
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int j = 0; j < nf; ++j) nullvec[f * nf + j] = const_face_.face(f)[j];
  const Eigen::VectorXd trace = solve_sparse(trace_system, nullvec);

  FlowSolution sol;
  sol.time = t;
  sol.velocity = CellField(mesh.num_cells(), nu);
  sol.pressure = CellField(mesh.num_cells(), nk);
  sol.pressure_trace = FaceField(mesh.num_faces(), nf);
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int j = 0; j < nf; ++j) sol.pressure_trace.face(f)[j] = trace[f * nf + j];
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      const Eigen::VectorXd interior = condensed.recover_interior(e, trace);
      auto u = sol.velocity.cell(e);
      auto p = sol.pressure.cell(e);
      for (int i = 0; i < nu; ++i) u[i] = interior[i];
      for (int i = 0; i < nk; ++i) p[i] = interior[nu + i];
    }
  });

  // Shift p and p_hat jointly so the pressure has zero mean; the pair is
  // only determined up to a common constant.
  double mean = 0.0, area = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q) {
      mean += ctx.weight(q) * eval_scalar(ctx, sol.pressure.cell(e), q);
      area += ctx.weight(q);
    }
  }
  mean /= area;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    auto p = sol.pressure.cell(e);
    const auto one = const_cell_.cell(e);
    for (int i = 0; i < nk; ++i) p[i] -= mean * one[i];
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    auto ph = sol.pressure_trace.face(f);
    const auto one = const_face_.face(f);
    for (int j = 0; j < nf; ++j) ph[j] -= mean * one[j];
  }
  return sol;
}

void FlowSolver::reconstruct(FlowSolution& sol) const {
  const FeSpace& space = *space_;
  const Mesh& mesh = space.mesh();
  const int nk = space.cell_dim();
  const int nf = space.face_dim();
  const int nrt = space.rt_dim();
  const int nsub = space.sub_basis.size();
  const double sigma = disc_->sigma_u;

  // Face moments of u.n + sigma_u (p - p_hat) w.r.t. the global normal,
  // evaluated from the owning cell so both sides share identical values.
  std::vector<Eigen::VectorXd> face_moments(mesh.num_faces());
  parallel_for(mesh.num_faces(), [&](int begin, int end) {
    for (int f = begin; f < end; ++f) {
      const int owner = mesh.face_cells[f][0];
      ElementContext ctx(space, owner);
      int lf = 0;
      while (ctx.face_id(lf) != f) ++lf;
      Eigen::VectorXd m = Eigen::VectorXd::Zero(nf);
      const auto u = sol.velocity.cell(owner);
      const auto p = sol.pressure.cell(owner);
      const auto ph = sol.pressure_trace.face(f);
      const Vec2 n = ctx.face_normal(lf); // outward for the owner
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double w = ctx.face_weight(lf, q);
        const double flux = eval_vector_trace(ctx, u, lf, q).dot(n) +
                            sigma * (eval_scalar_trace(ctx, p, lf, q) - eval_face(ctx, ph, lf, q));
        for (int j = 0; j < nf; ++j) m[j] += w * flux * ctx.face_mu(lf, q, j);
      }
      face_moments[f] = m;
    }
  });

  sol.conforming_velocity = CellField(mesh.num_cells(), nrt);
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nrt);
      for (int lf = 0; lf < 3; ++lf) rhs.segment(lf * nf, nf) = face_moments[ctx.face_id(lf)];
      const auto u = sol.velocity.cell(e);
      for (int q = 0; q < ctx.nq(); ++q) {
        const double w = ctx.weight(q);
        const Vec2 uval = eval_vector(ctx, u, q);
        for (int m = 0; m < nsub; ++m) {
          const double phi = ctx.sub_value(q, m);
          rhs[3 * nf + 2 * m] += w * phi * uval.x();
          rhs[3 * nf + 2 * m + 1] += w * phi * uval.y();
        }
      }
      const Eigen::VectorXd coeffs = rt_lu_[e].solve(rhs);
      std::copy(coeffs.data(), coeffs.data() + nrt, sol.conforming_velocity.cell(e).begin());
    }
  });
  (void)nk;
}

FlowEnergy flow_energy_identity(const FlowSolver& solver, const CellField& c_prev,
                                const FlowSolution& sol) {
  FlowEnergy out;
  const FeSpace& space = solver.space();
  const Mesh& mesh = space.mesh();
  const PhysicalModel& model = solver.model();
  const FlowSolver::SourceSlice source = solver.source_slice(sol.time);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    const int region = mesh.region_tags[e];
    const auto u = sol.velocity.cell(e);
    const auto p = sol.pressure.cell(e);
    for (int q = 0; q < ctx.nq(); ++q) {
      const double w = ctx.weight(q);
      const Vec2 uval = eval_vector(ctx, u, q);
      const Mat2 kinv = model.resistivity(region, eval_scalar(ctx, c_prev.cell(e), q));
      out.lhs += w * uval.dot(kinv * uval);
      out.rhs += w * source(ctx.point(q)) * eval_scalar(ctx, p, q);
    }
    for (int lf = 0; lf < 3; ++lf) {
      const auto ph = sol.pressure_trace.face(ctx.face_id(lf));
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double d = eval_scalar_trace(ctx, p, lf, q) - eval_face(ctx, ph, lf, q);
        out.lhs += ctx.face_weight(lf, q) * solver.disc().sigma_u * d * d;
      }
    }
  }
  return out;
}

double FlowEnergy::defect() const {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

DivergenceDefect flow_divergence_defect(const FeSpace& space, const FlowSolver& solver,
                                        const FlowSolution& sol) {
  DivergenceDefect out;
  if (!sol.has_reconstruction()) return out;
  const Mesh& mesh = space.mesh();
  const FlowSolver::SourceSlice source = solver.source_slice(sol.time);
  const CellField projected = project_cells(space, [&](const Vec2& x) { return source(x); });
  double source_sq = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    const auto U = sol.conforming_velocity.cell(e);
    double cell_sq = 0.0;
    for (int q = 0; q < ctx.nq(); ++q) {
      double divu = 0.0;
      for (int i = 0; i < space.rt_dim(); ++i) divu += U[i] * ctx.rt_div(q, i);
      const double d = divu - eval_scalar(ctx, projected.cell(e), q);
      cell_sq += ctx.weight(q) * d * d;
      const double f = source(ctx.point(q));
      source_sq += ctx.weight(q) * f * f;
    }
    out.max_defect = std::max(out.max_defect, std::sqrt(cell_sq));
  }
  out.source_norm = std::sqrt(source_sq);
  return out;
}

double flow_normal_jump(const FeSpace& space, const FlowSolution& sol) {
  if (!sol.has_reconstruction()) return 0.0;
  const Mesh& mesh = space.mesh();
  double max_jump = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.boundary_flags[f]) continue;
    const int e0 = mesh.face_cells[f][0];
    const int e1 = mesh.face_cells[f][1];
    ElementContext ctx0(space, e0), ctx1(space, e1);
    int lf0 = 0, lf1 = 0;
    while (ctx0.face_id(lf0) != f) ++lf0;
    while (ctx1.face_id(lf1) != f) ++lf1;
    const Vec2 n = mesh.face_normals[f];
    double sq = 0.0;
    for (int q = 0; q < ctx0.nfq(); ++q) {
      const double a = eval_rt_trace(ctx0, sol.conforming_velocity.cell(e0), lf0, q).dot(n);
      const double b = eval_rt_trace(ctx1, sol.conforming_velocity.cell(e1), lf1, q).dot(n);
      sq += ctx0.face_weight(lf0, q) * (a - b) * (a - b);
    }
    max_jump = std::max(max_jump, std::sqrt(sq));
  }
  return max_jump;
}

double reconstruction_scaling_ratio(const FeSpace& space, const Discretization& disc,
                                    const FlowSolution& sol) {
  const Mesh& mesh = space.mesh();
  double diff_sq = 0.0, stab_sq = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q) {
      const Vec2 d = eval_rt(ctx, sol.conforming_velocity.cell(e), q) -
                     eval_vector(ctx, sol.velocity.cell(e), q);
      diff_sq += ctx.weight(q) * d.squaredNorm();
    }
    for (int lf = 0; lf < 3; ++lf) {
      const auto ph = sol.pressure_trace.face(ctx.face_id(lf));
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double d =
            eval_scalar_trace(ctx, sol.pressure.cell(e), lf, q) - eval_face(ctx, ph, lf, q);
        stab_sq += ctx.face_weight(lf, q) * disc.sigma_u * d * d;
      }
    }
  }
  const double denom = std::sqrt(mesh.h_max) * std::sqrt(stab_sq);
  return std::sqrt(diff_sq) / std::max(denom, 1e-300);
}

double flow_stability_functional(const FeSpace& space, const Discretization& disc,
                                 const FlowSolution& sol) {
  const CellField lifted = lift_gradient(space, sol.pressure, sol.pressure_trace);
  double stab_sq = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int lf = 0; lf < 3; ++lf) {
      const auto ph = sol.pressure_trace.face(ctx.face_id(lf));
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double d =
            eval_scalar_trace(ctx, sol.pressure.cell(e), lf, q) - eval_face(ctx, ph, lf, q);
        stab_sq += ctx.face_weight(lf, q) * disc.sigma_u * d * d;
      }
    }
  }
  return l2_norm_vector(space, sol.velocity) + l2_norm_vector(space, lifted) + std::sqrt(stab_sq);
}

} // namespace hdgmd
