// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/transport.hpp"

#include <cmath>

namespace hdgmd {

namespace {

// Per-face, per-side values of the normal velocity (w.r.t. the global
// face normal), the diffusive stabilization sigma_D, and |U.n| at the
// face quadrature points. With a conforming velocity both sides carry
// identical values (owner evaluation); a raw velocity is two-valued.
struct FaceData {
  // [side][q]; side 0 = lower-index cell (owner), side 1 = other side.
  std::vector<double> un[2];
  std::vector<double> sigma[2];
};

std::vector<FaceData> build_face_data(const FeSpace& space, const PhysicalModel& model,
                                      const Discretization& disc, const VelocityInput& velocity) {
  const Mesh& mesh = space.mesh();
  std::vector<FaceData> data(mesh.num_faces());
  const int nfq = static_cast<int>(space.face_rule.points.size());

  // One context per cell, reused across its faces.
  parallel_for(mesh.num_faces(), [&](int begin, int end) {
    for (int f = begin; f < end; ++f) {
      FaceData& fd = data[f];
      const Vec2 n = mesh.face_normals[f];
      for (int side = 0; side < 2; ++side) {
        const int cell = mesh.face_cells[f][side];
        if (cell < 0) break;
        ElementContext ctx(space, cell);
        int lf = 0;
        while (ctx.face_id(lf) != f) ++lf;
        fd.un[side].resize(nfq);
        fd.sigma[side].resize(nfq);
        for (int q = 0; q < nfq; ++q) {
          const Vec2 uval = velocity.eval_trace(ctx, lf, q);
          fd.un[side][q] = uval.dot(n);
          fd.sigma[side][q] = dispersion_normal(model.dispersion, uval, n);
        }
      }
      const bool two_sided = mesh.face_cells[f][1] >= 0;
      if (!two_sided) {
        fd.un[1] = fd.un[0];
        fd.sigma[1] = fd.sigma[0];
      } else if (velocity.is_conforming()) {
        // Single-valued data: owner values everywhere; the Max option
        // takes the pointwise max of the two one-sided sigma_D values.
        if (disc.flux.sigma_d == Discretization::SigmaDConvention::Max) {
          for (int q = 0; q < nfq; ++q)
            fd.sigma[0][q] = std::max(fd.sigma[0][q], fd.sigma[1][q]);
        }
        fd.un[1] = fd.un[0];
        fd.sigma[1] = fd.sigma[0];
      }
    }
  });
  return data;
}

} // namespace

TransportSolver::TransportSolver(const FeSpace& space, const PhysicalModel& model,
                                 const Discretization& disc)
    : space_(&space), model_(&model), disc_(&disc) {}

TransportSolution TransportSolver::step(const CellField& c_prev, const VelocityInput& velocity,
                                        double t) const {
  const FeSpace& space = *space_;
  const Mesh& mesh = space.mesh();
  const PhysicalModel& model = *model_;
  const int nk = space.cell_dim();
  const int nv = 2 * nk;
  const int nint = 2 * nv + nk; // theta, q, c
  const int nf = space.face_dim();
  const int ntr = 3 * nf;
  const double tau = disc_->tau;
  const int off_q = nv;
  const int off_c = 2 * nv;

  const std::vector<FaceData> face_data = build_face_data(space, model, *disc_, velocity);

  CondensedSystem condensed(mesh.num_faces(), nf);
  condensed.reserve(mesh.num_cells());

  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      const double phi = model.porosity(mesh.region_tags[e]);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nint, nint);
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nint, ntr);
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(ntr, nint);
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(ntr, ntr);
      Eigen::VectorXd F = Eigen::VectorXd::Zero(nint);

      for (int q = 0; q < ctx.nq(); ++q) {
        const double w = ctx.weight(q);
        const Vec2 x = ctx.point(q);
        const Vec2 uval = velocity.eval(ctx, q);
        const Mat2 dmat = dispersion(model.dispersion, uval);
        const double fi = model.f_inject(x, t);
        const double fp = model.f_produce(x, t);
        const double cbar = model.injected_conc(x, t);
        const double cprev = eval_scalar(ctx, c_prev.cell(e), q);

        for (int i = 0; i < nk; ++i) {
          const double phi_i = ctx.value(q, i);
          const Vec2 grad_i = ctx.gradient(q, i);
          F[off_c + i] += w * (fi * cbar + phi * cprev / tau) * phi_i;
          for (int j = 0; j < nk; ++j) {
            const double phi_j = ctx.value(q, j);
            const Vec2 grad_j = ctx.gradient(q, j);
            // (D(U) theta, z) - (q, z)
            for (int d = 0; d < 2; ++d) {
              for (int dd = 0; dd < 2; ++dd)
                A(2 * i + d, 2 * j + dd) += w * dmat(d, dd) * phi_i * phi_j;
              A(2 * i + d, off_q + 2 * j + d) -= w * phi_i * phi_j;
              // (theta, v) - (c, div v)
              A(nv + 2 * i + d, 2 * j + d) += w * phi_i * phi_j;
            }
            for (int d = 0; d < 2; ++d)
              A(nv + 2 * i + d, off_c + j) -= w * phi_j * grad_i[d];
            // (phi dc/tau, w) - (q + U c / 2, grad w) + (U.grad c, w)/2
            // + ((f_I + f_P) c, w)/2
            for (int d = 0; d < 2; ++d)
              A(off_c + i, off_q + 2 * j + d) -= w * grad_i[d] * phi_j;
            A(off_c + i, off_c + j) += w * (phi / tau + 0.5 * (fi + fp)) * phi_i * phi_j -
                                       0.5 * w * uval.dot(grad_i) * phi_j +
                                       0.5 * w * uval.dot(grad_j) * phi_i;
          }
        }
      }

      for (int lf = 0; lf < 3; ++lf) {
        const int sgn = ctx.normal_sign(lf);
        const Vec2 ne = sgn * ctx.face_normal(lf);
        const FaceData& fd = face_data[ctx.face_id(lf)];
        const int side = sgn > 0 ? 0 : 1;
        for (int q = 0; q < ctx.nfq(); ++q) {
          const double w = ctx.face_weight(lf, q);
          const double un_e = sgn * fd.un[side][q]; // U.n_E
          const double sig = fd.sigma[side][q];
          const double aun = std::abs(fd.un[side][q]);
          for (int i = 0; i < nk; ++i) {
            const double ti = ctx.trace_value(lf, q, i);
            for (int j = 0; j < nk; ++j) {
              const double tj = ctx.trace_value(lf, q, j);
              // q.n_E into the c equation
              for (int d = 0; d < 2; ++d)
                A(off_c + i, off_q + 2 * j + d) += w * ti * tj * ne[d];
              // -1/2 U.n_E c + 1/2 U.n_E c + sigma_D c + |U.n| c
              A(off_c + i, off_c + j) += w * (sig + aun) * ti * tj;
            }
            for (int j = 0; j < nf; ++j) {
              const double mu = ctx.face_mu(lf, q, j);
              // <c_hat, v.n_E> in the gradient equation
              for (int d = 0; d < 2; ++d)
                C(nv + 2 * i + d, lf * nf + j) += w * mu * ti * ne[d];
              // trace couplings in the c equation
              C(off_c + i, lf * nf + j) += w * (0.5 * un_e - sig - aun) * ti * mu;
            }
          }
          // conservation rows (one copy per side)
          for (int j = 0; j < nf; ++j) {
            const double mu = ctx.face_mu(lf, q, j);
            for (int i = 0; i < nk; ++i) {
              const double ti = ctx.trace_value(lf, q, i);
              for (int d = 0; d < 2; ++d)
                D(lf * nf + j, off_q + 2 * i + d) += w * mu * ti * ne[d];
              D(lf * nf + j, off_c + i) += w * (sig + aun + 0.5 * un_e) * mu * ti;
            }
            for (int jj = 0; jj < nf; ++jj)
              E(lf * nf + j, lf * nf + jj) +=
                  w * (0.5 * un_e - sig - aun) * mu * ctx.face_mu(lf, q, jj);
          }
        }
      }

      const std::array<int, 3> faces = {ctx.face_id(0), ctx.face_id(1), ctx.face_id(2)};
      try {
        condensed.set_element(e, faces, A, C, D, E, F, Eigen::VectorXd::Zero(ntr));
      } catch (const SolverError&) {
        throw SolverError("transport: singular local block at element " + std::to_string(e));
      }
    }
  });

  SparseSystem trace_system = condensed.assemble_trace();
  const Eigen::VectorXd trace = solve_sparse(trace_system);

  TransportSolution sol;
  sol.time = t;
  sol.aux_gradient = CellField(mesh.num_cells(), nv);
  sol.dispersive_flux = CellField(mesh.num_cells(), nv);
  sol.concentration = CellField(mesh.num_cells(), nk);
  sol.concentration_trace = FaceField(mesh.num_faces(), nf);
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int j = 0; j < nf; ++j) sol.concentration_trace.face(f)[j] = trace[f * nf + j];
  parallel_for(mesh.num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      const Eigen::VectorXd interior = condensed.recover_interior(e, trace);
      auto th = sol.aux_gradient.cell(e);
      auto qf = sol.dispersive_flux.cell(e);
      auto cc = sol.concentration.cell(e);
      for (int i = 0; i < nv; ++i) {
        th[i] = interior[i];
        qf[i] = interior[off_q + i];
      }
      for (int i = 0; i < nk; ++i) cc[i] = interior[off_c + i];
    }
  });

  // Energy bookkeeping with the assembly quadrature.
  TransportStepAudit& a = sol.audit;
  a.min_face_weight = std::numeric_limits<double>::max();
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    const double phi = model.porosity(mesh.region_tags[e]);
    for (int q = 0; q < ctx.nq(); ++q) {
      const double w = ctx.weight(q);
      const Vec2 x = ctx.point(q);
      const double cval = eval_scalar(ctx, sol.concentration.cell(e), q);
      const double cprev = eval_scalar(ctx, c_prev.cell(e), q);
      const Vec2 th = eval_vector(ctx, sol.aux_gradient.cell(e), q);
      const Vec2 uval = velocity.eval(ctx, q);
      const double fi = model.f_inject(x, t);
      const double fp = model.f_produce(x, t);
      const double cbar = model.injected_conc(x, t);
      a.conc_sq += w * cval * cval;
      a.mass_sq += w * phi * cval * cval;
      a.mass_sq_prev += w * phi * cprev * cprev;
      const double dc = (cval - cprev) / tau;
      a.time_deriv_sq += w * phi * dc * dc;
      a.dispersion_energy += w * th.dot(dispersion(model.dispersion, uval) * th);
      a.injection_sq += w * fi * cval * cval;
      a.production_sq += w * fp * cval * cval;
      a.reaction += w * (fi + fp) * cval * cval;
      a.source_pairing += w * fi * cbar * cval;
      a.source_sq += w * fi * cbar * cbar;
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int sgn = ctx.normal_sign(lf);
      const FaceData& fd = face_data[ctx.face_id(lf)];
      const int side = sgn > 0 ? 0 : 1;
      const auto chat = sol.concentration_trace.face(ctx.face_id(lf));
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double w = ctx.face_weight(lf, q);
        const double sig = fd.sigma[side][q];
        const double aun = std::abs(fd.un[side][q]);
        const double hat = eval_face(ctx, chat, lf, q);
        const double d = eval_scalar_trace(ctx, sol.concentration.cell(e), lf, q) - hat;
        a.stabilization += w * (sig + aun) * d * d;
        a.skew_term -= 0.5 * w * sgn * fd.un[side][q] * hat * hat;
        a.min_face_weight = std::min(a.min_face_weight, sig + aun);
      }
    }
  }
  const double balance = (a.mass_sq - a.mass_sq_prev) + tau * tau * a.time_deriv_sq +
                         2.0 * tau * a.dispersion_energy + tau * a.reaction +
                         2.0 * tau * a.stabilization + 2.0 * tau * a.skew_term -
                         2.0 * tau * a.source_pairing;
  a.identity_defect = std::abs(balance);

  if (!sol.concentration.data.empty() &&
      !std::isfinite(sol.concentration.data[0] + a.conc_sq))
    throw SolverError("transport: non-finite solution");
  return sol;
}

std::pair<CellField, FaceField> initialize_concentration(const FeSpace& space,
                                                         const PhysicalModel& model) {
  return {project_cells(space, model.initial_conc), project_faces(space, model.initial_conc)};
}

} // namespace hdgmd
