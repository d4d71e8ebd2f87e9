//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/stepper.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aderdg {

namespace {

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

int same_level_neighbor(const Grid& g, const CellKey& key, int axis, int dir) {
  CellKey nk = key;
  nk.c[axis] += dir;
  if (!g.wrap(nk)) return -1;
  const int idx = g.find(nk);
  if (idx < 0 || !g.cells[idx].alive) return -1;
  return idx;
}

Stepper::Stepper(Grid& grid, const PdeModel& model, const BoundaryConditions& bc,
                 const StepperOptions& opt)
    : g_(grid), model_(model), bc_(bc), opt_(opt), nv_(model.nvars()) {}

double Stepper::compute_dt() const {
  if (g_.active.empty()) throw std::runtime_error("compute_dt: empty grid");
  double dt0 = std::numeric_limits<double>::max();
  bool any = false;
  const int r = g_.geom().rfac;
  for (int idx : g_.active) {
    const Cell& cell = g_.cells[idx];
    double h[3];
    g_.cell_sizes(cell.key.level, h);
    const double bound = cell_dt_bound(g_.ops(), model_, cell.u.data(), h);
    if (bound < 0.0) continue;
    any = true;
    dt0 = std::min(dt0, opt_.cfl * bound * ipow(r, cell.key.level));
  }
  if (!any) throw std::runtime_error("compute_dt: no admissible states on the grid");
  return dt0;
}

struct Stepper::Snapshot {
  struct Entry {
    int idx;
    std::vector<double> u, w;
    bool limited;
  };
  std::vector<Entry> entries;
};

StepStats Stepper::step(double t, double dt0) {
  StepStats stats;
  stats.active_cells = static_cast<int>(g_.active.size());

  // Full-state snapshot so a CFL violation mid-step can rewind cleanly.
  Snapshot snap;
  for (size_t i = 0; i < g_.cells.size(); ++i) {
    if (!g_.cells[i].alive) continue;
    snap.entries.push_back({static_cast<int>(i), g_.cells[i].u, g_.cells[i].w,
                            g_.cells[i].limited});
  }

  for (int attempt = 0;; ++attempt) {
    stats.dt0 = dt0;
    stats.limited_cells = 0;
    stats.predictor_warnings = 0;
    stats.terminal_failure = false;

    const int Lmax = g_.max_active_level();
    const int M = ipow(g_.geom().rfac, Lmax);
    const double dtf = dt0 / M;

    bool cfl_violated = false;
    for (int j = 0; j < M && !cfl_violated && !stats.terminal_failure; ++j) {
      const double tj = t + j * dtf;
      int min_level = Lmax;
      for (int l = Lmax; l >= 0; --l) {
        if (j % (M / ipow(g_.geom().rfac, l)) == 0) min_level = l;
      }
      // CFL recheck from current cell means before committing to the sub-step.
      for (int idx : g_.active) {
        const Cell& cell = g_.cells[idx];
        const int l = cell.key.level;
        if (l < min_level || j % (M / ipow(g_.geom().rfac, l)) != 0) continue;
        double h[3];
        g_.cell_sizes(l, h);
        double mean[16];
        element_mean(g_.ops(), nv_, cell.u.data(), mean);
        const double bound = single_state_dt_bound(g_.ops(), model_, mean, h);
        if (bound > 0.0 && dtf * (M / ipow(g_.geom().rfac, l)) > bound * (1.0 + 1e-9)) {
          cfl_violated = true;
          break;
        }
      }
      if (cfl_violated) break;

      open_levels(j, min_level, tj, dtf, M, stats);
      integrate_faces(j, tj, dtf, M, stats);
      close_levels(j, dtf, M, stats);
    }

    if (!cfl_violated) return stats;

    // rewind and retry with a halved step
    for (auto& e : snap.entries) {
      g_.cells[e.idx].u = e.u;
      g_.cells[e.idx].w = e.w;
      g_.cells[e.idx].limited = e.limited;
    }
    stats.dt_retries++;
    dt0 *= 0.5;
    if (attempt + 1 >= opt_.max_dt_retries) {
      throw std::runtime_error("stepper: CFL violation persisted after retries");
    }
  }
}

void Stepper::open_levels(int j, int min_level, double tj, double dtf, int M,
                          StepStats& stats) {
  (void)j;
  const int Lmax = g_.max_active_level();
  const int r = g_.geom().rfac;

  for (int l = Lmax; l >= min_level; --l) g_.refresh_virtual_parents_at(l);
  // A virtual child's parent sits one level below; it is mid-interval (and its
  // space-time predictor must supply the slice) exactly when that level is not
  // opening now.
  for (int l = min_level; l <= Lmax; ++l) {
    const bool parent_mid_interval = (l == min_level && min_level > 0);
    g_.refresh_virtual_children_at(l, tj, parent_mid_interval);
  }

  // Snapshots of every cell (active and virtual) on the opening levels.
  for (size_t i = 0; i < g_.cells.size(); ++i) {
    Cell& cell = g_.cells[i];
    if (!cell.alive || cell.key.level < min_level) continue;
    cell.u_old = cell.u;
    cell.w_old = cell.w;
    cell.old_limited = cell.limited;
    cell.old_rep_valid = false;
    cell.t_open = tj;
  }

  // Predictors for the active cells opening now.
  std::vector<int> opening;
  for (int idx : g_.active) {
    if (g_.cells[idx].key.level >= min_level) opening.push_back(idx);
  }
  const int nsp = g_.ops().nodes_nd();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt_.threads)
#endif
  for (size_t oi = 0; oi < opening.size(); ++oi) {
    Cell& cell = g_.cells[opening[oi]];
    const int l = cell.key.level;
    double h[3];
    g_.cell_sizes(l, h);
    const double dtl = dtf * (M / ipow(r, l));
    cell.pred = solve_predictor(g_.ops(), model_, cell.u.data(), h, dtl, tj, opt_.predictor);
    cell.buf.assign(static_cast<size_t>(nsp) * nv_, 0.0);
    cell.troubled = false;
    if (cell.pred.ok) {
      add_volume_term(g_.ops(), cell.pred, cell.buf.data());
      cell.traces.resize(2 * g_.geom().d);
      for (int f = 0; f < 2 * g_.geom().d; ++f) {
        cell.traces[f] = face_traces(g_.ops(), cell.pred, f);
      }
    } else {
      // Poison the buffer so detection rejects the candidate unconditionally.
      cell.buf[0] = std::numeric_limits<double>::quiet_NaN();
      cell.traces.assign(2 * g_.geom().d, FaceTraces{});
    }
  }
  for (size_t oi = 0; oi < opening.size(); ++oi) {
    const Cell& cell = g_.cells[opening[oi]];
    if (!cell.pred.ok || !cell.pred.converged) stats.predictor_warnings++;
  }
}

void Stepper::face_trace(const Face& f, int side_cell, bool is_fine_side, double t_node,
                         int time_node, int tan_node, double* state, double* grad) const {
  const Cell& cell = g_.cells[side_cell];
  const int d = g_.geom().d;
  if (is_fine_side) {
    // native table: the face interval equals the cell's predictor interval
    const int side = (side_cell == f.cell_lo) ? 1 : 0;
    const int face_id = 2 * f.dim + side;
    const FaceTraces& tr = cell.traces[face_id];
    const int a = time_node;
    if (a >= 0 && !tr.state.empty()) {
      const size_t off = (static_cast<size_t>(a) * tr.ntan + tan_node) * nv_;
      std::memcpy(state, tr.state.data() + off, nv_ * sizeof(double));
      std::memcpy(grad, tr.grad.data() + (static_cast<size_t>(a) * tr.ntan + tan_node) * d * nv_,
                  static_cast<size_t>(d) * nv_ * sizeof(double));
      return;
    }
  }
  // general evaluation (coarse side of a mortar, or fallback)
  if (!cell.pred.ok || cell.pred.dt <= 0.0) {
    for (int v = 0; v < nv_; ++v) state[v] = std::numeric_limits<double>::quiet_NaN();
    for (int v = 0; v < d * nv_; ++v) grad[v] = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double xi[3] = {0.5, 0.5, 0.5};
  const int side = (side_cell == f.cell_lo) ? 1 : 0;
  xi[f.dim] = side == 1 ? 1.0 : 0.0;
  int tdims[2], nt = 0;
  for (int a = 0; a < d; ++a) {
    if (a != f.dim) tdims[nt++] = a;
  }
  const int np = g_.ops().np;
  const bool mapped = !is_fine_side && f.mortar;
  int tm[2] = {nt > 0 ? np : 1, nt > 1 ? np : 1};
  const int t0 = tan_node % tm[0], t1 = tan_node / tm[0];
  const int tnode[2] = {t0, t1};
  for (int ti = 0; ti < nt; ++ti) {
    const double xg = g_.ops().quad.nodes[tnode[ti]];
    xi[tdims[ti]] = mapped ? f.coarse_map.offset[ti] + f.coarse_map.scale * xg : xg;
  }
  const double tau = (t_node - cell.t_open) / cell.pred.dt;
  predictor_eval(g_.ops(), cell.pred, xi, tau, state, grad);
}

void Stepper::integrate_faces(int j, double tj, double dtf, int M, StepStats& stats) {
  (void)stats;
  const int Lmax = g_.max_active_level();
  (void)Lmax;
  const int d = g_.geom().d;
  const int np = g_.ops().np;
  int ntan = 1;
  for (int a = 1; a < d; ++a) ntan *= np;

  std::vector<int> stepping;
  for (size_t fi = 0; fi < g_.faces.size(); ++fi) {
    const Face& f = g_.faces[fi];
    const int gl = g_.cells[f.fine_cell].key.level;
    const int stride = M / ipow(g_.geom().rfac, gl);
    if (j % stride == 0) stepping.push_back(static_cast<int>(fi));
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt_.threads)
#endif
  for (size_t si = 0; si < stepping.size(); ++si) {
    Face& f = g_.faces[stepping[si]];
    const Cell& fine = g_.cells[f.fine_cell];
    const int gl = fine.key.level;
    const int stride = M / ipow(g_.geom().rfac, gl);
    const double dt_face = dtf * stride;
    f.t0 = tj;
    f.dtf = dt_face;
    std::fill(f.Gbar.begin(), f.Gbar.end(), 0.0);

    double face_lo[3], face_hi[3];
    g_.cell_bounds(fine.key, face_lo, face_hi);
    double hfine[3];
    g_.cell_sizes(fine.key.level, hfine);
    const int bside = f.bc_side >= 0 ? f.bc_side % 2 : -1;

    double qlo[16], qhi[16], glo[48], ghi[48], G[16], x[3] = {0, 0, 0};
    int tdims[2], nt = 0;
    for (int a = 0; a < d; ++a) {
      if (a != f.dim) tdims[nt++] = a;
    }
    for (int a = 0; a < np; ++a) {
      const double t_node = tj + g_.ops().quad.nodes[a] * dt_face;
      const double wa = g_.ops().quad.weights[a];
      for (int m = 0; m < ntan; ++m) {
        // physical location of the face node
        x[f.dim] = (f.bc_side >= 0 ? (bside == 1 ? face_hi[f.dim] : face_lo[f.dim])
                                   : (f.cell_lo == f.fine_cell ? face_hi[f.dim] : face_lo[f.dim]));
        const int tm0 = nt > 0 ? np : 1;
        const int tn[2] = {m % tm0, m / tm0};
        for (int ti = 0; ti < nt; ++ti) {
          x[tdims[ti]] = face_lo[tdims[ti]] + g_.ops().quad.nodes[tn[ti]] * hfine[tdims[ti]];
        }

        if (f.bc_side >= 0) {
          // domain boundary: interior trace + ghost map
          const bool interior_is_lo = (bside == 1);
          double* qin = interior_is_lo ? qlo : qhi;
          double* gin = interior_is_lo ? glo : ghi;
          face_trace(f, f.fine_cell, true, t_node, a, m, qin, gin);
          double* qout = interior_is_lo ? qhi : qlo;
          double* gout = interior_is_lo ? ghi : glo;
          bc_.ghost_state(f.bc_side, x, t_node, qin, qout);
          std::memcpy(gout, gin, static_cast<size_t>(d) * nv_ * sizeof(double));
        } else {
          face_trace(f, f.cell_lo, f.fine_cell == f.cell_lo, t_node, a, m, qlo, glo);
          face_trace(f, f.cell_hi, f.fine_cell == f.cell_hi, t_node, a, m, qhi, ghi);
        }
        rusanov_flux(model_, qlo, glo, qhi, ghi, f.dim, d, f.h_pen, g_.ops().N, G);
        double* acc = f.Gbar.data() + static_cast<size_t>(m) * nv_;
        for (int v = 0; v < nv_; ++v) acc[v] += wa * G[v];
      }
    }
  }

  // Serial accumulation into the cell buffers (kept out of the parallel region).
  for (size_t si = 0; si < stepping.size(); ++si) {
    Face& f = g_.faces[stepping[si]];
    for (int sidec = 0; sidec < 2; ++sidec) {
      const int cidx = sidec == 0 ? f.cell_lo : f.cell_hi;
      if (cidx < 0) continue;
      Cell& cell = g_.cells[cidx];
      double h[3];
      g_.cell_sizes(cell.key.level, h);
      FaceMap map;
      if (f.mortar && cidx != f.fine_cell) map = f.coarse_map;
      const int cell_side = sidec == 0 ? 1 : 0;  // low cell sees its high face
      add_face_term_nodal(g_.ops(), nv_, h, f.dim, cell_side, map, f.Gbar.data(),
                          static_cast<int>(f.Gbar.size()) / nv_, f.dtf, cell.buf.data());
    }
  }
}

const double* Stepper::old_subcell_rep(int cell_idx) {
  Cell& cell = g_.cells[cell_idx];
  if (!cell.old_rep_valid) {
    const int nsub = g_.ops().subcells_nd();
    cell.old_rep.assign(static_cast<size_t>(nsub) * nv_, 0.0);
    if (cell.old_limited && !cell.w_old.empty()) {
      cell.old_rep = cell.w_old;
    } else {
      project_to_subcells(g_.ops(), nv_, cell.u_old.data(), cell.old_rep.data());
    }
    cell.old_rep_valid = true;
  }
  return cell.old_rep.data();
}

void Stepper::close_levels(int j, double dtf, int M, StepStats& stats) {
  const int Lmax = g_.max_active_level();
  const int r = g_.geom().rfac;
  const int d = g_.geom().d;
  const int nsp = g_.ops().nodes_nd();
  const int nsub = g_.ops().subcells_nd();
  (void)dtf;

  for (int l = Lmax; l >= 0 && !stats.terminal_failure; --l) {
    const int stride = M / ipow(r, l);
    if ((j + 1) % stride != 0) continue;

    closing_.clear();
    for (int idx : g_.active) {
      if (g_.cells[idx].key.level == l) closing_.push_back(idx);
    }
    if (closing_.empty()) continue;

    // Candidates.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt_.threads)
#endif
    for (size_t ci = 0; ci < closing_.size(); ++ci) {
      Cell& cell = g_.cells[closing_[ci]];
      cell.cand.resize(static_cast<size_t>(nsp) * nv_);
      for (size_t n = 0; n < cell.cand.size(); ++n) cell.cand[n] = cell.u_old[n] + cell.buf[n];
    }

    // Materialize the old subcell representations the detector will read (self +
    // Voronoi neighborhood), serially, before the parallel detection pass.
    if (opt_.limiter_enabled) {
      for (size_t ci = 0; ci < closing_.size(); ++ci) {
        const CellKey k = g_.cells[closing_[ci]].key;
        int off[3];
        for (off[2] = (d > 2 ? -1 : 0); off[2] <= (d > 2 ? 1 : 0); ++off[2]) {
          for (off[1] = (d > 1 ? -1 : 0); off[1] <= (d > 1 ? 1 : 0); ++off[1]) {
            for (off[0] = -1; off[0] <= 1; ++off[0]) {
              CellKey nk = k;
              for (int a = 0; a < 3; ++a) nk.c[a] += off[a];
              if (!g_.wrap(nk)) continue;
              const int nidx = g_.find(nk);
              if (nidx >= 0 && g_.cells[nidx].alive) old_subcell_rep(nidx);
            }
          }
        }
      }
    }

    // Detection.
    troubled_.clear();
    if (opt_.limiter_enabled) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(opt_.threads)
#endif
      for (size_t ci = 0; ci < closing_.size(); ++ci) {
        Cell& cell = g_.cells[closing_[ci]];
        if (opt_.force_limiter) {
          cell.troubled = true;
          continue;
        }
        const int nq = dmp_quantity_count(model_, opt_.limiter);
        double qmin[16], qmax[16];
        for (int m = 0; m < nq; ++m) {
          qmin[m] = std::numeric_limits<double>::max();
          qmax[m] = -std::numeric_limits<double>::max();
        }
        int off[3];
        for (off[2] = (d > 2 ? -1 : 0); off[2] <= (d > 2 ? 1 : 0); ++off[2]) {
          for (off[1] = (d > 1 ? -1 : 0); off[1] <= (d > 1 ? 1 : 0); ++off[1]) {
            for (off[0] = -1; off[0] <= 1; ++off[0]) {
              CellKey nk = cell.key;
              for (int a = 0; a < 3; ++a) nk.c[a] += off[a];
              if (!g_.wrap(nk)) continue;
              const int nidx = g_.find(nk);
              if (nidx < 0 || !g_.cells[nidx].alive) continue;
              accumulate_dmp_bounds(model_, opt_.limiter, nsub,
                                    g_.cells[nidx].old_rep.data(), qmin, qmax);
            }
          }
        }
        std::vector<double> cand_sub(static_cast<size_t>(nsub) * nv_);
        project_to_subcells(g_.ops(), nv_, cell.cand.data(), cand_sub.data());
        const DetectionReport rep = detect_candidate(g_.ops(), model_, opt_.limiter,
                                                     cell.cand.data(), cand_sub.data(),
                                                     qmin, qmax);
        cell.troubled = rep.troubled();
      }
    }

    // Accept candidates; troubled cells are recomputed below.
    for (size_t ci = 0; ci < closing_.size(); ++ci) {
      Cell& cell = g_.cells[closing_[ci]];
      cell.u = cell.cand;
      if (cell.troubled) {
        troubled_.push_back(closing_[ci]);
      } else {
        cell.limited = false;
        cell.w.clear();
      }
    }

    fv_bflux_.clear();
    for (int tidx : troubled_) {
      if (!recompute_troubled(tidx, stats)) {
        stats.terminal_failure = true;
        return;
      }
    }
    stats.limited_cells += static_cast<int>(troubled_.size());

    if (!troubled_.empty()) {
      reconcile_troubled_pair_fluxes();
      apply_neighbor_corrections(stats);
    }
  }
}

void Stepper::fill_patch_ghosts(int cell_idx, double* ext) {
  Cell& cell = g_.cells[cell_idx];
  const int d = g_.geom().d, Ns = g_.ops().Ns;
  const int e[3] = {Ns + 4, d > 1 ? Ns + 4 : 1, d > 2 ? Ns + 4 : 1};
  const int ncells = e[0] * e[1] * e[2];
  std::vector<char> filled(ncells, 0);

  auto eidx = [&](int i, int jj, int k) {
    return ((d > 2 ? k + 2 : 0) * e[1] + (d > 1 ? jj + 2 : 0)) * e[0] + (i + 2);
  };

  // interior: this cell's rollback representation
  const double* self_rep = old_subcell_rep(cell_idx);
  for (int k = 0; k < (d > 2 ? Ns : 1); ++k) {
    for (int jj = 0; jj < (d > 1 ? Ns : 1); ++jj) {
      for (int i = 0; i < Ns; ++i) {
        const int src = (k * (d > 1 ? Ns : 1) + jj) * Ns + i;
        const int dst = eidx(i, jj, k);
        std::memcpy(ext + static_cast<size_t>(dst) * nv_,
                    self_rep + static_cast<size_t>(src) * nv_, nv_ * sizeof(double));
        filled[dst] = 1;
      }
    }
  }

  double clo[3], chi_[3];
  g_.cell_bounds(cell.key, clo, chi_);
  double h[3];
  g_.cell_sizes(cell.key.level, h);
  const double hs[3] = {h[0] / Ns, h[1] / Ns, h[2] / Ns};

  // face strips
  for (int axis = 0; axis < d; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int nidx = same_level_neighbor(g_, cell.key, axis, side == 1 ? 1 : -1);
      const int tan1 = d > 1 ? Ns : 1, tan2 = d > 2 ? Ns : 1;
      for (int g2 = 0; g2 < tan2; ++g2) {
        for (int g1 = 0; g1 < tan1; ++g1) {
          for (int layer = 0; layer < 2; ++layer) {
            int gi[3] = {0, 0, 0};
            int tdims[2], nt = 0;
            for (int a = 0; a < d; ++a) {
              if (a != axis) tdims[nt++] = a;
            }
            if (nt > 0) gi[tdims[0]] = g1;
            if (nt > 1) gi[tdims[1]] = g2;
            gi[axis] = side == 1 ? Ns + layer : -1 - layer;
            const int dst = eidx(gi[0], gi[1], gi[2]);
            double* out = ext + static_cast<size_t>(dst) * nv_;
            if (nidx >= 0) {
              const double* rep = old_subcell_rep(nidx);
              int si[3] = {gi[0], gi[1], gi[2]};
              si[axis] = side == 1 ? layer : Ns - 1 - layer;
              const int src = ((d > 2 ? si[2] : 0) * (d > 1 ? Ns : 1) + (d > 1 ? si[1] : 0)) * Ns +
                              si[0];
              std::memcpy(out, rep + static_cast<size_t>(src) * nv_, nv_ * sizeof(double));
              if (!model_.admissible(out)) {
                // degenerate projected ghost: use the neighbor's element mean
                double mean[16];
                element_mean(g_.ops(), nv_, g_.cells[nidx].u_old.data(), mean);
                std::memcpy(out, mean, nv_ * sizeof(double));
              }
            } else {
              // domain boundary
              const int bcside = 2 * axis + side;
              int mi[3] = {gi[0], gi[1], gi[2]};
              const BcKind kind = bc_.kind(bcside);
              if (kind == BcKind::Outflow || kind == BcKind::AnalyticInflow) {
                mi[axis] = side == 1 ? Ns - 1 : 0;
              } else {
                mi[axis] = side == 1 ? Ns - 1 - layer : layer;  // mirrored
              }
              const int msrc = eidx(mi[0], mi[1], mi[2]);
              double xg[3] = {0.0, 0.0, 0.0};
              for (int a = 0; a < d; ++a) xg[a] = clo[a] + (gi[a] + 0.5) * hs[a];
              bc_.ghost_state(bcside, xg, cell.t_open, ext + static_cast<size_t>(msrc) * nv_,
                              out);
            }
            filled[dst] = 1;
          }
        }
      }
    }
  }

  // corners/edges: clamp all axes but the first out-of-range one into the interior
  for (int k = (d > 2 ? -2 : 0); k < (d > 2 ? Ns + 2 : 1); ++k) {
    for (int jj = (d > 1 ? -2 : 0); jj < (d > 1 ? Ns + 2 : 1); ++jj) {
      for (int i = -2; i < Ns + 2; ++i) {
        const int dst = eidx(i, jj, k);
        if (filled[dst]) continue;
        int src[3] = {i, jj, k};
        bool kept = false;
        for (int a = 0; a < d; ++a) {
          const int val = src[a];
          if (val < 0 || val >= Ns) {
            if (!kept) {
              kept = true;  // keep the first out-of-range axis
            } else {
              src[a] = std::min(std::max(val, 0), Ns - 1);
            }
          }
        }
        const int s = eidx(src[0], d > 1 ? src[1] : 0, d > 2 ? src[2] : 0);
        std::memcpy(ext + static_cast<size_t>(dst) * nv_, ext + static_cast<size_t>(s) * nv_,
                    nv_ * sizeof(double));
        filled[dst] = 1;
      }
    }
  }
}

bool Stepper::recompute_troubled(int cell_idx, StepStats& stats) {
  Cell& cell = g_.cells[cell_idx];
  const int d = g_.geom().d, Ns = g_.ops().Ns;
  const int nsub = g_.ops().subcells_nd();
  double h[3];
  g_.cell_sizes(cell.key.level, h);
  const double hs[3] = {h[0] / Ns, h[1] / Ns, h[2] / Ns};
  const double dt = cell.pred.dt;

  std::vector<double> ext(static_cast<size_t>(ext_size(d, Ns)) * nv_, 0.0);

  auto extract = [&](const std::vector<double>& e, std::vector<double>& w) {
    w.resize(static_cast<size_t>(nsub) * nv_);
    for (int k = 0; k < (d > 2 ? Ns : 1); ++k) {
      for (int jj = 0; jj < (d > 1 ? Ns : 1); ++jj) {
        for (int i = 0; i < Ns; ++i) {
          const int dst = (k * (d > 1 ? Ns : 1) + jj) * Ns + i;
          const int src = ext_index(d, Ns, i, jj, k);
          std::memcpy(w.data() + static_cast<size_t>(dst) * nv_,
                      e.data() + static_cast<size_t>(src) * nv_, nv_ * sizeof(double));
        }
      }
    }
  };

  auto admissible_patch = [&](const std::vector<double>& w, const std::vector<double>& u) {
    for (int s = 0; s < nsub; ++s) {
      if (!model_.admissible(w.data() + static_cast<size_t>(s) * nv_)) return false;
    }
    const int nsp = g_.ops().nodes_nd();
    for (int s = 0; s < nsp; ++s) {
      if (!model_.admissible(u.data() + static_cast<size_t>(s) * nv_)) return false;
    }
    return true;
  };

  const FvScheme schemes[2] = {parse_scheme(opt_.limiter.scheme), FvScheme::FirstOrder};
  for (int attempt = 0; attempt < 2; ++attempt) {
    fill_patch_ghosts(cell_idx, ext.data());
    SubgridStep res = fv_subcell_step(model_, d, Ns, hs, dt, schemes[attempt], ext.data());
    std::vector<double> w_new;
    extract(ext, w_new);
    std::vector<double> u_new(static_cast<size_t>(g_.ops().nodes_nd()) * nv_);
    if (res.finite) {
      reconstruct_from_subcells(g_.ops(), nv_, w_new.data(), u_new.data());
      if (admissible_patch(w_new, u_new)) {
        cell.w = std::move(w_new);
        cell.u = std::move(u_new);
        cell.limited = true;
        fv_bflux_[cell_idx] = std::move(res.bflux);
        return true;
      }
    }
  }
  stats.failure_message = "terminal subcell fallback failure at cell level " +
                          std::to_string(cell.key.level);
  return false;
}

void Stepper::reconcile_troubled_pair_fluxes() {
  const int d = g_.geom().d, Ns = g_.ops().Ns;
  const int tan1 = d > 1 ? Ns : 1, tan2 = d > 2 ? Ns : 1;
  for (auto& f : g_.faces) {
    if (f.cell_lo < 0 || f.cell_hi < 0 || f.mortar) continue;
    auto lo = fv_bflux_.find(f.cell_lo);
    auto hi = fv_bflux_.find(f.cell_hi);
    if (lo == fv_bflux_.end() || hi == fv_bflux_.end()) continue;
    Cell& chi_cell = g_.cells[f.cell_hi];
    double h[3];
    g_.cell_sizes(chi_cell.key.level, h);
    const double hs = h[f.dim] / Ns;
    const double dt = chi_cell.pred.dt;
    std::vector<double>& canon = lo->second[2 * f.dim + 1];
    std::vector<double>& other = hi->second[2 * f.dim + 0];

    // shift the high cell's boundary layer to the canonical flux
    std::vector<double> w_backup = chi_cell.w;
    std::vector<double> flux_backup = other;
    for (int t2 = 0; t2 < tan2; ++t2) {
      for (int t1 = 0; t1 < tan1; ++t1) {
        const int tsub = t2 * tan1 + t1;
        int ii[3] = {0, 0, 0};
        int tdims[2], nt = 0;
        for (int a = 0; a < d; ++a) {
          if (a != f.dim) tdims[nt++] = a;
        }
        if (nt > 0) ii[tdims[0]] = t1;
        if (nt > 1) ii[tdims[1]] = t2;
        ii[f.dim] = 0;
        const int widx = ((d > 2 ? ii[2] : 0) * (d > 1 ? Ns : 1) + (d > 1 ? ii[1] : 0)) * Ns +
                         ii[0];
        double* wcell = chi_cell.w.data() + static_cast<size_t>(widx) * nv_;
        const double* gc = canon.data() + static_cast<size_t>(tsub) * nv_;
        double* go = other.data() + static_cast<size_t>(tsub) * nv_;
        for (int v = 0; v < nv_; ++v) {
          wcell[v] += dt / hs * (gc[v] - go[v]);
          go[v] = gc[v];
        }
      }
    }
    bool still_ok = true;
    for (size_t s = 0; s < chi_cell.w.size() / nv_; ++s) {
      if (!model_.admissible(chi_cell.w.data() + s * nv_)) still_ok = false;
    }
    if (!still_ok) {
      // pathological shift: keep the cell's own fluxes (tiny conservation slip)
      chi_cell.w = std::move(w_backup);
      other = std::move(flux_backup);
    }
    reconstruct_from_subcells(g_.ops(), nv_, chi_cell.w.data(), chi_cell.u.data());
  }
}

void Stepper::apply_neighbor_corrections(StepStats& stats) {
  (void)stats;
  std::vector<double> negG, temp;
  for (auto& f : g_.faces) {
    if (f.cell_lo < 0 || f.cell_hi < 0) continue;
    const bool lo_troubled = fv_bflux_.count(f.cell_lo) > 0;
    const bool hi_troubled = fv_bflux_.count(f.cell_hi) > 0;
    if (lo_troubled == hi_troubled) continue;  // both handled or neither
    const int tidx = lo_troubled ? f.cell_lo : f.cell_hi;
    const int oidx = lo_troubled ? f.cell_hi : f.cell_lo;
    Cell& T = g_.cells[tidx];
    Cell& O = g_.cells[oidx];

    // The replacement only covers the troubled cell's own interval; when the face is
    // finer (a finer neighbor sub-cycled across it) the mismatch is left in place.
    if (g_.cells[f.fine_cell].key.level != T.key.level) continue;

    const int side_T = (tidx == f.cell_lo) ? 1 : 0;
    const int side_O = 1 - side_T;
    const double* Gfv = fv_bflux_[tidx][2 * f.dim + side_T].data();

    double hO[3];
    g_.cell_sizes(O.key.level, hO);
    FaceMap mapO;
    if (f.mortar && oidx != f.fine_cell) mapO = f.coarse_map;

    // target: same level -> the already-applied state; coarser -> the open buffer
    double* target = (O.key.level == T.key.level) ? O.u.data() : O.buf.data();

    const int ntan = static_cast<int>(f.Gbar.size()) / nv_;
    negG.assign(f.Gbar.size(), 0.0);
    for (size_t i = 0; i < f.Gbar.size(); ++i) negG[i] = -f.Gbar[i];
    add_face_term_nodal(g_.ops(), nv_, hO, f.dim, side_O, mapO, negG.data(), ntan, f.dtf,
                        target);
    add_face_term_subcell(g_.ops(), nv_, hO, f.dim, side_O, mapO, Gfv, f.dtf, target);
  }
}

}  // namespace aderdg
