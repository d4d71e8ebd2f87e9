//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "aderdg/limiter.hpp"

namespace aderdg {

namespace {

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Mean z-vorticity of the cell polynomial (zero in 1D).
double cell_mean_vorticity(const OperatorSet& ops, int nv, const double* u, const double h[3]) {
  const int d = ops.d, np = ops.np;
  if (d < 2) return 0.0;
  const int m[3] = {np, np, d > 2 ? np : 1};
  const int nsp = m[0] * m[1] * m[2];
  const int stride[3] = {1, m[0], m[0] * m[1]};
  double acc = 0.0;
  for (int s = 0; s < nsp; ++s) {
    const int i3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    double wK = ops.quad.weights[i3[0]] * ops.quad.weights[i3[1]];
    if (d > 2) wK *= ops.quad.weights[i3[2]];
    double dvy_dx = 0.0, dvx_dy = 0.0;
    for (int p = 0; p < np; ++p) {
      const double* ux = u + static_cast<size_t>(s - i3[0] * stride[0] + p * stride[0]) * nv;
      dvy_dx += ops.diff[i3[0] * np + p] / h[0] * (ux[2] / ux[0]);
      const double* uy = u + static_cast<size_t>(s - i3[1] * stride[1] + p * stride[1]) * nv;
      dvx_dy += ops.diff[i3[1] * np + p] / h[1] * (uy[1] / uy[0]);
    }
    acc += wK * (dvy_dx - dvx_dy);
  }
  return acc;
}

}  // namespace

Grid::Grid(const GridGeometry& geom, const OperatorSet& ops, int nvars)
    : geom_(geom), ops_(ops), nv_(nvars) {
  if (geom_.d != ops.d) throw std::invalid_argument("grid: dimension mismatch with operators");
  for (int k = 0; k < (geom_.d > 2 ? geom_.base[2] : 1); ++k) {
    for (int j = 0; j < (geom_.d > 1 ? geom_.base[1] : 1); ++j) {
      for (int i = 0; i < geom_.base[0]; ++i) {
        CellKey key;
        key.level = 0;
        key.c[0] = i;
        key.c[1] = j;
        key.c[2] = k;
        insert_cell(key, Status::Active);
      }
    }
  }
  rebuild_active_list();
  rebuild_faces();
}

int Grid::insert_cell(const CellKey& k, Status st) {
  Cell cell;
  cell.key = k;
  cell.status = st;
  cell.u.assign(static_cast<size_t>(ops_.nodes_nd()) * nv_, 0.0);
  cells.push_back(std::move(cell));
  const int idx = static_cast<int>(cells.size()) - 1;
  index_[k] = idx;
  return idx;
}

void Grid::remove_cell(int idx) {
  cells[idx].alive = false;
  index_.erase(cells[idx].key);
}

int Grid::find(const CellKey& k) const {
  auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

int Grid::cells_per_axis(int level, int axis) const {
  return geom_.base[axis] * ipow(geom_.rfac, level);
}

bool Grid::wrap(CellKey& k) const {
  for (int axis = 0; axis < geom_.d; ++axis) {
    const int n = cells_per_axis(k.level, axis);
    if (k.c[axis] < 0 || k.c[axis] >= n) {
      if (!geom_.periodic[axis]) return false;
      k.c[axis] = ((k.c[axis] % n) + n) % n;
    }
  }
  return true;
}

void Grid::cell_sizes(int level, double h[3]) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (axis < geom_.d) {
      h[axis] = (geom_.hi[axis] - geom_.lo[axis]) / cells_per_axis(level, axis);
    } else {
      h[axis] = 1.0;
    }
  }
}

void Grid::cell_bounds(const CellKey& k, double lo[3], double hi[3]) const {
  double h[3];
  cell_sizes(k.level, h);
  for (int axis = 0; axis < 3; ++axis) {
    if (axis < geom_.d) {
      lo[axis] = geom_.lo[axis] + k.c[axis] * h[axis];
      hi[axis] = lo[axis] + h[axis];
    } else {
      lo[axis] = 0.0;
      hi[axis] = 0.0;
    }
  }
}

CellKey Grid::parent_key(const CellKey& k) const {
  CellKey p;
  p.level = k.level - 1;
  for (int axis = 0; axis < 3; ++axis) {
    p.c[axis] = axis < geom_.d ? k.c[axis] / geom_.rfac : 0;
  }
  return p;
}

CellKey Grid::child_key(const CellKey& k, const int ci[3]) const {
  CellKey c;
  c.level = k.level + 1;
  for (int axis = 0; axis < 3; ++axis) {
    c.c[axis] = axis < geom_.d ? k.c[axis] * geom_.rfac + ci[axis] : 0;
  }
  return c;
}

int Grid::active_cover(CellKey k) const {
  while (true) {
    const int idx = find(k);
    if (idx >= 0 && cells[idx].alive && cells[idx].status == Status::Active) return idx;
    if (k.level == 0) return -1;
    k = parent_key(k);
  }
}

int Grid::max_active_level() const {
  int m = 0;
  for (int idx : active) m = std::max(m, cells[idx].key.level);
  return m;
}

void Grid::tree_order(std::vector<int>& out) const {
  out.clear();
  std::function<void(const CellKey&)> visit = [&](const CellKey& k) {
    const int idx = find(k);
    if (idx < 0 || !cells[idx].alive) return;
    if (cells[idx].status == Status::Active) {
      out.push_back(idx);
      return;
    }
    if (cells[idx].status == Status::VirtualParent) {
      const int r = geom_.rfac;
      for (int ck = 0; ck < (geom_.d > 2 ? r : 1); ++ck) {
        for (int cj = 0; cj < (geom_.d > 1 ? r : 1); ++cj) {
          for (int ci = 0; ci < r; ++ci) {
            int cidx[3] = {ci, cj, ck};
            visit(child_key(k, cidx));
          }
        }
      }
    }
  };
  for (int k = 0; k < (geom_.d > 2 ? geom_.base[2] : 1); ++k) {
    for (int j = 0; j < (geom_.d > 1 ? geom_.base[1] : 1); ++j) {
      for (int i = 0; i < geom_.base[0]; ++i) {
        CellKey key;
        key.level = 0;
        key.c[0] = i;
        key.c[1] = j;
        key.c[2] = k;
        visit(key);
      }
    }
  }
}

void Grid::rebuild_active_list() {
  tree_order(active);
}

void Grid::rebuild_virtual_cells() {
  // Mark every cell that must exist: active cells, their ancestors (virtual parents)
  // and — where a Voronoi neighbor is refined — their children (virtual children).
  std::unordered_map<CellKey, Status, CellKeyHash> needed;
  for (int idx : active) needed[cells[idx].key] = Status::Active;
  for (int idx : active) {
    CellKey k = cells[idx].key;
    while (k.level > 0) {
      k = parent_key(k);
      auto it = needed.find(k);
      if (it == needed.end()) needed[k] = Status::VirtualParent;
    }
  }
  // Demand rule for virtual children: an active cell gets them as soon as some
  // Voronoi-adjacent region is refined, so that finer neighbors can read same-level
  // data for detection, ghost filling and the refinement estimator.
  for (int idx : active) {
    const CellKey k = cells[idx].key;
    bool demand = false;
    const int span = geom_.d;
    int off[3];
    for (off[2] = (span > 2 ? -1 : 0); off[2] <= (span > 2 ? 1 : 0) && !demand; ++off[2]) {
      for (off[1] = (span > 1 ? -1 : 0); off[1] <= (span > 1 ? 1 : 0) && !demand; ++off[1]) {
        for (off[0] = -1; off[0] <= 1 && !demand; ++off[0]) {
          if (off[0] == 0 && off[1] == 0 && off[2] == 0) continue;
          CellKey nk = k;
          for (int a = 0; a < 3; ++a) nk.c[a] += off[a];
          if (!wrap(nk)) continue;
          const int nidx = find(nk);
          if (nidx >= 0 && cells[nidx].alive && cells[nidx].status == Status::VirtualParent) {
            demand = true;
          }
        }
      }
    }
    if (demand) {
      const int r = geom_.rfac;
      for (int ck = 0; ck < (geom_.d > 2 ? r : 1); ++ck) {
        for (int cj = 0; cj < (geom_.d > 1 ? r : 1); ++cj) {
          for (int ci = 0; ci < r; ++ci) {
            int cidx[3] = {ci, cj, ck};
            const CellKey child = child_key(k, cidx);
            if (needed.find(child) == needed.end()) needed[child] = Status::VirtualChild;
          }
        }
      }
    }
  }

  // Sweep: drop cells that are no longer needed, create the missing ones.
  for (size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].alive) continue;
    auto it = needed.find(cells[i].key);
    if (it == needed.end()) {
      remove_cell(static_cast<int>(i));
    } else {
      cells[i].status = it->second;
      needed.erase(it);
    }
  }
  for (const auto& [key, st] : needed) insert_cell(key, st);
}

void Grid::rebuild_faces() {
  faces.clear();
  const int np = ops_.np;
  int ntan_full = 1;
  for (int j = 1; j < geom_.d; ++j) ntan_full *= np;

  for (int idx : active) {
    const Cell& cell = cells[idx];
    const CellKey k = cell.key;
    double hfine[3];
    cell_sizes(k.level, hfine);
    for (int axis = 0; axis < geom_.d; ++axis) {
      for (int side = 0; side < 2; ++side) {
        CellKey nk = k;
        nk.c[axis] += side == 1 ? 1 : -1;
        CellKey wrapped = nk;
        if (!wrap(wrapped)) {
          Face f;
          f.dim = axis;
          f.bc_side = 2 * axis + side;
          f.fine_cell = idx;
          (side == 1 ? f.cell_lo : f.cell_hi) = idx;
          f.h_pen = hfine[axis];
          f.Gbar.assign(static_cast<size_t>(ntan_full) * nv_, 0.0);
          faces.push_back(std::move(f));
          continue;
        }
        const int nidx = find(wrapped);
        if (nidx >= 0 && cells[nidx].alive && cells[nidx].status == Status::Active) {
          if (side != 1) continue;  // created once, from the low cell
          Face f;
          f.dim = axis;
          f.cell_lo = idx;
          f.cell_hi = nidx;
          f.fine_cell = idx;
          f.h_pen = hfine[axis];
          f.Gbar.assign(static_cast<size_t>(ntan_full) * nv_, 0.0);
          faces.push_back(std::move(f));
          continue;
        }
        if (nidx >= 0 && cells[nidx].alive && cells[nidx].status == Status::VirtualParent) {
          continue;  // refined neighbor: the finer cells own the mortar faces
        }
        const int cover = active_cover(wrapped);
        if (cover < 0) throw std::runtime_error("grid: uncovered neighbor region");
        if (cells[cover].key.level != k.level - 1) {
          throw std::runtime_error("grid: 2:1 balance violated in face construction");
        }
        Face f;
        f.dim = axis;
        f.mortar = true;
        f.fine_cell = idx;
        (side == 1 ? f.cell_lo : f.cell_hi) = idx;
        (side == 1 ? f.cell_hi : f.cell_lo) = cover;
        f.h_pen = hfine[axis];
        int t = 0;
        for (int a = 0; a < geom_.d; ++a) {
          if (a == axis) continue;
          const int m = k.c[a] % geom_.rfac;
          f.coarse_map.offset[t++] = static_cast<double>(m) / geom_.rfac;
        }
        f.coarse_map.scale = 1.0 / geom_.rfac;
        f.Gbar.assign(static_cast<size_t>(ntan_full) * nv_, 0.0);
        faces.push_back(std::move(f));
      }
    }
  }
}

void Grid::project_to_child(const double* parent_u, const int ci[3], double* child_u) const {
  const int np = ops_.np, d = ops_.d;
  int sz[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  std::vector<double> data(parent_u, parent_u + static_cast<size_t>(sz[0]) * sz[1] * sz[2] * nv_);
  for (int axis = 0; axis < d; ++axis) {
    tensor_apply_axis(ops_.child_proj[ci[axis]].data(), np, np, axis, sz, nv_, data);
  }
  std::memcpy(child_u, data.data(), data.size() * sizeof(double));
}

void Grid::average_from_children(const std::vector<const double*>& child_u,
                                 double* parent_u) const {
  const int np = ops_.np, d = ops_.d, r = geom_.rfac;
  const size_t n = static_cast<size_t>(ops_.nodes_nd()) * nv_;
  for (size_t i = 0; i < n; ++i) parent_u[i] = 0.0;
  int ci[3];
  int c = 0;
  for (ci[2] = 0; ci[2] < (d > 2 ? r : 1); ++ci[2]) {
    for (ci[1] = 0; ci[1] < (d > 1 ? r : 1); ++ci[1]) {
      for (ci[0] = 0; ci[0] < r; ++ci[0], ++c) {
        int sz[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
        std::vector<double> data(child_u[c], child_u[c] + n);
        for (int axis = 0; axis < d; ++axis) {
          tensor_apply_axis(ops_.parent_avg[ci[axis]].data(), np, np, axis, sz, nv_, data);
        }
        for (size_t i = 0; i < n; ++i) parent_u[i] += data[i];
      }
    }
  }
}

void Grid::refresh_virtual_parents_at(int level) {
  const int r = geom_.rfac, d = geom_.d;
  for (size_t i = 0; i < cells.size(); ++i) {
    Cell& cell = cells[i];
    if (!cell.alive || cell.status != Status::VirtualParent || cell.key.level != level) continue;
    std::vector<const double*> child_ptrs;
    child_ptrs.reserve(ipow(r, d));
    int ci[3];
    bool ok = true;
    for (ci[2] = 0; ci[2] < (d > 2 ? r : 1) && ok; ++ci[2]) {
      for (ci[1] = 0; ci[1] < (d > 1 ? r : 1) && ok; ++ci[1]) {
        for (ci[0] = 0; ci[0] < r && ok; ++ci[0]) {
          const int cidx = find(child_key(cell.key, ci));
          if (cidx < 0 || !cells[cidx].alive) {
            ok = false;
          } else {
            child_ptrs.push_back(cells[cidx].u.data());
          }
        }
      }
    }
    if (!ok) throw std::runtime_error("grid: virtual parent with missing child payload");
    average_from_children(child_ptrs, cell.u.data());
  }
}

void Grid::refresh_virtual_children_at(int level, double time, bool use_pred) {
  std::vector<double> slice;
  for (size_t i = 0; i < cells.size(); ++i) {
    Cell& cell = cells[i];
    if (!cell.alive || cell.status != Status::VirtualChild || cell.key.level != level) continue;
    const int pidx = find(parent_key(cell.key));
    if (pidx < 0 || !cells[pidx].alive || cells[pidx].status != Status::Active) {
      throw std::runtime_error("grid: virtual child without active parent");
    }
    const Cell& parent = cells[pidx];
    int ci[3] = {0, 0, 0};
    for (int a = 0; a < geom_.d; ++a) ci[a] = cell.key.c[a] - parent.key.c[a] * geom_.rfac;

    const double* src = parent.u.data();
    if (use_pred && parent.pred.ok && parent.pred.dt > 0.0) {
      slice.assign(parent.u.size(), 0.0);
      const double tau = (time - parent.t_open) / parent.pred.dt;
      predictor_time_slice(ops_, parent.pred, tau, slice.data());
      src = slice.data();
    }
    project_to_child(src, ci, cell.u.data());
  }
}

void Grid::update_virtual_payloads() {
  int top = 0;
  for (const auto& cell : cells) {
    if (cell.alive) top = std::max(top, cell.key.level);
  }
  for (int level = top; level >= 0; --level) refresh_virtual_parents_at(level);
  for (int level = 0; level <= top; ++level) refresh_virtual_children_at(level, 0.0, false);
}

void Grid::compute_chi(const PdeModel& model, const AdaptControl& ctl) {
  // Pass 1: indicator value per alive cell from its own payload.
  std::vector<double> phi(cells.size(), 0.0);
  double mean[16];
  for (size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].alive) continue;
    element_mean(ops_, nv_, cells[i].u.data(), mean);
    double h[3];
    cell_sizes(cells[i].key.level, h);
    if (ctl.indicator == "density") {
      phi[i] = mean[0];
    } else if (ctl.indicator == "pressure") {
      phi[i] = model.pressure(mean);
    } else if (ctl.indicator == "velocity") {
      const double vx = mean[1] / mean[0], vy = mean[2] / mean[0], vz = mean[3] / mean[0];
      phi[i] = std::sqrt(vx * vx + vy * vy + vz * vz);
    } else if (ctl.indicator == "vorticity") {
      phi[i] = cell_mean_vorticity(ops_, nv_, cells[i].u.data(), h);
    } else {
      throw std::invalid_argument("unknown amr indicator '" + ctl.indicator + "'");
    }
  }

  // Pass 2: Loehner-type second/first difference ratio over face neighbors.
  for (int idx : active) {
    Cell& cell = cells[idx];
    double h[3];
    cell_sizes(cell.key.level, h);
    double num = 0.0, den = 0.0;
    for (int axis = 0; axis < geom_.d; ++axis) {
      double pc = phi[idx], pp = pc, pm = pc;
      for (int side = 0; side < 2; ++side) {
        CellKey nk = cell.key;
        nk.c[axis] += side == 1 ? 1 : -1;
        if (!wrap(nk)) continue;
        const int nidx = find(nk);
        if (nidx >= 0 && cells[nidx].alive) (side == 1 ? pp : pm) = phi[nidx];
      }
      const double h2 = h[axis] * h[axis];
      const double d2 = (pp - 2.0 * pc + pm) / h2;
      const double d1 = (std::abs(pp - pc) + std::abs(pc - pm)) / h2;
      const double noise = ctl.eps_noise * (std::abs(pp) + 2.0 * std::abs(pc) + std::abs(pm)) / h2;
      num += d2 * d2;
      const double dterm = d1 + noise;
      den += dterm * dterm;
    }
    cell.chi = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
}

bool Grid::adapt(const AdaptControl& ctl) {
  const int r = geom_.rfac, d = geom_.d;

  std::vector<char> refine(cells.size(), 0);
  for (int idx : active) {
    if (cells[idx].key.level < ctl.lmax && cells[idx].chi > ctl.chi_ref) refine[idx] = 1;
  }

  // Close refinement marks under the 2:1 (Voronoi) balance rule: refining a cell
  // forces every coarser Voronoi neighbor to refine as well.
  bool grew = true;
  while (grew) {
    grew = false;
    for (int idx : active) {
      if (!refine[idx]) continue;
      const CellKey k = cells[idx].key;
      int off[3];
      for (off[2] = (d > 2 ? -1 : 0); off[2] <= (d > 2 ? 1 : 0); ++off[2]) {
        for (off[1] = (d > 1 ? -1 : 0); off[1] <= (d > 1 ? 1 : 0); ++off[1]) {
          for (off[0] = -1; off[0] <= 1; ++off[0]) {
            if (!off[0] && !off[1] && !off[2]) continue;
            CellKey nk = k;
            for (int a = 0; a < 3; ++a) nk.c[a] += off[a];
            if (!wrap(nk)) continue;
            const int cover = active_cover(nk);
            if (cover >= 0 && cells[cover].key.level < k.level && !refine[cover]) {
              refine[cover] = 1;
              grew = true;
            }
          }
        }
      }
    }
  }

  // Recoarsening candidates: complete sibling groups of active, unlimited, quiet
  // cells whose removal keeps the balance.
  std::vector<int> coarsen_parents;
  for (size_t i = 0; i < cells.size(); ++i) {
    const Cell& p = cells[i];
    if (!p.alive || p.status != Status::VirtualParent) continue;
    bool ok = true;
    int ci[3];
    for (ci[2] = 0; ci[2] < (d > 2 ? r : 1) && ok; ++ci[2]) {
      for (ci[1] = 0; ci[1] < (d > 1 ? r : 1) && ok; ++ci[1]) {
        for (ci[0] = 0; ci[0] < r && ok; ++ci[0]) {
          const int cidx = find(child_key(p.key, ci));
          if (cidx < 0 || !cells[cidx].alive || cells[cidx].status != Status::Active ||
              cells[cidx].limited || cells[cidx].chi >= ctl.chi_rec || refine[cidx]) {
            ok = false;
          }
        }
      }
    }
    if (!ok) continue;
    // Balance: no Voronoi-adjacent active deeper than level+1 after reactivation.
    int off[3];
    for (off[2] = (d > 2 ? -1 : 0); off[2] <= (d > 2 ? 1 : 0) && ok; ++off[2]) {
      for (off[1] = (d > 1 ? -1 : 0); off[1] <= (d > 1 ? 1 : 0) && ok; ++off[1]) {
        for (off[0] = -1; off[0] <= 1 && ok; ++off[0]) {
          if (!off[0] && !off[1] && !off[2]) continue;
          CellKey nk = p.key;
          for (int a = 0; a < 3; ++a) nk.c[a] += off[a];
          if (!wrap(nk)) continue;
          const int nidx = find(nk);
          if (nidx < 0 || !cells[nidx].alive) continue;
          if (cells[nidx].status != Status::VirtualParent) continue;
          // Any grandchild-level refinement adjacent to p breaks balance. The
          // neighbor's children facing p must all be leaves.
          int cj[3];
          for (cj[2] = 0; cj[2] < (d > 2 ? r : 1) && ok; ++cj[2]) {
            for (cj[1] = 0; cj[1] < (d > 1 ? r : 1) && ok; ++cj[1]) {
              for (cj[0] = 0; cj[0] < r && ok; ++cj[0]) {
                const CellKey ck = child_key(cells[nidx].key, cj);
                const int cidx = find(ck);
                if (cidx < 0 || !cells[cidx].alive) continue;
                if (cells[cidx].status != Status::VirtualParent) continue;
                // adjacent to p's region (at the child level)?
                bool adj = true;
                for (int a = 0; a < d && adj; ++a) {
                  const long plo = static_cast<long>(p.key.c[a]) * r;
                  const long phi_ = plo + r - 1;
                  long cc = ck.c[a];
                  // account for periodic wrap by comparing modulo the lattice size
                  const long n = cells_per_axis(ck.level, a);
                  long dist = std::min(std::abs(cc - plo), std::abs(cc - phi_));
                  dist = std::min(dist, n - std::max(std::abs(cc - plo), std::abs(cc - phi_)));
                  if (cc >= plo && cc <= phi_) dist = 0;
                  if (dist > 1) adj = false;
                }
                if (adj) ok = false;
              }
            }
          }
        }
      }
    }
    if (ok) coarsen_parents.push_back(static_cast<int>(i));
  }

  bool changed = false;

  // Execute refinements.
  for (size_t i = 0; i < refine.size(); ++i) {
    if (!refine[i]) continue;
    Cell& parent = cells[i];
    if (!parent.alive || parent.status != Status::Active) continue;
    changed = true;
    const bool was_limited = parent.limited;
    const CellKey pkey = parent.key;
    std::vector<double> pu = parent.u;  // copy: insert_cell may reallocate
    std::vector<double> pw = parent.w;
    parent.status = Status::VirtualParent;
    parent.limited = false;
    parent.w.clear();
    int ci[3];
    for (ci[2] = 0; ci[2] < (d > 2 ? r : 1); ++ci[2]) {
      for (ci[1] = 0; ci[1] < (d > 1 ? r : 1); ++ci[1]) {
        for (ci[0] = 0; ci[0] < r; ++ci[0]) {
          const CellKey ck = child_key(pkey, ci);
          int cidx = find(ck);
          if (cidx < 0) {
            cidx = insert_cell(ck, Status::Active);
          } else {
            cells[cidx].status = Status::Active;
          }
          Cell& child = cells[cidx];
          project_to_child(pu.data(), ci, child.u.data());
          if (was_limited) {
            child.limited = true;
            child.w.assign(static_cast<size_t>(ops_.subcells_nd()) * nv_, 0.0);
            project_to_subcells(ops_, nv_, child.u.data(), child.w.data());
          } else {
            child.limited = false;
            child.w.clear();
          }
        }
      }
    }
  }

  // Execute recoarsenings.
  for (int pidx : coarsen_parents) {
    Cell& parent = cells[pidx];
    if (!parent.alive || parent.status != Status::VirtualParent) continue;
    changed = true;
    std::vector<const double*> child_ptrs;
    std::vector<int> child_idx;
    int ci[3];
    for (ci[2] = 0; ci[2] < (d > 2 ? r : 1); ++ci[2]) {
      for (ci[1] = 0; ci[1] < (d > 1 ? r : 1); ++ci[1]) {
        for (ci[0] = 0; ci[0] < r; ++ci[0]) {
          const int cidx = find(child_key(parent.key, ci));
          child_idx.push_back(cidx);
          child_ptrs.push_back(cells[cidx].u.data());
        }
      }
    }
    average_from_children(child_ptrs, parent.u.data());
    parent.status = Status::Active;
    parent.limited = false;
    parent.w.clear();
    for (int cidx : child_idx) remove_cell(cidx);
  }

  rebuild_active_list();
  rebuild_virtual_cells();
  update_virtual_payloads();
  rebuild_faces();
  if (changed) validate();
  return changed;
}

void Grid::validate() const {
  // Tiling by volume.
  double vol = 0.0;
  for (int idx : active) {
    double h[3];
    cell_sizes(cells[idx].key.level, h);
    double v = h[0];
    for (int a = 1; a < geom_.d; ++a) v *= h[a];
    vol += v;
  }
  double dom = geom_.hi[0] - geom_.lo[0];
  for (int a = 1; a < geom_.d; ++a) dom *= geom_.hi[a] - geom_.lo[a];
  if (std::abs(vol - dom) > 1e-9 * dom) {
    throw std::runtime_error("grid: active cells do not tile the domain");
  }
  for (int idx : active) {
    const CellKey k = cells[idx].key;
    // ancestors must be virtual parents
    CellKey a = k;
    while (a.level > 0) {
      a = parent_key(a);
      const int ai = find(a);
      if (ai < 0 || !cells[ai].alive || cells[ai].status != Status::VirtualParent) {
        throw std::runtime_error("grid: active cell with inconsistent ancestry");
      }
    }
    // face neighbors within one level
    for (int axis = 0; axis < geom_.d; ++axis) {
      for (int side = 0; side < 2; ++side) {
        CellKey nk = k;
        nk.c[axis] += side == 1 ? 1 : -1;
        if (!wrap(nk)) continue;
        int cover = active_cover(nk);
        if (cover < 0) {
          // neighbor is refined; the children adjacent to us must be active
          const int nidx = find(nk);
          if (nidx < 0 || cells[nidx].status != Status::VirtualParent) {
            throw std::runtime_error("grid: neighbor region unresolved");
          }
          continue;
        }
        if (std::abs(cells[cover].key.level - k.level) > 1) {
          throw std::runtime_error("grid: face-level jump exceeds one");
        }
      }
    }
  }
}

}  // namespace aderdg
