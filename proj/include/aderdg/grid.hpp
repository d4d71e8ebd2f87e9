//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file grid.hpp
//  \brief Cell-by-cell tree-structured Cartesian AMR: active tiling, virtual
//         parents/children, refinement estimator, and level transfers.
//
//  Lattice convention: a cell at level l has integer coordinates in
//  [0, base[axis] * r^l) per axis and spans lo + c*h_l .. lo + (c+1)*h_l with
//  h_l = (hi-lo)/(base*r^l). The active cells tile the domain; face neighbors never
//  differ by more than one level (full 2:1 balance, enforced across corners too).

#ifndef ADERDG_GRID_HPP_
#define ADERDG_GRID_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aderdg/corrector.hpp"
#include "aderdg/operators.hpp"
#include "aderdg/pde.hpp"
#include "aderdg/predictor.hpp"

namespace aderdg {

enum class BcKind { Periodic, NoslipWall, SlipWall, Outflow, AnalyticInflow };

// Domain-boundary ghost evaluation, implemented by the scenario layer. `side` is
// 2*axis + (0 low | 1 high). For wall kinds the caller passes the mirrored interior
// state as u_in, for outflow the edge state; analytic inflow ignores u_in and
// evaluates the prescribed field at (x, t). Gradients are always copied by the caller.
class BoundaryConditions {
 public:
  virtual ~BoundaryConditions() = default;
  virtual BcKind kind(int side) const = 0;
  virtual void ghost_state(int side, const double* x, double t, const double* u_in,
                           double* u_out) const = 0;
  // Wall velocity for moving no-slip walls (zero otherwise).
  virtual void wall_velocity(int side, const double* x, double t, double* v) const {
    (void)side;
    (void)x;
    (void)t;
    v[0] = v[1] = v[2] = 0.0;
  }
};

struct CellKey {
  int level = 0;
  int32_t c[3] = {0, 0, 0};
  bool operator==(const CellKey& o) const {
    return level == o.level && c[0] == o.c[0] && c[1] == o.c[1] && c[2] == o.c[2];
  }
};

struct CellKeyHash {
  size_t operator()(const CellKey& k) const {
    uint64_t h = static_cast<uint64_t>(k.level) * 0x9e3779b97f4a7c15ull;
    for (int j = 0; j < 3; ++j) {
      h ^= (static_cast<uint64_t>(static_cast<uint32_t>(k.c[j])) + 0x9e3779b97f4a7c15ull +
            (h << 6) + (h >> 2));
    }
    return static_cast<size_t>(h);
  }
};

enum class Status : int8_t { VirtualParent = -1, Active = 0, VirtualChild = 1 };

struct Cell {
  CellKey key;
  Status status = Status::Active;
  bool alive = true;
  bool limited = false;  // beta: subcell data w is the authoritative payload

  std::vector<double> u;  // nodal DG coefficients [node*nv + v]
  std::vector<double> w;  // subcell averages, valid when limited

  // Per-step bookkeeping (meaningful for the stepper).
  double t_open = 0.0;
  bool old_limited = false;
  std::vector<double> u_old, w_old;
  std::vector<double> old_rep;  // cached subcell representation of the old data
  bool old_rep_valid = false;
  Predictor pred;
  std::vector<FaceTraces> traces;  // cached native face traces of the predictor
  std::vector<double> buf;         // accumulated nodal increments
  std::vector<double> cand;        // candidate at close
  bool troubled = false;
  double chi = 0.0;
};

struct Face {
  int dim = 0;
  int cell_lo = -1;   // cell on the low-coordinate side (-1: domain boundary)
  int cell_hi = -1;   // cell on the high-coordinate side
  int fine_cell = -1; // the cell whose level sets the face granularity
  int bc_side = -1;   // >= 0 for domain-boundary faces
  bool mortar = false;
  FaceMap coarse_map;  // mapping of the fine face into the coarse cell's face
  double h_pen = 0.0;  // finer normal cell size (penalty length)
  // Last integrated interval and its time-averaged nodal fluxes [tan*nv+v],
  // oriented along +dim.
  double t0 = 0.0, dtf = 0.0;
  std::vector<double> Gbar;
};

struct GridGeometry {
  int d = 1;
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {1.0, 1.0, 1.0};
  int base[3] = {1, 1, 1};
  bool periodic[3] = {true, true, true};
  int rfac = 2;
  int lmax = 0;
};

struct AdaptControl {
  double chi_ref = 0.25;
  double chi_rec = 0.05;
  double eps_noise = 0.01;
  std::string indicator = "density";
  int lmax = 0;
  int rfac = 2;
};

class Grid {
 public:
  Grid(const GridGeometry& geom, const OperatorSet& ops, int nvars);

  const GridGeometry& geom() const { return geom_; }
  const OperatorSet& ops() const { return ops_; }
  int nv() const { return nv_; }

  // --- topology ----------------------------------------------------------
  int find(const CellKey& k) const;
  // Wraps periodic axes in place; false when the key leaves a non-periodic axis.
  bool wrap(CellKey& k) const;
  int cells_per_axis(int level, int axis) const;
  void cell_sizes(int level, double h[3]) const;
  void cell_bounds(const CellKey& k, double lo[3], double hi[3]) const;
  CellKey parent_key(const CellKey& k) const;
  CellKey child_key(const CellKey& k, const int ci[3]) const;
  // Active cell covering the lattice position (walking up levels); -1 if outside.
  int active_cover(CellKey k) const;
  int max_active_level() const;

  std::vector<Cell> cells;
  std::vector<int> active;  // active cell indices in deterministic tree order
  std::vector<Face> faces;

  // --- maintenance --------------------------------------------------------
  void rebuild_active_list();
  void rebuild_virtual_cells();
  void rebuild_faces();
  // Refresh every virtual payload from active data (used outside the time loop).
  void update_virtual_payloads();
  void refresh_virtual_parents_at(int level);
  // Virtual children refresh; uses the parent predictor when the parent is
  // mid-interval at `time` (pass use_pred=false outside the time loop).
  void refresh_virtual_children_at(int level, double time, bool use_pred);

  // --- transfers ----------------------------------------------------------
  // Nodal payload of child (ci) from a parent polynomial, and the L2 average of a
  // full child set onto the parent.
  void project_to_child(const double* parent_u, const int ci[3], double* child_u) const;
  void average_from_children(const std::vector<const double*>& child_u, double* parent_u) const;

  // --- adaptation ---------------------------------------------------------
  void compute_chi(const PdeModel& model, const AdaptControl& ctl);
  // Returns true when the grid changed. Payload transfers are exact on the DG space;
  // limited cells carry their subcell data through reconstruction/projection.
  bool adapt(const AdaptControl& ctl);

  // Deterministic depth-first enumeration of active cells.
  void tree_order(std::vector<int>& out) const;

  // Structural invariants (tiling, 2:1 balance, virtual-cell consistency); throws
  // with a description when violated. Used by tests and after adapt.
  void validate() const;

  int insert_cell(const CellKey& k, Status st);
  void remove_cell(int idx);

 private:
  GridGeometry geom_;
  const OperatorSet& ops_;
  int nv_ = 0;
  std::unordered_map<CellKey, int, CellKeyHash> index_;

  double indicator_value(const PdeModel& model, const std::string& which, int cell_idx,
                         const double* mean, const double* grad_proxy) const;
};

}  // namespace aderdg

#endif  // ADERDG_GRID_HPP_
