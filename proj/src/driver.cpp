//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/driver.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace aderdg {

namespace {

// Physical nodal gradients of one cell polynomial; grad layout [(s*d + j)*nv + v].
void nodal_gradients(const OperatorSet& ops, int nv, const double* u, const double h[3],
                     std::vector<double>& grad) {
  const int np = ops.np, d = ops.d;
  const int m[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  const int nsp = m[0] * m[1] * m[2];
  const int stride[3] = {1, m[0], m[0] * m[1]};
  grad.assign(static_cast<size_t>(nsp) * d * nv, 0.0);
  for (int s = 0; s < nsp; ++s) {
    const int i3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    for (int j = 0; j < d; ++j) {
      const int base = s - i3[j] * stride[j];
      double* g = grad.data() + (static_cast<size_t>(s) * d + j) * nv;
      for (int p = 0; p < m[j]; ++p) {
        const double c = ops.diff[i3[j] * np + p] / h[j];
        const double* up = u + static_cast<size_t>(base + p * stride[j]) * nv;
        for (int v = 0; v < nv; ++v) g[v] += c * up[v];
      }
    }
  }
}

double node_weight(const OperatorSet& ops, int s) {
  const int np = ops.np, d = ops.d;
  const int m[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  const int i3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
  double w = ops.quad.weights[i3[0]];
  if (d > 1) w *= ops.quad.weights[i3[1]];
  if (d > 2) w *= ops.quad.weights[i3[2]];
  return w;
}

void project_initial_condition(Simulation& sim) {
  Grid& g = *sim.grid;
  const OperatorSet& ops = *sim.ops;
  const int nv = sim.model->nvars();
  const int np = ops.np, d = g.geom().d;
  const int m[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  const int nsp = ops.nodes_nd();
  double prim[16], x[3] = {0, 0, 0};

  for (int idx : g.active) {
    Cell& cell = g.cells[idx];
    double clo[3], chi[3];
    g.cell_bounds(cell.key, clo, chi);
    double h[3];
    g.cell_sizes(cell.key.level, h);
    for (int s = 0; s < nsp; ++s) {
      const int i3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
      for (int a = 0; a < d; ++a) x[a] = clo[a] + ops.quad.nodes[i3[a]] * h[a];
      sim.scn.initial(x, prim);
      sim.model->prim_to_cons(prim, cell.u.data() + static_cast<size_t>(s) * nv);
      if (!sim.model->admissible(cell.u.data() + static_cast<size_t>(s) * nv)) {
        throw std::runtime_error("scenario '" + sim.scn.name +
                                 "': inadmissible initial state on the base grid");
      }
    }
    cell.limited = false;
    cell.w.clear();
  }

  // Pre-limit: where the subcell projection of the (possibly under-resolved) initial
  // polynomial is inadmissible, start the cell in limited mode with exact subcell
  // averages of the initial condition instead.
  const int Ns = ops.Ns;
  const int nsub = ops.subcells_nd();
  std::vector<double> w(static_cast<size_t>(nsub) * nv);
  std::vector<double> cons(nv);
  for (int idx : g.active) {
    Cell& cell = g.cells[idx];
    project_to_subcells(ops, nv, cell.u.data(), w.data());
    bool ok = true;
    for (int s = 0; s < nsub && ok; ++s) {
      if (!sim.model->admissible(w.data() + static_cast<size_t>(s) * nv)) ok = false;
    }
    if (ok) continue;
    double clo[3], chi[3];
    g.cell_bounds(cell.key, clo, chi);
    double h[3];
    g.cell_sizes(cell.key.level, h);
    const int msub[3] = {Ns, d > 1 ? Ns : 1, d > 2 ? Ns : 1};
    for (int s = 0; s < nsub; ++s) {
      const int i3[3] = {s % msub[0], (s / msub[0]) % msub[1], s / (msub[0] * msub[1])};
      double* ws = w.data() + static_cast<size_t>(s) * nv;
      for (int v = 0; v < nv; ++v) ws[v] = 0.0;
      // tensor GL quadrature of the initial condition over the subcell
      const int nq = ops.np;
      const int qm[3] = {nq, d > 1 ? nq : 1, d > 2 ? nq : 1};
      for (int q = 0; q < qm[0] * qm[1] * qm[2]; ++q) {
        const int q3[3] = {q % qm[0], (q / qm[0]) % qm[1], q / (qm[0] * qm[1])};
        double wq = 1.0;
        for (int a = 0; a < d; ++a) {
          x[a] = clo[a] + (i3[a] + ops.quad.nodes[q3[a]]) * h[a] / Ns;
          wq *= ops.quad.weights[q3[a]];
        }
        sim.scn.initial(x, prim);
        sim.model->prim_to_cons(prim, cons.data());
        for (int v = 0; v < nv; ++v) ws[v] += wq * cons[v];
      }
    }
    cell.w = w;
    cell.limited = true;
    reconstruct_from_subcells(ops, nv, cell.w.data(), cell.u.data());
  }
}

void freeze_glm_speed(Simulation& sim) {
  if (!sim.model->is_mhd() || !sim.scn.auto_ch) return;
  const int nv = sim.model->nvars();
  const int nsp = sim.ops->nodes_nd();
  double cmax = 0.0;
  for (int idx : sim.grid->active) {
    const Cell& cell = sim.grid->cells[idx];
    for (int s = 0; s < nsp; ++s) {
      const double* u = cell.u.data() + static_cast<size_t>(s) * nv;
      if (!sim.model->admissible(u)) continue;
      for (int a = 0; a < sim.grid->geom().d; ++a) {
        double n[3] = {0, 0, 0};
        n[a] = 1.0;
        cmax = std::max(cmax, sim.model->max_convective_speed(u, n));
      }
    }
  }
  PdeParams p = sim.scn.params;
  p.ch = cmax;
  sim.scn.params = p;
  sim.model = make_model(sim.scn.pde, p);
}

std::string csv_num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

Simulation setup_simulation(const RunConfig& cfg) {
  validate_config(cfg);
  Simulation sim;
  sim.cfg = cfg;
  sim.scn = build_scenario(cfg.scenario, cfg.overrides);
  if (!cfg.pde_override.empty()) sim.scn.pde = cfg.pde_override;

  sim.amr = cfg.amr;
  if (sim.amr.indicator.empty()) sim.amr.indicator = sim.scn.indicator;

  const int N = cfg.degree;
  const int Ns = cfg.ns > 0 ? cfg.ns : 2 * N + 1;
  sim.ops = &operators(N, sim.scn.dim, Ns, sim.amr.rfac);

  sim.model = make_model(sim.scn.pde, sim.scn.params);

  GridGeometry geom;
  geom.d = sim.scn.dim;
  geom.rfac = sim.amr.rfac;
  geom.lmax = sim.amr.lmax;
  for (int a = 0; a < 3; ++a) {
    geom.lo[a] = sim.scn.lo[a];
    geom.hi[a] = sim.scn.hi[a];
    geom.base[a] = a < sim.scn.dim ? sim.scn.base[a] : 1;
  }
  for (int a = 0; a < sim.scn.dim; ++a) {
    const bool plo = sim.scn.bc[2 * a].kind == BcKind::Periodic;
    const bool phi = sim.scn.bc[2 * a + 1].kind == BcKind::Periodic;
    if (plo != phi) {
      throw std::invalid_argument("scenario: periodic boundary must pair across axis " +
                                  std::to_string(a));
    }
    geom.periodic[a] = plo;
  }
  sim.grid = std::make_unique<Grid>(geom, *sim.ops, sim.model->nvars());

  project_initial_condition(sim);

  // Initial refinement: estimate, adapt, re-sample the analytic state.
  for (int round = 0; round < sim.amr.lmax + 1; ++round) {
    sim.grid->update_virtual_payloads();
    sim.grid->compute_chi(*sim.model, sim.amr);
    if (!sim.grid->adapt(sim.amr)) break;
    project_initial_condition(sim);
  }
  freeze_glm_speed(sim);
  sim.grid->update_virtual_payloads();

  sim.bc = std::make_unique<ScenarioBoundary>(sim.scn, *sim.model);
  StepperOptions sopt;
  sopt.cfl = cfg.cfl;
  sopt.predictor = cfg.predictor;
  sopt.limiter = cfg.limiter;
  sopt.limiter_enabled = cfg.limiter_enabled;
  sopt.threads = cfg.threads;
  sim.stepper = std::make_unique<Stepper>(*sim.grid, *sim.model, *sim.bc, sopt);
  return sim;
}

DiagnosticsRecord diagnose(const Simulation& sim, double dt, int limited_cells,
                           const DiagnosticsRecord* prev) {
  const Grid& g = *sim.grid;
  const OperatorSet& ops = *sim.ops;
  const int nv = sim.model->nvars();
  const int d = g.geom().d;
  const int nsp = ops.nodes_nd();
  const int nsub = ops.subcells_nd();
  const bool mhd = sim.model->is_mhd();

  DiagnosticsRecord rec;
  rec.t = sim.t;
  rec.dt = dt;
  rec.step = sim.step;
  rec.active_cells = static_cast<long>(g.active.size());
  rec.active_per_level.assign(static_cast<size_t>(g.geom().lmax) + 1, 0);

  double domain = 1.0;
  for (int a = 0; a < d; ++a) domain *= g.geom().hi[a] - g.geom().lo[a];

  std::vector<double> grad;
  double kinetic = 0.0, max_divb = 0.0, l2_divb = 0.0;
  double totals[16] = {0.0};
  long limited_now = 0;

  for (int idx : g.active) {
    const Cell& cell = g.cells[idx];
    if (cell.key.level <= g.geom().lmax) rec.active_per_level[cell.key.level]++;
    if (cell.limited) limited_now++;
    double h[3];
    g.cell_sizes(cell.key.level, h);
    double vol = h[0];
    for (int a = 1; a < d; ++a) vol *= h[a];

    if (cell.limited) {
      for (int s = 0; s < nsub; ++s) {
        const double* w = cell.w.data() + static_cast<size_t>(s) * nv;
        const double f = vol / nsub;
        for (int v = 0; v < nv; ++v) totals[v] += f * w[v];
        kinetic += f * 0.5 * (w[1] * w[1] + w[2] * w[2] + w[3] * w[3]) / w[0];
      }
    } else {
      for (int s = 0; s < nsp; ++s) {
        const double* u = cell.u.data() + static_cast<size_t>(s) * nv;
        const double f = vol * node_weight(ops, s);
        for (int v = 0; v < nv; ++v) totals[v] += f * u[v];
        kinetic += f * 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
      }
    }

    if (mhd) {
      nodal_gradients(ops, nv, cell.u.data(), h, grad);
      for (int s = 0; s < nsp; ++s) {
        double div = 0.0;
        for (int a = 0; a < d; ++a) div += grad[(static_cast<size_t>(s) * d + a) * nv + 5 + a];
        max_divb = std::max(max_divb, std::abs(div));
        l2_divb += vol * node_weight(ops, s) * div * div;
      }
    }
  }

  rec.mass = totals[0];
  rec.mom[0] = totals[1];
  rec.mom[1] = totals[2];
  rec.mom[2] = totals[3];
  rec.energy = totals[4];
  rec.kinetic = kinetic / domain;
  rec.max_divb = max_divb;
  rec.l2_divb = std::sqrt(l2_divb / domain);
  rec.limited_fraction =
      g.active.empty() ? 0.0
                       : static_cast<double>(limited_cells >= 0 ? limited_cells : limited_now) /
                             static_cast<double>(g.active.size());
  if (prev && rec.t > prev->t) {
    rec.dissipation = -(rec.kinetic - prev->kinetic) / (rec.t - prev->t);
  }
  return rec;
}

void write_diagnostics_header(std::ostream& os, const Simulation& sim) {
  os << "t,step,dt,mass,mom_x,mom_y,mom_z,energy,kinetic_energy,dissipation_rate,"
        "limited_fraction,active_cells,max_divB,l2_divB";
  for (int l = 0; l <= sim.grid->geom().lmax; ++l) os << ",active_l" << l;
  os << "\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec) {
  os << csv_num(rec.t) << "," << rec.step << "," << csv_num(rec.dt) << ","
     << csv_num(rec.mass) << "," << csv_num(rec.mom[0]) << "," << csv_num(rec.mom[1]) << ","
     << csv_num(rec.mom[2]) << "," << csv_num(rec.energy) << "," << csv_num(rec.kinetic)
     << "," << csv_num(rec.dissipation) << "," << csv_num(rec.limited_fraction) << ","
     << rec.active_cells << "," << csv_num(rec.max_divb) << "," << csv_num(rec.l2_divb);
  for (long n : rec.active_per_level) os << "," << n;
  os << "\n";
}

void write_snapshot(const Simulation& sim, long step, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Grid& g = *sim.grid;
  const OperatorSet& ops = *sim.ops;
  const int nv = sim.model->nvars();
  const int d = g.geom().d;
  const int nsp = ops.nodes_nd();
  const int nsub = ops.subcells_nd();
  const int Ns = ops.Ns;
  const bool mhd = sim.model->is_mhd();
  const auto names = sim.model->var_names();

  char tag[32];
  std::snprintf(tag, sizeof(tag), "%06ld", step);

  std::ofstream cf(dir + "/cells_" + tag + ".csv");
  if (!cf) throw std::runtime_error("snapshot: cannot write to '" + dir + "'");
  cf << "level,beta,ix,iy,iz,xlo,ylo,zlo,xhi,yhi,zhi";
  for (const auto& n : names) cf << "," << n;
  cf << ",p,velmag,vort_z";
  if (mhd) cf << ",jz,divB";
  cf << "\n";

  std::ofstream sf(dir + "/subgrid_" + tag + ".csv");
  sf << "level,ix,iy,iz,sx,sy,sz,x,y,z";
  for (const auto& n : names) sf << "," << n;
  sf << "\n";

  std::vector<double> grad, wbuf(static_cast<size_t>(nsub) * nv);
  double mean[16];
  for (int idx : g.active) {
    const Cell& cell = g.cells[idx];
    double clo[3] = {0, 0, 0}, chi[3] = {0, 0, 0}, h[3];
    g.cell_bounds(cell.key, clo, chi);
    g.cell_sizes(cell.key.level, h);
    element_mean(ops, nv, cell.u.data(), mean);

    // quadrature means of the derived fields
    double pmean = 0.0, vmean = 0.0, vort = 0.0, jz = 0.0, divb = 0.0;
    nodal_gradients(ops, nv, cell.u.data(), h, grad);
    for (int s = 0; s < nsp; ++s) {
      const double* u = cell.u.data() + static_cast<size_t>(s) * nv;
      const double wq = node_weight(ops, s);
      pmean += wq * sim.model->pressure(u);
      vmean += wq * std::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
      if (d > 1) {
        const double rho = u[0];
        // d(v_y)/dx - d(v_x)/dy from conserved gradients
        const double* gx = grad.data() + (static_cast<size_t>(s) * d + 0) * nv;
        const double* gy = grad.data() + (static_cast<size_t>(s) * d + 1) * nv;
        const double dvy_dx = (gx[2] - u[2] / rho * gx[0]) / rho;
        const double dvx_dy = (gy[1] - u[1] / rho * gy[0]) / rho;
        vort += wq * (dvy_dx - dvx_dy);
        if (mhd) jz += wq * (gx[6] - gy[5]);
      }
      if (mhd) {
        double div = 0.0;
        for (int a = 0; a < d; ++a) div += grad[(static_cast<size_t>(s) * d + a) * nv + 5 + a];
        divb += wq * div;
      }
    }

    cf << cell.key.level << "," << (cell.limited ? 1 : 0) << "," << cell.key.c[0] << ","
       << cell.key.c[1] << "," << cell.key.c[2] << "," << csv_num(clo[0]) << ","
       << csv_num(clo[1]) << "," << csv_num(clo[2]) << "," << csv_num(chi[0]) << ","
       << csv_num(chi[1]) << "," << csv_num(chi[2]);
    for (int v = 0; v < nv; ++v) cf << "," << csv_num(mean[v]);
    cf << "," << csv_num(pmean) << "," << csv_num(vmean) << "," << csv_num(vort);
    if (mhd) cf << "," << csv_num(jz) << "," << csv_num(divb);
    cf << "\n";

    // subgrid block
    const double* w = nullptr;
    if (cell.limited) {
      w = cell.w.data();
    } else {
      project_to_subcells(ops, nv, cell.u.data(), wbuf.data());
      w = wbuf.data();
    }
    const int msub[3] = {Ns, d > 1 ? Ns : 1, d > 2 ? Ns : 1};
    for (int s = 0; s < nsub; ++s) {
      const int i3[3] = {s % msub[0], (s / msub[0]) % msub[1], s / (msub[0] * msub[1])};
      double x[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) x[a] = clo[a] + (i3[a] + 0.5) * h[a] / Ns;
      sf << cell.key.level << "," << cell.key.c[0] << "," << cell.key.c[1] << ","
         << cell.key.c[2] << "," << i3[0] << "," << i3[1] << "," << i3[2] << ","
         << csv_num(x[0]) << "," << csv_num(x[1]) << "," << csv_num(x[2]);
      for (int v = 0; v < nv; ++v) sf << "," << csv_num(w[static_cast<size_t>(s) * nv + v]);
      sf << "\n";
    }
  }
}

RunReport run(const RunConfig& cfg) {
  const auto wall0 = std::chrono::steady_clock::now();
  RunReport rep;
  Simulation sim = setup_simulation(cfg);
  const double tend = sim.scn.t_end;

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream diag(cfg.out_dir + "/diagnostics.csv");
  write_diagnostics_header(diag, sim);

  DiagnosticsRecord rec = diagnose(sim, 0.0, 0, nullptr);
  write_diagnostics_row(diag, rec);
  write_snapshot(sim, 0, cfg.out_dir);
  long last_snapshot = 0;
  double next_out_t = cfg.out_every_time > 0.0 ? cfg.out_every_time : -1.0;

  while (sim.t < tend * (1.0 - 1e-12) &&
         (cfg.max_steps < 0 || sim.step < cfg.max_steps)) {
    if (sim.amr.lmax > 0 && sim.step > 0 && sim.step % cfg.amr_interval == 0) {
      sim.grid->update_virtual_payloads();
      sim.grid->compute_chi(*sim.model, sim.amr);
      sim.grid->adapt(sim.amr);
    }

    double dt0 = sim.stepper->compute_dt();
    dt0 = std::min(dt0, tend - sim.t);
    StepStats stats;
    try {
      stats = sim.stepper->step(sim.t, dt0);
    } catch (const std::exception& e) {
      rep.exit_code = 3;
      rep.message = e.what();
      write_snapshot(sim, -1, cfg.out_dir);
      return rep;
    }
    if (stats.terminal_failure) {
      rep.exit_code = 3;
      rep.message = "terminal limiter failure: " + stats.failure_message;
      write_snapshot(sim, -1, cfg.out_dir);
      rep.steps = sim.step;
      rep.t_final = sim.t;
      return rep;
    }
    sim.t += stats.dt0;
    sim.step++;
    rep.limiter_activations += stats.limited_cells;
    rep.predictor_warnings += stats.predictor_warnings;

    if (sim.step % cfg.diag_every_steps == 0 || sim.t >= tend * (1.0 - 1e-12)) {
      DiagnosticsRecord nrec = diagnose(sim, stats.dt0, stats.limited_cells, &rec);
      write_diagnostics_row(diag, nrec);
      rec = nrec;
    }
    const bool step_snap = cfg.out_every_steps > 0 && sim.step % cfg.out_every_steps == 0;
    const bool time_snap = next_out_t > 0.0 && sim.t >= next_out_t;
    if (step_snap || time_snap) {
      write_snapshot(sim, sim.step, cfg.out_dir);
      last_snapshot = sim.step;
      if (time_snap) next_out_t += cfg.out_every_time;
    }
  }

  if (last_snapshot != sim.step) write_snapshot(sim, sim.step, cfg.out_dir);
  rep.steps = sim.step;
  rep.t_final = sim.t;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  std::cout << "run complete: scenario=" << sim.scn.name << " steps=" << rep.steps
            << " t=" << rep.t_final << " wall=" << rep.wall_seconds << "s"
            << " limited_total=" << rep.limiter_activations
            << " predictor_warnings=" << rep.predictor_warnings << "\n";
  return rep;
}

}  // namespace aderdg
