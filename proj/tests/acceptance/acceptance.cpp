// Acceptance run: one PASS/FAIL line per criterion.
//
//   PFORGE_ACCEPTANCE=1,2,5     run only these criteria (default: all)
//   PFORGE_ACCEPTANCE_OUT=DIR   where the desk Hadamard run writes its files
//                               (default: acceptance_out in the working dir)
//   PFORGE_ACCEPTANCE_DEVICE=F  geometry for criterion 7 when 6 is not run
//   PFORGE_WORKERS=N            worker threads (default: all cores)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "desk.hpp"
#include "oracles.hpp"
#include "photonic_forge/analysis.hpp"
#include "photonic_forge/errors.hpp"
#include "photonic_forge/fidelity.hpp"
#include "photonic_forge/gates.hpp"
#include "photonic_forge/optimizer.hpp"
#include "photonic_forge/parallel.hpp"
#include "physics.hpp"
#include "tiny.hpp"

using namespace pforge;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records one check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (ok ? "" : " [FAIL]");
    pass = pass && ok;
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

int workers() {
  if (const char* w = std::getenv("PFORGE_WORKERS")) return std::max(1, std::atoi(w));
  return default_workers();
}

fs::path out_dir() {
  const char* d = std::getenv("PFORGE_ACCEPTANCE_OUT");
  return d ? fs::path(d) : fs::path("acceptance_out");
}

// ---------------------------------------------------------------- 1
void fdtd_physics(Verdict& v) {
  const double speed = physics::plane_pulse_speed();
  v.check(std::abs(speed - 1.0) <= 0.01, "pulse speed " + fmt(speed, 6) + " c");
  const double drift = physics::pec_energy_drift();
  v.check(drift <= 1e-3, "PEC energy drift " + fmt(drift, 3));
  const double refl = physics::pml_reflection();
  v.check(refl <= 1e-3, "PML reflection " + fmt(refl, 3));
  const double lin = physics::linearity_error();
  v.check(lin <= 1e-12, "linearity " + fmt(lin, 3));
  const physics::Causality cone = physics::impulse_cone();
  v.check(cone.exact, std::string("causality ") + (cone.exact ? "exact" : "violated"));
}

// ---------------------------------------------------------------- 2
FieldRecord random_record(std::mt19937_64& rng, std::size_t cells, std::size_t samples) {
  std::normal_distribution<double> g;
  FieldRecord r;
  r.regions = {CellRect{0, 0, static_cast<int>(cells), 1}};
  r.cells = cells;
  r.samples = samples;
  r.dt = 0.01;
  for (auto* c : {&r.ez_t, &r.bx_t, &r.by_t}) {
    c->resize(cells * samples);
    for (double& x : *c) x = g(rng);
  }
  return r;
}

FieldRecord scaled(FieldRecord r, double a) {
  for (auto* c : {&r.ez_t, &r.bx_t, &r.by_t})
    for (double& x : *c) x *= a;
  return r;
}

void fidelity_algebra(Verdict& v) {
  std::mt19937_64 rng(2024);
  double worst_self = 0.0, worst_sym = 0.0;
  int cs_violations = 0;
  for (int k = 0; k < 100; ++k) {
    const FieldRecord a = random_record(rng, 9, 40), b = random_record(rng, 9, 40);
    for (double alpha : {1.0, -1.0, 0.3, -7.5, 1e5})
      worst_self = std::max(worst_self, std::abs(fidelity(a, scaled(a, alpha)) - 1.0));
    worst_sym = std::max(worst_sym, std::abs(fidelity(a, b) - fidelity(b, a)));
    const double ab = inner_product(a, b);
    if (ab * ab > inner_product(a, a) * inner_product(b, b)) ++cs_violations;
  }
  v.check(worst_self <= 1e-12, "F(X,aX)=1 within " + fmt(worst_self, 3));
  v.check(worst_sym <= 1e-15, "symmetry within " + fmt(worst_sym, 3));
  v.check(cs_violations == 0, "Cauchy-Schwarz violations " + std::to_string(cs_violations));
  FieldRecord one;
  one.regions = {CellRect{0, 0, 1, 1}};
  one.cells = one.samples = 1;
  one.ez_t = {2.0};
  one.bx_t = one.by_t = {0.0};
  const double hand = inner_product(one, one);
  v.check(std::abs(hand - 2.0) <= 1e-12, "hand example " + fmt(hand, 17));
}

// ---------------------------------------------------------------- 3
void gate_library(Verdict& v) {
  const UnitarySpec h = hadamard();
  const double s = 1.0 / std::sqrt(2.0);
  const bool exact = h(0, 0) == Complex(s, 0) && h(0, 1) == Complex(s, 0) && h(1, 0) == Complex(s, 0) &&
                     h(1, 1) == Complex(-s, 0);
  v.check(exact, "Hadamard entries exact");
  const double f2 = (fourier(2).entries() - h.entries()).cwiseAbs().maxCoeff();
  v.check(f2 <= 1e-15, "fourier(2)-H " + fmt(f2, 3));
  oracle::CMatrix f(4, std::vector<Complex>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) f[i][j] = fourier(4)(i, j);
  const double dev = oracle::max_dev_from_identity(oracle::matmul(oracle::matmul(f, f), oracle::matmul(f, f)));
  v.check(dev <= 1e-12, "fourier(4)^4-I " + fmt(dev, 3));

  constexpr int n = 10000;
  double worst = 0.0, sums[4] = {0, 0, 0, 0};
  for (int k = 0; k < n; ++k) {
    const auto [p, u] = sample_u2(static_cast<std::uint64_t>(k));
    worst = std::max(worst, u.unitarity_defect());
    sums[0] += p.alpha, sums[1] += p.phi, sums[2] += p.psi, sums[3] += p.chi;
  }
  v.check(worst <= 1e-10, "10^4 U(2) defect " + fmt(worst, 3));
  const double pi = std::numbers::pi;
  const double len[4] = {2 * pi, pi / 2, 2 * pi, 2 * pi};
  double worst_z = 0.0;
  for (int q = 0; q < 4; ++q) {
    const double sigma = len[q] / std::sqrt(12.0 * n);
    worst_z = std::max(worst_z, std::abs(sums[q] / n - len[q] / 2) / sigma);
  }
  v.check(worst_z <= 3.0, "parameter means within " + fmt(worst_z, 3) + " sigma");
}

// ---------------------------------------------------------------- 4
void self_consistency(Verdict& v) {
  const SimulationSetup s = desk::setup();
  const int w = workers();
  const PixelMap id_map = desk::identity_map(s.layout);
  const bool same_raster = rasterize(s.layout, id_map, s.sim.cell_size_nm).eps ==
                           identity_layout(s.layout, s.sim.cell_size_nm).eps;
  v.check(same_raster, "identity-equivalent map rasterises to the reference");
  const double f_id = evaluate(id_map, s, identity_gate(2), make_targets(s, identity_gate(2), w), w);
  v.check(f_id >= 1.0 - 1e-6, "identity F " + fmt(f_id, 12));

  const DeviceEvaluator ev(s, hadamard(), make_targets(s, hadamard(), w), w);
  std::mt19937_64 rng(4);
  std::vector<std::uint8_t> bits(64);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  const PixelMap pm(8, 8, s.layout.design_width_nm / 8, bits);
  const double base = ev.evaluate(pm).aggregate;
  const double refined = ev.evaluate(refine(pm, 125.0)).aggregate;
  v.check(std::abs(refined - base) <= 1e-12, "refine-then-evaluate diff " + fmt(std::abs(refined - base), 3));

  bool bitwise = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 r(seed);
    PixelMap m(16, 16, s.layout.design_width_nm / 16, false);
    for (std::size_t k = 0; k < m.size(); ++k) m.set(k, (r() & 1u) != 0);
    bitwise = bitwise && perturb(m, s.layout, 0.0, seed, s.sim.cell_size_nm).eps ==
                             rasterize(s.layout, m, s.sim.cell_size_nm).eps;
  }
  v.check(bitwise, "perturb(d=0) == rasterize on 20 maps");
}

// ---------------------------------------------------------------- 5
void optimizer_correctness(Verdict& v) {
  int mismatches = 0;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(12);
    for (double& x : w) x = u(rng);
    const Objective f = [&w](const PixelMap& pm) {
      double s = 0;
      for (std::size_t k = 0; k < pm.size(); ++k) s += pm.at(k) ? w[k] : 0.0;
      return s;
    };
    OptimizerConfig cfg;
    cfg.initial_rows = 3;
    cfg.initial_cols = 4;
    cfg.min_pixel_nm = 100.0;
    cfg.seed = seed;
    const OptimizationResult r = optimize(cfg, PixelMap(3, 4, 100.0, true), f);
    const auto [best, arg] = oracle::brute_force_max(12, [&w](std::uint32_t m) {
      double s = 0;
      for (int k = 0; k < 12; ++k) s += (m >> k) & 1u ? w[k] : 0.0;
      return s;
    });
    std::uint32_t got = 0;
    for (std::size_t k = 0; k < 12; ++k) got |= r.best.at(k) ? 1u << k : 0u;
    if (got != arg || r.fidelity != f(r.best)) ++mismatches;
    monotone = monotone && log_is_monotone(r.log);
  }
  v.check(mismatches == 0, "surrogate vs brute force mismatches " + std::to_string(mismatches) + "/20");

  const SimulationSetup s = tiny::setup();
  const auto targets = make_targets(s, hadamard(), workers());
  OptimizerConfig cfg;
  cfg.initial_rows = cfg.initial_cols = 2;
  cfg.min_pixel_nm = 300.0;
  cfg.max_passes_per_level = 2;
  cfg.seed = 12;
  std::optional<OptimizationResult> first;
  bool identical = true;
  for (int w : {1, 2, 8}) {
    const OptimizationResult r = optimize(cfg, DeviceEvaluator(s, hadamard(), targets, w));
    monotone = monotone && log_is_monotone(r.log);
    if (!first) {
      first = r;
      continue;
    }
    identical = identical && geometry_to_string(r.best) == geometry_to_string(first->best) &&
                r.fidelity == first->fidelity && r.log.entries.size() == first->log.entries.size();
    for (std::size_t k = 0; identical && k < r.log.entries.size(); ++k)
      identical = r.log.entries[k].fidelity == first->log.entries[k].fidelity &&
                  r.log.entries[k].pixel_index == first->log.entries[k].pixel_index;
  }
  v.check(monotone, "iteration logs non-decreasing");
  v.check(identical, "FDTD run bitwise identical for 1, 2, 8 workers (" +
                         std::to_string(first->log.entries.size()) + " visits, F " + fmt(first->fidelity) + ")");
}

// ---------------------------------------------------------------- 6
std::optional<PixelMap> g_device;

void desk_hadamard(Verdict& v) {
  const SimulationSetup s = desk::setup();
  const int w = workers();
  const fs::path dir = out_dir();
  fs::create_directories(dir);
  const OptimizerConfig cfg = desk::optimizer();
  const DeviceEvaluator ev(s, hadamard(), make_targets(s, hadamard(), w), w);
  const auto t0 = std::chrono::steady_clock::now();
  const OptimizationResult r = optimize(cfg, ev, [&](const Checkpoint& cp) {
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "  [6] level %g nm pass %d F=%.4f (%.0f s)\n", cp.level_pixel_nm, cp.pass, cp.fidelity, el);
    write_checkpoint((dir / "checkpoint").string(), cp);
  });
  save_geometry((dir / "hadamard_device.geom").string(), r.best);
  {
    std::ofstream os(dir / "iterations.csv");
    write_log_csv(os, r.log);
  }
  g_device = r.best;

  v.check(r.best.pixel_size_nm() == 250.0, "final pixels " + fmt(r.best.pixel_size_nm()) + " nm");
  v.check(r.fidelity >= 0.70, "aggregate F " + fmt(r.fidelity));

  // Largest single accepted increase of each level after a refinement must
  // fall in that level's first pass.
  const auto& e = r.log.entries;
  v.check(!r.log.refinements.empty(), std::to_string(r.log.refinements.size()) + " refinement(s)");
  for (std::size_t k = 0; k < r.log.refinements.size(); ++k) {
    const RefinementEvent& ev_k = r.log.refinements[k];
    const std::size_t end = k + 1 < r.log.refinements.size() ? r.log.refinements[k + 1].first_entry : e.size();
    double prev = ev_k.fidelity_after, best_jump = 0.0;
    int best_pass = -1;
    for (std::size_t i = ev_k.first_entry; i < end; ++i) {
      const double jump = e[i].fidelity - prev;
      if (jump > best_jump) {
        best_jump = jump;
        best_pass = e[i].pass;
      }
      prev = e[i].fidelity;
    }
    v.check(best_pass == 0, "level " + fmt(ev_k.pixel_nm_after) + " nm largest step +" + fmt(best_jump, 3) +
                                " in pass " + std::to_string(best_pass));
  }
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  v.check(minutes <= 120.0, "optimisation " + fmt(minutes, 3) + " min, " + std::to_string(e.size()) + " visits");
}

// ---------------------------------------------------------------- 7
void error_analysis(Verdict& v) {
  std::optional<PixelMap> device = g_device;
  if (!device) {
    const char* path = std::getenv("PFORGE_ACCEPTANCE_DEVICE");
    const fs::path p = path ? fs::path(path) : out_dir() / "hadamard_device.geom";
    if (!fs::exists(p)) {
      v.check(false, "no device: run criterion 6 or set PFORGE_ACCEPTANCE_DEVICE");
      return;
    }
    device = load_geometry(p.string());
  }
  const SimulationSetup s = desk::setup();
  const int w = workers();
  const double l0 = s.sim.wavelength_nm;
  std::vector<double> lambdas;
  for (int k = 0; k < 9; ++k) lambdas.push_back(l0 * (0.9 + 0.025 * k));
  lambdas.push_back(0.85 * l0);
  const SweepResult wl = sweep_wavelength(*device, s, hadamard(), lambdas, w);
  double f0 = -1, fmax = -1;
  for (int k = 0; k < 9; ++k) {
    fmax = std::max(fmax, wl.points[k].mean);
    if (k == 4) f0 = wl.points[k].mean;
  }
  const double f085 = wl.points[9].mean;
  std::ostringstream curve;
  for (const SweepPoint& p : wl.points) curve << ' ' << fmt(p.axis_value) << ':' << fmt(p.mean, 3);
  std::fprintf(stderr, "  [7] wavelength sweep%s\n", curve.str().c_str());
  v.check(f0 >= fmax - 0.02, "F(l0) " + fmt(f0) + " vs sweep max " + fmt(fmax));
  v.check(f085 < f0, "F(0.85 l0) " + fmt(f085));

  const std::vector<double> shifts{0, 5, 10, 20, 40};
  const SweepResult dp = sweep_displacement(*device, s, hadamard(), shifts, 10, 2026, w);
  double num = 0.0, den = 0.0;
  int failures = 0;
  for (const SweepPoint& p : dp.points) {
    num += (p.trials - 1) * p.stddev * p.stddev;
    den += p.trials - 1;
    failures += p.failures;
  }
  const double pooled = den > 0 ? std::sqrt(num / den) : 0.0;
  std::ostringstream dcurve;
  for (const SweepPoint& p : dp.points) dcurve << ' ' << fmt(p.axis_value) << ':' << fmt(p.mean, 4) << "+-" << fmt(p.stddev, 2);
  std::fprintf(stderr, "  [7] displacement sweep%s\n", dcurve.str().c_str());
  v.check(failures == 0, std::to_string(failures) + " failed trials");
  v.check(dp.points[1].mean >= dp.points[0].mean - 0.02,
          "mean(5nm) " + fmt(dp.points[1].mean) + " vs mean(0) " + fmt(dp.points[0].mean));
  bool mono = true;
  for (std::size_t k = 1; k < dp.points.size(); ++k) mono = mono && dp.points[k].mean <= dp.points[k - 1].mean + pooled;
  v.check(mono, "non-increasing within pooled std " + fmt(pooled, 3) + ", mean(40nm) " + fmt(dp.points[4].mean));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"FDTD physics suite", fdtd_physics},
      {"Fidelity algebra suite", fidelity_algebra},
      {"Gate library suite", gate_library},
      {"Self-consistency", self_consistency},
      {"Optimizer correctness", optimizer_correctness},
      {"Desk-scale Hadamard design", desk_hadamard},
      {"Error-analysis shape", error_analysis},
  };
  // Budget in seconds for each criterion.
  const double budget[] = {120, 10, 10, 300, 300, 7200, 1800};

  std::set<int> selected;
  if (const char* sel = std::getenv("PFORGE_ACCEPTANCE")) {
    std::stringstream ss(sel);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) selected.insert(std::stoi(t));
  } else {
    for (int k = 1; k <= 7; ++k) selected.insert(k);
  }

  int failed = 0;
  for (int k = 1; k <= 7; ++k) {
    if (!selected.count(k)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k - 1].second(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (k != 6) v.check(sec <= budget[k - 1], fmt(sec, 3) + " s of " + fmt(budget[k - 1], 4) + " s");
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", k, criteria[k - 1].first.c_str(),
                v.detail.str().c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
