// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "conewave/conewave.hpp"

using namespace conewave;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Fourier-side identity on 129^2, extent 64.
Outcome identity() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ShearletGenerator gen = preset_generator(p);
    const FrequencyGrid grid = build_frequency_grid(129, 129, 64.0);
    const ConeProjectionSet cones = compute_cone_projection(make_bump(default_bump_order(gen.N()), gen.N()), grid);
    const FrameSpectrum fs = build_frame_spectrum(gen, cones);
    const double direct = compute_admissibility_constant(gen, CpsiMethod::Direct).value;
    const double e_direct = tight_frame_identity_error(fs, cones, direct);
    const double e_same = tight_frame_identity_error(fs, cones, fs.cpsi);
    const double t = seconds_since(t0);
    o.pass = o.pass && e_direct <= 1e-4 && e_same <= 1e-12 && t < 120.0;
    o.detail += fmt("preset %d: err(direct C)=%.2e err(frame C)=%.2e %.1fs; ", p, e_direct, e_same, t);
  }
  return o;
}

// 2 and 3. Reconstruction and energy ledger on the corpus at 256^2.
std::pair<Outcome, Outcome> corpus_checks() {
  Outcome rec{true, ""}, led{true, ""};
  const ShearletGenerator gen = preset_generator(0);
  const FrequencyGrid grid = build_frequency_grid(256, 256, 16.0);
  const ConeProjectionSet cones = compute_cone_projection(make_bump(default_bump_order(gen.N()), gen.N()), grid);
  const FrameSpectrum fs = build_frame_spectrum(gen, cones);
  const ScaleShearScheme s25 = build_scale_shear_scheme(8, 4, 25, MeasureTag::MinusThreeHalves);
  const ScaleShearScheme s50 = build_scale_shear_scheme(8, 4, 50, MeasureTag::MinusThreeHalves);
  for (const CorpusEntry& e : reference_corpus(grid)) {
    const auto t0 = std::chrono::steady_clock::now();
    const double err = synthesize(e.field, gen, fs, cones, s25).reconstruction_error();
    const double t = seconds_since(t0);
    const double err50 = synthesize(e.field, gen, fs, cones, s50).reconstruction_error();
    rec.pass = rec.pass && err <= 2e-2 && err50 < err && t < 300.0;
    rec.detail += fmt("%s %.2e->%.2e (%.1fs); ", e.name.c_str(), err, err50, t);
    const EnergyLedger l = parseval_report(e.field, gen, fs, cones, s25);
    led.pass = led.pass && l.ratio >= 0.98 && l.ratio <= 1.02;
    led.detail += fmt("%s %.5f; ", e.name.c_str(), l.ratio);
  }
  return {rec, led};
}

std::string worst_slope(const DecayReport& r) {
  double worst = -1e300;
  for (const RayFit& f : r.rays)
    if (f.included) worst = std::max(worst, f.slope);
  return fmt("%s max slope %.3f (bound %.2f)", r.subject.c_str(), worst, r.threshold);
}

// 4. Off-cone decay of the smoothed cone indicators.
Outcome projection_decay() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const int N = preset_generator(p).N();
    const ConeProjector proj(make_bump(default_bump_order(N), N));
    for (int which : {0, 1}) {
      const DecayReport r = verify_projection_decay(proj, N, which);
      o.pass = o.pass && r.passed && !r.inconclusive;
      o.detail += fmt("preset %d %s; ", p, worst_slope(r).c_str());
    }
  }
  return o;
}

// 5. Window decay along rays of slope 0, 1/2, 1, 1.4.
Outcome window_decay() {
  Outcome o{true, ""};
  const std::vector<std::pair<double, double>> rays = {{1, 0}, {2, 1}, {1, 1}, {1, 1.4}};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const CalderonEvaluator eval(gen);
    for (int which : {0, 1}) {
      const DecayReport r = verify_window_decay(eval, gen.N(), which, 4, 10, rays);
      o.pass = o.pass && r.passed && !r.inconclusive;
      o.detail += fmt("preset %d %s; ", p, worst_slope(r).c_str());
    }
  }
  return o;
}

// 6. Spatial concentration of the inverse transform of Delta.
Outcome support() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const CalderonEvaluator eval(gen);
    const FrequencyGrid grid = build_frequency_grid(256, 256, 2.0);
    auto [delta, window] = compute_delta_and_window(eval, grid);
    const FrameSpectrum fs{grid, eval.cpsi(), delta, transpose_map(delta), window, transpose_map(window),
                           SpectralMap(grid), 0};
    const SupportReport r = verify_window_support(fs, gen);
    o.pass = o.pass && r.fraction_outside_test <= 1e-3;
    o.detail += fmt("preset %d: outside %.2e (window %.2e), 1e-6 radius %.2f vs r1=%.2f r2=%.2f test %.2f; ", p,
                    r.fraction_outside_test, r.window_fraction_outside_test, r.radius_1e6, r.r1, r.r2, r.test_radius);
  }
  return o;
}

// 7. Truncated full-group isometry of the cone-localized bandpass field.
Outcome isometry() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const FrequencyGrid grid = build_frequency_grid(128, 128, 8.0);
    const SpatialField f = default_cone_bandpass(grid);
    IsometryTruncation t;
    const double r0 = full_group_isometry_check(f, gen, t).ratio;
    t.s_max *= 2.0;
    const double r1 = full_group_isometry_check(f, gen, t).ratio;
    t.a_lo_exp *= 2;
    t.a_hi_exp *= 2;
    const double r2 = full_group_isometry_check(f, gen, t).ratio;
    o.pass = o.pass && r0 >= 0.95 && r0 <= 1.0 && r0 < r1 && r1 < r2 && r2 <= 1.0;
    o.detail += fmt("preset %d: %.7f -> %.7f -> %.7f; ", p, r0, r1, r2);
  }
  return o;
}

// 8. Diagonal limit against strip supremum, plus the strip bound.
Outcome nonexistence() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const NonexistenceReport r = nonexistence_report(gen);
    const double C = r.cpsi;
    bool strip = true;
    for (double d : {0.5, 0.25, 0.125}) strip = strip && strip_bound_probe(gen, d).holds;
    o.pass = o.pass && r.diagonal_limit >= 0.99 * 2.0 * C && r.strip_sup <= 1.6 * C && r.gap >= 0.3 * C && strip;
    o.detail += fmt("preset %d: diag/C %.5f strip/C %.4f gap/C %.4f strip bound %s; ", p, r.diagonal_limit / C,
                    r.strip_sup / C, r.gap / C, strip ? "holds" : "violated");
  }
  return o;
}

// 9. Dependence of f_low(t) on far-away perturbations.
Outcome locality() {
  Outcome o{true, ""};
  const std::size_t sizes[2] = {256, 384};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const FrequencyGrid grid = build_frequency_grid(sizes[p], sizes[p], 2.0);
    const BumpDescriptor bump = make_bump(default_bump_order(gen.N()), gen.N());
    const ConeProjectionSet cones = compute_cone_projection(bump, grid, 1.0);
    const FrameSpectrum fs = build_frame_spectrum(gen, cones);
    const SpatialField f = smoothed_edge(grid, 0.5);
    const double thr = locality_threshold(gen, bump);
    std::vector<double> ds;
    // farthest bump (half width 4 tau = 10) must stay within half a period
    for (double d = 2.0; d <= 0.5 * grid.period1() - 10.5; d += 2.0) ds.push_back(d);
    const DependenceScan scan = scan_dependence(f, fs, cones, grid.center1(), grid.center2(), 2.5, ds);
    double worst = 0.0;
    int beyond = 0;
    for (std::size_t k = 0; k < ds.size(); ++k)
      if (scan.distances[k] >= thr) worst = std::max(worst, scan.deltas[k]), ++beyond;
    o.pass = o.pass && beyond > 0 && worst <= 1e-8;
    o.detail += fmt("preset %d: threshold %.2f, %d probes beyond with max change %.2e, measured radius %.1f; ", p, thr,
                    beyond, worst, scan.measured_radius);
  }
  return o;
}

// 10. Admissibility constant by two routes.
Outcome cpsi_cross() {
  Outcome o{true, ""};
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    const double direct = compute_admissibility_constant(gen, CpsiMethod::Direct).value;
    std::vector<double> grp;
    for (auto [x, y] : {std::pair{1.0, 0.375}, std::pair{2.0, -1.0}, std::pair{0.5, 3.0}})
      grp.push_back(compute_admissibility_constant(gen, CpsiMethod::Group, x, y).value);
    double spread = 0.0;
    for (double g : grp) spread = std::max(spread, std::abs(g - grp[0]) / grp[0]);
    const double dg = std::abs(direct - grp[0]) / direct;
    o.pass = o.pass && dg <= 1e-4 && spread <= 1e-4;
    o.detail += fmt("preset %d: direct %.10f group %.10f rel %.1e, group spread %.1e; ", p, direct, grp[0], dg, spread);
  }
  return o;
}

// 11. Slowest decay along the edge normal direction.
Outcome directional() {
  Outcome o{true, ""};
  const FrequencyGrid grid = build_frequency_grid(1024, 1024, 64.0);
  for (int p : {0, 1}) {
    const ShearletGenerator gen = preset_generator(p);
    for (double s0 : {0.0, 0.5, 1.0}) {
      const ScaleShearScheme sch = build_scheme_with_shears(7, 4, diagnostic_shears(s0), MeasureTag::MinusThree);
      const CoefficientField c = analyze(smoothed_edge(grid, s0), gen, sch);
      const DirectionalReport r = directional_report(c, grid.center1(), grid.center2(), s0);
      o.pass = o.pass && r.gap >= 0.5;
      o.detail += fmt("preset %d s0=%.1f: on %.2f off %.2f gap %.2f; ", p, s0, r.on_slope, r.off_slope, r.gap);
    }
  }
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto guarded = [](const std::function<Outcome()>& run) {
    try {
      return run();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("error: ") + e.what()};
    }
  };
  auto report = [&](int k, const char* what, const Outcome& o) {
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", k, what, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  report(1, "Fourier-side identity", guarded(identity));
  std::pair<Outcome, Outcome> corpus;
  try {
    corpus = corpus_checks();
  } catch (const std::exception& e) {
    corpus = {{false, e.what()}, {false, e.what()}};
  }
  const auto& [rec, led] = corpus;
  report(2, "reconstruction", rec);
  report(3, "energy ledger", led);
  report(4, "cone projection decay", guarded(projection_decay));
  report(5, "window decay", guarded(window_decay));
  report(6, "window support", guarded(support));
  report(7, "truncated isometry", guarded(isometry));
  report(8, "nonexistence witness", guarded(nonexistence));
  report(9, "locality", guarded(locality));
  report(10, "admissibility cross-check", guarded(cpsi_cross));
  report(11, "directional decay", guarded(directional));
  std::printf("%d of 11 criteria failed\n", failed);
  return failed ? 1 : 0;
}
