// conewave command-line driver.
//
//   conewave <command> [--config FILE] [--output DIR] [--workers N]
//
// Exit status: 0 when every check of the command passes, 1 when a check
// fails (see the CSV named on stderr), 2 for configuration or input errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conewave/conewave.hpp"

using namespace conewave;

namespace {

constexpr int kPass = 0, kCheckFailed = 1, kBadInput = 2;

struct Options {
  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  std::string filter = "none";
  int a_lo = -8, a_hi = 4;
  double s_max = 8.0;
};

class Checks {
 public:
  Checks() { table_.header = {"check", "measured", "bound", "margin", "status"}; }

  // measured <= bound
  void at_most(const std::string& name, double measured, double bound) {
    add(name, measured, bound, bound - measured, measured <= bound);
  }
  // measured >= bound
  void at_least(const std::string& name, double measured, double bound) {
    add(name, measured, bound, measured - bound, measured >= bound);
  }
  void flag(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok); }
  void info(const std::string& name, double value) {
    table_.add({name, csv_number(value), "", "", "info"});
  }
  void note(const std::string& name, double value, const std::string& status) {
    table_.add({name, csv_number(value), "", "", status});
  }

  bool passed() const { return failures_ == 0; }
  std::string text() const { return table_.text(); }

 private:
  void add(const std::string& name, double measured, double bound, double margin, bool ok) {
    table_.add({name, csv_number(measured), csv_number(bound), csv_number(margin), csv_bool(ok)});
    if (!ok) ++failures_;
  }

  CsvTable table_;
  int failures_ = 0;
};

struct Run {
  RunConfig cfg;
  std::string command;
  OutputDir out;

  Run(RunConfig c, std::string cmd) : cfg(std::move(c)), command(std::move(cmd)), out(cfg.output) {}

  ShearletGenerator generator() const { return cfg.generator(); }
  FrequencyGrid grid() const { return build_frequency_grid(cfg.grid_n, cfg.grid_n, cfg.extent); }

  BumpDescriptor bump() const {
    const int N = generator().N();
    return make_bump(cfg.bump_k > 0 ? cfg.bump_k : default_bump_order(N), N);
  }

  ScaleShearScheme scheme(MeasureTag tag) const {
    return build_scale_shear_scheme(cfg.bands, cfg.nodes_per_band, cfg.shear_nodes, tag);
  }

  SpatialField field(const FrequencyGrid& g) const {
    if (cfg.field == "blob") return gaussian_blob(g);
    if (cfg.field == "edge") return smoothed_edge(g, cfg.edge_slope);
    if (cfg.field == "cone_bandpass") return default_cone_bandpass(g);
    SpatialField f = read_field(cfg.field);
    if (f.grid.n1() != g.n1() || f.grid.n2() != g.n2() || f.grid.extent() != g.extent())
      throw FormatError(cfg.field + ": raster grid does not match grid_n/extent of the configuration");
    return f;
  }

  int finish(const Checks& checks, const std::string& csv = "checks.csv") {
    out.write(csv, checks.text());
    out.manifest(command, config_text(cfg));
    if (checks.passed()) return kPass;
    std::cerr << "conewave " << command << ": check failed, see " << (out.root() / csv).string() << "\n";
    return kCheckFailed;
  }
};

std::string ray_name(const std::string& subject, const RayFit& r) {
  std::ostringstream o;
  o << subject << "_ray(" << r.d1 << ";" << r.d2 << ")";
  return o.str();
}

void add_decay(Checks& checks, const DecayReport& rep) {
  for (const RayFit& r : rep.rays) {
    if (!r.included) {
      checks.note(ray_name(rep.subject, r) + "_slope", r.slope, "excluded");
      continue;
    }
    checks.at_most(ray_name(rep.subject, r) + "_slope", r.slope, rep.threshold);
  }
}

int cmd_build_frame(Run& run) {
  const FrequencyGrid g = run.grid();
  const ShearletGenerator gen = run.generator();
  const ConeProjectionSet cones = compute_cone_projection(run.bump(), g);
  const FrameSpectrum fs = build_frame_spectrum(gen, cones);
  write_cone_projection(run.out, cones, "cones/");
  write_frame_spectrum(run.out, fs, generator_text(gen), "frame/");
  Checks checks;
  checks.info("cpsi", fs.cpsi);
  checks.at_most("clamped_samples", static_cast<double>(fs.clamped), 0.0);
  return run.finish(checks);
}

int cmd_verify(Run& run) {
  const ShearletGenerator gen = run.generator();
  const int N = gen.N();
  const BumpDescriptor bump = run.bump();
  Checks checks;

  const ConeProjector proj(bump);
  add_decay(checks, verify_projection_decay(proj, N, 0));
  add_decay(checks, verify_projection_decay(proj, N, 1));
  const CalderonEvaluator eval(gen);
  add_decay(checks, verify_window_decay(eval, N, 0));
  add_decay(checks, verify_window_decay(eval, N, 1));

  // Support of the inverse transform of Delta, on a grid whose half period
  // covers twice the test radius.
  {
    SupportReport probe;
    probe.A = gen.support_radius();
    const double test = 1.05 * 2.0 * std::max(std::sqrt(3.0 + std::sqrt(5.0)), shear_norm_bound(2.0)) * probe.A;
    const double extent = static_cast<double>(run.cfg.grid_n) / (2.0 * 4.0 * test);
    const FrequencyGrid sg = build_frequency_grid(run.cfg.grid_n, run.cfg.grid_n, extent);
    auto [delta, window] = compute_delta_and_window(eval, sg);
    FrameSpectrum fs{sg, eval.cpsi(), delta, transpose_map(delta), window, transpose_map(window), SpectralMap(sg), 0};
    const SupportReport rep = verify_window_support(fs, gen);
    checks.at_most("support_fraction_outside", rep.fraction_outside_test, 1e-3);
    checks.info("support_window_fraction_outside", rep.window_fraction_outside_test);
    checks.info("support_radius_1e-6", rep.radius_1e6);
    checks.info("support_r1", rep.r1);
    checks.info("support_r2", rep.r2);
    CsvTable profile;
    profile.header = {"radius", "fraction_outside"};
    for (std::size_t k = 0; k < rep.radii.size(); ++k)
      profile.add({csv_number(rep.radii[k]), csv_number(rep.fraction_outside[k])});
    run.out.write("support_profile.csv", profile.text());
  }

  const FrequencyGrid g = run.grid();
  const ConeProjectionSet cones = compute_cone_projection(bump, g);
  const FrameSpectrum fs = build_frame_spectrum(gen, cones);
  const double direct = compute_admissibility_constant(gen, CpsiMethod::Direct).value;
  checks.info("cpsi_direct", direct);
  checks.info("cpsi_frame", fs.cpsi);
  checks.at_most("identity_error_direct_cpsi", tight_frame_identity_error(fs, cones, direct), 1e-4);
  checks.at_most("identity_error_frame_cpsi", tight_frame_identity_error(fs, cones, fs.cpsi), 1e-12);
  return run.finish(checks);
}

int cmd_analyze(Run& run, const Options& opt) {
  const FrequencyGrid g = run.grid();
  const ShearletGenerator gen = run.generator();
  const FilterTag filter = parse_filter(opt.filter);
  std::optional<ConeProjectionSet> cones;
  if (filter != FilterTag::None) cones = compute_cone_projection(run.bump(), g);
  const SpatialField f = run.field(g);
  const CoefficientField c = analyze(f, gen, run.scheme(MeasureTag::MinusThree), filter, cones ? &*cones : nullptr);
  write_coefficients(run.out, c);
  Checks checks;
  checks.info("nodes", static_cast<double>(c.nodes.size()));
  checks.info("field_norm", f.norm());
  return run.finish(checks);
}

int cmd_synthesize(Run& run) {
  const FrequencyGrid g = run.grid();
  const ShearletGenerator gen = run.generator();
  const ConeProjectionSet cones = compute_cone_projection(run.bump(), g);
  const FrameSpectrum fs = build_frame_spectrum(gen, cones);
  const ScaleShearScheme scheme = run.scheme(MeasureTag::MinusThree);
  const Decomposition d = synthesize(run.field(g), gen, fs, cones, scheme);
  run.out.raster("input.sgrid", g, d.input.values);
  run.out.raster("f_high.sgrid", g, d.f_high.values);
  run.out.raster("f_low.sgrid", g, d.f_low.values);
  Checks checks;
  if (scheme.empty()) std::cerr << "conewave synthesize: scheme has no scale bands, f_high is zero\n";
  checks.at_most("reconstruction_error", d.reconstruction_error(), 2e-2);
  const DecayReport decay = verify_flow_decay(d, gen.N());
  for (const RayFit& r : decay.rays)
    checks.note(ray_name("f_low", r) + "_slope_minus_f_slope", r.slope - r.reference_slope,
                r.included ? csv_bool(r.pass) : "excluded");
  return run.finish(checks, "report.csv");
}

int cmd_parseval(Run& run) {
  const FrequencyGrid g = run.grid();
  const ShearletGenerator gen = run.generator();
  const ConeProjectionSet cones = compute_cone_projection(run.bump(), g);
  const FrameSpectrum fs = build_frame_spectrum(gen, cones);
  const EnergyLedger led = parseval_report(run.field(g), gen, fs, cones, run.scheme(MeasureTag::MinusThree));
  Checks checks;
  checks.info("E1", led.E1);
  checks.info("E2", led.E2);
  checks.info("E3", led.E3);
  checks.info("E1_closed", led.E1_closed);
  checks.info("E2_closed", led.E2_closed);
  checks.info("norm_sq", led.norm_sq);
  checks.info("cpsi", led.cpsi);
  checks.at_least("ratio_lower", led.ratio, 0.98);
  checks.at_most("ratio_upper", led.ratio, 1.02);
  CsvTable nodes;
  nodes.header = {"node", "energy_horizontal", "energy_vertical"};
  for (std::size_t k = 0; k < led.node_energy_h.size(); ++k)
    nodes.add({std::to_string(k), csv_number(led.node_energy_h[k]), csv_number(led.node_energy_v[k])});
  run.out.write("nodes.csv", nodes.text());
  return run.finish(checks, "ledger.csv");
}

int cmd_nonexistence(Run& run) {
  const ShearletGenerator gen = run.generator();
  const NonexistenceReport rep = nonexistence_report(gen);
  const double C = rep.cpsi;
  Checks checks;
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    checks.info("diagonal_at_" + csv_number(rep.radii[k]), rep.diagonal[k]);
  checks.info("cpsi", C);
  checks.info("delta_star", rep.delta_star);
  checks.info("strip_bound", rep.strip_bound);
  checks.at_least("diagonal_limit", rep.diagonal_limit, 0.99 * 2.0 * C);
  checks.at_most("strip_sup", rep.strip_sup, 1.6 * C);
  checks.at_least("gap", rep.gap, 0.3 * C);
  checks.flag("contradiction", rep.contradiction);
  for (double d : {0.5, 0.25, 0.125}) {
    const StripProbe p = strip_bound_probe(gen, d);
    checks.at_most("strip_sup_delta_" + csv_number(d), p.measured_sup, p.bound);
    checks.info("strip_reduced_bound_delta_" + csv_number(d), p.reduced_bound);
  }
  return run.finish(checks, "report.csv");
}

int cmd_isometry(Run& run, const Options& opt) {
  const FrequencyGrid g = run.grid();
  IsometryTruncation tr;
  tr.a_lo_exp = opt.a_lo;
  tr.a_hi_exp = opt.a_hi;
  tr.s_max = opt.s_max;
  if (tr.a_lo_exp >= tr.a_hi_exp || !(tr.s_max > 0.0)) throw FormatError("isometry: empty truncation range");
  const IsometryResult r = full_group_isometry_check(run.field(g), run.generator(), tr);
  Checks checks;
  if (!r.defined) {
    checks.flag("ratio_defined", false);
    return run.finish(checks, "report.csv");
  }
  checks.at_least("ratio_lower", r.ratio, 0.95);
  checks.at_most("ratio_upper", r.ratio, 1.0);
  return run.finish(checks, "report.csv");
}

int cmd_slopes(Run& run) {
  const FrequencyGrid g = run.grid();
  const ShearletGenerator gen = run.generator();
  const double s0 = run.cfg.edge_slope;
  const std::vector<double> shears = diagnostic_shears(s0);
  const ScaleShearScheme scheme = build_scheme_with_shears(run.cfg.bands, run.cfg.nodes_per_band, shears,
                                                           MeasureTag::MinusThree);
  const CoefficientField c = analyze(run.field(g), gen, scheme);
  const DirectionalReport rep = directional_report(c, g.center1(), g.center2(), s0);
  Checks checks;
  for (std::size_t k = 0; k < rep.shears.size(); ++k) checks.info("slope_s=" + csv_number(rep.shears[k]), rep.slopes[k]);
  checks.info("scale_min", rep.a_min);
  checks.info("scale_max", rep.a_max);
  checks.info("slope_on_edge_direction", rep.on_slope);
  checks.at_least("slope_gap", rep.gap, 0.5);
  return run.finish(checks, "slopes.csv");
}

RunConfig load_config(const Options& opt) {
  RunConfig cfg;
  if (!opt.config_path.empty()) cfg = parse_run_config(read_file(opt.config_path), opt.config_path);
  if (!opt.output.empty()) cfg.output = opt.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone-adapted continuous shearlet frames: construction, checks and diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--workers", opt.workers, "worker threads (default: CONEWAVE_WORKERS or 1)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"build-frame", "write cone projections and frame spectrum rasters"},
      {"verify", "decay, support and Fourier-side identity checks"},
      {"analyze", "shearlet coefficients of the configured field"},
      {"synthesize", "f = f_high + f_low decomposition and reconstruction error"},
      {"parseval", "three-term energy ledger"},
      {"nonexistence", "diagonal limit versus strip supremum"},
      {"isometry", "truncated full-group isometry ratio"},
      {"slopes", "directional decay slopes of an edge"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "key=value configuration file");
    sub->add_option("--output", opt.output, "output directory (overrides the config)");
    if (name == "analyze")
      sub->add_option("--filter", opt.filter, "none, q0, q1, p0 or p1")
          ->check(CLI::IsMember({"none", "q0", "q1", "p0", "p1"}));
    if (name == "isometry") {
      sub->add_option("--a-lo", opt.a_lo, "log2 of the smallest scale");
      sub->add_option("--a-hi", opt.a_hi, "log2 of the largest scale");
      sub->add_option("--s-max", opt.s_max, "shear range half width");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }
  if (opt.workers > 0) set_workers(opt.workers);

  std::string command;
  for (CLI::App* sub : subs)
    if (sub->parsed()) command = sub->get_name();

  try {
    Run run(load_config(opt), command);
    if (command == "build-frame") return cmd_build_frame(run);
    if (command == "verify") return cmd_verify(run);
    if (command == "analyze") return cmd_analyze(run, opt);
    if (command == "synthesize") return cmd_synthesize(run);
    if (command == "parseval") return cmd_parseval(run);
    if (command == "nonexistence") return cmd_nonexistence(run);
    if (command == "isometry") return cmd_isometry(run, opt);
    if (command == "slopes") return cmd_slopes(run);
  } catch (const FormatError& e) {
    std::cerr << "conewave: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "conewave: " << e.what() << "\n";
    return kBadInput;
  } catch (const ConstraintViolation& e) {
    std::cerr << "conewave: " << e.what() << "\n";
    return kBadInput;
  } catch (const PreconditionError& e) {
    std::cerr << "conewave: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "conewave: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kBadInput;
}
