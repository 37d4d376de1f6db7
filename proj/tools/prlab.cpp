// Command-line front end: simulate, audit-energy, quantities, scan-regularity, cover,
// decompose-pressure. Exit codes are listed in prlab::exit_code.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "prlab/io.hpp"

namespace fs = std::filesystem;
using namespace prlab;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string input;
  int resolution = 0;
  double q = 0, sigma = 0, eps = 0;
  int depth = -1;
  long long seed = -1;
  std::vector<std::string> cylinders;
  std::vector<double> q_list;
  std::vector<double> point;
  std::string variant = "centered";
  std::size_t slice = 0;
  std::vector<double> center;
  double rho = 0;
  int n = 2;
  int refine = 2;
  double delta_prime = 0.1;
};

RunConfig resolve(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.resolution > 0) c.solver.resolution = o.resolution;
  if (o.seed >= 0) c.initial.seed = std::uint64_t(o.seed);
  if (o.q > 0) c.detector.q = o.q;
  if (o.sigma > 0) c.detector.sigma = o.sigma;
  if (o.eps > 0) c.detector.eps_q = c.detector.eps_sigma = o.eps;
  if (o.depth >= 0) c.detector.depth = o.depth;
  if (!o.out.empty()) c.output.directory = o.out;
  validate(c);
  return c;
}

std::string need_input(const Options& o) {
  require(!o.input.empty(), ErrorCode::Schema, "--input is required");
  return o.input;
}

void emit(const RunConfig& c, const std::string& name, const Json& j) {
  const std::string path = (fs::path(c.output.directory) / name).string();
  write_text(path, j.dump(2) + "\n");
  std::cout << path << "\n";
}

int cmd_simulate(const Options& o) {
  const RunConfig c = resolve(o);
  const PeriodicGrid g(c.solver.extent, c.solver.resolution);
  const State s0 = initial_state(g, c.initial);
  const Trajectory traj = simulate(c.solver, s0);
  write_trajectory(traj, c.output.directory);
  write_text((fs::path(c.output.directory) / "config.json").string(), to_json(c).dump(2) + "\n");
  std::cout << c.output.directory << ": " << traj.size() << " slices\n";
  if (traj.failure) {
    std::cerr << error_record(Error(ErrorCode::BlowUp, traj.failure->message)).dump() << "\n";
    return exit_code(ErrorCode::BlowUp);
  }
  return 0;
}

int cmd_audit(const Options& o) {
  const RunConfig c = resolve(o);
  const Trajectory traj = read_trajectory(need_input(o));
  require(traj.size() >= 3, ErrorCode::UnderResolved, "the audit needs at least three slices");
  Json out;
  out["resolution"] = {{"N", traj.grid().resolution()}, {"extent", traj.grid().extent()},
                       {"output_spacing", traj.spacing()}, {"dt", traj.metadata().dt}};

  // Global law: dE/dt + D = 0 on the energy log.
  const auto& e = traj.energy;
  if (e.size() >= 3) {
    std::vector<double> E;
    for (const auto& r : e) E.push_back(r.E);
    const std::vector<double> dE = time_derivative(E, e[1].t - e[0].t);
    double worst = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
      worst = std::max(worst, std::abs(dE[i] + e[i].D) / std::max(e[i].D, 1.0));
    out["global"] = {{"max_scaled_residual", worst}, {"tolerance", 1e-3}, {"records", e.size()}};
  }

  const double L = traj.grid().extent();
  const double span = traj.t_last() - traj.t_first();
  const Point mid = Point::Constant(0.5 * L);
  const std::vector<TestFunction> tests{
      TestFunction(mid, 0.25 * L, traj.t_first(), traj.t_last()),
      TestFunction(Point::Constant(0.25 * L), 0.2 * L, traj.t_first() + 0.1 * span, traj.t_last() - 0.1 * span),
      TestFunction(Point(0.7 * L, 0.3 * L, 0.5 * L), 0.3 * L, traj.t_first(), traj.t_first() + 0.6 * span)};
  Json local = Json::array();
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const LocalEnergyAudit audit = local_energy_audit(traj, tests[i]);
    const std::string csv = "local_energy_" + std::to_string(i) + ".csv";
    write_local_energy_csv(audit, (fs::path(c.output.directory) / csv).string());
    const GronwallCheck gw = gronwall_form(audit.records, span);
    local.push_back({{"csv", csv},
                     {"max_residual", audit.max_residual},
                     {"max_dissipation", audit.max_dissipation},
                     {"scaled_residual", audit.max_residual / std::max(audit.max_dissipation, 1.0)},
                     {"tolerance", 1e-2},
                     {"gronwall", to_json(gw)}});
  }
  out["local"] = local;
  write_energy_csv(traj.energy, (fs::path(c.output.directory) / "energy.csv").string());
  emit(c, "audit.json", out);
  return 0;
}

ParabolicCylinder parse_cylinder(const std::string& text, Variant v) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      x.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Schema, "cylinder '" + text + "' is not a list of numbers");
    }
  }
  require(x.size() == 5, ErrorCode::Schema, "a cylinder is x,y,z,t0,r");
  return {Point(x[0], x[1], x[2]), x[3], x[4], v};
}

int cmd_quantities(const Options& o) {
  const RunConfig c = resolve(o);
  const Trajectory traj = read_trajectory(need_input(o));
  require(!o.cylinders.empty(), ErrorCode::Schema, "at least one --cylinder x,y,z,t0,r is required");
  require(o.variant == "centered" || o.variant == "lower", ErrorCode::Schema, "--variant is centered or lower");
  const Variant v = o.variant == "lower" ? Variant::Lower : Variant::Centered;
  std::vector<double> ql = o.q_list;
  if (ql.empty()) ql = {c.detector.q, c.detector.sigma};
  const TrajectorySource src(traj);
  Json reports = Json::array();
  for (const auto& text : o.cylinders) reports.push_back(to_json(quantities(src, parse_cylinder(text, v), ql, c.detector.rule)));
  emit(c, "quantities.json", {{"reports", reports}});
  return 0;
}

int cmd_scan(const Options& o) {
  const RunConfig c = resolve(o);
  const Trajectory traj = read_trajectory(need_input(o));
  Json out;
  if (!o.point.empty()) {
    require(o.point.size() == 5, ErrorCode::Schema, "--point is x y z t0 r");
    const TrajectorySource src(traj);
    const Point x(o.point[0], o.point[1], o.point[2]);
    out["verdicts"] = {to_json(l3_detect(src, x, o.point[3], o.point[4], c.detector)),
                       to_json(h1_detect(src, x, o.point[3], c.detector))};
  } else {
    const ScanReport scan = scan_regularity(traj, c.detector);
    const ScanClassification cls = classify(scan);
    out["summary"] = scan_summary(scan, cls);
    Json cands = Json::array();
    const std::size_t nodes = scan.nodes();
    for (std::size_t i = 0; i < cls.candidates.size() && i < 1000; ++i) {
      const std::size_t at = cls.candidates[i];
      const Point x = traj.grid().node(Index(at % nodes));
      cands.push_back({{"center", {x[0], x[1], x[2]}}, {"t", scan.times[at / nodes]}, {"radius", cls.seed_radius[i]}});
    }
    out["candidates"] = cands;
    out["candidates_truncated"] = cls.candidates.size() > 1000;
  }
  emit(c, "scan.json", out);
  return 0;
}

int cmd_cover(const Options& o) {
  const RunConfig c = resolve(o);
  const Trajectory traj = read_trajectory(need_input(o));
  const SingularScanReport rep = singular_scan(traj, c.detector, o.delta_prime);
  write_slope_csv(rep, (fs::path(c.output.directory) / "slopes.csv").string());
  emit(c, "cover.json", to_json(rep));
  return 0;
}

int cmd_pressure(const Options& o) {
  const RunConfig c = resolve(o);
  const std::string in = need_input(o);
  State s = [&] {
    if (fs::is_directory(in)) {
      const Trajectory traj = read_trajectory(in);
      require(o.slice < traj.size(), ErrorCode::InvalidArgument, "--slice is past the last snapshot");
      return traj[o.slice];
    }
    return read_snapshot(in);
  }();
  const double L = s.grid().extent();
  const Point x0 = o.center.empty() ? Point::Constant(0.5 * L) : Point(o.center.at(0), o.center.at(1), o.center.at(2));
  require(o.center.empty() || o.center.size() == 3, ErrorCode::Schema, "--center takes three numbers");
  const double rho = o.rho > 0 ? o.rho : L / 4;
  const PressureDecomposition d = decompose_pressure(s, x0, rho, o.n, o.refine);
  Json out = to_json(d);
  out["tolerance"] = 5e-2;
  out["resolution"] = {{"N", s.grid().resolution()}, {"extent", L}, {"refine", o.refine}};
  emit(c, "pressure.json", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the nematic liquid crystal flow and its partial regularity diagnostics"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--resolution", o.resolution, "grid points per axis");
    sub->add_option("--q", o.q, "exponent q of the detectors");
    sub->add_option("--sigma", o.sigma, "exponent sigma of the dissipation detector");
    sub->add_option("--eps", o.eps, "detector thresholds eps_q and eps_sigma");
    sub->add_option("--depth", o.depth, "dyadic depth");
    sub->add_option("--seed", o.seed, "seed of the initial data");
  };
  auto* sim = app.add_subcommand("simulate", "run the solver and write a trajectory directory");
  auto* audit = app.add_subcommand("audit-energy", "global and local energy audit of a trajectory");
  auto* quant = app.add_subcommand("quantities", "scale-invariant quantities on cylinders");
  auto* scan = app.add_subcommand("scan-regularity", "run both detectors over a trajectory");
  auto* cover = app.add_subcommand("cover", "cover the candidate set and estimate P^k_delta");
  auto* press = app.add_subcommand("decompose-pressure", "local pressure decomposition of one snapshot");
  for (auto* sub : {sim, audit, quant, scan, cover, press}) common(sub);
  for (auto* sub : {audit, quant, scan, cover, press}) sub->add_option("--input", o.input, "trajectory directory");
  quant->add_option("--cylinder", o.cylinders, "x,y,z,t0,r (repeatable)");
  quant->add_option("--q-list", o.q_list, "q values for G_q and M_q");
  quant->add_option("--variant", o.variant, "centered or lower");
  scan->add_option("--point", o.point, "x y z t0 r: detectors at one point instead of a scan")->expected(5);
  cover->add_option("--delta-prime", o.delta_prime, "k = 9/2 + delta'");
  press->add_option("--slice", o.slice, "slice index when --input is a directory");
  press->add_option("--center", o.center, "x y z")->expected(3);
  press->add_option("--rho", o.rho, "radius of the outer ball");
  press->add_option("--n", o.n, "level n >= 2");
  press->add_option("--refine", o.refine, "lattice refinement factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << Json{{"error", "Usage"}, {"message", e.what()}, {"exit_code", 2}}.dump() << "\n";
    return 2;
  }
  try {
    if (*sim) return cmd_simulate(o);
    if (*audit) return cmd_audit(o);
    if (*quant) return cmd_quantities(o);
    if (*scan) return cmd_scan(o);
    if (*cover) return cmd_cover(o);
    if (*press) return cmd_pressure(o);
  } catch (const Error& e) {
    std::cerr << error_record(e).dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"message", e.what()}, {"exit_code", 1}}.dump() << "\n";
    return 1;
  }
  return 1;
}
