#include "prlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <zlib.h>

namespace prlab {

static_assert(std::endian::native == std::endian::little, "snapshots are written in host byte order");

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::WindowViolation: return "WindowViolation";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Schema:
    case ErrorCode::GridMismatch: return 2;
    case ErrorCode::UnderResolved: return 3;
    case ErrorCode::WindowViolation:
    case ErrorCode::SupportViolation: return 4;
    case ErrorCode::Io:
    case ErrorCode::Format:
    case ErrorCode::VersionMismatch: return 5;
    case ErrorCode::NonFinite:
    case ErrorCode::CflViolation:
    case ErrorCode::BlowUp: return 6;
  }
  return 1;
}

Json error_record(const Error& e) {
  return {{"error", error_code_name(e.code())}, {"message", e.what()}, {"exit_code", exit_code(e.code())}};
}

namespace {

constexpr char kMagic[4] = {'P', 'R', 'L', 'B'};
const char* const kRoster = "u0,u1,u2,d0,d1,d2,p";

template <class T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& buf, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > buf.size()) throw Error(ErrorCode::Format, path + ": header is truncated");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::uint32_t crc(const char* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const uInt chunk = uInt(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return std::uint32_t(c);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

void write_snapshot(const State& s, const std::string& path) {
  const PeriodicGrid& g = s.grid();
  const std::size_t n3 = std::size_t(g.node_count());
  std::string payload;
  payload.reserve(7 * n3 * sizeof(double));
  const auto append = [&](const auto& col) {
    for (Index i = 0; i < Index(n3); ++i) put(payload, double(col(i)));
  };
  for (int c = 0; c < 3; ++c) append(s.u.component(c));
  for (int c = 0; c < 3; ++c) append(s.d.component(c));
  append(s.p.component(0));

  std::string header(kMagic, 4);
  put(header, kSnapshotVersion);
  put(header, std::uint32_t(g.resolution()));
  put(header, g.extent());
  put(header, s.t);
  const std::string roster(kRoster);
  put(header, std::uint32_t(roster.size()));
  header += roster;
  put(header, std::uint64_t(payload.size()));
  put(header, crc(payload.data(), payload.size()));
  put(header, crc(header.data(), header.size()));
  write_text(path, header + payload);
}

State read_snapshot(const std::string& path) {
  const std::string buf = read_file(path);
  std::size_t pos = 0;
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::Format, path + ": not a snapshot (bad magic bytes)");
  pos = 4;
  const auto version = take<std::uint32_t>(buf, pos, path);
  if (version != kSnapshotVersion) {
    std::ostringstream os;
    os << path << ": snapshot format version " << version << " but this build reads version " << kSnapshotVersion
       << "; regenerate it with `prlab simulate` from this build or convert it with the matching release";
    throw Error(ErrorCode::VersionMismatch, os.str());
  }
  const auto n = take<std::uint32_t>(buf, pos, path);
  const auto extent = take<double>(buf, pos, path);
  const auto t = take<double>(buf, pos, path);
  const auto roster_len = take<std::uint32_t>(buf, pos, path);
  if (pos + roster_len > buf.size()) throw Error(ErrorCode::Format, path + ": header is truncated");
  const std::string roster = buf.substr(pos, roster_len);
  pos += roster_len;
  const auto payload_len = take<std::uint64_t>(buf, pos, path);
  const auto payload_crc = take<std::uint32_t>(buf, pos, path);
  const std::size_t header_len = pos;
  const auto header_crc = take<std::uint32_t>(buf, pos, path);
  if (crc(buf.data(), header_len) != header_crc) throw Error(ErrorCode::Format, path + ": header checksum mismatch");
  if (roster != kRoster) throw Error(ErrorCode::Format, path + ": unexpected field roster '" + roster + "'");
  const PeriodicGrid g(extent, int(n));
  const std::uint64_t expected = 7ull * std::uint64_t(g.node_count()) * sizeof(double);
  if (payload_len != expected) throw Error(ErrorCode::Format, path + ": payload length does not match N");
  const std::uint64_t have = buf.size() - pos;
  if (have != expected) {
    std::ostringstream os;
    os << path << ": payload holds " << have << " bytes, expected " << expected;
    throw Error(ErrorCode::Format, os.str());
  }
  if (crc(buf.data() + pos, expected) != payload_crc) throw Error(ErrorCode::Format, path + ": payload checksum mismatch");

  State s(g);
  s.t = t;
  const Index n3 = g.node_count();
  const auto fill = [&](auto col) {
    std::memcpy(col.data(), buf.data() + pos, std::size_t(n3) * sizeof(double));
    pos += std::size_t(n3) * sizeof(double);
  };
  for (int c = 0; c < 3; ++c) fill(s.u.component(c));
  for (int c = 0; c < 3; ++c) fill(s.d.component(c));
  fill(s.p.component(0));
  return s;
}

void write_energy_csv(const std::vector<GlobalEnergyRecord>& records, const std::string& path) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,E,D\n";
  for (const auto& r : records) os << r.t << ',' << r.E << ',' << r.D << '\n';
  write_text(path, os.str());
}

void write_local_energy_csv(const LocalEnergyAudit& audit, const std::string& path) {
  std::ostringstream os;
  os << std::setprecision(17)
     << "t,lhs_density,ddt,dissipation,heat,flux,stress,remainder,heat_abs,d_term,residual\n";
  for (const auto& r : audit.records)
    os << r.t << ',' << r.lhs_density << ',' << r.ddt << ',' << r.dissipation << ',' << r.heat << ',' << r.flux << ','
       << r.stress << ',' << r.remainder << ',' << r.heat_abs << ',' << r.d_term << ',' << r.residual << '\n';
  write_text(path, os.str());
}

void write_slope_csv(const SingularScanReport& rep, const std::string& path) {
  std::ostringstream os;
  os << std::setprecision(17) << "k,delta,bound,cylinders,slope\n";
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    const PkRow& row = rep.table[i];
    std::size_t ki = 0;
    while (ki < rep.k_values.size() && rep.k_values[ki] != row.k) ++ki;
    os << row.k << ',' << row.delta << ',' << row.bound << ',' << row.cylinders << ',';
    if (ki < rep.slopes.size() && std::isfinite(rep.slopes[ki])) os << rep.slopes[ki];
    os << '\n';
  }
  write_text(path, os.str());
}

void write_trajectory(const Trajectory& traj, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << i << ".prlb";
    write_snapshot(traj[i], (std::filesystem::path(dir) / name.str()).string());
  }
  write_energy_csv(traj.energy, (std::filesystem::path(dir) / "energy.csv").string());
  const RunMetadata& m = traj.metadata();
  Json meta = {{"format_version", kSnapshotVersion}, {"slices", traj.size()},      {"dt", m.dt},
               {"resolution", m.resolution},        {"extent", m.extent},         {"t_end", m.t_end},
               {"output_stride", m.output_stride},  {"energy_stride", m.energy_stride},
               {"cfl_safety", m.cfl_safety}};
  if (traj.failure) {
    const BlowUpReport& f = *traj.failure;
    meta["failure"] = {{"t_last_valid", f.t_last_valid},
                       {"t_failed", f.t_failed},
                       {"location", {f.location[0], f.location[1], f.location[2]}},
                       {"radius", f.radius},
                       {"message", f.message}};
  }
  write_text((std::filesystem::path(dir) / "run.json").string(), meta.dump(2) + "\n");
}

Trajectory read_trajectory(const std::string& dir) {
  const std::filesystem::path base(dir);
  Json meta;
  try {
    meta = Json::parse(read_file((base / "run.json").string()));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Format, (base / "run.json").string() + ": " + e.what());
  }
  RunMetadata m;
  std::size_t count = 0;
  try {
    m.dt = meta.at("dt").get<double>();
    m.resolution = meta.at("resolution").get<int>();
    m.extent = meta.at("extent").get<double>();
    m.t_end = meta.at("t_end").get<double>();
    m.output_stride = meta.at("output_stride").get<int>();
    m.energy_stride = meta.at("energy_stride").get<int>();
    m.cfl_safety = meta.at("cfl_safety").get<double>();
    count = meta.at("slices").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Format, (base / "run.json").string() + ": " + e.what());
  }
  Trajectory traj(PeriodicGrid(m.extent, m.resolution), m);
  for (std::size_t i = 0; i < count; ++i) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << i << ".prlb";
    State s = read_snapshot((base / name.str()).string());
    require(s.grid() == traj.grid(), ErrorCode::GridMismatch, name.str() + " does not match run.json");
    traj.append(std::move(s));
  }
  return traj;
}

namespace {

/// Copies known keys of a section into its struct and refuses anything else.
class Section {
 public:
  Section(const Json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw Error(ErrorCode::Schema, "config section '" + name + "' must be an object");
  }
  template <class T>
  void read(const char* key, T& dst) {
    known_.push_back(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      dst = node_->at(key).get<T>();
    } catch (const Json::exception&) {
      throw Error(ErrorCode::Schema, "config key '" + name_ + "." + key + "' has the wrong type");
    }
  }
  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items())
      if (std::find(known_.begin(), known_.end(), k) == known_.end())
        throw Error(ErrorCode::Schema, "unknown config key '" + name_ + "." + k + "'");
  }

 private:
  std::string name_;
  const Json* node_ = nullptr;
  std::vector<std::string> known_;
};

}  // namespace

RunConfig parse_run_config(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Schema, "config root must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "solver" && k != "initial" && k != "detector" && k != "output")
      throw Error(ErrorCode::Schema, "unknown config section '" + k + "'");
  RunConfig c;
  Section s(j, "solver");
  s.read("dt", c.solver.dt);
  s.read("t_end", c.solver.t_end);
  s.read("output_stride", c.solver.output_stride);
  s.read("energy_stride", c.solver.energy_stride);
  s.read("resolution", c.solver.resolution);
  s.read("extent", c.solver.extent);
  s.read("cfl_safety", c.solver.cfl_safety);
  s.finish();
  Section i(j, "initial");
  i.read("velocity", c.initial.velocity);
  i.read("director", c.initial.director);
  i.read("amplitude", c.initial.amplitude);
  i.read("overshoot", c.initial.overshoot);
  i.read("bandwidth", c.initial.bandwidth);
  i.read("seed", c.initial.seed);
  i.finish();
  Section d(j, "detector");
  d.read("q", c.detector.q);
  d.read("sigma", c.detector.sigma);
  d.read("eps_q", c.detector.eps_q);
  d.read("eps_sigma", c.detector.eps_sigma);
  d.read("g_sigma", c.detector.g_sigma);
  d.read("depth", c.detector.depth);
  d.read("m", c.detector.m);
  d.read("rho0", c.detector.rho0);
  d.read("radii", c.detector.radii);
  d.read("min_spacings", c.detector.rule.min_spacings);
  d.read("min_slices", c.detector.rule.min_slices);
  d.finish();
  Section o(j, "output");
  o.read("directory", c.output.directory);
  o.finish();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, path + ": " + e.what());
  }
  return parse_run_config(j);
}

void validate(const RunConfig& c) {
  try {
    validate(c.solver);
    validate(c.detector);
  } catch (const Error& e) {
    throw Error(ErrorCode::Schema, e.what());
  }
  const auto one_of = [](const std::string& v, std::initializer_list<const char*> names) {
    for (const char* n : names)
      if (v == n) return true;
    return false;
  };
  require(one_of(c.initial.velocity, {"zero", "taylor_green", "random"}), ErrorCode::Schema,
          "initial.velocity must be zero, taylor_green or random");
  require(one_of(c.initial.director, {"zero", "unit", "banded", "random"}), ErrorCode::Schema,
          "initial.director must be zero, unit, banded or random");
  require(c.initial.bandwidth >= 1, ErrorCode::Schema, "initial.bandwidth must be at least 1");
  require(!c.output.directory.empty(), ErrorCode::Schema, "output.directory must not be empty");
}

Json to_json(const RunConfig& c) {
  return {{"solver",
           {{"dt", c.solver.dt},
            {"t_end", c.solver.t_end},
            {"output_stride", c.solver.output_stride},
            {"energy_stride", c.solver.energy_stride},
            {"resolution", c.solver.resolution},
            {"extent", c.solver.extent},
            {"cfl_safety", c.solver.cfl_safety}}},
          {"initial",
           {{"velocity", c.initial.velocity},
            {"director", c.initial.director},
            {"amplitude", c.initial.amplitude},
            {"overshoot", c.initial.overshoot},
            {"bandwidth", c.initial.bandwidth},
            {"seed", c.initial.seed}}},
          {"detector",
           {{"q", c.detector.q},
            {"sigma", c.detector.sigma},
            {"eps_q", c.detector.eps_q},
            {"eps_sigma", c.detector.eps_sigma},
            {"g_sigma", c.detector.g_sigma},
            {"depth", c.detector.depth},
            {"m", c.detector.m},
            {"rho0", c.detector.rho0},
            {"radii", c.detector.radii},
            {"min_spacings", c.detector.rule.min_spacings},
            {"min_slices", c.detector.rule.min_slices}}},
          {"output", {{"directory", c.output.directory}}}};
}

namespace {

Json point(const Point& x) { return Json::array({x[0], x[1], x[2]}); }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const QuantityReport& r) {
  Json G = Json::array(), M = Json::array();
  for (std::size_t i = 0; i < r.q.size(); ++i) {
    G.push_back({{"q", r.q[i]}, {"value", r.G[i]}});
    M.push_back({{"q", r.q[i]}, {"value", finite_or_null(r.M[i])}});
  }
  return {{"cylinder",
           {{"center", point(r.cylinder.center)},
            {"t0", r.cylinder.t0},
            {"radius", r.cylinder.radius},
            {"variant", r.cylinder.variant == Variant::Lower ? "lower" : "centered"}}},
          {"A", r.A},
          {"B", r.B},
          {"C", r.C},
          {"D", r.D},
          {"E", r.E},
          {"F", r.F},
          {"G", G},
          {"M", M},
          {"resolution", {{"nodes", r.nodes}, {"slices", r.slices}, {"spacing", r.spacing}}}};
}

Json to_json(const DetectorVerdict& v) {
  Json j = {{"detector", v.detector},
            {"center", point(v.x0)},
            {"t0", v.t0},
            {"radii", v.radii},
            {"value", v.value},
            {"threshold", v.threshold},
            {"verdict", verdict_name(v.verdict)},
            {"resolution", {{"spacing", v.spacing}, {"slices", v.slices}}}};
  if (v.detector == "h1") {
    j["dissipation_value"] = v.value2;
    j["dissipation_threshold"] = v.threshold2;
  } else {
    j["measured_sup"] = v.measured_sup;
    if (v.verdict == Verdict::RegularCertified) {
      j["implied_bound"] = v.implied_bound;
      j["sup_consistent"] = v.sup_consistent;
    }
  }
  return j;
}

Json to_json(const LadderReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"k", l.k},
                      {"r", l.r},
                      {"L", l.L},
                      {"R", l.R},
                      {"sup_avg", l.sup_avg},
                      {"int_avg", l.int_avg},
                      {"cube_avg", l.cube_avg},
                      {"pressure_avg", l.pressure_avg},
                      {"nodes", l.nodes},
                      {"slices", l.slices}});
  return {{"center", point(r.center)}, {"t0", r.t0},       {"requested", r.requested}, {"truncated", r.truncated},
          {"warning", r.warning},      {"levels", levels}, {"pressure_q1", r.pressure_q1},
          {"spacing", r.spacing}};
}

Json to_json(const PressureDecomposition& d) {
  return {{"center", point(d.center)},
          {"rho", d.rho},
          {"n", d.n},
          {"spacing", d.spacing},
          {"points", d.points.size()},
          {"gauge", d.gauge},
          {"relative_error", d.relative_error},
          {"residual_mean", d.residual_mean},
          {"p1_norm", d.p1_norm},
          {"J_norm", d.J_norm},
          {"cz_ratio", d.cz_ratio},
          {"harmonic_residual", d.harmonic_residual}};
}

Json to_json(const GronwallCheck& g) {
  return {{"T", g.T},
          {"C_T", g.C_T},
          {"slack", g.slack},
          {"margin_rough", g.margin_rough},
          {"margin_absorbed", g.margin_absorbed},
          {"margin_integrated", g.margin_integrated},
          {"rough_holds", g.rough_holds},
          {"absorbed_holds", g.absorbed_holds},
          {"integrated_holds", g.integrated_holds}};
}

Json to_json(const VitaliCover& c, const std::vector<SpaceTimeBall>& family) {
  Json sel = Json::array();
  for (std::size_t i : c.selected)
    sel.push_back({{"index", i}, {"center", point(family[i].x)}, {"t", family[i].t}, {"radius", family[i].r}});
  return {{"selected", sel},
          {"expansion", c.expansion},
          {"disjoint", c.disjoint},
          {"covers_cylinders", c.covers_balls},
          {"covers_centers", c.covers_centers}};
}

Json scan_summary(const ScanReport& scan, const ScanClassification& cls) {
  return {{"extent", scan.extent},
          {"resolution", scan.resolution},
          {"radii", scan.radii},
          {"times", scan.times},
          {"thresholds",
           {{"q", scan.config.q},
            {"sigma", scan.config.sigma},
            {"eps_q", scan.config.eps_q},
            {"eps_sigma", scan.config.eps_sigma},
            {"g_sigma", scan.config.g_sigma},
            {"m", scan.config.m}}},
          {"points", scan.times.size() * scan.nodes()},
          {"l3_certified", cls.l3_count},
          {"h1_certified", cls.h1_count},
          {"candidates", cls.candidates.size()},
          {"note", "candidate means not certified by either detector; it is not a proven singular point"}};
}

Json to_json(const SingularScanReport& r) {
  Json table = Json::array();
  for (const auto& row : r.table)
    table.push_back({{"k", row.k}, {"delta", row.delta}, {"upper_bound", row.bound}, {"cylinders", row.cylinders}});
  Json slopes = Json::array();
  for (std::size_t i = 0; i < r.k_values.size(); ++i)
    slopes.push_back({{"k", r.k_values[i]}, {"slope", finite_or_null(r.slopes[i])}});
  return {{"scan", scan_summary(r.scan, r.classes)},
          {"cover", to_json(r.cover, r.candidates)},
          {"pk_table", table},
          {"pk_label", "upper bounds on P^k_delta from a greedy cover"},
          {"slopes", slopes},
          {"budget",
           {{"k", r.budget.k}, {"C_k", r.budget.C_k}, {"integral", r.budget.integral}, {"bound", r.budget.budget}}}};
}

}  // namespace prlab
