#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prlab/cylinders.hpp"

namespace prlab {

struct RegularityConfig {
  double q = 5.25;
  double sigma = 5.5;
  double eps_q = 1e-3;      // ε̄_q for the L³ detector
  double eps_sigma = 1e-3;  // ε_σ for the dissipation proxy
  double g_sigma = 1.0;
  int depth = 4;            // dyadic radii ρ0·2^{−j}, j = 0..depth
  int m = 3;                // limsup proxy uses the m smallest resolvable radii
  double rho0 = 0.0;        // 0: half the box side
  std::vector<double> radii;  // explicit radii replace the dyadic list
  SampleRule rule;
};

void validate(const RegularityConfig& c);

/// 2(q − 5)/(q − 2)
double alpha_q(double q);
/// (6/σ)(σ − q)/(6 − q); the σ = 6 limit is 1.
double alpha_sigma_q(double sigma, double q);
/// Σ_{k=1}^{depth} 2^{−αk}
double dyadic_partial_sum(double alpha, int depth);
/// 1/(2^α − 1)
double dyadic_limit(double alpha);

/// ψⁿ(x,t) = (r_n² − t)^{−3/2} exp(−|x|²/(4(r_n² − t))) for t < r_n², r_n = 2^{−n}.
struct HeatCutoff {
  int n = 1;
  double r() const { return std::ldexp(1.0, -n); }
  double value(const Point& x, double t) const;
  double dt(const Point& x, double t) const;
  Point gradient(const Point& x, double t) const;
  double laplacian(const Point& x, double t) const;
};

struct ShellBoundCheck {
  int k = 0;
  double min_scaled = 0, max_scaled = 0;  // extremes of ψⁿ r_k³ over the sampled shell
  double lower = 0, upper = 0;            // 1/(2^{9/2} e) and e^{−1/32}
  bool holds = false;
  bool literal_difference_holds = false;  // same bounds over all of Q^{k−1} ∖ Q^k
};

struct HeatCutoffReport {
  int n = 0;
  double max_residual = 0;     // |ψ_t + Δψ| / (|ψ_t| + |Δψ|), analytic
  double max_fd_residual = 0;  // same with centred differences
  double qn_min_scaled = 0, qn_max_scaled = 0;  // extremes of ψⁿ r_n³ on Qⁿ
  double qn_lower = 0, qn_upper = 1;            // 1/(2^{3/2} e^{1/4}) and 1
  bool qn_holds = false;
  std::vector<ShellBoundCheck> shells;          // k = 1..n
  std::size_t samples = 0;
};

/// Samples Qⁿ and the product shells {r_k <= |x| < r_{k−1}} × (−r_{k−1}², −r_k²] on lattices with
/// `per_axis` points per radius and per unit of time.
HeatCutoffReport heat_cutoff(int n, int per_axis = 8, unsigned seed = 1);

/// ∬ |u|³ + |∇d|³ + |p|^{3/2} + |d|^q |∇d|^{3(1−q/6)} over the samples (no scaling).
double e3q(const CylinderSamples& s, double q);
/// E_{3,q} of the rescaled fields u_{z0,r} on Q_1(0, 1/8), evaluated on Q*_r(z0) directly.
double e3q_at(const DensitySource& src, const Point& x0, double t0, double r, double q, const SampleRule& rule = {});

enum class Verdict { RegularCertified, Undecided };
const char* verdict_name(Verdict v);

struct DetectorVerdict {
  std::string detector;  // "l3" or "h1"
  Point x0 = Point::Zero();
  double t0 = 0;
  std::vector<double> radii;
  double value = 0, threshold = 0;    // E_{3,q} vs ε̄_q, or the G_σ proxy vs g_σ
  double value2 = 0, threshold2 = 0;  // B proxy vs ε_σ (h1 only)
  Verdict verdict = Verdict::Undecided;
  double implied_bound = 0;  // ε̄_q^{2/9}/r when certified (l3 only)
  double measured_sup = 0;   // max of |u| and |∇d| on B_{r/2}(x0) × (t0 − r²/8, t0 + r²/8]
  bool sup_consistent = true;
  double spacing = 0;
  std::size_t slices = 0;
};

DetectorVerdict l3_detect(const DensitySource& src, const Point& x0, double t0, double r, const RegularityConfig& c);
/// Radii that h1_detect would use at (x0, t0), smallest last.
std::vector<double> h1_radii(const DensitySource& src, const Point& x0, double t0, const RegularityConfig& c);
DetectorVerdict h1_detect(const DensitySource& src, const Point& x0, double t0, const RegularityConfig& c);

struct BootstrapConfig {
  double C_A = 1.0;
  double C_B = 1.0;
  double q = 5.25;
  int k0 = 1;
  int depth = 4;
};

struct BootstrapRow {
  int n = 0;
  bool has_A = false;
  double R_next = 0, rhs_A = 0, margin_A = 0, empirical_A = 0;
  bool has_B = false;
  double L_n = 0, rhs_B = 0, margin_B = 0, empirical_B = 0;
};

struct BootstrapReport {
  LadderReport ladder;
  double e3q = 0;            // over Q_1(z̄)
  double pressure_term = 0;  // ‖p‖^{3/2}_{3/2;Q_{1/2}(z0)}
  double alpha = 0;
  std::vector<BootstrapRow> rows;
  double max_empirical_A = 0, max_empirical_B = 0;
};

/// Evaluates R_{n+1} <= C_A(max_{k<=n} L_k^{3/2} + ‖p‖^{3/2}) for n >= 2 and
/// L_n <= C_B((2^{α_q} − 1)^{−1} max_{k0<=k<=n} R_k + E^{2/3} + (1 + k0 2^{5k0}) E) for n >= max(2, k0),
/// with z0 in Q_{1/2}(z̄).
BootstrapReport bootstrap_eval(const DensitySource& src, const Point& xbar, double tbar, const Point& x0, double t0,
                               const BootstrapConfig& c);

struct DecayConfig {
  double q = 5.25;
  double sigma = 5.5;
  double g_sigma = 1.0;
  double c_bar = 1.0;
  std::vector<double> rho;
  std::vector<double> gamma{0.25, 0.125};
  SampleRule rule;
};

struct DecayRow {
  double rho = 0, gamma = 0;
  double lhs = 0;      // M_q(γρ)
  double bracket = 0;  // right-hand side without c̄
  double rhs = 0, margin = 0, empirical = 0;
};

struct DecayReport {
  bool applicable = false;
  std::string reason;
  double sup_B = 0, sup_G = 0;
  double alpha = 0;
  std::vector<DecayRow> rows;
  double max_empirical = 0;
};

/// Checks B <= 1 and G_σ <= g_σ on every ρ and γρ first; on failure the report is marked
/// inapplicable and carries no rows.
DecayReport decay_eval(const DensitySource& src, const Point& x0, double t0, const DecayConfig& c);

/// Detector values at every grid node for every admissible slice time.
struct ScanReport {
  double extent = 0;
  int resolution = 0;
  std::vector<double> radii;  // largest first
  std::vector<double> times;
  // Indexed [(radius * times + time) * nodes + node].
  std::vector<float> e3q, g_sigma, b;
  RegularityConfig config;

  std::size_t nodes() const { return std::size_t(resolution) * resolution * resolution; }
  std::size_t slot(std::size_t radius, std::size_t time, std::size_t node) const {
    return (radius * times.size() + time) * nodes() + node;
  }
};

struct ScanClassification {
  std::vector<std::uint8_t> l3, h1;  // per (time, node)
  std::vector<std::size_t> candidates;  // time * nodes + node
  std::vector<double> seed_radius;      // per candidate
  std::size_t l3_count = 0, h1_count = 0;
};

ScanReport scan_regularity(const Trajectory& traj, const RegularityConfig& c);
ScanClassification classify(const ScanReport& scan, double eps_q, double g_sigma, double eps_sigma, int m);
inline ScanClassification classify(const ScanReport& scan) {
  return classify(scan, scan.config.eps_q, scan.config.g_sigma, scan.config.eps_sigma, scan.config.m);
}

}  // namespace prlab
