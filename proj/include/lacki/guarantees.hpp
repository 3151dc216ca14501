#pragma once

// Closed-form guarantees: uniform-sampling sample complexity and worst-case
// bounds on the discrete tracking-error recurrence e_{n+1} = M e_n + dt F_n.
//
// Vector norms are max-norms. The matrix norm |||A||| = sqrt(2m) * sigma_max(A)
// is compatible with them: |A v|_inf <= |||A||| |v|_inf.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lacki/errors.hpp"

namespace lacki::guarantees {

struct SampleComplexity {
  int k = 0;            ///< dyadic refinement level; 0 when one sample suffices
  std::uint64_t n = 1;  ///< number of uniform samples
};

namespace detail {
/// ceil() that forgives rounding noise just above an integer.
inline double stable_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(r))) return r;
  return std::ceil(v);
}
}  // namespace detail

/// Samples needed so that, for an L*-Lipschitz target on [0,1]^d under the
/// max-norm, the noise-free worst-case error exceeds epsilon with probability
/// at most delta.
inline SampleComplexity sample_complexity(double epsilon, double delta, double l_star, int d) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
  if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (!(l_star >= 0) || !std::isfinite(l_star)) throw ConfigError("L* must be finite and >= 0");
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (epsilon >= 2 * l_star) return {0, 1};
  const double k = std::max(1.0, detail::stable_ceil(std::log2(2 * l_star / epsilon)));
  const double kd = k * d;
  // log(1 - 2^-kd) loses precision for large kd; log1p keeps it.
  const double cell = std::exp2(-kd);
  const double n = detail::stable_ceil((std::log(delta) - kd * std::log(2.0)) / std::log1p(-cell));
  if (!std::isfinite(n) || n > 1.8e19) throw NumericError("sample complexity overflows 64 bits");
  return {static_cast<int>(k), static_cast<std::uint64_t>(std::max(1.0, n))};
}

/// Spectral norm via SVD.
inline double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Error-state transition system of a second-order plant under PD feedback.
struct ErrorSystem {
  int m = 1;                ///< configuration dimension; state dimension is 2m
  double delta = 0;         ///< Euler step [s]
  Eigen::MatrixXd k1, k2;   ///< feedback gains, m x m
  Eigen::MatrixXd M;        ///< [[I, dt I], [-dt K1, I - dt K2]]
  double innovation_bound = 0;
  double spectral_radius = 0;

  int state_dim() const noexcept { return 2 * m; }

  /// |||A||| = sqrt(2m) sigma_max(A)
  double matrix_norm(const Eigen::MatrixXd& a) const {
    return std::sqrt(static_cast<double>(state_dim())) * spectral_norm(a);
  }
};

inline ErrorSystem assemble_error_system(int m, double delta, const Eigen::MatrixXd& k1,
                                         const Eigen::MatrixXd& k2, double innovation_bound) {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (!(delta > 0) || !std::isfinite(delta)) throw ConfigError("time step must be > 0");
  if (k1.rows() != m || k1.cols() != m || k2.rows() != m || k2.cols() != m) {
    throw DimensionError("gain matrices must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (!(innovation_bound >= 0)) throw ConfigError("innovation bound must be >= 0");
  ErrorSystem sys;
  sys.m = m;
  sys.delta = delta;
  sys.k1 = k1;
  sys.k2 = k2;
  sys.innovation_bound = innovation_bound;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  sys.M.resize(2 * m, 2 * m);
  sys.M.topLeftCorner(m, m) = id;
  sys.M.topRightCorner(m, m) = delta * id;
  sys.M.bottomLeftCorner(m, m) = -delta * k1;
  sys.M.bottomRightCorner(m, m) = id - delta * k2;
  sys.spectral_radius = spectral_radius(sys.M);
  return sys;
}

/// Scalar-gain convenience: K1 = k1 I, K2 = k2 I.
inline ErrorSystem assemble_error_system(int m, double delta, double k1, double k2,
                                         double innovation_bound) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  return assemble_error_system(m, delta, k1 * id, k2 * id, innovation_bound);
}

struct RecurrenceResult {
  std::vector<Eigen::VectorXd> iterated;     ///< e_0 .. e_n by the recurrence
  std::vector<Eigen::VectorXd> closed_form;  ///< M^n e_0 + dt sum M^{n-1-i} F_i, same indices
};

/// e_n = M^n e_0 + dt sum_{i<n} M^{n-1-i} F_i, evaluated from scratch.
inline Eigen::VectorXd closed_form_error(const ErrorSystem& sys, const Eigen::VectorXd& e0,
                                         const std::vector<Eigen::VectorXd>& innovations,
                                         std::size_t n) {
  if (n > innovations.size()) throw DimensionError("closed form index exceeds innovation count");
  std::vector<Eigen::MatrixXd> powers(n + 1);
  powers[0] = Eigen::MatrixXd::Identity(sys.state_dim(), sys.state_dim());
  for (std::size_t k = 1; k <= n; ++k) powers[k] = powers[k - 1] * sys.M;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(sys.state_dim());
  for (std::size_t i = 0; i < n; ++i) acc += powers[n - 1 - i] * innovations[i];
  return powers[n] * e0 + sys.delta * acc;
}

/// Iterates the recurrence over all innovations. Closed-form reconstructions
/// are produced every `closed_form_stride` steps (0 disables them); entries
/// off the stride are left empty.
inline RecurrenceResult simulate_recurrence(const ErrorSystem& sys, const Eigen::VectorXd& e0,
                                            const std::vector<Eigen::VectorXd>& innovations,
                                            std::size_t closed_form_stride = 1) {
  const int dim = sys.state_dim();
  if (e0.size() != dim) throw DimensionError("initial error has wrong dimension");
  for (const auto& f : innovations) {
    if (f.size() != dim) throw DimensionError("innovation has wrong dimension");
  }
  RecurrenceResult out;
  out.iterated.reserve(innovations.size() + 1);
  out.iterated.push_back(e0);
  for (const auto& f : innovations) out.iterated.push_back(sys.M * out.iterated.back() + sys.delta * f);

  if (closed_form_stride > 0) {
    // Expanded against a power table, independent of the iteration above.
    const std::size_t n_max = innovations.size();
    std::vector<Eigen::MatrixXd> powers(n_max + 1);
    powers[0] = Eigen::MatrixXd::Identity(dim, dim);
    for (std::size_t k = 1; k <= n_max; ++k) powers[k] = powers[k - 1] * sys.M;
    out.closed_form.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; n += closed_form_stride) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
      for (std::size_t i = 0; i < n; ++i) acc += powers[n - 1 - i] * innovations[i];
      out.closed_form[n] = powers[n] * e0 + sys.delta * acc;
    }
  }
  return out;
}

enum class CChoice { MaxPowerNorm, JordanEstimate, NormPower };

inline const char* to_string(CChoice c) {
  switch (c) {
    case CChoice::MaxPowerNorm: return "max_power_norm";
    case CChoice::JordanEstimate: return "jordan_estimate";
    case CChoice::NormPower: return "norm_power";
  }
  return "?";
}

struct Variant2Result {
  double bound = 0;
  double asymptote = 0;  ///< limit of the bound as n grows, with the full innovation bound
  int k0 = 0;
  double phi = 0;        ///< |||M^k0|||
  double c = 0;
  CChoice c_choice = CChoice::MaxPowerNorm;
  double c_max_power_norm = 0;  ///< candidate (i)
  double c_jordan = 0;          ///< candidate (ii), +inf when not computable
  double c_norm_power = 0;      ///< candidate (iii)
};

/// Caches |||M^i||| and their prefix sums; all three bound variants read from it.
class BoundCalculator {
 public:
  explicit BoundCalculator(ErrorSystem sys) : sys_(std::move(sys)) {
    const int dim = sys_.state_dim();
    power_ = Eigen::MatrixXd::Identity(dim, dim);
    norms_.push_back(sys_.matrix_norm(power_));
    prefix_.push_back(0.0);
  }

  const ErrorSystem& system() const noexcept { return sys_; }

  /// |||M^i|||
  double power_norm(std::size_t i) {
    extend(i);
    return norms_[i];
  }

  /// sum_{i<n} |||M^i|||
  double power_norm_sum(std::size_t n) {
    extend(n);
    return prefix_[n];
  }

  /// |||M^n||| |e0| + dt N sum_{i<n} |||M^i|||
  double variant1(double e0_norm, std::size_t n, double nbar) {
    return power_norm(n) * e0_norm + sys_.delta * nbar * power_norm_sum(n);
  }
  double variant1(double e0_norm, std::size_t n) {
    return variant1(e0_norm, n, sys_.innovation_bound);
  }

  /// Limit of variant 1 with e0 = 0; series truncated once 10 consecutive
  /// terms fall below 1e-12 of the partial sum.
  double variant1_asymptote(double nbar, std::size_t max_terms = 10'000'000) {
    if (!(sys_.spectral_radius < 1)) {
      return std::numeric_limits<double>::infinity();
    }
    int small = 0;
    std::size_t i = 0;
    for (; i < max_terms && small < 10; ++i) {
      const double term = power_norm(i);
      const double partial = power_norm_sum(i + 1);
      small = term < 1e-12 * partial ? small + 1 : 0;
    }
    if (small < 10) throw NumericError("variant-1 series did not converge within the term budget");
    return sys_.delta * nbar * power_norm_sum(i);
  }

  /// Closed geometric form using |||M|||^n.
  double variant3(double e0_norm, std::size_t n, double nbar) {
    const double q = power_norm(1);
    if (std::abs(q - 1.0) <= 1e-12) {
      throw NumericError("variant 3 is singular: |||M||| == 1");
    }
    const double qn = std::pow(q, static_cast<double>(n));
    return qn * e0_norm + sys_.delta * nbar * (1.0 - qn) / (1.0 - q);
  }
  double variant3(double e0_norm, std::size_t n) { return variant3(e0_norm, n, sys_.innovation_bound); }

  /// Smallest k0 > 1 with |||M^k||| < 1 for every k >= k0.
  int find_k0() {
    if (k0_) return *k0_;
    const double rho = sys_.spectral_radius;
    if (!(rho < 1)) throw NumericError("variant 2 requires spectral radius < 1");
    const std::size_t horizon = search_horizon();
    for (std::size_t k = 2; k <= horizon; ++k) {
      if (power_norm(k) >= 1) continue;
      // Any j >= k is q*k + s with s in [k, 2k-1]; submultiplicativity covers it
      // once these residues are below one.
      bool ok = true;
      for (std::size_t s = k + 1; s < 2 * k; ++s) {
        if (power_norm(s) >= 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        k0_ = static_cast<int>(k);
        return *k0_;
      }
    }
    throw NumericError("no k0 found within search horizon " + std::to_string(horizon));
  }

  Variant2Result variant2(double e0_norm, std::size_t n, double nbar) {
    Variant2Result r;
    r.k0 = find_k0();
    const auto k0 = static_cast<std::size_t>(r.k0);
    r.phi = power_norm(k0);

    r.c_max_power_norm = 0;
    for (std::size_t i = 1; i < k0; ++i) r.c_max_power_norm = std::max(r.c_max_power_norm, power_norm(i));
    r.c_jordan = jordan_constant();
    r.c_norm_power = std::pow(power_norm(1), static_cast<double>(k0));

    // Block argument needs c >= |||M^s||| for 1 <= s < k0 and c >= 1 for s = 0.
    const double required = std::max(1.0, r.c_max_power_norm);
    r.c = required;
    r.c_choice = CChoice::MaxPowerNorm;
    if (r.c_jordan >= required && r.c_jordan < r.c) {
      r.c = r.c_jordan;
      r.c_choice = CChoice::JordanEstimate;
    }
    if (r.c_norm_power >= required && r.c_norm_power < r.c) {
      r.c = r.c_norm_power;
      r.c_choice = CChoice::NormPower;
    }

    const double head = power_norm_sum(k0);
    const auto blocks = static_cast<double>(n / k0);
    const double tail = r.c * static_cast<double>(k0) * (r.phi - std::pow(r.phi, blocks + 1)) / (1 - r.phi);
    r.bound = r.c * std::pow(r.phi, blocks) * e0_norm + sys_.delta * nbar * (head + tail);
    r.asymptote = sys_.delta * sys_.innovation_bound *
                  (head + r.c * static_cast<double>(k0) * r.phi / (1 - r.phi));
    return r;
  }
  Variant2Result variant2(double e0_norm, std::size_t n) { return variant2(e0_norm, n, sys_.innovation_bound); }

 private:
  void extend(std::size_t i) {
    while (norms_.size() <= i) {
      power_ = power_ * sys_.M;
      prefix_.push_back(prefix_.back() + norms_.back());
      norms_.push_back(sys_.matrix_norm(power_));
    }
  }

  std::size_t search_horizon() const {
    const double rho = sys_.spectral_radius;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys_.M);
    const auto sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0 ? sv(0) / smin : 1e12;
    const double scale = std::log(std::sqrt(static_cast<double>(sys_.state_dim())) * std::max(1.0, cond));
    const double raw = rho > 0 ? 10.0 * std::ceil(std::max(scale, 1.0) / -std::log(rho)) : 10.0;
    return static_cast<std::size_t>(std::clamp(raw, 100.0, 1e6));
  }

  /// Candidate (ii): (1/(d-1)!) ((1-d)/log r)^(d-1) |||M|||^(d-1) r^((1-d)/log r - d + 1).
  double jordan_constant() {
    const double r = sys_.spectral_radius;
    const int d = sys_.state_dim();
    if (!(r > 0 && r < 1)) return std::numeric_limits<double>::infinity();
    const double dm1 = d - 1;
    const double t = (1.0 - d) / std::log(r);
    const double v = std::pow(t, dm1) * std::pow(power_norm(1), dm1) * std::pow(r, t - d + 1) /
                     std::tgamma(static_cast<double>(d));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  ErrorSystem sys_;
  Eigen::MatrixXd power_;
  std::vector<double> norms_;   // norms_[i] = |||M^i|||
  std::vector<double> prefix_;  // prefix_[n] = sum_{i<n} norms_[i]
  std::optional<int> k0_;
};

inline double bound_variant_1(const ErrorSystem& sys, double e0_norm, std::size_t n) {
  return BoundCalculator(sys).variant1(e0_norm, n);
}

inline Variant2Result bound_variant_2(const ErrorSystem& sys, double e0_norm, std::size_t n) {
  return BoundCalculator(sys).variant2(e0_norm, n);
}

inline double bound_variant_3(const ErrorSystem& sys, double e0_norm, std::size_t n) {
  return BoundCalculator(sys).variant3(e0_norm, n);
}

/// Per-step bound sequences for n = 0..horizon.
struct BoundReport {
  double spectral_radius = 0;
  double matrix_norm = 0;  ///< |||M|||
  std::vector<double> variant1;
  std::optional<double> variant1_asymptote;
  std::vector<double> variant2;  ///< empty when rho(M) >= 1
  std::optional<Variant2Result> variant2_summary;
  std::vector<double> variant3;  ///< empty when |||M||| == 1
};

inline BoundReport compute_bounds(const ErrorSystem& sys, double e0_norm, std::size_t horizon) {
  BoundCalculator calc(sys);
  BoundReport rep;
  rep.spectral_radius = sys.spectral_radius;
  rep.matrix_norm = calc.power_norm(1);
  rep.variant1.reserve(horizon + 1);
  for (std::size_t n = 0; n <= horizon; ++n) rep.variant1.push_back(calc.variant1(e0_norm, n));
  if (sys.spectral_radius < 1) {
    rep.variant1_asymptote = calc.variant1_asymptote(sys.innovation_bound);
    rep.variant2_summary = calc.variant2(e0_norm, horizon);
    rep.variant2.reserve(horizon + 1);
    for (std::size_t n = 0; n <= horizon; ++n) rep.variant2.push_back(calc.variant2(e0_norm, n).bound);
  }
  if (std::abs(rep.matrix_norm - 1.0) > 1e-12) {
    rep.variant3.reserve(horizon + 1);
    for (std::size_t n = 0; n <= horizon; ++n) rep.variant3.push_back(calc.variant3(e0_norm, n, sys.innovation_bound));
  }
  return rep;
}

}  // namespace lacki::guarantees
