#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "lacki/errors.hpp"

namespace lacki::holder {

/// Hoelder constant and exponent of a real-valued function, plus the side
/// information some combinators need.
struct HolderDescriptor {
  double constant = 0;
  double exponent = 1;
  std::optional<double> sup_abs;  ///< bound on sup |f|
  std::optional<double> inf_abs;  ///< bound on inf |f|, strictly positive

  friend bool operator==(const HolderDescriptor&, const HolderDescriptor&) = default;
};

inline void validate(const HolderDescriptor& h) {
  if (!(h.constant >= 0) || !std::isfinite(h.constant)) {
    throw ConfigError("Hoelder constant must be finite and >= 0");
  }
  if (!(h.exponent > 0 && h.exponent <= 1)) throw ConfigError("Hoelder exponent must lie in (0, 1]");
  if (h.sup_abs && !(*h.sup_abs >= 0)) throw ConfigError("sup_abs must be >= 0");
  if (h.inf_abs && !(*h.inf_abs > 0)) throw ConfigError("inf_abs must be > 0");
}

inline HolderDescriptor make(double constant, double exponent,
                             std::optional<double> sup_abs = std::nullopt,
                             std::optional<double> inf_abs = std::nullopt) {
  HolderDescriptor h{constant, exponent, sup_abs, inf_abs};
  validate(h);
  return h;
}

/// x -> c. Zero constant, any exponent.
inline HolderDescriptor constant_function(double value, double exponent = 1) {
  const double a = std::abs(value);
  return make(0, exponent, a, a > 0 ? std::optional<double>(a) : std::nullopt);
}

inline HolderDescriptor scale(const HolderDescriptor& h, double r) {
  validate(h);
  HolderDescriptor out{std::abs(r) * h.constant, h.exponent, std::nullopt, std::nullopt};
  if (h.sup_abs) out.sup_abs = std::abs(r) * *h.sup_abs;
  if (h.inf_abs && r != 0) out.inf_abs = std::abs(r) * *h.inf_abs;
  return out;
}

namespace detail {
inline void require_same_exponent(const HolderDescriptor& f, const HolderDescriptor& g,
                                  const char* op) {
  if (f.exponent != g.exponent) {
    throw ConfigError(std::string(op) + ": exponents differ (" + std::to_string(f.exponent) +
                      " vs " + std::to_string(g.exponent) + "); align them with weaken() first");
  }
}
}  // namespace detail

inline HolderDescriptor add(const HolderDescriptor& f, const HolderDescriptor& g) {
  validate(f);
  validate(g);
  detail::require_same_exponent(f, g, "add");
  HolderDescriptor out{f.constant + g.constant, f.exponent, std::nullopt, std::nullopt};
  if (f.sup_abs && g.sup_abs) out.sup_abs = *f.sup_abs + *g.sup_abs;
  return out;
}

/// Needs sup bounds of both factors.
inline HolderDescriptor multiply(const HolderDescriptor& f, const HolderDescriptor& g) {
  validate(f);
  validate(g);
  detail::require_same_exponent(f, g, "multiply");
  if (!f.sup_abs || !g.sup_abs) throw ConfigError("multiply: both factors need sup_abs");
  HolderDescriptor out{*f.sup_abs * g.constant + *g.sup_abs * f.constant, f.exponent,
                       *f.sup_abs * *g.sup_abs, std::nullopt};
  if (f.inf_abs && g.inf_abs) out.inf_abs = *f.inf_abs * *g.inf_abs;
  return out;
}

/// Descriptor of f o g: constant L(f) L(g)^p_f, exponent p_f p_g.
/// `f` must be valid on the range of `g`.
inline HolderDescriptor compose(const HolderDescriptor& f, const HolderDescriptor& g) {
  validate(f);
  validate(g);
  return {f.constant * std::pow(g.constant, f.exponent), f.exponent * g.exponent, f.sup_abs,
          f.inf_abs};
}

/// Pointwise sup or inf of a family with a common exponent.
inline HolderDescriptor envelope(std::span<const HolderDescriptor> hs) {
  if (hs.empty()) throw ConfigError("envelope: empty family");
  HolderDescriptor out = hs.front();
  validate(out);
  out.inf_abs.reset();
  for (const auto& h : hs.subspan(1)) {
    validate(h);
    detail::require_same_exponent(out, h, "envelope");
    out.constant = std::max(out.constant, h.constant);
    if (out.sup_abs && h.sup_abs) {
      out.sup_abs = std::max(*out.sup_abs, *h.sup_abs);
    } else {
      out.sup_abs.reset();
    }
  }
  return out;
}

inline HolderDescriptor envelope(std::initializer_list<HolderDescriptor> hs) {
  return envelope(std::span<const HolderDescriptor>(hs.begin(), hs.size()));
}

/// 1/f given inf |f| > 0.
inline HolderDescriptor reciprocal(const HolderDescriptor& f) {
  validate(f);
  if (!f.inf_abs) throw ConfigError("reciprocal: inf_abs is required");
  const double b = *f.inf_abs;
  HolderDescriptor out{f.constant / (b * b), f.exponent, 1.0 / b, std::nullopt};
  if (f.sup_abs && *f.sup_abs > 0) out.inf_abs = 1.0 / *f.sup_abs;
  return out;
}

/// |f| keeps the constant and exponent.
inline HolderDescriptor abs_of(const HolderDescriptor& f) {
  validate(f);
  return f;
}

/// Lowers the exponent to q. `oscillation_bound` must dominate
/// sup |f(x) - f(x')|; the weakened constant is max{L, B}.
inline HolderDescriptor weaken(const HolderDescriptor& f, double q, double oscillation_bound) {
  validate(f);
  if (!(q > 0 && q <= f.exponent)) {
    throw ConfigError("weaken: target exponent must lie in (0, " + std::to_string(f.exponent) + "]");
  }
  if (!(oscillation_bound >= 0)) throw ConfigError("weaken: oscillation bound must be >= 0");
  HolderDescriptor out = f;
  out.exponent = q;
  out.constant = std::max(f.constant, oscillation_bound);
  return out;
}

}  // namespace lacki::holder
