// constitutive.hpp
// The flux function 𝔞 with its potential 𝔉 (𝔉' = 𝔞), translated versions
// a_v, F_v normalized to vanish at 0, and the embeddings P(u,v), Q_v(h,r)
// into 3x2 matrix space.
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rank1lab/types.hpp"

namespace rank1lab {

// Scalar C^2 flux with closed-form derivatives and antiderivative.
// Immutable after construction; share freely across threads.
class ConstitutiveFn {
 public:
  virtual ~ConstitutiveFn() = default;

  double eval(double v) const { return check(v), a(v); }       // 𝔞(v)
  double d1(double v) const { return check(v), a1(v); }        // 𝔞'(v)
  double d2(double v) const { return check(v), a2(v); }        // 𝔞''(v)
  double potential(double v) const { return check(v), F(v); }  // 𝔉(v)

  const Interval& domain() const { return domain_; }
  const std::string& name() const { return name_; }

 protected:
  ConstitutiveFn(std::string name, Interval domain)
      : name_(std::move(name)), domain_(domain) {}

  virtual double a(double v) const = 0;
  virtual double a1(double v) const = 0;
  virtual double a2(double v) const = 0;
  virtual double F(double v) const = 0;

 private:
  void check(double v) const {
    if (!domain_.contains(v))
      throw DomainError(name_ + ": evaluation at " + std::to_string(v) +
                        " outside open domain");
  }

  std::string name_;
  Interval domain_;
};

using FnPtr = std::shared_ptr<const ConstitutiveFn>;

// Builtins: exp, power_convex (params: p>0, default 2; domain (0,inf)),
// cubic_plus_linear, poly (params: coeffs), tanh_blend (params: c>=0).
// Throws std::invalid_argument for unknown names or parameters that break
// 𝔞' > 0 on the requested domain.
FnPtr make_builtin(const std::string& name, const nlohmann::json& params);
FnPtr make_builtin(const std::string& name);

// {"kind":"builtin","name":"exp"} or {"kind":"poly","coeffs":[c0,...]},
// optional "domain":[lo,hi] restricting the builtin's natural domain.
FnPtr fn_from_json(const nlohmann::json& spec);

// Accepts either a bare builtin name or a JSON object as above.
FnPtr fn_from_spec_string(const std::string& text);

// a_v(t) = 𝔞(v+t) - 𝔞(v),  F_v(t) = 𝔉(v+t) - 𝔉(v) - 𝔞(v) t.
// a_v(0) = F_v(0) = F_v'(0) = 0 and F_v' = a_v.
class TranslatedFn {
 public:
  TranslatedFn(FnPtr f, double v);

  double a(double t) const { return f_->eval(v_ + t) - a0_; }
  double a1(double t) const { return f_->d1(v_ + t); }
  double a2(double t) const { return f_->d2(v_ + t); }
  double F(double t) const { return f_->potential(v_ + t) - F0_ - a0_ * t; }

  double base() const { return v_; }
  const ConstitutiveFn& fn() const { return *f_; }

 private:
  FnPtr f_;
  double v_, a0_, F0_;
};

inline TranslatedFn translate(FnPtr f, double v) { return TranslatedFn(std::move(f), v); }

// Parameter pair naming the point P(u,v) of the constitutive manifold.
struct KPoint {
  double u = 0.0;
  double v = 0.0;
};

// Four parameter pairs; candidate for a T4 configuration inside K1.
struct Quadruple {
  std::array<KPoint, 4> pts;
};

// P(u,v) = [ u, v ; 𝔞(v), u ; u 𝔞(v), u^2/2 + 𝔉(v) ].
Mat32 p_map(const ConstitutiveFn& f, const KPoint& pt);

// Q_v(h,r) = [ h, r ; a_v(r), h ; h a_v(r), h^2/2 + F_v(r) ].  Q_v(0,0) = 0.
Mat32 q_map(const ConstitutiveFn& f, double v, double h, double r);

enum class ConvexityClass {
  StrictlyConvex,   // 𝔞'' > margin on the probe grid
  StrictlyConcave,  // 𝔞'' < -margin on the probe grid
  SignChanging,     // 𝔞'' changes sign across the grid
  Flat,             // |𝔞''| <= margin somewhere, no sign change
};

// Probe-grid classification of the 𝔞'' sign pattern on (lo,hi).
ConvexityClass classify_convexity(const ConstitutiveFn& f, double lo, double hi,
                                  int n = 257, double margin = 0.0);

// True when 𝔞' > margin across the probe grid.
bool strictly_increasing_on(const ConstitutiveFn& f, double lo, double hi,
                            int n = 257, double margin = 0.0);

// Maximal grid intervals (x_i, x_{i+1}) on which 𝔞'' changes sign; empty for
// a fixed-sign 𝔞''. n >= 3.
std::vector<std::pair<double, double>> inflection_scan(const ConstitutiveFn& f,
                                                       double lo, double hi,
                                                       int n);

// Max |F'(t) - a(t)| by central differences over a probe grid; construction
// sanity for user-supplied pairs (𝔞, 𝔉).
double potential_consistency(const ConstitutiveFn& f, double lo, double hi,
                             int n = 65);

}  // namespace rank1lab
