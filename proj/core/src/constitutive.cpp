// constitutive.cpp
#include "rank1lab/constitutive.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace rank1lab {

namespace {

using nlohmann::json;

class ExpFn final : public ConstitutiveFn {
 public:
  ExpFn(Interval d) : ConstitutiveFn("exp", d) {}

 protected:
  double a(double v) const override { return std::exp(v); }
  double a1(double v) const override { return std::exp(v); }
  double a2(double v) const override { return std::exp(v); }
  double F(double v) const override { return std::exp(v); }
};

class PowerConvexFn final : public ConstitutiveFn {
 public:
  PowerConvexFn(double p, Interval d) : ConstitutiveFn("power_convex", d), p_(p) {}

 protected:
  double a(double v) const override { return std::pow(v, p_); }
  double a1(double v) const override { return p_ * std::pow(v, p_ - 1.0); }
  double a2(double v) const override { return p_ * (p_ - 1.0) * std::pow(v, p_ - 2.0); }
  double F(double v) const override { return std::pow(v, p_ + 1.0) / (p_ + 1.0); }

 private:
  double p_;
};

class CubicPlusLinearFn final : public ConstitutiveFn {
 public:
  CubicPlusLinearFn(Interval d) : ConstitutiveFn("cubic_plus_linear", d) {}

 protected:
  double a(double v) const override { return v * v * v + v; }
  double a1(double v) const override { return 3.0 * v * v + 1.0; }
  double a2(double v) const override { return 6.0 * v; }
  double F(double v) const override {
    const double v2 = v * v;
    return 0.25 * v2 * v2 + 0.5 * v2;
  }
};

class PolyFn final : public ConstitutiveFn {
 public:
  PolyFn(std::vector<double> c, Interval d)
      : ConstitutiveFn("poly", d), c_(std::move(c)) {}

 protected:
  double a(double v) const override {
    double s = 0.0;
    for (size_t k = c_.size(); k-- > 0;) s = s * v + c_[k];
    return s;
  }
  double a1(double v) const override {
    double s = 0.0;
    for (size_t k = c_.size(); k-- > 1;) s = s * v + static_cast<double>(k) * c_[k];
    return s;
  }
  double a2(double v) const override {
    double s = 0.0;
    for (size_t k = c_.size(); k-- > 2;)
      s = s * v + static_cast<double>(k) * static_cast<double>(k - 1) * c_[k];
    return s;
  }
  double F(double v) const override {
    double s = 0.0;
    for (size_t k = c_.size(); k-- > 0;) s = s * v + c_[k] / static_cast<double>(k + 1);
    return s * v;
  }

 private:
  std::vector<double> c_;
};

// 𝔞(v) = tanh(v) + c v; strictly increasing for c >= 0, strictly concave on
// any domain inside (0, inf) when c = 0.
class TanhBlendFn final : public ConstitutiveFn {
 public:
  TanhBlendFn(double c, Interval d) : ConstitutiveFn("tanh_blend", d), c_(c) {}

 protected:
  double a(double v) const override { return std::tanh(v) + c_ * v; }
  double a1(double v) const override {
    const double t = std::tanh(v);
    return (1.0 - t * t) + c_;
  }
  double a2(double v) const override {
    const double t = std::tanh(v);
    return -2.0 * t * (1.0 - t * t);
  }
  double F(double v) const override {
    // log cosh, overflow-safe for large |v|
    const double av = std::abs(v);
    return av + std::log1p(std::exp(-2.0 * av)) - std::log(2.0) + 0.5 * c_ * v * v;
  }

 private:
  double c_;
};

Interval domain_from(const json& params, Interval natural) {
  if (!params.is_object() || !params.contains("domain")) return natural;
  const auto& d = params.at("domain");
  if (!d.is_array() || d.size() != 2)
    throw std::invalid_argument("function spec: domain must be [lo, hi]");
  Interval iv{d[0].get<double>(), d[1].get<double>()};
  if (!iv.valid()) throw std::invalid_argument("function spec: domain must satisfy lo < hi");
  if (!(iv.lo >= natural.lo && iv.hi <= natural.hi))
    throw std::invalid_argument("function spec: domain exceeds the builtin's natural domain");
  return iv;
}

// Probe interval used for validation of unbounded domains.
Interval probe_interval(const Interval& d) {
  Interval p = d;
  if (std::isinf(p.lo)) p.lo = -8.0;
  if (std::isinf(p.hi)) p.hi = 8.0;
  if (!(p.lo < p.hi)) p = {-8.0, 8.0};
  return p;
}

void require_increasing(const ConstitutiveFn& f) {
  const Interval p = probe_interval(f.domain());
  if (!strictly_increasing_on(f, p.lo, p.hi))
    throw std::invalid_argument(f.name() + ": parameters violate 𝔞' > 0 on the requested domain");
}

}  // namespace

FnPtr make_builtin(const std::string& name, const nlohmann::json& params) {
  FnPtr f;
  if (name == "exp") {
    f = std::make_shared<ExpFn>(domain_from(params, Interval{}));
  } else if (name == "power_convex") {
    const double p = params.is_object() && params.contains("p") ? params.at("p").get<double>() : 2.0;
    if (!(p > 0.0))
      throw std::invalid_argument("power_convex: exponent p must be > 0");
    f = std::make_shared<PowerConvexFn>(
        p, domain_from(params, Interval{0.0, std::numeric_limits<double>::infinity()}));
  } else if (name == "cubic_plus_linear") {
    f = std::make_shared<CubicPlusLinearFn>(domain_from(params, Interval{}));
  } else if (name == "poly") {
    if (!params.is_object() || !params.contains("coeffs"))
      throw std::invalid_argument("poly: missing coeffs");
    auto c = params.at("coeffs").get<std::vector<double>>();
    if (c.empty()) throw std::invalid_argument("poly: empty coeffs");
    f = std::make_shared<PolyFn>(std::move(c), domain_from(params, Interval{}));
  } else if (name == "tanh_blend") {
    const double c = params.is_object() && params.contains("c") ? params.at("c").get<double>() : 0.0;
    if (c < 0.0) throw std::invalid_argument("tanh_blend: c must be >= 0");
    f = std::make_shared<TanhBlendFn>(c, domain_from(params, Interval{}));
  } else {
    throw std::invalid_argument("unknown builtin function: " + name);
  }
  require_increasing(*f);
  return f;
}

FnPtr make_builtin(const std::string& name) { return make_builtin(name, json::object()); }

FnPtr fn_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw std::invalid_argument("function spec: expected object with \"kind\"");
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "builtin") {
    if (!spec.contains("name"))
      throw std::invalid_argument("function spec: builtin requires \"name\"");
    return make_builtin(spec.at("name").get<std::string>(), spec);
  }
  if (kind == "poly") return make_builtin("poly", spec);
  throw std::invalid_argument("function spec: unknown kind \"" + kind + "\"");
}

FnPtr fn_from_spec_string(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return fn_from_json(json::parse(text));
  return make_builtin(text);
}

TranslatedFn::TranslatedFn(FnPtr f, double v) : f_(std::move(f)), v_(v) {
  a0_ = f_->eval(v_);
  F0_ = f_->potential(v_);
}

Mat32 p_map(const ConstitutiveFn& f, const KPoint& pt) {
  const double av = f.eval(pt.v);
  Mat32 m;
  m << pt.u, pt.v,
       av, pt.u,
       pt.u * av, 0.5 * pt.u * pt.u + f.potential(pt.v);
  return m;
}

Mat32 q_map(const ConstitutiveFn& f, double v, double h, double r) {
  const double a0 = f.eval(v);
  const double ar = f.eval(v + r) - a0;
  const double Fr = f.potential(v + r) - f.potential(v) - a0 * r;
  Mat32 m;
  m << h, r,
       ar, h,
       h * ar, 0.5 * h * h + Fr;
  return m;
}

ConvexityClass classify_convexity(const ConstitutiveFn& f, double lo, double hi,
                                  int n, double margin) {
  if (n < 3) throw std::invalid_argument("classify_convexity: n >= 3");
  bool pos = false, neg = false, flat = false;
  for (int k = 0; k < n; ++k) {
    const double v = lo + (hi - lo) * (k + 0.5) / n;
    const double s = f.d2(v);
    if (s > margin) pos = true;
    else if (s < -margin) neg = true;
    else flat = true;
  }
  if (pos && neg) return ConvexityClass::SignChanging;
  if (flat) return ConvexityClass::Flat;
  return pos ? ConvexityClass::StrictlyConvex : ConvexityClass::StrictlyConcave;
}

bool strictly_increasing_on(const ConstitutiveFn& f, double lo, double hi,
                            int n, double margin) {
  for (int k = 0; k < n; ++k) {
    const double v = lo + (hi - lo) * (k + 0.5) / n;
    if (!(f.d1(v) > margin)) return false;
  }
  return true;
}

std::vector<std::pair<double, double>> inflection_scan(const ConstitutiveFn& f,
                                                       double lo, double hi, int n) {
  if (n < 3) throw std::invalid_argument("inflection_scan: n >= 3");
  std::vector<std::pair<double, double>> out;
  double xprev = 0.0, sprev = 0.0;
  bool have_prev = false;
  for (int k = 0; k < n; ++k) {
    const double x = lo + (hi - lo) * (k + 0.5) / n;
    const double s = f.d2(x);
    if (have_prev && sprev != 0.0 && s != 0.0 && std::signbit(s) != std::signbit(sprev))
      out.emplace_back(xprev, x);
    if (s != 0.0) {
      xprev = x;
      sprev = s;
      have_prev = true;
    }
  }
  return out;
}

double potential_consistency(const ConstitutiveFn& f, double lo, double hi, int n) {
  const double eps = 1e-6 * std::max(1.0, std::abs(hi - lo));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = lo + (hi - lo) * (k + 0.5) / n;
    if (!f.domain().contains(v - eps) || !f.domain().contains(v + eps)) continue;
    const double fd = (f.potential(v + eps) - f.potential(v - eps)) / (2.0 * eps);
    worst = std::max(worst, std::abs(fd - f.eval(v)));
  }
  return worst;
}

}  // namespace rank1lab
