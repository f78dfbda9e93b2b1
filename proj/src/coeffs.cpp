#include "homog/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

namespace homog {

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double TWO_PI = 2.0 * PI;
const double NAN_D = std::numeric_limits<double>::quiet_NaN();

/// Typed parameter access with unknown-key rejection.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& j, std::string preset) : preset_(std::move(preset)) {
    if (j.is_null()) {
      src_ = nlohmann::json::object();
    } else if (j.is_object()) {
      src_ = j;
    } else {
      throw config_error("preset '" + preset_ + "': parameters must be a JSON object");
    }
  }

  double number(const std::string& key, double dflt) {
    seen_.insert(key);
    record_[key] = dflt;
    if (!src_.contains(key)) return dflt;
    const auto& v = src_.at(key);
    if (!v.is_number()) throw config_error("preset '" + preset_ + "': parameter '" + key + "' must be a number");
    double val = v.get<double>();
    record_[key] = val;
    return val;
  }

  std::string text(const std::string& key, const std::string& dflt) {
    seen_.insert(key);
    record_[key] = dflt;
    if (!src_.contains(key)) return dflt;
    const auto& v = src_.at(key);
    if (!v.is_string()) throw config_error("preset '" + preset_ + "': parameter '" + key + "' must be a string");
    std::string val = v.get<std::string>();
    record_[key] = val;
    return val;
  }

  bool flag(const std::string& key, bool dflt) {
    seen_.insert(key);
    record_[key] = dflt;
    if (!src_.contains(key)) return dflt;
    const auto& v = src_.at(key);
    if (!v.is_boolean()) throw config_error("preset '" + preset_ + "': parameter '" + key + "' must be a boolean");
    bool val = v.get<bool>();
    record_[key] = val;
    return val;
  }

  /// Rejects keys never asked for; returns the canonical default-filled record.
  std::string finish() const {
    for (const auto& item : src_.items())
      if (!seen_.count(item.key()))
        throw config_error("preset '" + preset_ + "': unknown parameter '" + item.key() + "'");
    return record_.dump();
  }

 private:
  std::string preset_;
  nlohmann::json src_;
  nlohmann::json record_ = nlohmann::json::object();
  std::set<std::string> seen_;
};

TwoScaleCoefficient preset_constant(ParamReader& p) {
  Mat2 A{p.number("a11", 1.0), p.number("a12", 0.0), p.number("a21", 0.0), p.number("a22", 1.0)};
  Vec2 B{p.number("b1", 0.0), p.number("b2", 0.0)};
  Vec2 C{p.number("c1", 0.0), p.number("c2", 0.0)};
  double k = p.number("k", 0.0);
  double lo, hi;
  A.sym_range(lo, hi);
  if (lo <= 0.0)
    throw config_error("preset 'constant': symmetric part of A must be positive definite (smallest eigenvalue " +
                       std::to_string(lo) + ")");
  TwoScaleCoefficient c;
  c.sample = [=](Vec2, Vec2) { return CoeffSample{A, B, C, k}; };
  c.alpha = lo;
  c.beta = hi;
  c.sup_b = std::max(std::abs(B.x), std::abs(B.y));
  c.sup_c = std::max(std::abs(C.x), std::abs(C.y));
  c.sup_k = std::abs(k);
  c.periodic_only = true;
  // int C . grad(phi) = 0 for constant C against periodic or zero-trace phi.
  c.markov_compliant = (k >= 0.0);
  return c;
}

TwoScaleCoefficient preset_layered(ParamReader& p) {
  double c0 = p.number("c0", 2.0);
  double c1 = p.number("c1", 1.0);
  double b_amp = p.number("b_amp", 0.0);
  double c_amp = p.number("c_amp", 0.0);
  double k_amp = p.number("k_amp", 0.0);
  if (c0 - std::abs(c1) <= 0.0)
    throw config_error("preset 'layered': need c0 - |c1| > 0 for ellipticity, got c0 = " + std::to_string(c0) +
                       ", c1 = " + std::to_string(c1));
  TwoScaleCoefficient c;
  c.sample = [=](Vec2, Vec2 y) {
    double s = std::sin(TWO_PI * y.x);
    double co = std::cos(TWO_PI * y.x);
    CoeffSample out;
    out.A = Mat2::identity(c0 + c1 * s);
    out.B = Vec2{s, co} * b_amp;
    out.C = Vec2{s, co} * c_amp;
    out.k = k_amp * 0.5 * (1.0 + s);
    return out;
  };
  c.alpha = c0 - std::abs(c1);
  c.beta = c0 + std::abs(c1);
  c.sup_b = std::abs(b_amp);
  c.sup_c = std::abs(c_amp);
  c.sup_k = std::abs(k_amp);
  c.periodic_only = true;
  c.markov_compliant = (c_amp == 0.0 && k_amp >= 0.0);
  return c;
}

TwoScaleCoefficient preset_checkerboard(ParamReader& p) {
  double a_lo = p.number("a_lo", 1.0);
  double a_hi = p.number("a_hi", 4.0);
  if (a_lo <= 0.0 || a_hi <= 0.0)
    throw config_error("preset 'checkerboard': a_lo and a_hi must be positive");
  TwoScaleCoefficient c;
  c.sample = [=](Vec2, Vec2 y) {
    int qx = fractional(y.x) < 0.5 ? 0 : 1;
    int qy = fractional(y.y) < 0.5 ? 0 : 1;
    double a = ((qx + qy) % 2 == 0) ? a_hi : a_lo;
    return CoeffSample{Mat2::identity(a), {}, {}, 0.0};
  };
  c.alpha = std::min(a_lo, a_hi);
  c.beta = std::max(a_lo, a_hi);
  c.periodic_only = true;
  c.markov_compliant = true;
  return c;
}

TwoScaleCoefficient preset_separable(ParamReader& p) {
  double x_mod = p.number("x_mod", 0.5);
  double c0 = p.number("c0", 2.0);
  double c1 = p.number("c1", 1.0);
  double c_amp = p.number("c_amp", 0.0);
  if (x_mod < 0.0) throw config_error("preset 'separable': x_mod must be >= 0");
  if (c0 - std::abs(c1) <= 0.0)
    throw config_error("preset 'separable': need c0 - |c1| > 0 for ellipticity");
  // Scalar macro factor in [1 + x_mod/2, 1 + x_mod]; the same factor scales C
  // so cell problems are x-independent (the factor cancels).
  auto a1 = [x_mod](Vec2 x) { return 1.0 + x_mod * (0.5 + 0.5 * std::sin(PI * x.x) * std::sin(PI * x.y)); };
  TwoScaleCoefficient c;
  c.sample = [=](Vec2 x, Vec2 y) {
    double f = a1(x);
    double s = std::sin(TWO_PI * y.x);
    double co = std::cos(TWO_PI * y.x);
    CoeffSample out;
    out.A = Mat2::identity(f * (c0 + c1 * s));
    out.C = Vec2{s, co} * (c_amp * f);
    return out;
  };
  c.alpha = (1.0 + 0.5 * x_mod) * (c0 - std::abs(c1));
  c.beta = (1.0 + x_mod) * (c0 + std::abs(c1));
  c.sup_c = std::abs(c_amp) * (1.0 + x_mod);
  c.periodic_only = (x_mod == 0.0);
  c.separable_scalar = true;
  c.markov_compliant = (c_amp == 0.0);
  return c;
}

TwoScaleCoefficient preset_gradient_drift(ParamReader& p) {
  std::string psi = p.text("psi", "cosy1");
  double k_amp = p.number("k_amp", 0.0);
  if (k_amp < 0.0)
    throw config_error("preset 'gradient-drift': k_amp must be >= 0, got " +
                       std::to_string(k_amp));
  TwoScaleCoefficient c;
  if (psi == "cosy1") {
    // C = grad_y cos(2 pi y1): periodic gradient field, sign-indefinite
    // divergence, so no order-preservation certificate.
    c.sample = [=](Vec2, Vec2 y) {
      CoeffSample out;
      out.C = {-TWO_PI * std::sin(TWO_PI * y.x), 0.0};
      out.k = k_amp * 0.5 * (1.0 + std::cos(TWO_PI * y.x));
      return out;
    };
    c.sup_c = TWO_PI;
    c.periodic_only = true;
    c.markov_compliant = false;
  } else if (psi == "negsq") {
    // C = grad(-|x|^2/2) = -x: macro gradient field with divergence -2, so
    // int C . grad(phi) = 2 int phi >= 0 for nonnegative zero-trace phi.
    c.sample = [=](Vec2 x, Vec2 y) {
      CoeffSample out;
      out.C = {-x.x, -x.y};
      out.k = k_amp * 0.5 * (1.0 + std::cos(TWO_PI * y.x));
      return out;
    };
    c.sup_c = 1.0;
    c.periodic_only = false;
    c.markov_compliant = true;  // divergence deficit >= 0 and k >= 0
  } else {
    throw config_error("preset 'gradient-drift': psi must be 'cosy1' or 'negsq', got '" + psi + "'");
  }
  c.sup_k = std::abs(k_amp);
  return c;
}

TwoScaleCoefficient preset_singular_drift(ParamReader& p) {
  double s = p.number("s", 0.5);
  double p0 = p.number("p0", 3.0);
  double amp = p.number("amp", 1.0);
  double y01 = p.number("y01", 0.5);
  double y02 = p.number("y02", 0.5);
  bool with_c = p.flag("with_c", false);
  if (s <= 0.0) throw config_error("preset 'singular-drift': s must be positive");
  if (p0 <= 2.0)
    throw config_error("preset 'singular-drift': p0 must exceed the dimension 2, got " + std::to_string(p0));
  if (s * p0 >= 2.0)
    throw config_error("preset 'singular-drift': need s * p0 < 2 for integrability, got " +
                       std::to_string(s * p0));
  constexpr double CLAMP_RADIUS = 1e-8;
  Vec2 y0{y01, y02};
  auto field = [=](Vec2 y) {
    Vec2 d = {fractional(y.x) - y0.x, fractional(y.y) - y0.y};
    double r = d.norm();
    Vec2 dir = (r > 0.0) ? d * (1.0 / r) : Vec2{1.0, 0.0};
    double r_eff = std::max(r, CLAMP_RADIUS);
    return dir * (amp * std::pow(r_eff, -s));
  };
  TwoScaleCoefficient c;
  c.sample = [=](Vec2, Vec2 y) {
    CoeffSample out;
    Vec2 b = field(y);
    out.B = b;
    if (with_c) out.C = b;
    return out;
  };
  c.p0 = p0;
  c.sup_b = NAN_D;
  c.sup_c = with_c ? NAN_D : 0.0;
  c.periodic_only = true;
  c.markov_compliant = false;
  return c;
}

}  // namespace

TwoScaleCoefficient make_preset(const std::string& name, const nlohmann::json& params) {
  ParamReader p(params, name);
  TwoScaleCoefficient c;
  if (name == "constant") {
    c = preset_constant(p);
  } else if (name == "layered") {
    c = preset_layered(p);
  } else if (name == "checkerboard") {
    c = preset_checkerboard(p);
  } else if (name == "separable") {
    c = preset_separable(p);
  } else if (name == "gradient-drift") {
    c = preset_gradient_drift(p);
  } else if (name == "singular-drift") {
    c = preset_singular_drift(p);
  } else {
    throw config_error("unknown coefficient preset '" + name +
                       "' (known: constant, layered, checkerboard, separable, gradient-drift, singular-drift)");
  }
  c.name = name;
  c.params_json = p.finish();
  return c;
}

namespace {

/// Quadrature of int_Y C(x0, .) . grad(phi) over the unit cell.
double weak_div_c_integral(const TwoScaleCoefficient& c, const Grid& g, Vec2 x0, const ScalarField& phi) {
  double s = 0.0;
  const double inv_h = static_cast<double>(g.n);
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) {
      double v00 = phi.nodal(cx, cy), v10 = phi.nodal(cx + 1, cy);
      double v11 = phi.nodal(cx + 1, cy + 1), v01 = phi.nodal(cx, cy + 1);
      for (int qb = 0; qb < g.quad.npts; ++qb)
        for (int qa = 0; qa < g.quad.npts; ++qa) {
          double xi = g.quad.pt[qa], eta = g.quad.pt[qb];
          Vec2 grad{((1 - eta) * (v10 - v00) + eta * (v11 - v01)) * inv_h,
                    ((1 - xi) * (v01 - v00) + xi * (v11 - v10)) * inv_h};
          Vec2 C = c.eval(x0, g.qpoint(cx, cy, qa, qb)).C;
          s += g.qweight(qa, qb) * C.dot(grad);
        }
    }
  return s;
}

}  // namespace

BoundsReport verify_bounds(const TwoScaleCoefficient& c, const Grid& ygrid, int x_stations,
                           std::uint64_t seed) {
  if (x_stations < 1) throw config_error("verify_bounds: need at least one x station");
  Rng rng(seed);
  std::vector<Vec2> xs{{0.5, 0.5}};
  for (int i = 1; i < x_stations; ++i) xs.push_back({rng.uniform(), rng.uniform()});

  BoundsReport r;
  r.alpha_hat = std::numeric_limits<double>::infinity();
  r.beta_hat = -std::numeric_limits<double>::infinity();
  r.min_weak_div_c = std::numeric_limits<double>::infinity();
  double min_k = std::numeric_limits<double>::infinity();

  for (Vec2 x : xs)
    for (int cy = 0; cy < ygrid.n; ++cy)
      for (int cx = 0; cx < ygrid.n; ++cx)
        for (int qb = 0; qb < ygrid.quad.npts; ++qb)
          for (int qa = 0; qa < ygrid.quad.npts; ++qa) {
            CoeffSample cs = c.eval(x, ygrid.qpoint(cx, cy, qa, qb));
            double lo, hi;
            cs.A.sym_range(lo, hi);
            r.alpha_hat = std::min(r.alpha_hat, lo);
            r.beta_hat = std::max(r.beta_hat, hi);
            min_k = std::min(min_k, cs.k);
          }

  // Nonnegative bump basket: nodal hats plus rectified smooth fields.
  const int hats = 16, smooths = 8;
  for (Vec2 x : xs) {
    for (int b = 0; b < hats; ++b) {
      ScalarField phi(ygrid);
      phi.v[static_cast<Eigen::Index>(rng.integer() % static_cast<std::uint64_t>(ygrid.dof_count()))] = 1.0;
      r.min_weak_div_c = std::min(r.min_weak_div_c, weak_div_c_integral(c, ygrid, x, phi));
    }
    for (int b = 0; b < smooths; ++b) {
      ScalarField phi = random_smooth_field(ygrid, seed + 101 * static_cast<std::uint64_t>(b) + 7, 1.0);
      phi.v = phi.v.cwiseMax(0.0);
      r.min_weak_div_c = std::min(r.min_weak_div_c, weak_div_c_integral(c, ygrid, x, phi));
    }
  }

  if (c.alpha > r.alpha_hat + 1e-12)
    throw config_error("declared lower ellipticity bound " + std::to_string(c.alpha) +
                       " exceeds sampled minimum " + std::to_string(r.alpha_hat) + " for preset '" + c.name + "'");
  if (r.beta_hat > c.beta + 1e-12)
    throw config_error("sampled maximum " + std::to_string(r.beta_hat) +
                       " exceeds declared upper ellipticity bound " + std::to_string(c.beta) + " for preset '" +
                       c.name + "'");
  if (c.markov_compliant) {
    if (min_k < -1e-14)
      throw config_error("preset '" + c.name + "' declares nonnegative potential but sampled k = " +
                         std::to_string(min_k));
    if (r.min_weak_div_c < -1e-10)
      throw config_error("preset '" + c.name + "' declares a sign-certified drift but int C . grad(bump) = " +
                         std::to_string(r.min_weak_div_c));
  }
  r.declared_bounds_hold = true;
  return r;
}

double lower_order_lp_mass(const TwoScaleCoefficient& c, const Grid& ygrid, Vec2 x0) {
  if (!std::isfinite(c.p0))
    throw config_error("lower_order_lp_mass requires a finite integrability exponent (preset '" + c.name + "')");
  double s = 0.0;
  for (int cy = 0; cy < ygrid.n; ++cy)
    for (int cx = 0; cx < ygrid.n; ++cx)
      for (int qb = 0; qb < ygrid.quad.npts; ++qb)
        for (int qa = 0; qa < ygrid.quad.npts; ++qa) {
          Vec2 B = c.eval(x0, ygrid.qpoint(cx, cy, qa, qb)).B;
          s += ygrid.qweight(qa, qb) *
               (std::pow(std::abs(B.x), c.p0) + std::pow(std::abs(B.y), c.p0));
        }
  return s;
}

}  // namespace homog
