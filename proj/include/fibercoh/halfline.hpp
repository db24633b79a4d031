#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fibercoh/error.hpp"

namespace fibercoh {

namespace detail {

/// Coefficients (lowest degree first) of the Lagrange basis polynomial for node `m` of `nodes`.
inline std::vector<double> lagrange_basis(const std::vector<double>& nodes, std::size_t m) {
  std::vector<double> c{1.0};
  double denom = 1.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == m) continue;
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t d = 0; d < c.size(); ++d) {
      next[d + 1] += c[d];
      next[d] -= nodes[k] * c[d];
    }
    c = std::move(next);
    denom *= nodes[m] - nodes[k];
  }
  for (double& x : c) x /= denom;
  return c;
}

/// Weights w with sum_m w_m g(nodes_m) ~ integral of g over [a, b].
inline std::vector<double> integration_weights(const std::vector<double>& nodes, double a, double b) {
  std::vector<double> w(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    auto c = lagrange_basis(nodes, m);
    double pa = 0, pb = 0;
    for (std::size_t d = c.size(); d-- > 0;) {
      pa = pa * a + c[d] / static_cast<double>(d + 1);
      pb = pb * b + c[d] / static_cast<double>(d + 1);
    }
    w[m] = pb * b - pa * a;
  }
  return w;
}

/// Weights w with sum_m w_m g(nodes_m) ~ g'(x).
inline std::vector<double> derivative_weights(const std::vector<double>& nodes, double x) {
  std::vector<double> w(nodes.size());
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    auto c = lagrange_basis(nodes, m);
    double p = 0;
    for (std::size_t d = c.size(); d-- > 1;) p = p * x + static_cast<double>(d) * c[d];
    w[m] = p;
  }
  return w;
}

/// First stencil index for a window of `width` points around `center`, clamped to [0, n].
inline int stencil_start(int center, int width, int n) {
  int start = center - (width - 1) / 2;
  return std::clamp(start, 0, std::max(0, n + 1 - width));
}

}  // namespace detail

/// Log-uniform grid v_j = delta * exp(s_j), s_j uniform on [-L, 0], j = 0..resolution.
class HalfLineGrid {
 public:
  static constexpr int kIntegrationPoints = 8;
  static constexpr int kDerivativePoints = 9;

  /// Depth in log v needed for the weight v^{-2 lambda} to fall below about e^{-72} at the far end.
  static double default_depth(double lambda) { return std::max(16.0, 36.0 / std::max(std::abs(lambda), 1e-3)); }

  HalfLineGrid(double lambda, double delta, int resolution, double depth = 0)
      : lambda_(lambda), delta_(delta), n_(resolution), depth_(depth > 0 ? depth : default_depth(lambda)) {
    if (!(delta > 0)) throw Error(ErrorKind::invalid_input, "delta must be positive");
    if (resolution < kDerivativePoints) throw Error(ErrorKind::invalid_input, "resolution too small");
    h_ = depth_ / n_;
    s_.resize(n_ + 1);
    v_.resize(n_ + 1);
    for (int j = 0; j <= n_; ++j) {
      s_[j] = -depth_ + j * h_;
      v_[j] = delta_ * std::exp(s_[j]);
    }
    v_[n_] = delta_;
    build_interval_rules();
    quad_.assign(n_ + 1, 0.0);
    for (int k = 0; k < n_; ++k)
      for (int m = 0; m < kIntegrationPoints; ++m) quad_[interval_start_[k] + m] += interval_w_[k][m];
    ip_.resize(n_ + 1);
    for (int j = 0; j <= n_; ++j) ip_[j] = quad_[j] * weight_at(s_[j]);
    if (lambda_ < 0) ip_[0] += std::pow(delta_, -2 * lambda_) * std::exp(2 * lambda_ * depth_) / (-2 * lambda_);
  }

  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  int resolution() const { return n_; }
  double depth() const { return depth_; }
  std::size_t size() const { return v_.size(); }
  const std::vector<double>& nodes() const { return v_; }
  const std::vector<double>& log_nodes() const { return s_; }
  /// Quadrature weights for integrals in ds = dv/v over [-L, 0].
  const std::vector<double>& quadrature() const { return quad_; }
  /// Discrete inner-product weights: <f, g>_lambda = sum_j ip_j f_j g_j.
  const std::vector<double>& inner_weights() const { return ip_; }

  std::vector<double> sample(const std::function<double(double)>& f) const {
    std::vector<double> out(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j) out[j] = f(v_[j]);
    return out;
  }
  double inner(const std::vector<double>& f, const std::vector<double>& g) const {
    double acc = 0;
    for (std::size_t j = 0; j < ip_.size(); ++j) acc += ip_[j] * f[j] * g[j];
    return acc;
  }
  double norm(const std::vector<double>& f) const { return std::sqrt(inner(f, f)); }

  /// Integral over [s_k, s_{k+1}] as a stencil (start index, weights).
  int interval_start(int k) const { return interval_start_[k]; }
  const std::vector<double>& interval_weights(int k) const { return interval_w_[k]; }

  /// d/ds at every node.
  std::vector<double> derivative_in_s(const std::vector<double>& g) const {
    std::vector<double> out(g.size(), 0.0);
    for (int j = 0; j <= n_; ++j) {
      int start = detail::stencil_start(j, kDerivativePoints, n_);
      const auto& w = deriv_w_[j - start];
      for (int m = 0; m < kDerivativePoints; ++m) out[j] += w[m] * g[start + m];
    }
    return out;
  }

 private:
  double weight_at(double s) const { return std::pow(delta_, -2 * lambda_) * std::exp(-2 * lambda_ * s); }

  void build_interval_rules() {
    interval_start_.resize(n_);
    interval_w_.resize(n_);
    std::vector<double> local(kIntegrationPoints);
    for (int k = 0; k < n_; ++k) {
      int start = std::clamp(k - kIntegrationPoints / 2 + 1, 0, n_ + 1 - kIntegrationPoints);
      for (int m = 0; m < kIntegrationPoints; ++m) local[m] = start + m - k;
      auto w = detail::integration_weights(local, 0.0, 1.0);
      for (double& x : w) x *= h_;
      interval_start_[k] = start;
      interval_w_[k] = std::move(w);
    }
    std::vector<double> dn(kDerivativePoints);
    deriv_w_.resize(kDerivativePoints);
    for (int off = 0; off < kDerivativePoints; ++off) {
      for (int m = 0; m < kDerivativePoints; ++m) dn[m] = m - off;
      deriv_w_[off] = detail::derivative_weights(dn, 0.0);
      for (double& x : deriv_w_[off]) x /= h_;
    }
  }

  double lambda_, delta_;
  int n_;
  double depth_, h_ = 0;
  std::vector<double> s_, v_, quad_, ip_;
  std::vector<int> interval_start_;
  std::vector<std::vector<double>> interval_w_;
  std::vector<std::vector<double>> deriv_w_;  // indexed by position of the target node inside the stencil
};

/// Samples on a grid: degree 0 holds function values, degree 1 the coefficient f of f dv.
struct BForm {
  int degree = 0;
  std::vector<double> values;
};

namespace detail {

/// b-coefficients beta = v f of a 1-form f dv.
inline std::vector<double> b_coefficients(const HalfLineGrid& g, const BForm& w) {
  if (w.degree != 1 || w.values.size() != g.size()) throw Error(ErrorKind::invalid_input, "expected a 1-form on the grid");
  std::vector<double> beta(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) beta[j] = g.nodes()[j] * w.values[j];
  return beta;
}

inline void check_zero_form(const HalfLineGrid& g, const BForm& f) {
  if (f.degree != 0 || f.values.size() != g.size()) throw Error(ErrorKind::invalid_input, "expected a function on the grid");
}

/// (Gt beta)_j = -sum_{k >= j} I_k(beta): integral from delta down to v_j.
inline std::vector<double> gtilde_beta(const HalfLineGrid& g, const std::vector<double>& beta) {
  const int n = g.resolution();
  std::vector<double> out(n + 1, 0.0);
  for (int k = n - 1; k >= 0; --k) {
    double ik = 0;
    const auto& w = g.interval_weights(k);
    for (std::size_t m = 0; m < w.size(); ++m) ik += w[m] * beta[g.interval_start(k) + m];
    out[k] = out[k + 1] - ik;
  }
  return out;
}

inline std::vector<double> gtilde_beta_transpose(const HalfLineGrid& g, const std::vector<double>& y) {
  const int n = g.resolution();
  std::vector<double> out(n + 1, 0.0);
  double prefix = 0;
  for (int k = 0; k < n; ++k) {
    prefix += y[k];
    const auto& w = g.interval_weights(k);
    for (std::size_t m = 0; m < w.size(); ++m) out[g.interval_start(k) + m] -= w[m] * prefix;
  }
  return out;
}

/// (G beta)_j = sum_{k < j} I_k(beta): integral from 0 up to v_j, truncated below v_0.
inline std::vector<double> forward_beta(const HalfLineGrid& g, const std::vector<double>& beta) {
  const int n = g.resolution();
  std::vector<double> out(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    double ik = 0;
    const auto& w = g.interval_weights(k);
    for (std::size_t m = 0; m < w.size(); ++m) ik += w[m] * beta[g.interval_start(k) + m];
    out[k + 1] = out[k] + ik;
  }
  return out;
}

inline std::vector<double> forward_beta_transpose(const HalfLineGrid& g, const std::vector<double>& y) {
  const int n = g.resolution();
  std::vector<double> out(n + 1, 0.0);
  double suffix = 0;
  for (int k = n - 1; k >= 0; --k) {
    suffix += y[k + 1];
    const auto& w = g.interval_weights(k);
    for (std::size_t m = 0; m < w.size(); ++m) out[g.interval_start(k) + m] += w[m] * suffix;
  }
  return out;
}

/// Normalized projection weights pi_j = ip_j / sum(ip).
inline std::vector<double> projection_weights(const HalfLineGrid& g) {
  if (g.lambda() >= 0) throw Error(ErrorKind::projection_undefined, "lambda must be negative");
  std::vector<double> pi = g.inner_weights();
  double total = 0;
  for (double x : pi) total += x;
  for (double& x : pi) x /= total;
  return pi;
}

}  // namespace detail

/// Projection onto constants: -2 lambda delta^{2 lambda} times the weighted integral of f against t^{-2 lambda} dt/t.
inline double apply_P(const HalfLineGrid& g, const BForm& f) {
  detail::check_zero_form(g, f);
  auto pi = detail::projection_weights(g);
  double acc = 0;
  for (std::size_t j = 0; j < pi.size(); ++j) acc += pi[j] * f.values[j];
  return acc;
}

/// Integral of f dt from delta to v; zero at v = delta.
inline BForm apply_Gtilde(const HalfLineGrid& g, const BForm& w) {
  return {0, detail::gtilde_beta(g, detail::b_coefficients(g, w))};
}

/// The inverse of d: (Id - P) Gtilde for lambda < 0, integral from 0 to v for lambda > 0.
inline BForm apply_G(const HalfLineGrid& g, const BForm& w) {
  if (g.lambda() == 0) throw Error(ErrorKind::critical_weight, "lambda = 0");
  auto beta = detail::b_coefficients(g, w);
  if (g.lambda() > 0) return {0, detail::forward_beta(g, beta)};
  BForm out{0, detail::gtilde_beta(g, beta)};
  double c = apply_P(g, out);
  for (double& x : out.values) x -= c;
  return out;
}

/// Exterior derivative of a function: returns the coefficient of dv.
inline BForm apply_d(const HalfLineGrid& g, const BForm& f) {
  detail::check_zero_form(g, f);
  auto ds = g.derivative_in_s(f.values);
  for (std::size_t j = 0; j < ds.size(); ++j) ds[j] /= g.nodes()[j];
  return {1, ds};
}

/// Weighted norm of a sampled form; a 1-form f dv is measured through its b-coefficient v f.
inline double form_norm(const HalfLineGrid& g, const BForm& w) {
  return g.norm(w.degree == 1 ? detail::b_coefficients(g, w) : w.values);
}

namespace detail {

/// Largest singular value of a linear map between weighted spaces with weights ip, by power iteration on A^T D A.
inline double weighted_operator_norm(const std::vector<double>& ip,
                                     const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                                     const std::function<std::vector<double>(const std::vector<double>&)>& transpose,
                                     int max_iter = 3000, double tol = 1e-13) {
  const std::size_t n = ip.size();
  std::vector<double> sq(n);
  for (std::size_t j = 0; j < n; ++j) sq[j] = std::sqrt(ip[j]);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> z(n);
  for (auto& x : z) x = u(rng);
  double sigma2 = 0;
  for (int it = 0; it < max_iter; ++it) {
    double nz = 0;
    for (double x : z) nz += x * x;
    nz = std::sqrt(nz);
    for (double& x : z) x /= nz;
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = z[j] / sq[j];
    auto y = apply(x);
    for (std::size_t j = 0; j < n; ++j) y[j] *= ip[j];
    auto back = transpose(y);
    double next = 0;
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = back[j] / sq[j];
      next += z[j] * (x[j] * sq[j]);
    }
    bool done = std::abs(next - sigma2) <= tol * std::abs(next);
    sigma2 = next;
    if (done) break;
  }
  return std::sqrt(std::max(sigma2, 0.0));
}

}  // namespace detail

/// Operator norm of G from b-coefficients to functions, both with the lambda-weighted norm.
inline double norm_G(const HalfLineGrid& g) {
  if (g.lambda() == 0) throw Error(ErrorKind::critical_weight, "lambda = 0");
  if (g.lambda() > 0)
    return detail::weighted_operator_norm(
        g.inner_weights(), [&](auto& b) { return detail::forward_beta(g, b); },
        [&](auto& y) { return detail::forward_beta_transpose(g, y); });
  auto pi = detail::projection_weights(g);
  auto project_out = [&](std::vector<double> f) {
    double c = 0;
    for (std::size_t j = 0; j < f.size(); ++j) c += pi[j] * f[j];
    for (double& x : f) x -= c;
    return f;
  };
  auto project_out_t = [&](std::vector<double> y) {
    double s = 0;
    for (double x : y) s += x;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] -= pi[j] * s;
    return y;
  };
  return detail::weighted_operator_norm(
      g.inner_weights(), [&](auto& b) { return project_out(detail::gtilde_beta(g, b)); },
      [&](auto& y) { return detail::gtilde_beta_transpose(g, project_out_t(y)); });
}

inline double norm_P(const HalfLineGrid& g) {
  auto pi = detail::projection_weights(g);
  return detail::weighted_operator_norm(
      g.inner_weights(),
      [&](auto& f) {
        double c = 0;
        for (std::size_t j = 0; j < f.size(); ++j) c += pi[j] * f[j];
        return std::vector<double>(f.size(), c);
      },
      [&](auto& y) {
        double s = 0;
        for (double x : y) s += x;
        std::vector<double> out(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) out[j] = pi[j] * s;
        return out;
      });
}

struct NormRow {
  double delta;
  double norm_G;
  double norm_P;  // NaN when lambda > 0
};

struct NormReport {
  double lambda;
  int resolution;
  std::vector<NormRow> rows;
  double spread_G = 0, spread_P = 0;  // (max - min) / max over delta
};

inline NormReport norm_report(double lambda, const std::vector<double>& deltas, int resolution) {
  if (lambda == 0) throw Error(ErrorKind::critical_weight, "lambda = 0");
  NormReport r{lambda, resolution, {}, 0, 0};
  for (double d : deltas) {
    HalfLineGrid g(lambda, d, resolution);
    r.rows.push_back({d, norm_G(g), lambda < 0 ? norm_P(g) : std::nan("")});
  }
  auto spread = [&](auto field) {
    if (r.rows.empty()) return 0.0;
    double lo = field(r.rows[0]), hi = lo;
    for (auto& row : r.rows) {
      lo = std::min(lo, field(row));
      hi = std::max(hi, field(row));
    }
    return hi > 0 ? (hi - lo) / hi : 0.0;
  };
  r.spread_G = spread([](const NormRow& x) { return x.norm_G; });
  if (lambda < 0) r.spread_P = spread([](const NormRow& x) { return x.norm_P; });
  return r;
}

struct OperatorResiduals {
  double delta;
  double d_after_G;          // relative, sup norm for lambda > 0 and weighted norm for lambda < 0
  double P_idempotence;      // NaN when lambda > 0
  double G_against_constants;  // NaN when lambda > 0
};

/// Residuals of the operator identities on a fixed smooth probe scaled to delta.
inline OperatorResiduals operator_residuals(double lambda, double delta, int resolution) {
  if (lambda == 0) throw Error(ErrorKind::critical_weight, "lambda = 0");
  HalfLineGrid g(lambda, delta, resolution);
  auto probe = [&](double v) {
    double x = v / delta;
    return 1 + x * x + x * std::sin(3 * x);
  };
  BForm w{1, g.sample(probe)};
  auto gw = apply_G(g, w);
  auto dg = apply_d(g, gw);
  std::vector<double> err(w.values.size());
  for (std::size_t j = 0; j < err.size(); ++j) err[j] = dg.values[j] - w.values[j];
  OperatorResiduals r{delta, 0, std::nan(""), std::nan("")};
  if (lambda > 0) {
    double e = 0, m = 0;
    for (std::size_t j = 0; j < err.size(); ++j) {
      e = std::max(e, std::abs(err[j]));
      m = std::max(m, std::abs(w.values[j]));
    }
    r.d_after_G = e / m;
    return r;
  }
  r.d_after_G = form_norm(g, {1, err}) / form_norm(g, w);
  double c = apply_P(g, {0, g.sample(probe)});
  r.P_idempotence = std::abs(apply_P(g, {0, std::vector<double>(g.size(), c)}) - c);
  r.G_against_constants = std::abs(g.inner(gw.values, std::vector<double>(g.size(), 1.0))) / std::max(1.0, g.norm(gw.values));
  return r;
}

struct WeightShiftCheck {
  bool holds = false;
  double lhs = 0, rhs = 0;
};

/// P_lambda(f) <= (-2 lambda / (-2 lambda - 2)) P_{lambda+1}(f) for f >= 0 and lambda < -1; each side on its own grid.
inline WeightShiftCheck check_weight_shift_bound(const std::function<double(double)>& f, double lambda, double delta,
                                                 int resolution, double tol = 1e-8) {
  if (!(lambda < -1)) throw Error(ErrorKind::invalid_input, "lambda must be below -1");
  HalfLineGrid g(lambda, delta, resolution), g1(lambda + 1, delta, resolution);
  BForm fs{0, g.sample(f)}, fs1{0, g1.sample(f)};
  for (auto* s : {&fs, &fs1})
    for (double x : s->values)
      if (x < 0) throw Error(ErrorKind::invalid_input, "f must be nonnegative");
  WeightShiftCheck c;
  c.lhs = apply_P(g, fs);
  c.rhs = (-2 * lambda) / (-2 * lambda - 2) * apply_P(g1, fs1);
  c.holds = c.lhs <= c.rhs + tol * std::max(1.0, std::abs(c.rhs));
  return c;
}

}  // namespace fibercoh
