#include "wsn/arima.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "wsn/error.hpp"

namespace wsn::arima {

namespace {

constexpr double kWallValue = 1e10;

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Solves A x = b for a small symmetric positive definite A (row-major),
// in place, via Cholesky. Returns false when not positive definite.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, int n) {
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        s -= l[static_cast<std::size_t>(i) * n + k] *
             l[static_cast<std::size_t>(j) * n + k];
      }
      if (i == j) {
        if (s <= 0.0) return false;
        l[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(i) * n + j] =
            s / l[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  // forward then backward substitution
  for (int i = 0; i < n; ++i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) {
      s -= l[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) {
      s -= l[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  return true;
}

// Yule-Walker AR(k) coefficients via Levinson-Durbin on sample
// autocovariances. The result is always a stationary polynomial.
std::vector<double> yule_walker(std::span<const double> z, int k) {
  const std::size_t n = z.size();
  std::vector<double> acov(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    double s = 0.0;
    for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) {
      s += z[t] * z[t - static_cast<std::size_t>(j)];
    }
    acov[static_cast<std::size_t>(j)] = s / static_cast<double>(n);
  }
  if (acov[0] <= 0.0) return std::vector<double>(static_cast<std::size_t>(k), 0.0);

  std::vector<double> phi(static_cast<std::size_t>(k), 0.0);
  std::vector<double> prev(static_cast<std::size_t>(k), 0.0);
  double err = acov[0];
  for (int m = 1; m <= k; ++m) {
    double num = acov[static_cast<std::size_t>(m)];
    for (int i = 1; i < m; ++i) {
      num -= phi[static_cast<std::size_t>(i - 1)] *
             acov[static_cast<std::size_t>(m - i)];
    }
    const double kappa = err > 0.0 ? num / err : 0.0;
    prev = phi;
    phi[static_cast<std::size_t>(m - 1)] = kappa;
    for (int i = 1; i < m; ++i) {
      phi[static_cast<std::size_t>(i - 1)] =
          prev[static_cast<std::size_t>(i - 1)] -
          kappa * prev[static_cast<std::size_t>(m - i - 1)];
    }
    err *= (1.0 - kappa * kappa);
    if (err <= 0.0) err = 1e-12;
  }
  return phi;
}

struct HrInit {
  std::vector<double> ar;
  std::vector<double> ma;
};

// Hannan-Rissanen two-stage initialization: residuals of a long
// autoregression stand in for the unobserved noise terms.
HrInit hannan_rissanen(std::span<const double> z, int p, int q) {
  const int m = static_cast<int>(z.size());
  HrInit init{std::vector<double>(static_cast<std::size_t>(p), 0.0),
              std::vector<double>(static_cast<std::size_t>(q), 0.0)};

  if (q == 0) {
    init.ar = yule_walker(z, p);
    return init;
  }

  int k = static_cast<int>(std::ceil(12.0 * std::pow(m / 100.0, 0.25)));
  k = std::max(k, p + q);
  k = std::min(k, m / 4);
  const int dim = p + q;
  // Need enough regression rows after losing k + q leading observations.
  if (k < 1 || m - k - q < dim + 5) return init;

  const std::vector<double> long_ar = yule_walker(z, k);
  std::vector<double> eps(z.size(), 0.0);
  for (int t = k; t < m; ++t) {
    double e = z[static_cast<std::size_t>(t)];
    for (int i = 1; i <= k; ++i) {
      e -= long_ar[static_cast<std::size_t>(i - 1)] *
           z[static_cast<std::size_t>(t - i)];
    }
    eps[static_cast<std::size_t>(t)] = e;
  }

  // Least squares of z_t on p lags of z and q lags of eps, t >= k + q.
  std::vector<double> xtx(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> xty(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> row(static_cast<std::size_t>(dim), 0.0);
  const int t0 = std::max(k + q, p);
  for (int t = t0; t < m; ++t) {
    for (int i = 0; i < p; ++i) {
      row[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(t - 1 - i)];
    }
    for (int j = 0; j < q; ++j) {
      row[static_cast<std::size_t>(p + j)] =
          eps[static_cast<std::size_t>(t - 1 - j)];
    }
    for (int a = 0; a < dim; ++a) {
      xty[static_cast<std::size_t>(a)] +=
          row[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(t)];
      for (int b = 0; b <= a; ++b) {
        xtx[static_cast<std::size_t>(a) * dim + b] +=
            row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
      }
    }
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      xtx[static_cast<std::size_t>(a) * dim + b] =
          xtx[static_cast<std::size_t>(b) * dim + a];
    }
    xtx[static_cast<std::size_t>(a) * dim + a] += 1e-10;
  }
  std::vector<double> beta = xty;
  if (!cholesky_solve(xtx, beta, dim)) return init;

  for (int i = 0; i < p; ++i) init.ar[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i)];
  for (int j = 0; j < q; ++j) init.ma[static_cast<std::size_t>(j)] = beta[static_cast<std::size_t>(p + j)];
  return init;
}

// Complex roots of 1 - a_1 z - ... - a_k z^k by Durand-Kerner iteration.
std::vector<std::complex<double>> lag_polynomial_roots(
    std::span<const double> coeffs) {
  // p(z) = 1 + sum_i (-a_i) z^i; drop numerically-zero leading terms.
  std::vector<std::complex<double>> poly;
  poly.emplace_back(1.0, 0.0);
  for (double a : coeffs) poly.emplace_back(-a, 0.0);
  while (poly.size() > 1 && std::abs(poly.back()) < 1e-14) poly.pop_back();
  const int deg = static_cast<int>(poly.size()) - 1;
  if (deg < 1) return {};

  auto eval = [&](std::complex<double> zv) {
    std::complex<double> acc = poly.back();
    for (int i = deg - 1; i >= 0; --i) {
      acc = acc * zv + poly[static_cast<std::size_t>(i)];
    }
    return acc;
  };

  std::vector<std::complex<double>> roots(static_cast<std::size_t>(deg));
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> cur(1.0, 0.0);
  for (auto& r : roots) {
    cur *= seed;
    r = cur;
  }
  const std::complex<double> lead = poly.back();
  for (int iter = 0; iter < 200; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < deg; ++i) {
      std::complex<double> denom = lead;
      for (int j = 0; j < deg; ++j) {
        if (j != i) denom *= (roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)]);
      }
      if (std::abs(denom) < 1e-30) continue;
      const std::complex<double> delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
      roots[static_cast<std::size_t>(i)] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-14) break;
  }
  return roots;
}

std::vector<double> lag_polynomial_from_roots(
    const std::vector<std::complex<double>>& roots) {
  // Product of (1 - z / r_i) keeps the constant term at exactly 1.
  std::vector<std::complex<double>> c;
  c.emplace_back(1.0, 0.0);
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1);
    const std::complex<double> inv = 1.0 / r;
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * inv;
    }
    c = std::move(next);
  }
  std::vector<double> coeffs(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) coeffs[i - 1] = -c[i].real();
  return coeffs;
}

struct Objective {
  std::span<const double> z;
  int p;
  int q;
  double margin;

  double operator()(std::span<const double> params) const {
    const std::span<const double> ar = params.subspan(0, static_cast<std::size_t>(p));
    const std::span<const double> ma = params.subspan(static_cast<std::size_t>(p));
    if (!lag_polynomial_stable(ar, margin)) return wall(params);
    std::vector<double> neg_ma(ma.size());
    for (std::size_t j = 0; j < ma.size(); ++j) neg_ma[j] = -ma[j];
    if (!lag_polynomial_stable(neg_ma, margin)) return wall(params);
    return conditional_sum_of_squares(z, ar, ma);
  }

  // Outside the stability region, slope back toward the origin so the
  // simplex cannot stall on a flat plateau.
  double wall(std::span<const double> params) const {
    double norm = 0.0;
    for (double v : params) norm += v * v;
    return kWallValue * (1.0 + norm);
  }
};

// Deterministic Nelder-Mead over n parameters.
std::vector<double> nelder_mead(const Objective& f, std::vector<double> x0,
                                const FitConfig& cfg) {
  const std::size_t n = x0.size();
  const std::size_t m = n + 1;
  std::vector<std::vector<double>> simplex(m, x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += std::max(0.1, 0.1 * std::abs(x0[i]));
  }
  std::vector<double> fv(m);
  for (std::size_t i = 0; i < m; ++i) fv[i] = f(simplex[i]);

  std::vector<std::size_t> idx(m);
  auto sort_simplex = [&] {
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };
  auto centroid_excl_worst = [&](std::vector<double>& c) {
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t k = 0; k < n; ++k) c[k] += simplex[idx[i]][k];
    }
    for (double& v : c) v /= static_cast<double>(n);
  };

  std::vector<double> cen(n), cand(n), cand2(n);
  for (int iter = 0; iter < cfg.simplex_max_iter; ++iter) {
    sort_simplex();
    const double fbest = fv[idx[0]];
    const double fworst = fv[idx[m - 1]];
    double spread = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      spread = std::max(spread,
                        std::abs(simplex[idx[0]][k] - simplex[idx[m - 1]][k]));
    }
    if (std::abs(fworst - fbest) <= cfg.simplex_ftol * (1.0 + std::abs(fbest)) &&
        spread <= cfg.simplex_xtol) {
      break;
    }
    centroid_excl_worst(cen);
    auto& worst = simplex[idx[m - 1]];

    for (std::size_t k = 0; k < n; ++k) cand[k] = cen[k] + (cen[k] - worst[k]);
    const double fr = f(cand);
    if (fr < fbest) {
      for (std::size_t k = 0; k < n; ++k) cand2[k] = cen[k] + 2.0 * (cen[k] - worst[k]);
      const double fe = f(cand2);
      if (fe < fr) {
        worst = cand2;
        fv[idx[m - 1]] = fe;
      } else {
        worst = cand;
        fv[idx[m - 1]] = fr;
      }
      continue;
    }
    if (fr < fv[idx[m - 2]]) {
      worst = cand;
      fv[idx[m - 1]] = fr;
      continue;
    }
    // contraction (outside when reflected point improved on the worst)
    if (fr < fv[idx[m - 1]]) {
      for (std::size_t k = 0; k < n; ++k) cand2[k] = cen[k] + 0.5 * (cand[k] - cen[k]);
    } else {
      for (std::size_t k = 0; k < n; ++k) cand2[k] = cen[k] + 0.5 * (worst[k] - cen[k]);
    }
    const double fc = f(cand2);
    if (fc < std::min(fr, fv[idx[m - 1]])) {
      worst = cand2;
      fv[idx[m - 1]] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i < m; ++i) {
      auto& v = simplex[idx[i]];
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = simplex[idx[0]][k] + 0.5 * (v[k] - simplex[idx[0]][k]);
      }
      fv[idx[i]] = f(v);
    }
  }
  sort_simplex();
  return simplex[idx[0]];
}

std::vector<double> center(std::span<const double> v, double mu) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mu;
  return out;
}

}  // namespace

std::string ArimaOrder::str() const {
  return "(" + std::to_string(p) + "," + std::to_string(d) + "," +
         std::to_string(q) + ")";
}

std::size_t min_fit_length(const ArimaOrder& order) {
  return static_cast<std::size_t>(
      std::max(30, 10 * (order.p + order.q) + order.d));
}

bool lag_polynomial_stable(std::span<const double> coeffs, double margin) {
  std::vector<double> a(coeffs.begin(), coeffs.end());
  while (!a.empty() && std::abs(a.back()) < 1e-14) a.pop_back();
  const double bound = 1.0 - margin;
  for (int j = static_cast<int>(a.size()); j >= 1; --j) {
    const double kappa = a[static_cast<std::size_t>(j - 1)];
    if (!std::isfinite(kappa) || std::abs(kappa) >= bound) return false;
    if (j == 1) break;
    const double denom = 1.0 - kappa * kappa;
    std::vector<double> b(static_cast<std::size_t>(j - 1));
    for (int i = 1; i < j; ++i) {
      b[static_cast<std::size_t>(i - 1)] =
          (a[static_cast<std::size_t>(i - 1)] +
           kappa * a[static_cast<std::size_t>(j - i - 1)]) /
          denom;
    }
    a = std::move(b);
  }
  return true;
}

bool reflect_roots_outside(std::vector<double>& coeffs, double margin) {
  if (lag_polynomial_stable(coeffs, margin)) return true;
  auto roots = lag_polynomial_roots(coeffs);
  if (roots.empty()) return false;
  const double push = 1.0 + std::max(margin * 10.0, 1e-4);
  for (auto& r : roots) {
    double mod = std::abs(r);
    if (mod < 1e-12) {
      r = std::complex<double>(push, 0.0);
      continue;
    }
    if (mod < 1.0) {
      r = r / (mod * mod);  // reciprocal reflection, keeps the angle
      mod = std::abs(r);
    }
    if (mod < push) r *= push / mod;
  }
  std::vector<double> repaired = lag_polynomial_from_roots(roots);
  if (repaired.size() < coeffs.size()) {
    repaired.resize(coeffs.size(), 0.0);
  }
  if (!lag_polynomial_stable(repaired, margin)) return false;
  coeffs = std::move(repaired);
  return true;
}

bool ArimaModel::valid(double stability_margin) const {
  if (order.p < 0 || order.d < 0 || order.q < 0) return false;
  if (ar.size() != static_cast<std::size_t>(order.p)) return false;
  if (ma.size() != static_cast<std::size_t>(order.q)) return false;
  if (!std::isfinite(intercept) || !std::isfinite(noise_variance)) return false;
  if (noise_variance < 0.0) return false;
  if (!all_finite(ar) || !all_finite(ma)) return false;
  if (!lag_polynomial_stable(ar, stability_margin)) return false;
  std::vector<double> neg_ma(ma.size());
  for (std::size_t j = 0; j < ma.size(); ++j) neg_ma[j] = -ma[j];
  return lag_polynomial_stable(neg_ma, stability_margin);
}

double conditional_sum_of_squares(std::span<const double> centered,
                                  std::span<const double> ar,
                                  std::span<const double> ma) {
  const int m = static_cast<int>(centered.size());
  const int p = static_cast<int>(ar.size());
  const int q = static_cast<int>(ma.size());
  std::vector<double> resid(centered.size(), 0.0);
  double css = 0.0;
  for (int t = p; t < m; ++t) {
    double e = centered[static_cast<std::size_t>(t)];
    for (int i = 1; i <= p; ++i) {
      e -= ar[static_cast<std::size_t>(i - 1)] *
           centered[static_cast<std::size_t>(t - i)];
    }
    for (int j = 1; j <= q && j <= t; ++j) {
      e -= ma[static_cast<std::size_t>(j - 1)] *
           resid[static_cast<std::size_t>(t - j)];
    }
    resid[static_cast<std::size_t>(t)] = e;
    css += e * e;
  }
  return css;
}

ArimaModel fit_arima(const Series& series, const ArimaOrder& order,
                     const FitConfig& config) {
  if (order.p < 0 || order.d < 0 || order.q < 0 ||
      order.p > config.order_cap || order.d > config.order_cap ||
      order.q > config.order_cap) {
    throw ValidationError("fit_arima: order " + order.str() + " out of range");
  }
  if (series.values.size() < min_fit_length(order)) {
    throw LengthError("fit_arima: need at least " +
                      std::to_string(min_fit_length(order)) +
                      " values for order " + order.str() + ", got " +
                      std::to_string(series.values.size()));
  }
  if (!all_finite(series.values)) {
    throw ValidationError("fit_arima: series contains non-finite values");
  }

  const Series diffed = order.d > 0 ? difference(series, order.d) : series;
  const double mu = mean_of(diffed.values);
  const std::vector<double> z = center(diffed.values, mu);
  const int m = static_cast<int>(z.size());

  ArimaModel model;
  model.order = order;
  model.intercept = mu;
  model.fitted_on_length = static_cast<std::int64_t>(series.values.size());

  if (order.p == 0 && order.q == 0) {
    double css = 0.0;
    for (double v : z) css += v * v;
    model.noise_variance = css / static_cast<double>(m);
    return model;
  }

  HrInit init = hannan_rissanen(z, order.p, order.q);
  std::vector<double> neg_ma(init.ma.size());
  for (std::size_t j = 0; j < init.ma.size(); ++j) neg_ma[j] = -init.ma[j];
  if (!reflect_roots_outside(init.ar, config.stability_margin)) {
    std::fill(init.ar.begin(), init.ar.end(), 0.0);
  }
  if (!reflect_roots_outside(neg_ma, config.stability_margin)) {
    std::fill(neg_ma.begin(), neg_ma.end(), 0.0);
  }
  for (std::size_t j = 0; j < init.ma.size(); ++j) init.ma[j] = -neg_ma[j];

  std::vector<double> params;
  params.insert(params.end(), init.ar.begin(), init.ar.end());
  params.insert(params.end(), init.ma.begin(), init.ma.end());

  const Objective obj{z, order.p, order.q, config.stability_margin};
  params = nelder_mead(obj, std::move(params), config);

  model.ar.assign(params.begin(), params.begin() + order.p);
  model.ma.assign(params.begin() + order.p, params.end());

  if (!reflect_roots_outside(model.ar, config.stability_margin)) {
    throw FitError("fit_arima: AR polynomial not stationary after repair for " +
                   order.str());
  }
  std::vector<double> final_neg_ma(model.ma.size());
  for (std::size_t j = 0; j < model.ma.size(); ++j) final_neg_ma[j] = -model.ma[j];
  if (!reflect_roots_outside(final_neg_ma, config.stability_margin)) {
    throw FitError("fit_arima: MA polynomial not invertible after repair for " +
                   order.str());
  }
  for (std::size_t j = 0; j < model.ma.size(); ++j) model.ma[j] = -final_neg_ma[j];

  const double css = conditional_sum_of_squares(z, model.ar, model.ma);
  const int n_eff = m - order.p;
  model.noise_variance = n_eff > 0 ? css / static_cast<double>(n_eff) : 0.0;
  if (!model.valid()) {
    throw FitError("fit_arima: fitted model failed validation for " + order.str());
  }
  return model;
}

Forecast forecast(const ArimaModel& model, const Series& history, int horizon) {
  if (horizon < 1) throw ValidationError("forecast: horizon must be >= 1");
  const int p = model.order.p;
  const int d = model.order.d;
  const int q = model.order.q;
  if (history.values.size() < static_cast<std::size_t>(p + d)) {
    throw LengthError("forecast: history of length " +
                      std::to_string(history.values.size()) +
                      " too short for order " + model.order.str());
  }

  // Difference level by level, remembering each level's last value for the
  // integration pass.
  std::vector<double> tails(static_cast<std::size_t>(d));
  std::vector<double> lvl = history.values;
  for (int k = 0; k < d; ++k) {
    tails[static_cast<std::size_t>(k)] = lvl.back();
    std::vector<double> next(lvl.size() - 1);
    for (std::size_t i = 0; i + 1 < lvl.size(); ++i) next[i] = lvl[i + 1] - lvl[i];
    lvl = std::move(next);
  }

  const std::vector<double> z = center(lvl, model.intercept);
  const int m = static_cast<int>(z.size());

  // Residuals under the zero pre-sample convention.
  std::vector<double> resid(z.size(), 0.0);
  for (int t = p; t < m; ++t) {
    double e = z[static_cast<std::size_t>(t)];
    for (int i = 1; i <= p; ++i) {
      e -= model.ar[static_cast<std::size_t>(i - 1)] *
           z[static_cast<std::size_t>(t - i)];
    }
    for (int j = 1; j <= q && j <= t; ++j) {
      e -= model.ma[static_cast<std::size_t>(j - 1)] *
           resid[static_cast<std::size_t>(t - j)];
    }
    resid[static_cast<std::size_t>(t)] = e;
  }

  // Point forecasts on the centered differenced scale; future residuals are
  // zero, summation in ascending lag order.
  std::vector<double> fc(static_cast<std::size_t>(horizon), 0.0);
  for (int h = 1; h <= horizon; ++h) {
    double acc = 0.0;
    for (int i = 1; i <= p; ++i) {
      const int idx = m + h - 1 - i;
      const double zi = idx < m ? z[static_cast<std::size_t>(idx)]
                                : fc[static_cast<std::size_t>(idx - m)];
      acc += model.ar[static_cast<std::size_t>(i - 1)] * zi;
    }
    for (int j = 1; j <= q; ++j) {
      const int idx = m + h - 1 - j;
      if (idx < m && idx >= 0) {
        acc += model.ma[static_cast<std::size_t>(j - 1)] *
               resid[static_cast<std::size_t>(idx)];
      }
    }
    fc[static_cast<std::size_t>(h - 1)] = acc;
  }
  for (double& v : fc) v += model.intercept;

  // Undo the differencing.
  for (int k = d - 1; k >= 0; --k) {
    double run = tails[static_cast<std::size_t>(k)];
    for (double& v : fc) {
      run += v;
      v = run;
    }
  }

  Forecast out;
  out.horizon = horizon;
  out.point_values = std::move(fc);
  out.origin_tick =
      history.start_tick + static_cast<std::int64_t>(history.values.size()) - 1;
  return out;
}

double aic(const ArimaModel& model, const Series& series) {
  const Series diffed = model.order.d > 0 ? difference(series, model.order.d) : series;
  const std::vector<double> z = center(diffed.values, model.intercept);
  const double css = conditional_sum_of_squares(z, model.ar, model.ma);
  const int n_eff = static_cast<int>(z.size()) - model.order.p;
  if (n_eff <= 0) return std::numeric_limits<double>::infinity();
  const double ratio = std::max(css / static_cast<double>(n_eff), 1e-300);
  return static_cast<double>(n_eff) * std::log(ratio) +
         2.0 * static_cast<double>(model.order.p + model.order.q + 1);
}

ArimaOrder select_order(const Series& series, std::span<const ArimaOrder> grid,
                        const FitConfig& config) {
  if (grid.empty()) throw ValidationError("select_order: empty candidate grid");
  bool have_best = false;
  ArimaOrder best{};
  double best_aic = 0.0;
  std::string failures;
  for (const ArimaOrder& cand : grid) {
    double score;
    try {
      const ArimaModel model = fit_arima(series, cand, config);
      score = aic(model, series);
    } catch (const Error& e) {
      failures += std::string(failures.empty() ? "" : "; ") + e.what();
      continue;
    }
    const bool better =
        !have_best || score < best_aic ||
        (score == best_aic && (cand.p + cand.q < best.p + best.q ||
                               (cand.p + cand.q == best.p + best.q &&
                                cand.p < best.p)));
    if (better) {
      have_best = true;
      best = cand;
      best_aic = score;
    }
  }
  if (!have_best) {
    throw FitError("select_order: no candidate could be fitted (" + failures + ")");
  }
  return best;
}

}  // namespace wsn::arima
