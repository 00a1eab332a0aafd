#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsn/series.hpp"

namespace wsn::arima {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  bool operator==(const ArimaOrder&) const = default;
  std::string str() const;
};

struct FitConfig {
  int order_cap = 5;                // per-component cap on p, d, q
  double stability_margin = 1e-5;   // roots kept outside |z| = 1 by this much
  double simplex_ftol = 1e-10;
  double simplex_xtol = 1e-9;
  int simplex_max_iter = 2000;
};

// Fitted ARIMA(p,d,q) with the conditional-sum-of-squares convention:
// pre-sample residuals are zero and the intercept is the mean of the
// d-times differenced series.
struct ArimaModel {
  ArimaOrder order;
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // theta_1..theta_q
  double intercept = 0.0;
  double noise_variance = 0.0;
  std::int64_t fitted_on_length = 0;

  // Shape, finiteness, stationarity and invertibility checks.
  bool valid(double stability_margin = 0.0) const;

  bool operator==(const ArimaModel&) const = default;
};

struct Forecast {
  int horizon = 0;
  std::vector<double> point_values;
  std::int64_t origin_tick = 0;
};

// Minimum series length accepted by fit_arima for a given order.
std::size_t min_fit_length(const ArimaOrder& order);

// All roots of 1 - a_1 z - ... - a_k z^k strictly outside the unit circle
// (margin shrinks the acceptance region). Used for both the AR polynomial
// (stationarity) and, with negated coefficients, the MA polynomial
// (invertibility).
bool lag_polynomial_stable(std::span<const double> coeffs, double margin);

// Reflects any root of the lag polynomial that lies inside the unit circle
// to its reciprocal. Returns false when the repaired polynomial is still
// unstable (root too close to the circle).
bool reflect_roots_outside(std::vector<double>& coeffs, double margin);

// Fits by differencing d times, centering on the mean, Hannan-Rissanen
// initialization and conditional-sum-of-squares refinement with a
// Nelder-Mead simplex. Deterministic. Throws LengthError or FitError.
ArimaModel fit_arima(const Series& series, const ArimaOrder& order,
                     const FitConfig& config = {});

// Multi-step point forecast. Pure and deterministic: the AR and MA sums are
// evaluated in ascending lag order so two parties forecasting from identical
// inputs produce bit-identical values.
Forecast forecast(const ArimaModel& model, const Series& history, int horizon);

// Conditional sum of squares of the model on a centered, differenced series;
// exposed for tests and AIC computation.
double conditional_sum_of_squares(std::span<const double> centered,
                                  std::span<const double> ar,
                                  std::span<const double> ma);

// AIC of a fitted candidate: n_eff * ln(css/n_eff) + 2 * (p + q + 1).
double aic(const ArimaModel& model, const Series& series);

// Fits every candidate and returns the AIC-minimizing order; ties break by
// smallest p+q, then smallest p. Candidates that fail to fit are skipped;
// throws FitError when none fits.
ArimaOrder select_order(const Series& series,
                        std::span<const ArimaOrder> grid,
                        const FitConfig& config = {});

}  // namespace wsn::arima
