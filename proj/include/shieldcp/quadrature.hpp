#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration over finite intervals,
// with a rational map for [0, inf).  The integrand may return a scalar or a
// fixed-size array; for arrays, component 0 drives adaptivity and the error
// estimate while the remaining components are integrated alongside it on
// the same subdivision.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace shieldcp::quad {

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_subdivisions = 500;
};

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;         // estimate for component 0
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

template <class T>
struct is_std_array : std::false_type {};
template <std::size_t N>
struct is_std_array<std::array<double, N>> : std::true_type {};

template <class T>
concept Value = std::is_same_v<T, double> || is_std_array<T>::value;

template <class T>
constexpr T zero() {
  if constexpr (std::is_same_v<T, double>) {
    return 0.0;
  } else {
    T t{};
    t.fill(0.0);
    return t;
  }
}

template <class T>
double head(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return v[0];
  }
}

template <class T>
void axpy(T& acc, double w, const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    acc += w * v;
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
  }
}

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class T, class F>
Panel<T> kronrod15(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<T, 15> fv;
  fv[0] = f(center);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    fv[2 * i - 1] = f(center - half * xk[i]);
    fv[2 * i] = f(center + half * xk[i]);
  }

  T kron = zero<T>();
  double gauss = 0.0;
  double resabs = 0.0;
  axpy(kron, wk[0], fv[0]);
  gauss += wg[0] * head(fv[0]);
  resabs += wk[0] * std::abs(head(fv[0]));
  for (std::size_t i = 1; i < xk.size(); ++i) {
    axpy(kron, wk[i], fv[2 * i - 1]);
    axpy(kron, wk[i], fv[2 * i]);
    const double pair = head(fv[2 * i - 1]) + head(fv[2 * i]);
    resabs += wk[i] * (std::abs(head(fv[2 * i - 1])) + std::abs(head(fv[2 * i])));
    if (i % 2 == 0) gauss += wg[i / 2] * pair;
  }
  const double mean = 0.5 * head(kron);
  double resasc = wk[0] * std::abs(head(fv[0]) - mean);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    resasc += wk[i] * (std::abs(head(fv[2 * i - 1]) - mean) + std::abs(head(fv[2 * i]) - mean));
  }

  double err = std::abs((head(kron) - gauss) * half);
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

  T value = zero<T>();
  axpy(value, half, kron);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over the union of consecutive intervals given by `breaks`
/// (at least two ascending points).  Never evaluates f at a break point.
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const Options& opt)
    -> Estimate<std::invoke_result_t<F&, double>> {
  using T = std::invoke_result_t<F&, double>;
  static_assert(detail::Value<T>, "integrand must return double or std::array<double, N>");
  if (breaks.size() < 2) throw std::invalid_argument("integrate: need at least two break points");

  using Panel = detail::Panel<T>;
  auto by_error = [](const Panel& l, const Panel& r) { return l.error < r.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(by_error)> heap(by_error);

  Estimate<T> out;
  double total_err = 0.0;
  double total_head = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] >= breaks[i])) throw std::invalid_argument("integrate: break points must ascend");
    if (breaks[i + 1] == breaks[i]) continue;
    auto p = detail::kronrod15<T>(f, breaks[i], breaks[i + 1]);
    out.evaluations += 15;
    total_err += p.error;
    total_head += detail::head(p.value);
    heap.push(std::move(p));
  }

  std::size_t panels = heap.size();
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total_head)); };
  while (!heap.empty() && total_err > tolerance() && panels < opt.max_subdivisions) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
    heap.pop();
    auto left = detail::kronrod15<T>(f, worst.a, mid);
    auto right = detail::kronrod15<T>(f, mid, worst.b);
    out.evaluations += 30;
    total_err += left.error + right.error - worst.error;
    total_head += detail::head(left.value) + detail::head(right.value) - detail::head(worst.value);
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++panels;
  }

  // Re-sum in position order so the result does not depend on heap history.
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  out.value = detail::zero<T>();
  out.error = 0.0;
  for (const auto& p : all) {
    detail::axpy(out.value, 1.0, p.value);
    out.error += p.error;
  }
  out.converged = out.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(detail::head(out.value)));
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt) {
  const std::array<double, 2> breaks{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(breaks), opt);
}

/// Integrates f over [lower, inf) through x = lower + scale * t / (1 - t).
/// `scale` should sit near where the integrand changes character.
template <class F>
auto integrate_semi_infinite(F&& f, double lower, double scale, const Options& opt) {
  if (!(scale > 0.0)) throw std::invalid_argument("integrate_semi_infinite: scale must be positive");
  using T = std::invoke_result_t<F&, double>;
  auto mapped = [&](double t) -> T {
    const double one_minus = 1.0 - t;
    const double x = lower + scale * t / one_minus;
    const double jac = scale / (one_minus * one_minus);
    T v = f(x);
    if constexpr (std::is_same_v<T, double>) {
      return v == 0.0 ? 0.0 : v * jac;
    } else {
      for (auto& c : v) c = (c == 0.0) ? 0.0 : c * jac;
      return v;
    }
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

/// Thrown when an adaptive integral stops short of its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

}  // namespace shieldcp::quad
