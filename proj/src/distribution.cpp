#include "linest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace linest {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

double laplace_b(double v) { return std::sqrt(v / 2.0); }

double uniform_moment(double a, int k) {
  if (k % 2 != 0) return 0.0;
  return std::pow(a, k) / static_cast<double>(k + 1);
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double DensityGrid::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * step;
}

DensityGrid DensityGrid::from_raw(double x_min, double step, std::vector<double> values) {
  if (step <= 0.0 || values.size() < 16)
    throw std::invalid_argument("DensityGrid::from_raw: need step > 0 and at least 16 points");
  double mx = *std::max_element(values.begin(), values.end());
  if (!(mx > 0.0)) throw std::invalid_argument("DensityGrid::from_raw: no positive values");
  const double eps_neg = 1e-9 * mx;
  double mn = *std::min_element(values.begin(), values.end());
  if (mn < -eps_neg)
    throw std::invalid_argument("DensityGrid::from_raw: genuinely negative density (min " +
                                format_value(mn) + ", clip threshold " + format_value(-eps_neg) + ")");
  for (double& v : values)
    if (v < 0.0) v = 0.0;
  double mass = 0.0;
  for (double v : values) mass += v;
  mass *= step;
  if (mass < 0.5 || mass > 1.5)
    throw std::invalid_argument("DensityGrid::from_raw: mass " + format_value(mass) +
                                " too far from 1 to normalize");
  for (double& v : values) v /= mass;
  DensityGrid g;
  g.x_min = x_min;
  g.step = step;
  g.values = std::move(values);
  return g;
}

double density(const Distribution& d, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return std::exp(-x * x / (2.0 * f.variance)) / std::sqrt(2.0 * kPi * f.variance);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          const double a = f.halfwidth;
          if (std::abs(std::abs(x) - a) <= 1e-9) return 0.25 / a;
          return std::abs(x) < a ? 0.5 / a : 0.0;
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double b = laplace_b(f.variance);
          return std::exp(-std::abs(x) / b) / (2.0 * b);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          const double a = f.halfwidth;
          const double t = 2.0 * a - std::abs(x);
          return t > 0.0 ? t / (4.0 * a * a) : 0.0;
        } else {
          const DensityGrid& g = f.grid;
          const double t = (x - g.x_min) / g.step;
          if (t < 0.0 || t > static_cast<double>(g.values.size() - 1)) return 0.0;
          const auto i = static_cast<std::size_t>(t);
          if (i + 1 >= g.values.size()) return g.values.back();
          const double w = t - static_cast<double>(i);
          return (1.0 - w) * g.values[i] + w * g.values[i + 1];
        }
      },
      d);
}

double variance(const Distribution& d) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return f.variance;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return f.halfwidth * f.halfwidth / 3.0;
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return f.variance;
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return 2.0 * f.halfwidth * f.halfwidth / 3.0;
        } else {
          const DensityGrid& g = f.grid;
          double m1 = 0.0, m2 = 0.0;
          for (std::size_t i = 0; i < g.values.size(); ++i) {
            const double x = g.x_at(i);
            m1 += x * g.values[i];
            m2 += x * x * g.values[i];
          }
          m1 *= g.step;
          m2 *= g.step;
          return m2 - m1 * m1;
        }
      },
      d);
}

double moment(const Distribution& d, int order) {
  if (order < 1) throw std::invalid_argument("moment: order must be >= 1");
  return std::visit(
      [order](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          if (order % 2 != 0) return 0.0;
          double r = 1.0;  // (order-1)!! * variance^(order/2)
          for (int j = 1; j < order; j += 2) r *= static_cast<double>(j);
          return r * std::pow(f.variance, order / 2);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return uniform_moment(f.halfwidth, order);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          if (order % 2 != 0) return 0.0;
          double r = 1.0;
          for (int j = 2; j <= order; ++j) r *= static_cast<double>(j);
          return r * std::pow(laplace_b(f.variance), order);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          if (order % 2 != 0) return 0.0;
          // moments of U + U' via the binomial expansion
          double s = 0.0;
          double c = 1.0;  // C(order, i)
          for (int i = 0; i <= order; ++i) {
            s += c * uniform_moment(f.halfwidth, i) * uniform_moment(f.halfwidth, order - i);
            c = c * static_cast<double>(order - i) / static_cast<double>(i + 1);
          }
          return s;
        } else {
          if (order > 12)
            throw std::runtime_error(
                "moment: order > 12 on a tabulated grid; tail truncation makes the "
                "quadrature unreliable");
          const DensityGrid& g = f.grid;
          double s = 0.0;
          for (std::size_t i = 0; i < g.values.size(); ++i)
            s += std::pow(g.x_at(i), order) * g.values[i];
          return s * g.step;
        }
      },
      d);
}

double support_halfwidth(const Distribution& d) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return f.halfwidth;
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return 2.0 * f.halfwidth;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          const DensityGrid& g = f.grid;
          return std::max(std::abs(g.x_min), std::abs(g.x_at(g.values.size() - 1)));
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      d);
}

double coverage_halfwidth(const Distribution& d, double tail) {
  if (!(tail > 0.0 && tail < 1.0))
    throw std::invalid_argument("coverage_halfwidth: tail must be in (0,1)");
  return std::visit(
      [tail](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          const double sigma = std::sqrt(f.variance);
          double lo = 0.0, hi = 60.0 * sigma;
          for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (std::erfc(mid / (sigma * std::sqrt(2.0))) > tail)
              lo = mid;
            else
              hi = mid;
          }
          return hi;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return f.halfwidth;
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return laplace_b(f.variance) * std::log(1.0 / tail);
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return std::min(2.0 * f.halfwidth, 2.0 * f.halfwidth * (1.0 - std::sqrt(tail)));
        } else {
          const DensityGrid& g = f.grid;
          double total = 0.0;
          for (double v : g.values) total += v;
          std::size_t lo = 0, hi = g.values.size() - 1;
          double outside = 0.0;
          while (lo < hi) {
            // peel the point farther from the origin first
            const bool left = std::abs(g.x_at(lo)) >= std::abs(g.x_at(hi));
            const double next = outside + (left ? g.values[lo] : g.values[hi]);
            if (next > tail * total) break;
            outside = next;
            if (left)
              ++lo;
            else
              --hi;
          }
          return std::max(std::abs(g.x_at(lo)), std::abs(g.x_at(hi)));
        }
      },
      d);
}

Distribution scaled(const Distribution& d, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  return std::visit(
      [factor](const auto& f) -> Distribution {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return Gaussian{f.variance * factor * factor};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return Uniform{f.halfwidth * factor};
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return Laplace{f.variance * factor * factor};
        } else if constexpr (std::is_same_v<T, Triangular>) {
          return Triangular{f.halfwidth * factor};
        } else {
          DensityGrid g = f.grid;
          g.x_min *= factor;
          g.step *= factor;
          for (double& v : g.values) v /= factor;
          return Tabulated{std::move(g)};
        }
      },
      d);
}

std::complex<double> char_value(const Distribution& d, double omega) {
  return std::visit(
      [omega](const auto& f) -> std::complex<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return {std::exp(-f.variance * omega * omega / 2.0), 0.0};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return {sinc(f.halfwidth * omega), 0.0};
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return {1.0 / (1.0 + f.variance * omega * omega / 2.0), 0.0};
        } else if constexpr (std::is_same_v<T, Triangular>) {
          const double s = sinc(f.halfwidth * omega);
          return {s * s, 0.0};
        } else {
          const DensityGrid& g = f.grid;
          double re = 0.0, im = 0.0;
          for (std::size_t i = 0; i < g.values.size(); ++i) {
            const double x = g.x_at(i);
            re += g.values[i] * std::cos(omega * x);
            im += g.values[i] * std::sin(omega * x);
          }
          return {re * g.step, im * g.step};
        }
      },
      d);
}

std::string family_name(const Distribution& d) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) return "gaussian";
        else if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        else if constexpr (std::is_same_v<T, Laplace>) return "laplace";
        else if constexpr (std::is_same_v<T, Triangular>) return "triangular";
        else return "tabulated";
      },
      d);
}

DensityGrid tabulate(const Distribution& d, double x_min, double step, std::size_t count) {
  if (step <= 0.0 || count < 16) throw std::invalid_argument("tabulate: bad grid");
  std::vector<double> vals(count);
  double mass = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    vals[i] = density(d, x_min + static_cast<double>(i) * step);
    mass += vals[i];
  }
  mass *= step;
  if (mass < 1.0 - 1e-6)
    throw std::runtime_error("tabulate: grid covers only " + format_value(mass) +
                             " of the mass (need >= 1 - 1e-6)");
  for (double& v : vals) v /= mass;
  DensityGrid g;
  g.x_min = x_min;
  g.step = step;
  g.values = std::move(vals);
  return g;
}

double default_extent(const Distribution& d) {
  const double sh = support_halfwidth(d);
  const double tail_term = std::isfinite(sh) ? sh : coverage_halfwidth(d, 1e-8);
  return 1.1 * std::max(6.0 * std::sqrt(variance(d)), tail_term);
}

DensityGrid default_tabulation(const Distribution& d, double step) {
  const long half = std::lround(default_extent(d) / step);
  const double x_min = -static_cast<double>(half) * step;
  return tabulate(d, x_min, step, static_cast<std::size_t>(2 * half + 1));
}

void write_csv(const DensityGrid& g, std::ostream& os) {
  os << "x,f\n";
  for (std::size_t i = 0; i < g.values.size(); ++i)
    os << format_value(g.x_at(i)) << ',' << format_value(g.values[i]) << '\n';
}

}  // namespace linest
