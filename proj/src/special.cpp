#include "hamtube/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hamtube/errors.hpp"

namespace hamtube {

namespace {

// (e^{-y} - 1 + y)/y^2
double psi(double y) {
  if (std::abs(y) < 0.5) {
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= -y / double(k + 2);
      sum += term;
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  return (std::expm1(-y) + y) / (y * y);
}

// (1 - e^{-y})/y
double phi1(double y) {
  if (std::abs(y) < 1e-8) return 1.0 - y / 2.0;
  return -std::expm1(-y) / y;
}

}  // namespace

double E_identity_residual(double x, double E) {
  double t = x * E;
  return std::abs(std::exp(-t) - 1.0 + t - 0.5 * x * x);
}

double eval_E(double x, const ScalarSolveConfig& cfg) {
  if (x == 0.0) return 1.0;
  if (!std::isfinite(x)) throw DomainExit("E: non-finite argument");
  if (x < -2.0) {
    // w = -x E solves e^w - 1 - w = x^2/2; Newton in u crawls here because
    // g grows like e^{|x| u}, while this map contracts by 1/(1 + w + x^2/2)
    const double c = 0.5 * x * x;
    double w = std::log1p(c);
    for (int it = 0; it < cfg.max_iter; ++it) {
      double next = std::log1p(w + c);
      if (std::abs(next - w) <= 1e-16 * next) return next / -x;
      w = next;
    }
    return w / -x;
  }
  // g(u) = u^2 psi(x u) - 1/2 is increasing on u > 0 with g(0) = -1/2
  auto g = [&](double u) { return u * u * psi(x * u) - 0.5; };
  auto dg = [&](double u) { return u * phi1(x * u); };
  double lo = 0.0, hi = 2.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw ConvergenceError("E: bracket growth failed");
  }
  // the stopping rule is absolute, so finish with plain Newton steps to get
  // the last few ulps
  auto polish = [&](double v) {
    for (int k = 0; k < 3; ++k) {
      double w = v - g(v) / dg(v);
      if (!(w > 0.0) || std::abs(w - v) > 1e-12 * std::max(1.0, v)) break;
      if (w == v) break;
      v = w;
    }
    return v;
  };
  double u = std::clamp(1.0, lo, hi);
  if (u <= lo || u >= hi) u = 0.5 * (lo + hi);
  for (int it = 0; it < cfg.max_iter; ++it) {
    double gu = g(u);
    if (gu < 0)
      lo = u;
    else
      hi = u;
    double step = gu / dg(u);
    double next = u - step;
    if (!(next > lo && next < hi)) {
      if (!cfg.bracket_fallback)
        throw ConvergenceError("E: Newton left the bracket");
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - u) <= cfg.tol * std::max(1.0, u)) return polish(next);
    u = next;
    if (hi - lo <= cfg.tol * std::max(1.0, u)) return polish(u);
  }
  std::ostringstream os;
  os << "E: no convergence at x=" << x << " (bracket " << lo << ", " << hi
     << ")";
  throw ConvergenceError(os.str());
}

double eval_F(double x) {
  if (!(x <= 1.0)) throw DomainExit("F: argument above 1");
  if (std::abs(x) < 1e-8) return 1.0 + x / 6.0 + 3.0 * x * x / 40.0;
  if (x == 1.0) return std::numbers::pi / 2.0;
  if (x > 0) {
    double s = std::sqrt(x);
    return std::asin(s) / s;
  }
  double s = std::sqrt(-x);
  return std::asinh(s) / s;
}

namespace {

struct Probe {
  Vec dir;
  double denom;  // <mu, [lambda, dir]>
};

Probe make_probe(const GroupDescriptor& G, const Vec& mu, const Mat& q,
                 const Vec& lambda) {
  Vec lh = lambda.normalized();
  int best = 0;
  double bestn = -1;
  for (int k = 0; k < q.cols(); ++k) {
    Vec c = q.col(k);
    double r = (c - lh * lh.dot(c)).norm() / c.norm();
    if (r > bestn) {
      bestn = r;
      best = k;
    }
  }
  Probe p{q.col(best), 0.0};
  p.denom = mu.dot(G.bracket(lambda, p.dir));
  double scale = mu.norm() * lambda.norm() * p.dir.norm();
  if (!(std::abs(p.denom) > 1e-13 * scale) || scale == 0.0)
    throw PreconditionError("solve_m1: probe direction is degenerate");
  return p;
}

}  // namespace

double m1_balance(const GroupDescriptor& G, const Vec& mu, const Mat& q,
                  const Vec& nu, const Vec& lambda) {
  Probe p = make_probe(G, mu, q, lambda);
  double num = (mu + nu).dot(G.dexp_right_minus_id(lambda, p.dir)) +
               nu.dot(p.dir);
  return num / p.denom;
}

double solve_m1(const GroupDescriptor& G, const Vec& mu, const Mat& q,
                const Vec& nu, const Vec& lambda,
                const ScalarSolveConfig& cfg) {
  if (q.cols() != 2)
    throw PreconditionError("generic tube needs dim q = 2");
  if (lambda.norm() == 0.0) return 1.0;
  Probe p = make_probe(G, mu, q, lambda);
  // f(m) = h(m lambda) m^2 - 1/2, written so that m -> 0 is regular
  auto f = [&](double m) {
    if (m == 0.0) return -0.5;
    Vec lm = m * lambda;
    double num =
        (mu + nu).dot(G.dexp_right_minus_id(lm, p.dir)) + nu.dot(p.dir);
    return m * num / p.denom - 0.5;
  };
  double lo = 0.0, flo = -0.5, hi = -1.0;
  for (double m = 0.02; m <= 4.0 + 1e-12; m += 0.02) {
    double fm = f(m);
    if (fm >= 0.0) {
      hi = m;
      break;
    }
    lo = m;
    flo = fm;
  }
  if (hi < 0.0) {
    for (double m = 6.0; m <= 1e3; m *= 1.5) {
      double fm = f(m);
      if (fm >= 0.0) {
        hi = m;
        break;
      }
      lo = m;
      flo = fm;
    }
  }
  if (hi < 0.0)
    throw DomainExit("solve_m1: no root of the scaling equation");
  double fhi = f(hi);
  // Illinois false position, bisection if it stalls
  int side = 0;
  for (int it = 0; it < 4 * cfg.max_iter; ++it) {
    double m = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
    double fm = f(m);
    if (fm == 0.0) return m;
    if (fm < 0) {
      lo = m;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = m;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4e-16 * hi || hi - lo <= cfg.tol * 1e-2)
      return 0.5 * (lo + hi);
  }
  throw ConvergenceError("solve_m1: root refinement did not converge");
}

}  // namespace hamtube
