#include "hamtube/verify.hpp"

#include <cmath>
#include <omp.h>

namespace hamtube {

double FDConfig::threshold(const std::string& check) const {
  auto it = thresholds.find(check);
  return it == thresholds.end() ? 1e-9 : it->second;
}

std::map<std::string, Report::Summary> Report::summary(
    const FDConfig& cfg) const {
  std::map<std::string, Summary> s;
  for (auto& r : records) {
    auto& e = s[r.check];
    e.threshold = cfg.threshold(r.check);
    if (r.skipped) {
      ++e.skipped;
      continue;
    }
    e.max_residual = std::max(e.max_residual, r.residual);
    if (r.pass)
      ++e.passed;
    else
      ++e.failed;
  }
  return s;
}

bool Report::all_pass() const {
  for (auto& r : records)
    if (!r.skipped && !r.pass) return false;
  return true;
}

double Report::max_residual(const std::string& check) const {
  double m = 0.0;
  for (auto& r : records)
    if (r.check == check && !r.skipped) m = std::max(m, r.residual);
  return m;
}

int Report::count(const std::string& check) const {
  int c = 0;
  for (auto& r : records)
    if (r.check == check && !r.skipped) ++c;
  return c;
}

void Report::append(const Report& o) {
  records.insert(records.end(), o.records.begin(), o.records.end());
}

nlohmann::json Report::to_json(const FDConfig& cfg) const {
  nlohmann::json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["points"] = points;
  auto& rs = j["records"] = nlohmann::json::array();
  for (auto& r : records) {
    nlohmann::json e = {{"point", r.point},
                        {"check", r.check},
                        {"residual", r.residual},
                        {"pass", r.pass}};
    if (r.skipped) e["skipped"] = true;
    if (!r.note.empty()) e["note"] = r.note;
    rs.push_back(e);
  }
  auto& sj = j["summary"] = nlohmann::json::object();
  for (auto& [k, v] : summary(cfg))
    sj[k] = {{"max_residual", v.max_residual},
             {"threshold", v.threshold},
             {"passed", v.passed},
             {"failed", v.failed},
             {"skipped", v.skipped}};
  j["all_pass"] = all_pass();
  return j;
}

Mat cotangent_form(const GroupDescriptor& G, const Vec& nu, int m) {
  const int n = G.dim();
  Mat W = Mat::Zero(2 * n + 2 * m, 2 * n + 2 * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      W(i, j) = nu.dot(G.bracket(Vec::Unit(n, i), Vec::Unit(n, j)));
    W(i, n + i) = 1.0;
    W(n + i, i) = -1.0;
  }
  for (int i = 0; i < m; ++i) {
    W(2 * n + i, 2 * n + m + i) = 1.0;
    W(2 * n + m + i, 2 * n + i) = -1.0;
  }
  return W;
}

Mat canonical_form(int d) {
  Mat W = Mat::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    W(i, d + i) = 1.0;
    W(d + i, i) = -1.0;
  }
  return W;
}

Mat fd_jacobian(const Chart& src, const Chart& dst, const MapFn& f,
                const ChartPoint& p, double step, ChartPoint* image) {
  const int ns = src.dim(), nd = dst.dim(), gs = src.dim_g(), gd = dst.dim_g();
  ChartPoint c = f(p);
  if (image) *image = c;
  Mat ci = gd ? Mat(c.g.inverse()) : Mat();
  Mat J(nd, ns);
  for (int k = 0; k < ns; ++k) {
    ChartPoint pp = p, pm = p;
    if (k < gs) {
      Vec e = Vec::Unit(gs, k);
      pp.g = p.g * src.G->exp(step * e);
      pm.g = p.g * src.G->exp(-step * e);
    } else {
      pp.x(k - gs) += step;
      pm.x(k - gs) -= step;
    }
    ChartPoint fp = f(pp), fm = f(pm);
    // exponential coordinates around the image keep left translations exact
    if (gd)
      J.col(k).head(gd) =
          dst.G->vee(logm(ci * fp.g) - logm(ci * fm.g)) / (2 * step);
    J.col(k).tail(dst.dim_x) = (fp.x - fm.x) / (2 * step);
  }
  return J;
}

double pullback_residual(const Chart& src, const Chart& dst, const MapFn& f,
                         const FormFn& model, const FormFn& target,
                         const ChartPoint& p, double step) {
  ChartPoint img;
  Mat J = fd_jacobian(src, dst, f, p, step, &img);
  Mat lhs = J.transpose() * target(img) * J;
  return max_abs(lhs - model(p));
}

double chart_distance(const ChartPoint& a, const ChartPoint& b) {
  double d = 0.0;
  if (a.g.size() && b.g.size()) d = max_abs(a.g - b.g);
  d = std::max(d, max_abs(a.x - b.x));
  return d;
}

void for_each_point(int n, bool parallel,
                    const std::function<void(int)>& body) {
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) body(i);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace hamtube
