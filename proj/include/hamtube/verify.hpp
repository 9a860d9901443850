#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamtube/lie.hpp"

namespace hamtube {

// point of a product chart G x R^k; G may be absent (g empty)
struct ChartPoint {
  Mat g;
  Vec x;
};

struct Chart {
  const GroupDescriptor* G = nullptr;
  int dim_x = 0;
  int dim_g() const { return G ? G->dim() : 0; }
  int dim() const { return dim_g() + dim_x; }
};

using MapFn = std::function<ChartPoint(const ChartPoint&)>;
// antisymmetric matrix of a two-form in the chart's tangent basis
// (left-trivialized group directions first)
using FormFn = std::function<Mat(const ChartPoint&)>;

struct FDConfig {
  double step = 1e-5;
  std::map<std::string, double> thresholds = {
      {"pullback", 1e-6},       {"equivariance", 1e-10},
      {"momentum", 1e-9},       {"linearization", 1e-7},
      {"restricted_eps", 1e-10}, {"membership", 1e-10},
      {"hmu_momentum", 1e-9},   {"center", 1e-12},
      {"roundtrip", 1e-8},      {"direct_vs_tube", 1e-10},
      {"qxp", 1e-10}};
  double threshold(const std::string& check) const;
};

struct CheckRecord {
  int point = 0;
  std::string check;
  double residual = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<CheckRecord> records;

  struct Summary {
    double max_residual = 0.0;
    double threshold = 0.0;
    int passed = 0, failed = 0, skipped = 0;
  };
  std::map<std::string, Summary> summary(const FDConfig& cfg) const;
  bool all_pass() const;
  double max_residual(const std::string& check) const;
  int count(const std::string& check) const;
  void append(const Report& other);
  nlohmann::json to_json(const FDConfig& cfg) const;
};

// T*G x T*S in coordinates (xi; nu, a, b), dim a = dim b = m:
// <nu2', xi1> - <nu1', xi2> + <nu, [xi1, xi2]> + <b2', a1'> - <b1', a2'>
Mat cotangent_form(const GroupDescriptor& G, const Vec& nu, int m);
// dQ ^ dP on R^d x R^d
Mat canonical_form(int d);

// central-difference Jacobian of a chart map; group directions are moved
// with g exp(t e_i) and read back as vee(log(g0^-1 g))
Mat fd_jacobian(const Chart& src, const Chart& dst, const MapFn& f,
                const ChartPoint& p, double step, ChartPoint* image = nullptr);

// max |omega_dst(J u_i, J u_j) - omega_model(u_i, u_j)|
double pullback_residual(const Chart& src, const Chart& dst, const MapFn& f,
                         const FormFn& model, const FormFn& target,
                         const ChartPoint& p, double step);

// max-abs distance between chart points
double chart_distance(const ChartPoint& a, const ChartPoint& b);

// loop over points, optionally with OpenMP; records land at their index so
// output order does not depend on scheduling
void for_each_point(int n, bool parallel, const std::function<void(int)>& body);

int thread_count();

}  // namespace hamtube
