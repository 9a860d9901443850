#pragma once
#include <cstdint>
#include <memory>

#include "hamtube/hamtube.hpp"
#include "hamtube/random.hpp"
#include "hamtube/verify.hpp"

namespace hamtube {

struct Radii {
  double nu = 0.3, lambda = 0.3, eps = 0.3, a = 0.3, b = 0.3, g = 1.0;
};

struct SuiteCheck {
  std::string name;
  // residual from the source point and its image
  std::function<double(const ChartPoint&, const ChartPoint&)> fn;
};

struct SuiteAction {
  std::string name;
  // element k is drawn as exp of a random algebra vector
  std::function<ChartPoint(const Vec& k, const ChartPoint&)> on_src, on_dst;
  int dim = 0;
  double radius = 1.0;
};

struct Suite {
  std::string name;
  std::shared_ptr<GroupDescriptor> Gsrc, Gdst;
  Chart src, dst;
  std::vector<std::string> coord_names;  // chart x coordinates of the source
  std::function<ChartPoint(Rng&)> sample;
  MapFn map;
  FormFn model_form, target_form;
  std::function<Vec(const ChartPoint&)> model_momentum, target_momentum;
  std::vector<SuiteCheck> checks;
  std::vector<SuiteAction> actions;
  ChartPoint center, center_image;
  // residual of the derivative at the center, when the suite has one
  std::function<double()> linearization;
};

Suite simple_suite(std::shared_ptr<SimpleTube> tube, const Radii& r,
                   const Mat& hmu = Mat());
Suite restricted_suite(std::shared_ptr<RestrictedTube> tube, const Radii& r);
// use_tube0 maps through tube0 (requires alpha = 0)
Suite mgs_suite(std::shared_ptr<CotangentModel> model, const Radii& r,
                bool use_tube0, const std::string& name);
Suite so3r3_suite(std::shared_ptr<So3R3Model> model, const Radii& r);

// model two-forms in the suites' chart coordinates
Mat simple_model_form(const SimpleTube& T, const ChartPoint& p);
Mat restricted_model_form(const RestrictedTube& T, const ChartPoint& p);
Mat mgs_model_form(const CotangentModel& M, const ChartPoint& p);

// evaluates every check of the suite at `points` seeded samples, plus the
// center and linearization checks (point id -1)
Report run_suite(const Suite& s, int points, std::uint64_t seed,
                 const FDConfig& cfg, bool parallel = true);

// checks at one given point (used by sweeps); domain exits are recorded as
// skipped
std::vector<CheckRecord> check_point(const Suite& s, const ChartPoint& p,
                                     int id, const FDConfig& cfg,
                                     const std::vector<std::vector<Vec>>& action_samples);

}  // namespace hamtube
