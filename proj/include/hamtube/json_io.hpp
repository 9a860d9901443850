#pragma once
#include <memory>
#include <string>

#include "hamtube/suites.hpp"

namespace hamtube {

using json = nlohmann::json;

// reads a file; SchemaError when unreadable or not JSON
json load_json(const std::string& path);

// square or rectangular matrix written as a list of rows
Mat rows_from_json(const json& j);
json rows_to_json(const Mat& M);

// built-in defaults of a suite merged with the user's keys
json default_config(const std::string& suite);
json merged_config(const std::string& suite, const json& user);

GroupDescriptor group_from_config(const json& cfg);
Vec mu_from_config(const GroupDescriptor& G, const json& cfg);
// h from "h" (list of algebra vectors) or "xi_h" (one vector); may be empty
Mat h_from_config(const GroupDescriptor& G, const json& cfg);
Representation rep_from_config(const GroupDescriptor& G, const Mat& h,
                               const json& cfg);
Strategy strategy_from_config(const json& cfg);
Radii radii_from_config(const json& cfg);
FDConfig fd_from_config(const json& cfg);

std::shared_ptr<SimpleTube> simple_from_config(const json& cfg);
// h_mu used by the simple suite's twisted equivariance check
Mat simple_hmu_from_config(const SimpleTube& T, const json& cfg);
AdaptedSplitting splitting_from_config(const json& cfg);
std::shared_ptr<RestrictedTube> restricted_from_config(const json& cfg);
std::shared_ptr<CotangentModel> model_from_config(const json& cfg);
std::shared_ptr<So3R3Model> so3r3_from_config(const json& cfg);

// suite is one of simple, restricted, tube0, general, so3r3; cfg is the
// already merged config
Suite suite_from_config(const std::string& suite, const json& cfg);

json report_point(const ChartPoint& p);

}  // namespace hamtube
