#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reskit/quantitative.hpp"
#include "reskit/reachability.hpp"
#include "reskit/resilience.hpp"

namespace reskit {

using Json = nlohmann::json;

// Documents carry a "generated_at" field; everything else is a function of the inputs.
struct DocumentHeader {
  std::string command;
  std::string system;
  std::vector<std::string> lost_labels;
  std::vector<int> lost;  // 0-based
};

Json check_document(const DocumentHeader& h, const ResilienceVerdict& v);

// `dims` is a 0-based pair used for the shadow and slice extents.
Json tube_document(const DocumentHeader& h, const ReachTube& tube, const std::vector<int>& dims);

// step,time,vertex_index,x,y for steps 1..N of the projection onto `dims`.
std::string tube_csv(const ReachTube& tube, const std::vector<int>& dims);
std::string tube_svg(const ReachTube& tube, const std::vector<int>& dims, const std::vector<std::string>& axis_labels);

struct OracleTimes {
  double dt = 0.0;
  double t_max = 0.0;
  std::optional<double> T_N;
  std::optional<double> T_M;
};

struct BoundsMeta {
  std::uint64_t seed = 0;
  int samples = 0;
};

Json bounds_document(const DocumentHeader& h, const BoundsReport& r, const BoundsMeta& meta,
                     const std::optional<OracleTimes>& oracle);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& M);  // row-major nested arrays

// ISO-8601 UTC.
std::string utc_timestamp();

// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace reskit
