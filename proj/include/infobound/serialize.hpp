#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infobound/bounds.hpp"
#include "infobound/channels.hpp"
#include "infobound/distributed.hpp"
#include "infobound/fisher.hpp"
#include "infobound/info.hpp"
#include "infobound/models.hpp"

namespace infobound {

using Json = nlohmann::json;

// Raised when a JSON document fails validation; field_path() names the
// offending field ("model.sigma", "channel.rows[2]", ...).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path + ": " + message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

// Model descriptors:
//   {"family": "gaussian_location", "sigma": 1.0, "dim": 1}
//   {"family": "bernoulli"}
//   {"family": "twist", "f0": [...], "f1": [...]}
std::shared_ptr<StatModel> model_from_json(const Json& j, const std::string& path = "model");
Json model_to_json(const StatModel& model);

// Channel descriptors:
//   {"channel": "awgn", "sigma_noise": 1.0}
//   {"channel": "bsc", "p": 0.25}
//   {"channel": "bec", "epsilon": 0.3}
//   {"channel": "rr", "epsilon": 1.0}
//   {"channel": "quantizer", "bits": 1, "range": [-1.0, 1.0], "dither": false}
//   {"channel": "matrix", "rows": [[...], ...]}
std::shared_ptr<Channel> channel_from_json(const Json& j, const std::string& path = "channel");
Json channel_to_json(const Channel& channel);

Json to_json(const MIEstimate& estimate, const std::string& quantity);
Json to_json(const FisherMatrix& fisher);
Json to_json(const BoundReport& report);
Json to_json(const CapacityResult& result);
Json to_json(const EstimationResult& result);
Json to_json(const TightnessResult& result);

// Number formatted with 12 significant digits for CSV output.
std::string format_csv_number(double v);

// One row of a parameter sweep; param1/param2 identify the grid cell.
struct SweepRow {
  std::string name;
  double param1 = 0.0;
  double param2 = 0.0;
  BoundReport report;
};

// CSV with header name,param1,param2,lhs,rhs,slack,verdict.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// CSV row for distributed-estimation results, header
// trial_group,n,sigma,sigma_noise,mi_total_nats,lower_bound,empirical_mse,ci,ratio.
struct DistributedRow {
  std::string trial_group;
  int n = 0;
  double sigma = 0.0;
  double sigma_noise = 0.0;
  EstimationResult result;
};
void write_distributed_csv(std::ostream& out, const std::vector<DistributedRow>& rows);

// Helpers shared by JSON parsing code: fetch and type-check a field, throwing
// SchemaError with the full path on failure.
double require_number(const Json& j, const std::string& key, const std::string& path);
std::string require_string(const Json& j, const std::string& key, const std::string& path);

}  // namespace infobound
