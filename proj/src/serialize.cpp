#include "infobound/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace infobound {

namespace {

const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

Vector vector_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& arr = require_field(j, key, path);
  const std::string field = path + "." + key;
  if (!arr.is_array() || arr.empty()) throw SchemaError(field, "expected a nonempty array");
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw SchemaError(field + "[" + std::to_string(i) + "]", "expected a number");
    }
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

double require_number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string require_string(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require_field(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::shared_ptr<StatModel> model_from_json(const Json& j, const std::string& path) {
  const std::string family = require_string(j, "family", path);
  try {
    if (family == "gaussian_location") {
      const double sigma = require_number(j, "sigma", path);
      int dim = 1;
      if (j.contains("dim")) {
        if (!j["dim"].is_number_integer()) throw SchemaError(path + ".dim", "expected an integer");
        dim = j["dim"].get<int>();
      }
      return std::make_shared<GaussianLocation>(sigma, dim);
    }
    if (family == "bernoulli") {
      return std::make_shared<BernoulliModel>();
    }
    if (family == "twist") {
      const Vector f0 = vector_field(j, "f0", path);
      const Vector f1 = vector_field(j, "f1", path);
      return std::make_shared<TwistFamily>(f0, f1);
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path + ".family", "unknown model family '" + family + "'");
}

Json model_to_json(const StatModel& model) {
  if (const auto* g = dynamic_cast<const GaussianLocation*>(&model)) {
    return Json{{"family", "gaussian_location"}, {"sigma", g->sigma()}, {"dim", g->dim()}};
  }
  if (dynamic_cast<const BernoulliModel*>(&model) != nullptr) {
    return Json{{"family", "bernoulli"}};
  }
  if (const auto* t = dynamic_cast<const TwistFamily*>(&model)) {
    return Json{{"family", "twist"}, {"f0", to_json(t->f0())}, {"f1", to_json(t->f1())}};
  }
  if (const auto* tp = dynamic_cast<const TensorProductModel*>(&model)) {
    return Json{{"family", "tensor_product"},
                {"copies", tp->copies()},
                {"base", model_to_json(tp->base())}};
  }
  throw std::invalid_argument("model_to_json: unknown model type");
}

std::shared_ptr<Channel> channel_from_json(const Json& j, const std::string& path) {
  const std::string kind = require_string(j, "channel", path);
  try {
    if (kind == "awgn") {
      const double sn = require_number(j, "sigma_noise", path);
      int dim = 1;
      if (j.contains("dim")) {
        if (!j["dim"].is_number_integer()) throw SchemaError(path + ".dim", "expected an integer");
        dim = j["dim"].get<int>();
      }
      return std::make_shared<AwgnChannel>(sn, dim);
    }
    if (kind == "bsc") {
      return std::make_shared<DiscreteChannel>(bsc(require_number(j, "p", path)));
    }
    if (kind == "bec") {
      return std::make_shared<DiscreteChannel>(
          binary_erasure_channel(require_number(j, "epsilon", path)));
    }
    if (kind == "rr") {
      return std::make_shared<RandomizedResponseChannel>(require_number(j, "epsilon", path));
    }
    if (kind == "identity") {
      const Json& size = require_field(j, "size", path);
      if (!size.is_number_integer()) throw SchemaError(path + ".size", "expected an integer");
      return std::make_shared<DiscreteChannel>(identity_channel(size.get<int>()));
    }
    if (kind == "quantizer") {
      const Json& bits_field = require_field(j, "bits", path);
      if (!bits_field.is_number_integer()) {
        throw SchemaError(path + ".bits", "expected an integer");
      }
      const Vector range = vector_field(j, "range", path);
      if (range.size() != 2) {
        throw SchemaError(path + ".range", "expected [lo, hi]");
      }
      bool dither = false;
      if (j.contains("dither")) {
        if (!j["dither"].is_boolean()) {
          throw SchemaError(path + ".dither", "expected a boolean");
        }
        dither = j["dither"].get<bool>();
      }
      return std::make_shared<QuantizerChannel>(bits_field.get<int>(), range[0], range[1],
                                                dither);
    }
    if (kind == "matrix") {
      const Json& rows = require_field(j, "rows", path);
      if (!rows.is_array() || rows.empty()) {
        throw SchemaError(path + ".rows", "expected a nonempty array of rows");
      }
      const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
      if (ncols == 0) throw SchemaError(path + ".rows[0]", "expected a nonempty row");
      Matrix m(rows.size(), ncols);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string row_path = path + ".rows[" + std::to_string(i) + "]";
        if (!rows[i].is_array() || rows[i].size() != ncols) {
          throw SchemaError(row_path, "rows must all have the same length");
        }
        for (std::size_t k = 0; k < ncols; ++k) {
          if (!rows[i][k].is_number()) {
            throw SchemaError(row_path + "[" + std::to_string(k) + "]", "expected a number");
          }
          m(static_cast<int>(i), static_cast<int>(k)) = rows[i][k].get<double>();
        }
      }
      return std::make_shared<DiscreteChannel>(std::move(m));
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path + ".channel", "unknown channel kind '" + kind + "'");
}

Json channel_to_json(const Channel& channel) {
  if (const auto* rr = dynamic_cast<const RandomizedResponseChannel*>(&channel)) {
    return Json{{"channel", "rr"}, {"epsilon", rr->epsilon()}};
  }
  if (const auto* awgn = dynamic_cast<const AwgnChannel*>(&channel)) {
    return Json{{"channel", "awgn"}, {"sigma_noise", awgn->sigma_noise()}, {"dim", awgn->dim()}};
  }
  if (const auto* q = dynamic_cast<const QuantizerChannel*>(&channel)) {
    return Json{{"channel", "quantizer"},
                {"bits", q->bits()},
                {"range", Json::array({q->lo(), q->hi()})},
                {"dither", q->dithered()}};
  }
  if (const auto* dc = dynamic_cast<const DiscreteChannel*>(&channel)) {
    return Json{{"channel", "matrix"}, {"rows", to_json(dc->matrix())}};
  }
  throw std::invalid_argument("channel_to_json: unknown channel type");
}

Json to_json(const MIEstimate& estimate, const std::string& quantity) {
  return Json{{"quantity", quantity},
              {"value_nats", estimate.value},
              {"std_error", estimate.std_error},
              {"method", to_string(estimate.method)},
              {"n_samples", estimate.n_samples}};
}

Json to_json(const FisherMatrix& fisher) {
  return Json{{"theta", to_json(fisher.theta)},
              {"entries", to_json(fisher.entries)},
              {"trace", fisher.trace()},
              {"method", fisher.method}};
}

Json to_json(const BoundReport& report) {
  Json components = Json::object();
  for (const auto& [key, value] : report.components) components[key] = value;
  return Json{{"name", report.name},
              {"lhs", report.lhs},
              {"rhs", report.rhs},
              {"slack", report.slack},
              {"verdict", to_string(report.verdict)},
              {"uncertainty", report.uncertainty},
              {"components", components}};
}

Json to_json(const CapacityResult& result) {
  return Json{{"capacity_nats", result.capacity_nats},
              {"input_pmf", to_json(result.input_pmf)},
              {"iterations", result.iterations},
              {"gap", result.gap}};
}

Json to_json(const EstimationResult& result) {
  Json j{{"estimator", result.estimator},
         {"empirical_mse", result.empirical_mse},
         {"mse_std_error", result.mse_std_error},
         {"mean_estimate", to_json(result.mean_estimate)},
         {"n_trials", result.n_trials},
         {"mi_total_nats", result.mi_total_nats},
         {"mi_is_surrogate", result.mi_is_surrogate}};
  if (result.lower_bound) j["lower_bound"] = *result.lower_bound;
  if (result.closed_form_mse) j["closed_form_mse"] = *result.closed_form_mse;
  if (result.tightness_ratio) j["tightness_ratio"] = *result.tightness_ratio;
  return j;
}

Json to_json(const TightnessResult& result) {
  return Json{{"ratio_closed_form", result.ratio_closed_form},
              {"ratio_empirical", result.ratio_empirical},
              {"detail", to_json(result.detail)}};
}

std::string format_csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "name,param1,param2,lhs,rhs,slack,verdict\n";
  for (const SweepRow& row : rows) {
    out << row.name << ',' << format_csv_number(row.param1) << ','
        << format_csv_number(row.param2) << ',' << format_csv_number(row.report.lhs) << ','
        << format_csv_number(row.report.rhs) << ',' << format_csv_number(row.report.slack)
        << ',' << to_string(row.report.verdict) << '\n';
  }
}

void write_distributed_csv(std::ostream& out, const std::vector<DistributedRow>& rows) {
  out << "trial_group,n,sigma,sigma_noise,mi_total_nats,lower_bound,empirical_mse,ci,ratio\n";
  for (const DistributedRow& row : rows) {
    out << row.trial_group << ',' << row.n << ',' << format_csv_number(row.sigma) << ','
        << format_csv_number(row.sigma_noise) << ','
        << format_csv_number(row.result.mi_total_nats) << ',';
    if (row.result.lower_bound) out << format_csv_number(*row.result.lower_bound);
    out << ',' << format_csv_number(row.result.empirical_mse) << ','
        << format_csv_number(row.result.mse_std_error) << ',';
    if (row.result.tightness_ratio) out << format_csv_number(*row.result.tightness_ratio);
    out << '\n';
  }
}

}  // namespace infobound
