#include "chaplygin/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chaplygin/errors.hpp"
#include "chaplygin/geometry.hpp"

namespace chaplygin {

namespace {

using nlohmann::ordered_json;

void require_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw Error(ErrorCode::ConfigError, "unknown key \"" + item.key() + "\" in " + where);
  }
  for (const auto& key : required) {
    if (!obj.contains(key))
      throw Error(ErrorCode::ConfigError, "missing key \"" + key + "\" in " + where);
  }
}

double as_number(const ordered_json& j, const std::string& key) {
  if (!j.at(key).is_number())
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

int as_int(const ordered_json& j, const std::string& key) {
  if (!j.at(key).is_number_integer())
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

std::vector<double> as_number_list(const ordered_json& j, const std::string& key) {
  if (!j.at(key).is_array())
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number())
      throw Error(ErrorCode::ConfigError, "key \"" + key + "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ProblemConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config root must be an object");

  require_keys(j,
               {"sigma1", "sigma2", "v3inf", "chaplygin_A", "mu_schedule", "eps_schedule",
                "newton", "grid"},
               {"sigma1", "sigma2", "v3inf", "chaplygin_A", "mu_schedule", "eps_schedule",
                "newton", "grid"},
               "config");

  ProblemConfig c;
  c.sigma1 = as_number(j, "sigma1");
  c.sigma2 = as_number(j, "sigma2");
  c.v3inf = as_number(j, "v3inf");
  c.chaplygin_A = as_number(j, "chaplygin_A");
  c.mu_schedule = as_number_list(j, "mu_schedule");
  c.eps_schedule = as_number_list(j, "eps_schedule");

  const auto& n = j.at("newton");
  if (!n.is_object()) throw Error(ErrorCode::ConfigError, "\"newton\" must be an object");
  require_keys(n, {"tol", "max_iter", "max_backtracks"}, {"tol", "max_iter", "max_backtracks"},
               "newton");
  c.newton.tol = as_number(n, "tol");
  c.newton.max_iter = as_int(n, "max_iter");
  c.newton.max_backtracks = as_int(n, "max_backtracks");

  const auto& g = j.at("grid");
  if (!g.is_object()) throw Error(ErrorCode::ConfigError, "\"grid\" must be an object");
  require_keys(g, {"n_u", "n_v"}, {"n_u", "n_v"}, "grid");
  c.grid.n_u = as_int(g, "n_u");
  c.grid.n_v = as_int(g, "n_v");

  validate_config(c);
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ProblemConfig& c) {
  if (!(c.v3inf > 1.0))
    throw Error(ErrorCode::NonSupersonic, "v3inf must exceed 1 (supersonic freestream)");
  const double sigma_inf = geometry::critical_angle(c.v3inf);
  if (!(c.sigma1 > 0.0) || !(c.sigma2 > 0.0) || c.sigma1 >= sigma_inf || c.sigma2 >= sigma_inf) {
    std::ostringstream os;
    os << "sigma1/sigma2 must lie in (0, sigma_inf) with sigma_inf = " << sigma_inf
       << " for v3inf = " << c.v3inf;
    throw Error(ErrorCode::AngleTooLarge, os.str());
  }
  if (!(c.chaplygin_A > 0.0))
    throw Error(ErrorCode::BadParameter, "chaplygin_A must be positive");

  if (c.mu_schedule.empty() || c.mu_schedule.front() != 0.0 || c.mu_schedule.back() != 1.0)
    throw Error(ErrorCode::BadParameter, "mu_schedule must start at 0 and end at 1");
  if (!std::is_sorted(c.mu_schedule.begin(), c.mu_schedule.end()))
    throw Error(ErrorCode::BadParameter, "mu_schedule must be nondecreasing");
  for (double mu : c.mu_schedule)
    if (mu < 0.0 || mu > 1.0)
      throw Error(ErrorCode::BadParameter, "mu_schedule values must lie in [0,1]");

  if (c.eps_schedule.empty())
    throw Error(ErrorCode::BadParameter, "eps_schedule must be nonempty");
  for (size_t k = 0; k < c.eps_schedule.size(); ++k) {
    if (!(c.eps_schedule[k] > 0.0))
      throw Error(ErrorCode::BadParameter, "eps_schedule values must be positive");
    if (k > 0 && !(c.eps_schedule[k] < c.eps_schedule[k - 1]))
      throw Error(ErrorCode::BadParameter, "eps_schedule must be strictly decreasing");
  }

  if (!(c.newton.tol > 0.0)) throw Error(ErrorCode::BadParameter, "newton.tol must be positive");
  if (c.newton.max_iter < 1)
    throw Error(ErrorCode::BadParameter, "newton.max_iter must be at least 1");
  if (c.newton.max_backtracks < 1)
    throw Error(ErrorCode::BadParameter, "newton.max_backtracks must be at least 1");
  if (c.grid.n_u < 9 || c.grid.n_v < 9)
    throw Error(ErrorCode::BadParameter, "grid.n_u and grid.n_v must be at least 9");
}

std::string config_to_json(const ProblemConfig& c) {
  ordered_json j;
  j["sigma1"] = c.sigma1;
  j["sigma2"] = c.sigma2;
  j["v3inf"] = c.v3inf;
  j["chaplygin_A"] = c.chaplygin_A;
  j["mu_schedule"] = c.mu_schedule;
  j["eps_schedule"] = c.eps_schedule;
  j["newton"] = {{"tol", c.newton.tol},
                 {"max_iter", c.newton.max_iter},
                 {"max_backtracks", c.newton.max_backtracks}};
  j["grid"] = {{"n_u", c.grid.n_u}, {"n_v", c.grid.n_v}};
  return j.dump(2);
}

}  // namespace chaplygin
