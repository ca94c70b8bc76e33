#include "aqst/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/program_options.hpp>
#include <fmt/format.h>

#include "aqst/errors.hpp"

namespace po = boost::program_options;

namespace aqst::harness {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", \t"), boost::token_compress_on);
  std::erase_if(parts, [](const std::string& s) { return s.empty(); });
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw ConfigError(key + ": '" + text + "' is not a number");
  return v;
}

std::optional<double> parse_target(const std::string& key, const std::string& text) {
  if (text == "*" || text == "-" || text == "free") return std::nullopt;
  return parse_double(key, text);
}

CalibrationAnchor parse_anchor(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() < 3 || parts.size() > 4) {
    throw ConfigError("calibration.anchor: expected '<lambda_c> <alpha0|*> <alpha1|*> [weight]', got '" + text + "'");
  }
  CalibrationAnchor a;
  a.lambda_c = parse_double("calibration.anchor", parts[0]);
  a.alpha0 = parse_target("calibration.anchor", parts[1]);
  a.alpha1 = parse_target("calibration.anchor", parts[2]);
  if (parts.size() == 4) a.weight = parse_double("calibration.anchor", parts[3]);
  return a;
}

CalibrationAnchor parse_optimum(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.empty() || parts.size() > 2) {
    throw ConfigError("calibration.optimum: expected '<lambda_c> [weight]', got '" + text + "'");
  }
  CalibrationAnchor a;
  a.lambda_c = parse_double("calibration.optimum", parts[0]);
  a.stationary = true;
  if (parts.size() == 2) a.weight = parse_double("calibration.optimum", parts[1]);
  return a;
}

Accounting parse_accounting(const std::string& s) {
  if (s == "exclude_pre") return Accounting::exclude_pre;
  if (s == "include_pre") return Accounting::include_pre;
  throw ConfigError("protocol.accounting: expected exclude_pre or include_pre, got '" + s + "'");
}

ShotSampler parse_sampler(const std::string& s) {
  if (s == "records") return ShotSampler::records;
  if (s == "binomial") return ShotSampler::binomial;
  throw ConfigError("protocol.sampler: expected records or binomial, got '" + s + "'");
}

StatePreset parse_preset(const std::string& s) {
  if (s == "best") return StatePreset::best;
  if (s == "worst") return StatePreset::worst;
  if (s == "center") return StatePreset::center;
  if (s == "custom") return StatePreset::custom;
  throw ConfigError("state.preset: expected best, worst, center or custom, got '" + s + "'");
}

Spread parse_spread(const std::string& s) {
  if (s == "about_mean") return Spread::about_mean;
  if (s == "about_truth") return Spread::about_truth;
  if (s == "about_delivered") return Spread::about_delivered;
  throw ConfigError("analysis.spread: expected about_delivered, about_truth or about_mean, got '" + s + "'");
}

const char* name(Accounting a) { return a == Accounting::exclude_pre ? "exclude_pre" : "include_pre"; }
const char* name(ShotSampler s) { return s == ShotSampler::records ? "records" : "binomial"; }
const char* name(Spread s) {
  switch (s) {
    case Spread::about_truth: return "about_truth";
    case Spread::about_delivered: return "about_delivered";
    case Spread::about_mean: return "about_mean";
  }
  return "about_delivered";
}
const char* name(StatePreset p) {
  switch (p) {
    case StatePreset::best: return "best";
    case StatePreset::worst: return "worst";
    case StatePreset::center: return "center";
    case StatePreset::custom: return "custom";
  }
  return "";
}

po::options_description describe() {
  po::options_description d("aqst configuration");
  // clang-format off
  d.add_options()
    ("seed", po::value<std::uint64_t>())
    ("trials", po::value<std::int64_t>())
    ("threads", po::value<int>())
    ("out", po::value<std::string>())
    ("protocol.n_total", po::value<std::int64_t>())
    ("protocol.n_pre", po::value<std::int64_t>())
    ("protocol.lambda_c", po::value<std::string>())
    ("protocol.accounting", po::value<std::string>())
    ("protocol.sampler", po::value<std::string>())
    ("readout.mu_g", po::value<std::string>())
    ("readout.mu_e", po::value<std::string>())
    ("readout.sigma_env", po::value<std::string>())
    ("readout.w_decay", po::value<std::string>())
    ("readout.w_therm", po::value<std::string>())
    ("calibration.anchor", po::value<std::vector<std::string>>()->composing())
    ("calibration.optimum", po::value<std::vector<std::string>>()->composing())
    ("calibration.fix", po::value<std::string>())
    ("calibration.ceiling", po::value<std::string>())
    ("imperfection.enabled", po::value<bool>())
    ("imperfection.purity", po::value<std::string>())
    ("imperfection.purity_scale", po::value<std::string>())
    ("imperfection.elevation_deg", po::value<std::string>())
    ("imperfection.azimuth_deg", po::value<std::string>())
    ("imperfection.randomize_signs", po::value<bool>())
    ("imperfection.compensate_purity", po::value<bool>())
    ("state.preset", po::value<std::string>())
    ("state.theta", po::value<std::string>())
    ("state.phi", po::value<std::string>())
    ("sweep.lambda_min", po::value<std::string>())
    ("sweep.lambda_max", po::value<std::string>())
    ("sweep.points", po::value<int>())
    ("sweep.crossing_lo", po::value<std::string>())
    ("sweep.crossing_hi", po::value<std::string>())
    ("scaling.n_values", po::value<std::string>())
    ("analysis.spread", po::value<std::string>());
  // clang-format on
  return d;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, describe(), false), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  ExperimentConfig c;
  auto has = [&](const char* k) { return vm.count(k) > 0; };
  auto str = [&](const char* k) { return vm[k].as<std::string>(); };
  auto dbl = [&](const char* k, double& slot) {
    if (has(k)) slot = parse_double(k, str(k));
  };

  if (has("seed")) c.seed = vm["seed"].as<std::uint64_t>();
  if (has("trials")) {
    const auto t = vm["trials"].as<std::int64_t>();
    if (t < 1) throw ConfigError("trials must be at least 1");
    c.trials = std::size_t(t);
  }
  if (has("threads")) c.threads = vm["threads"].as<int>();
  if (has("out")) c.out = str("out");

  if (has("protocol.n_total")) c.protocol.n_total = vm["protocol.n_total"].as<std::int64_t>();
  if (has("protocol.n_pre")) c.protocol.n_pre = vm["protocol.n_pre"].as<std::int64_t>();
  dbl("protocol.lambda_c", c.protocol.lambda_c);
  if (has("protocol.accounting")) c.protocol.accounting = parse_accounting(str("protocol.accounting"));
  if (has("protocol.sampler")) c.protocol.sampler = parse_sampler(str("protocol.sampler"));

  dbl("readout.mu_g", c.readout.mu_g);
  dbl("readout.mu_e", c.readout.mu_e);
  dbl("readout.sigma_env", c.readout.sigma_env);
  dbl("readout.w_decay", c.readout.w_decay);
  dbl("readout.w_therm", c.readout.w_therm);

  if (has("calibration.anchor") || has("calibration.optimum")) {
    c.anchors.points.clear();
    if (has("calibration.anchor")) {
      for (const auto& a : vm["calibration.anchor"].as<std::vector<std::string>>()) {
        c.anchors.points.push_back(parse_anchor(a));
      }
    }
    if (has("calibration.optimum")) {
      for (const auto& a : vm["calibration.optimum"].as<std::vector<std::string>>()) {
        c.anchors.points.push_back(parse_optimum(a));
      }
    }
  }
  if (has("calibration.fix")) {
    c.calibration_fixed = split_list(str("calibration.fix"));
    if (c.calibration_fixed.size() == 1 && c.calibration_fixed.front() == "none") c.calibration_fixed.clear();
    for (const auto& f : c.calibration_fixed) {
      if (f != "mu_g" && f != "mu_e" && f != "sigma_env" && f != "w_decay" && f != "w_therm") {
        throw ConfigError("calibration.fix: unknown readout parameter '" + f + "'");
      }
    }
  }
  dbl("calibration.ceiling", c.calibration_ceiling);

  if (has("imperfection.enabled")) c.imperfection_enabled = vm["imperfection.enabled"].as<bool>();
  if (has("imperfection.purity") && has("imperfection.purity_scale")) {
    throw ConfigError("set either imperfection.purity or imperfection.purity_scale, not both");
  }
  if (has("imperfection.purity")) {
    const double purity = parse_double("imperfection.purity", str("imperfection.purity"));
    try {
      c.purity_scale = ImperfectionModel::scale_for_purity(purity);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("imperfection.purity: ") + e.what());
    }
  }
  dbl("imperfection.purity_scale", c.purity_scale);
  dbl("imperfection.elevation_deg", c.elevation_deg);
  dbl("imperfection.azimuth_deg", c.azimuth_deg);
  if (has("imperfection.randomize_signs")) c.randomize_signs = vm["imperfection.randomize_signs"].as<bool>();
  if (has("imperfection.compensate_purity")) c.compensate_purity = vm["imperfection.compensate_purity"].as<bool>();

  if (has("state.preset")) c.state = parse_preset(str("state.preset"));
  if ((has("state.theta") || has("state.phi")) && c.state != StatePreset::custom) {
    throw ConfigError("state.theta / state.phi require state.preset = custom");
  }
  dbl("state.theta", c.theta);
  dbl("state.phi", c.phi);

  dbl("sweep.lambda_min", c.grid.lambda_min);
  dbl("sweep.lambda_max", c.grid.lambda_max);
  if (has("sweep.points")) c.grid.points = vm["sweep.points"].as<int>();
  dbl("sweep.crossing_lo", c.crossing_bracket.first);
  dbl("sweep.crossing_hi", c.crossing_bracket.second);

  if (has("scaling.n_values")) {
    c.scaling_n.clear();
    for (const auto& part : split_list(str("scaling.n_values"))) {
      try {
        std::size_t used = 0;
        c.scaling_n.push_back(std::stoll(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError("scaling.n_values: '" + part + "' is not an integer");
      }
    }
  }
  if (has("analysis.spread")) c.spread = parse_spread(str("analysis.spread"));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

ExperimentConfig config_from_csv_header(std::istream& csv) {
  std::ostringstream body;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] != '#') break;
    if (line.rfind("# ", 0) != 0 || line.find(" = ") == std::string::npos) continue;
    body << line.substr(2) << '\n';
  }
  std::istringstream in(body.str());
  return parse_config(in, "<csv header>");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  protocol.validate();
  readout.validate();
  imperfection().validate();
  grid.validate();
  if (scaling_n.empty()) throw ConfigError("scaling.n_values must not be empty");
  for (std::int64_t n : scaling_n) require_budget(n);
  if (!(calibration_ceiling > 0.0)) throw ConfigError("calibration.ceiling must be positive");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](std::string k, std::string v) { kv.emplace_back(std::move(k), std::move(v)); };
  put("seed", std::to_string(seed));
  put("trials", std::to_string(trials));
  put("threads", std::to_string(threads));
  if (!out.empty()) put("out", out);
  put("protocol.n_total", std::to_string(protocol.n_total));
  put("protocol.n_pre", std::to_string(protocol.n_pre));
  put("protocol.lambda_c", num(protocol.lambda_c));
  put("protocol.accounting", name(protocol.accounting));
  put("protocol.sampler", name(protocol.sampler));
  put("readout.mu_g", num(readout.mu_g));
  put("readout.mu_e", num(readout.mu_e));
  put("readout.sigma_env", num(readout.sigma_env));
  put("readout.w_decay", num(readout.w_decay));
  put("readout.w_therm", num(readout.w_therm));
  auto target = [](const std::optional<double>& t) { return t ? num(*t) : std::string("*"); };
  for (const CalibrationAnchor& a : anchors.points) {
    if (a.alpha0 || a.alpha1) {
      put("calibration.anchor", fmt::format("{} {} {} {}", num(a.lambda_c), target(a.alpha0), target(a.alpha1),
                                            num(a.weight)));
    }
  }
  for (const CalibrationAnchor& a : anchors.points) {
    if (a.stationary) put("calibration.optimum", fmt::format("{} {}", num(a.lambda_c), num(a.weight)));
  }
  put("calibration.fix", calibration_fixed.empty() ? "none" : boost::algorithm::join(calibration_fixed, ","));
  put("calibration.ceiling", num(calibration_ceiling));
  put("imperfection.enabled", imperfection_enabled ? "true" : "false");
  put("imperfection.purity_scale", num(purity_scale));
  put("imperfection.elevation_deg", num(elevation_deg));
  put("imperfection.azimuth_deg", num(azimuth_deg));
  put("imperfection.randomize_signs", randomize_signs ? "true" : "false");
  put("imperfection.compensate_purity", compensate_purity ? "true" : "false");
  put("state.preset", name(state));
  if (state == StatePreset::custom) {
    put("state.theta", num(theta));
    put("state.phi", num(phi));
  }
  put("sweep.lambda_min", num(grid.lambda_min));
  put("sweep.lambda_max", num(grid.lambda_max));
  put("sweep.points", std::to_string(grid.points));
  put("sweep.crossing_lo", num(crossing_bracket.first));
  put("sweep.crossing_hi", num(crossing_bracket.second));
  std::vector<std::string> ns;
  for (std::int64_t n : scaling_n) ns.push_back(std::to_string(n));
  put("scaling.n_values", boost::algorithm::join(ns, ","));
  put("analysis.spread", name(spread));
  return kv;
}

PartialReadoutModel ExperimentConfig::fixed_parameters() const {
  PartialReadoutModel p;
  for (const std::string& f : calibration_fixed) {
    if (f == "mu_g") p.mu_g = readout.mu_g;
    if (f == "mu_e") p.mu_e = readout.mu_e;
    if (f == "sigma_env") p.sigma_env = readout.sigma_env;
    if (f == "w_decay") p.w_decay = readout.w_decay;
    if (f == "w_therm") p.w_therm = readout.w_therm;
  }
  return p;
}

ImperfectionModel ExperimentConfig::imperfection() const {
  constexpr double deg = std::numbers::pi / 180.0;
  return ImperfectionModel{
      .purity_scale = purity_scale,
      .elevation_error = elevation_deg * deg,
      .azimuth_error = azimuth_deg * deg,
      .enabled = imperfection_enabled,
      .randomize_signs = randomize_signs,
  };
}

AqstOptions ExperimentConfig::aqst_options() const { return {imperfection(), compensate_purity}; }

BlochVector resolve_state(const ExperimentConfig& cfg) {
  switch (cfg.state) {
    case StatePreset::center: return BlochVector(0.0, 0.0, 0.0);
    case StatePreset::custom: return state_to_bloch(QubitState::normalized(cfg.theta, cfg.phi));
    case StatePreset::best:
    case StatePreset::worst: {
      const auto kets = extremal_kets(alphas(cfg.readout, cfg.protocol.lambda_c));
      return state_to_bloch(cfg.state == StatePreset::best ? kets.best : kets.worst);
    }
  }
  return {};
}

}  // namespace aqst::harness
