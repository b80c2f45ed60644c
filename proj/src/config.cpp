#include "panelfactor/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "panelfactor/csv_io.hpp"
#include "panelfactor/errors.hpp"

namespace panelfactor {

namespace {

constexpr std::array<const char*, 6> kRequired = {"dgp", "n", "T", "estimators", "reps", "seed"};
constexpr std::array<const char*, 18> kOptional = {
    "pi",      "kappa",   "rho",         "alpha",   "beta0",   "location_family",
    "burn_in", "rank",    "estimand",    "ife_tol", "ife_max_iter", "twgfe_g",
    "twgfe_c", "pc_yx_mode", "workers", "output", "kmeans_restarts", "normalization"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known(const std::string& key) {
  auto eq = [&](const char* k) { return key == k; };
  return std::any_of(kRequired.begin(), kRequired.end(), eq) ||
         std::any_of(kOptional.begin(), kOptional.end(), eq);
}

long as_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ParseError, "key '" + key + "': not an integer: '" + v + "'");
}

double as_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const Error&) {
    throw Error(ErrorKind::ParseError, "key '" + key + "': not a number: '" + v + "'");
  }
}

std::size_t as_size(const std::string& key, const std::string& v) {
  const long x = as_long(key, v);
  if (x < 0) throw Error(ErrorKind::ParseError, "key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(x);
}

}  // namespace

CliConfig CliConfig::parse(std::istream& in) {
  CliConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known(key)) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (cfg.entries.count(key)) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.entries[key] = value;
    cfg.lines[key] = lineno;
  }
  std::string missing;
  for (const char* k : kRequired) {
    if (!cfg.entries.count(k)) missing += missing.empty() ? k : std::string(", ") + k;
  }
  if (!missing.empty()) throw Error(ErrorKind::InvalidSpec, "missing required keys: " + missing);
  return cfg;
}

CliConfig CliConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse(in);
}

std::optional<std::string> CliConfig::output() const {
  auto it = entries.find("output");
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

McCellConfig CliConfig::to_cell() const {
  auto get = [&](const char* k) -> const std::string* {
    auto it = entries.find(k);
    return it == entries.end() ? nullptr : &it->second;
  };
  const std::size_t n = as_size("n", *get("n"));
  const std::size_t T = as_size("T", *get("T"));
  const double pi = get("pi") ? as_double("pi", *get("pi")) : 0.0;
  const long reps = as_long("reps", *get("reps"));
  const std::uint64_t seed = as_size("seed", *get("seed"));

  std::vector<EstimatorTag> est;
  {
    std::stringstream ss(*get("estimators"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) est.push_back(parse_estimator_tag(tok));
    }
  }

  const std::string& dgp = *get("dgp");
  McCellConfig cell;
  if (dgp == "counterexample") {
    cell = counterexample_cell(n, T, reps, seed, est);
  } else if (dgp == "custom") {
    cell = preset_cell(1, n, T, pi, reps, seed, est);
    cell.dgp_id = 0;
    cell.dgp = DgpSpec{};
    cell.dgp.n = n;
    cell.dgp.T = T;
    cell.dgp.pi = pi;
  } else if (dgp == "1" || dgp == "2" || dgp == "3" || dgp == "4") {
    cell = preset_cell(dgp[0] - '0', n, T, pi, reps, seed, est);
  } else {
    throw Error(ErrorKind::InvalidSpec, "dgp must be 1, 2, 3, 4, custom or counterexample");
  }

  if (auto v = get("kappa")) cell.dgp.kappa = as_double("kappa", *v);
  if (auto v = get("rho")) cell.dgp.rho = as_double("rho", *v);
  if (auto v = get("alpha")) cell.dgp.alpha = as_double("alpha", *v);
  if (auto v = get("beta0")) cell.dgp.beta0 = as_double("beta0", *v);
  if (auto v = get("burn_in")) cell.dgp.burn_in = as_long("burn_in", *v);
  if (auto v = get("location_family")) {
    if (*v == "LFM") {
      cell.dgp.location_family = LocationFamily::LFM;
    } else if (*v == "NLFM") {
      cell.dgp.location_family = LocationFamily::NLFM;
    } else {
      throw Error(ErrorKind::InvalidSpec, "location_family must be LFM or NLFM");
    }
  }
  if (auto v = get("rank"); v && *v != "rule") cell.rank = as_long("rank", *v);
  if (auto v = get("estimand")) cell.estimand = parse_estimand_mode(*v);
  if (auto v = get("normalization")) cell.normalization = parse_normalization(*v);
  if (auto v = get("ife_tol")) cell.ife.tolerance = as_double("ife_tol", *v);
  if (auto v = get("ife_max_iter")) cell.ife.max_iterations = as_long("ife_max_iter", *v);
  if (auto v = get("twgfe_g")) cell.twgfe.G = as_long("twgfe_g", *v);
  if (auto v = get("twgfe_c")) cell.twgfe.C = as_long("twgfe_c", *v);
  if (auto v = get("kmeans_restarts")) {
    cell.twgfe.kmeans_restarts = static_cast<int>(as_long("kmeans_restarts", *v));
  }
  if (auto v = get("pc_yx_mode")) {
    if (*v == "joint") {
      cell.pc_yx_mode = PcYxMode::Joint;
    } else if (*v == "independent") {
      cell.pc_yx_mode = PcYxMode::Independent;
    } else {
      throw Error(ErrorKind::InvalidSpec, "pc_yx_mode must be joint or independent");
    }
  }
  if (auto v = get("workers")) cell.workers = static_cast<unsigned>(as_size("workers", *v));
  cell.validate();
  return cell;
}

}  // namespace panelfactor
