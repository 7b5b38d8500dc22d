// SPDX-License-Identifier: Apache-2.0
//
// umm: tradeoff curves, simulations, acceptance regions and allocation studies.
//
//   umm curve    --detector glrt --k 2 --delta 2 --grid 0.01:0.99:99
//   umm simulate --detector umm-train --k 2 --delta 2 --rho 5 --trials 100000 --seed 7
//   umm simulate --model discrete --k 2 --delta 2 --n 800 --nx 800 --against ref.csv
//   umm regions  --k 2 --delta 2 --rho 0,1,5,20 --p-fa 0.1 --out regions.csv
//   umm allocate --k 10000 --budget 10
//
// Exit codes: 0 success, 1 comparison failure (--against), 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "umm/umm.hpp"

namespace {

using json = nlohmann::ordered_json;
using umm::linalg::Vector;

constexpr int kExitOk = 0;
constexpr int kExitCompare = 1;
constexpr int kExitUsage = 2;

/// Usage problem tied to a named field.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string detector = "glrt";
  std::string model = "nlp";
  int k = 2;
  double delta = 2.0;
  std::string rho;  // comma list; empty means the subcommand default
  std::uint64_t n = 100;
  std::uint64_t nx = 0;
  double p_fa = 0.1;
  std::string grid = "0.01:0.99:99";
  std::uint64_t trials = 100000;
  std::uint64_t seed = umm::mc::McConfig{}.seed;
  unsigned workers = 1;
  std::string format = "csv";
  std::string out = "-";
  std::string against;
  std::string theta0;
  double sigma = 1.0;
  double budget = 10.0;
  std::optional<double> hardness;
  bool bundle = false;
};

// ------------------------------------------------------------------ parsing helpers

std::vector<double> parse_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + field + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(std::string("--") + field + ": empty list");
  return out;
}

/// start:stop:count, endpoints inclusive, clipped to [1e-6, 1 - 1e-6].
std::vector<double> parse_grid(const std::string& spec) {
  constexpr double kEps = 1e-6;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--grid: expected start:stop:count, got '" + spec + "'");
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    start = std::stod(parts[0]);
    stop = std::stod(parts[1]);
    count = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--grid: non-numeric field in '" + spec + "'");
  }
  if (count < 1) throw UsageError("--grid: count must be >= 1");
  if (count > 1 && !(stop > start)) throw UsageError("--grid: stop must exceed start");
  std::vector<double> grid;
  for (long i = 0; i < count; ++i) {
    const double raw = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double v = std::min(1.0 - kEps, std::max(kEps, raw));
    if (!grid.empty() && !(v > grid.back())) throw UsageError("--grid: clipped grid is not strictly increasing");
    grid.push_back(v);
  }
  return grid;
}

void validate(const RunConfig& c) {
  if (c.k < 1) throw UsageError("--k: must be >= 1");
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw UsageError("--delta: must be finite and > 0");
  if (!(c.p_fa > 0.0 && c.p_fa < 1.0)) throw UsageError("--p-fa: must lie in (0,1)");
  if (c.trials < 100) throw UsageError("--trials: must be >= 100");
  if (c.workers < 1) throw UsageError("--workers: must be >= 1");
  if (c.n < 1) throw UsageError("--n: must be >= 1");
  if (!(c.sigma > 0.0)) throw UsageError("--sigma: must be > 0");
  if (!(c.budget > 0.0)) throw UsageError("--budget: must be > 0");
  if (c.hardness && !(*c.hardness > 0.0)) throw UsageError("--hardness: must be > 0");
  if (!c.rho.empty())
    for (double r : parse_list(c.rho, "rho"))
      if (!(r >= 0.0) || !std::isfinite(r)) throw UsageError("--rho: values must be finite and >= 0");
}

// ------------------------------------------------------------------ config file

const std::set<std::string> kValueKeys{"detector", "model", "k",    "delta",   "rho",   "n",      "nx",
                                       "p-fa",     "grid",  "trials", "seed",  "workers", "format", "out",
                                       "against",  "theta0", "sigma", "budget", "hardness"};
const std::set<std::string> kFlagKeys{"bundle"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// key=value lines ('#' comments) turned into command-line tokens.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    if (kFlagKeys.count(key)) {
      if (value == "true" || value == "1") {
        tokens.push_back("--" + key);
      } else if (value != "false" && value != "0") {
        throw UsageError("config key '" + key + "': expected true or false");
      }
      continue;
    }
    if (!kValueKeys.count(key)) throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

// ------------------------------------------------------------------ output

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // +0.0 folds -0 into 0
  return buf;
}

/// Cells are json values; null renders as an empty CSV field.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::vector<std::pair<std::string, std::string>> meta_lines(const RunConfig& c) {
  std::ostringstream cfg;
  cfg << "detector=" << c.detector << " model=" << c.model << " k=" << c.k << " delta=" << fmt(c.delta)
      << " rho=" << (c.rho.empty() ? "default" : c.rho) << " n=" << c.n << " nx=" << c.nx << " p_fa=" << fmt(c.p_fa)
      << " grid=" << c.grid << " trials=" << c.trials << " theta0=" << (c.theta0.empty() ? "default" : c.theta0)
      << " sigma=" << fmt(c.sigma) << " budget=" << fmt(c.budget)
      << " hardness=" << (c.hardness ? fmt(*c.hardness) : "default") << " bundle=" << (c.bundle ? "true" : "false");
  // worker count is deliberately absent: output must not depend on it
  return {{"tool", std::string("umm ") + umm::kVersion}, {"command", c.command}, {"config", cfg.str()},
          {"seed", std::to_string(c.seed)}};
}

std::string render(const RunConfig& c, const Table& t, const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream os;
  auto meta = meta_lines(c);
  meta.insert(meta.end(), extra.begin(), extra.end());
  if (c.format == "json") {
    json doc;
    for (const auto& [k, v] : meta) doc["meta"][k] = v;
    doc["columns"] = t.columns;
    doc["rows"] = json::array();
    for (const auto& r : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = r[i];
      doc["rows"].push_back(obj);
    }
    os << doc.dump(2) << "\n";
    return os.str();
  }
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ",";
      const json& cell = r[i];
      if (cell.is_null()) continue;
      if (cell.is_number_float()) {
        os << fmt(cell.get<double>());
      } else if (cell.is_number()) {
        os << cell.dump();
      } else {
        os << cell.get<std::string>();
      }
    }
    os << "\n";
  }
  return os.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("--out: cannot write '" + path + "'");
  f << text;
}

/// "dir/name.csv" + "_rho5" -> "dir/name_rho5.csv"
std::string sibling(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Table curve_table(const umm::TradeoffCurve& c) {
  Table t{{"p_fa", "p_md", "ci_low", "ci_high", "provenance"}, {}};
  for (const auto& p : c.points) {
    t.rows.push_back({p.p_fa, p.p_md, p.md_ci ? json(p.md_ci->low) : json(nullptr),
                      p.md_ci ? json(p.md_ci->high) : json(nullptr), umm::to_string(c.provenance)});
  }
  return t;
}

umm::mc::McConfig mc_config(const RunConfig& c) {
  umm::mc::McConfig m;
  m.trials = c.trials;
  m.seed = c.seed;
  m.workers = c.workers;
  return m;
}

std::vector<double> rho_list(const RunConfig& c, std::vector<double> fallback) {
  return c.rho.empty() ? fallback : parse_list(c.rho, "rho");
}

// ------------------------------------------------------------------ curve

umm::TradeoffCurve analytic_or_mc_curve(const RunConfig& c, const std::string& detector, double rho,
                                        const std::vector<double>& grid) {
  const auto k = static_cast<std::size_t>(c.k);
  if (detector == "lrt") return umm::nlp::lrt_curve(c.delta, grid);
  if (detector == "glrt") return umm::nlp::glrt_curve(k, c.delta, grid);
  if (detector == "umm-train") return umm::nlp::umm_curve(c.delta, rho, k, grid, mc_config(c));
  if (detector == "trivial") {
    umm::TradeoffCurve t;
    t.descriptor = "trivial";
    for (double p : grid) t.points.push_back(umm::make_point(p, 1.0 - p));
    return t;
  }
  if (detector == "asymptotic") {
    // --hardness is E itself; otherwise delta is taken in blocklength form d and E follows
    const double e = c.hardness ? *c.hardness : umm::asym::hardness_param(c.delta, rho, c.k);
    return umm::asym::asymptotic_curve(e, grid);
  }
  throw UsageError("--detector: unknown detector '" + detector + "'");
}

int cmd_curve(const RunConfig& c) {
  const auto grid = parse_grid(c.grid);
  if (c.bundle) {
    if (c.out == "-") throw UsageError("--out: --bundle writes several files and needs an output path");
    emit(sibling(c.out, "_lrt"), render(c, curve_table(analytic_or_mc_curve(c, "lrt", 0.0, grid)), {{"curve", "lrt"}}));
    emit(sibling(c.out, "_trivial"),
         render(c, curve_table(analytic_or_mc_curve(c, "trivial", 0.0, grid)), {{"curve", "trivial"}}));
    for (double rho : rho_list(c, {0.0, 1.0, 5.0, 20.0})) {
      const std::string tag = "rho" + fmt(rho);
      emit(sibling(c.out, "_" + tag),
           render(c, curve_table(analytic_or_mc_curve(c, "umm-train", rho, grid)), {{"curve", "umm-train " + tag}}));
    }
    return kExitOk;
  }
  const auto rhos = rho_list(c, {0.0});
  if (rhos.size() != 1) throw UsageError("--rho: a single value is expected without --bundle");
  emit(c.out, render(c, curve_table(analytic_or_mc_curve(c, c.detector, rhos[0], grid)), {}));
  return kExitOk;
}

// ------------------------------------------------------------------ simulate

std::map<double, double> read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--against: cannot open '" + path + "'");
  std::string line;
  std::vector<std::string> header;
  std::map<double, double> ref;
  int col_fa = -1, col_md = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "p_fa") col_fa = static_cast<int>(i);
        if (header[i] == "p_md") col_md = static_cast<int>(i);
      }
      if (col_fa < 0 || col_md < 0) throw UsageError("--against: file lacks p_fa and p_md columns");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(col_fa, col_md)) throw UsageError("--against: short row");
    ref[std::stod(cells[col_fa])] = std::stod(cells[col_md]);
  }
  return ref;
}

/// Parameter of the LAN model under test; the default null is the uniform
/// distribution (discrete) or the origin (gaussian, ar).
std::unique_ptr<umm::lan::LanModel> make_model(const RunConfig& c, Vector& theta0) {
  const auto k = static_cast<std::size_t>(c.k);
  std::unique_ptr<umm::lan::LanModel> model;
  if (c.model == "gaussian") {
    model = std::make_unique<umm::lan::GaussianIidModel>(k);
    theta0.assign(k, 0.0);
  } else if (c.model == "discrete") {
    model = std::make_unique<umm::lan::DiscreteModel>(k + 1);
    theta0.assign(k, 1.0 / static_cast<double>(k + 1));
  } else if (c.model == "ar") {
    model = std::make_unique<umm::lan::AutoregressiveModel>(k, c.sigma);
    theta0.assign(k, 0.0);
  } else {
    throw UsageError("--model: unknown model '" + c.model + "'");
  }
  if (!c.theta0.empty()) {
    theta0 = parse_list(c.theta0, "theta0");
    if (theta0.size() != k) throw UsageError("--theta0: expected " + std::to_string(k) + " values");
  }
  return model;
}

int cmd_simulate(const RunConfig& c) {
  const auto grid = parse_grid(c.grid);
  const auto cfg = mc_config(c);
  const auto rhos = rho_list(c, {0.0});
  if (rhos.size() != 1) throw UsageError("--rho: simulate takes a single value");
  umm::TradeoffCurve curve;
  std::vector<double> reference;  // analytic umm_pmd for LAN runs
  std::vector<std::pair<std::string, std::string>> extra;

  if (c.model == "nlp") {
    const auto problem = umm::nlp::NlpProblem::standard(static_cast<std::size_t>(c.k), c.delta, rhos[0]);
    if (c.detector == "lrt") {
      curve = umm::mc::roc_sweep([&](double p) { return umm::nlp::LrtTrial::at_false_alarm(problem, p); }, grid, cfg,
                                 "lrt");
    } else if (c.detector == "glrt") {
      curve = umm::mc::roc_sweep([&](double p) { return umm::nlp::GlrtTrial::at_false_alarm(problem, p); }, grid,
                                 cfg, "glrt");
    } else if (c.detector == "umm-train") {
      curve = umm::mc::roc_sweep([&](double p) { return umm::nlp::UmmTrainTrial{&problem, p, std::nullopt}; }, grid,
                                 cfg, "umm-train");
    } else {
      throw UsageError("--detector: simulate supports lrt, glrt and umm-train");
    }
  } else {
    Vector theta0;
    const auto model = make_model(c, theta0);
    const auto setup = umm::lan::make_setup(*model, c.n, c.nx);
    // alternative at local hardness d = delta along the first local axis
    Vector mu(model->dim(), 0.0);
    mu[0] = c.delta;
    const Vector theta1 = umm::lan::theta_from_local(mu, theta0, *model, c.n);
    const umm::lan::AummDetector det(*model, theta0, setup);
    curve = umm::mc::roc_sweep([&](double p) { return umm::lan::AummTrial{&det, theta1, p}; }, grid, cfg,
                               "aumm " + model->name());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto rcfg = cfg;
      rcfg.seed = umm::mc::derive_seed(c.seed, {i, 2});
      reference.push_back(umm::nlp::umm_pmd(grid[i], c.delta, setup.rho, model->dim(), rcfg).p_hat);
    }
    extra.push_back({"rho_effective", fmt(setup.rho)});
    std::ostringstream th;
    for (std::size_t i = 0; i < theta1.size(); ++i) th << (i ? "," : "") << fmt(theta1[i]);
    extra.push_back({"theta1", th.str()});
  }

  Table t{{"p_fa", "p_md", "ci_low", "ci_high", "provenance", "p_fa_hat", "fa_ci_low", "fa_ci_high"}, {}};
  if (!reference.empty()) {
    t.columns.push_back("umm_ref");
    t.columns.push_back("deviation");
  }
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    std::vector<json> row{p.p_fa,          p.p_md,           p.md_ci->low,    p.md_ci->high,
                          "simulated",     opt_num(p.p_fa_hat), p.fa_ci->low, p.fa_ci->high};
    if (!reference.empty()) {
      row.push_back(reference[i]);
      row.push_back(p.p_md - reference[i]);
    }
    t.rows.push_back(std::move(row));
  }
  emit(c.out, render(c, t, extra));

  if (c.against.empty()) return kExitOk;
  const auto ref = read_reference(c.against);
  int violations = 0;
  for (const auto& p : curve.points) {
    const auto it = ref.lower_bound(p.p_fa - 1e-12);
    if (it == ref.end() || std::fabs(it->first - p.p_fa) > 1e-12) {
      std::cerr << "against: no reference row for p_fa=" << fmt(p.p_fa) << "\n";
      ++violations;
      continue;
    }
    // 3 standard errors on both axes
    const double md_tol = 3.0 * std::max(*p.md_std_error, 1.0 / static_cast<double>(c.trials));
    const double fa_tol = 3.0 * std::max(*p.fa_std_error, 1.0 / static_cast<double>(c.trials));
    if (std::fabs(p.p_md - it->second) > md_tol || std::fabs(*p.p_fa_hat - p.p_fa) > fa_tol) {
      std::cerr << "against: p_fa=" << fmt(p.p_fa) << " simulated p_md=" << fmt(p.p_md) << " reference "
                << fmt(it->second) << " p_fa_hat=" << fmt(*p.p_fa_hat) << "\n";
      ++violations;
    }
  }
  if (violations) {
    std::cerr << "against: " << violations << " point(s) outside 3 standard errors\n";
    return kExitCompare;
  }
  return kExitOk;
}

// ------------------------------------------------------------------ regions

int cmd_regions(const RunConfig& c) {
  const auto k = static_cast<std::size_t>(c.k);
  Vector mu1(k, 0.0);
  mu1[0] = c.delta;
  Table summary{{"rho", "center_x", "center_y", "radius"}, {}};
  Table boundary{{"detector", "rho", "x", "y"}, {}};
  constexpr int kPoints = 181;
  for (double rho : rho_list(c, {0.0, 1.0, 5.0, 20.0})) {
    const auto problem = umm::nlp::NlpProblem::standard(mu1, rho);
    // the training vector sits at its expectation mu_1
    const auto b = umm::nlp::region_boundary(problem, umm::nlp::DetectorKind::umm_train, c.p_fa, mu1);
    const double cy = k >= 2 ? b.center[1] : 0.0;
    summary.rows.push_back({rho, b.center[0] + 0.0, cy + 0.0, b.radius});
    if (k == 2) {
      for (int i = 0; i < kPoints; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / (kPoints - 1);
        boundary.rows.push_back({"umm-train", rho, b.center[0] + b.radius * std::cos(a), cy + b.radius * std::sin(a)});
      }
    }
  }
  if (k == 2) {
    // LRT boundary mu_1^t y = T as a segment spanning the plotted range
    const auto problem = umm::nlp::NlpProblem::standard(mu1);
    const auto h = umm::nlp::region_boundary(problem, umm::nlp::DetectorKind::lrt, c.p_fa);
    const double x = h.offset / c.delta;
    const double half = 60.0;
    boundary.rows.push_back({"lrt", nullptr, x, -half});
    boundary.rows.push_back({"lrt", nullptr, x, half});
  }
  emit(c.out, render(c, summary, {{"training_x", "mu_1"}}));
  if (k == 2 && c.out != "-") emit(sibling(c.out, "_boundary"), render(c, boundary, {{"training_x", "mu_1"}}));
  return kExitOk;
}

// ------------------------------------------------------------------ allocate

int cmd_allocate(const RunConfig& c) {
  const auto grid = c.rho.empty() ? umm::asym::default_rho_grid() : parse_list(c.rho, "rho");
  const auto r = umm::asym::allocate({c.budget, c.k}, grid);
  Table t{{"kind", "rho", "hardness"}, {}};
  for (const auto& [rho, e] : r.grid) t.rows.push_back({"grid", rho, e});
  t.rows.push_back({"rho_star", r.rho_star, r.hardness_star});
  emit(c.out, render(c, t, {}));
  return kExitOk;
}

// ------------------------------------------------------------------ wiring

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--config", "key=value file; flags given on the command line take precedence");
  sub->add_option("--detector", c.detector, "lrt | glrt | umm-train | asymptotic | trivial")
      ->check(CLI::IsMember({"lrt", "glrt", "umm-train", "asymptotic", "trivial"}));
  sub->add_option("--model", c.model, "nlp | gaussian | discrete | ar")
      ->check(CLI::IsMember({"nlp", "gaussian", "discrete", "ar"}));
  sub->add_option("--k", c.k, "dimension (discrete model: alphabet size minus one)");
  sub->add_option("--delta", c.delta, "hardness Delta (LAN models: local hardness d)");
  sub->add_option("--rho", c.rho, "training quality; comma list for regions, allocate and --bundle");
  sub->add_option("--n", c.n, "test blocklength (LAN models)");
  sub->add_option("--nx", c.nx, "training blocklength (LAN models)");
  sub->add_option("--p-fa", c.p_fa, "false-alarm level (regions)");
  sub->add_option("--grid", c.grid, "p_fa grid start:stop:count");
  sub->add_option("--trials", c.trials, "Monte Carlo trials per point");
  sub->add_option("--seed", c.seed, "base seed");
  sub->add_option("--workers", c.workers, "worker threads (results do not depend on it)");
  sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "output path, '-' for stdout");
  sub->add_option("--against", c.against, "reference CSV; exit 1 when the simulation disagrees");
  sub->add_option("--theta0", c.theta0, "null parameter of a LAN model, comma list");
  sub->add_option("--sigma", c.sigma, "AR noise standard deviation");
  sub->add_option("--budget", c.budget, "allocation budget a = n_T Delta^2");
  sub->add_option("--hardness", c.hardness, "effective hardness E for the asymptotic curve");
  sub->add_flag("--bundle", c.bundle, "curve: write LRT, trivial and one training curve per --rho");
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const std::set<std::string> subcommands{"curve", "simulate", "regions", "allocate"};

  // splice config-file entries in right after the subcommand so later flags override them
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    const auto tokens = config_tokens(path);
    std::size_t pos = 0;
    while (pos < args.size() && !subcommands.count(args[pos])) ++pos;
    if (pos == args.size()) throw UsageError("--config: a subcommand must be given");
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos + 1), tokens.begin(), tokens.end());
    break;
  }

  RunConfig c;
  CLI::App app{"Universal minimax detection: curves, simulations, regions, allocation"};
  app.set_version_flag("--version", std::string(umm::kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  for (const auto* name : {"curve", "simulate", "regions", "allocate"}) {
    const std::map<std::string, std::string> help{
        {"curve", "tradeoff curve; closed form except umm-train, which integrates by Monte Carlo"},
        {"simulate", "Monte Carlo tradeoff curve with confidence intervals"},
        {"regions", "acceptance-sphere geometry for the training rule"},
        {"allocate", "train/test split maximizing the effective hardness"}};
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, c);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  validate(c);
  if (c.command == "curve") return cmd_curve(c);
  if (c.command == "simulate") return cmd_simulate(c);
  if (c.command == "regions") return cmd_regions(c);
  return cmd_allocate(c);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {  // config_error, stability_error
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {  // domain and range errors from the library
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}
