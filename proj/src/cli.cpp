#include "reskit/cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <cmath>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "reskit/errors.hpp"
#include "reskit/quantitative.hpp"
#include "reskit/reachability.hpp"
#include "reskit/report.hpp"
#include "reskit/resilience.hpp"
#include "reskit/scenarios.hpp"

namespace reskit {

namespace {

struct Config {
  std::string scenario;
  std::string system_file;
  std::string lost;
  std::string x0;
  std::string target;
  double horizon = 0.2;
  int steps = 5;
  int samples = 1000;
  std::uint64_t seed = 0;
  std::string dims = "1,2";
  bool oracle = false;
  double dt = 0.5;
  double t_max = 1000.0;
  std::string format = "json";
  std::string output;
  int threads = 1;
  Tolerances tol;
};

// A failed precondition that maps to exit status 4 (empty Z, non-Hurwitz A).
struct HypothesisFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_csv_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ArgumentError(std::string(what) + ": cannot parse '" + tok + "'");
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size() || !std::isfinite(v)) throw ArgumentError(std::string(what) + ": cannot parse '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ArgumentError(std::string(what) + ": empty list");
  return out;
}

Vector parse_state(const std::string& text, Eigen::Index n, const char* what) {
  const auto v = parse_csv_numbers(text, what);
  if (static_cast<Eigen::Index>(v.size()) != n)
    throw ArgumentError(std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                        std::to_string(v.size()));
  return Eigen::Map<const Vector>(v.data(), n);
}

std::vector<int> parse_dims(const std::string& text, Eigen::Index n) {
  const auto v = parse_csv_numbers(text, "--dims");
  if (v.size() != 2) throw ArgumentError("--dims: expected two indices");
  std::vector<int> out;
  for (double d : v) {
    if (d != std::floor(d) || d < 1 || d > static_cast<double>(n))
      throw ArgumentError("--dims: index out of range 1.." + std::to_string(n));
    out.push_back(static_cast<int>(d) - 1);
  }
  if (out[0] == out[1]) throw ArgumentError("--dims: indices must differ");
  return out;
}

Scenario load_source(const Config& c) {
  if (!c.system_file.empty()) {
    std::ifstream in(c.system_file);
    if (!in) throw ArgumentError("cannot open system file '" + c.system_file + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ArgumentError("system file '" + c.system_file + "': " + e.what());
    }
    return scenario_from_json(j);
  }
  if (c.scenario.empty()) throw ArgumentError("one of --scenario or --system is required");
  return load_scenario(c.scenario);
}

void validate(const Config& c) {
  if (!(c.horizon > 0)) throw ArgumentError("--horizon must be positive");
  if (c.steps < 1) throw ArgumentError("--steps must be at least 1");
  if (c.samples < 0) throw ArgumentError("--samples must be non-negative");
  if (c.threads < 1) throw ArgumentError("--threads must be at least 1");
  if (!(c.dt > 0) || !(c.t_max > 0)) throw ArgumentError("--dt and --t-max must be positive");
  for (double t : {c.tol.rank, c.tol.spectrum, c.tol.imag, c.tol.containment, c.tol.support})
    if (!(t > 0)) throw ArgumentError("tolerances must be positive");
}

DocumentHeader header(const std::string& command, const Scenario& s, const std::vector<int>& lost) {
  DocumentHeader h;
  h.command = command;
  h.system = s.name;
  h.lost = lost;
  for (int k : lost) h.lost_labels.push_back(s.system.actuator_labels[static_cast<std::size_t>(k)]);
  return h;
}

std::vector<int> lost_list(const Config& c, const LinearSystem& sys) {
  if (c.lost.empty()) throw ArgumentError("--lost is required");
  return resolve_actuators(sys, c.lost);
}

std::string empty_z_message(const ControlSplit& split, const Tolerances& tol) {
  std::ostringstream os;
  os << "Z is empty: CW is not contained in BU";
  const Zonotope BU(Vector::Zero(split.B.rows()), split.B);
  const Zonotope CW(Vector::Zero(split.C.rows()), split.C);
  if (const auto d = separating_direction(BU, CW, tol.containment)) {
    os << "; along d = (";
    for (Eigen::Index i = 0; i < d->size(); ++i) os << (i ? ", " : "") << (*d)(i);
    os << ") h_CW(d) = " << support(CW, *d) << " > h_BU(d) = " << support(BU, *d);
  }
  return os.str();
}

std::string cmd_check(const Config& c) {
  if (c.format != "json") throw ArgumentError("check supports --format json only");
  Scenario s = load_source(c);
  const auto lost = lost_list(c, s.system);
  const ControlSplit split = split_system(s.system, lost);
  const ResilienceVerdict v = analyze_resilience(s.system, split, c.tol);
  return dump(check_document(header("check", s, split.lost), v));
}

std::string cmd_reach(const Config& c) {
  Scenario s = load_source(c);
  const auto n = s.system.states();
  const auto dims = parse_dims(c.dims, n);
  const auto lost = lost_list(c, s.system);
  const ControlSplit split = split_system(s.system, lost);
  const Vector x0 = c.x0.empty() ? s.default_x0 : parse_state(c.x0, n, "--x0");
  const ZSet z = compute_z_set(split, c.tol);
  if (z.empty()) throw HypothesisFailure(empty_z_message(split, c.tol));
  const ReachTube tube = reach_tube(s.system.A, z, x0, c.horizon, c.steps);
  if (c.format == "csv") return tube_csv(tube, dims);
  if (c.format == "svg") {
    std::vector<std::string> labels;
    for (int d : dims) {
      std::string l = s.system.state_labels[static_cast<std::size_t>(d)];
      if (static_cast<std::size_t>(d) < s.system.state_units.size() && !s.system.state_units[d].empty())
        l += " (" + s.system.state_units[d] + ")";
      labels.push_back(l);
    }
    return tube_svg(tube, dims, labels);
  }
  return dump(tube_document(header("reach", s, split.lost), tube, dims));
}

std::string cmd_bounds(const Config& c) {
  if (c.format != "json") throw ArgumentError("bounds supports --format json only");
  Scenario s = load_source(c);
  const auto n = s.system.states();
  const auto lost = lost_list(c, s.system);
  const ControlSplit split = split_system(s.system, lost);
  const Vector x0 = c.x0.empty() ? s.default_x0 : parse_state(c.x0, n, "--x0");
  if (!is_hurwitz(s.system.A, 0.0))
    throw HypothesisFailure("A is not Hurwitz; the reach-time bounds need a stable drift (max Re = " +
                            std::to_string(eigen_spectrum(s.system.A, c.tol).max_real_part()) + ")");
  BoundsOptions opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.tol = c.tol;
  const BoundsReport rep = compute_bounds(s.system, split, x0, opt);

  std::optional<OracleTimes> oracle;
  if (c.oracle) {
    const Vector target = c.target.empty() ? s.default_target : parse_state(c.target, n, "--target");
    OracleTimes o;
    o.dt = c.dt;
    o.t_max = c.t_max;
    o.T_N = nominal_time_oracle(s.system, x0, target, c.dt, c.t_max);
    if (!compute_z_set(split, c.tol).empty()) o.T_M = malfunction_time_oracle(s.system, split, x0, target, c.dt, c.t_max);
    oracle = o;
  }
  return dump(bounds_document(header("bounds", s, split.lost), rep, {c.seed, c.samples}, oracle));
}

std::string cmd_scenarios(const Config& c) {
  if (c.format != "json") throw ArgumentError("scenarios supports --format json only");
  if (!c.scenario.empty() || !c.system_file.empty()) return dump(scenario_to_json(load_source(c)));
  Json list = Json::array();
  for (const auto& name : list_scenarios()) {
    const Scenario s = load_scenario(name);
    list.push_back({{"name", name},
                    {"states", s.system.states()},
                    {"actuators", s.system.actuators()},
                    {"notes", s.notes}});
  }
  return dump(Json{{"scenarios", list}});
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::string tmpl = (dir / ("." + target.filename().string() + ".XXXXXX")).string();
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw ArgumentError("cannot create a temporary file next to '" + path + "'");
  const char* p = content.data();
  std::size_t left = content.size();
  bool ok = true;
  while (left > 0) {
    const ssize_t w = ::write(fd, p, left);
    if (w < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    p += w;
    left -= static_cast<std::size_t>(w);
  }
  ok = ::fsync(fd) == 0 && ok;
  ok = ::close(fd) == 0 && ok;
  if (ok) {
    std::error_code ec;
    // mkstemp creates 0600
    fs::permissions(tmpl, fs::perms::owner_read | fs::perms::owner_write | fs::perms::group_read |
                              fs::perms::others_read, ec);
    fs::rename(tmpl, target, ec);
    ok = !ec;
  }
  if (!ok) {
    std::remove(tmpl.c_str());
    throw ArgumentError("cannot write '" + path + "'");
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Resilience analysis of linear systems under loss of actuator authority", "resilience-kit"};
  app.require_subcommand(1);

  auto source_opts = [&](CLI::App* sub) {
    auto* sc = sub->add_option("--scenario", c.scenario, "built-in scenario name");
    auto* sf = sub->add_option("--system", c.system_file, "system description JSON file");
    sc->excludes(sf);
    sf->excludes(sc);
  };
  auto common_opts = [&](CLI::App* sub) {
    source_opts(sub);
    sub->add_option("--lost", c.lost, "lost actuators: labels or 1-based indices, comma separated");
    sub->add_option("--format", c.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--output,-o", c.output, "write to FILE instead of stdout");
    sub->add_option("--tol-rank", c.tol.rank, "rank threshold");
    sub->add_option("--tol-spectrum", c.tol.spectrum, "eigenvalue real-part tolerance");
    sub->add_option("--tol-imag", c.tol.imag, "imaginary-part tolerance");
    sub->add_option("--tol-containment,--tol-contain", c.tol.containment, "containment tolerance");
    sub->add_option("--tol-support", c.tol.support, "support-function tolerance");
  };

  CLI::App* check = app.add_subcommand("check", "resilient stabilizability and resilience verdicts");
  common_opts(check);

  CLI::App* reach = app.add_subcommand("reach", "inner approximation of the resiliently reachable tube");
  common_opts(reach);
  reach->add_option("--x0", c.x0, "initial state, comma separated");
  reach->add_option("--horizon", c.horizon, "horizon T in seconds");
  reach->add_option("--steps", c.steps, "number of steps N");
  reach->add_option("--dims", c.dims, "two 1-based state indices for the projection");

  CLI::App* bounds = app.add_subcommand("bounds", "reach-time and quantitative resilience bounds");
  common_opts(bounds);
  bounds->add_option("--x0", c.x0, "initial state, comma separated");
  bounds->add_option("--target", c.target, "oracle target state, comma separated");
  bounds->add_option("--samples", c.samples, "number of sampled Lyapunov pairs");
  auto* seed_opt = bounds->add_option("--seed", c.seed, "sampling seed (else RESILIENCE_KIT_SEED, else 0)");
  bounds->add_option("--threads", c.threads, "worker threads for pair sampling");
  bounds->add_flag("--oracle", c.oracle, "also compute grid reach times");
  bounds->add_option("--dt", c.dt, "oracle time step");
  bounds->add_option("--t-max", c.t_max, "oracle time limit");

  CLI::App* scen = app.add_subcommand("scenarios", "list built-in scenarios or print one as JSON");
  source_opts(scen);
  scen->add_option("--format", c.format, "json")->check(CLI::IsMember({"json", "csv", "svg"}));
  scen->add_option("--output,-o", c.output, "write to FILE instead of stdout");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (bounds->parsed() && seed_opt->count() == 0) {
      if (const char* env = std::getenv("RESILIENCE_KIT_SEED")) {
        std::size_t used = 0;
        try {
          c.seed = std::stoull(env, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != std::string(env).size() || env[0] == '-')
          throw ArgumentError(std::string("RESILIENCE_KIT_SEED is not an unsigned integer: '") + env + "'");
      }
    }
    validate(c);
    std::string doc;
    if (check->parsed()) doc = cmd_check(c);
    else if (reach->parsed()) doc = cmd_reach(c);
    else if (bounds->parsed()) doc = cmd_bounds(c);
    else doc = cmd_scenarios(c);
    if (c.output.empty()) {
      out << doc;
      out.flush();
    } else {
      write_file_atomic(c.output, doc);
    }
    return exit_ok;
  } catch (const HypothesisFailure& e) {
    err << "error: " << e.what() << "\n";
    return exit_precondition;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::argument:
      case ErrorKind::lookup:
      case ErrorKind::dimension:
        return exit_usage;
      default:
        return exit_numerical;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace reskit
