#include "lefschetz/cli.hpp"

#include "lefschetz/meyer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace lefschetz {

namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

template <typename T>
T get_value(const pt::ptree& section, const std::string& where, const std::string& key) {
  const std::string raw = section.get<std::string>(key);
  std::istringstream in(raw);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError(where + "." + key + ": cannot read '" + raw + "'");
  }
  return value;
}

std::uint64_t get_seed(const pt::ptree& section, const std::string& where, const std::string& key) {
  const std::string raw = section.get<std::string>(key);
  if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(where + "." + key + ": seed must be a nonnegative integer, got '" + raw + "'");
  }
  try {
    return std::stoull(raw);
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + ": seed out of range: '" + raw + "'");
  }
}

void reject_unknown(const pt::ptree& section, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, unused] : section) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + where + "]");
  }
}

double json_number(double v) { return v; }

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return json_number(v);
  return nullptr;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("config key '" + name + "' must sit inside a [section]");
    }
    if (name == "flow") {
      reject_unknown(section, name, {"dt_init", "dt_max", "tol", "t_max", "step_rule", "monitor_every",
                                     "dt_floor", "stability_safety"});
      if (section.count("dt_init")) cfg.flow.dt_init = get_value<double>(section, name, "dt_init");
      if (section.count("dt_max")) cfg.flow.dt_max = get_value<double>(section, name, "dt_max");
      if (section.count("tol")) cfg.flow.tol = get_value<double>(section, name, "tol");
      if (section.count("t_max")) cfg.flow.t_max = get_value<double>(section, name, "t_max");
      if (section.count("monitor_every")) cfg.flow.monitor_every = get_value<int>(section, name, "monitor_every");
      if (section.count("dt_floor")) cfg.flow.dt_floor = get_value<double>(section, name, "dt_floor");
      if (section.count("stability_safety")) {
        cfg.flow.stability_safety = get_value<double>(section, name, "stability_safety");
      }
      if (section.count("step_rule")) {
        try {
          cfg.flow.step_rule = parse_step_rule(section.get<std::string>("step_rule"));
        } catch (const FlowError& e) {
          throw ConfigError(std::string("flow.step_rule: ") + e.what());
        }
      }
    } else if (name == "init") {
      reject_unknown(section, name, {"amplitude", "seed", "modes"});
      if (section.count("amplitude")) cfg.init_amplitude = get_value<double>(section, name, "amplitude");
      if (section.count("seed")) cfg.init_seed = get_seed(section, name, "seed");
      if (section.count("modes")) cfg.init_modes = get_value<int>(section, name, "modes");
    } else if (name == "family") {
      reject_unknown(section, name, {"base", "size", "amplitude", "seed", "fingerprint_modes"});
      if (section.count("base")) {
        try {
          cfg.base = parse_base_kind(section.get<std::string>("base"));
        } catch (const FlowError& e) {
          throw ConfigError(std::string("family.base: ") + e.what());
        }
      }
      if (section.count("size")) cfg.base_size = get_value<int>(section, name, "size");
      if (section.count("amplitude")) cfg.family_amplitude = get_value<double>(section, name, "amplitude");
      if (section.count("seed")) cfg.family_seed = get_seed(section, name, "seed");
      if (section.count("fingerprint_modes")) {
        cfg.fingerprint_modes = get_value<int>(section, name, "fingerprint_modes");
      }
    } else {
      throw ConfigError("unknown config section [" + name + "]");
    }
  }
  try {
    cfg.flow.check();
  } catch (const FlowError& e) {
    throw ConfigError(std::string("flow: ") + e.what());
  }
  if (cfg.init_amplitude < 0 || cfg.family_amplitude < 0) throw ConfigError("amplitudes must be nonnegative");
  if (cfg.init_modes < 1 || cfg.fingerprint_modes < 1) throw ConfigError("mode counts must be >= 1");
  const int min_size = cfg.base == BaseKind::loop ? 3 : cfg.base == BaseKind::disk_grid ? 2 : 0;
  if (cfg.base_size < min_size) {
    throw ConfigError("family.size must be >= " + std::to_string(min_size) + " for base " + to_string(cfg.base));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

unsigned thread_count_from_env() {
  const char* raw = std::getenv("LEFSCHETZ_THREADS");
  unsigned n = 0;
  if (raw && *raw) {
    try {
      n = static_cast<unsigned>(std::stoul(raw));
    } catch (const std::exception&) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

namespace {

std::shared_ptr<const TriSurface> load_valid_surface(const std::string& path) {
  auto surface = std::make_shared<const TriSurface>(load_trisurf(path));
  const ValidationReport report = validate(*surface);
  if (!report.passed()) throw MeshError("mesh '" + path + "' failed validation: " + report.summary());
  return surface;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_flow(const std::string& mesh_path, const RunConfig& cfg, const std::string& out_dir,
             std::ostream& out) {
  auto surface = load_valid_surface(mesh_path);
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(surface->num_vertices());
  if (cfg.init_amplitude > 0) {
    u0 = cfg.init_amplitude * low_frequency_field(*surface, cfg.init_seed, cfg.init_modes);
  }
  const ConformalState state0{surface, u0, 0.0};
  const TargetCurvature target = TargetCurvature::uniform(state0);
  const FlowResult result = run_flow(state0, target, cfg.flow);
  const FlowTrace& trace = result.trace;

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "trace.csv", trace_csv(trace));
  nlohmann::ordered_json summary;
  summary["converged"] = trace.terminated == Termination::converged;
  summary["terminated"] = to_string(trace.terminated);
  summary["t_final"] = result.state.time;
  summary["steps"] = trace.steps;
  summary["final_sup_dev"] = trace.samples.back().sup_dev;
  summary["fitted_rate"] = finite_or_null(trace.fitted_rate);
  summary["r2"] = finite_or_null(trace.fitted_r2);
  write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

  out << "terminated=" << to_string(trace.terminated) << " t_final=" << result.state.time
      << " steps=" << trace.steps << " fitted_rate=" << trace.fitted_rate << '\n';
  return trace.terminated == Termination::converged ? 0 : 2;
}

int cmd_family(const std::string& mesh_path, const RunConfig& cfg, const std::string& out_dir,
               std::ostream& out, std::ostream& err) {
  auto surface = load_valid_surface(mesh_path);
  BaseSample base;
  switch (cfg.base) {
    case BaseKind::loop: base = BaseSample::loop(cfg.base_size); break;
    case BaseKind::disk_grid: base = BaseSample::disk_grid(cfg.base_size); break;
    case BaseKind::sphere_mesh: base = BaseSample::sphere_mesh(cfg.base_size); break;
  }
  FiberFamily family = make_family(surface, base, cfg.family_amplitude, cfg.family_seed);
  family = run_family(std::move(family), cfg.flow, thread_count_from_env());

  std::size_t converged = 0;
  for (const auto& t : family.traces) converged += t.terminated == Termination::converged;
  if (converged != family.traces.size()) {
    for (std::size_t p = 0; p < family.traces.size(); ++p) {
      if (family.traces[p].terminated != Termination::converged) {
        err << "error: fiber " << p << " stopped with " << to_string(family.traces[p].terminated) << '\n';
        return 1;
      }
    }
  }

  const EnvelopeFit envelope = uniform_envelope(family);
  std::vector<Fingerprint> prints;
  for (const auto& s : family.states) prints.push_back(fingerprint(s, cfg.fingerprint_modes));
  std::optional<LoopContinuity> continuity;
  if (family.base.kind == BaseKind::loop) continuity = loop_continuity(family, cfg.fingerprint_modes);
  export_family(family, envelope, prints, continuity, out_dir);

  out << "fibers=" << family.traces.size() << " converged=" << converged << " c0=" << envelope.c0
      << " rate=" << envelope.rate << " r2=" << envelope.r2
      << " bound_holds=" << (envelope.bound_holds ? "true" : "false");
  if (continuity) out << " closed=" << (continuity->closed ? "true" : "false");
  out << '\n';
  return 0;
}

int cmd_signature(const std::string& word_path, const std::string& out_dir, std::ostream& out,
                  std::ostream& err) {
  const MonodromyWord word = load_word(word_path);
  const SymplecticSpace space(word.genus);
  SignatureReport report;
  try {
    report = fibration_signature(space, word);
  } catch (const NotAFactorizationError& e) {
    err << "error: " << e.what() << "; product matrix:\n" << e.product() << '\n';
    return 3;
  }
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "report.json", report_json(report, word));
  out << "sigma=" << report.sigma << " c1=" << to_display_string(report.c1_pairing)
      << " delta=" << report.delta_pairing << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normalized fibered Ricci flow on discrete surfaces and signatures of achiral "
               "Lefschetz fibrations"};
  app.name("lefschetz");
  app.set_version_flag("--version", std::string("lefschetz ") + kVersion);
  app.require_subcommand(1);

  std::string mesh_path, word_path, config_path, out_dir = ".";

  auto* flow = app.add_subcommand("flow", "Run the normalized flow on one mesh");
  flow->add_option("mesh", mesh_path, "Mesh file (trisurf format)")->required();
  flow->add_option("--config", config_path, "Config file (key = value sections)");
  flow->add_option("--out", out_dir, "Output directory");

  auto* family = app.add_subcommand("family", "Run a fibered family over a sampled base");
  family->add_option("mesh", mesh_path, "Mesh file (trisurf format)")->required();
  family->add_option("--config", config_path, "Config file (key = value sections)");
  family->add_option("--out", out_dir, "Output directory");

  auto* signature = app.add_subcommand("signature", "Signature of a monodromy factorization");
  signature->add_option("word", word_path, "Word file")->required();
  signature->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "lefschetz " << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*signature) return cmd_signature(word_path, out_dir, out, err);
    const RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (*flow) return cmd_flow(mesh_path, cfg, out_dir, out);
    return cmd_family(mesh_path, cfg, out_dir, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lefschetz
