// Command line front end: one subcommand per experiment plus two one-shot
// dumps (evolve, kernel).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strichartz/harness/experiments.hpp"
#include "strichartz/strichartz.hpp"

namespace fs = std::filesystem;
namespace sh = strichartz::harness;
using namespace strichartz;

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "csv";
};

struct EvolveFlags {
  int N = 4;
  double t = 0.5;
  std::string kind = "nonelliptic";
  std::string field = "random";
  std::vector<int> mode;
  double oversample = 2.0;
};

struct KernelFlags {
  double h = 0.125;
  double t = 0.01;
  int z_factor = 16;
  int sign = 1;
};

EvolutionKind parse_kind(const std::string& s) {
  if (s == "nonelliptic") return EvolutionKind::non_elliptic();
  if (s == "elliptic") return EvolutionKind::elliptic();
  if (s == "line+") return EvolutionKind::line(+1);
  if (s == "line-") return EvolutionKind::line(-1);
  throw ConfigError("unknown evolution kind '" + s + "'");
}

std::optional<sh::Json> read_config(const GlobalFlags& g) {
  if (g.config.empty()) return std::nullopt;
  return sh::load_config_file(g.config);
}

fs::path out_dir(const GlobalFlags& g, const std::string& name) { return g.out.empty() ? fs::path("results") / name : fs::path(g.out); }

int run_experiment_command(sh::ExperimentId id, const std::string& name, const GlobalFlags& g) {
  sh::Json overrides = sh::Json::object();
  if (g.seed) overrides["seed"] = *g.seed;
  if (g.threads) overrides["threads"] = *g.threads;
  const sh::SweepConfig cfg = sh::resolve_config(id, read_config(g), overrides);
  const fs::path dir = g.out.empty() && !cfg.out.empty() ? fs::path(cfg.out) : out_dir(g, name);
  sh::probe_output_directory(dir);

  const sh::ExperimentResult res = sh::run_experiment(cfg);
  const std::string summary = sh::summary_text(res);
  std::cout << summary;
  sh::write_files_atomically(dir, sh::result_files(res, cfg, g.format));
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

int run_evolve(EvolveFlags f, const GlobalFlags& g) {
  if (auto j = read_config(g)) {
    if (j->contains("N")) f.N = (*j)["N"].get<int>();
    if (j->contains("t")) f.t = (*j)["t"].get<double>();
    if (j->contains("kind")) f.kind = (*j)["kind"].get<std::string>();
    if (j->contains("field")) f.field = (*j)["field"].get<std::string>();
    if (j->contains("mode")) f.mode = (*j)["mode"].get<std::vector<int>>();
    if (j->contains("oversample")) f.oversample = (*j)["oversample"].get<double>();
  }
  const EvolutionKind kind = parse_kind(f.kind);
  const Dim dim = kind.dim();
  const fs::path dir = out_dir(g, "evolve");
  sh::probe_output_directory(dir);

  SpectralField c(dim, f.N);
  if (f.field == "random") {
    rng::CounterStream stream(g.seed.value_or(0), 0);
    for (auto& z : c.coeffs()) z = stream.complex_normal();
  } else if (f.field == "unit") {
    if (f.mode.size() != static_cast<std::size_t>(dim_value(dim))) throw ConfigError("--mode needs one index per dimension");
    c.at({f.mode[0], dim == Dim::Two ? f.mode[1] : 0}) = 1.0;
  } else {
    throw ConfigError("unknown field '" + f.field + "' (random or unit)");
  }
  GridSpec grid = make_grid(std::max(1, f.N), f.oversample, 1.0);
  grid.N = f.N;
  const SpectralField e = evolve(c, f.t, kind);
  const PhysicalField u = synthesize(e, grid);

  const int M = grid.M_x;
  std::string coeffs, samples;
  const bool csv = g.format == "csv";
  if (!csv && g.format != "json") throw ConfigError("unknown format '" + g.format + "'");
  auto num = sh::format_number;
  if (csv) {
    coeffs = "m,n,re,im\n";
    samples = "jx,jy,x,y,re,im\n";
  }
  const auto ec = e.coeffs();
  for (std::size_t i = 0; i < ec.size(); ++i) {
    const auto k = e.index_of(i);
    const std::string row = std::to_string(k.m) + "," + std::to_string(k.n) + "," + num(ec[i].real()) + "," + num(ec[i].imag());
    coeffs += csv ? row + "\n" : std::string(coeffs.empty() ? "[" : ",") + "\n  [" + row + "]";
  }
  const auto us = u.samples();
  for (std::size_t i = 0; i < us.size(); ++i) {
    const int jx = dim == Dim::Two ? static_cast<int>(i) / M : static_cast<int>(i);
    const int jy = dim == Dim::Two ? static_cast<int>(i) % M : 0;
    const std::string row = std::to_string(jx) + "," + std::to_string(jy) + "," + num(kTwoPi * jx / M) + "," + num(kTwoPi * jy / M) +
                            "," + num(us[i].real()) + "," + num(us[i].imag());
    samples += csv ? row + "\n" : std::string(samples.empty() ? "[" : ",") + "\n  [" + row + "]";
  }
  if (!csv) {
    coeffs += "\n]\n";
    samples += "\n]\n";
  }
  const std::string ext = csv ? ".csv" : ".json";
  sh::write_files_atomically(dir, {{"coefficients" + ext, coeffs}, {"samples" + ext, samples}});
  std::cout << "evolved " << kind.name() << " N=" << f.N << " t=" << num(f.t) << " L2=" << num(hs_norm(e, 0.0)) << " -> "
            << dir.string() << "\n";
  return 0;
}

int run_kernel(KernelFlags f, const GlobalFlags& g) {
  if (auto j = read_config(g)) {
    if (j->contains("h")) f.h = (*j)["h"].get<double>();
    if (j->contains("t")) f.t = (*j)["t"].get<double>();
    if (j->contains("z_factor")) f.z_factor = (*j)["z_factor"].get<int>();
    if (j->contains("sign")) f.sign = (*j)["sign"].get<int>();
  }
  if (!(f.h > 0.0 && f.h <= 1.0)) throw DomainError("h must lie in (0, 1]");
  const fs::path dir = out_dir(g, "kernel");
  sh::probe_output_directory(dir);
  const int Z = f.z_factor * (2 * kernel_radius(f.h) + 1);
  const KernelTable table = kernel_1d(f.t, f.h, BumpProfile{}, Z, f.sign >= 0 ? +1 : -1);
  const bool csv = g.format == "csv";
  if (!csv && g.format != "json") throw ConfigError("unknown format '" + g.format + "'");
  auto num = sh::format_number;
  std::string body = csv ? "z,re,im\n" : "";
  const auto v = table.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row = num(kTwoPi * static_cast<double>(i) / static_cast<double>(v.size())) + "," + num(v[i].real()) + "," + num(v[i].imag());
    body += csv ? row + "\n" : std::string(body.empty() ? "[" : ",") + "\n  [" + row + "]";
  }
  if (!csv) body += "\n]\n";
  const double sup = table.sup();
  sh::write_files_atomically(dir, {{std::string("kernel") + (csv ? ".csv" : ".json"), body}});
  std::cout << "kernel h=" << num(f.h) << " t=" << num(f.t) << " n_max=" << kernel_radius(f.h) << " sup=" << num(sup)
            << " sqrt(t)*sup=" << num(std::sqrt(std::fabs(f.t)) * sup) << " -> " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical Strichartz constants for the Schrodinger flow with symbol m^2 - n^2 on the 2-torus"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", g.config, "JSON configuration file (nested keys, merged over the defaults)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory (default results/<subcommand>)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "record format")->check(CLI::IsMember({"csv", "json"}));

  struct Entry {
    const char* name;
    sh::ExperimentId id;
    const char* help;
  };
  const std::vector<Entry> experiments = {
      {"e1-strichartz", sh::ExperimentId::E1, "full-box Strichartz constant against N"},
      {"e2-lp", sh::ExperimentId::E2, "frequency-localized constant against 1/h, full and short windows"},
      {"e3-kernel", sh::ExperimentId::E3, "dispersive decay of the localized kernels"},
      {"e4-optimality", sh::ExperimentId::E4, "stationary bump family against lambda"},
      {"e5-sobolev", sh::ExperimentId::E5, "one-dimensional Sobolev scaling of the bump"},
      {"e6-elliptic", sh::ExperimentId::E6, "localized constants, elliptic against non-elliptic"},
  };
  for (const auto& e : experiments) app.add_subcommand(e.name, e.help);

  EvolveFlags ef;
  auto* evolve = app.add_subcommand("evolve", "evolve one field and dump coefficients and samples");
  evolve->add_option("--N", ef.N, "truncation radius");
  evolve->add_option("--t", ef.t, "time");
  evolve->add_option("--kind", ef.kind, "nonelliptic, elliptic, line+ or line-");
  evolve->add_option("--field", ef.field, "random or unit");
  evolve->add_option("--mode", ef.mode, "frequency of the unit field")->expected(1, 2);
  evolve->add_option("--oversample", ef.oversample, "spatial oversampling");

  KernelFlags kf;
  auto* kernel = app.add_subcommand("kernel", "tabulate the localized 1D kernel K1 (or K2 with --sign -1)");
  kernel->set_help_flag("--help", "print this help message and exit");
  kernel->add_option("--h", kf.h, "semiclassical scale in (0, 1]");
  kernel->add_option("--t", kf.t, "time");
  kernel->add_option("--z-factor", kf.z_factor, "z-grid size per kernel mode");
  kernel->add_option("--sign", kf.sign, "+1 for K1, -1 for K2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;

  try {
    if (evolve->parsed()) return run_evolve(ef, g);
    if (kernel->parsed()) return run_kernel(kf, g);
    for (const auto& e : experiments)
      if (app.get_subcommand(e.name)->parsed()) return run_experiment_command(e.id, e.name, g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
