// Command-line front end: samplers, couplings, sweeps, bounds and the
// verification experiments. Exit codes: 0 pass, 1 verdict failure,
// 2 usage or parameter error, 3 runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "hsc/bounds.hpp"
#include "hsc/coupling.hpp"
#include "hsc/harness.hpp"
#include "hsc/io.hpp"
#include "hsc/percolation.hpp"
#include "hsc/sampling.hpp"

namespace {

using hsc::harness::ExperimentConfig;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flags are kept as raw text and applied on top of the config file, so the
// file and the command line share one parser.
struct Flags {
  std::map<std::string, std::string> raw;
  std::string config_path;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { raw[key] = v; }, help);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot open config file " + config_path);
      cfg.apply(hsc::harness::parse_key_values(in));
    }
    cfg.apply(raw);
    return cfg;
  }
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "key=value config file; flags override it");
  f.add(app, "--dim", "dim", "dimension (1, 2 or 3)");
  f.add(app, "--radius", "radius", "exclusion / connection radius R");
  f.add(app, "--lambda", "lambda", "hard-sphere activity");
  f.add(app, "--alpha", "alpha", "Boolean model intensity");
  f.add(app, "--box", "box", "cube as 'side' or 'lo,hi'");
  f.add(app, "--seed", "seed", "master seed");
  f.add(app, "--replicas", "replicas", "number of replicas");
  f.add(app, "--n-mc", "n_mc", "Monte Carlo draws per thinning decision");
  f.add(app, "--out", "out", "output path (default stdout)");
  f.add(app, "--threads", "threads", "worker threads");
  f.add(app, "--oracle", "oracle", "thinning oracle: mc or exact1d");
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw UsageError("cannot open output file " + path);
    os = &file;
  }
};

template <template <std::size_t> class Job>
int dispatch(const ExperimentConfig& cfg) {
  switch (cfg.dim) {
    case 1: return Job<1>::run(cfg);
    case 2: return Job<2>::run(cfg);
    case 3: return Job<3>::run(cfg);
  }
  throw UsageError("dim must be 1, 2 or 3");
}

std::string sample_kind;

template <std::size_t D>
struct SampleJob {
  static int run(const ExperimentConfig& cfg) {
    const hsc::Region<D> region(hsc::Box<D>::cube(cfg.box_lo, cfg.box_hi));
    const auto boundary = hsc::io::parse_points<D>(cfg.boundary1);
    Output out(cfg.out);
    hsc::io::write_samples_header(*out.os, D);
    const auto records = hsc::harness::map_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
      hsc::RngStream rng(cfg.seed, i);
      hsc::io::SampleRecord<D> rec{i, cfg.seed, {}, {}, {}};
      if (sample_kind == "poisson") {
        rec.points1 = hsc::sample_poisson(region, cfg.lambda, rng);
      } else if (sample_kind == "hs-rejection") {
        rec.points1 = hsc::sample_hard_sphere_rejection(region, boundary, cfg.lambda, cfg.radius, rng,
                                                        cfg.max_attempts);
      } else {
        hsc::ThinnedPair<D> t;
        hsc::harness::detail::with_oracle<D>(cfg, [&](auto& proto) {
          auto oracle = proto;
          t = hsc::thin_to_hard_sphere(region, boundary, cfg.lambda, cfg.radius, oracle, rng);
        });
        rec.points1 = std::move(t.kept);
        rec.points2 = std::move(t.dominating);
      }
      return rec;
    });
    for (const auto& r : records) hsc::io::write_sample(*out.os, r);
    return 0;
  }
};

template <std::size_t D>
struct CoupleJob {
  static int run(const ExperimentConfig& cfg) {
    const hsc::Region<D> region(hsc::Box<D>::cube(cfg.box_lo, cfg.box_hi));
    const auto c1 = hsc::io::parse_points<D>(cfg.boundary1);
    const auto c2 = hsc::io::parse_points<D>(cfg.boundary2);
    Output out(cfg.out);
    hsc::io::write_samples_header(*out.os, D);
    const auto records = hsc::harness::map_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
      hsc::RngStream rng(cfg.seed, i);
      hsc::CouplingSample<D> s;
      hsc::harness::detail::with_oracle<D>(cfg, [&](auto& proto) {
        auto oracle = proto;
        s = hsc::twisted_couple(region, c1, c2, cfg.lambda, cfg.radius, oracle, rng);
      });
      return hsc::io::SampleRecord<D>{i, cfg.seed, s.xi1, s.xi2, s.xi3};
    });
    for (const auto& r : records) hsc::io::write_sample(*out.os, r);
    return 0;
  }
};

template <std::size_t D>
struct SweepJob {
  static int run(const ExperimentConfig& cfg) {
    if (cfg.box_sides.empty() || cfg.alpha_grid.empty())
      throw UsageError("percolation sweep needs --box-sides and --alpha-grid");
    const auto rows = hsc::critical_intensity_sweep<D>(cfg.radius, cfg.box_sides, cfg.alpha_grid,
                                                       cfg.replicas, cfg.seed);
    Output out(cfg.out);
    hsc::io::write_sweep_csv(*out.os, rows);
    return 0;
  }
};

// Connection probability from the face x0 = 0 to a point at distance t
// through a Poisson process on [0, t] x [0, 1]^(D-1).
template <std::size_t D>
struct DecayDataJob {
  static std::vector<hsc::SweepRow> rows(const ExperimentConfig& cfg) {
    std::vector<hsc::SweepRow> out;
    const double alpha = cfg.boolean_intensity();
    for (std::size_t k = 0; k < cfg.distances.size(); ++k) {
      const double t = cfg.distances[k];
      hsc::Box<D> b = hsc::Box<D>::cube(0.0, 1.0);
      b.hi[0] = t;
      hsc::Box<D> face = b;
      face.hi[0] = 0.0;
      hsc::Point<D> x;
      x.fill(0.5);
      x[0] = t;
      hsc::RngStream rng(cfg.seed, k);
      const auto e = hsc::connection_probability<D>(
          b, hsc::Target<D>{face}, hsc::Target<D>{hsc::Configuration<D>(std::vector<hsc::Point<D>>{x})},
          alpha, cfg.radius, cfg.replicas, rng);
      out.push_back({D, cfg.radius, alpha, t, cfg.replicas, "connection_probability", e.mean, e.std_error});
    }
    return out;
  }
};

int print_report(const hsc::harness::ExperimentReport& rep, const std::string& path) {
  Output out(path);
  rep.write(*out.os);
  if (!path.empty()) rep.write(std::cout);
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-sphere disagreement coupling toolkit"};
  app.require_subcommand(1);
  Flags flags;

  auto* sample = app.add_subcommand("sample", "draw configurations (poisson | hs-rejection | hs-thinning)");
  sample->add_option("kind", sample_kind, "sampler")->required()->check(
      CLI::IsMember({"poisson", "hs-rejection", "hs-thinning"}));
  add_common(sample, flags);
  flags.add(sample, "--boundary", "boundary1", "boundary points 'x,y;x,y'");

  std::string couple_kind;
  auto* couple = app.add_subcommand("couple", "draw coupled triples (twisted)");
  couple->add_option("kind", couple_kind, "coupling")->required()->check(CLI::IsMember({"twisted"}));
  add_common(couple, flags);
  flags.add(couple, "--boundary1", "boundary1", "first boundary condition");
  flags.add(couple, "--boundary2", "boundary2", "second boundary condition");

  std::string perc_kind;
  auto* perc = app.add_subcommand("percolation", "Boolean model sweeps");
  perc->add_option("kind", perc_kind, "sweep")->required()->check(CLI::IsMember({"sweep"}));
  add_common(perc, flags);
  flags.add(perc, "--box-sides", "box_sides", "comma-separated box sides");
  flags.add(perc, "--alpha-grid", "alpha_grid", "comma-separated intensities");

  std::string decay_kind, decay_in, decay_stat;
  auto* decay = app.add_subcommand("decay", "exponential decay fits");
  decay->add_option("kind", decay_kind, "action")->required()->check(CLI::IsMember({"fit"}));
  add_common(decay, flags);
  decay->add_option("--in", decay_in, "sweep CSV whose box_side column holds distances");
  decay->add_option("--statistic", decay_stat, "only fit rows with this statistic");
  flags.add(decay, "--distances", "distances", "distances to simulate when no --in is given");

  std::string bounds_kind, bounds_format = "csv";
  auto* bounds = app.add_subcommand("bounds", "tables of known constants");
  bounds->add_option("kind", bounds_kind, "table")->required()->check(CLI::IsMember({"table"}));
  add_common(bounds, flags);
  bounds->add_option("--format", bounds_format, "csv or text")->check(CLI::IsMember({"csv", "text"}));

  std::string experiment;
  auto* verify = app.add_subcommand("verify", "run a verification experiment and report verdicts");
  verify->add_option("experiment", experiment, "experiment name")->check(CLI::IsMember(
      {"marginal", "disagreement-bound", "sensitivity-decay", "uniqueness-sweep", "critical-sweep"}));
  add_common(verify, flags);
  flags.add(verify, "--mode", "mode", "marginal test mode: thinning or twisted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    ExperimentConfig cfg = flags.resolve();
    if (sample->parsed()) {
      cfg.validate();
      return dispatch<SampleJob>(cfg);
    }
    if (couple->parsed()) {
      cfg.validate();
      return dispatch<CoupleJob>(cfg);
    }
    if (perc->parsed()) {
      cfg.validate();
      return dispatch<SweepJob>(cfg);
    }
    if (decay->parsed()) {
      std::vector<hsc::SweepRow> rows;
      if (!decay_in.empty()) {
        std::ifstream in(decay_in);
        if (!in) throw UsageError("cannot open " + decay_in);
        rows = hsc::io::read_sweep_csv(in);
      } else {
        cfg.validate();
        if (cfg.distances.empty()) throw UsageError("decay fit needs --in or --distances");
        switch (cfg.dim) {
          case 1: rows = DecayDataJob<1>::rows(cfg); break;
          case 2: rows = DecayDataJob<2>::rows(cfg); break;
          case 3: rows = DecayDataJob<3>::rows(cfg); break;
        }
      }
      std::vector<std::pair<double, hsc::Estimate>> pts;
      for (const auto& r : rows)
        if (decay_stat.empty() || r.statistic == decay_stat)
          pts.emplace_back(r.box_side, hsc::Estimate{r.value, r.std_error, r.replicas, hsc::Method::mc_plain});
      if (pts.empty()) throw UsageError("no rows with statistic '" + decay_stat + "'");
      const hsc::DecayFit fit = hsc::fit_decay(pts);
      Output out(cfg.out);
      if (decay_in.empty()) hsc::io::write_sweep_csv(*out.os, rows);
      const auto [lo, hi] = fit.kappa_interval(1.96);
      *out.os << "# fit K=" << hsc::io::format_double(fit.K) << " kappa=" << hsc::io::format_double(fit.kappa)
              << " kappa_std_error=" << hsc::io::format_double(fit.kappa_std_error) << " kappa_95=["
              << hsc::io::format_double(lo) << ", " << hsc::io::format_double(hi) << "] points=" << fit.points
              << '\n';
      return 0;
    }
    if (bounds->parsed()) {
      std::vector<hsc::BoundsRow> rows;
      if (cfg.dim != 1) rows = hsc::bounds_table(1, cfg.radius);
      const auto more = hsc::bounds_table(cfg.dim, cfg.radius);
      rows.insert(rows.end(), more.begin(), more.end());
      Output out(cfg.out);
      if (bounds_format == "csv") hsc::io::write_bounds_csv(*out.os, rows);
      else hsc::io::write_bounds_text(*out.os, rows);
      return 0;
    }
    if (verify->parsed()) {
      if (!experiment.empty()) cfg.experiment = experiment;
      if (cfg.experiment.empty()) throw UsageError("verify needs an experiment name or config key");
      return print_report(hsc::harness::run_experiment(cfg), cfg.out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
