#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hsc/bounds.hpp"
#include "hsc/coupling.hpp"
#include "hsc/hardcore.hpp"
#include "hsc/intervals.hpp"
#include "hsc/io.hpp"
#include "hsc/partition.hpp"
#include "hsc/percolation.hpp"
#include "hsc/sampling.hpp"
#include "hsc/stats.hpp"

namespace hsc::harness {

/// Flat key=value settings; '#' starts a comment. Later keys win.
inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

struct ExperimentConfig {
  std::string experiment;  // marginal | disagreement-bound | sensitivity-decay | uniqueness-sweep | critical-sweep
  std::size_t dim = 1;
  double radius = 1.0;
  double lambda = 1.0;
  std::optional<double> alpha;  // Boolean intensity; defaults to lambda
  double box_lo = 0.0, box_hi = 1.0;
  std::string boundary1, boundary2;  // "x,y;x,y"
  std::size_t replicas = 1000;
  std::size_t n_mc = 20000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string oracle = "mc";     // mc | exact1d
  std::string mode = "thinning";  // thinning | twisted
  std::string out;
  std::size_t max_attempts = 1000000;
  std::vector<double> window_lo, window_hi;
  std::vector<double> distances;
  double point_gap = 0.5;  // distance of the extra boundary point from the box, in units of R
  std::vector<double> box_sides;
  std::vector<double> alpha_grid;
  double lattice_spacing = 1.01;  // in units of R
  double oracle_mass_limit = 12.0;
  std::size_t connection_replicas = 0;  // 0: same as replicas
  double significance = 0.01;
  double z = 3.0;
  std::optional<double> crossing_lo, crossing_hi;
  std::optional<double> spanning_max;
  std::vector<double> expected_counts;  // optional reference count law

  double boolean_intensity() const { return alpha ? *alpha : lambda; }
  std::size_t rhs_replicas() const { return connection_replicas ? connection_replicas : replicas; }

  void set(const std::string& key, const std::string& v) {
    const auto num = [&] { return io::parse_double(v); };
    const auto count = [&] {
      const double d = num();
      if (d < 0 || d != std::floor(d)) throw std::invalid_argument(key + " must be a non-negative integer");
      return static_cast<std::size_t>(d);
    };
    if (key == "experiment") experiment = v;
    else if (key == "dim") dim = count();
    else if (key == "radius") radius = num();
    else if (key == "lambda") lambda = num();
    else if (key == "alpha") alpha = num();
    else if (key == "box") {
      const auto b = io::parse_list(v);
      if (b.size() == 1) box_lo = 0.0, box_hi = b[0];
      else if (b.size() == 2) box_lo = b[0], box_hi = b[1];
      else throw std::invalid_argument("box expects 'side' or 'lo,hi'");
    } else if (key == "boundary1") boundary1 = v;
    else if (key == "boundary2") boundary2 = v;
    else if (key == "replicas") replicas = count();
    else if (key == "n_mc") n_mc = count();
    else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(v));
    else if (key == "threads") threads = count();
    else if (key == "oracle") oracle = v;
    else if (key == "mode") mode = v;
    else if (key == "out") out = v;
    else if (key == "max_attempts") max_attempts = count();
    else if (key == "window_lo") window_lo = io::parse_list(v);
    else if (key == "window_hi") window_hi = io::parse_list(v);
    else if (key == "distances") distances = io::parse_list(v);
    else if (key == "point_gap") point_gap = num();
    else if (key == "box_sides") box_sides = io::parse_list(v);
    else if (key == "alpha_grid") alpha_grid = io::parse_list(v);
    else if (key == "lattice_spacing") lattice_spacing = num();
    else if (key == "oracle_mass_limit") oracle_mass_limit = num();
    else if (key == "connection_replicas") connection_replicas = count();
    else if (key == "significance") significance = num();
    else if (key == "z") z = num();
    else if (key == "crossing_lo") crossing_lo = num();
    else if (key == "crossing_hi") crossing_hi = num();
    else if (key == "spanning_max") spanning_max = num();
    else if (key == "expected_counts") expected_counts = io::parse_list(v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
    echo_[key] = v;
  }

  void apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) set(k, v);
  }

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be >= 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
    if (!(box_hi > box_lo)) throw std::invalid_argument("box must have positive side");
    if (oracle != "mc" && oracle != "exact1d") throw std::invalid_argument("oracle must be mc or exact1d");
    if (oracle == "exact1d" && dim != 1) throw std::invalid_argument("exact1d oracle requires dim = 1");
    if (mode != "thinning" && mode != "twisted") throw std::invalid_argument("mode must be thinning or twisted");
  }

  /// Every setting that was given explicitly, plus the resolved core values.
  std::vector<std::pair<std::string, std::string>> echo() const {
    std::map<std::string, std::string> e = echo_;
    e["experiment"] = experiment;
    e["dim"] = std::to_string(dim);
    e["radius"] = io::format_double(radius);
    e["lambda"] = io::format_double(lambda);
    e["replicas"] = std::to_string(replicas);
    e["seed"] = std::to_string(seed);
    e["oracle"] = oracle;
    e["significance"] = io::format_double(significance);
    e["z"] = io::format_double(z);
    e.erase("threads");  // results do not depend on it
    e.erase("out");
    return {e.begin(), e.end()};
  }

 private:
  std::map<std::string, std::string> echo_;
};

inline ExperimentConfig load_config(std::istream& is) {
  ExperimentConfig c;
  c.apply(parse_key_values(is));
  return c;
}

struct Statistic {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::optional<double> p_value;
};

struct Verdict {
  std::string check;      // named invariant or criterion
  bool pass = false;
  std::string tolerance;  // what the check was held to
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Statistic> statistics;
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;
  double throughput = 0.0;  // samples per second
  std::size_t samples = 0;

  bool passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }

  void add(std::string name, double value, double se = 0.0, std::optional<double> p = std::nullopt) {
    statistics.push_back({std::move(name), value, se, p});
  }
  void add(std::string name, const Estimate& e) { add(std::move(name), e.mean, e.std_error); }
  void verdict(std::string check, bool pass, std::string tolerance, std::string detail = {}) {
    verdicts.push_back({std::move(check), pass, std::move(tolerance), std::move(detail)});
  }

  void write(std::ostream& os, bool with_timing = true) const {
    os << "# hsc-report v1\n";
    os << "experiment " << experiment << '\n';
    for (const auto& [k, v] : config) os << "config " << k << '=' << v << '\n';
    for (const auto& s : statistics) {
      os << "stat " << s.name << " value=" << io::format_double(s.value)
         << " std_error=" << io::format_double(s.std_error);
      if (s.p_value) os << " p_value=" << io::format_double(*s.p_value);
      os << '\n';
    }
    for (const auto& v : verdicts) {
      os << "verdict " << (v.pass ? "PASS " : "FAIL ") << v.check << " [" << v.tolerance << ']';
      if (!v.detail.empty()) os << ' ' << v.detail;
      os << '\n';
    }
    os << "result " << (passed() ? "PASS" : "FAIL") << '\n';
    if (with_timing)
      os << "timing wall_seconds=" << wall_seconds << " samples=" << samples
         << " throughput=" << throughput << '\n';
  }

  std::string text(bool with_timing = false) const {
    std::ostringstream os;
    write(os, with_timing);
    return os.str();
  }
};

/// Evaluates f(0..n-1) on up to `threads` workers. Results land in index
/// order, so the output does not depend on the worker count.
template <class F>
auto map_replicas(std::size_t n, std::size_t threads, F&& f) {
  using T = std::invoke_result_t<F&, std::size_t>;
  std::vector<T> out(n);
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// Stream id blocks, so coupling and oracle draws never share a stream.
inline constexpr std::uint64_t coupling_streams = 0;
inline constexpr std::uint64_t oracle1_streams = std::uint64_t{1} << 32;
inline constexpr std::uint64_t oracle2_streams = std::uint64_t{2} << 32;
inline constexpr std::uint64_t boolean_streams = std::uint64_t{3} << 32;

namespace detail {

inline std::string fmt(double v) { return io::format_double(v); }

template <std::size_t D>
Box<D> cube(const ExperimentConfig& c) {
  return Box<D>::cube(c.box_lo, c.box_hi);
}

template <std::size_t D>
Box<D> window(const ExperimentConfig& c, const Box<D>& fallback) {
  if (c.window_lo.empty() && c.window_hi.empty()) return fallback;
  Box<D> w;
  for (std::size_t i = 0; i < D; ++i) {
    const auto pick = [&](const std::vector<double>& v) {
      if (v.size() == 1) return v[0];
      if (v.size() == D) return v[i];
      throw std::invalid_argument("window bounds need 1 or dim values");
    };
    w.lo[i] = pick(c.window_lo);
    w.hi[i] = pick(c.window_hi);
  }
  return w;
}

template <std::size_t D>
std::size_t count_in(const Configuration<D>& c, const Box<D>& b) {
  return static_cast<std::size_t>(
      std::count_if(c.begin(), c.end(), [&](const Point<D>& p) { return b.contains(p); }));
}

/// Nearest-neighbour distance of the first point in the order, one value per
/// configuration so that samples stay independent.
template <std::size_t D>
std::optional<double> first_nn(const Configuration<D>& c) {
  if (c.size() < 2) return std::nullopt;
  double best = INFINITY;
  for (std::size_t k = 1; k < c.size(); ++k) best = std::min(best, distance(c[0], c[k]));
  return best;
}

inline std::vector<double> poisson_pmf(double mean) {
  std::vector<double> p;
  const std::size_t top = static_cast<std::size_t>(mean + 12.0 * std::sqrt(mean + 1.0) + 12.0);
  double term = std::exp(-mean);
  for (std::size_t k = 0; k <= top; ++k) {
    p.push_back(term);
    term *= mean / static_cast<double>(k + 1);
  }
  return p;
}

/// Exact count law of the 1D hard-rod model on the region given the boundary.
inline std::vector<double> exact_count_law(const Region<1>& r, const Configuration<1>& boundary,
                                           double lambda, double R) {
  const IntervalSet s = to_intervals(r).subtract(neighbourhood(boundary, R));
  HardRodSeries series(s, R);
  return series.count_distribution(lambda, std::min<std::size_t>(series.max_count(), 64));
}

/// Two-sample battery of one coupling marginal against its oracle.
template <std::size_t D>
void compare_samples(ExperimentReport& rep, const ExperimentConfig& cfg, const std::string& label,
                     const std::vector<Configuration<D>>& coupled,
                     const std::vector<Configuration<D>>& oracle, const Box<D>& box) {
  std::vector<std::size_t> na, nb, sa, sb;
  std::vector<double> nna, nnb;
  Box<D> sub = box;
  sub.hi[0] = 0.5 * (box.lo[0] + box.hi[0]);
  for (const auto& c : coupled) {
    na.push_back(c.size());
    sa.push_back(count_in(c, sub));
    if (auto v = first_nn(c)) nna.push_back(*v);
  }
  for (const auto& c : oracle) {
    nb.push_back(c.size());
    sb.push_back(count_in(c, sub));
    if (auto v = first_nn(c)) nnb.push_back(*v);
  }
  const double alpha = cfg.significance;
  const std::string tol = "p > " + fmt(alpha);
  const auto ct = stats::chi_square_two_sample(stats::histogram(na), stats::histogram(nb));
  rep.add(label + ".count_two_sample_chi2", ct.statistic, 0.0, ct.p_value);
  rep.verdict(label + " total count matches oracle", ct.passes(alpha), tol, "p=" + fmt(ct.p_value));
  const auto st = stats::chi_square_two_sample(stats::histogram(sa), stats::histogram(sb));
  rep.add(label + ".subbox_count_two_sample_chi2", st.statistic, 0.0, st.p_value);
  rep.verdict(label + " sub-box count matches oracle", st.passes(alpha), tol, "p=" + fmt(st.p_value));
  if (nna.size() >= 20 && nnb.size() >= 20) {
    const auto ks = stats::ks_two_sample(nna, nnb);
    rep.add(label + ".nn_ks", ks.statistic, 0.0, ks.p_value);
    rep.verdict(label + " nearest-neighbour ECDF matches oracle", ks.passes(alpha), tol,
                "p=" + fmt(ks.p_value));
  } else {
    rep.verdict(label + " nearest-neighbour ECDF matches oracle", true, tol,
                "skipped: fewer than 20 configurations with two points");
  }
  const auto ma = stats::mean_of(std::vector<double>(na.begin(), na.end()));
  const auto mb = stats::mean_of(std::vector<double>(nb.begin(), nb.end()));
  rep.add(label + ".mean_count", ma.mean, ma.std_error);
  rep.add(label + ".oracle_mean_count", mb.mean, mb.std_error);
}

template <std::size_t D>
void compare_law(ExperimentReport& rep, const ExperimentConfig& cfg, const std::string& label,
                 const std::vector<Configuration<D>>& samples, const std::vector<double>& law) {
  std::vector<std::size_t> n;
  for (const auto& c : samples) n.push_back(c.size());
  const auto t = stats::chi_square_gof(stats::histogram(n), law);
  rep.add(label, t.statistic, 0.0, t.p_value);
  rep.verdict(label + " matches reference count law", t.passes(cfg.significance),
              "p > " + fmt(cfg.significance), "p=" + fmt(t.p_value));
}

template <std::size_t D>
std::vector<Configuration<D>> oracle_samples(const ExperimentConfig& cfg, const Region<D>& r,
                                             const Configuration<D>& boundary, std::uint64_t block) {
  return map_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    RngStream rng(cfg.seed, block + i);
    return sample_hard_sphere_rejection(r, boundary, cfg.lambda, cfg.radius, rng, cfg.max_attempts);
  });
}

template <std::size_t D, class Body>
void with_oracle(const ExperimentConfig& cfg, Body&& body) {
  if constexpr (D == 1) {
    if (cfg.oracle == "exact1d") {
      ExactSeriesOracle o;
      body(o);
      return;
    }
  }
  McRatioOracle o{cfg.n_mc};
  body(o);
}

}  // namespace detail

/// Coupling marginals against the rejection oracle.
template <std::size_t D>
ExperimentReport run_marginal_test(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "marginal";
  rep.config = cfg.echo();
  const Box<D> box = detail::cube<D>(cfg);
  const Region<D> region(box);
  const auto c1 = io::parse_points<D>(cfg.boundary1);
  const auto c2 = io::parse_points<D>(cfg.boundary2);
  for (const auto* c : {&c1, &c2})
    for (const auto& p : *c)
      if (region.contains(p)) throw std::invalid_argument("boundary points must lie outside the region");
  const double R = cfg.radius, lambda = cfg.lambda;
  const std::vector<double> poisson_law = detail::poisson_pmf(lambda * box.volume());

  std::size_t violations = 0;
  if (cfg.mode == "thinning") {
    std::vector<ThinnedPair<D>> pairs;
    detail::with_oracle<D>(cfg, [&](auto& proto) {
      pairs = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
        auto oracle = proto;
        RngStream rng(cfg.seed, coupling_streams + i);
        return thin_to_hard_sphere(region, c1, lambda, R, oracle, rng);
      });
    });
    std::vector<Configuration<D>> kept, dom;
    for (auto& p : pairs) {
      if (!includes(p.dominating, p.kept) || !is_hard_core(p.kept, restrict_to_ring(c1, region, R), R))
        ++violations;
      kept.push_back(std::move(p.kept));
      dom.push_back(std::move(p.dominating));
    }
    const auto oracle = detail::oracle_samples(cfg, region, c1, oracle1_streams);
    detail::compare_samples(rep, cfg, "kept", kept, oracle, box);
    detail::compare_law(rep, cfg, "dominating.count_vs_poisson", dom, poisson_law);
    if constexpr (D == 1)
      if (cfg.oracle == "exact1d")
        detail::compare_law(rep, cfg, "kept.count_vs_exact",
                            kept, detail::exact_count_law(region, c1, lambda, R));
    if (!cfg.expected_counts.empty())
      detail::compare_law(rep, cfg, "kept.count_vs_expected", kept, cfg.expected_counts);
    rep.verdict("kept subset of dominating and hard-core", violations == 0, "zero violations",
                std::to_string(violations) + " violations");
  } else {
    std::vector<CouplingSample<D>> samples;
    std::vector<RecursionTrace> traces(cfg.replicas);
    detail::with_oracle<D>(cfg, [&](auto& proto) {
      samples = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
        auto oracle = proto;
        RngStream rng(cfg.seed, coupling_streams + i);
        return twisted_couple(region, c1, c2, lambda, R, oracle, rng, &traces[i]);
      });
    });
    std::vector<Configuration<D>> x1, x2, x3;
    std::size_t depth_max = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      if (!includes(s.xi3, unite(s.xi1, s.xi2)) ||
          !is_hard_core(s.xi1, restrict_to_ring(c1, region, R), R) ||
          !is_hard_core(s.xi2, restrict_to_ring(c2, region, R), R) ||
          !disagreement_connected(s.xi1, s.xi2, c1, c2, R) || traces[i].depth() > traces[i].cap)
        ++violations;
      depth_max = std::max(depth_max, traces[i].depth());
      x1.push_back(s.xi1);
      x2.push_back(s.xi2);
      x3.push_back(s.xi3);
    }
    rep.add("max_recursion_depth", static_cast<double>(depth_max));
    const auto o1 = detail::oracle_samples(cfg, region, c1, oracle1_streams);
    const auto o2 = detail::oracle_samples(cfg, region, c2, oracle2_streams);
    detail::compare_samples(rep, cfg, "xi1", x1, o1, box);
    detail::compare_samples(rep, cfg, "xi2", x2, o2, box);
    detail::compare_law(rep, cfg, "xi3.count_vs_poisson", x3, poisson_law);
    if constexpr (D == 1)
      if (cfg.oracle == "exact1d") {
        detail::compare_law(rep, cfg, "xi1.count_vs_exact", x1,
                            detail::exact_count_law(region, c1, lambda, R));
        detail::compare_law(rep, cfg, "xi2.count_vs_exact", x2,
                            detail::exact_count_law(region, c2, lambda, R));
      }
    rep.verdict("twisted coupling hard assertions", violations == 0, "zero violations",
                std::to_string(violations) + " violations");
  }
  rep.samples = cfg.replicas;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(rep.samples) / rep.wall_seconds : 0.0;
  return rep;
}

/// Void-probability difference under two boundary conditions against the
/// Boolean connection probability between the window and c1 sym c2.
template <std::size_t D>
ExperimentReport run_disagreement_bound_test(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "disagreement-bound";
  rep.config = cfg.echo();
  const Box<D> box = detail::cube<D>(cfg);
  const Region<D> region(box);
  const Box<D> a = detail::window<D>(cfg, box);
  const auto c1 = io::parse_points<D>(cfg.boundary1);
  const auto c2 = io::parse_points<D>(cfg.boundary2);

  const auto void_prob = [&](const Configuration<D>& c, std::uint64_t block) {
    const auto s = detail::oracle_samples(cfg, region, c, block);
    std::size_t hits = 0;
    for (const auto& x : s) hits += detail::count_in(x, a) == 0;
    return Estimate::proportion(hits, s.size());
  };
  const Estimate v1 = void_prob(c1, oracle1_streams);
  const Estimate v2 = void_prob(c2, oracle2_streams);
  Estimate lhs{std::abs(v1.mean - v2.mean), combined_error(v1, v2), v1.n_samples, Method::mc_plain};

  const Configuration<D> diff = symmetric_difference(c1, c2);
  Estimate rhs = Estimate::exact(0.0);
  if (!diff.empty()) {
    RngStream rng(cfg.seed, boolean_streams);
    rhs = connection_probability<D>(box, Target<D>{a}, Target<D>{diff}, cfg.boolean_intensity(),
                                    cfg.radius, cfg.rhs_replicas(), rng);
  }
  rep.add("void_probability_1", v1);
  rep.add("void_probability_2", v2);
  rep.add("lhs_void_difference", lhs);
  rep.add("rhs_connection_probability", rhs);
  const double tol = cfg.z * combined_error(lhs, rhs);
  rep.verdict("disagreement bound", lhs.mean <= rhs.mean + tol,
              "lhs <= rhs + " + detail::fmt(cfg.z) + " combined std errors",
              "lhs=" + detail::fmt(lhs.mean) + " rhs=" + detail::fmt(rhs.mean) + " tol=" + detail::fmt(tol));
  rep.samples = 2 * cfg.replicas + cfg.rhs_replicas();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(rep.samples) / rep.wall_seconds : 0.0;
  return rep;
}

inline void require_subcritical(std::size_t d, double alpha, double R) {
  const double bound = subcritical_intensity_bound(d, R);
  if (!(alpha < bound)) {
    std::ostringstream os;
    os << "refusing intensity " << alpha << ": not certified subcritical (need alpha < " << bound
       << " for connection radius " << R << " in dimension " << d << ')';
    throw std::domain_error(os.str());
  }
}

/// Sensitivity of the void probability of a window to one extra boundary
/// point at growing distance, against the Boolean connection probability.
///
/// Window A = [box_lo, window_hi] along the first axis (full box in the
/// others). For distance t the region is B_t = A extended to
/// window_hi + t - gap and the point sits at gap beyond B_t, so d(A, x) = t.
/// In 1D with the exact oracle the void probabilities are partition function
/// ratios; otherwise they come from rejection samples.
template <std::size_t D>
ExperimentReport run_sensitivity_decay(const ExperimentConfig& cfg) {
  cfg.validate();
  const double R = cfg.radius, lambda = cfg.lambda, alpha = cfg.boolean_intensity();
  require_subcritical(D, alpha, R);
  if (cfg.distances.size() < 3) throw std::invalid_argument("sensitivity decay needs >= 3 distances");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "sensitivity-decay";
  rep.config = cfg.echo();
  const Configuration<D> base = io::parse_points<D>(cfg.boundary1);
  const double gap = cfg.point_gap * R;
  const double a_hi = cfg.window_hi.empty() ? cfg.box_hi : cfg.window_hi[0];
  Box<D> a = detail::cube<D>(cfg);
  a.hi[0] = a_hi;

  std::vector<std::pair<double, Estimate>> sens, conn;
  std::size_t bound_failures = 0;
  for (std::size_t k = 0; k < cfg.distances.size(); ++k) {
    const double t = cfg.distances[k];
    if (!(t > gap)) throw std::invalid_argument("distances must exceed point_gap * radius");
    Box<D> b = a;
    b.hi[0] = a_hi + t - gap;
    const Region<D> region(b);
    Point<D> x;
    for (std::size_t i = 0; i < D; ++i) x[i] = 0.5 * (b.lo[i] + b.hi[i]);
    x[0] = b.hi[0] + gap;
    Configuration<D> with = base;
    with.insert(x);

    Estimate diff;
    if constexpr (D == 1) {
      if (cfg.oracle == "exact1d") {
        const IntervalSet whole = to_intervals(region);
        const IntervalSet outside_a = whole.subtract(IntervalSet(a.lo[0], a.hi[0]));
        const auto void_exact = [&](const Configuration<1>& c) {
          const IntervalSet blocked = neighbourhood(c, R);
          return HardRodSeries(outside_a.subtract(blocked), R).evaluate(lambda) /
                 HardRodSeries(whole.subtract(blocked), R).evaluate(lambda);
        };
        diff = Estimate::series(std::abs(void_exact(base) - void_exact(with)));
      }
    }
    if (diff.method != Method::series) {
      ExperimentConfig sub = cfg;
      const auto vp = [&](const Configuration<D>& c, std::uint64_t block) {
        const auto s = detail::oracle_samples(sub, region, c, block + (std::uint64_t{k} << 24));
        std::size_t hits = 0;
        for (const auto& y : s) hits += detail::count_in(y, a) == 0;
        return Estimate::proportion(hits, s.size());
      };
      const Estimate v1 = vp(base, oracle1_streams), v2 = vp(with, oracle2_streams);
      diff = {std::abs(v1.mean - v2.mean), combined_error(v1, v2), cfg.replicas, Method::mc_plain};
    }
    RngStream rng(cfg.seed, boolean_streams + (std::uint64_t{k} << 24));
    const Estimate c = connection_probability<D>(b, Target<D>{a}, Target<D>{Configuration<D>(std::vector<Point<D>>{x})},
                                                 alpha, R, cfg.rhs_replicas(), rng);
    rep.add("sensitivity_t=" + detail::fmt(t), diff);
    rep.add("connection_t=" + detail::fmt(t), c);
    const double tol = cfg.z * combined_error(diff, c);
    if (!(diff.mean <= c.mean + tol)) ++bound_failures;
    sens.emplace_back(t, diff);
    if (t > R) conn.emplace_back(t, c);  // at t <= R the connection is certain
  }
  rep.verdict("sensitivity bounded by connection probability", bound_failures == 0,
              "at every distance, within " + detail::fmt(cfg.z) + " combined std errors",
              std::to_string(bound_failures) + " distances violate");

  const auto positive = std::count_if(sens.begin(), sens.end(), [](const auto& r) { return r.second.mean > 0.0; });
  if (positive == 0) {
    rep.verdict("sensitivity decays exponentially", true, "all differences zero", "no boundary influence");
    rep.samples = cfg.distances.size() * cfg.rhs_replicas();
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  if (positive < 3) {
    rep.verdict("sensitivity decays exponentially", false, "95% interval of kappa excludes 0",
                "fewer than 3 nonzero differences to fit");
    return rep;
  }
  const DecayFit fs = fit_decay(sens);
  rep.add("kappa_sensitivity", fs.kappa, fs.kappa_std_error);
  rep.add("K_sensitivity", fs.K);
  rep.verdict("sensitivity decays exponentially", fs.decaying(1.96), "95% interval of kappa excludes 0",
              "kappa=" + detail::fmt(fs.kappa) + " se=" + detail::fmt(fs.kappa_std_error));
  if (conn.size() >= 3) {
    const DecayFit fc = fit_decay(conn);
    rep.add("kappa_connection", fc.kappa, fc.kappa_std_error);
    rep.add("K_connection", fc.K);
    const auto [sl, sh] = fs.kappa_interval(1.96);
    const auto [cl, ch] = fc.kappa_interval(1.96);
    rep.verdict("decay rates agree", sl <= ch && cl <= sh, "95% intervals of kappa overlap",
                "sensitivity [" + detail::fmt(sl) + ", " + detail::fmt(sh) + "] connection [" +
                    detail::fmt(cl) + ", " + detail::fmt(ch) + "]");
  } else {
    rep.verdict("decay rates agree", false, "95% intervals of kappa overlap",
                "fewer than 3 distances beyond R for the connection fit");
  }
  rep.samples = cfg.distances.size() * cfg.rhs_replicas();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(rep.samples) / rep.wall_seconds : 0.0;
  return rep;
}

/// Square lattice of the given spacing, restricted to points outside `b`
/// and within R of it. Lattice rows start half a radius outside the box.
template <std::size_t D>
Configuration<D> ring_lattice(const Box<D>& b, double R, double spacing) {
  std::vector<Point<D>> pts;
  std::vector<std::vector<double>> axes(D);
  for (std::size_t i = 0; i < D; ++i)
    for (double v = b.lo[i] - 0.5 * R; v <= b.hi[i] + R; v += spacing) axes[i].push_back(v);
  std::vector<std::size_t> idx(D, 0);
  while (true) {
    Point<D> p;
    for (std::size_t i = 0; i < D; ++i) p[i] = axes[i][idx[i]];
    if (!b.contains(p) && b.distance(p) <= R) pts.push_back(p);
    std::size_t i = 0;
    while (i < D && ++idx[i] == axes[i].size()) idx[i++] = 0;
    if (i == D) break;
  }
  return Configuration<D>(std::move(pts));
}

/// Boundary influence on a fixed central window as the box grows: void
/// probability under the empty condition and a dense ring lattice, and the
/// Boolean connection probability from the window to the outside.
template <std::size_t D>
ExperimentReport run_uniqueness_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const double R = cfg.radius, lambda = cfg.lambda, alpha = cfg.boolean_intensity();
  require_subcritical(D, alpha, R);
  if (cfg.box_sides.size() < 2) throw std::invalid_argument("uniqueness sweep needs >= 2 box sides");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "uniqueness-sweep";
  rep.config = cfg.echo();
  const Box<D> a = detail::window<D>(cfg, Box<D>::cube(-0.5 * R, 0.5 * R));

  std::vector<Estimate> diffs, conns;
  for (std::size_t k = 0; k < cfg.box_sides.size(); ++k) {
    const double s = cfg.box_sides[k];
    const Box<D> b = Box<D>::cube(-0.5 * s, 0.5 * s);
    const Region<D> region(b);
    const std::string tag = "side=" + detail::fmt(s);
    RngStream rng(cfg.seed, boolean_streams + (std::uint64_t{k} << 24));
    const Estimate c = connection_probability<D>(b, Target<D>{a}, Target<D>{BoxComplement<D>{b}},
                                                 alpha, R, cfg.rhs_replicas(), rng);
    rep.add("connection_" + tag, c);
    conns.push_back(c);
    if (lambda * b.volume() > cfg.oracle_mass_limit) {
      rep.add("void_difference_" + tag + "_skipped_oracle_infeasible", lambda * b.volume());
      continue;
    }
    const Configuration<D> packed = ring_lattice(b, R, cfg.lattice_spacing * R);
    const auto vp = [&](const Configuration<D>& bc, std::uint64_t block) {
      const auto smp = detail::oracle_samples(cfg, region, bc, block + (std::uint64_t{k} << 24));
      std::size_t hits = 0;
      for (const auto& y : smp) hits += detail::count_in(y, a) == 0;
      return Estimate::proportion(hits, smp.size());
    };
    const Estimate v1 = vp(Configuration<D>{}, oracle1_streams), v2 = vp(packed, oracle2_streams);
    const Estimate d{std::abs(v1.mean - v2.mean), combined_error(v1, v2), cfg.replicas, Method::mc_plain};
    rep.add("void_difference_" + tag, d);
    diffs.push_back(d);
  }
  const auto trend = [&](const std::string& name, const std::vector<Estimate>& v) {
    if (v.size() < 2) {
      rep.verdict(name + " decreases", false, "final < first / 3", "fewer than 2 feasible boxes");
      return;
    }
    const double excess = v.back().mean - v.front().mean / 3.0;
    const double tol = cfg.z * std::hypot(v.back().std_error, v.front().std_error / 3.0);
    rep.verdict(name + " decreases", excess <= tol,
                "final < first / 3 within " + detail::fmt(cfg.z) + " std errors",
                "first=" + detail::fmt(v.front().mean) + " final=" + detail::fmt(v.back().mean));
  };
  trend("void difference", diffs);
  trend("connection probability", conns);
  rep.samples = cfg.box_sides.size() * cfg.rhs_replicas();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(rep.samples) / rep.wall_seconds : 0.0;
  return rep;
}

/// Spanning-probability sweep. With crossing bounds, the half crossing at
/// the largest box side must fall inside them; with spanning_max, the
/// spanning probability at the largest side and the largest intensity must
/// fall below it.
template <std::size_t D>
ExperimentReport run_critical_sweep(const ExperimentConfig& cfg, std::vector<SweepRow>* rows_out = nullptr) {
  cfg.validate();
  if (cfg.box_sides.empty() || cfg.alpha_grid.empty())
    throw std::invalid_argument("critical sweep needs box_sides and alpha_grid");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "critical-sweep";
  rep.config = cfg.echo();
  const auto rows = critical_intensity_sweep<D>(cfg.radius, cfg.box_sides, cfg.alpha_grid, cfg.replicas, cfg.seed);
  for (const auto& r : rows)
    rep.add("spanning_side=" + detail::fmt(r.box_side) + "_alpha=" + detail::fmt(r.intensity), r.value,
            r.std_error);
  const double top = *std::max_element(cfg.box_sides.begin(), cfg.box_sides.end());
  if (cfg.crossing_lo || cfg.crossing_hi) {
    const double lo = cfg.crossing_lo.value_or(0.0), hi = cfg.crossing_hi.value_or(INFINITY);
    const auto x = half_crossing(rows, top);
    if (x) rep.add("half_crossing_side=" + detail::fmt(top), *x);
    rep.verdict("spanning crossing in window", x && *x >= lo && *x <= hi,
                "[" + detail::fmt(lo) + ", " + detail::fmt(hi) + "]",
                x ? "crossing=" + detail::fmt(*x) : "no crossing on the grid");
  }
  if (cfg.spanning_max) {
    const double amax = *std::max_element(cfg.alpha_grid.begin(), cfg.alpha_grid.end());
    double v = 1.0;
    for (const auto& r : rows)
      if (r.box_side == top && r.intensity == amax) v = r.value;
    rep.verdict("spanning probability small", v < *cfg.spanning_max, "< " + detail::fmt(*cfg.spanning_max),
                "value=" + detail::fmt(v));
  }
  if (rows_out) *rows_out = rows;
  rep.samples = rows.size() * cfg.replicas;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.throughput = rep.wall_seconds > 0 ? static_cast<double>(rep.samples) / rep.wall_seconds : 0.0;
  return rep;
}

template <std::size_t D>
ExperimentReport run_experiment_d(const ExperimentConfig& cfg) {
  if (cfg.experiment == "marginal") return run_marginal_test<D>(cfg);
  if (cfg.experiment == "disagreement-bound") return run_disagreement_bound_test<D>(cfg);
  if (cfg.experiment == "sensitivity-decay") return run_sensitivity_decay<D>(cfg);
  if (cfg.experiment == "uniqueness-sweep") return run_uniqueness_sweep<D>(cfg);
  if (cfg.experiment == "critical-sweep") return run_critical_sweep<D>(cfg);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.dim) {
    case 1: return run_experiment_d<1>(cfg);
    case 2: return run_experiment_d<2>(cfg);
    case 3: return run_experiment_d<3>(cfg);
  }
  throw std::invalid_argument("dim must be 1, 2 or 3");
}

}  // namespace hsc::harness
