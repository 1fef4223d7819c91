#include <gtest/gtest.h>

#include <sstream>

#include "hsc/harness.hpp"
#include "hsc/io.hpp"

using namespace hsc;
using namespace hsc::harness;

namespace {
ExperimentConfig config(const std::string& text) {
  std::istringstream is(text);
  return load_config(is);
}
}  // namespace

TEST(Io, SweepCsvRoundTrip) {
  const std::vector<SweepRow> rows{{2, 1.0, 0.1 + 0.2, 20, 400, "spanning_probability", 1.0 / 3.0, 1e-300},
                                   {1, 0.5, 4.0, 50, 10, "spanning_probability", 0.0, 0.0}};
  std::stringstream ss;
  io::write_sweep_csv(ss, rows);
  EXPECT_EQ(ss.str().rfind("# hsc-sweep v1\n", 0), 0u);
  EXPECT_EQ(io::read_sweep_csv(ss), rows);
}

TEST(Io, BoundsCsvRoundTrip) {
  const auto rows = bounds_table(2, 0.7);
  std::stringstream ss;
  io::write_bounds_csv(ss, rows);
  EXPECT_EQ(io::read_bounds_csv(ss), rows);
}

TEST(Io, SamplesRoundTrip) {
  std::vector<io::SampleRecord<2>> recs{{0, 7, {{0.1, 0.2}}, {}, {{0.1, 0.2}, {0.5, 1.0 / 3.0}}},
                                        {1, 7, {}, {}, {}}};
  std::stringstream ss;
  io::write_samples_header(ss, 2);
  for (const auto& r : recs) io::write_sample(ss, r);
  EXPECT_EQ(io::read_samples<2>(ss), recs);
}

TEST(Io, ParsePoints) {
  EXPECT_EQ(io::parse_points<2>("-0.1,0.5;1.2,3"), (Configuration<2>{{-0.1, 0.5}, {1.2, 3.0}}));
  EXPECT_TRUE(io::parse_points<1>("").empty());
  EXPECT_THROW(io::parse_points<2>("1,2,3"), std::invalid_argument);
  EXPECT_THROW(io::parse_double("abc"), std::invalid_argument);
}

TEST(Config, ParsingAndErrors) {
  const auto c = config("# comment\nexperiment = marginal\ndim=2 # trailing\nbox=0,2\nlambda=1.5\n");
  EXPECT_EQ(c.experiment, "marginal");
  EXPECT_EQ(c.dim, 2u);
  EXPECT_EQ(c.box_hi, 2.0);
  EXPECT_THROW(config("nonsense\n"), std::invalid_argument);
  EXPECT_THROW(config("colour=blue\n"), std::invalid_argument);
  EXPECT_THROW(config("replicas=1.5\n"), std::invalid_argument);
  EXPECT_THROW(config("replicas=0\n").validate(), std::invalid_argument);
  EXPECT_THROW(config("dim=2\noracle=exact1d\n").validate(), std::invalid_argument);
}

TEST(Harness, ReplicaMapIgnoresThreadCount) {
  const auto f = [](std::size_t i) {
    RngStream rng(5, i);
    return rng.uniform();
  };
  EXPECT_EQ(map_replicas(101, 1, f), map_replicas(101, 4, f));
}

TEST(Harness, MarginalZeroIntensityPasses) {
  const auto rep = run_experiment(config("experiment=marginal\ndim=2\nlambda=0\nradius=0.3\nreplicas=200\n"));
  EXPECT_TRUE(rep.passed()) << rep.text();
}

TEST(Harness, MarginalZeroRadiusPasses) {
  const auto rep = run_experiment(config("experiment=marginal\ndim=1\nlambda=3\nradius=0\nreplicas=2000\n"));
  EXPECT_TRUE(rep.passed()) << rep.text();
}

TEST(Harness, ExactMarginalAndReproducible) {
  const auto cfg = config("experiment=marginal\ndim=1\nradius=0.6\nlambda=2\noracle=exact1d\nreplicas=3000\nseed=5\n");
  const auto a = run_experiment(cfg);
  auto cfg4 = cfg;
  cfg4.threads = 4;
  const auto b = run_experiment(cfg4);
  EXPECT_TRUE(a.passed()) << a.text();
  EXPECT_EQ(a.text(), b.text());
}

TEST(Harness, DisagreementBoundEqualConditions) {
  const auto rep = run_experiment(config(
      "experiment=disagreement-bound\ndim=1\nradius=0.3\nlambda=1\nboundary1=-0.1\nboundary2=-0.1\nreplicas=500\n"));
  EXPECT_TRUE(rep.passed()) << rep.text();
}

TEST(Harness, RefusesSupercritical) {
  const auto cfg = config("experiment=uniqueness-sweep\ndim=2\nradius=1\nlambda=2\nbox_sides=2,4\nreplicas=10\n");
  EXPECT_THROW(run_experiment(cfg), std::domain_error);
}

TEST(Harness, SensitivityZeroIntensity) {
  const auto rep = run_experiment(config(
      "experiment=sensitivity-decay\ndim=1\nradius=1\nlambda=0\noracle=exact1d\ndistances=1,2,3\nreplicas=10\n"));
  for (const auto& s : rep.statistics)
    if (s.name.rfind("sensitivity_t=", 0) == 0) {
      EXPECT_EQ(s.value, 0.0);
    }
}

TEST(Harness, RingLatticeOutsideBoxWithinRange) {
  const Box<2> b = Box<2>::cube(-2, 2);
  const auto lat = ring_lattice(b, 1.0, 1.01);
  EXPECT_FALSE(lat.empty());
  for (const auto& p : lat) {
    EXPECT_FALSE(b.contains(p));
    EXPECT_LE(b.distance(p), 1.0);
  }
  EXPECT_EQ(is_hard_core(lat, 1.0), 1);
}
