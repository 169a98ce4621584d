#include <tumorfbs/error.hpp>
#include <tumorfbs/model.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace tumorfbs;

namespace {

std::string temp_file(const std::string &name, const std::string &contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path.string();
}

} // namespace

TEST(ModelParams, DefaultsAreValid) { EXPECT_NO_THROW(ModelParams{}.validate()); }

TEST(ModelParams, RejectsThresholdOutsideUnitInterval) {
  for (double s : {0.0, 1.0, 1.5, -0.2, std::nan("")}) {
    ModelParams p;
    p.sigma_tilde = s;
    try {
      p.validate();
      FAIL() << "accepted sigma_tilde = " << s;
    } catch (const InvalidArgument &e) {
      EXPECT_NE(std::string(e.what()).find("must lie in (0,1)"), std::string::npos);
    }
  }
}

TEST(ModelParams, RejectsNonPositiveConstants) {
  const auto bad = [](auto mutate) {
    ModelParams p;
    mutate(p);
    return p;
  };
  EXPECT_THROW(bad([](ModelParams &p) { p.mu = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](ModelParams &p) { p.B = -1; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](ModelParams &p) { p.M = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](ModelParams &p) { p.rho0 = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](ModelParams &p) { p.T = -5; }).validate(), InvalidArgument);
  EXPECT_NO_THROW(bad([](ModelParams &p) { p.B = 0; }).validate());
}

TEST(ModelParams, PerturbationFrequencyMustKeepBoundaryValue) {
  ModelParams p;
  p.u0_perturb_freq = 3.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.u0_perturb_freq = 2.5;
  EXPECT_NO_THROW(p.validate());
  p.u0_perturb_amp = 0.0;
  p.u0_perturb_freq = 3.0;
  EXPECT_NO_THROW(p.validate());
}

TEST(Grid, SpacingAndExactEndpoints) {
  const Grid g(201, 2001, 5.0);
  EXPECT_DOUBLE_EQ(g.dxi(), 1.0 / 200);
  EXPECT_DOUBLE_EQ(g.dt(), 5.0 / 2000);
  EXPECT_EQ(g.xi(0), 0.0);
  EXPECT_EQ(g.xi(200), 1.0);
  EXPECT_EQ(g.t(2000), 5.0);
  const Grid r = g.refined();
  EXPECT_EQ(r.n_xi(), 401u);
  EXPECT_EQ(r.n_t(), 4001u);
  EXPECT_DOUBLE_EQ(r.dt(), g.dt() / 2);
  EXPECT_THROW(Grid(2, 10, 1.0), InvalidArgument);
  EXPECT_THROW(Grid(10, 1, 1.0), InvalidArgument);
}

TEST(Grid, NodesAreIncreasing) {
  const Grid g(17, 33, 2.0);
  const auto xi = g.xi_nodes();
  const auto t = g.t_nodes();
  for (std::size_t j = 1; j < xi.size(); ++j) EXPECT_GT(xi[j], xi[j - 1]);
  for (std::size_t n = 1; n < t.size(); ++n) EXPECT_GT(t[n], t[n - 1]);
}

TEST(ControlPath, ConstantAndCosine) {
  const Grid g(5, 9, 1.0);
  const auto c = ControlPath::constant(g, 0.35);
  ASSERT_EQ(c.size(), 9u);
  for (double v : c.values) EXPECT_EQ(v, 0.35);
  const auto w = ControlPath::cosine(g, 0.35, 0.1, 4.0);
  for (std::size_t n = 0; n < g.n_t(); ++n)
    EXPECT_NEAR(w[n], 0.35 + 0.1 * std::cos(4 * std::numbers::pi * g.t(n)), 1e-15);
}

TEST(ControlPath, ViolationsListEveryOffendingIndex) {
  ModelParams p;
  p.M = 1.0;
  const ControlPath m{{0.0, 1.0, -1e-12, 0.5, 1.0 + 1e-9, NAN}};
  const auto v = validate_control(m, p);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].index, 2u);
  EXPECT_EQ(v[1].index, 4u);
  EXPECT_EQ(v[2].index, 5u);
  EXPECT_FALSE(is_admissible(m, p));
  EXPECT_TRUE(is_admissible(ControlPath{{0.0, 0.3, 1.0}}, p));
}

TEST(InitialProfile, AnalyticProfileMatchesFormula) {
  ModelParams p;
  const Grid g(11, 3, p.T);
  const auto u0 = build_initial_profile(p, g);
  ASSERT_EQ(u0.size(), 11u);
  for (std::size_t j = 0; j + 1 < g.n_xi(); ++j) {
    const double x = g.xi(j);
    const double expected = std::cosh(2.0 * x) / std::cosh(2.0) +
                            0.1 * std::cos(3.5 * std::numbers::pi * x);
    EXPECT_NEAR(u0[j], expected, 1e-14);
  }
  EXPECT_EQ(u0.back(), 1.0);
}

TEST(InitialProfile, UnperturbedProfileIsInsideUnitInterval) {
  ModelParams p;
  p.u0_perturb_amp = 0.0;
  const auto u0 = build_initial_profile(p, Grid(101, 2, p.T));
  EXPECT_TRUE(initial_profile_out_of_range(u0).empty());
  for (std::size_t j = 1; j < u0.size(); ++j) EXPECT_GT(u0[j], u0[j - 1]);
}

TEST(InitialProfile, TableMustMatchGridAndBoundary) {
  const Grid g(3, 2, 1.0);
  EXPECT_NO_THROW(check_initial_profile(std::vector<double>{0.5, 0.7, 1.0}, g));
  EXPECT_THROW(check_initial_profile(std::vector<double>{0.5, 1.0}, g), InvalidArgument);
  EXPECT_THROW(check_initial_profile(std::vector<double>{0.5, 0.7, 0.99}, g), InvalidArgument);
  EXPECT_THROW(check_initial_profile(std::vector<double>{NAN, 0.7, 1.0}, g), InvalidArgument);

  ModelParams p;
  p.T = 1.0;
  p.u0_table = {0.2, 1.3, 1.0};
  const auto u0 = build_initial_profile(p, g);
  EXPECT_EQ(u0, p.u0_table);
  EXPECT_EQ(initial_profile_out_of_range(u0), std::vector<std::size_t>{1});
}

TEST(InitialProfile, ReadsOneValuePerLine) {
  const auto path = temp_file("tumorfbs_profile_ok.txt", "# profile\n0.25\n\n0.5  # mid\n1\n");
  EXPECT_EQ(read_profile_file(path), (std::vector<double>{0.25, 0.5, 1.0}));
}

TEST(InitialProfile, ReportsMalformedLine) {
  const auto path = temp_file("tumorfbs_profile_bad.txt", "0.25\nabc\n1\n");
  try {
    read_profile_file(path);
    FAIL();
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_profile_file(temp_file("tumorfbs_profile_two.txt", "0.1 0.2\n")),
               InvalidArgument);
  EXPECT_THROW(read_profile_file("/nonexistent/profile.txt"), InvalidArgument);
}
