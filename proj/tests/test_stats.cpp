#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "iqm/stats.hpp"
#include "oracles.hpp"

TEST_CASE("paired t-test matches the frozen statistics oracle") {
    for (const oracles::TTestCase& c : oracles::ttest_cases()) {
        const iqm::TTestResult r = iqm::paired_t_test(c.xs, c.ys);
        CAPTURE(c.t);
        REQUIRE(r.t_statistic == Catch::Approx(c.t).margin(1e-6));
        REQUIRE(r.p_value == Catch::Approx(c.p).margin(1e-6));
        REQUIRE(r.degrees_of_freedom == c.df);
        REQUIRE(r.significant_at_5pct == (c.p < 0.05));
    }
}

TEST_CASE("identical samples give the no-evidence result") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const iqm::TTestResult r = iqm::paired_t_test(xs, xs);
    REQUIRE(r.t_statistic == 0.0);
    REQUIRE(r.p_value == 1.0);
    REQUIRE_FALSE(r.significant_at_5pct);
}

TEST_CASE("swapping the samples negates t and keeps p") {
    const std::vector<double> xs = {0.5, 0.9, 0.4, 0.8, 0.7};
    const std::vector<double> ys = {0.3, 1.0, 0.2, 0.9, 0.4};
    const iqm::TTestResult ab = iqm::paired_t_test(xs, ys);
    const iqm::TTestResult ba = iqm::paired_t_test(ys, xs);
    REQUIRE(ab.t_statistic == Catch::Approx(-ba.t_statistic).margin(1e-15));
    REQUIRE(ab.p_value == Catch::Approx(ba.p_value).margin(1e-12));
}

TEST_CASE("p is invariant under a common shift") {
    const std::vector<double> xs = {1.2, 0.8, 1.5, 1.1, 0.9, 1.3};
    const std::vector<double> ys = {1.0, 0.9, 1.2, 1.3, 0.7, 1.1};
    std::vector<double> xs2 = xs, ys2 = ys;
    for (auto& v : xs2) v += 5.0;
    for (auto& v : ys2) v += 5.0;
    const iqm::TTestResult a = iqm::paired_t_test(xs, ys);
    const iqm::TTestResult b = iqm::paired_t_test(xs2, ys2);
    REQUIRE(a.p_value == Catch::Approx(b.p_value).margin(1e-9));
}

TEST_CASE("degenerate inputs") {
    REQUIRE_THROWS_AS(iqm::paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}),
                      iqm::ParamError);
    REQUIRE_THROWS_AS(
        iqm::paired_t_test(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
        iqm::ParamError);
    // constant nonzero difference saturates
    const iqm::TTestResult r = iqm::paired_t_test(std::vector<double>{2.0, 3.0, 4.0},
                                                  std::vector<double>{1.0, 2.0, 3.0});
    REQUIRE(std::isinf(r.t_statistic));
    REQUIRE(r.p_value == 0.0);
    REQUIRE(r.significant_at_5pct);
}

TEST_CASE("summary statistics") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    const iqm::Summary s = iqm::summarize(v);
    REQUIRE(s.count == 4);
    REQUIRE(s.mean == Catch::Approx(2.5).margin(1e-15));
    REQUIRE(s.stddev == Catch::Approx(std::sqrt(5.0 / 3.0)).margin(1e-12));

    const iqm::Summary single = iqm::summarize(std::vector<double>{7.0});
    REQUIRE(single.count == 1);
    REQUIRE(single.mean == 7.0);
    REQUIRE(single.stddev == 0.0);

    REQUIRE(iqm::summarize(std::vector<double>{}).count == 0);
}
