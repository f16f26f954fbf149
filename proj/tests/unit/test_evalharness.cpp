#include <random>
#include <set>

#include "doctest.h"
#include "epiplan/evalharness/benchmark.hpp"
#include "epiplan/modelclient/rule_based_mock.hpp"
#include "epiplan/modelclient/scripted_backend.hpp"
#include "support/stats_oracle.hpp"

using namespace epiplan;
using namespace epiplan::eval;

namespace {

const std::filesystem::path kFixtures(EPIPLAN_FIXTURES_DIR);

GoldChecklist checklist(std::vector<std::string> required) {
    GoldChecklist c;
    c.disease = "Flu";
    c.scenario_id = "flu-1";
    c.required_actions = std::move(required);
    return c;
}

std::vector<pipeline::TaskItem> tasks(const std::vector<std::string>& actions) {
    std::vector<pipeline::TaskItem> out;
    for (const auto& a : actions) out.push_back({a, "w", "p", "1 day"});
    return out;
}

}  // namespace

TEST_CASE("completeness examples") {
    auto c = checklist({"a", "b", "c", "d"});
    CHECK(completeness_score(tasks({"a", "b", "c"}), c).completeness == 75.0);
    CHECK(completeness_score(tasks({"A", " b ", "c", "d"}), c).completeness == 100.0);
    auto empty = completeness_score(tasks({}), c);
    CHECK(empty.completeness == 0.0);
    CHECK(empty.misses == std::vector<std::string>{"a", "b", "c", "d"});

    auto r = completeness_score(tasks({"b", "zzz", "a", "zzz"}), c);
    CHECK(r.hits == std::vector<std::string>{"a", "b"});
    CHECK(r.misses == std::vector<std::string>{"c", "d"});
    CHECK(r.extras == std::vector<std::string>{"zzz"});

    c.synonyms["D"] = {"Delta Action"};
    CHECK(completeness_score(tasks({"delta action"}), c).hits == std::vector<std::string>{"d"});
    CHECK_THROWS_AS(completeness_score(tasks({"a"}), checklist({})), std::invalid_argument);
}

TEST_CASE("completeness is exact on every subset of small checklists") {
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<std::string> req;
        for (std::size_t i = 0; i < n; ++i) req.push_back("action " + std::to_string(i));
        auto c = checklist(req);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::string> gen = {"unrelated"};
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) {
                    gen.push_back(req[i]);
                    ++k;
                }
            auto r = completeness_score(tasks(gen), c);
            CHECK(r.completeness == 100.0 * static_cast<double>(k) / static_cast<double>(n));
            CHECK(r.hits.size() + r.misses.size() == n);
        }
    }
}

TEST_CASE("property: adding a required action never lowers completeness") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> req;
        const std::size_t n = 1 + rng() % 8;
        for (std::size_t i = 0; i < n; ++i) req.push_back("r" + std::to_string(i));
        std::vector<std::string> gen;
        for (std::size_t i = 0; i < 6; ++i) gen.push_back("r" + std::to_string(rng() % 12));
        auto c = checklist(req);
        const double before = completeness_score(tasks(gen), c).completeness;
        gen.push_back(req[rng() % n]);
        CHECK(completeness_score(tasks(gen), c).completeness >= before);
    }
}

TEST_CASE("pearson basics and errors") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> neg = {-1, -2, -3, -4, -5};
    CHECK(pearson_r(x, x).r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson_r(x, neg).r == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pearson_r(x, x).n == 5);
    std::vector<double> flat = {2, 2, 2, 2, 2};
    CHECK_THROWS_AS(pearson_r(x, flat), ConstantVector);
    CHECK_THROWS_AS(pearson_r(flat, x), ConstantVector);
    std::vector<double> shorter = {1, 2, 3};
    CHECK_THROWS_AS(pearson_r(x, shorter), LengthMismatch);
    std::vector<double> two = {1, 2};
    CHECK_THROWS_AS(pearson_r(two, two), LengthMismatch);
}

TEST_CASE("property: pearson agrees with the two-pass oracle, is symmetric and affine invariant") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> dist(50.0, 15.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-100.0, 100.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(20), y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            x[i] = dist(rng);
            y[i] = 0.5 * x[i] + dist(rng);
        }
        const double r = pearson_r(x, y).r;
        CHECK(std::abs(r - testing::two_pass_pearson(x, y)) < 1e-12);
        CHECK(r == pearson_r(y, x).r);
        std::vector<double> ya = y;
        const double a = scale(rng), b = shift(rng);
        for (auto& v : ya) v = a * v + b;
        CHECK(std::abs(pearson_r(x, ya).r - r) < 1e-9);
    }
}

TEST_CASE("mean and sample standard deviation") {
    std::vector<double> two = {80, 90};
    auto m = mean_sd(two);
    CHECK(m.mean == 85.0);
    CHECK(m.sd == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
    CHECK(m.sd == doctest::Approx(7.0711).epsilon(1e-4));
    std::vector<double> one = {42};
    auto s = mean_sd(one);
    CHECK(s.n == 1);
    CHECK(s.sd == 0.0);
}

TEST_CASE("summary groups recompute from raw rows") {
    std::mt19937 rng(3);
    std::vector<ScenarioRow> rows;
    const std::vector<std::pair<std::string, std::string>> diseases = {
        {"Cholera", "Foodborne"}, {"Influenza", "Respiratory"}, {"Pertussis", "Respiratory"}, {"Dengue", "Vector"}};
    for (int i = 0; i < 12; ++i) {
        ScenarioRow r;
        const auto& [d, t] = diseases[rng() % diseases.size()];
        r.scenario_id = "s" + std::to_string(20 - i);
        r.disease = d;
        r.disease_type = t;
        r.r1.score.completeness = rng() % 101;
        r.r2.score.completeness = rng() % 101;
        r.r1.time_ms = rng() % 50;
        r.failed = i == 5;
        rows.push_back(r);
    }
    auto s = summarize_runs(rows);
    for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i - 1].scenario_id < s.rows[i].scenario_id);
    CHECK(s.overall.failed == 1);
    CHECK(s.overall.r1.n == 11);

    for (const auto* groups : {&s.by_disease, &s.by_type}) {
        for (const auto& g : *groups) {
            std::vector<double> r1, r2;
            for (const auto& r : rows) {
                if (r.failed) continue;
                if ((groups == &s.by_disease ? r.disease : r.disease_type) != g.group) continue;
                r1.push_back(r.r1.score.completeness);
                r2.push_back(r.r2.score.completeness);
            }
            CAPTURE(g.group);
            CHECK(g.r1.n == r1.size());
            if (r1.empty()) continue;
            CHECK(g.r1.mean == doctest::Approx(testing::two_pass_mean(r1)).epsilon(1e-12));
            CHECK(g.r2.mean == doctest::Approx(testing::two_pass_mean(r2)).epsilon(1e-12));
            CHECK(g.r1.sd == doctest::Approx(testing::two_pass_sd(r1)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(summarize_runs({}), std::invalid_argument);

    auto csv = disease_table_csv(s);
    CHECK(csv.rfind("group,n,failed,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(s.by_disease.size() + 1));
    auto j = to_json(s);
    CHECK(j["rows"].size() == 12);
}

TEST_CASE("fixture benchmark with the mock backend") {
    auto kb = kb::load_knowledge_base(kFixtures / "kb");
    auto scenarios = model::load_scenarios(kFixtures / "scenarios");
    model::RuleBasedMock mock(scenarios);
    auto summary = run_benchmark(scenarios, kb, mock);
    REQUIRE(summary.rows.size() == 16);
    CHECK(summary.overall.failed == 0);
    CHECK(summary.by_disease.size() == 8);
    for (const auto& row : summary.rows) {
        CAPTURE(row.scenario_id);
        CHECK(row.r2.score.completeness >= row.r1.score.completeness);
        CHECK(row.r1.time_ms < 1000.0);
        CHECK(row.r2.time_ms < 1000.0);
    }

    BenchmarkOptions parallel;
    parallel.workers = 4;
    auto again = run_benchmark(scenarios, kb, mock, parallel);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(again.rows[i].scenario_id == summary.rows[i].scenario_id);
        CHECK(to_json(again.rows[i].r2.score) == to_json(summary.rows[i].r2.score));
    }

    auto report = benchmark_report(summary, mock.id());
    CHECK(report["backend"] == "mock");
    CHECK(report["reference"].contains("note"));
    CHECK(report["rows"].size() == 16);

    std::map<std::string, double> ratings;
    for (std::size_t i = 0; i < summary.rows.size(); ++i)
        ratings[summary.rows[i].scenario_id] = 2.0 * summary.rows[i].r2.score.completeness + 1.0;
    CHECK(rating_correlation(summary, ratings).r == doctest::Approx(1.0));
}

TEST_CASE("a failing scenario is recorded without aborting the batch") {
    auto kb = kb::load_knowledge_base(kFixtures / "kb");
    auto scenarios = model::load_scenarios(kFixtures / "scenarios");
    scenarios.resize(2);
    model::ScriptedBackend empty({});
    auto summary = run_benchmark(scenarios, kb, empty);
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0].failed);
    CHECK_FALSE(summary.rows[0].error.empty());
    CHECK(summary.overall.failed == 2);
    CHECK(to_json(summary.rows[0])["status"] == "Failed");

    scenarios[0].checklist.required_actions.clear();
    CHECK_THROWS_AS(run_benchmark(scenarios, kb, empty), std::invalid_argument);
}
