#include <cmath>
#include <random>
#include <tuple>

#include "doctest.h"

#include "pdm/error.hpp"
#include "pdm/tuner.hpp"
#include "support.hpp"

using namespace pdm;

namespace {

GridConfig small_grid() {
    GridConfig g;
    g.ntree_values = {5, 10};
    g.mtry_exponents = {0.3, 0.7};
    g.samp_multipliers = {1.0};
    g.cutoff_min = 0.3;
    g.cutoff_max = 0.7;
    g.cutoff_step = 0.2;
    g.min_leaf = 3;
    return g;
}

}  // namespace

TEST_SUITE("tuner") {

TEST_CASE("mtry from feature-count exponents") {
    GridConfig g;
    const auto grid = expand_grid(30, 100, 200, g, Objective::Savings);
    CHECK(grid.mtry_values == std::vector<int>{2, 3, 5, 7, 10, 15});
}

TEST_CASE("samp rule") {
    GridConfig g;
    CHECK(expand_grid(30, 50, 50, g, Objective::F1).samp_values == std::vector<std::int64_t>{50});
    CHECK(expand_grid(30, 5633, 10291, g, Objective::F1).samp_values ==
          std::vector<std::int64_t>{5633, 8449, 10291});
    g.samp_multipliers = {0.5, 1.0, 3.0};
    CHECK(expand_grid(30, 10, 25, g, Objective::F1).samp_values ==
          std::vector<std::int64_t>{5, 10, 25});
}

TEST_CASE("cutoff range") {
    const auto c = cutoff_range(0.05, 0.95, 0.01);
    CHECK(c.size() == 91);
    CHECK(c.front() == 0.05);
    CHECK(c[57] == 0.62);
    CHECK(c.back() == 0.95);
    GridConfig g;
    g.cutoff_min = 0.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("single cell grid returns that cell") {
    const auto ds = testing::random_dataset(100, 3, 1, 1);
    TunerGrid grid;
    grid.ntree_values = {4};
    grid.mtry_values = {2};
    grid.samp_values = {30};
    grid.cutoff_values = {0.5};
    AffineCost ac{44, 55, 0, 168, 168};
    const auto r = tune(ds, grid, ac);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.best.ntree == 4);
    CHECK(r.best.mtry == 2);
    CHECK(r.best.samp == 30);
    CHECK(r.best.cutoff == 0.5);
    CHECK(r.params.ntree == 4);
}

TEST_CASE("best cell equals an exhaustive re-run") {
    const auto ds = testing::random_dataset(300, 5, 2, 31);
    const AffineCost ac{44, 55, 0, 168, 168};
    for (Objective obj : {Objective::Savings, Objective::F1}) {
        const auto grid = expand_grid(ds.schema.size(), ds.positives, ds.negatives, small_grid(), obj);
        REQUIRE(grid.ntree_values.size() == 2);
        REQUIRE(grid.mtry_values.size() == 2);
        REQUIRE(grid.cutoff_values.size() == 3);
        const auto result = tune(ds, grid, ac, {7, 0.0});

        // Oracle: train each cell from scratch and score it by hand.
        const auto labels = ds.labels();
        using Key = std::tuple<double, double, int, int, std::int64_t>;
        Key best{};
        bool have = false;
        std::size_t k = 0;
        for (auto samp : grid.samp_values) {
            for (int mtry : grid.mtry_values) {
                for (int ntree : grid.ntree_values) {
                    ForestParams p;
                    p.ntree = ntree;
                    p.mtry = mtry;
                    p.samp = samp;
                    p.seed = 7;
                    p.min_leaf = 3;
                    const auto scores = vote_scores(train(ds, p), ds);
                    for (double cutoff : grid.cutoff_values) {
                        std::int64_t tp = 0, fp = 0, pos = 0;
                        for (std::size_t i = 0; i < scores.size(); ++i) {
                            const bool hit = scores[i] >= cutoff;
                            tp += hit && labels[i];
                            fp += hit && !labels[i];
                            pos += labels[i];
                        }
                        const double s = 44.0 * tp - 55.0 * fp;
                        const double f = 2.0 * tp / static_cast<double>(tp + fp + pos);
                        const auto& e = result.trace.at(k++);
                        CHECK(e.ntree == ntree);
                        CHECK(e.cutoff == cutoff);
                        CHECK(e.counts.tp == tp);
                        CHECK(e.counts.fp == fp);
                        CHECK(e.savings == s);
                        CHECK(e.f1 == doctest::Approx(f));
                        // Larger value, then larger cutoff, then smaller ntree/mtry/samp.
                        const Key key{obj == Objective::F1 ? e.f1 : s, cutoff, -ntree, -mtry, -samp};
                        if (!have || key > best) {
                            best = key;
                            have = true;
                        }
                    }
                }
            }
        }
        CHECK(std::get<0>(best) == result.best.objective(obj));
        CHECK(std::get<1>(best) == result.best.cutoff);
        CHECK(-std::get<2>(best) == result.best.ntree);
        CHECK(-std::get<3>(best) == result.best.mtry);
        CHECK(-std::get<4>(best) == result.best.samp);
    }
}

TEST_CASE("argmax dominance and reselection") {
    const auto ds = testing::random_dataset(200, 4, 1, 3);
    const AffineCost ac{44, 55, 0, 168, 168};
    const auto grid = expand_grid(ds.schema.size(), ds.positives, ds.negatives, small_grid(),
                                  Objective::Savings);
    const auto s = tune(ds, grid, ac, {42, 0.0});
    const auto f = reselect(s, Objective::F1);
    for (const auto& e : s.trace) {
        CHECK(s.best.savings >= e.savings);
        CHECK(f.best.f1 >= e.f1);
    }
    CHECK(s.best.savings >= f.best.savings);
    CHECK(f.trace.size() == s.trace.size());

    // Same trace regardless of the objective used for the first pass.
    const auto grid_f1 = expand_grid(ds.schema.size(), ds.positives, ds.negatives, small_grid(),
                                     Objective::F1);
    const auto direct = tune(ds, grid_f1, ac, {42, 0.0});
    CHECK(direct.best.ntree == f.best.ntree);
    CHECK(direct.best.mtry == f.best.mtry);
    CHECK(direct.best.cutoff == f.best.cutoff);
}

TEST_CASE("holdout split scores only held-out rows") {
    const auto ds = testing::random_dataset(200, 4, 1, 13);
    const auto grid = expand_grid(ds.schema.size(), ds.positives, ds.negatives, small_grid(),
                                  Objective::Savings);
    const auto r = tune(ds, grid, AffineCost{44, 55, 0, 168, 168}, {42, 0.25});
    const auto total = r.trace.front().counts.total();
    CHECK(total == std::llround(0.25 * ds.positives) + std::llround(0.25 * ds.negatives));
    CHECK(r.trace.front().counts.positives() == std::llround(0.25 * ds.positives));
    const auto again = tune(ds, grid, AffineCost{44, 55, 0, 168, 168}, {42, 0.25});
    CHECK(again.best.savings == r.best.savings);
    CHECK(again.best.cutoff == r.best.cutoff);
}

TEST_CASE("tie-break order") {
    TraceEntry a, b;
    a.savings = b.savings = 10;
    a.cutoff = 0.6;
    b.cutoff = 0.5;
    CHECK(better_than(a, b, Objective::Savings));
    b.cutoff = 0.6;
    a.ntree = 50;
    b.ntree = 100;
    CHECK(better_than(a, b, Objective::Savings));
    CHECK_FALSE(better_than(b, a, Objective::Savings));
    CHECK_THROWS_AS(select_best({}, Objective::F1), ConfigError);
}

TEST_CASE("iso-savings lines") {
    const AffineCost ac{44, 55, 0, 168, 168};
    const auto zero = iso_savings_line(0.0, ac, 5445, 10479);
    CHECK(std::abs(zero.slope - (55.0 * 10479) / (44.0 * 5445)) <= 1e-9);
    CHECK(zero.slope == doctest::Approx(2.4056).epsilon(1e-4));
    CHECK(zero.intercept == 0.0);
    const auto pts = sample_iso_line(zero, 11);
    CHECK(pts.front().fpr == 0.0);
    CHECK(pts.front().tpr == 0.0);

    const auto up = iso_savings_line(21483.0, ac, 5445, 10479);
    CHECK(up.intercept == doctest::Approx(0.08966).epsilon(1e-4));
    for (double s0 : {0.0, 21483.0, 100000.0, -5000.0}) {
        const auto line = iso_savings_line(s0, ac, 5445, 10479);
        for (const auto& p : sample_iso_line(line, 50)) {
            CHECK(p.fpr >= 0.0);
            CHECK(p.fpr <= 1.0);
            CHECK(p.tpr >= -1e-12);
            CHECK(p.tpr <= 1.0 + 1e-12);
            CHECK(ac(p.tpr * 5445, p.fpr * 10479) == doctest::Approx(s0).epsilon(1e-9).scale(1e4));
        }
    }
    CHECK_THROWS_AS(iso_savings_line(0.0, ac, 0, 10), ConfigError);
}

}
