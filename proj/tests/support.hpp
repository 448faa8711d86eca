#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pdm/forest.hpp"
#include "pdm/windowing.hpp"

namespace testing {

/// Random dataset with `numeric` numeric and `categorical` categorical
/// columns. Labels lean on the first numeric column so trees have something
/// to split on; values are rounded to give ties.
inline pdm::WindowedDataset random_dataset(std::size_t rows, std::size_t numeric,
                                           std::size_t categorical, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    pdm::WindowedDataset ds;
    for (std::size_t c = 0; c < numeric; ++c) {
        ds.schema.names.push_back("x" + std::to_string(c));
        ds.schema.kinds.push_back(pdm::FeatureKind::Numeric);
    }
    for (std::size_t c = 0; c < categorical; ++c) {
        ds.schema.names.push_back("cat_" + std::to_string(c));
        ds.schema.kinds.push_back(pdm::FeatureKind::Categorical);
    }
    for (std::size_t r = 0; r < rows; ++r) {
        pdm::DatasetRow row;
        row.device_id = static_cast<std::int64_t>(r);
        for (std::size_t c = 0; c < numeric; ++c) {
            row.features.push_back(std::round(u(gen) * 20.0) / 2.0);
        }
        for (std::size_t c = 0; c < categorical; ++c) {
            row.features.push_back(static_cast<double>(gen() % 4));
        }
        const double signal = numeric > 0 ? row.features[0] / 10.0 : 0.5;
        row.label = u(gen) < 0.2 + 0.6 * signal ? 1 : 0;
        ds.rows.push_back(std::move(row));
    }
    // Guarantee both classes.
    ds.rows[0].label = 1;
    ds.rows[1].label = 0;
    ds.recount();
    return ds;
}

/// Walks one tree by re-evaluating each stored predicate directly.
inline double walk(const pdm::DecisionTree& tree, const std::vector<double>& row) {
    std::size_t at = 0;
    for (;;) {
        const auto& n = tree.nodes.at(at);
        if (n.feature < 0) return n.value;
        const double v = row.at(static_cast<std::size_t>(n.feature));
        const bool go_left = n.categorical ? v == n.threshold : v <= n.threshold;
        at = static_cast<std::size_t>(go_left ? n.left : n.right);
    }
}

}  // namespace testing
