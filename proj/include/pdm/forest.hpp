#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

#include "pdm/windowing.hpp"

namespace pdm {

enum class SamplingMode {
    Stratified,  ///< min(samp, P) positives + min(samp, N) negatives, with replacement
    Bootstrap,   ///< plain bootstrap of all rows, class-blind
};

struct ForestParams {
    int ntree = 200;
    int mtry = 5;
    std::int64_t samp = 1;
    std::uint64_t seed = 42;
    int max_depth = 0;  ///< 0 = unlimited
    int min_leaf = 5;
    SamplingMode sampling = SamplingMode::Stratified;

    /// Throws ConfigError; n_features bounds mtry.
    void validate(std::size_t n_features) const;
    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Column-major copy of the feature table, the layout split search wants.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(const WindowedDataset& ds);
    FeatureMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double at(std::size_t row, std::size_t col) const { return data_[col * rows_ + row]; }
    double& at(std::size_t row, std::size_t col) { return data_[col * rows_ + row]; }
    std::span<const double> column(std::size_t col) const {
        return {data_.data() + col * rows_, rows_};
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Internal nodes test `x[feature] <= threshold` (numeric) or
/// `x[feature] == threshold` (categorical); rows satisfying the predicate go
/// left. Leaves have feature == -1 and carry the positive fraction.
struct TreeNode {
    std::int32_t feature = -1;
    bool categorical = false;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    double predict(std::span<const double> row) const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

/// `mtry` distinct feature ids out of n, ascending.
std::vector<std::size_t> sample_features(std::mt19937_64& rng, std::size_t n, std::size_t mtry);

/// Grows one CART tree on the given (possibly repeated) row ids using Gini
/// impurity. Ties in impurity reduction go to the lowest feature id, then
/// the lowest threshold. Exposed for testing; train() is the normal entry.
DecisionTree grow_tree(const FeatureMatrix& x, std::span<const int> labels,
                       std::span<const FeatureKind> kinds, std::vector<std::uint32_t> rows,
                       const ForestParams& params, std::mt19937_64& rng);

/// Row ids for one tree under params.sampling, drawn with replacement.
std::vector<std::uint32_t> draw_tree_sample(std::span<const int> labels,
                                            const ForestParams& params, std::mt19937_64& rng);

class ForestModel {
public:
    ForestModel() = default;
    ForestModel(ForestParams params, FeatureSchema schema, std::vector<DecisionTree> trees);

    const ForestParams& params() const { return params_; }
    const FeatureSchema& schema() const { return schema_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    /// Mean of the leaf fractions reached by `row` over all trees.
    double score(std::span<const double> row) const;

    /// The first n trees, with params().ntree = n. Scores equal those of a
    /// forest trained with ntree = n and the same seed.
    ForestModel truncated(std::size_t n) const;

    nlohmann::json to_json() const;
    static ForestModel from_json(const nlohmann::json& j);

    friend bool operator==(const ForestModel&, const ForestModel&) = default;

private:
    ForestParams params_;
    FeatureSchema schema_;
    std::vector<DecisionTree> trees_;
};

/// Trains params.ntree trees, each on its own RNG stream (seed, tree_index).
/// Throws TrainingError on empty or single-class data.
ForestModel train(const WindowedDataset& dataset, const ForestParams& params);
ForestModel train(const FeatureMatrix& x, std::span<const int> labels,
                  const FeatureSchema& schema, const ForestParams& params);

/// Throws DataError when a row's width or the dataset schema disagrees
/// with the model schema.
std::vector<double> vote_scores(const ForestModel& model, const WindowedDataset& dataset);
std::vector<double> vote_scores(const ForestModel& model,
                                std::span<const std::vector<double>> rows);

/// Scores of the forest truncated to each value in `ntrees` (ascending, each
/// <= model size), computed in one pass. result[i] matches
/// vote_scores(model.truncated(ntrees[i]), dataset) bit for bit.
std::vector<std::vector<double>> prefix_scores(const ForestModel& model,
                                               const WindowedDataset& dataset,
                                               std::span<const int> ntrees);

/// label 1 iff score >= cutoff. Throws ConfigError unless cutoff in (0,1).
std::vector<int> classify(std::span<const double> scores, double cutoff);

void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace pdm
