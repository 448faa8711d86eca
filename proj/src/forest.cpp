#include "pdm/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <utility>

#include "pdm/error.hpp"
#include "pdm/parallel.hpp"
#include "pdm/rng.hpp"

namespace pdm {

namespace {

constexpr int kModelFormatVersion = 1;
constexpr double kMinGain = 1e-12;

struct Split {
    bool found = false;
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0.0;
    double gain = 0.0;
};

double gini(double pos, double n) {
    if (n <= 0.0) return 0.0;
    const double p = pos / n;
    return 2.0 * p * (1.0 - p);
}

double weighted_child_gini(double pos_l, double n_l, double pos_r, double n_r) {
    const double n = n_l + n_r;
    return (n_l / n) * gini(pos_l, n_l) + (n_r / n) * gini(pos_r, n_r);
}

class TreeGrower {
public:
    TreeGrower(const FeatureMatrix& x, std::span<const int> labels,
               std::span<const FeatureKind> kinds, const ForestParams& params,
               std::mt19937_64& rng)
        : x_(x), labels_(labels), kinds_(kinds), params_(params), rng_(rng) {}

    DecisionTree grow(std::vector<std::uint32_t> rows) {
        tree_.nodes.clear();
        build(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    std::int32_t build(std::vector<std::uint32_t> rows, int depth) {
        const auto id = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const auto n = static_cast<double>(rows.size());
        double pos = 0.0;
        for (auto r : rows) pos += labels_[r];
        tree_.nodes[id].value = n > 0.0 ? pos / n : 0.0;

        const bool pure = pos == 0.0 || pos == n;
        const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
        if (pure || depth_capped || rows.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) {
            return id;
        }

        const Split split = best_split(rows, pos);
        if (!split.found) return id;

        std::vector<std::uint32_t> left, right;
        for (auto r : rows) {
            const double v = x_.at(r, split.feature);
            const bool goes_left = split.categorical ? v == split.threshold : v <= split.threshold;
            (goes_left ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].feature = static_cast<std::int32_t>(split.feature);
        tree_.nodes[id].categorical = split.categorical;
        tree_.nodes[id].threshold = split.threshold;
        const auto l = build(std::move(left), depth + 1);
        const auto r = build(std::move(right), depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    Split best_split(const std::vector<std::uint32_t>& rows, double pos) {
        const double n = static_cast<double>(rows.size());
        const double parent = gini(pos, n);
        const auto min_leaf = static_cast<double>(params_.min_leaf);
        Split best;

        for (std::size_t f : sample_features(rng_, x_.cols(), static_cast<std::size_t>(params_.mtry))) {
            const auto column = x_.column(f);
            scratch_.clear();
            for (auto r : rows) scratch_.emplace_back(column[r], labels_[r]);
            std::sort(scratch_.begin(), scratch_.end());

            auto consider = [&](bool categorical, double threshold, double pos_l, double n_l) {
                const double n_r = n - n_l;
                if (n_l < min_leaf || n_r < min_leaf) return;
                const double gain = parent - weighted_child_gini(pos_l, n_l, pos - pos_l, n_r);
                if (gain > kMinGain && (!best.found || gain > best.gain)) {
                    best = {true, f, categorical, threshold, gain};
                }
            };

            if (kinds_[f] == FeatureKind::Categorical) {
                for (std::size_t i = 0; i < scratch_.size();) {
                    std::size_t j = i;
                    double group_pos = 0.0;
                    while (j < scratch_.size() && scratch_[j].first == scratch_[i].first) {
                        group_pos += scratch_[j].second;
                        ++j;
                    }
                    if (j - i < scratch_.size()) {
                        consider(true, scratch_[i].first, group_pos, static_cast<double>(j - i));
                    }
                    i = j;
                }
            } else {
                double pos_l = 0.0;
                for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
                    pos_l += scratch_[i].second;
                    if (scratch_[i].first == scratch_[i + 1].first) continue;
                    const double mid = 0.5 * (scratch_[i].first + scratch_[i + 1].first);
                    consider(false, mid, pos_l, static_cast<double>(i + 1));
                }
            }
        }
        return best;
    }

    const FeatureMatrix& x_;
    std::span<const int> labels_;
    std::span<const FeatureKind> kinds_;
    const ForestParams& params_;
    std::mt19937_64& rng_;
    DecisionTree tree_;
    std::vector<std::pair<double, int>> scratch_;
};

void check_width(const ForestModel& model, std::size_t width) {
    if (width != model.schema().size()) {
        throw DataError("row has " + std::to_string(width) + " features, model expects " +
                        std::to_string(model.schema().size()));
    }
}

void check_schema(const ForestModel& model, const FeatureSchema& schema) {
    if (!(schema == model.schema())) {
        throw DataError("dataset feature schema does not match the model schema");
    }
}

std::string_view sampling_name(SamplingMode m) {
    return m == SamplingMode::Stratified ? "stratified" : "bootstrap";
}

SamplingMode parse_sampling(std::string_view s) {
    if (s == "stratified") return SamplingMode::Stratified;
    if (s == "bootstrap") return SamplingMode::Bootstrap;
    throw DataError("unknown sampling mode '" + std::string(s) + "'");
}

}  // namespace

void ForestParams::validate(std::size_t n_features) const {
    if (ntree < 1) throw ConfigError("ntree must be >= 1");
    if (mtry < 1 || static_cast<std::size_t>(mtry) > n_features) {
        throw ConfigError("mtry " + std::to_string(mtry) + " outside [1, " +
                          std::to_string(n_features) + "]");
    }
    if (samp < 1) throw ConfigError("samp must be >= 1");
    if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
    if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

FeatureMatrix::FeatureMatrix(const WindowedDataset& ds)
    : FeatureMatrix(ds.rows.size(), ds.schema.size()) {
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto& f = ds.rows[r].features;
        if (f.size() != cols_) throw DataError("dataset row width does not match its schema");
        for (std::size_t c = 0; c < cols_; ++c) at(r, c) = f[c];
    }
}

double DecisionTree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        const double v = row[static_cast<std::size_t>(node.feature)];
        const bool left = node.categorical ? v == node.threshold : v <= node.threshold;
        i = static_cast<std::size_t>(left ? node.left : node.right);
    }
    return nodes[i].value;
}

std::vector<std::size_t> sample_features(std::mt19937_64& rng, std::size_t n, std::size_t mtry) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    mtry = std::min(mtry, n);
    for (std::size_t i = 0; i < mtry; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(mtry);
    std::sort(ids.begin(), ids.end());
    return ids;
}

DecisionTree grow_tree(const FeatureMatrix& x, std::span<const int> labels,
                       std::span<const FeatureKind> kinds, std::vector<std::uint32_t> rows,
                       const ForestParams& params, std::mt19937_64& rng) {
    TreeGrower grower(x, labels, kinds, params, rng);
    return grower.grow(std::move(rows));
}

std::vector<std::uint32_t> draw_tree_sample(std::span<const int> labels,
                                            const ForestParams& params, std::mt19937_64& rng) {
    std::vector<std::uint32_t> sample;
    if (params.sampling == SamplingMode::Bootstrap) {
        sample.reserve(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            sample.push_back(static_cast<std::uint32_t>(uniform_index(rng, labels.size())));
        }
        return sample;
    }

    std::vector<std::uint32_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(static_cast<std::uint32_t>(i));
    }
    for (const auto* cls : {&pos, &neg}) {
        const auto draws = std::min<std::size_t>(static_cast<std::size_t>(params.samp), cls->size());
        for (std::size_t i = 0; i < draws; ++i) {
            sample.push_back((*cls)[uniform_index(rng, cls->size())]);
        }
    }
    return sample;
}

ForestModel::ForestModel(ForestParams params, FeatureSchema schema,
                         std::vector<DecisionTree> trees)
    : params_(params), schema_(std::move(schema)), trees_(std::move(trees)) {}

double ForestModel::score(std::span<const double> row) const {
    check_width(*this, row.size());
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(row);
    return sum / static_cast<double>(trees_.size());
}

ForestModel ForestModel::truncated(std::size_t n) const {
    if (n < 1 || n > trees_.size()) throw ConfigError("cannot truncate forest to " + std::to_string(n) + " trees");
    ForestParams p = params_;
    p.ntree = static_cast<int>(n);
    return ForestModel(p, schema_, {trees_.begin(), trees_.begin() + static_cast<std::ptrdiff_t>(n)});
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json j;
    j["format"] = "pdm-forest";
    j["version"] = kModelFormatVersion;
    j["params"] = {{"ntree", params_.ntree},       {"mtry", params_.mtry},
                   {"samp", params_.samp},         {"seed", params_.seed},
                   {"max_depth", params_.max_depth}, {"min_leaf", params_.min_leaf},
                   {"sampling", sampling_name(params_.sampling)}};
    auto& schema = j["schema"] = nlohmann::json::array();
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        schema.push_back({{"name", schema_.names[i]},
                          {"kind", schema_.kinds[i] == FeatureKind::Categorical ? "categorical"
                                                                                : "numeric"}});
    }
    auto& trees = j["trees"] = nlohmann::json::array();
    for (const auto& t : trees_) {
        nlohmann::json feature = nlohmann::json::array(), categorical = nlohmann::json::array(),
                       threshold = nlohmann::json::array(), left = nlohmann::json::array(),
                       right = nlohmann::json::array(), value = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            categorical.push_back(n.categorical ? 1 : 0);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
        }
        trees.push_back({{"feature", feature}, {"categorical", categorical},
                         {"threshold", threshold}, {"left", left},
                         {"right", right}, {"value", value}});
    }
    return j;
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "pdm-forest") throw DataError("not a pdm-forest model file");
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw DataError("unsupported model version " + j.at("version").dump());
        }
        const auto& p = j.at("params");
        ForestParams params;
        params.ntree = p.at("ntree").get<int>();
        params.mtry = p.at("mtry").get<int>();
        params.samp = p.at("samp").get<std::int64_t>();
        params.seed = p.at("seed").get<std::uint64_t>();
        params.max_depth = p.at("max_depth").get<int>();
        params.min_leaf = p.at("min_leaf").get<int>();
        params.sampling = parse_sampling(p.at("sampling").get<std::string>());

        FeatureSchema schema;
        for (const auto& f : j.at("schema")) {
            schema.names.push_back(f.at("name").get<std::string>());
            const auto kind = f.at("kind").get<std::string>();
            if (kind != "numeric" && kind != "categorical") throw DataError("bad feature kind " + kind);
            schema.kinds.push_back(kind == "categorical" ? FeatureKind::Categorical
                                                         : FeatureKind::Numeric);
        }

        std::vector<DecisionTree> trees;
        for (const auto& t : j.at("trees")) {
            const auto& feature = t.at("feature");
            const std::size_t count = feature.size();
            DecisionTree tree;
            tree.nodes.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                auto& n = tree.nodes[i];
                n.feature = feature.at(i).get<std::int32_t>();
                n.categorical = t.at("categorical").at(i).get<int>() != 0;
                n.threshold = t.at("threshold").at(i).get<double>();
                n.left = t.at("left").at(i).get<std::int32_t>();
                n.right = t.at("right").at(i).get<std::int32_t>();
                n.value = t.at("value").at(i).get<double>();
                const auto limit = static_cast<std::int32_t>(count);
                if (n.feature >= static_cast<std::int32_t>(schema.size()) ||
                    (!n.is_leaf() && (n.left <= static_cast<std::int32_t>(i) || n.left >= limit ||
                                      n.right <= static_cast<std::int32_t>(i) || n.right >= limit))) {
                    throw DataError("corrupt tree node " + std::to_string(i));
                }
            }
            if (count == 0) throw DataError("empty tree in model file");
            trees.push_back(std::move(tree));
        }
        if (trees.size() != static_cast<std::size_t>(params.ntree)) {
            throw DataError("model declares ntree " + std::to_string(params.ntree) + " but holds " +
                            std::to_string(trees.size()) + " trees");
        }
        return ForestModel(params, std::move(schema), std::move(trees));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model json: ") + e.what());
    }
}

ForestModel train(const WindowedDataset& dataset, const ForestParams& params) {
    const FeatureMatrix x(dataset);
    const auto labels = dataset.labels();
    return train(x, labels, dataset.schema, params);
}

ForestModel train(const FeatureMatrix& x, std::span<const int> labels,
                  const FeatureSchema& schema, const ForestParams& params) {
    params.validate(schema.size());
    if (x.cols() != schema.size()) throw DataError("feature matrix width does not match schema");
    if (labels.size() != x.rows()) throw DataError("label count does not match row count");
    if (labels.empty()) throw TrainingError("cannot train on an empty dataset");
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
        throw TrainingError("training data must contain both classes");
    }

    std::vector<DecisionTree> trees(static_cast<std::size_t>(params.ntree));
    parallel_for(trees.size(), [&](std::size_t t) {
        auto rng = make_stream({params.seed, static_cast<std::uint64_t>(t)});
        auto rows = draw_tree_sample(labels, params, rng);
        trees[t] = grow_tree(x, labels, schema.kinds, std::move(rows), params, rng);
    });
    return ForestModel(params, schema, std::move(trees));
}

std::vector<double> vote_scores(const ForestModel& model, const WindowedDataset& dataset) {
    check_schema(model, dataset.schema);
    std::vector<double> scores(dataset.rows.size());
    parallel_for(scores.size(), [&](std::size_t i) {
        scores[i] = model.score(dataset.rows[i].features);
    });
    return scores;
}

std::vector<double> vote_scores(const ForestModel& model,
                                std::span<const std::vector<double>> rows) {
    for (const auto& r : rows) check_width(model, r.size());
    std::vector<double> scores(rows.size());
    parallel_for(scores.size(), [&](std::size_t i) { scores[i] = model.score(rows[i]); });
    return scores;
}

std::vector<std::vector<double>> prefix_scores(const ForestModel& model,
                                               const WindowedDataset& dataset,
                                               std::span<const int> ntrees) {
    check_schema(model, dataset.schema);
    for (std::size_t i = 0; i < ntrees.size(); ++i) {
        if (ntrees[i] < 1 || static_cast<std::size_t>(ntrees[i]) > model.trees().size() ||
            (i > 0 && ntrees[i] <= ntrees[i - 1])) {
            throw ConfigError("prefix_scores needs ascending tree counts within the model size");
        }
    }
    std::vector<std::vector<double>> out(ntrees.size(),
                                         std::vector<double>(dataset.rows.size()));
    parallel_for(dataset.rows.size(), [&](std::size_t r) {
        const auto& row = dataset.rows[r].features;
        check_width(model, row.size());
        double sum = 0.0;
        std::size_t next = 0;
        for (std::size_t t = 0; t < model.trees().size() && next < ntrees.size(); ++t) {
            sum += model.trees()[t].predict(row);
            if (t + 1 == static_cast<std::size_t>(ntrees[next])) {
                out[next][r] = sum / static_cast<double>(t + 1);
                ++next;
            }
        }
    });
    return out;
}

std::vector<int> classify(std::span<const double> scores, double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("cutoff must lie in (0,1)");
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= cutoff ? 1 : 0;
    return labels;
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << model.to_json().dump() << '\n';
}

ForestModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return ForestModel::from_json(j);
}

}  // namespace pdm
