#ifndef FUZZYCLASS_CLASSIFIER_HPP
#define FUZZYCLASS_CLASSIFIER_HPP

// Trained classifier (forest + anchors + threshold), its model file, and
// grid-search tuning inside the training set.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/error.hpp"
#include "fuzzyclass/evalsplit.hpp"
#include "fuzzyclass/features_matrix.hpp"
#include "fuzzyclass/forest.hpp"
#include "fuzzyclass/rng.hpp"

namespace fuzzyclass {

inline constexpr std::string_view model_format_tag = "fuzzyclass-model v1";

struct FeatureImportance {
    std::vector<double> columns;
    std::array<double, 3> by_hash_type{}; // file, strings, symbols
};

class TrainedClassifier {
public:
    TrainedClassifier() = default;
    TrainedClassifier(RandomForest forest, AnchorSet anchors, double threshold)
        : forest_(std::move(forest)), anchors_(std::move(anchors)), threshold_(threshold) {
        if (forest_.n_features() != anchors_.size() * columns_per_anchor)
            throw Error(ErrorKind::Inconsistent, "forest width does not match anchor count");
        check_threshold(threshold_);
    }

    /// Anchors are the training samples; the forest is fit on their square similarity matrix.
    static TrainedClassifier train(std::span<const SampleRecord> train_records, const Hyperparams& hp,
                                   std::uint64_t seed, double threshold) {
        auto anchors = AnchorSet::from_records(train_records);
        std::vector<SampleRecord> rows;
        for (const auto& a : anchors.anchors) rows.push_back({a.class_label, a.version, a.sample_name, "", a.features});
        const auto x = build_matrix(rows, anchors);
        std::vector<std::string> y;
        for (const auto& a : anchors.anchors) y.push_back(a.class_label);
        return {RandomForest::fit(x, y, hp, seed), std::move(anchors), threshold};
    }

    std::vector<double> predict_proba(std::span<const double> row) const { return forest_.predict_proba(row); }

    Prediction predict(std::span<const double> row) const { return predict(row, threshold_); }
    Prediction predict(std::span<const double> row, double threshold) const {
        return decide(forest_.classes(), forest_.predict_proba(row), threshold);
    }

    Prediction classify(const FeatureTriple& features) const { return classify(features, threshold_); }
    Prediction classify(const FeatureTriple& features, double threshold) const {
        return predict(similarity_row(features, anchors_), threshold);
    }

    FeatureImportance feature_importance() const {
        FeatureImportance fi;
        fi.columns = forest_.importances();
        fi.by_hash_type = importance_by_hash_type(fi.columns);
        return fi;
    }

    const RandomForest& forest() const { return forest_; }
    const AnchorSet& anchors() const { return anchors_; }
    const std::vector<std::string>& classes() const { return forest_.classes(); }
    double threshold() const { return threshold_; }
    void set_threshold(double t) {
        check_threshold(t);
        threshold_ = t;
    }

    friend bool operator==(const TrainedClassifier&, const TrainedClassifier&) = default;

private:
    static void check_threshold(double t) {
        if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::Usage, "threshold must lie in [0, 1]");
    }

    RandomForest forest_;
    AnchorSet anchors_;
    double threshold_ = 0.0;
};

// ---------------------------------------------------------------------------
// Model file (JSON)

inline nlohmann::json max_depth_to_json(const std::optional<std::size_t>& d) {
    return d ? nlohmann::json(*d) : nlohmann::json("none");
}

inline std::optional<std::size_t> max_depth_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "none") return std::nullopt;
        throw Error(ErrorKind::Format, "max_depth must be a positive integer or \"none\"");
    }
    const auto d = j.get<std::size_t>();
    if (d == 0) throw Error(ErrorKind::Format, "max_depth must be positive");
    return d;
}

inline nlohmann::json to_json(const Hyperparams& hp) {
    return {{"n_estimators", hp.n_estimators},
            {"criterion", to_string(hp.criterion)},
            {"max_depth", max_depth_to_json(hp.max_depth)},
            {"min_samples_split", hp.min_samples_split},
            {"min_samples_leaf", hp.min_samples_leaf},
            {"max_features", to_string(hp.max_features)}};
}

inline Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams hp;
    hp.n_estimators = j.at("n_estimators").get<std::size_t>();
    hp.criterion = parse_criterion(j.at("criterion").get<std::string>());
    hp.max_depth = max_depth_from_json(j.at("max_depth"));
    hp.min_samples_split = j.at("min_samples_split").get<std::size_t>();
    hp.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    hp.max_features = parse_max_features(j.at("max_features").get<std::string>());
    return hp;
}

inline nlohmann::json to_json(const DecisionTree& t) {
    nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                   left = nlohmann::json::array(), right = nlohmann::json::array(), value = nlohmann::json::array();
    for (const auto& n : t.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(n.is_leaf() ? nlohmann::json(n.distribution) : nlohmann::json(nullptr));
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
    const auto& feature = j.at("feature");
    const auto& threshold = j.at("threshold");
    const auto& left = j.at("left");
    const auto& right = j.at("right");
    const auto& value = j.at("value");
    const std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || n == 0)
        throw Error(ErrorKind::Format, "tree arrays disagree in length");
    DecisionTree t;
    t.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = t.nodes[i];
        node.feature = feature[i].get<std::int32_t>();
        node.threshold = threshold[i].get<double>();
        node.left = left[i].get<std::int32_t>();
        node.right = right[i].get<std::int32_t>();
        if (node.is_leaf()) node.distribution = value[i].get<std::vector<double>>();
    }
    return t;
}

inline nlohmann::json to_json(const TrainedClassifier& m) {
    const auto& f = m.forest();
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& w : f.class_weights()) weights.push_back({w.numerator, w.denominator});
    nlohmann::json anchors = nlohmann::json::array();
    for (const auto& a : m.anchors().anchors)
        anchors.push_back({{"class", a.class_label},
                           {"version", a.version},
                           {"sample", a.sample_name},
                           {"file", a.features.file_hash.render()},
                           {"strings", a.features.strings_hash.render()},
                           {"symbols", a.features.symbols_hash.render()}});
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : f.trees()) trees.push_back(to_json(t));
    return {{"format", model_format_tag},
            {"seed", f.seed()},
            {"threshold", m.threshold()},
            {"hyperparams", to_json(f.hyperparams())},
            {"classes", f.classes()},
            {"class_weights", weights},
            {"n_features", f.n_features()},
            {"importances", f.importances()},
            {"anchors", anchors},
            {"trees", trees}};
}

inline TrainedClassifier classifier_from_json(const nlohmann::json& j) {
    try {
        const auto tag = j.at("format").get<std::string>();
        if (tag != model_format_tag) throw Error(ErrorKind::Format, "unsupported model format tag '" + tag + "'");
        std::vector<ClassWeight> weights;
        for (const auto& w : j.at("class_weights")) {
            const auto pair = w.get<std::vector<std::uint64_t>>();
            if (pair.size() != 2 || pair[1] == 0) throw Error(ErrorKind::Format, "bad class weight");
            weights.push_back({pair[0], pair[1]});
        }
        AnchorSet anchors;
        for (const auto& a : j.at("anchors"))
            anchors.anchors.push_back({a.at("class").get<std::string>(),
                                       a.at("version").get<std::string>(),
                                       a.at("sample").get<std::string>(),
                                       {FuzzyHash::parse(a.at("file").get<std::string>()),
                                        FuzzyHash::parse(a.at("strings").get<std::string>()),
                                        FuzzyHash::parse(a.at("symbols").get<std::string>())}});
        std::vector<DecisionTree> trees;
        for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
        auto classes = j.at("classes").get<std::vector<std::string>>();
        if (std::find(classes.begin(), classes.end(), unknown_label) != classes.end())
            throw Error(ErrorKind::Format, "the unknown label cannot be a trained class");
        auto forest = RandomForest::from_parts(std::move(classes), std::move(weights), std::move(trees),
                                               j.at("importances").get<std::vector<double>>(),
                                               hyperparams_from_json(j.at("hyperparams")),
                                               j.at("seed").get<std::uint64_t>(), j.at("n_features").get<std::size_t>());
        return {std::move(forest), std::move(anchors), j.at("threshold").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("model: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Format) throw;
        throw Error(ErrorKind::Format, std::string("model: ") + e.what());
    }
}

inline void write_model(std::ostream& out, const TrainedClassifier& m) { out << to_json(m).dump() << '\n'; }

inline TrainedClassifier read_model(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("model: ") + e.what());
    }
    return classifier_from_json(j);
}

inline void save_model(const TrainedClassifier& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_model(out, m);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

inline TrainedClassifier load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_model(in);
}

// ---------------------------------------------------------------------------
// Grid search

inline std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 18; ++i) t.push_back(i * 5 / 100.0);
    return t;
}

struct Grid {
    std::vector<std::size_t> n_estimators{100, 200};
    std::vector<Criterion> criterion{Criterion::gini, Criterion::entropy};
    std::vector<std::optional<std::size_t>> max_depth{std::nullopt, 20};
    std::vector<std::size_t> min_samples_split{2, 5};
    std::vector<std::size_t> min_samples_leaf{1, 2};
    std::vector<MaxFeatures> max_features{MaxFeatures::sqrt};
    std::vector<double> thresholds = default_thresholds();

    /// Cartesian product, last field varying fastest.
    std::vector<Hyperparams> points() const {
        std::vector<Hyperparams> out;
        for (auto n : n_estimators)
            for (auto c : criterion)
                for (auto d : max_depth)
                    for (auto s : min_samples_split)
                        for (auto l : min_samples_leaf)
                            for (auto m : max_features) out.push_back({n, c, d, s, l, m});
        return out;
    }
};

/// Any key may be omitted to keep its default.
inline Grid grid_from_json(const nlohmann::json& j) {
    Grid g;
    try {
        if (!j.is_object()) throw Error(ErrorKind::Format, "grid must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (!value.is_array() || value.empty()) throw Error(ErrorKind::Format, "grid entry '" + key + "' must be a non-empty array");
            if (key == "n_estimators") {
                g.n_estimators = value.get<std::vector<std::size_t>>();
            } else if (key == "criterion") {
                g.criterion.clear();
                for (const auto& v : value) g.criterion.push_back(parse_criterion(v.get<std::string>()));
            } else if (key == "max_depth") {
                g.max_depth.clear();
                for (const auto& v : value) g.max_depth.push_back(max_depth_from_json(v));
            } else if (key == "min_samples_split") {
                g.min_samples_split = value.get<std::vector<std::size_t>>();
            } else if (key == "min_samples_leaf") {
                g.min_samples_leaf = value.get<std::vector<std::size_t>>();
            } else if (key == "max_features") {
                g.max_features.clear();
                for (const auto& v : value) g.max_features.push_back(parse_max_features(v.get<std::string>()));
            } else if (key == "thresholds") {
                g.thresholds = value.get<std::vector<double>>();
                for (double t : g.thresholds)
                    if (!(t >= 0 && t <= 1)) throw Error(ErrorKind::Format, "thresholds must lie in [0, 1]");
            } else {
                throw Error(ErrorKind::Format, "unknown grid key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("grid: ") + e.what());
    }
    for (auto n : g.n_estimators)
        if (n == 0) throw Error(ErrorKind::Format, "n_estimators must be positive");
    for (auto s : g.min_samples_split)
        if (s < 2) throw Error(ErrorKind::Format, "min_samples_split must be at least 2");
    for (auto l : g.min_samples_leaf)
        if (l < 1) throw Error(ErrorKind::Format, "min_samples_leaf must be at least 1");
    return g;
}

struct ThresholdScore {
    double threshold = 0;
    double micro_f1 = 0;
    double macro_f1 = 0;
    double weighted_f1 = 0;

    double combined() const { return micro_f1 + macro_f1 + weighted_f1; }
};

struct GridPointResult {
    std::size_t grid_index = 0;
    Hyperparams hp;
    std::vector<ThresholdScore> curve;
};

struct GridSearchResult {
    Hyperparams best_hp;
    double best_threshold = 0;
    std::size_t best_index = 0;
    double best_score = 0;
    std::vector<GridPointResult> points;
    std::vector<std::string> pseudo_unknown_classes;
    std::size_t n_inner_train = 0;
    std::size_t n_validation = 0;

    const std::vector<ThresholdScore>& best_curve() const { return points[best_index].curve; }
};

inline constexpr double pseudo_unknown_class_frac = 0.2;
inline constexpr double validation_sample_frac = 0.25;

/// Tunes hyperparameters and the rejection threshold on the training samples
/// only. `train` is the square similarity matrix of the training samples
/// against themselves (row i and anchor i are the same sample).
inline GridSearchResult grid_search(const FeatureMatrix& train, std::span<const std::string> labels, const Grid& grid,
                                    std::uint64_t seed, std::size_t repeats = 1) {
    if (repeats == 0) throw Error(ErrorKind::Usage, "repeats must be positive");
    if (train.rows() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "training matrix rows and labels differ in count");
    if (train.cols() != train.rows() * columns_per_anchor)
        throw Error(ErrorKind::Inconsistent, "grid search needs the square training similarity matrix");
    if (grid.thresholds.empty() || grid.points().empty()) throw Error(ErrorKind::Usage, "empty grid");

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 4)
        throw Error(ErrorKind::TooFewClasses, "grid search needs at least 4 training classes, got " +
                                                  std::to_string(by_class.size()));

    GridSearchResult res;
    const auto points = grid.points();
    for (std::size_t g = 0; g < points.size(); ++g) {
        GridPointResult pr{g, points[g], {}};
        for (double t : grid.thresholds) pr.curve.push_back({t, 0, 0, 0});
        res.points.push_back(std::move(pr));
    }

    std::vector<std::string> classes;
    for (const auto& [c, _] : by_class) classes.push_back(c);
    const std::size_t n_pseudo = ceil_fraction(pseudo_unknown_class_frac, classes.size());
    const double scale = 1.0 / static_cast<double>(repeats);

    for (std::size_t rep = 0; rep < repeats; ++rep) {
        const std::uint64_t rep_seed = derive_seed(seed, 3000 + rep);
        auto shuffled_classes = classes;
        Rng class_rng(rep_seed, 2);
        class_rng.shuffle(shuffled_classes);
        std::vector<std::string> pseudo(shuffled_classes.begin(), shuffled_classes.begin() + static_cast<std::ptrdiff_t>(n_pseudo));
        std::sort(pseudo.begin(), pseudo.end());
        if (rep == 0) res.pseudo_unknown_classes = pseudo;

        std::vector<std::size_t> inner_train, validation;
        std::vector<std::string> truth;
        std::size_t class_index = 0;
        for (const auto& [c, rows] : by_class) {
            ++class_index;
            if (std::binary_search(pseudo.begin(), pseudo.end(), c)) {
                for (auto r : rows) {
                    validation.push_back(r);
                    truth.push_back(unknown_label);
                }
                continue;
            }
            auto shuffled = rows;
            Rng rng(rep_seed, 2000 + class_index);
            rng.shuffle(shuffled);
            // Keep at least one sample of every class on the fitting side.
            const std::size_t n_val = std::min(ceil_fraction(validation_sample_frac, shuffled.size()), shuffled.size() - 1);
            for (std::size_t i = 0; i < shuffled.size(); ++i) {
                if (i < n_val) {
                    validation.push_back(shuffled[i]);
                    truth.push_back(c);
                } else {
                    inner_train.push_back(shuffled[i]);
                }
            }
        }
        std::sort(inner_train.begin(), inner_train.end());
        if (rep == 0) {
            res.n_inner_train = inner_train.size();
            res.n_validation = validation.size();
        }

        const auto x_fit = train.select(inner_train, inner_train);
        const auto x_val = train.select(validation, inner_train);
        std::vector<std::string> y_fit;
        for (auto r : inner_train) y_fit.push_back(labels[r]);

        for (std::size_t g = 0; g < points.size(); ++g) {
            const auto forest = RandomForest::fit(x_fit, y_fit, points[g], rep_seed);
            std::vector<std::vector<double>> proba;
            for (std::size_t i = 0; i < x_val.rows(); ++i) proba.push_back(forest.predict_proba(x_val.row(i)));
            for (auto& s : res.points[g].curve) {
                std::vector<std::string> predicted;
                for (const auto& p : proba) predicted.push_back(decide(forest.classes(), p, s.threshold).label);
                const auto report = classification_report(truth, predicted);
                s.micro_f1 += scale * report.micro.f1;
                s.macro_f1 += scale * report.macro.f1;
                s.weighted_f1 += scale * report.weighted.f1;
            }
        }
    }

    bool have_best = false;
    for (const auto& p : res.points)
        for (const auto& s : p.curve) {
            const bool better = !have_best || s.combined() > res.best_score + 1e-12 ||
                                (s.combined() >= res.best_score - 1e-12 && s.threshold < res.best_threshold);
            if (better) {
                have_best = true;
                res.best_score = s.combined();
                res.best_threshold = s.threshold;
                res.best_index = p.grid_index;
                res.best_hp = p.hp;
            }
        }
    return res;
}

/// Score curve over thresholds, one CSV row each.
inline std::string render_curve_csv(const std::vector<ThresholdScore>& curve) {
    std::string out = "threshold,micro_f1,macro_f1,weighted_f1\n";
    for (const auto& s : curve)
        out += format_fixed(s.threshold, 2) + "," + format_fixed(s.micro_f1, 6) + "," + format_fixed(s.macro_f1, 6) +
               "," + format_fixed(s.weighted_f1, 6) + "\n";
    return out;
}

/// Every grid point at every threshold, for inspection.
inline std::string render_grid_csv(const GridSearchResult& r) {
    std::string out = "grid_index,n_estimators,criterion,max_depth,min_samples_split,min_samples_leaf,max_features,"
                      "threshold,micro_f1,macro_f1,weighted_f1,combined\n";
    for (const auto& p : r.points)
        for (const auto& s : p.curve)
            out += std::to_string(p.grid_index) + "," + std::to_string(p.hp.n_estimators) + "," +
                   std::string(to_string(p.hp.criterion)) + "," +
                   (p.hp.max_depth ? std::to_string(*p.hp.max_depth) : std::string("none")) + "," +
                   std::to_string(p.hp.min_samples_split) + "," + std::to_string(p.hp.min_samples_leaf) + "," +
                   std::string(to_string(p.hp.max_features)) + "," + format_fixed(s.threshold, 2) + "," +
                   format_fixed(s.micro_f1, 6) + "," + format_fixed(s.macro_f1, 6) + "," +
                   format_fixed(s.weighted_f1, 6) + "," + format_fixed(s.combined(), 6) + "\n";
    return out;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_CLASSIFIER_HPP
