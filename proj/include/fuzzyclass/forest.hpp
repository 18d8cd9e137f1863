#ifndef FUZZYCLASS_FOREST_HPP
#define FUZZYCLASS_FOREST_HPP

// Random forest over dense similarity features.
//
// Trees are grown on bootstrap resamples with per-sample weights
// (bootstrap multiplicity times the balanced class weight N / (K * n_c)).
// Splits are "feature <= threshold" with thresholds at midpoints between
// consecutive distinct values and are chosen to minimise the weighted child
// impurity (gini or entropy). Leaves hold the weight-normalised class
// distribution; the forest probability is the mean over trees.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuzzyclass/error.hpp"
#include "fuzzyclass/features_matrix.hpp"
#include "fuzzyclass/parallel.hpp"
#include "fuzzyclass/rng.hpp"

namespace fuzzyclass {

enum class Criterion { gini, entropy };
enum class MaxFeatures { sqrt, log2, all };

inline std::string_view to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }

inline std::string_view to_string(MaxFeatures m) {
    switch (m) {
    case MaxFeatures::sqrt: return "sqrt";
    case MaxFeatures::log2: return "log2";
    case MaxFeatures::all: return "all";
    }
    return "?";
}

inline Criterion parse_criterion(std::string_view s) {
    if (s == "gini") return Criterion::gini;
    if (s == "entropy") return Criterion::entropy;
    throw Error(ErrorKind::Format, "unknown criterion '" + std::string(s) + "'");
}

inline MaxFeatures parse_max_features(std::string_view s) {
    if (s == "sqrt") return MaxFeatures::sqrt;
    if (s == "log2") return MaxFeatures::log2;
    if (s == "all") return MaxFeatures::all;
    throw Error(ErrorKind::Format, "unknown max_features '" + std::string(s) + "'");
}

struct Hyperparams {
    std::size_t n_estimators = 100;
    Criterion criterion = Criterion::gini;
    std::optional<std::size_t> max_depth; // nullopt: unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    MaxFeatures max_features = MaxFeatures::sqrt;

    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

inline std::size_t resolve_max_features(MaxFeatures m, std::size_t n_cols) {
    switch (m) {
    case MaxFeatures::sqrt: return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_cols))));
    case MaxFeatures::log2: return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(static_cast<double>(n_cols))));
    case MaxFeatures::all: break;
    }
    return n_cols;
}

/// Exact rational class weight; value() is what training uses.
struct ClassWeight {
    std::uint64_t numerator = 1;
    std::uint64_t denominator = 1;

    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

    friend bool operator==(const ClassWeight&, const ClassWeight&) = default;
};

/// Balanced weights: w_c = N / (K * n_c), in class order, reduced to lowest terms.
inline std::vector<ClassWeight> balanced_class_weights(std::span<const std::size_t> class_counts) {
    std::uint64_t n = 0;
    for (auto c : class_counts) n += c;
    const std::uint64_t k = class_counts.size();
    std::vector<ClassWeight> w;
    for (auto c : class_counts) {
        if (c == 0) throw Error(ErrorKind::DegenerateInput, "class with no samples");
        const std::uint64_t den = k * c;
        const std::uint64_t g = std::gcd(n, den);
        w.push_back({n / g, den / g});
    }
    return w;
}

inline double node_impurity(std::span<const double> class_weight, double total, Criterion criterion) {
    if (total <= 0) return 0.0;
    double acc = 0.0;
    if (criterion == Criterion::gini) {
        for (double w : class_weight) {
            const double p = w / total;
            acc += p * p;
        }
        return 1.0 - acc;
    }
    for (double w : class_weight) {
        if (w <= 0) continue;
        const double p = w / total;
        acc -= p * std::log2(p);
    }
    return acc;
}

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> distribution; // leaves only

    bool is_leaf() const { return feature < 0; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& leaf_for(std::span<const double> row) const {
        std::size_t i = 0;
        while (!nodes[i].is_leaf())
            i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                               : nodes[i].right);
        return nodes[i].distribution;
    }

    std::size_t depth() const {
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
        std::size_t best = 0;
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes[i].is_leaf()) {
                stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
                stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
            }
        }
        return best;
    }

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double child_impurity = std::numeric_limits<double>::infinity(); // W_L*imp_L + W_R*imp_R
    bool found = false;
};

namespace detail {

inline bool better_split(double imp, std::size_t feature, double threshold, const SplitChoice& best) {
    if (!best.found) return true;
    const double tol = 1e-12 * std::max(1.0, std::abs(best.child_impurity));
    if (imp < best.child_impurity - tol) return true;
    if (imp > best.child_impurity + tol) return false;
    return std::pair(feature, threshold) < std::pair(best.feature, best.threshold);
}

struct TreeBuilder {
    const FeatureMatrix& x;
    std::span<const std::size_t> y;
    std::span<const double> weight; // per row; 0 = not in bootstrap
    std::size_t n_classes;
    const Hyperparams& hp;
    std::size_t max_features;
    Rng& rng;
    DecisionTree tree;
    std::vector<double> importance; // weighted impurity decrease per column

    void class_totals(std::span<const std::size_t> rows, std::vector<double>& out, double& total) const {
        out.assign(n_classes, 0.0);
        total = 0.0;
        for (auto r : rows) {
            out[y[r]] += weight[r];
            total += weight[r];
        }
    }

    /// Best threshold on one feature; false if the feature is constant on the node.
    bool evaluate_feature(std::span<const std::size_t> rows, std::size_t f, const std::vector<double>& totals,
                          double total, SplitChoice& best) const {
        std::vector<std::pair<double, std::size_t>> vals;
        vals.reserve(rows.size());
        for (auto r : rows) vals.emplace_back(x.at(r, f), r);
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) return false;

        std::vector<double> left(n_classes, 0.0), right(n_classes);
        double left_total = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left[y[vals[i].second]] += weight[vals[i].second];
            left_total += weight[vals[i].second];
            if (vals[i].first == vals[i + 1].first) continue;
            const std::size_t n_left = i + 1;
            const std::size_t n_right = vals.size() - n_left;
            if (n_left < hp.min_samples_leaf || n_right < hp.min_samples_leaf) continue;
            for (std::size_t k = 0; k < n_classes; ++k) right[k] = totals[k] - left[k];
            const double right_total = total - left_total;
            const double imp = left_total * node_impurity(left, left_total, hp.criterion) +
                               right_total * node_impurity(right, right_total, hp.criterion);
            const double threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
            if (better_split(imp, f, threshold, best)) best = {f, threshold, imp, true};
        }
        return true;
    }

    SplitChoice choose_split(std::span<const std::size_t> rows, const std::vector<double>& totals, double total) {
        // Features are drawn without replacement in random order. Constant
        // features do not count toward max_features, and drawing continues
        // past max_features until some valid split exists.
        std::vector<std::size_t> order(x.cols());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SplitChoice best;
        std::size_t informative = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (informative >= max_features && best.found) break;
            std::swap(order[i], order[i + rng.below(order.size() - i)]);
            if (evaluate_feature(rows, order[i], totals, total, best)) ++informative;
        }
        return best;
    }

    std::int32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
        std::vector<double> totals;
        double total = 0.0;
        class_totals(rows, totals, total);
        const double impurity = node_impurity(totals, total, hp.criterion);

        const auto index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        const bool stop = (hp.max_depth && depth >= *hp.max_depth) || rows.size() < hp.min_samples_split ||
                          rows.size() < 2 * hp.min_samples_leaf || impurity <= 1e-12;
        SplitChoice split;
        if (!stop) split = choose_split(rows, totals, total);
        if (!split.found) {
            auto& leaf = tree.nodes[static_cast<std::size_t>(index)];
            leaf.distribution = totals;
            for (auto& v : leaf.distribution) v /= total;
            return index;
        }

        importance[split.feature] += total * impurity - split.child_impurity;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) (x.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const auto l = grow(std::move(left_rows), depth + 1);
        const auto r = grow(std::move(right_rows), depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(index)];
        node.feature = static_cast<std::int32_t>(split.feature);
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return index;
    }
};

} // namespace detail

/// Exhaustive best split of one node, for checking the tree builder: every
/// (feature, midpoint) pair is scored from scratch.
inline SplitChoice exhaustive_best_split(const FeatureMatrix& x, std::span<const std::size_t> y,
                                         std::span<const double> weight, std::size_t n_classes, Criterion criterion,
                                         std::size_t min_samples_leaf = 1) {
    SplitChoice best;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < x.rows(); ++r)
        if (weight[r] > 0) rows.push_back(r);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> values;
        for (auto r : rows) values.push_back(x.at(r, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double t = values[i] + (values[i + 1] - values[i]) / 2.0;
            std::vector<double> l(n_classes, 0.0), r(n_classes, 0.0);
            double lw = 0, rw = 0;
            std::size_t nl = 0, nr = 0;
            for (auto row : rows) {
                if (x.at(row, f) <= t) {
                    l[y[row]] += weight[row];
                    lw += weight[row];
                    ++nl;
                } else {
                    r[y[row]] += weight[row];
                    rw += weight[row];
                    ++nr;
                }
            }
            if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
            const double imp = lw * node_impurity(l, lw, criterion) + rw * node_impurity(r, rw, criterion);
            if (detail::better_split(imp, f, t, best)) best = {f, t, imp, true};
        }
    }
    return best;
}

class RandomForest {
public:
    static RandomForest fit(const FeatureMatrix& x, std::span<const std::string> labels, const Hyperparams& hp,
                            std::uint64_t seed) {
        if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorKind::DegenerateInput, "empty feature matrix");
        if (x.rows() != labels.size())
            throw Error(ErrorKind::LengthMismatch, "feature matrix has " + std::to_string(x.rows()) + " rows but " +
                                                       std::to_string(labels.size()) + " labels");
        if (hp.n_estimators == 0) throw Error(ErrorKind::Usage, "n_estimators must be positive");

        RandomForest f;
        f.hp_ = hp;
        f.seed_ = seed;
        f.n_features_ = x.cols();
        std::map<std::string, std::size_t> counts;
        for (const auto& l : labels) ++counts[l];
        if (counts.size() < 2) throw Error(ErrorKind::DegenerateInput, "need at least two distinct classes");
        std::vector<std::size_t> class_sizes;
        for (const auto& [label, n] : counts) {
            f.classes_.push_back(label);
            class_sizes.push_back(n);
        }
        f.class_weights_ = balanced_class_weights(class_sizes);

        std::vector<std::size_t> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            y[i] = static_cast<std::size_t>(std::lower_bound(f.classes_.begin(), f.classes_.end(), labels[i]) -
                                            f.classes_.begin());

        const std::size_t n = x.rows();
        const std::size_t max_features = std::min(resolve_max_features(hp.max_features, x.cols()), x.cols());
        f.trees_.resize(hp.n_estimators);
        std::vector<std::vector<double>> tree_importance(hp.n_estimators);

        parallel_for(hp.n_estimators, [&](std::size_t t) {
            Rng rng(seed, t);
            std::vector<double> weight(n, 0.0);
            for (std::size_t draw = 0; draw < n; ++draw) weight[rng.below(n)] += 1.0;
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < n; ++i) {
                weight[i] *= f.class_weights_[y[i]].value();
                if (weight[i] > 0) rows.push_back(i);
            }
            detail::TreeBuilder b{x, y, weight, f.classes_.size(), hp, max_features, rng, {}, std::vector<double>(x.cols(), 0.0)};
            b.grow(std::move(rows), 0);
            f.trees_[t] = std::move(b.tree);
            tree_importance[t] = std::move(b.importance);
        });

        // Per-tree importances normalised to 1, averaged, renormalised.
        f.importances_.assign(x.cols(), 0.0);
        for (auto& imp : tree_importance) {
            double s = 0.0;
            for (double v : imp) s += v;
            if (s <= 0) continue;
            for (std::size_t j = 0; j < imp.size(); ++j) f.importances_[j] += imp[j] / s;
        }
        double s = 0.0;
        for (double v : f.importances_) s += v;
        if (s > 0)
            for (auto& v : f.importances_) v /= s;
        return f;
    }

    std::vector<double> predict_proba(std::span<const double> row) const {
        if (row.size() != n_features_)
            throw Error(ErrorKind::WidthMismatch, "row has " + std::to_string(row.size()) + " features, model expects " +
                                                      std::to_string(n_features_));
        std::vector<double> p(classes_.size(), 0.0);
        for (const auto& t : trees_) {
            const auto& d = t.leaf_for(row);
            for (std::size_t k = 0; k < p.size(); ++k) p[k] += d[k];
        }
        for (auto& v : p) v /= static_cast<double>(trees_.size());
        return p;
    }

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<ClassWeight>& class_weights() const { return class_weights_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }
    const std::vector<double>& importances() const { return importances_; }
    const Hyperparams& hyperparams() const { return hp_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_features() const { return n_features_; }

    /// Reassembles a forest from serialized parts.
    static RandomForest from_parts(std::vector<std::string> classes, std::vector<ClassWeight> class_weights,
                                   std::vector<DecisionTree> trees, std::vector<double> importances, Hyperparams hp,
                                   std::uint64_t seed, std::size_t n_features) {
        RandomForest f;
        f.classes_ = std::move(classes);
        f.class_weights_ = std::move(class_weights);
        f.trees_ = std::move(trees);
        f.importances_ = std::move(importances);
        f.hp_ = hp;
        f.seed_ = seed;
        f.n_features_ = n_features;
        if (f.class_weights_.size() != f.classes_.size() || f.importances_.size() != n_features || f.trees_.empty())
            throw Error(ErrorKind::Format, "inconsistent forest parts");
        for (const auto& t : f.trees_)
            for (const auto& node : t.nodes) {
                const bool bad_split = !node.is_leaf() && (static_cast<std::size_t>(node.feature) >= n_features ||
                                                            node.left < 0 || node.right < 0 ||
                                                            static_cast<std::size_t>(node.left) >= t.nodes.size() ||
                                                            static_cast<std::size_t>(node.right) >= t.nodes.size());
                const bool bad_leaf = node.is_leaf() && node.distribution.size() != f.classes_.size();
                if (bad_split || bad_leaf) throw Error(ErrorKind::Format, "malformed tree node");
            }
        return f;
    }

    friend bool operator==(const RandomForest&, const RandomForest&) = default;

private:
    std::vector<std::string> classes_;
    std::vector<ClassWeight> class_weights_;
    std::vector<DecisionTree> trees_;
    std::vector<double> importances_;
    Hyperparams hp_;
    std::uint64_t seed_ = 0;
    std::size_t n_features_ = 0;
};

struct Prediction {
    std::string label;
    std::vector<double> probabilities;
    double confidence = 0.0;
};

/// Argmax class (first in class order on ties) when its probability reaches
/// the threshold, otherwise the unknown label "-1".
inline Prediction decide(const std::vector<std::string>& classes, std::vector<double> proba, double threshold) {
    Prediction p;
    std::size_t best = 0;
    for (std::size_t k = 1; k < proba.size(); ++k)
        if (proba[k] > proba[best]) best = k;
    p.confidence = proba[best];
    p.label = p.confidence >= threshold ? classes[best] : std::string("-1");
    p.probabilities = std::move(proba);
    return p;
}

/// Importance summed per hash type over its column group, normalised to sum to 1.
inline std::array<double, 3> importance_by_hash_type(std::span<const double> column_importance) {
    std::array<double, 3> agg{};
    for (std::size_t j = 0; j < column_importance.size(); ++j)
        agg[static_cast<std::size_t>(column_hash_type(j))] += column_importance[j];
    const double s = agg[0] + agg[1] + agg[2];
    if (s > 0)
        for (auto& v : agg) v /= s;
    return agg;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_FOREST_HPP
