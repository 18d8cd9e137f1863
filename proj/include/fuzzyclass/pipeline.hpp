#ifndef FUZZYCLASS_PIPELINE_HPP
#define FUZZYCLASS_PIPELINE_HPP

// Split, tune, fit and evaluate in one place, shared by the CLI and the tests.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzyclass/classifier.hpp"
#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/evalsplit.hpp"

namespace fuzzyclass {

struct TrainOptions {
    double class_frac = 0.2;
    double sample_frac = 0.4;
    Grid grid;
    std::uint64_t seed = 0;
    std::optional<double> threshold; // overrides the tuned threshold
    std::size_t tuning_repeats = 1;
};

struct TrainingRun {
    SplitPlan plan;
    GridSearchResult search;
    TrainedClassifier model;
};

inline TrainingRun train_pipeline(const Corpus& corpus, const TrainOptions& opt) {
    if (corpus.records.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no samples");
    TrainingRun run;
    run.plan = two_phase_split(corpus, opt.class_frac, opt.sample_frac, opt.seed);
    const auto data = apply_split(corpus, run.plan);

    auto anchors = AnchorSet::from_records(data.train);
    std::vector<SampleRecord> rows;
    std::vector<std::string> y;
    for (const auto& a : anchors.anchors) {
        rows.push_back({a.class_label, a.version, a.sample_name, "", a.features});
        y.push_back(a.class_label);
    }
    const auto x = build_matrix(rows, anchors);
    run.search = grid_search(x, y, opt.grid, opt.seed, opt.tuning_repeats);
    const double threshold = opt.threshold.value_or(run.search.best_threshold);
    run.model = TrainedClassifier(RandomForest::fit(x, y, run.search.best_hp, opt.seed), std::move(anchors), threshold);
    return run;
}

struct Evaluation {
    std::vector<std::string> ids;
    std::vector<std::string> truth;
    std::vector<Prediction> predictions;
    EvaluationReport report;
};

/// Evaluates a model on the test side of its split plan. The model's anchors
/// must be exactly the plan's training samples.
inline Evaluation evaluate_model(const TrainedClassifier& model, const Corpus& corpus, const SplitPlan& plan,
                                 std::optional<double> threshold = std::nullopt) {
    std::vector<std::string> anchor_ids;
    for (const auto& a : model.anchors().anchors) anchor_ids.push_back(a.id());
    std::sort(anchor_ids.begin(), anchor_ids.end());
    auto train_ids = plan.train_ids;
    std::sort(train_ids.begin(), train_ids.end());
    if (anchor_ids != train_ids)
        throw Error(ErrorKind::Inconsistent, "model anchors do not match the split plan's training samples");
    if (model.classes() != plan.known_classes)
        throw Error(ErrorKind::Inconsistent, "model classes do not match the split plan's known classes");

    const auto data = apply_split(corpus, plan);
    const double t = threshold.value_or(model.threshold());
    Evaluation ev;
    ev.truth = data.test_truth;
    ev.predictions.resize(data.test.size());
    parallel_for(data.test.size(), [&](std::size_t i) { ev.predictions[i] = model.classify(data.test[i].features, t); });
    std::vector<std::string> predicted;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        ev.ids.push_back(data.test[i].id());
        predicted.push_back(ev.predictions[i].label);
    }
    ev.report = classification_report(ev.truth, predicted);
    return ev;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_PIPELINE_HPP
