#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "fuzzyclass/pipeline.hpp"
#include "helpers.hpp"

using namespace fuzzyclass;

namespace {

Grid quick_grid() {
    Grid g;
    g.n_estimators = {20};
    g.criterion = {Criterion::gini, Criterion::entropy};
    g.max_depth = {std::nullopt};
    g.min_samples_split = {2};
    g.min_samples_leaf = {1};
    return g;
}

TrainOptions quick_options(std::uint64_t seed) {
    TrainOptions opt;
    opt.grid = quick_grid();
    opt.seed = seed;
    return opt;
}

std::string model_text(const TrainedClassifier& m) {
    std::ostringstream out;
    write_model(out, m);
    return out.str();
}

} // namespace

TEST(Pipeline, AnchorsAreTrainingSamples) {
    const auto& corpus = testutil::small_corpus();
    const auto run = train_pipeline(corpus, quick_options(3));
    std::vector<std::string> anchor_ids;
    for (const auto& a : run.model.anchors().anchors) anchor_ids.push_back(a.id());
    EXPECT_EQ(anchor_ids, run.plan.train_ids);
    EXPECT_EQ(run.model.classes(), run.plan.known_classes);
    EXPECT_EQ(run.model.threshold(), run.search.best_threshold);
    EXPECT_EQ(run.model.forest().hyperparams(), run.search.best_hp);
    for (const auto& w : run.model.forest().class_weights()) EXPECT_GT(w.value(), 0.0);
}

TEST(Pipeline, Deterministic) {
    const auto& corpus = testutil::small_corpus();
    const auto a = train_pipeline(corpus, quick_options(8));
    const auto b = train_pipeline(corpus, quick_options(8));
    EXPECT_EQ(model_text(a.model), model_text(b.model));
    EXPECT_EQ(render_grid_csv(a.search), render_grid_csv(b.search));
    const auto ea = evaluate_model(a.model, corpus, a.plan);
    const auto eb = evaluate_model(b.model, corpus, b.plan);
    EXPECT_EQ(render_report_text(ea.report), render_report_text(eb.report));
}

TEST(Pipeline, EvaluationCoversTestSet) {
    const auto& corpus = testutil::small_corpus();
    const auto run = train_pipeline(corpus, quick_options(4));
    const auto ev = evaluate_model(run.model, corpus, run.plan);
    std::size_t support = 0;
    for (const auto& r : ev.report.rows) support += r.support;
    EXPECT_EQ(support, run.plan.test_ids.size());
    EXPECT_EQ(ev.ids, run.plan.test_ids);
    EXPECT_DOUBLE_EQ(ev.report.micro.precision, ev.report.micro.recall);
    EXPECT_NEAR(ev.report.micro.f1, ev.report.micro.precision, 1e-12);
    const auto* unknown = ev.report.find("-1");
    ASSERT_NE(unknown, nullptr);
    std::size_t unknown_samples = 0;
    for (const auto& id : run.plan.test_ids)
        if (std::binary_search(run.plan.unknown_classes.begin(), run.plan.unknown_classes.end(), id.substr(0, id.find('/'))))
            ++unknown_samples;
    EXPECT_EQ(unknown->support, unknown_samples);
}

TEST(Pipeline, PerfectSeparation) {
    // One tool per class, so every test sample has an earlier or later
    // version of itself on the training side.
    SyntheticSpec spec;
    spec.n_classes = 8;
    spec.versions_per_class = 4;
    spec.min_samples_per_version = 1;
    spec.max_samples_per_version = 1;
    spec.mutation_rate = 0.01;
    spec.related_fraction = 0.0;
    spec.volatility_spread = 1.0;
    spec.seed = 11;
    const auto corpus = testutil::synthetic_corpus(spec);
    auto opt = quick_options(2);
    opt.class_frac = 0.0;
    opt.threshold = 0.0;
    const auto run = train_pipeline(corpus, opt);
    EXPECT_TRUE(run.plan.unknown_classes.empty());
    const auto ev = evaluate_model(run.model, corpus, run.plan);
    for (const auto& r : ev.report.rows) EXPECT_EQ(r.metrics.f1, 1.0) << r.label;
    EXPECT_EQ(ev.report.macro.f1, 1.0);
    EXPECT_EQ(ev.report.micro.f1, 1.0);
    EXPECT_EQ(ev.report.weighted.f1, 1.0);
}

TEST(Pipeline, ThresholdOverride) {
    const auto& corpus = testutil::small_corpus();
    auto opt = quick_options(6);
    opt.threshold = 0.8;
    const auto run = train_pipeline(corpus, opt);
    EXPECT_EQ(run.model.threshold(), 0.8);
    const auto all_unknown = evaluate_model(run.model, corpus, run.plan, 1.0);
    for (std::size_t i = 0; i < all_unknown.predictions.size(); ++i)
        if (all_unknown.predictions[i].confidence < 1.0) EXPECT_EQ(all_unknown.predictions[i].label, "-1");
    const auto none_rejected = evaluate_model(run.model, corpus, run.plan, 0.0);
    for (const auto& p : none_rejected.predictions) EXPECT_NE(p.label, "-1");
}

TEST(Pipeline, InconsistentArtifacts) {
    const auto& corpus = testutil::small_corpus();
    const auto run = train_pipeline(corpus, quick_options(5));
    const auto other = two_phase_split(corpus, 0.2, 0.4, 999);
    try {
        evaluate_model(run.model, corpus, other);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Inconsistent);
    }
    EXPECT_THROW(train_pipeline(Corpus{}, quick_options(1)), Error);
}

TEST(Pipeline, TooFewClasses) {
    const auto& corpus = testutil::small_corpus();
    Corpus three;
    const auto classes = corpus.classes();
    for (const auto& r : corpus.records)
        if (r.class_label <= classes[2]) three.records.push_back(r);
    try {
        train_pipeline(three, quick_options(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooFewClasses);
    }
}
