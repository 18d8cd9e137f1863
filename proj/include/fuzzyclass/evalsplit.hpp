#ifndef FUZZYCLASS_EVALSPLIT_HPP
#define FUZZYCLASS_EVALSPLIT_HPP

// Two-phase train/test protocol and classification metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/error.hpp"
#include "fuzzyclass/rng.hpp"

namespace fuzzyclass {

/// Label produced for, and expected of, samples from classes the model never saw.
inline const std::string unknown_label = "-1";

inline constexpr std::string_view split_format_tag = "fuzzyclass-split v1";

struct SplitPlan {
    std::vector<std::string> known_classes;
    std::vector<std::string> unknown_classes;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    double class_frac = 0.2;
    double sample_frac = 0.4;
    std::uint64_t seed = 0;

    friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

/// ceil(frac * n), tolerant of representation error in frac (0.4 * 5 is 2, not 3).
inline std::size_t ceil_fraction(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
}

/// Phase one moves ceil(class_frac * K) randomly chosen classes entirely to the
/// test side as unknowns; phase two sends ceil(sample_frac * n_c) samples of
/// each remaining class to test.
inline SplitPlan two_phase_split(const Corpus& corpus, double class_frac, double sample_frac, std::uint64_t seed) {
    if (class_frac < 0 || class_frac >= 1 || sample_frac < 0 || sample_frac >= 1)
        throw Error(ErrorKind::Usage, "split fractions must lie in [0, 1)");

    std::map<std::string, std::vector<std::string>> by_class;
    for (const auto& r : corpus.records) by_class[r.class_label].push_back(r.id());
    if (by_class.size() < 2) throw Error(ErrorKind::TooFewClasses, "need at least 2 classes to split");

    SplitPlan plan;
    plan.class_frac = class_frac;
    plan.sample_frac = sample_frac;
    plan.seed = seed;

    std::vector<std::string> classes;
    for (const auto& [c, _] : by_class) classes.push_back(c);
    Rng class_rng(seed, 1);
    class_rng.shuffle(classes);
    const std::size_t n_unknown = ceil_fraction(class_frac, classes.size());
    if (n_unknown >= classes.size()) throw Error(ErrorKind::TooFewClasses, "no known classes left after holdout");
    plan.unknown_classes.assign(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(n_unknown));
    plan.known_classes.assign(classes.begin() + static_cast<std::ptrdiff_t>(n_unknown), classes.end());
    std::sort(plan.unknown_classes.begin(), plan.unknown_classes.end());
    std::sort(plan.known_classes.begin(), plan.known_classes.end());

    for (const auto& c : plan.unknown_classes)
        for (const auto& id : by_class[c]) plan.test_ids.push_back(id);

    std::size_t class_index = 0;
    for (auto& [c, ids] : by_class) {
        ++class_index;
        if (std::binary_search(plan.unknown_classes.begin(), plan.unknown_classes.end(), c)) continue;
        std::sort(ids.begin(), ids.end());
        Rng rng(seed, 1000 + class_index);
        rng.shuffle(ids);
        const std::size_t n_test = ceil_fraction(sample_frac, ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) (i < n_test ? plan.test_ids : plan.train_ids).push_back(ids[i]);
    }
    std::sort(plan.train_ids.begin(), plan.train_ids.end());
    std::sort(plan.test_ids.begin(), plan.test_ids.end());
    return plan;
}

/// Training and test records of a plan, with unknown-class test labels already
/// replaced by "-1" in `test_truth`.
struct SplitData {
    std::vector<SampleRecord> train;
    std::vector<SampleRecord> test;
    std::vector<std::string> test_truth;
};

inline SplitData apply_split(const Corpus& corpus, const SplitPlan& plan) {
    std::map<std::string, const SampleRecord*> by_id;
    for (const auto& r : corpus.records) by_id[r.id()] = &r;
    auto lookup = [&](const std::string& id) -> const SampleRecord& {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorKind::Inconsistent, "split references sample missing from corpus: " + id);
        return *it->second;
    };
    const std::set<std::string> unknown(plan.unknown_classes.begin(), plan.unknown_classes.end());
    SplitData d;
    for (const auto& id : plan.train_ids) d.train.push_back(lookup(id));
    for (const auto& id : plan.test_ids) {
        const auto& r = lookup(id);
        d.test.push_back(r);
        d.test_truth.push_back(unknown.count(r.class_label) ? unknown_label : r.class_label);
    }
    return d;
}

inline nlohmann::json to_json(const SplitPlan& p) {
    return {{"format", split_format_tag}, {"seed", p.seed},
            {"class_frac", p.class_frac}, {"sample_frac", p.sample_frac},
            {"known_classes", p.known_classes}, {"unknown_classes", p.unknown_classes},
            {"train", p.train_ids}, {"test", p.test_ids}};
}

inline SplitPlan split_from_json(const nlohmann::json& j) {
    try {
        const auto tag = j.at("format").get<std::string>();
        if (tag != split_format_tag) throw Error(ErrorKind::Format, "unsupported split format tag '" + tag + "'");
        SplitPlan p;
        p.seed = j.at("seed").get<std::uint64_t>();
        p.class_frac = j.at("class_frac").get<double>();
        p.sample_frac = j.at("sample_frac").get<double>();
        p.known_classes = j.at("known_classes").get<std::vector<std::string>>();
        p.unknown_classes = j.at("unknown_classes").get<std::vector<std::string>>();
        p.train_ids = j.at("train").get<std::vector<std::string>>();
        p.test_ids = j.at("test").get<std::vector<std::string>>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("split plan: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Metrics

struct PRF {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

inline double safe_ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

/// Precision, recall and their harmonic mean; any ratio with a zero denominator is 0.
inline PRF precision_recall_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    PRF m;
    m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

struct ClassRow {
    std::string label;
    PRF metrics;
    std::size_t support = 0;
};

struct EvaluationReport {
    std::vector<ClassRow> rows; // sorted by label; "-1" sorts first
    PRF micro, macro, weighted;
    std::size_t total_support = 0;
    std::vector<std::string> warnings;

    const ClassRow* find(const std::string& label) const {
        for (const auto& r : rows)
            if (r.label == label) return &r;
        return nullptr;
    }
};

inline EvaluationReport classification_report(std::span<const std::string> truth, std::span<const std::string> predicted) {
    if (truth.size() != predicted.size())
        throw Error(ErrorKind::LengthMismatch, "truth has " + std::to_string(truth.size()) + " labels, predictions " +
                                                   std::to_string(predicted.size()));
    struct Counts {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    };
    std::map<std::string, Counts> counts;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto& t = counts[truth[i]];
        ++t.support;
        if (truth[i] == predicted[i]) {
            ++t.tp;
        } else {
            ++t.fn;
            ++counts[predicted[i]].fp;
        }
    }

    EvaluationReport rep;
    std::size_t TP = 0, FP = 0, FN = 0;
    for (const auto& [label, c] : counts) {
        rep.rows.push_back({label, precision_recall_f1(c.tp, c.fp, c.fn), c.support});
        TP += c.tp;
        FP += c.fp;
        FN += c.fn;
        rep.total_support += c.support;
        if (c.tp + c.fp == 0) rep.warnings.push_back("precision of '" + label + "' set to 0 (no predicted samples)");
        if (c.support == 0) rep.warnings.push_back("recall of '" + label + "' set to 0 (no true samples)");
    }
    rep.micro = precision_recall_f1(TP, FP, FN);

    if (!rep.rows.empty()) {
        const double k = static_cast<double>(rep.rows.size());
        const double n = static_cast<double>(rep.total_support);
        for (const auto& r : rep.rows) {
            rep.macro.precision += r.metrics.precision / k;
            rep.macro.recall += r.metrics.recall / k;
            rep.macro.f1 += r.metrics.f1 / k;
            if (n > 0) {
                const double w = static_cast<double>(r.support) / n;
                rep.weighted.precision += w * r.metrics.precision;
                rep.weighted.recall += w * r.metrics.recall;
                rep.weighted.f1 += w * r.metrics.f1;
            }
        }
    }
    return rep;
}

inline std::string format_fixed(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Aligned text table: Class, Precision, Recall, f1-Score, Support, then the
/// micro/macro/weighted rows.
inline std::string render_report_text(const EvaluationReport& rep) {
    std::size_t width = std::string("weighted avg").size();
    for (const auto& r : rep.rows) width = std::max(width, r.label.size());
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        if (s.size() >= w) return s;
        return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
    };
    auto line = [&](const std::string& label, const PRF& m, std::size_t support) {
        return pad(label, width, true) + "  " + pad(format_fixed(m.precision), 9, false) + "  " +
               pad(format_fixed(m.recall), 6, false) + "  " + pad(format_fixed(m.f1), 8, false) + "  " +
               pad(std::to_string(support), 7, false) + "\n";
    };
    std::string out = pad("Class", width, true) + "  " + pad("Precision", 9, false) + "  " + pad("Recall", 6, false) +
                      "  " + pad("f1-Score", 8, false) + "  " + pad("Support", 7, false) + "\n";
    for (const auto& r : rep.rows) out += line(r.label, r.metrics, r.support);
    out += "\n";
    out += line("micro avg", rep.micro, rep.total_support);
    out += line("macro avg", rep.macro, rep.total_support);
    out += line("weighted avg", rep.weighted, rep.total_support);
    for (const auto& w : rep.warnings) out += "warning: " + w + "\n";
    return out;
}

/// One JSON object per line: per-class rows, then the three averages.
inline std::string render_report_records(const EvaluationReport& rep) {
    std::string out;
    auto obj = [](const PRF& m) {
        return nlohmann::json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    };
    for (const auto& r : rep.rows) {
        auto j = obj(r.metrics);
        j["class"] = r.label;
        j["support"] = r.support;
        out += j.dump() + "\n";
    }
    for (auto [name, m] : {std::pair{"micro", &rep.micro}, {"macro", &rep.macro}, {"weighted", &rep.weighted}}) {
        auto j = obj(*m);
        j["average"] = name;
        j["support"] = rep.total_support;
        out += j.dump() + "\n";
    }
    for (const auto& w : rep.warnings) out += nlohmann::json{{"warning", w}}.dump() + "\n";
    return out;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_EVALSPLIT_HPP
