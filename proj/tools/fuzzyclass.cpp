// fuzzyclass command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzzyclass.hpp"

namespace fs = std::filesystem;
using namespace fuzzyclass;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_partial = 1;
constexpr int exit_input = 2;

struct Options {
    std::uint64_t seed = 0;
    std::string out;
    std::optional<double> threshold;
    std::size_t min_string_len = 4;
    std::string grid_file;
    std::string format = "text";

    // positional arguments
    std::vector<std::string> inputs;
    std::string model, corpus, split;

    double class_frac = 0.2;
    double sample_frac = 0.4;

    SyntheticSpec synth;
    std::string skipped_out;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Stdout unless --out names a file.
void emit(const Options& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        write_text(o.out, text);
}

bool is_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string first;
    return in && std::getline(in, first) && first == corpus_format_tag;
}

int cmd_hash(const Options& o) {
    const auto data = read_file(o.inputs.at(0));
    const auto f = featurize(data, o.min_string_len);
    std::cout << "file: " << f.file_hash.render() << '\n'
              << "strings: " << f.strings_hash.render() << '\n'
              << "symbols: " << f.symbols_hash.render() << '\n';
    return exit_ok;
}

int cmd_compare(const Options& o) {
    const auto a = FuzzyHash::parse(o.inputs.at(0));
    const auto b = FuzzyHash::parse(o.inputs.at(1));
    std::cout << compare(a, b) << '\n';
    return exit_ok;
}

int cmd_ingest(const Options& o) {
    if (o.out.empty()) throw Error(ErrorKind::Usage, "ingest needs --out <corpus file>");
    auto res = ingest(o.inputs.at(0), o.min_string_len);
    res.corpus.provenance.description = "ingest " + fs::absolute(o.inputs.at(0)).string() +
                                        " min_string_len=" + std::to_string(o.min_string_len);
    save_corpus(res.corpus, o.out);
    const auto report = render_skip_report(res.skipped);
    if (!o.skipped_out.empty())
        write_text(o.skipped_out, report);
    else
        std::cerr << report;
    std::cout << "files: " << res.files_seen << '\n'
              << "samples: " << res.corpus.records.size() << '\n'
              << "classes: " << res.corpus.classes().size() << '\n'
              << "skipped: " << res.skipped.size() << '\n';
    return exit_ok;
}

int cmd_gen_corpus(const Options& o) {
    if (o.out.empty()) throw Error(ErrorKind::Usage, "gen-corpus needs --out <directory>");
    auto spec = o.synth;
    spec.seed = o.seed;
    const auto n = generate_synthetic_corpus(spec, o.out);
    std::cout << "seed: " << o.seed << '\n' << "files: " << n << '\n';
    return exit_ok;
}

int cmd_split(const Options& o) {
    const auto corpus = load_corpus(o.inputs.at(0));
    const auto plan = two_phase_split(corpus, o.class_frac, o.sample_frac, o.seed);
    emit(o, to_json(plan).dump(2) + "\n");
    if (!o.out.empty())
        std::cout << "seed: " << o.seed << '\n'
                  << "train: " << plan.train_ids.size() << '\n'
                  << "test: " << plan.test_ids.size() << '\n'
                  << "unknown classes: " << plan.unknown_classes.size() << '\n';
    return exit_ok;
}

int cmd_train(const Options& o) {
    if (o.out.empty()) throw Error(ErrorKind::Usage, "train needs --out <directory>");
    const auto corpus = load_corpus(o.inputs.at(0));
    TrainOptions t;
    t.seed = o.seed;
    t.class_frac = o.class_frac;
    t.sample_frac = o.sample_frac;
    t.threshold = o.threshold;
    if (!o.grid_file.empty()) {
        try {
            t.grid = grid_from_json(nlohmann::json::parse(read_text(o.grid_file)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Format, std::string("grid file: ") + e.what());
        }
    }
    const auto run = train_pipeline(corpus, t);

    const fs::path dir = o.out;
    fs::create_directories(dir);
    save_model(run.model, dir / "model.json");
    write_text((dir / "split.json").string(), to_json(run.plan).dump(2) + "\n");
    write_text((dir / "curve.csv").string(), render_curve_csv(run.search.best_curve()));
    write_text((dir / "grid.csv").string(), render_grid_csv(run.search));

    const auto& hp = run.search.best_hp;
    const auto fi = run.model.feature_importance();
    std::cout << "seed: " << o.seed << '\n'
              << "train samples: " << run.plan.train_ids.size() << '\n'
              << "classes: " << run.model.classes().size() << '\n'
              << "best: " << to_json(hp).dump() << '\n'
              << "tuned threshold: " << format_fixed(run.search.best_threshold) << '\n'
              << "threshold: " << format_fixed(run.model.threshold()) << '\n'
              << "importance: file " << format_fixed(fi.by_hash_type[0], 4) << " strings "
              << format_fixed(fi.by_hash_type[1], 4) << " symbols " << format_fixed(fi.by_hash_type[2], 4) << '\n';
    return exit_ok;
}

std::string prediction_line(const Options& o, const std::string& path, const Prediction& p) {
    if (o.format == "records")
        return nlohmann::json{{"path", path}, {"label", p.label}, {"confidence", p.confidence}}.dump() + "\n";
    return path + " " + p.label + " " + format_fixed(p.confidence, 4) + "\n";
}

std::string error_line(const Options& o, const std::string& path, const std::string& what) {
    if (o.format == "records") return nlohmann::json{{"path", path}, {"error", what}}.dump() + "\n";
    return path + " error " + what + "\n";
}

int cmd_classify(const Options& o) {
    const auto model = load_model(o.model);
    const double threshold = o.threshold.value_or(model.threshold());
    std::string out = o.format == "records"
                          ? nlohmann::json{{"seed", model.forest().seed()}, {"threshold", threshold}}.dump() + "\n"
                          : "# seed " + std::to_string(model.forest().seed()) + " threshold " + format_fixed(threshold) + "\n";
    std::size_t ok = 0, failed = 0;
    for (const auto& input : o.inputs) {
        if (is_corpus_file(input)) {
            for (const auto& r : load_corpus(input).records) {
                out += prediction_line(o, r.id(), model.classify(r.features, threshold));
                ++ok;
            }
            continue;
        }
        try {
            out += prediction_line(o, input, model.classify(featurize(read_file(input), o.min_string_len), threshold));
            ++ok;
        } catch (const Error& e) {
            out += error_line(o, input, e.what());
            ++failed;
        }
    }
    emit(o, out);
    if (ok == 0 && failed > 0) return exit_input;
    return failed > 0 ? exit_partial : exit_ok;
}

int cmd_evaluate(const Options& o) {
    const auto model = load_model(o.model);
    const auto corpus = load_corpus(o.corpus);
    const auto plan = split_from_json(nlohmann::json::parse(read_text(o.split)));
    const auto ev = evaluate_model(model, corpus, plan, o.threshold);
    const double threshold = o.threshold.value_or(model.threshold());
    std::string out;
    if (o.format == "records") {
        out = nlohmann::json{{"seed", model.forest().seed()}, {"threshold", threshold}}.dump() + "\n";
        out += render_report_records(ev.report);
    } else {
        out = "seed: " + std::to_string(model.forest().seed()) + "\nthreshold: " + format_fixed(threshold) + "\n\n";
        out += render_report_text(ev.report);
    }
    emit(o, out);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify executables by fuzzy-hash similarity"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults");
    Options o;

    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed")->capture_default_str(); };
    auto add_out = [&](CLI::App* c, const std::string& what) { c->add_option("--out", o.out, what); };
    auto add_threshold = [&](CLI::App* c) {
        c->add_option("--threshold", o.threshold, "confidence threshold override")->check(CLI::Range(0.0, 1.0));
    };
    auto add_min_len = [&](CLI::App* c) {
        c->add_option("--min-string-len", o.min_string_len, "minimum printable run length")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "text or records")->check(CLI::IsMember({"text", "records"}));
    };
    auto add_fracs = [&](CLI::App* c) {
        c->add_option("--class-frac", o.class_frac, "fraction of classes held out as unknown")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        c->add_option("--sample-frac", o.sample_frac, "per-class test fraction")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    };

    auto* hash = app.add_subcommand("hash", "print the three digests of an executable");
    hash->add_option("file", o.inputs)->required()->expected(1);
    add_min_len(hash);

    auto* cmp = app.add_subcommand("compare", "similarity score of two digests");
    cmp->add_option("digests", o.inputs)->required()->expected(2);

    auto* ing = app.add_subcommand("ingest", "build a corpus file from <root>/<class>/<version>/<files>");
    ing->add_option("root", o.inputs)->required()->expected(1);
    add_out(ing, "corpus file to write");
    add_min_len(ing);
    ing->add_option("--skipped", o.skipped_out, "write the skip report here instead of stderr");

    auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus directory tree");
    add_out(gen, "directory to create");
    add_seed(gen);
    gen->add_option("--classes", o.synth.n_classes)->capture_default_str();
    gen->add_option("--versions", o.synth.versions_per_class)->capture_default_str();
    gen->add_option("--min-samples", o.synth.min_samples_per_version)->capture_default_str();
    gen->add_option("--max-samples", o.synth.max_samples_per_version)->capture_default_str();
    gen->add_option("--mutation-rate", o.synth.mutation_rate)->capture_default_str();
    gen->add_option("--string-churn", o.synth.string_churn, "negative: derived from the mutation rate")
        ->capture_default_str();
    gen->add_option("--symbol-churn", o.synth.symbol_churn, "negative: derived from the mutation rate")
        ->capture_default_str();
    gen->add_option("--related-fraction", o.synth.related_fraction)->capture_default_str();
    gen->add_option("--volatility-spread", o.synth.volatility_spread)->capture_default_str();

    auto* spl = app.add_subcommand("split", "two-phase train/test split plan");
    spl->add_option("corpus", o.inputs)->required()->expected(1);
    add_out(spl, "split plan file (default stdout)");
    add_seed(spl);
    add_fracs(spl);

    auto* trn = app.add_subcommand("train", "split, tune and fit a model");
    trn->add_option("corpus", o.inputs)->required()->expected(1);
    add_out(trn, "output directory for model.json, split.json, curve.csv, grid.csv");
    add_seed(trn);
    add_threshold(trn);
    add_fracs(trn);
    trn->add_option("--grid", o.grid_file, "JSON grid overrides");

    auto* cls = app.add_subcommand("classify", "label executables or corpus records");
    cls->add_option("model", o.model)->required();
    cls->add_option("inputs", o.inputs)->required();
    add_out(cls, "write labels here (default stdout)");
    add_threshold(cls);
    add_min_len(cls);
    add_format(cls);

    auto* evl = app.add_subcommand("evaluate", "classification report on a split's test side");
    evl->add_option("model", o.model)->required();
    evl->add_option("corpus", o.corpus)->required();
    evl->add_option("split", o.split)->required();
    add_out(evl, "write the report here (default stdout)");
    add_threshold(evl);
    add_format(evl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input;
    }

    try {
        if (*hash) return cmd_hash(o);
        if (*cmp) return cmd_compare(o);
        if (*ing) return cmd_ingest(o);
        if (*gen) return cmd_gen_corpus(o);
        if (*spl) return cmd_split(o);
        if (*trn) return cmd_train(o);
        if (*cls) return cmd_classify(o);
        if (*evl) return cmd_evaluate(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: format-error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
