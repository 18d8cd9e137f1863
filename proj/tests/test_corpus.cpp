#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "fuzzyclass/corpus.hpp"
#include "helpers.hpp"

using namespace fuzzyclass;
using testutil::TempDir;
using testutil::tiny_elf;
using testutil::write_bytes;

namespace {

const std::filesystem::path fixtures = std::filesystem::path(FUZZYCLASS_TEST_DATA) / "elf";

std::map<std::string, std::string> reasons_by_path(const IngestResult& r, const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& s : r.skipped)
        out[std::filesystem::path(s.path).lexically_relative(root).generic_string()] = std::string(to_string(s.reason));
    return out;
}

void build_tree(const std::filesystem::path& root) {
    for (const std::string v : {"1.0", "1.1", "1.2"})
        for (const std::string t : {"velveth", "velvetg"}) write_bytes(root / "Velvet" / v / t, tiny_elf(t, v), true);
    for (const std::string v : {"2019", "2020"}) write_bytes(root / "Small" / v / "only", tiny_elf("only", v), true);
    for (const std::string v : {"a", "b", "c"}) write_bytes(root / "Partial" / v / "tool_a", tiny_elf("tool_a", v), true);
    for (const std::string v : {"a", "b"}) write_bytes(root / "Partial" / v / "tool_b", tiny_elf("tool_b", v), true);

    write_bytes(root / "Velvet" / "1.0" / "README", {'h', 'i', '\n'}, false);
    write_bytes(root / "Velvet" / "1.1" / "stripped_tool", tiny_elf("s", "1.1", false), true);
    // A shared object with no entry point and no exec bit.
    write_bytes(root / "Velvet" / "1.2" / "libplugin.so", read_file(fixtures / "lib64.so"), false);
    std::filesystem::create_symlink(root / "Velvet" / "1.2" / "velveth", root / "Velvet" / "1.2" / "zz_alias");
}

} // namespace

TEST(Ingest, AppliesCollectionRules) {
    TempDir dir("ingest");
    build_tree(dir.path());
    const auto r = ingest(dir.path());

    std::vector<std::string> ids;
    for (const auto& rec : r.corpus.records) ids.push_back(rec.id());
    EXPECT_EQ(ids, (std::vector<std::string>{"Partial/a/tool_a", "Partial/b/tool_a", "Partial/c/tool_a",
                                             "Velvet/1.0/velvetg", "Velvet/1.0/velveth", "Velvet/1.1/velvetg",
                                             "Velvet/1.1/velveth", "Velvet/1.2/velvetg", "Velvet/1.2/velveth"}));

    const std::map<std::string, std::string> expected{
        {"Partial/a/tool_b", "not-in-all-versions"}, {"Partial/b/tool_b", "not-in-all-versions"},
        {"Small/2019/only", "class-too-small"},      {"Small/2020/only", "class-too-small"},
        {"Velvet/1.0/README", "not-elf"},            {"Velvet/1.1/stripped_tool", "stripped"},
        {"Velvet/1.2/libplugin.so", "not-executable"}, {"Velvet/1.2/zz_alias", "duplicate"}};
    EXPECT_EQ(reasons_by_path(r, dir.path()), expected);

    EXPECT_EQ(r.files_seen, r.corpus.records.size() + r.skipped.size());
    EXPECT_EQ(r.version_counts.at("Velvet"), 3u);
    EXPECT_EQ(r.version_counts.at("Small"), 2u);
    EXPECT_EQ(class_counts(r.corpus.records), (std::map<std::string, std::size_t>{{"Partial", 3}, {"Velvet", 6}}));
    EXPECT_EQ(r.corpus.classes(), (std::vector<std::string>{"Partial", "Velvet"}));
}

TEST(Ingest, FeaturesComeFromContent) {
    TempDir dir("ingest_feat");
    build_tree(dir.path());
    const auto r = ingest(dir.path());
    for (const auto& rec : r.corpus.records) {
        EXPECT_FALSE(rec.class_label.empty());
        EXPECT_EQ(rec.features, featurize(read_file(rec.source_path)));
    }
}

TEST(Ingest, Idempotent) {
    TempDir dir("ingest_twice");
    build_tree(dir.path());
    const auto a = ingest(dir.path());
    const auto b = ingest(dir.path());
    EXPECT_EQ(a.corpus.records, b.corpus.records);
    EXPECT_EQ(render_skip_report(a.skipped), render_skip_report(b.skipped));
}

TEST(Ingest, Errors) {
    EXPECT_THROW(ingest("/nonexistent/fuzzyclass/root"), Error);
    TempDir dir("ingest_empty");
    write_bytes(dir / "Only/v1/x", tiny_elf("x", "1"), true);
    write_bytes(dir / "Only/v2/x", tiny_elf("x", "2"), true);
    try {
        ingest(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
    }
}

TEST(Ingest, SyntheticTreeWithZeroMutation) {
    TempDir dir("ingest_synth");
    SyntheticSpec spec;
    spec.n_classes = 2;
    spec.versions_per_class = 3;
    spec.min_samples_per_version = 1;
    spec.max_samples_per_version = 1;
    spec.mutation_rate = 0.0;
    spec.string_churn = 0.0;
    spec.symbol_churn = 0.0;
    spec.related_fraction = 0.0;
    spec.seed = 17;
    EXPECT_EQ(generate_synthetic_corpus(spec, dir.path()), 6u);
    const auto r = ingest(dir.path());
    ASSERT_EQ(r.corpus.records.size(), 6u);
    EXPECT_TRUE(r.skipped.empty());
    for (const auto& a : r.corpus.records)
        for (const auto& b : r.corpus.records)
            if (a.class_label == b.class_label) {
                EXPECT_EQ(testutil::slurp(a.source_path), testutil::slurp(b.source_path));
            }
}

TEST(Synthetic, Deterministic) {
    TempDir a("synth_a"), b("synth_b");
    SyntheticSpec spec;
    spec.n_classes = 3;
    spec.versions_per_class = 2;
    spec.seed = 99;
    generate_synthetic_corpus(spec, a.path());
    generate_synthetic_corpus(spec, b.path());
    std::vector<std::string> files_a, files_b;
    for (const auto& e : std::filesystem::recursive_directory_iterator(a.path()))
        if (e.is_regular_file()) files_a.push_back(std::filesystem::relative(e.path(), a.path()).string());
    for (const auto& e : std::filesystem::recursive_directory_iterator(b.path()))
        if (e.is_regular_file()) files_b.push_back(std::filesystem::relative(e.path(), b.path()).string());
    std::sort(files_a.begin(), files_a.end());
    std::sort(files_b.begin(), files_b.end());
    ASSERT_EQ(files_a, files_b);
    ASSERT_FALSE(files_a.empty());
    for (const auto& f : files_a) EXPECT_EQ(testutil::slurp(a / f), testutil::slurp(b / f)) << f;
}

TEST(Synthetic, WithinClassCloserThanAcross) {
    TempDir dir("synth_sim");
    SyntheticSpec spec;
    spec.n_classes = 2;
    spec.versions_per_class = 3;
    spec.min_samples_per_version = 1;
    spec.max_samples_per_version = 1;
    spec.mutation_rate = 0.05;
    spec.related_fraction = 0.0;
    spec.seed = 4;
    generate_synthetic_corpus(spec, dir.path());
    const auto r = ingest(dir.path());
    double within = 0, across = 0;
    int nw = 0, na = 0;
    for (std::size_t i = 0; i < r.corpus.records.size(); ++i)
        for (std::size_t j = i + 1; j < r.corpus.records.size(); ++j) {
            const auto& a = r.corpus.records[i];
            const auto& b = r.corpus.records[j];
            const int s = compare(a.features.file_hash, b.features.file_hash);
            if (a.class_label == b.class_label) {
                within += s;
                ++nw;
            } else {
                across += s;
                ++na;
            }
        }
    ASSERT_GT(nw, 0);
    ASSERT_GT(na, 0);
    EXPECT_GT(within / nw, across / na);
}

TEST(Synthetic, RejectsBadSpec) {
    TempDir dir("synth_bad");
    SyntheticSpec spec;
    spec.n_classes = 0;
    EXPECT_THROW(generate_synthetic_corpus(spec, dir.path()), Error);
    spec.n_classes = 1;
    spec.mutation_rate = 1.5;
    EXPECT_THROW(generate_synthetic_corpus(spec, dir.path()), Error);
}

TEST(CorpusFile, RoundTrip) {
    TempDir dir("corpus_rt");
    build_tree(dir / "tree");
    const auto c = ingest(dir / "tree").corpus;
    save_corpus(c, dir / "c.jsonl");
    EXPECT_EQ(load_corpus(dir / "c.jsonl"), c);

    Corpus empty;
    std::stringstream ss;
    write_corpus(ss, empty);
    EXPECT_EQ(read_corpus(ss), empty);
}

TEST(CorpusFile, FormatErrors) {
    TempDir dir("corpus_bad");
    build_tree(dir / "tree");
    const auto c = ingest(dir / "tree").corpus;
    std::stringstream ss;
    write_corpus(ss, c);
    const std::string text = ss.str();

    auto expect_format = [](const std::string& body, const std::string& needle) {
        std::istringstream in(body);
        try {
            read_corpus(in);
            ADD_FAILURE() << "accepted corrupt corpus";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Format);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_format(text.substr(0, text.size() / 2), "");
    const auto last_record_end = text.rfind('\n', text.size() - 2);
    expect_format(text.substr(0, last_record_end + 1), "truncated");
    expect_format("fuzzyclass-corpus v999\n" + text.substr(text.find('\n') + 1), "fuzzyclass-corpus v999");
    expect_format("", "empty");
    auto bad_digest = text;
    bad_digest.replace(bad_digest.find("\"file\":\"") + 8, 1, "7");
    expect_format(bad_digest, "");
    EXPECT_THROW(load_corpus(dir / "missing.jsonl"), Error);
}
