#ifndef FUZZYCLASS_CORPUS_HPP
#define FUZZYCLASS_CORPUS_HPP

// Labeled sample corpus: ingestion of a class/version/sample directory tree,
// the inclusion rules, and the line-oriented corpus file.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <sys/stat.h>

#include <json.hpp>

#include "fuzzyclass/binfeat.hpp"
#include "fuzzyclass/error.hpp"
#include "fuzzyclass/parallel.hpp"

namespace fuzzyclass {

inline constexpr std::string_view corpus_format_tag = "fuzzyclass-corpus v1";
inline constexpr std::size_t min_samples_per_class = 3;

struct SampleRecord {
    std::string class_label;
    std::string version;
    std::string sample_name;
    std::string source_path;
    FeatureTriple features;

    /// "class/version/sample", unique within a corpus.
    std::string id() const { return class_label + "/" + version + "/" + sample_name; }

    auto key() const { return std::tie(class_label, version, sample_name); }

    friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct Provenance {
    std::string description;
    std::string created;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Corpus {
    std::vector<SampleRecord> records;
    Provenance provenance;

    void sort() {
        std::sort(records.begin(), records.end(),
                  [](const SampleRecord& a, const SampleRecord& b) { return a.key() < b.key(); });
    }

    std::vector<std::string> classes() const {
        std::set<std::string> s;
        for (const auto& r : records) s.insert(r.class_label);
        return {s.begin(), s.end()};
    }

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Samples per class.
inline std::map<std::string, std::size_t> class_counts(const std::vector<SampleRecord>& records) {
    std::map<std::string, std::size_t> out;
    for (const auto& r : records) ++out[r.class_label];
    return out;
}

enum class SkipReason { NotElf, NotExecutable, Stripped, Malformed, Duplicate, NotInAllVersions, ClassTooSmall };

inline std::string_view to_string(SkipReason r) {
    switch (r) {
    case SkipReason::NotElf: return "not-elf";
    case SkipReason::NotExecutable: return "not-executable";
    case SkipReason::Stripped: return "stripped";
    case SkipReason::Malformed: return "malformed";
    case SkipReason::Duplicate: return "duplicate";
    case SkipReason::NotInAllVersions: return "not-in-all-versions";
    case SkipReason::ClassTooSmall: return "class-too-small";
    }
    return "?";
}

struct SkipEntry {
    std::string path;
    SkipReason reason;
};

struct IngestResult {
    Corpus corpus;
    std::vector<SkipEntry> skipped;
    std::map<std::string, std::size_t> version_counts;
    std::size_t files_seen = 0;
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

inline bool has_exec_bit(const std::filesystem::path& p) {
    using std::filesystem::perms;
    const auto pr = std::filesystem::status(p).permissions();
    return (pr & (perms::owner_exec | perms::group_exec | perms::others_exec)) != perms::none;
}

struct Candidate {
    std::string class_label;
    std::string version;
    std::string sample_name;
    std::filesystem::path path;
    std::filesystem::path resolved;
};

inline std::vector<std::filesystem::path> sorted_subdirs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory()) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Walks root/class/version/... and keeps unstripped ELF executables whose
/// relative path exists in every version of their class; classes left with
/// fewer than three samples are dropped. Every file examined is either kept
/// or listed in the skip report.
inline IngestResult ingest(const std::filesystem::path& root, std::size_t min_string_len = 4) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error(ErrorKind::Io, "not a readable directory: " + root.string());

    IngestResult result;
    std::vector<detail::Candidate> candidates;
    std::set<fs::path> seen;

    try {
        for (const auto& class_dir : detail::sorted_subdirs(root)) {
            const auto versions = detail::sorted_subdirs(class_dir);
            result.version_counts[class_dir.filename().string()] = versions.size();
            for (const auto& version_dir : versions) {
                std::vector<fs::path> files;
                for (const auto& e : fs::recursive_directory_iterator(version_dir))
                    if (e.is_regular_file()) files.push_back(e.path());
                std::sort(files.begin(), files.end());
                for (const auto& f : files) {
                    ++result.files_seen;
                    const fs::path resolved = fs::canonical(f);
                    if (!seen.insert(resolved).second) {
                        result.skipped.push_back({f.string(), SkipReason::Duplicate});
                        continue;
                    }
                    candidates.push_back({class_dir.filename().string(), version_dir.filename().string(),
                                          fs::relative(f, version_dir).generic_string(), f, resolved});
                }
            }
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorKind::Io, e.what());
    }

    struct Outcome {
        bool ok = false;
        SkipReason reason = SkipReason::NotElf;
        FeatureTriple features;
    };
    std::vector<Outcome> outcomes(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        auto& out = outcomes[i];
        const auto data = read_file(candidates[i].resolved);
        if (!elf::has_elf_magic(data)) {
            out.reason = SkipReason::NotElf;
            return;
        }
        try {
            const elf::Reader reader(data);
            const bool runnable = (reader.type() == elf::et_exec || reader.type() == elf::et_dyn) && reader.entry() != 0;
            if (!runnable && !detail::has_exec_bit(candidates[i].resolved)) {
                out.reason = SkipReason::NotExecutable;
                return;
            }
            out.features = featurize(data, min_string_len);
            out.ok = true;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Stripped)
                out.reason = SkipReason::Stripped;
            else if (e.kind() == ErrorKind::NotElf)
                out.reason = SkipReason::NotElf;
            else if (e.kind() == ErrorKind::Malformed)
                out.reason = SkipReason::Malformed;
            else
                throw;
        }
    });

    // class -> sample name -> versions in which it is a valid sample
    std::map<std::string, std::map<std::string, std::set<std::string>>> present;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!outcomes[i].ok) {
            result.skipped.push_back({candidates[i].path.string(), outcomes[i].reason});
            continue;
        }
        present[candidates[i].class_label][candidates[i].sample_name].insert(candidates[i].version);
    }

    std::map<std::string, std::vector<SampleRecord>> kept;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!outcomes[i].ok) continue;
        const auto& c = candidates[i];
        if (present[c.class_label][c.sample_name].size() != result.version_counts[c.class_label]) {
            result.skipped.push_back({c.path.string(), SkipReason::NotInAllVersions});
            continue;
        }
        kept[c.class_label].push_back({c.class_label, c.version, c.sample_name, c.path.string(), outcomes[i].features});
    }

    for (auto& [label, records] : kept) {
        if (records.size() < min_samples_per_class) {
            for (const auto& r : records) result.skipped.push_back({r.source_path, SkipReason::ClassTooSmall});
            continue;
        }
        for (auto& r : records) result.corpus.records.push_back(std::move(r));
    }
    if (result.corpus.records.empty()) throw Error(ErrorKind::EmptyCorpus, "no samples survived filtering under " + root.string());

    result.corpus.sort();
    std::sort(result.skipped.begin(), result.skipped.end(),
              [](const SkipEntry& a, const SkipEntry& b) { return a.path < b.path; });
    result.corpus.provenance = {"ingested from " + root.string(), utc_timestamp()};
    return result;
}

inline std::string render_skip_report(const std::vector<SkipEntry>& skipped) {
    std::string out;
    for (const auto& s : skipped) out += s.path + " " + std::string(to_string(s.reason)) + "\n";
    return out;
}

// Corpus file: tag line, a provenance line, one JSON object per record, and a
// trailer carrying the record count so truncation is detectable.

inline nlohmann::json to_json(const SampleRecord& r) {
    return {{"class", r.class_label},
            {"version", r.version},
            {"sample", r.sample_name},
            {"path", r.source_path},
            {"file", r.features.file_hash.render()},
            {"strings", r.features.strings_hash.render()},
            {"symbols", r.features.symbols_hash.render()}};
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
    SampleRecord r;
    r.class_label = j.at("class").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.sample_name = j.at("sample").get<std::string>();
    r.source_path = j.at("path").get<std::string>();
    r.features.file_hash = FuzzyHash::parse(j.at("file").get<std::string>());
    r.features.strings_hash = FuzzyHash::parse(j.at("strings").get<std::string>());
    r.features.symbols_hash = FuzzyHash::parse(j.at("symbols").get<std::string>());
    if (r.class_label.empty()) throw Error(ErrorKind::Format, "empty class label");
    return r;
}

inline void write_corpus(std::ostream& out, const Corpus& c) {
    out << corpus_format_tag << '\n';
    out << nlohmann::json{{"provenance", c.provenance.description}, {"created", c.provenance.created}}.dump() << '\n';
    for (const auto& r : c.records) out << to_json(r).dump() << '\n';
    out << nlohmann::json{{"records", c.records.size()}}.dump() << '\n';
}

inline Corpus read_corpus(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, "empty corpus file");
    if (line != corpus_format_tag) throw Error(ErrorKind::Format, "unsupported corpus format tag '" + line + "'");

    Corpus c;
    bool have_trailer = false;
    std::size_t line_no = 1;
    std::set<std::string> ids;
    try {
        if (!std::getline(in, line)) throw Error(ErrorKind::Format, "missing provenance line");
        ++line_no;
        const auto meta = nlohmann::json::parse(line);
        c.provenance = {meta.at("provenance").get<std::string>(), meta.at("created").get<std::string>()};
        while (std::getline(in, line)) {
            ++line_no;
            if (have_trailer) throw Error(ErrorKind::Format, "data after trailer");
            const auto j = nlohmann::json::parse(line);
            if (j.contains("records")) {
                if (j.at("records").get<std::size_t>() != c.records.size())
                    throw Error(ErrorKind::Format, "record count does not match trailer");
                have_trailer = true;
                continue;
            }
            auto r = record_from_json(j);
            if (!ids.insert(r.id()).second) throw Error(ErrorKind::Format, "duplicate sample " + r.id());
            c.records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Format) throw;
        throw Error(ErrorKind::Format, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_trailer) throw Error(ErrorKind::Format, "truncated corpus file (no trailer)");
    return c;
}

inline void save_corpus(const Corpus& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_corpus(out, c);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

inline Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_corpus(in);
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_CORPUS_HPP
