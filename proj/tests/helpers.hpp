#ifndef FUZZYCLASS_TESTS_HELPERS_HPP
#define FUZZYCLASS_TESTS_HELPERS_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/synthetic.hpp"

namespace testutil {

/// Directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("fuzzyclass_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& bytes, bool executable) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    using std::filesystem::perms;
    const auto x = perms::owner_exec | perms::group_exec | perms::others_exec;
    std::filesystem::permissions(p, x, executable ? std::filesystem::perm_options::add : std::filesystem::perm_options::remove);
}

/// A small executable whose content depends on `name` and `version`.
inline std::vector<unsigned char> tiny_elf(const std::string& name, const std::string& version, bool symtab = true) {
    fuzzyclass::ElfImage img;
    img.with_symtab = symtab;
    std::vector<unsigned char> body;
    for (char c : name + version) body.push_back(static_cast<unsigned char>(c));
    body.push_back(0xc3);
    img.functions = {{"main", body, true}, {name + "_run", {0x90, 0xc3}, true}};
    img.strings = {"tool " + name + " " + version, "shared message text"};
    return fuzzyclass::write_elf(img);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Generates and ingests a synthetic tree; the files are removed afterwards.
inline fuzzyclass::Corpus synthetic_corpus(const fuzzyclass::SyntheticSpec& spec) {
    TempDir dir("synthetic");
    fuzzyclass::generate_synthetic_corpus(spec, dir.path());
    auto corpus = fuzzyclass::ingest(dir.path()).corpus;
    corpus.provenance = {"synthetic seed " + std::to_string(spec.seed), ""};
    return corpus;
}

/// Twelve unrelated classes, three versions, one or two tools each.
inline const fuzzyclass::Corpus& small_corpus() {
    static const fuzzyclass::Corpus c = [] {
        fuzzyclass::SyntheticSpec spec;
        spec.n_classes = 12;
        spec.versions_per_class = 3;
        spec.min_samples_per_version = 1;
        spec.max_samples_per_version = 2;
        spec.related_fraction = 0.0;
        spec.seed = 5;
        return synthetic_corpus(spec);
    }();
    return c;
}

} // namespace testutil

#endif // FUZZYCLASS_TESTS_HELPERS_HPP
