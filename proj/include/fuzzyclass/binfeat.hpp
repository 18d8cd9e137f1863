#ifndef FUZZYCLASS_BINFEAT_HPP
#define FUZZYCLASS_BINFEAT_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyclass/ctph.hpp"
#include "fuzzyclass/elf.hpp"
#include "fuzzyclass/error.hpp"

namespace fuzzyclass {

enum class HashType : std::size_t { file = 0, strings = 1, symbols = 2 };

inline constexpr std::array<HashType, 3> all_hash_types{HashType::file, HashType::strings, HashType::symbols};

inline std::string_view to_string(HashType t) {
    switch (t) {
    case HashType::file: return "file";
    case HashType::strings: return "strings";
    case HashType::symbols: return "symbols";
    }
    return "?";
}

struct FeatureTriple {
    FuzzyHash file_hash;
    FuzzyHash strings_hash;
    FuzzyHash symbols_hash;

    const FuzzyHash& operator[](HashType t) const {
        switch (t) {
        case HashType::file: return file_hash;
        case HashType::strings: return strings_hash;
        case HashType::symbols: break;
        }
        return symbols_hash;
    }

    friend bool operator==(const FeatureTriple&, const FeatureTriple&) = default;
};

struct BinaryInfo {
    bool is_elf = false;
    bool has_symtab = false;
    std::vector<std::string> global_text_symbols;
    std::vector<std::string> printable_strings;
};

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorKind::Io, "read failed for " + path.string());
    return buf;
}

constexpr bool is_printable(unsigned char c) { return (c >= 0x20 && c <= 0x7e) || c == '\t'; }

/// Maximal runs of printable bytes at least `min_len` long, in file order
/// (the output of `strings -a -n min_len`).
inline std::vector<std::string> extract_strings(std::span<const unsigned char> data, std::size_t min_len = 4) {
    if (min_len == 0) min_len = 1;
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < data.size()) {
        if (!is_printable(data[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < data.size() && is_printable(data[j])) ++j;
        if (j - i >= min_len) out.emplace_back(reinterpret_cast<const char*>(data.data() + i), j - i);
        i = j;
    }
    return out;
}

/// Names of global symbols defined in executable sections ("T" in nm),
/// sorted byte-wise. Weak and indirect-function symbols are not included.
inline std::vector<std::string> extract_symbols(std::span<const unsigned char> data) {
    const elf::Reader reader(data);
    const elf::Section* symtab = reader.find_section(elf::sht_symtab);
    if (symtab == nullptr) throw Error(ErrorKind::Stripped, "no static symbol table (stripped binary)");

    const auto& sections = reader.sections();
    std::vector<std::string> names;
    for (auto& sym : reader.symbols(*symtab)) {
        if (sym.binding != elf::stb_global || sym.type == elf::stt_gnu_ifunc || sym.name.empty()) continue;
        if (sym.section_index == elf::shn_undef || sym.section_index >= elf::shn_loreserve) continue;
        if (sym.section_index >= sections.size()) throw Error(ErrorKind::Malformed, "symbol section index out of range");
        if ((sections[sym.section_index].flags & elf::shf_execinstr) == 0) continue;
        names.push_back(std::move(sym.name));
    }
    std::sort(names.begin(), names.end());
    return names;
}

inline BinaryInfo inspect(std::span<const unsigned char> data, std::size_t min_string_len = 4) {
    BinaryInfo info;
    info.is_elf = elf::has_elf_magic(data);
    info.printable_strings = extract_strings(data, min_string_len);
    if (info.is_elf) {
        try {
            info.global_text_symbols = extract_symbols(data);
            info.has_symtab = true;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Stripped) throw;
        }
    }
    return info;
}

inline std::string join_lines(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back('\n');
        out += items[i];
    }
    return out;
}

/// The three fuzzy hashes of one executable. Looks at content only.
inline FeatureTriple featurize(std::span<const unsigned char> data, std::size_t min_string_len = 4) {
    FeatureTriple t;
    t.symbols_hash = digest(join_lines(extract_symbols(data)));
    t.file_hash = digest(data);
    t.strings_hash = digest(join_lines(extract_strings(data, min_string_len)));
    return t;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_BINFEAT_HPP
