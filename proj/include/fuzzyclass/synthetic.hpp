#ifndef FUZZYCLASS_SYNTHETIC_HPP
#define FUZZYCLASS_SYNTHETIC_HPP

// Synthetic application corpora for desk-scale experiments.
//
// Each class is a small "application": a set of library functions shared by
// all of its executables, per-executable functions, and embedded strings.
// Versions evolve from the previous version by localized byte edits inside
// function bodies plus a bounded amount of string and symbol churn. A fraction
// of classes is derived from an earlier class (forks, reinstalls under another
// name), and each class gets its own volatility so that some applications
// change much faster between versions than others.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyclass/elf.hpp"
#include "fuzzyclass/error.hpp"
#include "fuzzyclass/rng.hpp"

namespace fuzzyclass {

// ---------------------------------------------------------------------------
// ELF writer

struct ElfFunction {
    std::string name;
    std::vector<unsigned char> body;
    bool global = true;
};

struct ElfImage {
    bool is64 = true;
    bool big_endian = false;
    bool with_symtab = true;
    std::vector<ElfFunction> functions;
    std::vector<std::string> strings;
    std::vector<std::string> data_symbols; // global objects in .rodata
};

namespace detail {

class ByteSink {
public:
    explicit ByteSink(bool big_endian) : big_(big_endian) {}

    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) {
            const int shift = big_ ? (width - 1 - i) * 8 : i * 8;
            bytes.push_back(static_cast<unsigned char>(v >> shift));
        }
    }
    void put_bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    void align(std::size_t a) {
        while (bytes.size() % a) bytes.push_back(0);
    }
    std::size_t size() const { return bytes.size(); }

    std::vector<unsigned char> bytes;

private:
    bool big_;
};

class StringTable {
public:
    StringTable() { data_.push_back('\0'); }
    std::uint32_t add(std::string_view s) {
        const auto off = static_cast<std::uint32_t>(data_.size());
        data_.append(s);
        data_.push_back('\0');
        return off;
    }
    const std::string& data() const { return data_; }

private:
    std::string data_;
};

} // namespace detail

/// Serializes an executable with .text, .rodata, optional .symtab/.strtab and
/// .shstrtab, plus a single loadable segment.
inline std::vector<unsigned char> write_elf(const ElfImage& img) {
    const bool w64 = img.is64;
    const int addr = w64 ? 8 : 4;
    const std::size_t ehsize = w64 ? 64 : 52;
    const std::size_t phentsize = w64 ? 56 : 32;
    const std::size_t shentsize = w64 ? 64 : 40;
    const std::size_t symentsize = w64 ? 24 : 16;
    const std::uint64_t base = 0x400000;
    const std::uint16_t machine = w64 ? (img.big_endian ? 43 : 62) : (img.big_endian ? 20 : 3);

    detail::ByteSink out(img.big_endian);
    out.bytes.resize(ehsize + phentsize, 0);

    out.align(16);
    const std::size_t text_off = out.size();
    std::vector<std::uint64_t> fn_addr;
    for (const auto& f : img.functions) {
        out.align(16);
        fn_addr.push_back(base + out.size());
        out.put_bytes(f.body.data(), f.body.size());
    }
    const std::size_t text_size = out.size() - text_off;

    out.align(16);
    const std::size_t rodata_off = out.size();
    for (const auto& s : img.strings) {
        out.put_bytes(s.data(), s.size());
        out.put(0, 1);
    }
    const std::size_t rodata_size = out.size() - rodata_off;
    const std::size_t load_end = out.size();

    detail::StringTable shstr;
    const std::uint32_t n_text = shstr.add(".text");
    const std::uint32_t n_rodata = shstr.add(".rodata");
    std::uint32_t n_symtab = 0, n_strtab = 0;
    if (img.with_symtab) {
        n_symtab = shstr.add(".symtab");
        n_strtab = shstr.add(".strtab");
    }
    const std::uint32_t n_shstrtab = shstr.add(".shstrtab");

    const std::uint16_t text_idx = 1, rodata_idx = 2;
    const std::uint16_t strtab_idx = 4;
    const std::uint16_t shstrtab_idx = img.with_symtab ? 5 : 3;

    std::size_t symtab_off = 0, symtab_size = 0, strtab_off = 0, strtab_size = 0;
    std::uint32_t first_global = 0;
    if (img.with_symtab) {
        detail::StringTable strtab;
        struct Sym {
            std::uint32_t name;
            std::uint8_t info;
            std::uint16_t shndx;
            std::uint64_t value, size;
        };
        std::vector<Sym> locals{{0, 0, 0, 0, 0}}, globals;
        locals.push_back({strtab.add("app.c"), 4 /* STT_FILE */, 0xfff1 /* SHN_ABS */, 0, 0});
        for (std::size_t i = 0; i < img.functions.size(); ++i) {
            const auto& f = img.functions[i];
            const std::uint8_t bind = f.global ? 1 : 0;
            Sym s{strtab.add(f.name), static_cast<std::uint8_t>((bind << 4) | 2 /* STT_FUNC */), text_idx, fn_addr[i],
                  f.body.size()};
            (f.global ? globals : locals).push_back(s);
        }
        for (std::size_t i = 0; i < img.data_symbols.size(); ++i)
            globals.push_back({strtab.add(img.data_symbols[i]), (1 << 4) | 1 /* STT_OBJECT */, rodata_idx,
                               base + rodata_off, 0});
        first_global = static_cast<std::uint32_t>(locals.size());

        out.align(8);
        symtab_off = out.size();
        auto emit = [&](const Sym& s) {
            out.put(s.name, 4);
            if (w64) {
                out.put(s.info, 1);
                out.put(0, 1);
                out.put(s.shndx, 2);
                out.put(s.value, 8);
                out.put(s.size, 8);
            } else {
                out.put(s.value, 4);
                out.put(s.size, 4);
                out.put(s.info, 1);
                out.put(0, 1);
                out.put(s.shndx, 2);
            }
        };
        for (const auto& s : locals) emit(s);
        for (const auto& s : globals) emit(s);
        symtab_size = out.size() - symtab_off;

        strtab_off = out.size();
        out.put_bytes(strtab.data().data(), strtab.data().size());
        strtab_size = strtab.data().size();
    }

    const std::size_t shstrtab_off = out.size();
    out.put_bytes(shstr.data().data(), shstr.data().size());

    out.align(8);
    const std::size_t shoff = out.size();
    const std::uint16_t shnum = img.with_symtab ? 6 : 4;
    auto section = [&](std::uint32_t name, std::uint32_t type, std::uint64_t flags, std::uint64_t vaddr,
                       std::uint64_t off, std::uint64_t size, std::uint32_t link, std::uint32_t info,
                       std::uint64_t align, std::uint64_t entsize) {
        out.put(name, 4);
        out.put(type, 4);
        out.put(flags, addr);
        out.put(vaddr, addr);
        out.put(off, addr);
        out.put(size, addr);
        out.put(link, 4);
        out.put(info, 4);
        out.put(align, addr);
        out.put(entsize, addr);
    };
    section(0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
    section(n_text, 1, 0x6 /* ALLOC|EXECINSTR */, base + text_off, text_off, text_size, 0, 0, 16, 0);
    section(n_rodata, 1, 0x2 /* ALLOC */, base + rodata_off, rodata_off, rodata_size, 0, 0, 1, 0);
    if (img.with_symtab) {
        section(n_symtab, elf::sht_symtab, 0, 0, symtab_off, symtab_size, strtab_idx, first_global, 8, symentsize);
        section(n_strtab, 3, 0, 0, strtab_off, strtab_size, 0, 0, 1, 0);
    }
    section(n_shstrtab, 3, 0, 0, shstrtab_off, shstr.data().size(), 0, 0, 1, 0);

    // Headers last, now that every offset is known.
    detail::ByteSink hdr(img.big_endian);
    const unsigned char ident[16] = {0x7f, 'E', 'L', 'F', static_cast<unsigned char>(w64 ? 2 : 1),
                                     static_cast<unsigned char>(img.big_endian ? 2 : 1), 1};
    hdr.put_bytes(ident, 16);
    hdr.put(elf::et_exec, 2);
    hdr.put(machine, 2);
    hdr.put(1, 4);
    hdr.put(img.functions.empty() ? base + text_off : fn_addr.front(), addr);
    hdr.put(ehsize, addr);
    hdr.put(shoff, addr);
    hdr.put(0, 4);
    hdr.put(ehsize, 2);
    hdr.put(phentsize, 2);
    hdr.put(1, 2);
    hdr.put(shentsize, 2);
    hdr.put(shnum, 2);
    hdr.put(shstrtab_idx, 2);
    hdr.put(1, 4); // PT_LOAD
    if (w64) {
        hdr.put(5, 4); // R+X
        hdr.put(0, 8);
        hdr.put(base, 8);
        hdr.put(base, 8);
        hdr.put(load_end, 8);
        hdr.put(load_end, 8);
        hdr.put(0x1000, 8);
    } else {
        hdr.put(0, 4);
        hdr.put(base, 4);
        hdr.put(base, 4);
        hdr.put(load_end, 4);
        hdr.put(load_end, 4);
        hdr.put(5, 4);
        hdr.put(0x1000, 4);
    }
    std::copy(hdr.bytes.begin(), hdr.bytes.end(), out.bytes.begin());
    return out.bytes;
}

// ---------------------------------------------------------------------------
// Corpus generator

struct SyntheticSpec {
    std::size_t n_classes = 30;
    std::size_t versions_per_class = 4;
    std::size_t min_samples_per_version = 1;
    std::size_t max_samples_per_version = 2;
    /// Fraction of function-body bytes rewritten per version step.
    double mutation_rate = 0.03;
    /// Fraction of strings replaced per version step; negative means 2 * mutation_rate.
    double string_churn = -1.0;
    /// Fraction of functions added/removed/renamed per version step; negative means mutation_rate / 2.
    double symbol_churn = -1.0;
    /// Share of classes forked from an earlier class.
    double related_fraction = 0.25;
    /// Per-class rate multipliers are drawn log-uniformly from [1/spread, spread].
    double volatility_spread = 3.0;
    std::uint64_t seed = 1;
};

namespace synth {

inline constexpr std::string_view syllables[] = {
    "ba", "ce", "di", "fo", "gu", "ka", "le", "mi", "no", "pu", "ra", "se", "ti", "vo", "za",
    "bri", "cla", "dro", "fla", "gre", "kri", "plo", "stra", "tho", "vel", "mar", "quin", "zel", "orb", "ix"};
inline constexpr std::string_view verbs[] = {
    "read", "write", "parse", "init", "free", "alloc", "build", "merge", "sort", "scan", "load", "save",
    "hash", "align", "score", "index", "open", "close", "flush", "split", "join", "map", "reduce", "emit",
    "check", "update", "compute", "solve", "trace", "pack"};
inline constexpr std::string_view nouns[] = {
    "reads", "graph", "kmer", "matrix", "buffer", "header", "record", "node", "edge", "table", "seq",
    "contig", "block", "stream", "config", "args", "grid", "mesh", "vector", "tree", "cache", "queue",
    "state", "model", "sample", "region", "frame", "batch", "entry", "column", "atom", "bond", "chain"};
inline constexpr std::string_view words[] = {
    "error", "cannot", "open", "file", "invalid", "option", "usage", "input", "output", "memory",
    "allocation", "failed", "reading", "writing", "sequence", "length", "value", "expected", "found",
    "warning", "threads", "using", "default", "parameter", "missing", "argument", "version", "format",
    "unknown", "number", "of", "the", "in", "for", "with", "to", "from", "is", "not", "too", "large",
    "small", "done", "total", "time", "seconds", "writing", "results", "loading", "index", "graph"};

inline constexpr std::string_view runtime_functions[] = {"_start", "main", "_init", "_fini", "__libc_csu_init",
                                                         "__libc_csu_fini"};
inline constexpr std::string_view runtime_strings[] = {
    "GLIBC_2.2.5", "GLIBC_2.14", "libc.so.6", "libm.so.6", "libpthread.so.0", "__libc_start_main",
    "__gmon_start__", "_ITM_registerTMCloneTable", "GCC: (GNU) 10.3.0", ".shstrtab", ".gnu.version"};

struct Function {
    std::string name;
    std::vector<unsigned char> body;
};

struct ToolState {
    std::string name;
    std::vector<Function> functions;
    std::vector<std::string> strings;
};

struct ClassState {
    std::string label;
    std::vector<Function> shared_functions;
    std::vector<std::string> shared_strings;
    std::vector<ToolState> tools;
    double volatility = 1.0;
};

template <std::size_t N>
std::string_view pick(Rng& rng, const std::string_view (&arr)[N]) {
    return arr[rng.below(N)];
}

inline std::vector<unsigned char> random_body(Rng& rng) {
    std::vector<unsigned char> b(static_cast<std::size_t>(rng.between(64, 512)));
    for (auto& c : b) c = static_cast<unsigned char>(rng.below(256));
    return b;
}

inline std::string random_word(Rng& rng, std::size_t parts) {
    std::string s;
    for (std::size_t i = 0; i < parts; ++i) s += pick(rng, syllables);
    return s;
}

inline std::string random_function_name(Rng& rng, const std::string& prefix) {
    return prefix + "_" + std::string(pick(rng, verbs)) + "_" + std::string(pick(rng, nouns)) +
           (rng.chance(0.3) ? std::to_string(rng.below(10)) : "");
}

inline std::string random_sentence(Rng& rng) {
    std::string s;
    const auto n = rng.between(3, 8);
    for (std::int64_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += pick(rng, words);
    }
    switch (rng.below(4)) {
    case 0: s += ": %s"; break;
    case 1: s += " %d\n"; break;
    case 2: s = "[" + random_word(rng, 2) + "] " + s; break;
    default: break;
    }
    return s;
}

inline void add_unique_function(Rng& rng, std::vector<Function>& fns, std::set<std::string>& taken,
                                const std::string& prefix) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto name = random_function_name(rng, prefix);
        if (attempt > 8) name += "_" + std::to_string(rng.below(1000));
        if (taken.insert(name).second) {
            fns.push_back({std::move(name), random_body(rng)});
            return;
        }
    }
}

inline std::set<std::string> names_of(const ClassState& c) {
    std::set<std::string> out;
    for (const auto& f : c.shared_functions) out.insert(f.name);
    for (const auto& t : c.tools)
        for (const auto& f : t.functions) out.insert(f.name);
    return out;
}

inline ClassState make_base(Rng& rng, std::string label, std::size_t n_tools, const ClassState* parent) {
    ClassState c;
    c.label = std::move(label);
    const std::string prefix = random_word(rng, 2);
    std::set<std::string> taken;

    if (parent != nullptr) {
        // A related application reuses part of its parent's library code and strings.
        for (const auto& f : parent->shared_functions) {
            if (rng.chance(0.3)) continue;
            Function copy = f;
            if (rng.chance(0.4)) copy.body = random_body(rng);
            taken.insert(copy.name);
            c.shared_functions.push_back(std::move(copy));
        }
        for (const auto& s : parent->shared_strings)
            if (rng.chance(0.7)) c.shared_strings.push_back(s);
        const auto extra = rng.between(5, 12);
        for (std::int64_t i = 0; i < extra; ++i) add_unique_function(rng, c.shared_functions, taken, prefix);
    } else {
        const auto n_shared = rng.between(20, 40);
        for (std::int64_t i = 0; i < n_shared; ++i) add_unique_function(rng, c.shared_functions, taken, prefix);
        const auto n_str = rng.between(20, 40);
        for (std::int64_t i = 0; i < n_str; ++i) c.shared_strings.push_back(random_sentence(rng));
    }

    std::set<std::string> tool_names;
    for (std::size_t t = 0; t < n_tools; ++t) {
        ToolState tool;
        do tool.name = random_word(rng, 2 + rng.below(2));
        while (!tool_names.insert(tool.name).second);
        const auto n_fn = rng.between(8, 24);
        for (std::int64_t i = 0; i < n_fn; ++i) add_unique_function(rng, tool.functions, taken, tool.name);
        const auto n_str = rng.between(8, 20);
        for (std::int64_t i = 0; i < n_str; ++i) tool.strings.push_back(random_sentence(rng));
        tool.strings.push_back("usage: " + tool.name + " [options] <input>");
        c.tools.push_back(std::move(tool));
    }
    return c;
}

inline std::size_t churn_count(Rng& rng, double rate, std::size_t n) {
    const double expected = rate * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::floor(expected));
    if (rng.chance(expected - std::floor(expected))) ++k;
    return k;
}

inline void churn_strings(Rng& rng, std::vector<std::string>& strings, double rate) {
    const std::size_t k = churn_count(rng, rate, strings.size());
    for (std::size_t i = 0; i < k && !strings.empty(); ++i) {
        strings.erase(strings.begin() + static_cast<std::ptrdiff_t>(rng.below(strings.size())));
        strings.insert(strings.begin() + static_cast<std::ptrdiff_t>(rng.below(strings.size() + 1)),
                       random_sentence(rng));
    }
}

inline void churn_functions(Rng& rng, std::vector<Function>& fns, std::set<std::string>& taken, double rate,
                            const std::string& prefix) {
    const std::size_t k = churn_count(rng, rate, fns.size());
    for (std::size_t i = 0; i < k; ++i) {
        switch (rng.below(3)) {
        case 0: // removal, never below a handful of functions
            if (fns.size() > 4) fns.erase(fns.begin() + static_cast<std::ptrdiff_t>(rng.below(fns.size())));
            break;
        case 1: { // insertion
            std::vector<Function> fresh;
            add_unique_function(rng, fresh, taken, prefix);
            if (!fresh.empty())
                fns.insert(fns.begin() + static_cast<std::ptrdiff_t>(rng.below(fns.size() + 1)), std::move(fresh[0]));
            break;
        }
        default: { // rename
            if (fns.empty()) break;
            auto& f = fns[rng.below(fns.size())];
            std::vector<Function> fresh;
            add_unique_function(rng, fresh, taken, prefix);
            if (!fresh.empty()) f.name = fresh[0].name;
            break;
        }
        }
    }
}

/// Overwrites short random bursts inside function bodies until about
/// `rate` of all body bytes have been rewritten.
inline void edit_bodies(Rng& rng, std::vector<Function*>& fns, double rate) {
    std::size_t total = 0;
    for (auto* f : fns) total += f->body.size();
    if (total == 0 || rate <= 0) return;
    const std::size_t target = churn_count(rng, rate, total);
    std::size_t done = 0;
    while (done < target) {
        std::size_t at = rng.below(total);
        Function* f = nullptr;
        for (auto* g : fns) {
            if (at < g->body.size()) {
                f = g;
                break;
            }
            at -= g->body.size();
        }
        const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(rng.between(8, 24)), target - done);
        for (std::size_t i = 0; i < len && at + i < f->body.size(); ++i)
            f->body[at + i] = static_cast<unsigned char>(rng.below(256));
        done += len;
    }
}

inline void evolve(Rng& rng, ClassState& c, const SyntheticSpec& spec) {
    const double rate = spec.mutation_rate * c.volatility;
    const double s_churn = (spec.string_churn < 0 ? 2.0 * spec.mutation_rate : spec.string_churn) * c.volatility;
    const double f_churn = (spec.symbol_churn < 0 ? 0.5 * spec.mutation_rate : spec.symbol_churn) * c.volatility;

    std::vector<Function*> bodies;
    for (auto& f : c.shared_functions) bodies.push_back(&f);
    for (auto& t : c.tools)
        for (auto& f : t.functions) bodies.push_back(&f);
    edit_bodies(rng, bodies, rate);

    auto taken = names_of(c);
    churn_strings(rng, c.shared_strings, s_churn);
    churn_functions(rng, c.shared_functions, taken, f_churn, c.label);
    for (auto& t : c.tools) {
        churn_strings(rng, t.strings, s_churn);
        churn_functions(rng, t.functions, taken, f_churn, t.name);
    }
}

inline const std::vector<Function>& runtime_code() {
    static const std::vector<Function> fns = [] {
        Rng rng(0x5eed, 0);
        std::vector<Function> out;
        for (auto name : runtime_functions) out.push_back({std::string(name), random_body(rng)});
        return out;
    }();
    return fns;
}

inline ElfImage render_tool(const ClassState& c, const ToolState& t) {
    ElfImage img;
    for (const auto& f : runtime_code()) img.functions.push_back({f.name, f.body, true});
    for (const auto& f : c.shared_functions) img.functions.push_back({f.name, f.body, true});
    for (std::size_t i = 0; i < t.functions.size(); ++i)
        img.functions.push_back({t.functions[i].name, t.functions[i].body, i % 5 != 4});
    for (auto s : runtime_strings) img.strings.emplace_back(s);
    img.strings.insert(img.strings.end(), c.shared_strings.begin(), c.shared_strings.end());
    img.strings.insert(img.strings.end(), t.strings.begin(), t.strings.end());
    img.data_symbols = {t.name + "_options", c.label + "_defaults"};
    return img;
}

inline std::string class_label(Rng& rng, std::set<std::string>& taken) {
    for (;;) {
        std::string s = random_word(rng, 2 + rng.below(2));
        s[0] = static_cast<char>(s[0] - 'a' + 'A');
        if (taken.insert(s).second) return s;
    }
}

inline std::string version_label(std::size_t v, Rng& rng) {
    static constexpr std::string_view toolchains[] = {"GCC-10.3.0", "foss-2021a", "iomkl-2019.01", "goolf-1.7.20",
                                                      "intel-2020a", "GCCcore-11.2.0"};
    return std::to_string(v + 1) + "." + std::to_string(rng.below(10)) + "." + std::to_string(rng.below(20)) + "-" +
           std::string(toolchains[rng.below(std::size(toolchains))]);
}

} // namespace synth

/// Writes root/<Class>/<version>/<tool> executables. Fully determined by spec.
/// Returns the number of files written.
inline std::size_t generate_synthetic_corpus(const SyntheticSpec& spec, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (spec.n_classes < 1 || spec.versions_per_class < 1 || spec.min_samples_per_version < 1 ||
        spec.max_samples_per_version < spec.min_samples_per_version)
        throw Error(ErrorKind::Usage, "synthetic corpus counts must be >= 1 (and min <= max samples)");
    if (spec.mutation_rate < 0 || spec.mutation_rate > 1)
        throw Error(ErrorKind::Usage, "mutation rate must lie in [0, 1]");

    Rng layout(spec.seed, 0);
    std::set<std::string> labels;
    std::vector<synth::ClassState> bases;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        Rng rng(spec.seed, 1000 + c);
        const auto n_tools = static_cast<std::size_t>(
            rng.between(static_cast<std::int64_t>(spec.min_samples_per_version),
                        static_cast<std::int64_t>(spec.max_samples_per_version)));
        const synth::ClassState* parent = nullptr;
        if (c > 0 && rng.chance(spec.related_fraction)) parent = &bases[rng.below(c)];
        auto base = synth::make_base(rng, synth::class_label(layout, labels), n_tools, parent);
        const double spread = std::max(1.0, spec.volatility_spread);
        base.volatility = std::exp((2.0 * rng.uniform() - 1.0) * std::log(spread));
        bases.push_back(std::move(base));
    }

    std::size_t written = 0;
    try {
        for (std::size_t c = 0; c < bases.size(); ++c) {
            Rng rng(spec.seed, 100000 + c);
            synth::ClassState state = bases[c];
            std::set<std::string> versions;
            for (std::size_t v = 0; v < spec.versions_per_class; ++v) {
                if (v > 0) synth::evolve(rng, state, spec);
                std::string vname;
                do vname = synth::version_label(v, rng);
                while (!versions.insert(vname).second);
                const fs::path dir = root / state.label / vname;
                fs::create_directories(dir);
                for (const auto& tool : state.tools) {
                    const auto bytes = write_elf(synth::render_tool(state, tool));
                    const fs::path file = dir / tool.name;
                    std::ofstream out(file, std::ios::binary | std::ios::trunc);
                    if (!out) throw Error(ErrorKind::Io, "cannot write " + file.string());
                    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
                    out.close();
                    fs::permissions(file, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                                    fs::perm_options::add);
                    ++written;
                }
            }
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorKind::Io, e.what());
    }
    return written;
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_SYNTHETIC_HPP
