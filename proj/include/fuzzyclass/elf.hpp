#ifndef FUZZYCLASS_ELF_HPP
#define FUZZYCLASS_ELF_HPP

// Minimal read-only ELF reader: just enough of the header, section table and
// static symbol table to pick out global text symbols. Handles ELF32/ELF64 in
// either byte order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyclass/error.hpp"

namespace fuzzyclass::elf {

inline constexpr std::uint16_t et_exec = 2;
inline constexpr std::uint16_t et_dyn = 3;
inline constexpr std::uint32_t sht_symtab = 2;
inline constexpr std::uint32_t sht_nobits = 8;
inline constexpr std::uint64_t shf_execinstr = 0x4;
inline constexpr std::uint8_t stb_global = 1;
inline constexpr std::uint8_t stt_gnu_ifunc = 10;
inline constexpr std::uint16_t shn_undef = 0;
inline constexpr std::uint16_t shn_loreserve = 0xff00;

struct Section {
    std::string name;
    std::uint32_t type = 0;
    std::uint64_t flags = 0;
    std::uint64_t offset = 0;
    std::uint64_t size = 0;
    std::uint32_t link = 0;
    std::uint64_t entsize = 0;
};

struct Symbol {
    std::string name;
    std::uint8_t binding = 0;
    std::uint8_t type = 0;
    std::uint16_t section_index = 0;
    std::uint64_t value = 0;
};

inline bool has_elf_magic(std::span<const unsigned char> data) {
    return data.size() >= 4 && data[0] == 0x7f && data[1] == 'E' && data[2] == 'L' && data[3] == 'F';
}

class Reader {
public:
    explicit Reader(std::span<const unsigned char> data) : data_(data) {
        if (!has_elf_magic(data_)) throw Error(ErrorKind::NotElf, "ELF magic mismatch");
        if (data_.size() < 16) throw Error(ErrorKind::Malformed, "truncated identification");
        const auto cls = data_[4];
        const auto enc = data_[5];
        if (cls != 1 && cls != 2) throw Error(ErrorKind::Malformed, "unknown ELF class");
        if (enc != 1 && enc != 2) throw Error(ErrorKind::Malformed, "unknown ELF data encoding");
        is64_ = cls == 2;
        big_endian_ = enc == 2;

        const std::size_t ehsize = is64_ ? 64 : 52;
        need(0, ehsize, "ELF header");
        type_ = u16(16);
        if (is64_) {
            entry_ = u64(24);
            shoff_ = u64(40);
            shentsize_ = u16(58);
            shnum_ = u16(60);
            shstrndx_ = u16(62);
        } else {
            entry_ = u32(24);
            shoff_ = u32(32);
            shentsize_ = u16(46);
            shnum_ = u16(48);
            shstrndx_ = u16(50);
        }
        read_sections();
    }

    std::uint16_t type() const { return type_; }
    std::uint64_t entry() const { return entry_; }
    bool is64() const { return is64_; }
    bool big_endian() const { return big_endian_; }
    const std::vector<Section>& sections() const { return sections_; }

    const Section* find_section(std::uint32_t type) const {
        for (const auto& s : sections_)
            if (s.type == type) return &s;
        return nullptr;
    }

    std::vector<Symbol> symbols(const Section& symtab) const {
        const std::size_t entsize = is64_ ? 24 : 16;
        if (symtab.entsize != 0 && symtab.entsize < entsize)
            throw Error(ErrorKind::Malformed, "symbol entry size too small");
        const std::size_t stride = symtab.entsize ? symtab.entsize : entsize;
        need(symtab.offset, symtab.size, "symbol table");
        if (symtab.link >= sections_.size()) throw Error(ErrorKind::Malformed, "symbol string table index");
        const Section& strtab = sections_[symtab.link];
        need(strtab.offset, strtab.size, "symbol string table");

        std::vector<Symbol> out;
        const std::uint64_t count = symtab.size / stride;
        out.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t at = symtab.offset + i * stride;
            Symbol s;
            std::uint32_t name_off = 0;
            std::uint8_t info = 0;
            if (is64_) {
                name_off = u32(at);
                info = data_[at + 4];
                s.section_index = u16(at + 6);
                s.value = u64(at + 8);
            } else {
                name_off = u32(at);
                s.value = u32(at + 4);
                info = data_[at + 12];
                s.section_index = u16(at + 14);
            }
            s.binding = info >> 4;
            s.type = info & 0xf;
            s.name = c_string(strtab, name_off);
            out.push_back(std::move(s));
        }
        return out;
    }

private:
    void need(std::uint64_t off, std::uint64_t len, const char* what) const {
        if (off > data_.size() || len > data_.size() - off)
            throw Error(ErrorKind::Malformed, std::string(what) + " out of range");
    }

    std::uint64_t read(std::uint64_t off, int width) const {
        need(off, static_cast<std::uint64_t>(width), "field");
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            const int idx = big_endian_ ? i : width - 1 - i;
            v = (v << 8) | data_[off + static_cast<std::uint64_t>(idx)];
        }
        return v;
    }
    std::uint16_t u16(std::uint64_t off) const { return static_cast<std::uint16_t>(read(off, 2)); }
    std::uint32_t u32(std::uint64_t off) const { return static_cast<std::uint32_t>(read(off, 4)); }
    std::uint64_t u64(std::uint64_t off) const { return read(off, 8); }

    std::string c_string(const Section& table, std::uint64_t off) const {
        if (off >= table.size) throw Error(ErrorKind::Malformed, "string offset out of range");
        const auto* begin = reinterpret_cast<const char*>(data_.data() + table.offset + off);
        const std::size_t limit = table.size - off;
        std::size_t n = 0;
        while (n < limit && begin[n] != '\0') ++n;
        return std::string(begin, n);
    }

    void read_sections() {
        if (shoff_ == 0 || shnum_ == 0) return;
        const std::size_t min_entsize = is64_ ? 64 : 40;
        if (shentsize_ < min_entsize) throw Error(ErrorKind::Malformed, "section header size too small");
        need(shoff_, static_cast<std::uint64_t>(shnum_) * shentsize_, "section header table");

        std::vector<std::uint32_t> name_offsets;
        for (std::uint16_t i = 0; i < shnum_; ++i) {
            const std::uint64_t at = shoff_ + static_cast<std::uint64_t>(i) * shentsize_;
            Section s;
            name_offsets.push_back(u32(at));
            s.type = u32(at + 4);
            if (is64_) {
                s.flags = u64(at + 8);
                s.offset = u64(at + 24);
                s.size = u64(at + 32);
                s.link = u32(at + 40);
                s.entsize = u64(at + 56);
            } else {
                s.flags = u32(at + 8);
                s.offset = u32(at + 16);
                s.size = u32(at + 20);
                s.link = u32(at + 24);
                s.entsize = u32(at + 36);
            }
            sections_.push_back(std::move(s));
        }
        if (shstrndx_ != 0 && shstrndx_ < sections_.size()) {
            const Section names = sections_[shstrndx_];
            need(names.offset, names.size, "section name table");
            for (std::size_t i = 0; i < sections_.size(); ++i)
                if (name_offsets[i] < names.size) sections_[i].name = c_string(names, name_offsets[i]);
        }
    }

    std::span<const unsigned char> data_;
    bool is64_ = false;
    bool big_endian_ = false;
    std::uint16_t type_ = 0;
    std::uint64_t entry_ = 0;
    std::uint64_t shoff_ = 0;
    std::uint16_t shentsize_ = 0;
    std::uint16_t shnum_ = 0;
    std::uint16_t shstrndx_ = 0;
    std::vector<Section> sections_;
};

} // namespace fuzzyclass::elf

#endif // FUZZYCLASS_ELF_HPP
