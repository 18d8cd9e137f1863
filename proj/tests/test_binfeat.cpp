#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <string>
#include <vector>

#include "fuzzyclass/binfeat.hpp"
#include "fuzzyclass/synthetic.hpp"

using namespace fuzzyclass;

namespace {

const std::filesystem::path fixtures = std::filesystem::path(FUZZYCLASS_TEST_DATA) / "elf";

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream in(p);
    EXPECT_TRUE(in.good()) << p;
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<unsigned char> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::Usage;
}

ElfImage sample_image() {
    ElfImage img;
    img.functions = {{"main", {0x55, 0x48, 0x89, 0xe5, 0xc3}, true},
                     {"parse_args", {0x31, 0xc0, 0xc3}, true},
                     {"local_helper", {0x90, 0xc3}, false},
                     {"write_output", {0x48, 0x31, 0xff, 0xc3}, true}};
    img.strings = {"usage: tool [options]", "cannot open input file", "version 1.2.3"};
    img.data_symbols = {"option_table"};
    return img;
}

} // namespace

class FixtureExtraction : public ::testing::TestWithParam<std::string> {};

TEST_P(FixtureExtraction, SymbolsMatchNm) {
    const auto data = read_file(fixtures / GetParam());
    EXPECT_EQ(extract_symbols(data), read_lines(fixtures / (GetParam() + ".nm")));
}

TEST_P(FixtureExtraction, StringsMatchGnuStrings) {
    const auto data = read_file(fixtures / GetParam());
    EXPECT_EQ(extract_strings(data), read_lines(fixtures / (GetParam() + ".strings")));
    EXPECT_EQ(extract_strings(data, 8), read_lines(fixtures / (GetParam() + ".strings8")));
}

INSTANTIATE_TEST_SUITE_P(Elf, FixtureExtraction,
                         ::testing::Values("tool64", "tool64_O2", "lib64.so", "lib32.so", "ifunc64.so", "be32.elf",
                                           "be64.elf"),
                         [](const auto& info) {
                             std::string n = info.param;
                             std::replace(n.begin(), n.end(), '.', '_');
                             return n;
                         });

TEST(ExtractSymbols, TwoExportedFunctions) {
    EXPECT_EQ(extract_symbols(read_file(fixtures / "lib64.so")), (std::vector<std::string>{"alpha", "beta"}));
}

TEST(ExtractSymbols, StrippedFixture) {
    const auto data = read_file(fixtures / "tool64_stripped");
    EXPECT_EQ(kind_of([&] { extract_symbols(data); }), ErrorKind::Stripped);
    EXPECT_EQ(kind_of([&] { featurize(data); }), ErrorKind::Stripped);
    EXPECT_EQ(extract_strings(data), read_lines(fixtures / "tool64_stripped.strings"));
    const auto info = inspect(data);
    EXPECT_TRUE(info.is_elf);
    EXPECT_FALSE(info.has_symtab);
    EXPECT_TRUE(info.global_text_symbols.empty());
}

TEST(ExtractSymbols, NotElfAndMalformed) {
    EXPECT_EQ(kind_of([] { extract_symbols(bytes_of("#!/bin/sh\necho hello\n")); }), ErrorKind::NotElf);
    EXPECT_EQ(kind_of([] { extract_symbols(std::vector<unsigned char>{}); }), ErrorKind::NotElf);
    const auto info = inspect(bytes_of("plain text file"));
    EXPECT_FALSE(info.is_elf);
    EXPECT_FALSE(info.has_symtab);

    auto data = read_file(fixtures / "tool64");
    const std::vector<unsigned char> head(data.begin(), data.begin() + 40);
    EXPECT_EQ(kind_of([&] { extract_symbols(head); }), ErrorKind::Malformed);

    // Section header table pushed past the end of the file.
    auto bad = data;
    for (int i = 0; i < 8; ++i) bad[0x28 + i] = 0xff;
    EXPECT_EQ(kind_of([&] { extract_symbols(bad); }), ErrorKind::Malformed);

    const std::vector<unsigned char> truncated(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(data.size() / 2));
    EXPECT_EQ(kind_of([&] { extract_symbols(truncated); }), ErrorKind::Malformed);
}

TEST(ExtractSymbols, OrderInsensitive) {
    auto img = sample_image();
    const auto expected = extract_symbols(write_elf(img));
    EXPECT_EQ(expected, (std::vector<std::string>{"main", "parse_args", "write_output"}));
    std::reverse(img.functions.begin(), img.functions.end());
    EXPECT_EQ(extract_symbols(write_elf(img)), expected);
}

TEST(ExtractSymbols, DuplicatesPreserved) {
    ElfImage img;
    img.functions = {{"same", {0xc3}, true}, {"same", {0x90, 0xc3}, true}, {"other", {0xc3}, true}};
    EXPECT_EQ(extract_symbols(write_elf(img)), (std::vector<std::string>{"other", "same", "same"}));
}

TEST(ExtractStrings, Examples) {
    EXPECT_EQ(extract_strings(bytes_of(std::string("\0\0hello\0hi\0", 11))), (std::vector<std::string>{"hello"}));
    EXPECT_TRUE(extract_strings(std::vector<unsigned char>(100, 0)).empty());
    EXPECT_EQ(extract_strings(bytes_of("tab\there")), (std::vector<std::string>{"tab\there"}));
    EXPECT_EQ(extract_strings(bytes_of(std::string("abc\x7f" "defg\nhijk", 13))),
              (std::vector<std::string>{"defg", "hijk"}));
    EXPECT_EQ(extract_strings(bytes_of("abcdefgh"), 1), (std::vector<std::string>{"abcdefgh"}));
}

TEST(ExtractStrings, SubsequenceOfPrintableProjection) {
    const auto data = read_file(fixtures / "tool64");
    std::string projection;
    for (unsigned char c : data)
        if (is_printable(c)) projection.push_back(static_cast<char>(c));
    std::string joined;
    for (const auto& s : extract_strings(data)) joined += s;
    std::size_t j = 0;
    for (std::size_t i = 0; i < projection.size() && j < joined.size(); ++i)
        if (projection[i] == joined[j]) ++j;
    EXPECT_EQ(j, joined.size());
}

TEST(Featurize, DefinedByDigestsOfJoinedLists) {
    const auto data = read_file(fixtures / "tool64");
    const auto t = featurize(data);
    EXPECT_EQ(t.file_hash, digest(data));
    EXPECT_EQ(t.strings_hash, digest(join_lines(extract_strings(data))));
    EXPECT_EQ(t.symbols_hash, digest(std::string_view("_fini\n_init\n_start\nchecksum\nmain\nreport")));
    EXPECT_EQ(t, featurize(read_file(fixtures / "tool64")));
    EXPECT_EQ(&t[HashType::file], &t.file_hash);
    EXPECT_EQ(&t[HashType::strings], &t.strings_hash);
    EXPECT_EQ(&t[HashType::symbols], &t.symbols_hash);
}

TEST(Featurize, AppendedStringLeavesSymbolsAlone) {
    auto img = sample_image();
    const auto before = featurize(write_elf(img));
    img.strings.push_back("an extra comment string");
    const auto after = featurize(write_elf(img));
    EXPECT_NE(before.file_hash, after.file_hash);
    EXPECT_NE(before.strings_hash, after.strings_hash);
    EXPECT_EQ(before.symbols_hash, after.symbols_hash);
}

TEST(Featurize, OptimizationLevelsKeepSymbolsCloser) {
    const auto o0 = featurize(read_file(fixtures / "tool64"));
    const auto o2 = featurize(read_file(fixtures / "tool64_O2"));
    EXPECT_GE(compare(o0.symbols_hash, o2.symbols_hash), compare(o0.file_hash, o2.file_hash));
}

TEST(Featurize, IgnoresFileName) {
    const auto dir = std::filesystem::temp_directory_path() / "fuzzyclass_binfeat_names";
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(fixtures / "tool64", dir / "renamed_tool", std::filesystem::copy_options::overwrite_existing);
    EXPECT_EQ(featurize(read_file(dir / "renamed_tool")), featurize(read_file(fixtures / "tool64")));
    std::filesystem::remove_all(dir);
}

TEST(ReadFile, MissingFileIsIoError) {
    EXPECT_EQ(kind_of([] { read_file("/nonexistent/fuzzyclass/file"); }), ErrorKind::Io);
}
