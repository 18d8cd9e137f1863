#ifndef FUZZYCLASS_ERROR_HPP
#define FUZZYCLASS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fuzzyclass {

enum class ErrorKind {
    NotElf,
    Stripped,
    Malformed,
    Io,
    Format,
    EmptyCorpus,
    TooFewClasses,
    DegenerateInput,
    WidthMismatch,
    LengthMismatch,
    Inconsistent,
    Usage,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::NotElf: return "not-elf";
    case ErrorKind::Stripped: return "stripped";
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Format: return "format-error";
    case ErrorKind::EmptyCorpus: return "empty-corpus";
    case ErrorKind::TooFewClasses: return "too-few-classes";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::WidthMismatch: return "width-mismatch";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::Usage: return "usage";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code or a skip reason.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fuzzyclass

#endif // FUZZYCLASS_ERROR_HPP
