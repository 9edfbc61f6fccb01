#pragma once

#include <stdexcept>
#include <string>

namespace lrdkit {

enum class ErrorKind {
    InvalidInput,
    DegenerateVariance,
    DegenerateScale,
    InvalidBar,
    DegenerateOverlap,
    Aborted,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::DegenerateVariance: return "DegenerateVariance";
        case ErrorKind::DegenerateScale: return "DegenerateScale";
        case ErrorKind::InvalidBar: return "InvalidBar";
        case ErrorKind::DegenerateOverlap: return "DegenerateOverlap";
        case ErrorKind::Aborted: return "Aborted";
    }
    return "Unknown";
}

/// Base of every error raised by the toolkit. Catch this to handle all
/// analysis failures uniformly; inspect kind() to branch on the cause.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

/// The HAC long-run variance (or the plain variance) is not positive, so
/// the statistic normalised by it is undefined.
struct DegenerateVariance : Error {
    explicit DegenerateVariance(const std::string& what)
        : Error(ErrorKind::DegenerateVariance, what) {}
};

/// A fluctuation function vanished at some scale (zero denominator or
/// zero log argument).
struct DegenerateScale : Error {
    explicit DegenerateScale(const std::string& what) : Error(ErrorKind::DegenerateScale, what) {}
};

struct InvalidBar : Error {
    explicit InvalidBar(const std::string& what) : Error(ErrorKind::InvalidBar, what) {}
};

struct DegenerateOverlap : Error {
    explicit DegenerateOverlap(const std::string& what)
        : Error(ErrorKind::DegenerateOverlap, what) {}
};

struct Aborted : Error {
    explicit Aborted(const std::string& what) : Error(ErrorKind::Aborted, what) {}
};

}  // namespace lrdkit
