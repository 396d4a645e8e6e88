#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bms {

/// Base of every error the engine raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed recording, model or observation document. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A required marker label is absent from the recording layout.
class StructuralError : public Error { public: using Error::Error; };
class GeometryError : public Error { public: using Error::Error; };
class WindowError : public Error { public: using Error::Error; };
class ParameterError : public Error { public: using Error::Error; };
class SegmentationError : public Error { public: using Error::Error; };
class FittingError : public Error { public: using Error::Error; };
class JudgmentError : public Error { public: using Error::Error; };
class LabelingError : public Error { public: using Error::Error; };
class SummaryError : public Error { public: using Error::Error; };
class PairingError : public Error { public: using Error::Error; };
class DegenerateVarianceError : public Error { public: using Error::Error; };
class SingularityError : public Error { public: using Error::Error; };
/// The shuttle did not pass above the net indicator.
class NotClearedError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace bms
