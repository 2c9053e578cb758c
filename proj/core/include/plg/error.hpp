#pragma once

#include <stdexcept>
#include <string>

namespace plg {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-system or format problem; the message always names the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range input value.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Minimal sample is geometrically degenerate (e.g. three collinear points).
class DegenerateError : public Error {
public:
    DegenerateError() : Error("degenerate sample") {}
    using Error::Error;
};

/// RANSAC found no model supported by at least four matches.
class NoConsensusError : public Error {
public:
    NoConsensusError() : Error("no consensus") {}
    using Error::Error;
};

class PointAtInfinityError : public Error {
public:
    PointAtInfinityError() : Error("point at infinity") {}
};

/// Failure inside a pipeline stage; carries the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace plg
