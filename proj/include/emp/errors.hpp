#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace emp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All scores are zero, so the normalized weights are undefined.
/// When raised from a partitioned decision, `group()` names the offending group.
class ZeroScoreVector : public Error {
public:
    explicit ZeroScoreVector(std::optional<std::size_t> group = std::nullopt)
        : Error(group ? "score vector of group " + std::to_string(*group) + " is all zero"
                      : std::string("score vector is all zero")),
          group_(group) {}

    std::optional<std::size_t> group() const noexcept { return group_; }

private:
    std::optional<std::size_t> group_;
};

class NonFiniteScore : public Error {
public:
    using Error::Error;
};

class NonPositiveBeta : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class InvalidPartition : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class MissingDeltaTheta : public Error {
public:
    using Error::Error;
};

class NotOnHyperplane : public Error {
public:
    using Error::Error;
};

class InfeasibleRegion : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DivergenceDetected : public Error {
public:
    using Error::Error;
};

class NonFiniteEstimate : public Error {
public:
    using Error::Error;
};

/// Malformed input file (scores, partitions, images, checkpoints).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace emp
