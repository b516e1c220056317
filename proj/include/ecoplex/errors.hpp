#pragma once

#include <stdexcept>
#include <string>

namespace ecoplex {

// Base class for all library failures. CLI maps subclasses to exit codes:
// usage/input problems -> 2, computation failures -> 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad header, unparsable field, unknown code, bad flag value.
class FormatError : public Error {
public:
    using Error::Error;
};

// Duplicate (year, country, product) key in a trade-flow table.
class DuplicateKeyError : public Error {
public:
    using Error::Error;
};

// Requested year missing or carries zero total trade.
class EmptyYearError : public Error {
public:
    using Error::Error;
};

// Pruning left nothing usable, or strict policy hit a disconnected graph.
class PruneError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to reach tolerance within its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

// Spectrum unusable for complexity scores: sigma2 ~ 1 (disconnected) or
// sigma2 ~ 0 / zero variance (rank-1, constant scores).
class DegeneracyError : public Error {
public:
    enum class Kind { Disconnected, ZeroVariance };
    DegeneracyError(Kind kind, const std::string& what) : Error(what), kind(kind) {}
    Kind kind;
};

// EM drove a mixture component into a singular configuration.
class DegenerateFitError : public Error {
public:
    DegenerateFitError(int component, const std::string& what)
        : Error(what), component(component) {}
    int component;
};

// Partition with an empty side handed to a cut criterion.
class UndefinedPartitionError : public Error {
public:
    using Error::Error;
};

// Refused work that would exceed a hard resource guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace ecoplex
