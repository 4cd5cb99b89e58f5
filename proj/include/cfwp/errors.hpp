#ifndef CFWP_ERRORS_HPP
#define CFWP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfwp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression text. Carries the byte offset of the failure.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Identifier that is neither `t`, a declared parameter, nor a builtin function.
class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t position)
        : Error("unknown identifier '" + name + "' (at position " +
                std::to_string(position) + ")"),
          name_(name), position_(position) {}
    const std::string& name() const { return name_; }
    std::size_t position() const { return position_; }

private:
    std::string name_;
    std::size_t position_;
};

/// Evaluation left the real domain (sqrt/log of a negative argument,
/// division by zero, non-real power). Carries the offending subexpression.
class DomainError : public Error {
public:
    DomainError(const std::string& what, const std::string& subexpr)
        : Error(what + " in subexpression " + subexpr), subexpr_(subexpr) {}
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class IntConditionFailed : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class LimitDiverges : public Error {
public:
    using Error::Error;
};

class TabulatedProfileUnsupported : public Error {
public:
    using Error::Error;
};

class IrregularSingularity : public Error {
public:
    using Error::Error;
};

class StepUnderflow : public Error {
public:
    using Error::Error;
};

class ResourceLimit : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IOError : public Error {
public:
    using Error::Error;
};

} // namespace cfwp

#endif
