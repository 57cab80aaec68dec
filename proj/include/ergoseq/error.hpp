#pragma once

#include <stdexcept>
#include <string>

namespace ergoseq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSequence : public Error {
public:
    using Error::Error;
};

/// An lp norm with p < inf was requested for a sequence whose tail is only bounded.
class UndecidableNorm : public Error {
public:
    using Error::Error;
};

class InexactRearrangement : public Error {
public:
    using Error::Error;
};

class NotInC0 : public Error {
public:
    using Error::Error;
};

class SplitImpossible : public Error {
public:
    using Error::Error;
};

class NotContraction : public Error {
public:
    NotContraction(double row_norm, double col_norm, const std::string& what)
        : Error(what), row_norm_(row_norm), col_norm_(col_norm) {}

    double row_norm() const noexcept { return row_norm_; }
    double col_norm() const noexcept { return col_norm_; }

private:
    double row_norm_;
    double col_norm_;
};

class UnsupportedForm : public Error {
public:
    using Error::Error;
};

class IncompatibleSupport : public Error {
public:
    using Error::Error;
};

class InvalidOperator : public Error {
public:
    using Error::Error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

}  // namespace ergoseq
