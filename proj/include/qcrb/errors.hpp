#pragma once

#include <stdexcept>
#include <string>

namespace qcrb {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A denominator needed by a derived quantity (Q, J, gamma formula) vanishes.
class DegenerateStatistics : public Error {
public:
    using Error::Error;
};

class SingularComplement : public Error {
public:
    using Error::Error;
};

class NonpositiveInformation : public Error {
public:
    using Error::Error;
};

class NonFiniteObjective : public Error {
public:
    using Error::Error;
};

class CutoffTooSmall : public Error {
public:
    CutoffTooSmall(const std::string& what, double deficit)
        : Error(what), deficit_(deficit) {}
    double deficit() const { return deficit_; }

private:
    double deficit_;
};

// Thrown only where a closed form is undefined (e.g. the high-loss form at eta = 1).
// Soft violations are reported through flags on the result instead.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

}  // namespace qcrb
