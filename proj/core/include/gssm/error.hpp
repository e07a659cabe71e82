#pragma once

#include <stdexcept>
#include <string>

namespace gssm {

// Rejected input: bad dimensions, out-of-range parameters, malformed files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The computation itself failed: resonance, pole proximity, blowup, rank loss.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResonanceError : public NumericalError {
public:
    ResonanceError(const std::string& what, int row, std::string slot)
        : NumericalError(what), row_(row), slot_(std::move(slot)) {}
    int row() const noexcept { return row_; }
    const std::string& slot() const noexcept { return slot_; }

private:
    int row_;
    std::string slot_;
};

class PoleProximityError : public NumericalError {
public:
    PoleProximityError(const std::string& what, std::string point, double denominator)
        : NumericalError(what), point_(std::move(point)), denominator_(denominator) {}
    const std::string& point() const noexcept { return point_; }
    double denominator() const noexcept { return denominator_; }

private:
    std::string point_;
    double denominator_;
};

}  // namespace gssm
