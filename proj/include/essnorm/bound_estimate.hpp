#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace essnorm {

/// A certified numeric bracket for an essential norm: lower <= true value
/// <= upper, with the method that produced it and an optional witness note.
struct BoundEstimate {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    std::string witness;
    std::string method;

    BoundEstimate() = default;
    BoundEstimate(double lo, double hi, std::string w, std::string m)
        : lower(lo), upper(hi), witness(std::move(w)), method(std::move(m)) {
        if (!(lower <= upper))
            throw std::invalid_argument("bound estimate must satisfy lower <= upper");
    }

    bool exact() const { return lower == upper; }
};

}  // namespace essnorm
