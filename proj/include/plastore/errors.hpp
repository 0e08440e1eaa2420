#pragma once

#include <stdexcept>
#include <string>

namespace plastore {

/// Argument outside the valid range of a query (position, ordinal, key).
class range_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Input that violates a construction precondition (ordering, setting, widths).
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters outside the domain of a counting formula or lower bound.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A point that no segment of the PLA covers.
class coverage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed serialized container.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive computation exceeding its configured budget.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate input, e.g. an empty sequence.
class degenerate_input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace plastore
