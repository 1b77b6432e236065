#pragma once

#include <stdexcept>
#include <string>

namespace sfplap {

/// A model parameter is outside its admissible range (tau <= 1, m < 1, ...).
class invalid_parameter : public std::invalid_argument {
public:
    explicit invalid_parameter(const std::string& what) : std::invalid_argument(what) {}
};

/// A requested moment of the weight law is infinite.
class infinite_moment : public std::domain_error {
public:
    explicit infinite_moment(const std::string& what) : std::domain_error(what) {}
};

/// Two operands disagree in size.
class dimension_mismatch : public std::invalid_argument {
public:
    explicit dimension_mismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// An internal consistency check failed; signals a bug rather than bad input.
class integrity_error : public std::logic_error {
public:
    explicit integrity_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sfplap
