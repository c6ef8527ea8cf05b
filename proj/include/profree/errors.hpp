#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace profree {

// Base class of all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class value_error : public error {
public:
    using error::error;
};

// A configured size, order, or work cap was exceeded.
class cap_error : public error {
public:
    using error::error;
};

// The given subset is not a subgroup.
class not_a_subgroup_error : public error {
public:
    using error::error;
};

// The given subgroup is not normal.
class not_normal_error : public error {
public:
    using error::error;
};

// A group specification string could not be parsed.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t position)
        : error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// A consistency check that should be unreachable failed. Seeing this means
// either corrupted input data or a bug.
class internal_error : public error {
public:
    using error::error;
};

} // namespace profree
