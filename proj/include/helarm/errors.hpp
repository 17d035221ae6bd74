#pragma once

#include <stdexcept>
#include <string>

namespace helarm {

// Thrown when an input fails a documented precondition. The message names
// the offending field or sample.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace helarm
