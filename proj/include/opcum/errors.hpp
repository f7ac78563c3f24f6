#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opcum {

/// Input violates a precondition (bad index, mismatched model, ...).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested enumeration exceeds the hard size caps.
struct enumeration_cap_error : std::runtime_error {
    explicit enumeration_cap_error(const std::string& what) : std::runtime_error(what) {}
};

/// A factor sequence cannot be represented under the active ordering map.
struct inadmissible_term_error : validation_error {
    explicit inadmissible_term_error(const std::string& what) : validation_error(what) {}
};

/// Text input does not conform to the expression grammar.
struct parse_error : std::runtime_error {
    parse_error(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " at byte " + std::to_string(byte_offset)),
          offset(byte_offset) {}
    std::size_t offset;
};

}  // namespace opcum
