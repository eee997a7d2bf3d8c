#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corpusrep {

/// Malformed relation text; `position()` is the 0-based byte offset of the
/// offending character (or the end of input).
class RelationSyntaxError : public std::invalid_argument {
public:
    RelationSyntaxError(std::size_t position, const std::string& message)
        : std::invalid_argument("at position " + std::to_string(position) + ": " + message),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

struct Term {
    int sign;  // +1 or -1
    std::string word;

    friend bool operator==(const Term&, const Term&) = default;
};

/// A linear relation over word vectors, normalized so the right-hand side is
/// either one word or the zero vector.
///
///   "germany + capital ~= berlin"   lhs [+germany, +capital], rhs berlin
///   "king - man ~= queen - woman"   lhs [+king, -man, -queen, +woman], rhs 0
struct Relation {
    std::vector<Term> lhs;
    std::optional<std::string> rhs;  // nullopt is the zero vector

    bool rhs_is_zero() const noexcept { return !rhs.has_value(); }
    std::vector<std::string> words() const;

    friend bool operator==(const Relation&, const Relation&) = default;
};

/// Grammar:
///   relation := expr '~=' (expr | '0')
///   expr     := word (('+' | '-') word)*
///   word     := [a-z0-9]+
/// Whitespace is insignificant. A multi-term right side is moved to the left
/// with flipped signs.
Relation parse_relation(std::string_view text);

/// Canonical text form; parse_relation(unparse(r)) == r.
std::string unparse(const Relation& relation);

}  // namespace corpusrep
