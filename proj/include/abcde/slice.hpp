#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "abcde/dataset.hpp"

namespace abcde {

// Conjunction of attribute predicates, written as comma-separated clauses:
//   size=large, width<=512, color:yellow, source!=web
// A bare name is a has-flag test (present and not false). Ordering operators
// compare numerically; = and != compare numbers numerically and everything
// else by its string form.
class SliceFilter {
 public:
  enum class Op { eq, ne, lt, le, gt, ge, has };
  struct Clause {
    std::string attribute;
    Op op = Op::has;
    std::string value;
  };

  SliceFilter() = default;
  // Throws Error(ParseError) on malformed clauses.
  static SliceFilter parse(std::string_view expr);

  bool empty() const { return clauses_.empty(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  bool matches(const Attributes& attributes) const;
  std::string to_string() const;

 private:
  std::vector<Clause> clauses_;
};

// Canonical text form used for grouping and equality tests: numbers in
// shortest round-trip form, booleans as true/false.
std::string attribute_text(const AttributeValue& value);

}  // namespace abcde
