#include "abcde/slice.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include "abcde/error.hpp"

namespace abcde {

namespace {

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> as_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<double> attribute_number(const AttributeValue& v) {
  if (auto d = std::get_if<double>(&v)) return *d;
  if (auto s = std::get_if<std::string>(&v)) return as_number(std::string_view(*s));
  return std::nullopt;
}

bool equals(const AttributeValue& attr, const std::string& value) {
  if (std::holds_alternative<double>(attr)) {
    auto rhs = as_number(std::string_view(value));
    return rhs && *rhs == std::get<double>(attr);
  }
  return attribute_text(attr) == value;
}

const char* op_text(SliceFilter::Op op) {
  switch (op) {
    case SliceFilter::Op::eq: return "=";
    case SliceFilter::Op::ne: return "!=";
    case SliceFilter::Op::lt: return "<";
    case SliceFilter::Op::le: return "<=";
    case SliceFilter::Op::gt: return ">";
    case SliceFilter::Op::ge: return ">=";
    case SliceFilter::Op::has: return "";
  }
  return "";
}

}  // namespace

std::string attribute_text(const AttributeValue& value) {
  if (auto b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  if (auto s = std::get_if<std::string>(&value)) return *s;
  double d = std::get<double>(value);
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, ptr);
}

SliceFilter SliceFilter::parse(std::string_view expr) {
  SliceFilter f;
  std::size_t start = 0;
  while (start <= expr.size()) {
    auto comma = expr.find(',', start);
    auto part = trim(expr.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start));
    start = comma == std::string_view::npos ? expr.size() + 1 : comma + 1;
    if (part.empty()) continue;

    Clause c;
    static constexpr std::pair<std::string_view, Op> kOps[] = {
        {"<=", Op::le}, {">=", Op::ge}, {"!=", Op::ne}, {"=", Op::eq}, {"<", Op::lt}, {">", Op::gt}};
    std::size_t best = std::string_view::npos;
    for (auto [tok, op] : kOps) {
      auto at = part.find(tok);
      if (at != std::string_view::npos && at < best) {
        best = at;
        c.op = op;
      }
    }
    if (best == std::string_view::npos) {
      c.attribute = std::string(part);
      c.op = Op::has;
    } else {
      std::size_t len = std::string_view(op_text(c.op)).size();
      c.attribute = std::string(trim(part.substr(0, best)));
      c.value = std::string(trim(part.substr(best + len)));
      if (c.attribute.empty())
        throw Error(ErrorCode::parse, "filter clause '" + std::string(part) + "' has no attribute");
      bool ordering = c.op == Op::lt || c.op == Op::le || c.op == Op::gt || c.op == Op::ge;
      if (ordering && !as_number(std::string_view(c.value)))
        throw Error(ErrorCode::parse, "filter clause '" + std::string(part) + "' needs a number");
    }
    f.clauses_.push_back(std::move(c));
  }
  return f;
}

bool SliceFilter::matches(const Attributes& attributes) const {
  for (const auto& c : clauses_) {
    auto it = attributes.find(c.attribute);
    bool present = it != attributes.end();
    switch (c.op) {
      case Op::has:
        if (!present) return false;
        if (auto b = std::get_if<bool>(&it->second); b && !*b) return false;
        break;
      case Op::eq:
        if (!present || !equals(it->second, c.value)) return false;
        break;
      case Op::ne:
        if (present && equals(it->second, c.value)) return false;
        break;
      default: {
        if (!present) return false;
        auto lhs = attribute_number(it->second);
        auto rhs = as_number(std::string_view(c.value));
        if (!lhs || !rhs) return false;
        bool ok = (c.op == Op::lt && *lhs < *rhs) || (c.op == Op::le && *lhs <= *rhs) ||
                  (c.op == Op::gt && *lhs > *rhs) || (c.op == Op::ge && *lhs >= *rhs);
        if (!ok) return false;
      }
    }
  }
  return true;
}

std::string SliceFilter::to_string() const {
  std::string out;
  for (const auto& c : clauses_) {
    if (!out.empty()) out += ',';
    out += c.attribute;
    out += op_text(c.op);
    out += c.value;
  }
  return out;
}

}  // namespace abcde
