#pragma once

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/moment_spec.hpp"

namespace wishmom {

/**
 * Parses a moment expression: a product of factors `w[a,b]`, separated by
 * `*` or whitespace, each with an optional integer power `^k`.  Powers are
 * expanded into the flattened factor list.  Indices are 1-based and checked
 * against the dimension.
 */
inline MomentSpec parse_moment_expression(const std::string& text, Flavor flavor,
                                          int p) {
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  const auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c)
      throw SyntaxError(std::string("expected '") + c + "'", pos);
    ++pos;
  };
  const auto parse_int = [&]() -> int {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) throw SyntaxError("expected an integer", pos);
    if (pos - start > 6) throw SyntaxError("integer too large", start);
    return std::stoi(text.substr(start, pos - start));
  };

  std::vector<std::pair<int, int>> factors;
  skip_ws();
  if (pos >= text.size()) throw SyntaxError("empty expression", pos);
  bool first = true;
  while (pos < text.size()) {
    if (!first) {
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        skip_ws();
      }
      if (pos >= text.size())
        throw SyntaxError("trailing separator", pos);
    }
    first = false;
    const std::size_t factor_pos = pos;
    expect('w');
    expect('[');
    skip_ws();
    int a = parse_int();
    skip_ws();
    expect(',');
    skip_ws();
    int b = parse_int();
    skip_ws();
    expect(']');
    int power = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      power = parse_int();
    }
    if (a < 1 || a > p || b < 1 || b > p)
      throw IndexOutOfRange("index outside 1.." + std::to_string(p) +
                            " at position " + std::to_string(factor_pos));
    for (int k = 0; k < power; ++k) factors.emplace_back(a, b);
    skip_ws();
  }
  return make_moment_spec(flavor, p, std::move(factors));
}

}  // namespace wishmom
