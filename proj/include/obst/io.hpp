#pragma once
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "obst/frequency_set.hpp"

namespace obst {

// Instance text format: whitespace-separated integers. First n, then the n
// key weights, then the n+1 gap weights.
inline FrequencySet parse_instance(std::istream& in) {
  std::vector<Cost> numbers;
  std::string line;
  int line_no = 0;
  long long declared_n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      Cost value = 0;
      std::size_t used = 0;
      try {
        value = std::stoull(token, &used);
      } catch (const std::exception&) {
        throw ParseError(line_no, "expected a nonnegative integer, got '" + token + "'");
      }
      if (used != token.size() || token[0] == '-')
        throw ParseError(line_no, "expected a nonnegative integer, got '" + token + "'");
      if (declared_n < 0) {
        declared_n = static_cast<long long>(value);
        if (declared_n < 1)
          throw ParseError(line_no, "key count must be at least 1");
        continue;
      }
      numbers.push_back(value);
      if (numbers.size() > 2 * static_cast<std::size_t>(declared_n) + 1)
        throw ParseError(line_no, "trailing data after the gap weights");
    }
  }
  if (declared_n < 0)
    throw ParseError(line_no ? line_no : 1, "missing key count");
  const auto want = 2 * static_cast<std::size_t>(declared_n) + 1;
  if (numbers.size() < want)
    throw ParseError(line_no ? line_no : 1,
                     "expected " + std::to_string(want) + " weights, got " +
                         std::to_string(numbers.size()));
  std::vector<Cost> keys(numbers.begin(), numbers.begin() + declared_n);
  std::vector<Cost> gaps(numbers.begin() + declared_n, numbers.end());
  try {
    return FrequencySet(std::move(keys), std::move(gaps));
  } catch (const InstanceError& e) {
    throw ParseError(line_no, e.what());
  }
}

inline FrequencySet parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline FrequencySet load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open instance file: " + path);
  return parse_instance(in);
}

inline std::string write_instance(const FrequencySet& fs) {
  std::ostringstream out;
  out << fs.n() << '\n';
  for (int i = 1; i <= fs.n(); ++i)
    out << fs.key_weight(i) << (i == fs.n() ? '\n' : ' ');
  for (int i = 0; i <= fs.n(); ++i)
    out << fs.gap_weight(i) << (i == fs.n() ? '\n' : ' ');
  return out.str();
}

namespace detail {

// splitmix64: deterministic across platforms, which keeps generated
// instances byte-identical for a given (n, seed)
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace detail

// Pseudo-random instance with weights in [0, 1000]: wide enough to keep ties
// rare, small enough that 64-bit accumulation is safe far beyond n = 10^5.
inline FrequencySet generate_instance(int n, std::uint64_t seed) {
  if (n < 1)
    throw ContractError("generate_instance requires n >= 1");
  std::uint64_t state = seed;
  std::vector<Cost> keys(static_cast<std::size_t>(n));
  std::vector<Cost> gaps(static_cast<std::size_t>(n) + 1);
  Cost total = 0;
  for (auto& w : keys) {
    w = detail::splitmix64(state) % 1001;
    total += w;
  }
  for (auto& w : gaps) {
    w = detail::splitmix64(state) % 1001;
    total += w;
  }
  if (total == 0)
    keys[0] = 1;
  return FrequencySet(std::move(keys), std::move(gaps));
}

} // namespace obst
