#include "abcde/random.hpp"

#include <cmath>
#include <cstdio>

namespace abcde {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash64(std::string_view bytes, std::uint64_t salt) {
  std::uint64_t h = kFnvOffset ^ mix64(salt);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return mix64(h);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

KeyedStream::KeyedStream(std::uint64_t seed, std::string_view key, StreamDomain domain)
    : base_(hash64(key, mix64(seed) ^ (static_cast<std::uint64_t>(domain) * kGolden))) {}

std::uint64_t KeyedStream::next_u64() {
  ++counter_;
  return mix64(base_ + counter_ * kGolden);
}

double KeyedStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double KeyedStream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::int64_t KeyedStream::poisson(double mean) {
  if (!(mean > 0)) return 0;
  if (mean < kPoissonInversionLimit) {
    // Sequential search of the CDF. The cap only guards against a uniform
    // that rounding puts above the accumulated mass.
    double p = std::exp(-mean);
    double cdf = p;
    double u = uniform();
    std::int64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Hörmann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  while (true) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1))
      return static_cast<std::int64_t>(k);
  }
}

}  // namespace abcde
