#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace abcde {

// FNV-1a over bytes, then the splitmix64 finalizer.
std::uint64_t hash64(std::string_view bytes, std::uint64_t salt = 0);
std::uint64_t mix64(std::uint64_t x);
std::string hex64(std::uint64_t value);

// Independent random streams for the same (seed, key).
enum class StreamDomain : std::uint64_t {
  clock = 1,         // initial draw time dt0
  poisson_tail = 2,  // extra draws in (dt0, M]
  redraw = 3,        // successive draw times for incremental sampling
  vantage = 4,       // per-vantage pair arrivals
  examples = 5,      // example subsampling in the explorer
};

// Counter-based random stream keyed by (seed, key, domain): the k-th output
// is a pure function of those inputs and k, so results do not depend on the
// order in which elements are visited or on how a population is sharded.
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  KeyedStream(std::uint64_t seed, std::string_view key, StreamDomain domain);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on (0, 1].
  double uniform();
  // Exp(rate) by inversion, -ln(U)/rate.
  double exponential(double rate);
  // Inversion below kPoissonInversionLimit, PTRS rejection above.
  std::int64_t poisson(double mean);

  static constexpr double kPoissonInversionLimit = 10.0;

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace abcde
