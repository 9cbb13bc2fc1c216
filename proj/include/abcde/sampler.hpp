#pragma once

// Weighted sampling with exponential clocks.
//
// Every element e of weight w_e gets an initial draw time dt0(e) ~ Exp(w_e).
// The n smallest clocks form a weighted sample without replacement. For a
// sample with replacement of n unique elements, M is the largest of those n
// clocks and each selected element is drawn 1 + Pois(w_e * (M - dt0(e)))
// times; IncrementalDrawer replays the same process one draw at a time.

#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "abcde/random.hpp"

namespace abcde {

struct WeightedElement {
  std::string key;
  double weight = 0;
};

struct ClockedElement {
  std::string key;
  double weight = 0;
  double dt0 = 0;
};

struct DrawResult {
  std::string key;
  std::int64_t draw_count = 0;
};

// Orders by dt0, then key; equal clocks are a probability-zero event but must
// still resolve deterministically.
inline bool clock_before(const ClockedElement& a, const ClockedElement& b) {
  if (a.dt0 != b.dt0) return a.dt0 < b.dt0;
  return a.key < b.key;
}

// dt0 from the (seed, key) clock stream. Throws InvalidWeight for weight <= 0.
ClockedElement assign_clock(const WeightedElement& element, std::uint64_t seed);
std::vector<ClockedElement> assign_clocks(std::span<const WeightedElement> elements,
                                          std::uint64_t seed);

// The n earliest clocks in ascending order, streamed through a bounded
// max-heap. Works on any shard; merge shards with merge_smallest_clocks.
std::vector<ClockedElement> smallest_clocks(std::span<const ClockedElement> clocked,
                                            std::size_t n);
std::vector<ClockedElement> merge_smallest_clocks(
    std::span<const std::vector<ClockedElement>> shards, std::size_t n);

// Assigns clocks and selects the n earliest, splitting the population into
// `shards` contiguous ranges processed on separate threads. The result does
// not depend on the shard count.
std::vector<ClockedElement> sharded_smallest_clocks(std::span<const WeightedElement> elements,
                                                    std::uint64_t seed, std::size_t n,
                                                    std::size_t shards);

// Keys of the n earliest clocks (all of them when n exceeds the population).
std::vector<std::string> sample_without_replacement(std::span<const ClockedElement> clocked,
                                                    std::size_t n);

struct WithReplacementSample {
  std::vector<ClockedElement> selected;  // S, ascending dt0
  std::vector<DrawResult> draws;         // parallel to `selected`
  double horizon = 0;                    // M
  bool population_exhausted = false;     // n_unique >= population size
};

// Draws for a selected set S with horizon M (step 3: Poisson tail).
std::vector<DrawResult> poisson_tail_draws(std::span<const ClockedElement> selected,
                                           double horizon, std::uint64_t seed);

WithReplacementSample sample_with_replacement(std::span<const ClockedElement> clocked,
                                              std::size_t n_unique, std::uint64_t seed);

// Replays the draws of a selected set one at a time in draw-time order, up to
// and including the horizon.
class IncrementalDrawer {
 public:
  IncrementalDrawer(std::span<const ClockedElement> selected, double horizon, std::uint64_t seed);
  IncrementalDrawer(const IncrementalDrawer&) = delete;
  IncrementalDrawer& operator=(const IncrementalDrawer&) = delete;

  // Index into `selected` of the next draw, or -1 once no draw time <= M remains.
  std::ptrdiff_t peek() const;
  double peek_time() const;
  // Performs the draw reported by peek(); returns its index.
  std::size_t pop();

 private:
  struct Pending {
    double time;
    std::size_t index;
  };
  struct Later {
    const std::vector<ClockedElement>* elements;
    bool operator()(const Pending& a, const Pending& b) const {
      if (a.time != b.time) return a.time > b.time;
      return (*elements)[a.index].key > (*elements)[b.index].key;
    }
  };

  std::vector<ClockedElement> elements_;
  std::vector<KeyedStream> streams_;
  double horizon_;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
};

// Called before each draw with the element about to be drawn and the draws
// accepted so far; returning true stops without accepting that draw.
using StopPredicate =
    std::function<bool(const ClockedElement& next, std::span<const DrawResult> so_far)>;

// Runs IncrementalDrawer until `stop` fires or the horizon is exhausted.
// Results are listed in order of each element's first draw.
std::vector<DrawResult> incremental_draws(std::span<const ClockedElement> selected,
                                          double horizon, std::uint64_t seed,
                                          const StopPredicate& stop = {});

}  // namespace abcde
