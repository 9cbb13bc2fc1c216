#include "abcde/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "abcde/error.hpp"

namespace abcde {

ClockedElement assign_clock(const WeightedElement& element, std::uint64_t seed) {
  if (!(element.weight > 0) || !std::isfinite(element.weight))
    throw Error(ErrorCode::invalid_weight, "element '" + element.key + "' has weight " +
                                               std::to_string(element.weight));
  KeyedStream stream(seed, element.key, StreamDomain::clock);
  return ClockedElement{element.key, element.weight, stream.exponential(element.weight)};
}

std::vector<ClockedElement> assign_clocks(std::span<const WeightedElement> elements,
                                          std::uint64_t seed) {
  std::vector<ClockedElement> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(assign_clock(e, seed));
  return out;
}

std::vector<ClockedElement> smallest_clocks(std::span<const ClockedElement> clocked,
                                            std::size_t n) {
  if (n == 0) return {};
  // Max-heap on clock order: the root is the latest clock still kept.
  std::vector<ClockedElement> heap;
  heap.reserve(std::min(n, clocked.size()) + 1);
  for (const auto& e : clocked) {
    if (heap.size() < n) {
      heap.push_back(e);
      std::push_heap(heap.begin(), heap.end(), clock_before);
    } else if (clock_before(e, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), clock_before);
      heap.back() = e;
      std::push_heap(heap.begin(), heap.end(), clock_before);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), clock_before);
  return heap;
}

std::vector<ClockedElement> merge_smallest_clocks(
    std::span<const std::vector<ClockedElement>> shards, std::size_t n) {
  // k-way merge of sorted shard results, stopping after n.
  using Cursor = std::pair<std::size_t, std::size_t>;  // shard, position
  auto later = [&](const Cursor& a, const Cursor& b) {
    return clock_before(shards[b.first][b.second], shards[a.first][a.second]);
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heads(later);
  for (std::size_t s = 0; s < shards.size(); ++s)
    if (!shards[s].empty()) heads.push({s, 0});
  std::vector<ClockedElement> out;
  while (!heads.empty() && out.size() < n) {
    auto [s, k] = heads.top();
    heads.pop();
    out.push_back(shards[s][k]);
    if (k + 1 < shards[s].size()) heads.push({s, k + 1});
  }
  return out;
}

std::vector<ClockedElement> sharded_smallest_clocks(std::span<const WeightedElement> elements,
                                                    std::uint64_t seed, std::size_t n,
                                                    std::size_t shards) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(1, elements.size())));
  std::vector<std::vector<ClockedElement>> partial(shards);
  std::vector<std::exception_ptr> failures(shards);
  std::vector<std::thread> workers;
  const std::size_t chunk = (elements.size() + shards - 1) / shards;
  for (std::size_t s = 0; s < shards; ++s) {
    workers.emplace_back([&, s] {
      try {
        std::size_t lo = std::min(elements.size(), s * chunk);
        std::size_t hi = std::min(elements.size(), lo + chunk);
        auto clocked = assign_clocks(elements.subspan(lo, hi - lo), seed);
        partial[s] = smallest_clocks(clocked, n);
      } catch (...) {
        failures[s] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return merge_smallest_clocks(partial, n);
}

std::vector<std::string> sample_without_replacement(std::span<const ClockedElement> clocked,
                                                    std::size_t n) {
  std::vector<std::string> keys;
  for (auto& e : smallest_clocks(clocked, n)) keys.push_back(std::move(e.key));
  return keys;
}

std::vector<DrawResult> poisson_tail_draws(std::span<const ClockedElement> selected,
                                           double horizon, std::uint64_t seed) {
  std::vector<DrawResult> draws;
  draws.reserve(selected.size());
  for (const auto& e : selected) {
    KeyedStream stream(seed, e.key, StreamDomain::poisson_tail);
    double elapsed = horizon - e.dt0;
    draws.push_back({e.key, 1 + (elapsed > 0 ? stream.poisson(e.weight * elapsed) : 0)});
  }
  return draws;
}

WithReplacementSample sample_with_replacement(std::span<const ClockedElement> clocked,
                                              std::size_t n_unique, std::uint64_t seed) {
  WithReplacementSample out;
  out.population_exhausted = n_unique >= clocked.size();
  out.selected = smallest_clocks(clocked, n_unique);
  if (out.selected.empty()) return out;
  out.horizon = out.selected.back().dt0;
  out.draws = poisson_tail_draws(out.selected, out.horizon, seed);
  return out;
}

IncrementalDrawer::IncrementalDrawer(std::span<const ClockedElement> selected, double horizon,
                                     std::uint64_t seed)
    : elements_(selected.begin(), selected.end()),
      horizon_(horizon),
      queue_(Later{&elements_}) {
  streams_.reserve(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    streams_.emplace_back(seed, elements_[k].key, StreamDomain::redraw);
    if (elements_[k].dt0 <= horizon_) queue_.push({elements_[k].dt0, k});
  }
}

std::ptrdiff_t IncrementalDrawer::peek() const {
  if (queue_.empty()) return -1;
  return static_cast<std::ptrdiff_t>(queue_.top().index);
}

double IncrementalDrawer::peek_time() const { return queue_.empty() ? horizon_ : queue_.top().time; }

std::size_t IncrementalDrawer::pop() {
  Pending top = queue_.top();
  queue_.pop();
  double next = top.time + streams_[top.index].exponential(elements_[top.index].weight);
  if (next <= horizon_) queue_.push({next, top.index});
  return top.index;
}

std::vector<DrawResult> incremental_draws(std::span<const ClockedElement> selected,
                                          double horizon, std::uint64_t seed,
                                          const StopPredicate& stop) {
  IncrementalDrawer drawer(selected, horizon, seed);
  std::vector<DrawResult> out;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (auto next = drawer.peek(); next >= 0; next = drawer.peek()) {
    const auto& element = selected[static_cast<std::size_t>(next)];
    if (stop && stop(element, out)) break;
    std::size_t k = drawer.pop();
    auto [it, fresh] = slot.try_emplace(k, out.size());
    if (fresh) out.push_back({element.key, 0});
    ++out[it->second].draw_count;
  }
  return out;
}

}  // namespace abcde
