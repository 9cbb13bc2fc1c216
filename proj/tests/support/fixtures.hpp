#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "abcde/dataset.hpp"
#include "support/oracle.hpp"

namespace fixtures {

// Items a,b,c,d with weights 1,2,3,4; Base = {a,b},{c,d}; Exp = {a},{b,c,d}.
oracle::Population fixture_f();
// a≡b and c≡d, nothing else (besides reflexivity).
oracle::Equivalence fixture_f_oracle();

struct RandomSpec {
  std::size_t max_items = 50;
  std::size_t max_clusters = 8;
  double min_weight = 0.1;
  double max_weight = 10.0;
};

oracle::Population random_population(std::mt19937_64& rng, const RandomSpec& spec = {});

// Items grouped by a hidden "truth" label; two items are equivalent iff they
// share it. The truth is a coarsening/refinement mix of Base and Exp so that
// both good and bad splits and merges occur.
struct Synthetic {
  oracle::Population population;
  std::vector<std::string> truth;  // parallel to population
  oracle::Equivalence equivalence() const;
};

// n items, Base in `base_clusters` equal-sized clusters; Exp moves, splits and
// merges pieces at random.
Synthetic synthetic(std::mt19937_64& rng, std::size_t n, std::size_t base_clusters);

std::vector<abcde::ItemRecord> to_records(const oracle::Population& pop);
// Attributes: "group" (red/green/blue by position), "size" (0..6), "flag".
abcde::Dataset to_dataset(const oracle::Population& pop);

}  // namespace fixtures
