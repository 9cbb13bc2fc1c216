#include "support/fixtures.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace fixtures {

oracle::Population fixture_f() {
  return {{"a", 1, "B1", "E1"}, {"b", 2, "B1", "E2"}, {"c", 3, "B2", "E2"}, {"d", 4, "B2", "E2"}};
}

oracle::Equivalence fixture_f_oracle() {
  return [](const std::string& x, const std::string& y) {
    auto cls = [](const std::string& s) { return s == "a" || s == "b" ? 0 : 1; };
    return cls(x) == cls(y);
  };
}

oracle::Population random_population(std::mt19937_64& rng, const RandomSpec& spec) {
  std::uniform_int_distribution<std::size_t> items(1, spec.max_items);
  std::uniform_int_distribution<std::size_t> clusters(1, spec.max_clusters);
  std::uniform_real_distribution<double> weight(spec.min_weight, spec.max_weight);
  std::size_t n = items(rng);
  std::uniform_int_distribution<std::size_t> pick_b(0, clusters(rng) - 1);
  std::uniform_int_distribution<std::size_t> pick_e(0, clusters(rng) - 1);
  oracle::Population pop;
  for (std::size_t k = 0; k < n; ++k) {
    pop.push_back({"i" + std::to_string(k), weight(rng), "b" + std::to_string(pick_b(rng)),
                   "e" + std::to_string(pick_e(rng))});
  }
  return pop;
}

oracle::Equivalence Synthetic::equivalence() const {
  auto label = std::make_shared<std::map<std::string, std::string>>();
  for (std::size_t k = 0; k < population.size(); ++k) (*label)[population[k].id] = truth[k];
  return [label](const std::string& x, const std::string& y) {
    return x == y || label->at(x) == label->at(y);
  };
}

Synthetic synthetic(std::mt19937_64& rng, std::size_t n, std::size_t base_clusters) {
  Synthetic s;
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const std::size_t per = std::max<std::size_t>(1, n / base_clusters);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t b = std::min(k / per, base_clusters - 1);
    // Each Base cluster holds two truth groups; Exp cuts at a random point
    // inside the cluster and occasionally merges a piece into the next cluster.
    std::size_t offset = k - b * per;
    std::string truth = "t" + std::to_string(b) + (offset < per / 2 ? "x" : "y");
    std::string exp;
    double r = coin(rng);
    if (r < 0.55) exp = "e" + std::to_string(b);
    else if (r < 0.8) exp = "e" + std::to_string(b) + "s";
    else exp = "e" + std::to_string((b + 1) % base_clusters);
    oracle::Item item{"i" + std::to_string(1000 + k), weight(rng), "b" + std::to_string(b), exp};
    s.population.push_back(item);
    s.truth.push_back(truth);
  }
  return s;
}

std::vector<abcde::ItemRecord> to_records(const oracle::Population& pop) {
  std::vector<abcde::ItemRecord> out;
  const char* groups[] = {"red", "green", "blue"};
  for (std::size_t k = 0; k < pop.size(); ++k) {
    abcde::ItemRecord r;
    r.item_id = pop[k].id;
    r.weight = pop[k].weight;
    r.base_cluster = pop[k].base;
    r.exp_cluster = pop[k].exp;
    r.attributes["group"] = std::string(groups[k % 3]);
    r.attributes["size"] = static_cast<double>(k % 7);
    r.attributes["flag"] = k % 2 == 0;
    out.push_back(std::move(r));
  }
  return out;
}

abcde::Dataset to_dataset(const oracle::Population& pop) {
  return abcde::Dataset::build(to_records(pop));
}

}  // namespace fixtures
