#pragma once

// Naive reference implementations used to freeze expected values in tests.
// Nothing here includes the library: every quantity is computed straight from
// member sets with std::set and direct double loops.

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Item {
  std::string id;
  double weight = 1.0;
  std::string base;
  std::string exp;
};

using Population = std::vector<Item>;
using Equivalence = std::function<bool(const std::string&, const std::string&)>;

struct Triple {
  double split = 0;
  double merge = 0;
  double jd = 0;
};

std::set<std::string> base_cluster_of(const Population& pop, const std::string& id);
std::set<std::string> exp_cluster_of(const Population& pop, const std::string& id);
double weight_of(const Population& pop, const std::set<std::string>& ids);

Triple item_impact(const Population& pop, const std::string& id);
Triple set_impact(const Population& pop, const std::set<std::string>& ids);

// JaccardDistance(T) between two clusterings of the same weighted items, given
// as parallel cluster-label vectors.
double clustering_distance(const std::vector<double>& weights,
                           const std::vector<int>& left,
                           const std::vector<int>& right);

// Precision_Exp(T) - Precision_Base(T) straight from the per-item precision sums.
double delta_precision(const Population& pop, const Equivalence& eq);
double delta_precision_of_item(const Population& pop, const std::string& id,
                               const Equivalence& eq);
double delta_precision_of_set(const Population& pop, const std::set<std::string>& ids,
                              const Equivalence& eq);

struct Rates {
  double good_split = 0;
  double bad_split = 0;
  double good_merge = 0;
  double bad_merge = 0;
};
Rates rates(const Population& pop, const Equivalence& eq);

struct Pair {
  std::string i;
  std::string j;
  char category = 's';  // 's'plit, 'm'erge, 't' stable
  double u = 0;         // normalized by weight(T)
  int label = 0;
};
std::vector<Pair> all_pairs(const Population& pop);

}  // namespace oracle
