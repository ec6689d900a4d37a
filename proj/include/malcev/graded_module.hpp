#pragma once

#include <map>
#include <string>
#include <vector>

namespace malcev {

// Finite-type graded Q-vector space with a named basis per degree.
struct GradedModule {
  std::map<int, std::vector<std::string>> basis;

  size_t dim(int n) const {
    auto it = basis.find(n);
    return it == basis.end() ? 0 : it->second.size();
  }
  size_t total_dim() const {
    size_t t = 0;
    for (const auto& [n, v] : basis) t += v.size();
    return t;
  }
};

}  // namespace malcev
