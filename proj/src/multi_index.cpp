#include "gwpt/multi_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gwpt {

std::string to_string(IndexNorm norm) { return norm == IndexNorm::linf ? "linf" : "l1"; }

IndexNorm index_norm_from_string(const std::string& s)
{
  if (s == "linf" || s == "inf") return IndexNorm::linf;
  if (s == "l1" || s == "1") return IndexNorm::l1;
  throw std::invalid_argument("unknown index norm '" + s + "' (expected linf or l1)");
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b)
{
  const int sa = std::accumulate(a.begin(), a.end(), 0);
  const int sb = std::accumulate(b.begin(), b.end(), 0);
  if (sa != sb) return sa < sb;
  return a < b;
}

MultiIndexSet::MultiIndexSet(int dim, int n, IndexNorm norm) : dim_(dim), n_(n), norm_(norm)
{
  if (dim < 1) throw std::invalid_argument("MultiIndexSet: dim must be >= 1");
  if (n < 0) throw std::invalid_argument("MultiIndexSet: n must be >= 0");

  // Odometer over the box [0, n]^d, filtered by the chosen norm.
  MultiIndex k(dim, 0);
  while (true) {
    const int sum = std::accumulate(k.begin(), k.end(), 0);
    if (norm == IndexNorm::linf || sum <= n) indices_.push_back(k);
    int j = dim - 1;
    while (j >= 0 && k[j] == n) {
      k[j] = 0;
      --j;
    }
    if (j < 0) break;
    ++k[j];
  }
  std::sort(indices_.begin(), indices_.end(), graded_lex_less);

  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(indices_[i], i);

  lower_.assign(indices_.size() * dim_, npos);
  raise_.assign(indices_.size() * dim_, npos);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    for (int j = 0; j < dim_; ++j) {
      MultiIndex m = indices_[i];
      if (m[j] > 0) {
        --m[j];
        if (auto p = find(m)) lower_[i * dim_ + j] = *p;
        ++m[j];
      }
      ++m[j];
      if (auto p = find(m)) raise_[i * dim_ + j] = *p;
    }
  }
}

std::optional<std::size_t> MultiIndexSet::find(const MultiIndex& k) const
{
  auto it = lookup_.find(k);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool MultiIndexSet::contains(const MultiIndex& k) const { return lookup_.count(k) != 0; }

}  // namespace gwpt
