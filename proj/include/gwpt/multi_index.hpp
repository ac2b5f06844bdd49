#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwpt {

using MultiIndex = std::vector<int>;

enum class IndexNorm { linf, l1 };

std::string to_string(IndexNorm norm);
IndexNorm index_norm_from_string(const std::string& s);

/// Truncation set K of basis multi-indices: the l-infinity ball {|k|_inf <= n}
/// or the l1 ball {|k|_1 <= n} in N^d.
///
/// Indices are stored in graded-lexicographic order (by |k|_1, ties broken
/// lexicographically), so position 0 is always the ground index and every
/// k - e_j precedes k. Coefficient vectors and basis rows follow this order.
class MultiIndexSet {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  MultiIndexSet(int dim, int n, IndexNorm norm);

  int dim() const { return dim_; }
  int order() const { return n_; }
  IndexNorm norm() const { return norm_; }
  std::size_t size() const { return indices_.size(); }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }

  std::optional<std::size_t> find(const MultiIndex& k) const;

  /// Position of k - e_j, or npos when k_j == 0 or the index is absent.
  std::size_t lower(std::size_t pos, int j) const { return lower_[pos * dim_ + j]; }
  /// Position of k + e_j, or npos when outside the set.
  std::size_t raise(std::size_t pos, int j) const { return raise_[pos * dim_ + j]; }

  bool contains(const MultiIndex& k) const;

 private:
  int dim_;
  int n_;
  IndexNorm norm_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
  std::vector<std::size_t> lower_;
  std::vector<std::size_t> raise_;
};

/// Graded-lex strict ordering used by MultiIndexSet.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

}  // namespace gwpt
