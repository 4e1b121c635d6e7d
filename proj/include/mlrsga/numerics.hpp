#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace mlrsga {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Partition of the joint strategy vector into per-player blocks.
/// Holds the player dimensions (d_1,...,d_h) and the derived offsets.
class BlockLayout {
 public:
  explicit BlockLayout(std::vector<int> dims);

  int players() const { return static_cast<int>(dims_.size()); }
  int total() const { return total_; }
  int dim(int i) const {
    check_player(i);
    return dims_[i];
  }
  int offset(int i) const {
    check_player(i);
    return offsets_[i];
  }
  const std::vector<int>& dims() const { return dims_; }

  void check_player(int i) const;

  bool operator==(const BlockLayout& other) const { return dims_ == other.dims_; }
  bool operator!=(const BlockLayout& other) const { return !(*this == other); }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Thrown when power iteration fails to certify the requested accuracy.
class SpectralNormError : public std::runtime_error {
 public:
  SpectralNormError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate(last_estimate) {}

  double last_estimate;
};

/// Largest singular value, by power iteration on the Gram matrix with a fixed
/// seeded start vector. Guarantees |result - ||m||_2| <= tol * max(1, ||m||_2)
/// on success; throws SpectralNormError (carrying the last estimate) if the
/// residual test does not pass within max_iter iterations.
double spectral_norm(const Matrix& m, double tol = 1e-10, int max_iter = 10000);

/// Submatrix at block position (i, j). When m has layout.total() rows the row
/// range is block i; a rectangular m (fewer rows) keeps all its rows, as for
/// the block columns of a per-player Jacobian approximation.
Matrix block_get(const Matrix& m, const BlockLayout& layout, int i, int j);

/// d x d matrix with the given blocks placed at layout offsets; missing
/// blocks are zero. Throws on a shape mismatch, naming the offending (i, j).
Matrix assemble_block_matrix(const BlockLayout& layout,
                             const std::map<std::pair<int, int>, Matrix>& blocks);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// Deterministic uniform draws from raw mt19937_64 bits, so that seeded
// sequences are identical across standard library implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal draw (Box-Muller on the deterministic uniforms above).
double normal_unit(std::mt19937_64& rng);

}  // namespace mlrsga
