#include "mlrsga/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mlrsga {

namespace {

// Start-vector seed for the power iteration; fixed so results are reproducible.
constexpr std::uint64_t kSpectralNormSeed = 0x9e3779b97f4a7c15ull;

}  // namespace

BlockLayout::BlockLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("BlockLayout: needs at least one player");
  offsets_.reserve(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) {
      std::ostringstream os;
      os << "BlockLayout: player dimension " << i << " must be >= 1, got " << dims_[i];
      throw std::invalid_argument(os.str());
    }
    offsets_.push_back(total_);
    total_ += dims_[i];
  }
}

void BlockLayout::check_player(int i) const {
  if (i < 0 || i >= players()) {
    std::ostringstream os;
    os << "BlockLayout: player index " << i << " out of range [0, " << players() << ")";
    throw std::out_of_range(os.str());
  }
}

double spectral_norm(const Matrix& m, double tol, int max_iter) {
  if (m.size() == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("spectral_norm: max_iter must be >= 1");

  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (!std::isfinite(scale)) throw std::invalid_argument("spectral_norm: non-finite entries");

  // Work on the smaller Gram matrix of the rescaled input. After rescaling,
  // the top eigenvalue of b is >= 1, so the residual test below is
  // scale-invariant.
  const Matrix mh = m / scale;
  const Matrix b = (mh.rows() <= mh.cols()) ? Matrix(mh * mh.transpose())
                                            : Matrix(mh.transpose() * mh);
  const Eigen::Index n = b.rows();

  std::mt19937_64 rng(kSpectralNormSeed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform_range(rng, -1.0, 1.0);
  v.normalize();

  double theta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector bv = b * v;
    theta = v.dot(bv);
    // theta within tol*theta of an eigenvalue certifies the singular value to
    // relative accuracy tol/2 once the iterate has settled near the top space.
    if ((bv - theta * v).norm() <= tol * theta) {
      return scale * std::sqrt(std::max(theta, 0.0));
    }
    const double nb = bv.norm();
    if (nb == 0.0) return 0.0;
    v = bv / nb;
  }
  const double estimate = scale * std::sqrt(std::max(theta, 0.0));
  std::ostringstream os;
  os << "spectral_norm: no convergence within " << max_iter
     << " iterations (last estimate " << estimate << ")";
  throw SpectralNormError(os.str(), estimate);
}

Matrix block_get(const Matrix& m, const BlockLayout& layout, int i, int j) {
  layout.check_player(i);
  layout.check_player(j);
  if (m.cols() != layout.total()) {
    std::ostringstream os;
    os << "block_get: matrix has " << m.cols() << " columns, layout expects " << layout.total();
    throw std::invalid_argument(os.str());
  }
  const int c0 = layout.offset(j);
  const int nc = layout.dim(j);
  if (m.rows() == layout.total()) {
    return m.block(layout.offset(i), c0, layout.dim(i), nc);
  }
  return m.middleCols(c0, nc);
}

Matrix assemble_block_matrix(const BlockLayout& layout,
                             const std::map<std::pair<int, int>, Matrix>& blocks) {
  Matrix out = Matrix::Zero(layout.total(), layout.total());
  for (const auto& [pos, blk] : blocks) {
    const auto [i, j] = pos;
    layout.check_player(i);
    layout.check_player(j);
    if (blk.rows() != layout.dim(i) || blk.cols() != layout.dim(j)) {
      std::ostringstream os;
      os << "assemble_block_matrix: block (" << i << ", " << j << ") has shape " << blk.rows()
         << "x" << blk.cols() << ", expected " << layout.dim(i) << "x" << layout.dim(j);
      throw std::invalid_argument(os.str());
    }
    out.block(layout.offset(i), layout.offset(j), blk.rows(), blk.cols()) = blk;
  }
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool all_finite(const Vector& v) { return v.allFinite(); }

double normal_unit(std::mt19937_64& rng) {
  // Box-Muller; u1 shifted away from zero so the log stays finite.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mlrsga
