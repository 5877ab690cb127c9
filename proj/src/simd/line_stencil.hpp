#pragma once

// Shared line decomposition for the periodic Laplacian: the grid is walked
// as rows along the contiguous last axis, and each row sees its neighbour
// rows along the remaining axes.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace lifespan::simd::detail {

struct RowNeighbours {
  const double* center = nullptr;
  std::array<const double*, 2> up{};    // +1 along axes 0..dim-2
  std::array<const double*, 2> down{};  // -1 along axes 0..dim-2
  int axes = 0;                         // dim - 1
};

inline void check_grid(std::size_t size, int dim, int n) {
  if (dim < 1 || dim > 3 || n < 3) throw std::invalid_argument("laplacian: bad grid shape");
  std::size_t expect = 1;
  for (int d = 0; d < dim; ++d) expect *= static_cast<std::size_t>(n);
  if (size != expect) throw std::invalid_argument("laplacian: size does not match grid");
}

template <class RowFn>
void for_each_row(const double* u, int dim, int n, RowFn&& fn) {
  const std::size_t nn = static_cast<std::size_t>(n);
  std::size_t rows = 1;
  for (int d = 0; d + 1 < dim; ++d) rows *= nn;
  for (std::size_t row = 0; row < rows; ++row) {
    RowNeighbours nb;
    nb.center = u + row * nn;
    nb.axes = dim - 1;
    // Row coordinates (c_0, ..., c_{dim-2}); axis a has row-stride
    // n^(dim-2-a).
    std::size_t rem = row;
    std::array<std::size_t, 2> coord{};
    for (int a = dim - 2; a >= 0; --a) {
      coord[a] = rem % nn;
      rem /= nn;
    }
    std::size_t stride = 1;
    for (int a = dim - 2; a >= 0; --a) {
      const std::size_t c = coord[a];
      const std::size_t up_row = row - c * stride + ((c + 1) % nn) * stride;
      const std::size_t down_row = row - c * stride + ((c + nn - 1) % nn) * stride;
      nb.up[a] = u + up_row * nn;
      nb.down[a] = u + down_row * nn;
      stride *= nn;
    }
    fn(row, nb);
  }
}

/// Reference arithmetic for one grid point; both implementations use this
/// association order.
inline double stencil_point(const RowNeighbours& nb, double left, double right, std::size_t j,
                            double twice_dim, double inv_h2) {
  double s = left + right;
  for (int a = 0; a < nb.axes; ++a) {
    s += nb.up[a][j];
    s += nb.down[a][j];
  }
  return (s - twice_dim * nb.center[j]) * inv_h2;
}

}  // namespace lifespan::simd::detail
