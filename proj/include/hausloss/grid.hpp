#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hausloss/error.hpp"

namespace hausloss {

using Index = Eigen::Index;

// Lattice coordinate padded to three axes (slowest first). Rank-2 grids use a
// leading axis of extent 1, so a 2D coordinate (i, j) is stored as {0, i, j}.
using Coord = std::array<Index, 3>;

/// Shape and physical spacing of a 2D or 3D lattice. Data is row-major: the
/// last axis varies fastest.
class GridSpec {
 public:
  GridSpec() : GridSpec({1, 1}) {}
  GridSpec(std::vector<Index> shape, std::vector<double> spacing = {});

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<Index>& shape() const { return shape_; }
  const std::vector<double>& spacing() const { return spacing_; }
  Index extent(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return size_; }

  const std::array<Index, 3>& extents3() const { return extents3_; }
  const std::array<double, 3>& spacing3() const { return spacing3_; }
  const std::array<Index, 3>& strides3() const { return strides3_; }

  Index linear(const Coord& c) const {
    return c[0] * strides3_[0] + c[1] * strides3_[1] + c[2];
  }
  Coord coord(Index linear) const {
    Coord c;
    c[0] = linear / strides3_[0];
    linear -= c[0] * strides3_[0];
    c[1] = linear / strides3_[1];
    c[2] = linear - c[1] * strides3_[1];
    return c;
  }
  bool contains(const Coord& c) const {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || c[a] >= extents3_[a]) return false;
    }
    return true;
  }

  /// Converts a rank-length coordinate into the padded representation.
  Coord padded(std::span<const Index> c) const;
  Coord padded(std::initializer_list<Index> c) const {
    return padded(std::span<const Index>(c.begin(), c.size()));
  }
  /// Inverse of padded(): drops the leading axis for rank-2 grids.
  std::vector<Index> unpadded(const Coord& c) const;

  double min_spacing() const;
  bool isotropic() const;
  GridSpec with_spacing(std::vector<double> spacing) const { return GridSpec(shape_, std::move(spacing)); }
  GridSpec with_unit_spacing() const { return GridSpec(shape_); }

  /// Same lattice; spacing is ignored.
  bool same_shape(const GridSpec& other) const { return shape_ == other.shape_; }
  bool operator==(const GridSpec& other) const {
    return shape_ == other.shape_ && spacing_ == other.spacing_;
  }

  std::string describe() const;

 private:
  std::vector<Index> shape_;
  std::vector<double> spacing_;
  std::array<Index, 3> extents3_{1, 1, 1};
  std::array<double, 3> spacing3_{1.0, 1.0, 1.0};
  std::array<Index, 3> strides3_{1, 1, 1};
  Index size_ = 1;
};

void require_same_spec(const GridSpec& a, const GridSpec& b);

/// Dense scalar field over a GridSpec, stored as an Eigen column array so
/// callers can write sitewise arithmetic as array expressions.
template <typename Scalar>
class Grid {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Grid() : Grid(GridSpec()) {}
  explicit Grid(GridSpec spec, Scalar fill = Scalar(0))
      : spec_(std::move(spec)), data_(Array::Constant(spec_.size(), fill)) {}

  Grid(GridSpec spec, Array data) : spec_(std::move(spec)), data_(std::move(data)) {
    require(data_.size() == spec_.size(), ErrorCode::ShapeMismatch,
            "grid data length " + std::to_string(data_.size()) + " does not match " +
                spec_.describe());
    if constexpr (std::is_floating_point_v<Scalar>) {
      require(data_.allFinite(), ErrorCode::InvalidArgument, "grid values must be finite");
    }
  }

  const GridSpec& spec() const { return spec_; }
  Index size() const { return data_.size(); }
  const Array& values() const { return data_; }
  Array& values() { return data_; }

  Scalar operator[](Index i) const { return data_[i]; }
  Scalar& operator[](Index i) { return data_[i]; }
  Scalar at(const Coord& c) const { return data_[spec_.linear(c)]; }
  Scalar& at(const Coord& c) { return data_[spec_.linear(c)]; }

  template <typename Other>
  Grid<Other> cast() const {
    return Grid<Other>(spec_, data_.template cast<Other>().eval());
  }

 private:
  GridSpec spec_;
  Array data_;
};

/// Grid with every value exactly 0 or 1.
class BinaryMask {
 public:
  using Array = Grid<std::uint8_t>::Array;

  explicit BinaryMask(Grid<std::uint8_t> grid);
  BinaryMask(GridSpec spec, Array data) : BinaryMask(Grid<std::uint8_t>(std::move(spec), std::move(data))) {}

  static BinaryMask zeros(const GridSpec& spec) { return BinaryMask(Grid<std::uint8_t>(spec, 0)); }
  static BinaryMask ones(const GridSpec& spec) { return BinaryMask(Grid<std::uint8_t>(spec, 1)); }
  /// Mask with exactly the listed linear sites set.
  static BinaryMask from_sites(const GridSpec& spec, std::span<const Index> sites);

  const GridSpec& spec() const { return grid_.spec(); }
  const Grid<std::uint8_t>& grid() const { return grid_; }
  const Array& values() const { return grid_.values(); }
  Index size() const { return grid_.size(); }
  bool operator[](Index i) const { return grid_[i] != 0; }
  bool at(const Coord& c) const { return grid_.at(c) != 0; }

  Index count() const;
  bool any() const { return count() > 0; }
  std::vector<Index> foreground_sites() const;

  /// Same values on the same lattice, with a different spacing.
  BinaryMask with_spacing(std::vector<double> spacing) const {
    return BinaryMask(spec().with_spacing(std::move(spacing)), values());
  }

  bool operator==(const BinaryMask& other) const {
    return spec() == other.spec() && (values() == other.values()).all();
  }

 private:
  Grid<std::uint8_t> grid_;
};

/// Grid with values in [0, 1].
template <typename Scalar>
class ProbMap {
 public:
  using Array = typename Grid<Scalar>::Array;

  explicit ProbMap(Grid<Scalar> grid) : grid_(std::move(grid)) {
    require((grid_.values() >= Scalar(0)).all() && (grid_.values() <= Scalar(1)).all(),
            ErrorCode::InvalidArgument, "probability map values must lie in [0, 1]");
  }
  ProbMap(GridSpec spec, Array data) : ProbMap(Grid<Scalar>(std::move(spec), std::move(data))) {}

  static ProbMap from_mask(const BinaryMask& mask) {
    return ProbMap(mask.spec(), mask.values().template cast<Scalar>().eval());
  }

  const GridSpec& spec() const { return grid_.spec(); }
  const Grid<Scalar>& grid() const { return grid_; }
  const Array& values() const { return grid_.values(); }
  Index size() const { return grid_.size(); }
  Scalar operator[](Index i) const { return grid_[i]; }

  /// Copy with one site replaced; used for finite-difference probes.
  ProbMap with_value(Index site, Scalar value) const {
    Array data = values();
    data[site] = value;
    return ProbMap(spec(), std::move(data));
  }

 private:
  Grid<Scalar> grid_;
};

/// Ordered set of lattice sites (stored as sorted linear indices).
class BoundarySet {
 public:
  BoundarySet(GridSpec spec, std::vector<Index> sites);

  /// Builds a set from rank-length coordinates.
  static BoundarySet from_coords(const GridSpec& spec,
                                 const std::vector<std::vector<Index>>& coords);

  const GridSpec& spec() const { return spec_; }
  const std::vector<Index>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  std::vector<Coord> coordinates() const;

  bool operator==(const BoundarySet& other) const {
    return spec_ == other.spec_ && sites_ == other.sites_;
  }

 private:
  GridSpec spec_;
  std::vector<Index> sites_;
};

template <typename Scalar>
BinaryMask threshold(const ProbMap<Scalar>& map, Scalar level = Scalar(0.5)) {
  require(level > Scalar(0) && level < Scalar(1), ErrorCode::InvalidArgument,
          "threshold level must lie in (0, 1)");
  return BinaryMask(map.spec(), (map.values() >= level).template cast<std::uint8_t>().eval());
}

/// Foreground sites with a face neighbour that is background or outside the grid.
BoundarySet boundary(const BinaryMask& mask);

BinaryMask symmetric_difference(const BinaryMask& a, const BinaryMask& b);
BinaryMask complement(const BinaryMask& a);
/// a \ b
BinaryMask set_difference(const BinaryMask& a, const BinaryMask& b);
BinaryMask intersection(const BinaryMask& a, const BinaryMask& b);

/// Face-neighbour offsets (4 in 2D, 6 in 3D) in padded coordinates.
std::vector<Coord> face_offsets(int rank);

}  // namespace hausloss
