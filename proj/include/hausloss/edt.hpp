#pragma once

#include <span>

#include "hausloss/grid.hpp"

namespace hausloss {

/// Exact Euclidean distance (in physical units) from every site to the
/// nearest site of a source set.
class DistanceMap {
 public:
  enum class Source { Sites, Boundary, Foreground, Background };

  DistanceMap(Grid<double> distances, Source source)
      : distances_(std::move(distances)), source_(source) {}

  const GridSpec& spec() const { return distances_.spec(); }
  const Grid<double>& grid() const { return distances_; }
  const Grid<double>::Array& values() const { return distances_.values(); }
  double operator[](Index i) const { return distances_[i]; }
  double at(const Coord& c) const { return distances_.at(c); }
  Source source() const { return source_; }

 private:
  Grid<double> distances_;
  Source source_;
};

/// Squared distances, +inf everywhere when `sources` is empty. Separable
/// lower-envelope-of-parabolas transform, one pass per axis.
Grid<double> squared_edt(const GridSpec& spec, std::span<const Index> sources);

DistanceMap edt_to_set(const GridSpec& spec, const BoundarySet& sources);

/// Unsigned distance to boundary(mask).
DistanceMap boundary_dt(const BinaryMask& mask);

/// Distance to the nearest foreground site (0 on the foreground).
DistanceMap foreground_dt(const BinaryMask& mask);

/// Distance to the nearest background site, where every site outside the
/// grid counts as background.
DistanceMap background_dt(const BinaryMask& mask);

}  // namespace hausloss
