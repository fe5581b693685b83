#include "hausloss/grid.hpp"

#include <algorithm>
#include <sstream>

namespace hausloss {

GridSpec::GridSpec(std::vector<Index> shape, std::vector<double> spacing)
    : shape_(std::move(shape)), spacing_(std::move(spacing)) {
  require(shape_.size() == 2 || shape_.size() == 3, ErrorCode::InvalidArgument,
          "grid rank must be 2 or 3");
  if (spacing_.empty()) spacing_.assign(shape_.size(), 1.0);
  require(spacing_.size() == shape_.size(), ErrorCode::InvalidArgument,
          "spacing must have one entry per axis");
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    require(shape_[a] >= 1, ErrorCode::InvalidArgument, "every extent must be >= 1");
    require(std::isfinite(spacing_[a]) && spacing_[a] > 0.0, ErrorCode::InvalidArgument,
            "every spacing must be > 0");
  }
  const std::size_t lead = 3 - shape_.size();
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    extents3_[lead + a] = shape_[a];
    spacing3_[lead + a] = spacing_[a];
  }
  strides3_[2] = 1;
  strides3_[1] = extents3_[2];
  strides3_[0] = extents3_[1] * extents3_[2];
  size_ = extents3_[0] * extents3_[1] * extents3_[2];
}

Coord GridSpec::padded(std::span<const Index> c) const {
  require(c.size() == shape_.size(), ErrorCode::InvalidArgument,
          "coordinate length does not match grid rank");
  Coord out{0, 0, 0};
  const std::size_t lead = 3 - shape_.size();
  for (std::size_t a = 0; a < c.size(); ++a) out[lead + a] = c[a];
  return out;
}

std::vector<Index> GridSpec::unpadded(const Coord& c) const {
  const std::size_t lead = 3 - shape_.size();
  return std::vector<Index>(c.begin() + static_cast<std::ptrdiff_t>(lead), c.end());
}

double GridSpec::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

bool GridSpec::isotropic() const {
  return std::all_of(spacing_.begin(), spacing_.end(),
                     [&](double s) { return s == spacing_.front(); });
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "grid ";
  for (std::size_t a = 0; a < shape_.size(); ++a) os << (a ? "x" : "") << shape_[a];
  os << " spacing ";
  for (std::size_t a = 0; a < spacing_.size(); ++a) os << (a ? "x" : "") << spacing_[a];
  return os.str();
}

void require_same_spec(const GridSpec& a, const GridSpec& b) {
  require(a == b, ErrorCode::ShapeMismatch,
          "grid mismatch: " + a.describe() + " vs " + b.describe());
}

BinaryMask::BinaryMask(Grid<std::uint8_t> grid) : grid_(std::move(grid)) {
  require((grid_.values() <= 1).all(), ErrorCode::InvalidArgument,
          "binary mask values must be 0 or 1");
}

BinaryMask BinaryMask::from_sites(const GridSpec& spec, std::span<const Index> sites) {
  Grid<std::uint8_t> g(spec, 0);
  for (Index s : sites) {
    require(s >= 0 && s < spec.size(), ErrorCode::InvalidArgument, "site outside grid");
    g[s] = 1;
  }
  return BinaryMask(std::move(g));
}

Index BinaryMask::count() const {
  return values().template cast<Index>().sum();
}

std::vector<Index> BinaryMask::foreground_sites() const {
  std::vector<Index> out;
  const auto& v = values();
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i]) out.push_back(i);
  }
  return out;
}

BoundarySet::BoundarySet(GridSpec spec, std::vector<Index> sites)
    : spec_(std::move(spec)), sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  require(std::adjacent_find(sites_.begin(), sites_.end()) == sites_.end(),
          ErrorCode::InvalidArgument, "boundary set contains duplicate sites");
  require(sites_.empty() || (sites_.front() >= 0 && sites_.back() < spec_.size()),
          ErrorCode::InvalidArgument, "boundary site outside grid");
}

BoundarySet BoundarySet::from_coords(const GridSpec& spec,
                                     const std::vector<std::vector<Index>>& coords) {
  std::vector<Index> sites;
  sites.reserve(coords.size());
  for (const auto& c : coords) {
    const Coord p = spec.padded(c);
    require(spec.contains(p), ErrorCode::InvalidArgument, "coordinate outside grid");
    sites.push_back(spec.linear(p));
  }
  return BoundarySet(spec, std::move(sites));
}

std::vector<Coord> BoundarySet::coordinates() const {
  std::vector<Coord> out;
  out.reserve(sites_.size());
  for (Index s : sites_) out.push_back(spec_.coord(s));
  return out;
}

std::vector<Coord> face_offsets(int rank) {
  std::vector<Coord> out{{0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  if (rank == 3) {
    out.push_back({-1, 0, 0});
    out.push_back({1, 0, 0});
  }
  return out;
}

BoundarySet boundary(const BinaryMask& mask) {
  const GridSpec& spec = mask.spec();
  require(mask.any(), ErrorCode::EmptyMask, "boundary of a mask without foreground");
  const auto offsets = face_offsets(spec.rank());
  std::vector<Index> sites;
  for (Index i = 0; i < spec.size(); ++i) {
    if (!mask[i]) continue;
    const Coord c = spec.coord(i);
    for (const Coord& o : offsets) {
      const Coord n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      if (!spec.contains(n) || !mask.at(n)) {
        sites.push_back(i);
        break;
      }
    }
  }
  return BoundarySet(spec, std::move(sites));
}

BinaryMask symmetric_difference(const BinaryMask& a, const BinaryMask& b) {
  require_same_spec(a.spec(), b.spec());
  return BinaryMask(a.spec(), (a.values() != b.values()).cast<std::uint8_t>().eval());
}

BinaryMask complement(const BinaryMask& a) {
  return BinaryMask(a.spec(), (1 - a.values()).eval());
}

BinaryMask set_difference(const BinaryMask& a, const BinaryMask& b) {
  require_same_spec(a.spec(), b.spec());
  return BinaryMask(a.spec(), (a.values() * (1 - b.values())).eval());
}

BinaryMask intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_spec(a.spec(), b.spec());
  return BinaryMask(a.spec(), (a.values() * b.values()).eval());
}

}  // namespace hausloss
