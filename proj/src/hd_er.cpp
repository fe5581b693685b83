#include "hausloss/hd_er.hpp"

#include <algorithm>
#include <numeric>

namespace hausloss {

StructuringElement::StructuringElement(int rank, std::vector<Coord> offsets, std::vector<double> weights)
    : rank_(rank), offsets_(std::move(offsets)), weights_(std::move(weights)) {
  require(rank_ == 2 || rank_ == 3, ErrorCode::InvalidArgument, "structuring element rank must be 2 or 3");
  require(offsets_.size() == weights_.size(), ErrorCode::InvalidArgument,
          "structuring element needs one weight per offset");
  require(std::find(offsets_.begin(), offsets_.end(), Coord{0, 0, 0}) != offsets_.end(),
          ErrorCode::InvalidArgument, "structuring element footprint must contain the centre");
  for (const Coord& o : offsets_) {
    require(rank_ == 3 || o[0] == 0, ErrorCode::InvalidArgument, "2D element with a 3D offset");
  }
  require(std::all_of(weights_.begin(), weights_.end(), [](double w) { return w >= 0.0; }),
          ErrorCode::InvalidArgument, "structuring element weights must be nonnegative");
}

StructuringElement StructuringElement::cross(int rank) {
  std::vector<Coord> offsets{{0, 0, 0}};
  const auto faces = face_offsets(rank);
  offsets.insert(offsets.end(), faces.begin(), faces.end());
  const double w = 1.0 / static_cast<double>(offsets.size());
  return StructuringElement(rank, offsets, std::vector<double>(offsets.size(), w));
}

StructuringElement StructuringElement::reflected() const {
  std::vector<Coord> flipped;
  flipped.reserve(offsets_.size());
  for (const Coord& o : offsets_) flipped.push_back({-o[0], -o[1], -o[2]});
  return StructuringElement(rank_, std::move(flipped), weights_);
}

BinaryMask erode_binary(const BinaryMask& mask, const StructuringElement& elem) {
  const GridSpec& spec = mask.spec();
  require(elem.rank() == spec.rank(), ErrorCode::ShapeMismatch, "structuring element rank mismatch");
  Grid<std::uint8_t> out(spec, 0);
  for (Index i = 0; i < spec.size(); ++i) {
    if (!mask[i]) continue;
    const Coord c = spec.coord(i);
    bool keep = true;
    for (const Coord& o : elem.offsets()) {
      const Coord n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      if (!spec.contains(n) || !mask.at(n)) {
        keep = false;
        break;
      }
    }
    out[i] = keep ? 1 : 0;
  }
  return BinaryMask(std::move(out));
}

BinaryMask dilate_binary(const BinaryMask& mask, const StructuringElement& elem) {
  const GridSpec& spec = mask.spec();
  require(elem.rank() == spec.rank(), ErrorCode::ShapeMismatch, "structuring element rank mismatch");
  Grid<std::uint8_t> out(spec, 0);
  for (Index i = 0; i < spec.size(); ++i) {
    const Coord c = spec.coord(i);
    for (const Coord& o : elem.offsets()) {
      const Coord n{c[0] - o[0], c[1] - o[1], c[2] - o[2]};
      if (spec.contains(n) && mask.at(n)) {
        out[i] = 1;
        break;
      }
    }
  }
  return BinaryMask(std::move(out));
}

ErEstimate hd_er_estimate(const BinaryMask& p, const BinaryMask& q, const StructuringElement& elem, int k_cap) {
  require_same_spec(p.spec(), q.spec());
  const GridSpec& spec = p.spec();
  if (k_cap < 0) {
    const Index largest = *std::max_element(spec.shape().begin(), spec.shape().end());
    k_cap = static_cast<int>(std::max<Index>(1, largest / 2));
  }
  BinaryMask remaining = symmetric_difference(p, q);
  ErEstimate est;
  while (remaining.any()) {
    if (est.erosions == k_cap) {
      est.capped = true;
      break;
    }
    remaining = erode_binary(remaining, elem);
    ++est.erosions;
  }
  est.value = 2.0 * est.erosions * spec.min_spacing();
  return est;
}

ErEstimate hd_er_estimate(const BinaryMask& p, const BinaryMask& q, int k_cap) {
  return hd_er_estimate(p, q, StructuringElement::cross(p.spec().rank()), k_cap);
}

}  // namespace hausloss
