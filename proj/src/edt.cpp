#include "hausloss/edt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hausloss {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EnvelopeScratch {
  std::vector<double> line;
  std::vector<Index> vertex;
  std::vector<double> cut;

  explicit EnvelopeScratch(Index n)
      : line(static_cast<std::size_t>(n)),
        vertex(static_cast<std::size_t>(n)),
        cut(static_cast<std::size_t>(n) + 1) {}
};

// Lower envelope of the parabolas w*(x - q)^2 + f[q] over the finite samples
// of one lattice line; writes the envelope back into `data` at stride.
void envelope_1d(double* data, Index n, Index stride, double weight, EnvelopeScratch& s) {
  for (Index i = 0; i < n; ++i) s.line[i] = data[i * stride];

  Index k = -1;
  for (Index q = 0; q < n; ++q) {
    const double fq = s.line[q];
    if (!std::isfinite(fq)) continue;
    if (k < 0) {
      k = 0;
      s.vertex[0] = q;
      s.cut[0] = -kInf;
      s.cut[1] = kInf;
      continue;
    }
    const double hq = fq + weight * static_cast<double>(q * q);
    double x = 0.0;
    while (true) {
      const Index v = s.vertex[k];
      const double hv = s.line[v] + weight * static_cast<double>(v * v);
      x = (hq - hv) / (2.0 * weight * static_cast<double>(q - v));
      if (x <= s.cut[k]) {
        --k;  // cut[0] is -inf, so k never drops below zero here
      } else {
        break;
      }
    }
    ++k;
    s.vertex[k] = q;
    s.cut[k] = x;
    s.cut[k + 1] = kInf;
  }

  if (k < 0) {
    for (Index i = 0; i < n; ++i) data[i * stride] = kInf;
    return;
  }
  k = 0;
  for (Index q = 0; q < n; ++q) {
    while (s.cut[k + 1] < static_cast<double>(q)) ++k;
    const Index v = s.vertex[k];
    const double dx = static_cast<double>(q - v);
    data[q * stride] = weight * dx * dx + s.line[v];
  }
}

}  // namespace

Grid<double> squared_edt(const GridSpec& spec, std::span<const Index> sources) {
  Grid<double> out(spec, kInf);
  for (Index s : sources) {
    require(s >= 0 && s < spec.size(), ErrorCode::InvalidArgument, "source site outside grid");
    out[s] = 0.0;
  }
  if (sources.empty()) return out;

  const auto& ext = spec.extents3();
  const auto& str = spec.strides3();
  const auto& sp = spec.spacing3();
  double* data = out.values().data();

  for (int axis = 0; axis < 3; ++axis) {
    const Index n = ext[axis];
    if (n == 1) continue;
    EnvelopeScratch scratch(n);
    const double weight = sp[axis] * sp[axis];
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (Index i = 0; i < ext[a1]; ++i) {
      for (Index j = 0; j < ext[a2]; ++j) {
        envelope_1d(data + i * str[a1] + j * str[a2], n, str[axis], weight, scratch);
      }
    }
  }
  return out;
}

DistanceMap edt_to_set(const GridSpec& spec, const BoundarySet& sources) {
  require(!sources.empty(), ErrorCode::EmptySourceSet, "distance transform needs a source site");
  require(spec.same_shape(sources.spec()), ErrorCode::ShapeMismatch,
          "source set lives on a different grid");
  Grid<double> d = squared_edt(spec, sources.sites());
  d.values() = d.values().sqrt();
  return DistanceMap(std::move(d), DistanceMap::Source::Sites);
}

DistanceMap boundary_dt(const BinaryMask& mask) {
  const BoundarySet edge = boundary(mask);
  Grid<double> d = squared_edt(mask.spec(), edge.sites());
  d.values() = d.values().sqrt();
  return DistanceMap(std::move(d), DistanceMap::Source::Boundary);
}

DistanceMap foreground_dt(const BinaryMask& mask) {
  const auto sites = mask.foreground_sites();
  require(!sites.empty(), ErrorCode::EmptyMask, "distance to an empty foreground");
  Grid<double> d = squared_edt(mask.spec(), sites);
  d.values() = d.values().sqrt();
  return DistanceMap(std::move(d), DistanceMap::Source::Foreground);
}

DistanceMap background_dt(const BinaryMask& mask) {
  // Embed in a grid padded by one background layer on every real axis.
  const GridSpec& spec = mask.spec();
  std::vector<Index> padded_shape = spec.shape();
  for (auto& e : padded_shape) e += 2;
  const GridSpec padded(padded_shape, spec.spacing());
  const Index lead = 3 - spec.rank();

  std::vector<Index> sources;
  for (Index i = 0; i < padded.size(); ++i) {
    Coord c = padded.coord(i);
    bool inside = true;
    for (int a = static_cast<int>(lead); a < 3; ++a) {
      c[a] -= 1;
      inside = inside && c[a] >= 0 && c[a] < spec.extents3()[a];
    }
    if (!inside || !mask.at(c)) sources.push_back(i);
  }
  const Grid<double> full = squared_edt(padded, sources);

  Grid<double> d(spec, 0.0);
  for (Index i = 0; i < spec.size(); ++i) {
    Coord c = spec.coord(i);
    for (int a = static_cast<int>(lead); a < 3; ++a) c[a] += 1;
    d[i] = std::sqrt(full.at(c));
  }
  return DistanceMap(std::move(d), DistanceMap::Source::Background);
}

}  // namespace hausloss
