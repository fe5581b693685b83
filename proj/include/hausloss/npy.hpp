#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hausloss/grid.hpp"

namespace hausloss::npy {

/// Element types understood by the reader; the writer emits U8 and F4/F8.
enum class Dtype { Bool, U8, I32, I64, F4, F8 };

std::string_view descr(Dtype dtype);

/// Decoded array, values widened to double, C order.
struct Array {
  std::vector<Index> shape;
  Dtype dtype = Dtype::F8;
  std::vector<double> values;
};

/// NPY format version 1.0, little-endian, C order.
std::string encode(const std::vector<Index>& shape, Dtype dtype, std::span<const double> values);
Array decode(std::string_view bytes);

Array read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const std::vector<Index>& shape, Dtype dtype,
           std::span<const double> values);

void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_field(const std::filesystem::path& path, const Grid<double>& field, Dtype dtype = Dtype::F4);

/// Interprets an array on a grid with the given spacing (empty = unit).
GridSpec spec_of(const Array& array, std::vector<double> spacing = {});

}  // namespace hausloss::npy
