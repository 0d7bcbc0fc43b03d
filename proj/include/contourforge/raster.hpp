#pragma once
// Grid data model and ingestion (PGM images, CSV simulation fields).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

namespace contourforge {

/// A named scalar layer with the same dimensions as the primary field.
struct AuxField {
  std::string name;
  std::vector<double> values;
};

/// Rectangular raster of scalar values, row-major with row 0 at the bottom.
class Grid {
 public:
  Grid() = default;

  Grid(std::int32_t width, std::int32_t height, std::vector<double> values,
       std::string name = "value")
      : width_(width), height_(height), name_(std::move(name)), values_(std::move(values)) {
    if (width_ < 1 || height_ < 1)
      throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
      throw Error(ErrorCode::FieldDimensionMismatch, "value count does not match width*height");
  }

  std::int32_t width() const noexcept { return width_; }
  std::int32_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::string& name() const noexcept { return name_; }

  bool contains(std::int32_t col, std::int32_t row) const noexcept {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  bool contains(PixelCoord p) const noexcept { return contains(p.col, p.row); }

  std::size_t index(std::int32_t col, std::int32_t row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  double value(std::int32_t col, std::int32_t row) const { return values_[index(col, row)]; }
  double value(PixelCoord p) const { return value(p.col, p.row); }
  std::span<const double> values() const noexcept { return values_; }

  void add_aux_field(std::string name, std::vector<double> values) {
    if (values.size() != values_.size())
      throw Error(ErrorCode::FieldDimensionMismatch, "aux field '" + name + "' has wrong size");
    aux_.push_back({std::move(name), std::move(values)});
  }
  const std::vector<AuxField>& aux_fields() const noexcept { return aux_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.width_ != b.width_ || a.height_ != b.height_ || a.values_ != b.values_) return false;
    if (a.aux_.size() != b.aux_.size()) return false;
    for (std::size_t i = 0; i < a.aux_.size(); ++i)
      if (a.aux_[i].name != b.aux_[i].name || a.aux_[i].values != b.aux_[i].values) return false;
    return true;
  }

 private:
  std::int32_t width_ = 0;
  std::int32_t height_ = 0;
  std::string name_ = "value";
  std::vector<double> values_;
  std::vector<AuxField> aux_;
};

/// Boolean selection per cell; out-of-range queries read as unselected.
class SelectionMask {
 public:
  SelectionMask() = default;
  SelectionMask(std::int32_t width, std::int32_t height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

  std::int32_t width() const noexcept { return width_; }
  std::int32_t height() const noexcept { return height_; }

  bool operator()(std::int32_t col, std::int32_t row) const noexcept {
    if (col < 0 || row < 0 || col >= width_ || row >= height_) return false;
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(std::int32_t col, std::int32_t row, bool on = true) {
    bits_[static_cast<std::size_t>(row) * width_ + col] = on ? 1 : 0;
  }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;

 private:
  std::int32_t width_ = 0;
  std::int32_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Cells with lo <= value <= hi (both bounds inclusive).
inline SelectionMask threshold_select(const Grid& grid, double lo, double hi) {
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "threshold range requires lo <= hi");
  SelectionMask mask(grid.width(), grid.height());
  for (std::int32_t r = 0; r < grid.height(); ++r)
    for (std::int32_t c = 0; c < grid.width(); ++c) {
      const double v = grid.value(c, r);
      if (lo <= v && v <= hi) mask.set(c, r);
    }
  return mask;
}

namespace detail {

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool read_uint(std::uint32_t& out) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 0xFFFFFFFFull) return false;
      ++pos_;
    }
    if (pos_ == start) return false;
    out = static_cast<std::uint32_t>(v);
    return true;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - std::min(pos_, bytes_.size()); }
  std::uint8_t byte(std::size_t i) const { return bytes_[i]; }
  bool is_space_at_pos() const {
    if (at_end()) return false;
    const char c = static_cast<char>(bytes_[pos_]);
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a plain (P2) or raw (P5) PGM stream. Rows are flipped so that the
/// visually lowest image row becomes grid row 0.
inline Grid load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw Error(ErrorCode::UnsupportedMagic, "not a PNM stream");
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '5')
    throw Error(ErrorCode::UnsupportedMagic, std::string("unsupported PNM magic P") + kind);

  detail::PgmReader in(bytes);
  in.advance(2);
  if (!in.is_space_at_pos() && !in.at_end() && static_cast<char>(bytes[2]) != '#')
    throw Error(ErrorCode::MalformedHeader, "missing whitespace after magic");
  std::uint32_t width = 0, height = 0, maxval = 0;
  if (!in.read_uint(width) || !in.read_uint(height) || !in.read_uint(maxval))
    throw Error(ErrorCode::MalformedHeader, "expected width, height and maxval");
  if (width == 0 || height == 0 || width > (1u << 30) / std::max(height, 1u))
    throw Error(ErrorCode::MalformedHeader, "invalid image dimensions");
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::MalformedHeader, "maxval out of range");

  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> raw(n);
  if (kind == '2') {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t v = 0;
      in.skip_space_and_comments();
      if (in.at_end()) throw Error(ErrorCode::TruncatedData, "pixel data ends early");
      if (!in.read_uint(v)) throw Error(ErrorCode::MalformedHeader, "non-numeric pixel value");
      if (v > maxval) throw Error(ErrorCode::MalformedHeader, "pixel value exceeds maxval");
      raw[i] = v;
    }
  } else {
    // Exactly one whitespace byte separates the header from the raster.
    if (!in.is_space_at_pos()) throw Error(ErrorCode::MalformedHeader, "missing raster separator");
    in.advance(1);
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (in.remaining() < n * bpp) throw Error(ErrorCode::TruncatedData, "pixel data ends early");
    const std::size_t base = in.pos();
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t v = bpp == 1 ? in.byte(base + i)
                                 : (std::uint32_t{in.byte(base + 2 * i)} << 8) |
                                       in.byte(base + 2 * i + 1);
      if (v > maxval) throw Error(ErrorCode::MalformedHeader, "pixel value exceeds maxval");
      raw[i] = v;
    }
  }

  std::vector<double> values(n);
  for (std::uint32_t r = 0; r < height; ++r)
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(r) * width, width,
                values.begin() + static_cast<std::ptrdiff_t>(height - 1 - r) * width);
  return Grid(static_cast<std::int32_t>(width), static_cast<std::int32_t>(height),
              std::move(values), "gray");
}

inline Grid load_pgm(std::string_view bytes) {
  return load_pgm(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

/// Writes a raw (P5) PGM. Values are rounded and clamped to [0, maxval].
inline std::string save_pgm(const Grid& grid, std::uint32_t maxval = 255) {
  std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                    "\n" + std::to_string(maxval) + "\n";
  const bool wide = maxval > 255;
  for (std::int32_t r = grid.height() - 1; r >= 0; --r)
    for (std::int32_t c = 0; c < grid.width(); ++c) {
      const double clamped = std::clamp(grid.value(c, r), 0.0, static_cast<double>(maxval));
      const auto v = static_cast<std::uint32_t>(clamped + 0.5);
      if (wide) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xFF));
    }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvTable {
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<double> values;  // file order: first line first
};

inline CsvTable parse_csv_table(std::string_view text, std::string_view field) {
  CsvTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) {
      // Only trailing blank lines are tolerated.
      if (trim(text).empty()) break;
      throw Error(ErrorCode::RaggedRows,
                  std::string(field) + ": empty row at line " + std::to_string(line_no));
    }
    std::int32_t cols = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      const std::string_view cell = trim(line.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::NonNumericCell, std::string(field) + ": non-numeric cell '" +
                                                   std::string(cell) + "' at line " +
                                                   std::to_string(line_no));
      table.values.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (table.height == 0) table.width = cols;
    else if (cols != table.width)
      throw Error(ErrorCode::RaggedRows, std::string(field) + ": line " + std::to_string(line_no) +
                                             " has " + std::to_string(cols) + " cells, expected " +
                                             std::to_string(table.width));
    ++table.height;
  }
  if (table.height == 0) throw Error(ErrorCode::RaggedRows, std::string(field) + ": no rows");
  return table;
}

}  // namespace detail

/// One CSV table per field. The first field becomes the primary values, the rest
/// become aux fields. File line 0 maps to grid row 0 (no flip): simulation
/// histories put the origin at the lower-left cell.
inline Grid load_csv_grid(std::span<const std::string_view> texts,
                          std::span<const std::string> field_names) {
  if (texts.empty() || texts.size() != field_names.size())
    throw Error(ErrorCode::InvalidArgument, "need one field name per CSV table");
  auto primary = detail::parse_csv_table(texts[0], field_names[0]);
  Grid grid(primary.width, primary.height, std::move(primary.values), field_names[0]);
  for (std::size_t i = 1; i < texts.size(); ++i) {
    auto t = detail::parse_csv_table(texts[i], field_names[i]);
    if (t.width != grid.width() || t.height != grid.height())
      throw Error(ErrorCode::FieldDimensionMismatch,
                  "field '" + field_names[i] + "' is " + std::to_string(t.width) + "x" +
                      std::to_string(t.height) + ", expected " + std::to_string(grid.width()) +
                      "x" + std::to_string(grid.height()));
    grid.add_aux_field(field_names[i], std::move(t.values));
  }
  return grid;
}

inline Grid load_csv_grid(std::string_view text, const std::string& field_name = "value") {
  const std::string_view texts[] = {text};
  const std::string names[] = {field_name};
  return load_csv_grid(texts, names);
}

}  // namespace contourforge
