#pragma once
// Pipeline commands behind the `contourforge` executable.
//
// Each command turns a validated PipelineConfig into a set of in-memory
// artifacts (JSON, SVG, CSV). Nothing touches the output directory until every
// artifact has been produced, and then write_artifacts() stages and renames
// them. Argument parsing lives in the executable; this header only needs
// nlohmann_json on top of the library.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundary.hpp"
#include "cdt.hpp"
#include "closure.hpp"
#include "error.hpp"
#include "fohs.hpp"
#include "geometry.hpp"
#include "isofield.hpp"
#include "parallel.hpp"
#include "raster.hpp"
#include "shapeops.hpp"
#include "skeleton.hpp"

namespace contourforge::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitPipeline = 4;

using Json = nlohmann::ordered_json;

/// Bad flag values or combinations. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or malformed input, or an unwritable output directory. Exit code 3.
class IoError : public std::runtime_error {
 public:
  IoError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class Command { Extract, Skeleton, Partition, Refine, Centroids, Fohs };
enum class InputFormat { Pgm, Csv };
enum class ExtractMode { Dilated, Bptc, Iso };
enum class PolicyName { Left, Right, LocalGray };

struct PipelineConfig {
  Command command = Command::Extract;
  std::string input;
  InputFormat format = InputFormat::Pgm;
  std::string field_name = "value";
  std::vector<std::pair<std::string, std::string>> aux;  // CSV aux fields: name, path
  std::optional<double> iso;
  std::optional<std::pair<double, double>> range;
  std::optional<PolicyName> policy;  // unset: command default
  double rho0 = 0.6;
  bool prune = true;
  double w0 = 0.7;
  GapPolicy gap = GapPolicy::Shortest;
  double min_length = 0.0;
  ExtractMode mode = ExtractMode::Dilated;
  bool centroid_mesh = false;
  std::string out;
  bool svg = false;
  unsigned workers = 1;
};

// ---------------------------------------------------------------------------
// Parsing of individual flag values.

inline Command parse_command(const std::string& s) {
  static const std::map<std::string, Command> names{{"extract", Command::Extract},     {"skeleton", Command::Skeleton},
                                                    {"partition", Command::Partition}, {"refine", Command::Refine},
                                                    {"centroids", Command::Centroids}, {"fohs", Command::Fohs}};
  const auto it = names.find(s);
  if (it == names.end()) throw ConfigError("unknown command '" + s + "'");
  return it->second;
}

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Extract: return "extract";
    case Command::Skeleton: return "skeleton";
    case Command::Partition: return "partition";
    case Command::Refine: return "refine";
    case Command::Centroids: return "centroids";
    case Command::Fohs: return "fohs";
  }
  return "?";
}

inline InputFormat parse_format(const std::string& s) {
  if (s == "pgm") return InputFormat::Pgm;
  if (s == "csv") return InputFormat::Csv;
  throw ConfigError("unknown format '" + s + "' (expected pgm or csv)");
}

/// Format from the file extension, for when --format is omitted.
inline std::optional<InputFormat> format_from_path(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (ext == ".pgm" || ext == ".pnm") return InputFormat::Pgm;
  if (ext == ".csv") return InputFormat::Csv;
  return std::nullopt;
}

inline PolicyName parse_policy(const std::string& s) {
  if (s == "left") return PolicyName::Left;
  if (s == "right") return PolicyName::Right;
  if (s == "local-gray") return PolicyName::LocalGray;
  throw ConfigError("unknown policy '" + s + "' (expected left, right or local-gray)");
}

inline const char* to_string(PolicyName p) {
  switch (p) {
    case PolicyName::Left: return "left";
    case PolicyName::Right: return "right";
    case PolicyName::LocalGray: return "local-gray";
  }
  return "?";
}

inline GapPolicy parse_gap(const std::string& s) {
  if (s == "shortest") return GapPolicy::Shortest;
  if (s == "direction") return GapPolicy::DirectionPreserving;
  throw ConfigError("unknown gap policy '" + s + "' (expected shortest or direction)");
}

inline ExtractMode parse_mode(const std::string& s) {
  if (s == "dilated") return ExtractMode::Dilated;
  if (s == "bptc") return ExtractMode::Bptc;
  if (s == "iso") return ExtractMode::Iso;
  throw ConfigError("unknown mode '" + s + "' (expected dilated, bptc or iso)");
}

inline double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ConfigError(what + ": '" + s + "' is not a finite number");
  return v;
}

/// "LO:HI" with LO <= HI.
inline std::pair<double, double> parse_range(const std::string& s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("--range: expected LO:HI, got '" + s + "'");
  const double lo = parse_number(s.substr(0, colon), "--range");
  const double hi = parse_number(s.substr(colon + 1), "--range");
  if (lo > hi) throw ConfigError("--range: LO must not exceed HI");
  return {lo, hi};
}

/// "NAME=PATH" for an auxiliary CSV field.
inline std::pair<std::string, std::string> parse_aux(const std::string& s) {
  const std::size_t eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw ConfigError("--aux: expected NAME=PATH, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

/// Cross-field checks, run before any input is read.
inline void validate(const PipelineConfig& c) {
  if (c.input.empty()) throw ConfigError("--input is required");
  if (c.out.empty()) throw ConfigError("--out is required");
  if (c.iso && c.range) throw ConfigError("--iso and --range are mutually exclusive");
  if (!(c.rho0 >= 0.0) || !std::isfinite(c.rho0)) throw ConfigError("--rho0 must be a finite value >= 0");
  if (!(c.w0 >= 0.0) || !std::isfinite(c.w0)) throw ConfigError("--w0 must be a finite value >= 0");
  if (!(c.min_length >= 0.0) || !std::isfinite(c.min_length)) throw ConfigError("--min-length must be >= 0");
  if (c.policy == PolicyName::LocalGray && !c.iso && !c.range)
    throw ConfigError("--policy local-gray needs --iso or --range to compare corners against");
  if (c.mode == ExtractMode::Iso && !c.iso) throw ConfigError("--mode iso requires --iso");
  if (c.command == Command::Fohs && !c.iso) throw ConfigError("fohs requires --iso (the freeze-out temperature)");
  if (!c.aux.empty() && c.format != InputFormat::Csv) throw ConfigError("--aux applies to csv input only");
  std::set<std::string> names{c.field_name};
  for (const auto& [name, path] : c.aux)
    if (!names.insert(name).second) throw ConfigError("field name '" + name + "' given twice");
  if (c.workers == 0) throw ConfigError("worker count must be positive");
}

// ---------------------------------------------------------------------------
// Input.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("unreadable-input", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("unreadable-input", "error while reading '" + path + "'");
  return ss.str();
}

/// Reads the input grid. Parse failures are I/O errors carrying the raster code.
inline Grid load_input(const PipelineConfig& c) {
  try {
    if (c.format == InputFormat::Pgm) return load_pgm(std::string_view(read_file(c.input)));
    std::vector<std::string> texts{read_file(c.input)};
    std::vector<std::string> names{c.field_name};
    for (const auto& [name, path] : c.aux) {
      texts.push_back(read_file(path));
      names.push_back(name);
    }
    const std::vector<std::string_view> views(texts.begin(), texts.end());
    return load_csv_grid(views, names);
  } catch (const Error& e) {
    throw IoError(std::string(to_string(e.code())), e.what());
  }
}

// ---------------------------------------------------------------------------
// Deterministic text formatting.

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

inline Json point_json(Point p) { return Json::array({p.x == 0.0 ? 0.0 : p.x, p.y == 0.0 ? 0.0 : p.y}); }

inline const char* to_string(ContourKind k) {
  switch (k) {
    case ContourKind::Dilated: return "dilated";
    case ContourKind::PixelTrace: return "bptc";
    case ContourKind::Iso: return "iso";
    case ContourKind::Region: return "region";
  }
  return "?";
}

inline Json contour_json(const Contour& c) {
  Json j;
  j["mode"] = to_string(c.kind);
  j["orientation"] = c.orientation == Orientation::CounterClockwise ? "ccw" : "cw";
  j["degenerate"] = c.degenerate;
  j["fully_degenerate"] = contourforge::fully_degenerate(c);
  j["area"] = c.area();
  Json pts = Json::array();
  for (const Point& p : c.points) pts.push_back(point_json(p));
  j["points"] = std::move(pts);
  return j;
}

inline Json histogram_json(const ClassHistogram& h) {
  return Json{{"isolated", h.isolated}, {"terminated", h.terminated}, {"sleeve", h.sleeve}, {"junction", h.junction}};
}

/// Minimal SVG builder in image coordinates: 1 pixel = 1 user unit, and the
/// y axis is flipped so that row 0 is drawn at the bottom.
class Svg {
 public:
  Svg(std::int32_t width, std::int32_t height) : w_(width), h_(height) {}

  double sx(double x) const { return x; }
  double sy(double y) const { return static_cast<double>(h_) - 1.0 - y; }

  /// Grayscale backdrop; runs of equal value on a row share one rect.
  void raster(const Grid& g) {
    const auto [mn, mx] = std::minmax_element(g.values().begin(), g.values().end());
    const double lo = *mn, span = *mx - *mn;
    body_ << "<g id=\"raster\" shape-rendering=\"crispEdges\">\n";
    for (std::int32_t r = 0; r < g.height(); ++r) {
      std::int32_t c = 0;
      while (c < g.width()) {
        const double v = g.value(c, r);
        std::int32_t e = c + 1;
        while (e < g.width() && g.value(e, r) == v) ++e;
        const int level = span > 0.0 ? static_cast<int>(std::lround(255.0 * (v - lo) / span)) : 0;
        char color[8];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
        body_ << "<rect x=\"" << fmt(c - 0.5) << "\" y=\"" << fmt(sy(r) - 0.5) << "\" width=\"" << (e - c)
              << "\" height=\"1\" fill=\"" << color << "\"/>\n";
        c = e;
      }
    }
    body_ << "</g>\n";
  }

  void polygon(std::span<const Point> pts, const std::string& stroke, double width, const std::string& fill = "none") {
    body_ << "<polygon points=\"" << coords(pts) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }

  void line(Point a, Point b, const std::string& stroke, double width) {
    body_ << "<line x1=\"" << fmt(sx(a.x)) << "\" y1=\"" << fmt(sy(a.y)) << "\" x2=\"" << fmt(sx(b.x)) << "\" y2=\""
          << fmt(sy(b.y)) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }

  void dot(Point p, double radius, const std::string& fill) {
    body_ << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y)) << "\" r=\"" << fmt(radius) << "\" fill=\""
          << fill << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<!-- contourforge " << kVersion << " -->\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.5 -0.5 " << w_ << ' ' << h_ << "\" width=\""
        << w_ * kScale << "\" height=\"" << h_ * kScale << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  static constexpr int kScale = 8;

  std::string coords(std::span<const Point> pts) const {
    std::string s;
    for (const Point& p : pts) {
      if (!s.empty()) s += ' ';
      s += fmt(sx(p.x)) + ',' + fmt(sy(p.y));
    }
    return s;
  }

  std::int32_t w_, h_;
  std::ostringstream body_;
};

// ---------------------------------------------------------------------------
// Commands.

struct Artifact {
  std::string name;
  std::string content;
};

struct CommandResult {
  Json document;
  std::string summary;  // one line for stdout
  std::vector<Artifact> files;
};

namespace detail {

inline Json header(const PipelineConfig& c, const Grid& g) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = to_string(c.command);
  j["input"] = {{"width", g.width()}, {"height", g.height()}};
  return j;
}

/// Pixels taking part in the shape: the range, else value >= iso, else any
/// nonzero value.
inline SelectionMask select(const Grid& g, const PipelineConfig& c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c.range) return threshold_select(g, c.range->first, c.range->second);
  if (c.iso) return threshold_select(g, *c.iso, inf);
  return threshold_select(g, std::nextafter(0.0, 1.0), inf);
}

inline PolicyName effective_policy(const PipelineConfig& c) {
  if (c.policy) return *c.policy;
  // Edge maps are 8-connected lines; connecting diagonal pixels keeps them whole.
  return c.command == Command::Partition ? PolicyName::Right : PolicyName::Left;
}

inline TurnPolicy make_policy(const PipelineConfig& c, const Grid& g) {
  switch (effective_policy(c)) {
    case PolicyName::Left: return TurnPolicy::left();
    case PolicyName::Right: return TurnPolicy::right();
    case PolicyName::LocalGray: return TurnPolicy::local_gray(g, c.iso ? *c.iso : c.range->first);
  }
  return TurnPolicy::left();
}

inline std::vector<Contour> shapes_and_holes(const Grid& g, const PipelineConfig& c) {
  const TurnPolicy policy = make_policy(c, g);
  if (c.iso && c.command != Command::Skeleton && c.command != Command::Partition)
    return extract_isocontours(g, *c.iso, policy, c.workers);
  return extract_contours(select(g, c), policy, ContourMode::Dilated, c.workers);
}

inline std::string contour_color(const Contour& c) { return c.is_shape() ? "#1f77b4" : "#d62728"; }

inline void finish(CommandResult& r, const PipelineConfig& c, const std::string& stem, Svg* svg) {
  r.files.push_back({stem + ".json", r.document.dump(2) + "\n"});
  if (c.svg && svg) r.files.push_back({stem + ".svg", svg->str()});
}

}  // namespace detail

inline CommandResult cmd_extract(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  const TurnPolicy policy = detail::make_policy(c, g);
  std::vector<Contour> contours;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> pinned;
  const char* mode = "dilated";
  if (c.mode == ExtractMode::Iso) {
    mode = "iso";
    const SelectionMask mask = threshold_select(g, *c.iso, std::numeric_limits<double>::infinity());
    for (const Contour& d : extract_contours(mask, policy, ContourMode::Dilated, c.workers)) {
      const std::vector<RangeVector> ranges = build_range_vectors(d, g);
      contours.push_back(displace_to_iso(d, ranges, *c.iso));
      auto& vs = values.emplace_back();
      auto& ps = pinned.emplace_back();
      for (const RangeVector& rv : ranges) {
        vs.push_back(rv.pinned ? rv.hi : sample_value_at(rv, iso_parameter(rv, *c.iso)));
        ps.push_back(rv.pinned);
      }
    }
  } else {
    if (c.mode == ExtractMode::Bptc) mode = "bptc";
    contours = extract_contours(detail::select(g, c), policy,
                                c.mode == ExtractMode::Bptc ? ContourMode::PixelTrace : ContourMode::Dilated, c.workers);
  }

  std::size_t shapes = 0, holes = 0;
  Json list = Json::array();
  for (std::size_t i = 0; i < contours.size(); ++i) {
    (contours[i].is_shape() ? shapes : holes)++;
    Json j = contour_json(contours[i]);
    if (!values.empty()) {
      j["values"] = values[i];
      j["pinned"] = pinned[i];
    }
    list.push_back(std::move(j));
  }
  doc["mode"] = mode;
  doc["policy"] = to_string(detail::effective_policy(c));
  if (c.iso) doc["isovalue"] = *c.iso;
  doc["contour_count"] = contours.size();
  doc["shape_count"] = shapes;
  doc["hole_count"] = holes;
  doc["contours"] = std::move(list);
  r.document = std::move(doc);
  r.summary = std::string("extract: ") + std::to_string(contours.size()) + " contours (" + std::to_string(shapes) +
              " shapes, " + std::to_string(holes) + " holes)";

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const Contour& ct : contours) svg.polygon(ct.points, detail::contour_color(ct), 0.08);
  detail::finish(r, c, "contours", &svg);
  return r;
}

inline CommandResult cmd_skeleton(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  const std::vector<Contour> contours =
      extract_contours(detail::select(g, c), detail::make_policy(c, g), ContourMode::Dilated, c.workers);
  const Triangulation tri = triangulate_contours(contours);
  const ClassHistogram before = histogram(classify(tri));
  const double rho0 = c.prune ? c.rho0 : 0.0;
  const PruneResult pr = prune(tri, {rho0});
  const ClassHistogram after = histogram(pr.classes);

  std::map<std::string, std::size_t> chains{{"limb", 0}, {"torso", 0}, {"degenerate_limb", 0}, {"degenerate_torso", 0}};
  for (const ChainComplex& ch : decompose_chains(pr.tri, pr.classes)) {
    switch (ch.kind) {
      case ChainKind::Limb: ++chains["limb"]; break;
      case ChainKind::Torso: ++chains["torso"]; break;
      case ChainKind::DegenerateLimb: ++chains["degenerate_limb"]; break;
      case ChainKind::DegenerateTorso: ++chains["degenerate_torso"]; break;
    }
  }

  doc["policy"] = to_string(detail::effective_policy(c));
  doc["rho0"] = rho0;
  doc["contour_count"] = contours.size();
  doc["triangle_count"] = before.isolated + before.terminated + before.sleeve + before.junction;
  doc["histogram"] = {{"unpruned", histogram_json(before)}, {"pruned", histogram_json(after)}};
  doc["removed_triangles"] = pr.removed_triangles;
  doc["junctions"] = after.junction;
  doc["chains"] = {{"limb", chains["limb"]},
                   {"torso", chains["torso"]},
                   {"degenerate_limb", chains["degenerate_limb"]},
                   {"degenerate_torso", chains["degenerate_torso"]}};
  Json segs = Json::array();
  for (const SkeletonSegment& s : pr.skeleton.segments)
    segs.push_back({{"a", point_json(s.a)}, {"b", point_json(s.b)}, {"triangle", s.triangle}});
  Json pts = Json::array();
  for (const SkeletonPoint& p : pr.skeleton.points) pts.push_back({{"p", point_json(p.p)}, {"triangle", p.triangle}});
  doc["segments"] = std::move(segs);
  doc["points"] = std::move(pts);
  r.document = std::move(doc);
  r.summary = "skeleton: " + std::to_string(pr.skeleton.segments.size()) + " segments, junctions " +
              std::to_string(before.junction) + " -> " + std::to_string(after.junction) + ", " +
              std::to_string(pr.removed_triangles) + " triangles pruned";

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const Contour& ct : contours) svg.polygon(ct.points, "#7f7f7f", 0.05);
  for (const SkeletonSegment& s : pr.skeleton.segments) svg.line(s.a, s.b, "#d62728", 0.1);
  for (const SkeletonPoint& p : pr.skeleton.points) svg.dot(p.p, 0.15, "#d62728");
  detail::finish(r, c, "skeleton", &svg);
  return r;
}

inline CommandResult cmd_partition(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  const SelectionMask mask = detail::select(g, c);
  const std::vector<Contour> contours =
      extract_contours(mask, detail::make_policy(c, g), ContourMode::Dilated, c.workers);
  const PruneResult pr = prune(triangulate_contours(contours), {c.prune ? c.rho0 : 0.0});
  const Frame frame = add_frame(g.width(), g.height());
  GapOptions gap_opt;
  gap_opt.policy = c.gap;
  gap_opt.lenient = true;
  const std::vector<VectorPair> gaps = close_gaps(pr.skeleton, frame, gap_opt);
  const std::vector<DirectedSegment> vectors = partition_vectors(pr.skeleton, frame, gaps);
  const std::vector<Contour> loops = reconnect(vectors);

  std::vector<std::pair<Point, Point>> segs;
  segs.reserve(vectors.size());
  for (const DirectedSegment& v : vectors) segs.push_back({v.from, v.to});
  const double x1 = g.width() - 0.5, y1 = g.height() - 0.5;
  const std::vector<Point> corners{{-0.5, -0.5}, {x1, -0.5}, {x1, y1}, {-0.5, y1}};
  const std::set<Point> removed = simplify_network(segs, {c.w0, true}, &mask, corners);

  std::vector<Contour> regions;
  std::size_t region_count = 0, points_before = 0, points_after = 0;
  for (const Contour& loop : loops) {
    Contour s = drop_points(loop, removed);
    points_before += loop.points.size();
    points_after += s.points.size();
    if (s.is_shape() && s.area() > 0.0) ++region_count;
    regions.push_back(std::move(s));
  }
  Triangulation mesh = triangulate_contours(regions);
  std::size_t triangles = 0;
  for (const Triangle& t : mesh.triangles) triangles += t.interior;

  doc["policy"] = to_string(detail::effective_policy(c));
  doc["gap_policy"] = c.gap == GapPolicy::Shortest ? "shortest" : "direction";
  doc["rho0"] = c.prune ? c.rho0 : 0.0;
  doc["w0"] = c.w0;
  doc["region_count"] = region_count;
  doc["triangle_count"] = triangles;
  doc["points"] = {{"before_simplification", points_before}, {"after_simplification", points_after}};
  Json gap_list = Json::array();
  for (const VectorPair& p : gaps) gap_list.push_back({point_json(p.a), point_json(p.b)});
  doc["gaps"] = std::move(gap_list);
  Json list = Json::array();
  for (const Contour& reg : regions) list.push_back(contour_json(reg));
  doc["regions"] = std::move(list);
  r.document = std::move(doc);
  r.summary = "partition: " + std::to_string(region_count) + " regions, " + std::to_string(triangles) +
              " triangles, " + std::to_string(gaps.size()) + " gaps closed";

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const Contour& reg : regions) svg.polygon(reg.points, reg.is_shape() ? "#1f77b4" : "#d62728", 0.1);
  for (const VectorPair& p : gaps) svg.line(p.a, p.b, "#2ca02c", 0.35);
  detail::finish(r, c, "partition", &svg);
  return r;
}

inline CommandResult cmd_refine(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  const std::vector<Contour> contours = detail::shapes_and_holes(g, c);
  const RefineResult rr = refine_contours(contours);
  doc["policy"] = to_string(detail::effective_policy(c));
  if (c.iso) doc["isovalue"] = *c.iso;
  doc["contours_before"] = rr.before;
  doc["contours_after"] = rr.contours.size();
  Json splits = Json::array();
  for (const VectorPair& p : rr.splits) splits.push_back({point_json(p.a), point_json(p.b)});
  doc["splits"] = std::move(splits);
  Json list = Json::array();
  for (const Contour& ct : rr.contours) list.push_back(contour_json(ct));
  doc["contours"] = std::move(list);
  r.document = std::move(doc);
  r.summary = "refine: " + std::to_string(rr.before) + " -> " + std::to_string(rr.contours.size()) + " contours";

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const Contour& ct : rr.contours) svg.polygon(ct.points, detail::contour_color(ct), 0.08);
  for (const VectorPair& p : rr.splits) svg.line(p.a, p.b, "#2ca02c", 0.2);
  detail::finish(r, c, "refine", &svg);
  return r;
}

inline CommandResult cmd_centroids(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  std::vector<Contour> shapes;
  for (Contour& ct : detail::shapes_and_holes(g, c))
    if (ct.is_shape()) shapes.push_back(std::move(ct));
  const std::vector<Contour> kept = filter_by_length(shapes, c.min_length);

  std::vector<Point> centroids;
  Json table = Json::array();
  std::string csv = "index,x,y,area,length\n";
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const AreaCentroid ac = area_and_centroid(kept[i]);
    centroids.push_back(ac.centroid);
    table.push_back({{"index", i},
                     {"centroid", point_json(ac.centroid)},
                     {"area", ac.area},
                     {"length", kept[i].length()},
                     {"point_count", kept[i].points.size()}});
    csv += std::to_string(i) + ',' + fmt(ac.centroid.x) + ',' + fmt(ac.centroid.y) + ',' +
           fmt(ac.area) + ',' + fmt(kept[i].length()) + '\n';
  }
  doc["policy"] = to_string(detail::effective_policy(c));
  doc["min_length"] = c.min_length;
  doc["contours_total"] = shapes.size();
  doc["centroid_count"] = kept.size();
  doc["centroids"] = std::move(table);

  Triangulation mesh;
  if (c.centroid_mesh) {
    std::vector<Point> pts = centroids;
    const double x1 = g.width() - 0.5, y1 = g.height() - 0.5;
    for (Point p : {Point{-0.5, -0.5}, Point{x1, -0.5}, Point{x1, y1}, Point{-0.5, y1}})
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    mesh = triangulate(pts);
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const Triangle& t : mesh.triangles)
      for (int i = 0; i < 3; ++i) edges.insert(std::minmax(t.v[i], t.v[(i + 1) % 3]));
    Json pj = Json::array();
    for (const Point& p : mesh.points) pj.push_back(point_json(p));
    Json ej = Json::array();
    for (const auto& [a, b] : edges) ej.push_back({a, b});
    doc["mesh"] = {{"points", std::move(pj)}, {"edges", std::move(ej)}, {"triangle_count", mesh.triangles.size()}};
  }
  r.document = std::move(doc);
  r.summary = "centroids: " + std::to_string(kept.size()) + " of " + std::to_string(shapes.size()) + " contours";
  r.files.push_back({"centroids.csv", csv});

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const Contour& ct : kept) svg.polygon(ct.points, "#1f77b4", 0.08);
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i) svg.line(mesh.corner(t, i), mesh.corner(t, (i + 1) % 3), "#2ca02c", 0.05);
  for (const Point& p : centroids) svg.dot(p, 0.3, "#000000");
  detail::finish(r, c, "centroids", &svg);
  return r;
}

inline CommandResult cmd_fohs(const PipelineConfig& c, const Grid& g) {
  CommandResult r;
  Json doc = detail::header(c, g);
  const FreezeoutSurface s = extract_fohs(g, *c.iso, c.workers);
  doc["isovalue"] = s.isovalue;
  doc["temperature"] = s.temperature_name;
  doc["fields"] = s.field_names;
  doc["element_count"] = s.element_count();
  std::string csv = "section,index,t,r,dsigma_t,dsigma_r," + s.temperature_name;
  for (const std::string& f : s.field_names) csv += ',' + f;
  csv += ",touches_pinned\n";
  Json sections = Json::array();
  for (std::size_t si = 0; si < s.sections.size(); ++si) {
    Json sec = Json::array();
    for (std::size_t ei = 0; ei < s.sections[si].size(); ++ei) {
      const FreezeoutElement& e = s.sections[si][ei];
      sec.push_back({{"t", e.t},
                     {"r", e.r},
                     {"dsigma_t", e.dsigma_t},
                     {"dsigma_r", e.dsigma_r},
                     {"temperature", e.temperature},
                     {"fields", e.fields},
                     {"touches_pinned", e.touches_pinned}});
      csv += std::to_string(si) + ',' + std::to_string(ei) + ',' + fmt(e.t) + ',' + fmt(e.r) + ',' +
             fmt(e.dsigma_t) + ',' + fmt(e.dsigma_r) + ',' + fmt(e.temperature);
      for (double f : e.fields) csv += ',' + fmt(f);
      csv += e.touches_pinned ? ",1\n" : ",0\n";
    }
    sections.push_back(std::move(sec));
  }
  doc["sections"] = std::move(sections);
  r.document = std::move(doc);
  r.summary = "fohs: " + std::to_string(s.element_count()) + " elements in " + std::to_string(s.sections.size()) +
              " sections";
  r.files.push_back({"fohs.csv", csv});

  Svg svg(g.width(), g.height());
  svg.raster(g);
  for (const auto& sec : s.sections)
    for (const FreezeoutElement& e : sec) {
      svg.line(e.from, e.to, "#d62728", 0.1);
      const Point m{e.r, e.t};
      svg.line(m, m + 0.5 * Point{e.dsigma_r, e.dsigma_t}, "#1f77b4", 0.05);
    }
  detail::finish(r, c, "fohs", &svg);
  return r;
}

inline CommandResult run_command(const PipelineConfig& c, const Grid& g) {
  switch (c.command) {
    case Command::Extract: return cmd_extract(c, g);
    case Command::Skeleton: return cmd_skeleton(c, g);
    case Command::Partition: return cmd_partition(c, g);
    case Command::Refine: return cmd_refine(c, g);
    case Command::Centroids: return cmd_centroids(c, g);
    case Command::Fohs: return cmd_fohs(c, g);
  }
  throw ConfigError("unknown command");
}

// ---------------------------------------------------------------------------
// Output.

/// Writes every artifact to a hidden temp file in `dir`, then renames them
/// into place. If staging fails, the temp files are removed and nothing
/// visible is left behind.
inline void write_artifacts(const std::string& dir, const std::vector<Artifact>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("unwritable-output", "cannot create output directory '" + dir + "'");

  std::vector<std::pair<fs::path, fs::path>> staged;
  const auto cleanup = [&] {
    for (const auto& [tmp, dst] : staged) fs::remove(tmp, ec);
  };
  for (const Artifact& a : files) {
    const fs::path dst = fs::path(dir) / a.name;
    const fs::path tmp = fs::path(dir) / ("." + a.name + ".tmp");
    staged.emplace_back(tmp, dst);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
    out.close();
    if (!out) {
      cleanup();
      throw IoError("unwritable-output", "cannot write '" + tmp.string() + "'");
    }
  }
  for (const auto& [tmp, dst] : staged) {
    fs::rename(tmp, dst, ec);
    if (ec) {
      cleanup();
      throw IoError("unwritable-output", "cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
  }
}

/// One-line JSON error record for stderr.
inline std::string error_record(const std::string& kind, const std::string& code, const std::string& message, int exit_code) {
  Json j;
  j["error"] = kind;
  j["code"] = code;
  j["message"] = message;
  j["exit_code"] = exit_code;
  return j.dump();
}

/// Runs a validated configuration end to end. Returns the process exit code,
/// writing the summary to `out` and error records to `err`.
inline int execute(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    const Grid grid = load_input(c);
    CommandResult result;
    try {
      result = run_command(c, grid);
    } catch (const Error& e) {
      err << error_record("pipeline", std::string(to_string(e.code())), e.what(), kExitPipeline) << '\n';
      return kExitPipeline;
    }
    write_artifacts(c.out, result.files);
    out << result.summary << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << error_record("config", "invalid-config", e.what(), kExitConfig) << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << error_record("io", e.code(), e.what(), kExitIo) << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << error_record("pipeline", std::string(to_string(e.code())), e.what(), kExitPipeline) << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << error_record("pipeline", "internal", e.what(), kExitPipeline) << '\n';
    return kExitPipeline;
  }
}

}  // namespace contourforge::cli
