// contourforge command-line front end.
//
//   contourforge <extract|skeleton|partition|refine|centroids|fohs>
//       --input F --format pgm|csv [--iso V | --range LO:HI]
//       [--policy left|right|local-gray] [--rho0 X] [--w0 X]
//       [--gap shortest|direction] [--min-length L] --out DIR [--svg]
//
// A key=value configuration file may supply any long option (--config FILE);
// flags given on the command line take precedence.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <contourforge/cli.hpp>

namespace cf = contourforge;
namespace cli = contourforge::cli;

int main(int argc, char** argv) {
  CLI::App app{"Raster to vector contours, skeletons, partitions and freeze-out surfaces", "contourforge"};
  app.set_config("--config", "", "key=value configuration file (command-line flags take precedence)");
  app.set_version_flag("--version", std::string(cli::kVersion));

  std::string command, input, format, policy, gap = "shortest", mode = "dilated", range, field = "value", out;
  std::optional<double> iso;
  std::vector<std::string> aux;
  double rho0 = 0.6, w0 = 0.7, min_length = 0.0;
  bool svg = false, no_prune = false, centroid_mesh = false;

  app.add_option("command", command, "extract | skeleton | partition | refine | centroids | fohs")->required();
  app.add_option("--input", input, "Input grid file")->required();
  app.add_option("--format", format, "pgm | csv (default: from the file extension)");
  auto* iso_opt = app.add_option("--iso", iso, "Isovalue; also the selection threshold value >= V");
  app.add_option("--range", range, "Select pixels with LO <= value <= HI")->excludes(iso_opt);
  app.add_option("--policy", policy, "Turn policy: left | right | local-gray");
  app.add_option("--rho0", rho0, "Pruning threshold on branch significance")->capture_default_str();
  app.add_flag("--no-prune", no_prune, "Keep the unpruned skeleton");
  app.add_option("--w0", w0, "Simplification tolerance in pixel widths")->capture_default_str();
  app.add_option("--gap", gap, "Gap closure policy: shortest | direction")->capture_default_str();
  app.add_option("--min-length", min_length, "Drop contours whose perimeter is not above L")->capture_default_str();
  app.add_option("--mode", mode, "extract: dilated | bptc | iso")->capture_default_str();
  app.add_option("--field", field, "Name of the primary CSV field")->capture_default_str();
  app.add_option("--aux", aux, "Auxiliary CSV field NAME=PATH (repeatable)");
  app.add_flag("--centroid-mesh", centroid_mesh, "centroids: also triangulate centroids and image corners");
  app.add_option("--out", out, "Output directory")->required();
  app.add_flag("--svg", svg, "Also write an SVG rendering");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << cli::error_record("config", "invalid-arguments", e.what(), cli::kExitConfig) << '\n';
    return cli::kExitConfig;
  }

  cli::PipelineConfig cfg;
  try {
    cfg.command = cli::parse_command(command);
    cfg.input = input;
    if (!format.empty()) {
      cfg.format = cli::parse_format(format);
    } else if (const auto f = cli::format_from_path(input)) {
      cfg.format = *f;
    } else {
      throw cli::ConfigError("--format is required when the input extension is not .pgm or .csv");
    }
    cfg.iso = iso;
    if (!range.empty()) cfg.range = cli::parse_range(range);
    if (!policy.empty()) cfg.policy = cli::parse_policy(policy);
    cfg.rho0 = rho0;
    cfg.prune = !no_prune;
    cfg.w0 = w0;
    cfg.gap = cli::parse_gap(gap);
    cfg.min_length = min_length;
    cfg.mode = cli::parse_mode(mode);
    cfg.field_name = field;
    for (const std::string& a : aux) cfg.aux.push_back(cli::parse_aux(a));
    cfg.centroid_mesh = centroid_mesh;
    cfg.out = out;
    cfg.svg = svg;
    cfg.workers = cf::default_thread_count();
  } catch (const cli::ConfigError& e) {
    std::cerr << cli::error_record("config", "invalid-config", e.what(), cli::kExitConfig) << '\n';
    return cli::kExitConfig;
  }
  return cli::execute(cfg, std::cout, std::cerr);
}
