// transitlens: builds city transit network models from snapshot files and
// computes coverage, trip, access, and structural metrics that are
// comparable across cities.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "transit/coverage.hpp"
#include "transit/feed.hpp"
#include "transit/network.hpp"
#include "transit/report.hpp"
#include "transit/routing.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct CommonOptions {
  std::string snapshot;
  std::string population;
  std::string pois;
  std::string out;
  std::string format = "json";
  std::string wait_policy = "half-headway";
  std::uint64_t seed = 42;
  std::size_t samples = 10000;
  std::size_t poi_starts = 1000;
  double walk_threshold_m = 400.0;
  double service_bound_m = 800.0;
  double merge_threshold_m = 30.0;
  double transfer_penalty_sec = 300.0;
  double walk_speed_m_per_min = 80.0;
  unsigned threads = 0;
};

void add_sampling_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  cmd->add_option("--samples", opt.samples, "Monte Carlo sample count")
      ->capture_default_str();
  cmd->add_option("--walk-threshold", opt.walk_threshold_m,
                  "Pleasant-walk radius in meters")
      ->capture_default_str();
  cmd->add_option("--service-bound", opt.service_bound_m,
                  "Service-area bound in meters")
      ->capture_default_str();
  cmd->add_option("--walk-speed", opt.walk_speed_m_per_min,
                  "Walking speed in meters per minute")
      ->capture_default_str();
  cmd->add_option("--poi-starts", opt.poi_starts,
                  "Starting points for access sampling")
      ->capture_default_str();
  cmd->add_option("--threads", opt.threads,
                  "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
}

void add_routing_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--transfer-penalty", opt.transfer_penalty_sec,
                  "Static transfer penalty in seconds")
      ->capture_default_str();
  cmd->add_option("--wait-policy", opt.wait_policy,
                  "Boarding wait model: half-headway or zero")
      ->check(CLI::IsMember({"half-headway", "zero"}))
      ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--out", opt.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

transit::SampleConfig sample_config(const CommonOptions& opt) {
  transit::SampleConfig config;
  config.sample_count = opt.samples;
  config.walk_threshold_m = opt.walk_threshold_m;
  config.service_bound_m = opt.service_bound_m;
  config.poi_start_count = opt.poi_starts;
  config.seed = opt.seed;
  config.walking_speed_m_per_min = opt.walk_speed_m_per_min;
  return config;
}

transit::RoutingPolicy routing_policy(const CommonOptions& opt) {
  transit::RoutingPolicy policy;
  policy.transfer_penalty_sec = opt.transfer_penalty_sec;
  policy.board_wait = opt.wait_policy == "zero"
                          ? transit::BoardWaitPolicy::kZero
                          : transit::BoardWaitPolicy::kHalfHeadway;
  return policy;
}

transit::TableFormat table_format(const CommonOptions& opt) {
  return opt.format == "csv" ? transit::TableFormat::kCsv
                             : transit::TableFormat::kJson;
}

// Shared ingest pipeline: load, derive, prune, build, merge.
struct LoadedCity {
  transit::RawFeed feed;  // pruned feed, pre-merge
  transit::TransitNetwork network;
};

LoadedCity load_city(const CommonOptions& opt) {
  LoadedCity city;
  transit::RawFeed raw = transit::load_snapshot(opt.snapshot);
  std::vector<std::string> warnings;
  auto connections = transit::derive_connections(raw, {}, {}, &warnings);
  for (const std::string& w : warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  city.feed = transit::prune_isolated_stops(raw, connections);
  transit::TransitNetwork built =
      transit::build_network(city.feed, connections);
  city.network = transit::merge_nearby_stops(built, opt.merge_threshold_m);
  return city;
}

void write_output(const CommonOptions& opt, const std::string& content) {
  if (opt.out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) {
    throw transit::TransitError(transit::ErrorKind::MissingFile,
                                "cannot write output file: " + opt.out);
  }
  out << content;
}

void write_manifest(const CommonOptions& opt, const std::string& command,
                    const std::vector<std::string>& argv,
                    std::chrono::steady_clock::time_point started) {
  if (opt.out.empty()) {
    return;  // stdout runs leave no artifact to accompany
  }
  const double duration_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    started)
          .count();
  nlohmann::ordered_json doc;
  doc["tool"] = "transitlens";
  doc["tool_version"] = kToolVersion;
  doc["command"] = command;
  doc["argv"] = argv;
  nlohmann::ordered_json inputs;
  if (!opt.snapshot.empty()) inputs["snapshot"] = opt.snapshot;
  if (!opt.population.empty()) inputs["population"] = opt.population;
  if (!opt.pois.empty()) inputs["pois"] = opt.pois;
  doc["inputs"] = std::move(inputs);
  nlohmann::ordered_json config;
  config["seed"] = opt.seed;
  config["samples"] = opt.samples;
  config["walk_threshold_m"] = opt.walk_threshold_m;
  config["service_bound_m"] = opt.service_bound_m;
  config["poi_start_count"] = opt.poi_starts;
  config["walking_speed_m_per_min"] = opt.walk_speed_m_per_min;
  config["merge_threshold_m"] = opt.merge_threshold_m;
  config["transfer_penalty_sec"] = opt.transfer_penalty_sec;
  config["board_wait_policy"] = opt.wait_policy;
  config["threads"] = opt.threads;
  config["format"] = opt.format;
  doc["config"] = std::move(config);
  doc["duration_sec"] = duration_sec;
  std::ofstream out(opt.out + ".manifest.json", std::ios::binary);
  if (out) {
    out << doc.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"City transit network analytics"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOptions opt;
  std::vector<std::string> compare_inputs;
  std::string path_from;
  std::string path_to;
  bool include_bridges = false;

  CLI::App* cmd_build = app.add_subcommand(
      "build", "Normalize a snapshot: prune isolated stops, merge nearby "
               "stops, materialize travel times");
  cmd_build->add_option("--snapshot", opt.snapshot, "City snapshot JSON")
      ->required();
  cmd_build->add_option("--merge-threshold", opt.merge_threshold_m,
                        "Stop merge threshold in meters")
      ->capture_default_str();
  cmd_build->add_option("--out", opt.out, "Output path (stdout when omitted)");

  CLI::App* cmd_metrics =
      app.add_subcommand("metrics", "Structural metrics for one city");
  CLI::App* cmd_coverage =
      app.add_subcommand("coverage", "Area (and population) based coverage");
  CLI::App* cmd_trips =
      app.add_subcommand("trips", "Door-to-door trip statistics");
  CLI::App* cmd_access =
      app.add_subcommand("access", "Access to points of interest");
  CLI::App* cmd_path =
      app.add_subcommand("path", "Shortest time path between two stops");
  CLI::App* cmd_bridges =
      app.add_subcommand("bridges", "Connections whose removal disconnects "
                                    "the network");
  CLI::App* cmd_report =
      app.add_subcommand("report", "Full city report (all metric families)");
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Compare previously generated reports");
  CLI::App* cmd_geojson =
      app.add_subcommand("export-geojson", "Export the network as GeoJSON");

  for (CLI::App* cmd : {cmd_metrics, cmd_coverage, cmd_trips, cmd_access,
                        cmd_path, cmd_bridges, cmd_report, cmd_geojson}) {
    cmd->add_option("--snapshot", opt.snapshot, "City snapshot JSON")
        ->required();
    cmd->add_option("--merge-threshold", opt.merge_threshold_m,
                    "Stop merge threshold in meters")
        ->capture_default_str();
    add_output_flags(cmd, opt);
  }
  for (CLI::App* cmd : {cmd_coverage, cmd_trips, cmd_access, cmd_report}) {
    add_sampling_flags(cmd, opt);
    cmd->add_option("--population", opt.population,
                    "population.csv with region populations");
  }
  for (CLI::App* cmd : {cmd_trips, cmd_access, cmd_path, cmd_report}) {
    add_routing_flags(cmd, opt);
  }
  cmd_access->add_option("--pois", opt.pois, "pois.csv")->required();
  cmd_report->add_option("--pois", opt.pois, "pois.csv");
  cmd_report->get_option("--population")->required();
  cmd_path->add_option("--from", path_from, "Origin stop id")->required();
  cmd_path->add_option("--to", path_to, "Destination stop id")->required();
  cmd_geojson->add_flag("--include-bridges", include_bridges,
                        "Annotate bridge connections");
  cmd_compare->add_option("reports", compare_inputs,
                          "Two or more report JSON files")
      ->required()
      ->expected(2, -1);
  add_output_flags(cmd_compare, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  std::vector<std::string> argv_copy(argv, argv + argc);

  try {
    if (cmd_build->parsed()) {
      LoadedCity city = load_city(opt);
      const transit::RawFeed normalized =
          transit::network_to_feed(city.network, city.feed);
      write_output(opt, transit::serialize_snapshot(normalized));
      write_manifest(opt, "build", argv_copy, started);
      return 0;
    }
    if (cmd_metrics->parsed()) {
      LoadedCity city = load_city(opt);
      const auto metrics = transit::structural_metrics(city.network);
      write_output(opt, transit::render_structural(metrics,
                                                   table_format(opt)));
      write_manifest(opt, "metrics", argv_copy, started);
      return 0;
    }
    if (cmd_coverage->parsed()) {
      LoadedCity city = load_city(opt);
      const auto config = sample_config(opt);
      const auto area =
          transit::area_coverage(city.network, config, opt.threads);
      std::optional<transit::CoverageResult> population;
      if (!opt.population.empty()) {
        const auto popmap = transit::make_population_map(
            transit::load_population(opt.population));
        population = transit::population_coverage(city.network, popmap,
                                                  config, opt.threads);
      }
      write_output(opt, transit::render_coverage(
                            area, population ? &*population : nullptr,
                            table_format(opt)));
      write_manifest(opt, "coverage", argv_copy, started);
      return 0;
    }
    if (cmd_trips->parsed()) {
      LoadedCity city = load_city(opt);
      const auto config = sample_config(opt);
      const auto policy = routing_policy(opt);
      const auto area = transit::trip_metrics(
          city.network, config, transit::PointSource::kArea, policy, nullptr,
          opt.threads);
      std::optional<transit::TripSummary> population;
      if (!opt.population.empty()) {
        const auto popmap = transit::make_population_map(
            transit::load_population(opt.population));
        population = transit::trip_metrics(city.network, config,
                                           transit::PointSource::kPopulation,
                                           policy, &popmap, opt.threads);
      }
      write_output(opt, transit::render_trips(
                            area, population ? &*population : nullptr,
                            table_format(opt)));
      write_manifest(opt, "trips", argv_copy, started);
      return 0;
    }
    if (cmd_access->parsed()) {
      LoadedCity city = load_city(opt);
      const auto config = sample_config(opt);
      const auto policy = routing_policy(opt);
      const auto pois = transit::load_pois(opt.pois);
      transit::AccessResult access;
      if (!opt.population.empty()) {
        const auto popmap = transit::make_population_map(
            transit::load_population(opt.population));
        access = transit::poi_access(city.network, pois, config,
                                     transit::PointSource::kPopulation,
                                     policy, &popmap, opt.threads);
      } else {
        access = transit::poi_access(city.network, pois, config,
                                     transit::PointSource::kArea, policy,
                                     nullptr, opt.threads);
      }
      write_output(opt, transit::render_access(access, table_format(opt)));
      write_manifest(opt, "access", argv_copy, started);
      return 0;
    }
    if (cmd_path->parsed()) {
      LoadedCity city = load_city(opt);
      const auto result = transit::shortest_time_path(
          city.network, {path_from, path_to, routing_policy(opt)});
      write_output(opt, transit::render_path(result, table_format(opt)));
      write_manifest(opt, "path", argv_copy, started);
      return 0;
    }
    if (cmd_bridges->parsed()) {
      LoadedCity city = load_city(opt);
      const auto bridges = transit::find_bridges(city.network);
      write_output(opt, transit::render_bridges(bridges, table_format(opt)));
      write_manifest(opt, "bridges", argv_copy, started);
      return 0;
    }
    if (cmd_report->parsed()) {
      LoadedCity city = load_city(opt);
      transit::ReportConfig config;
      config.sampling = sample_config(opt);
      config.merge_threshold_m = opt.merge_threshold_m;
      config.routing = routing_policy(opt);
      const auto popmap = transit::make_population_map(
          transit::load_population(opt.population));
      std::vector<transit::PointOfInterest> pois;
      if (!opt.pois.empty()) {
        pois = transit::load_pois(opt.pois);
      }
      const auto report = transit::build_city_report(city.network, popmap,
                                                     pois, config,
                                                     opt.threads);
      write_output(opt, transit::render_report(report, table_format(opt)));
      write_manifest(opt, "report", argv_copy, started);
      return 0;
    }
    if (cmd_compare->parsed()) {
      std::vector<transit::CityReport> reports;
      for (const std::string& path : compare_inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
          throw transit::TransitError(transit::ErrorKind::MissingFile,
                                      "cannot open report: " + path);
        }
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        reports.push_back(transit::parse_report_json(text));
      }
      const auto table = transit::compare_cities(reports);
      write_output(opt, transit::render_comparison(table, table_format(opt)));
      write_manifest(opt, "compare", argv_copy, started);
      return 0;
    }
    if (cmd_geojson->parsed()) {
      LoadedCity city = load_city(opt);
      write_output(opt, transit::export_geojson(city.network,
                                                {include_bridges}));
      write_manifest(opt, "export-geojson", argv_copy, started);
      return 0;
    }
  } catch (const transit::TransitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
