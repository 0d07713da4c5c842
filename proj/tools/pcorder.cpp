// pcorder: batch front end for the axis-ordering engine.
//
//   pcorder compute --input data.csv --window 0.25 --weights pos_corr=1 --seed 7 --out r.json
//   pcorder order   --input data.csv --weights fan=1,density_change=0.5 --mode tsp --out o.json
//   pcorder serve   --port 8790

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pcorder/analysis.hpp"
#include "pcorder/data.hpp"
#include "pcorder/document.hpp"
#include "pcorder/error.hpp"
#include "pcorder/ordering.hpp"
#include "pcorder/service.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CliConfig {
  std::string input;
  std::string columns;
  double window = 0.2;
  std::optional<double> stride;
  std::string weights = "pos_corr=1";
  std::uint64_t seed = 0;
  int permutations = pcorder::kDefaultPermutations;
  int bins = pcorder::detect::kDefaultFanBins;
  std::string mode = "tsp";
  std::string out;
};

void add_common(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--input", cfg.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  cmd->add_option("--columns", cfg.columns, "Comma-separated subset of columns to use");
  cmd->add_option("--window", cfg.window, "Window size as a fraction of the axis range, in (0,1]")->capture_default_str();
  cmd->add_option("--stride", cfg.stride, "Window stride fraction (default: window/2)");
  cmd->add_option("--weights", cfg.weights, "Property weights, e.g. pos_corr=1,fan=0.5")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Seed for the skewness permutation tests")->capture_default_str();
  cmd->add_option("--permutations", cfg.permutations, "Permutations per skewness test")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--bins", cfg.bins, "Secondary-axis bins for the fan detector")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  cmd->add_option("--out", cfg.out, "Output JSON path (compute: default stdout)");
}

void report(const pcorder::Error& e) {
  std::cerr << "error: " << e.code_name() << ": " << e.what() << '\n';
}

bool is_usage_error(pcorder::ErrorCode c) {
  using pcorder::ErrorCode;
  return c == ErrorCode::InvalidWeights || c == ErrorCode::InvalidWindowSpec || c == ErrorCode::NoActiveProperties ||
         c == ErrorCode::BadRequest;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (const auto bad = pcorder::doc::find_non_finite(j)) {
    throw pcorder::Error(pcorder::ErrorCode::Internal, "document holds a non-finite number at " + *bad);
  }
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pcorder::Error(pcorder::ErrorCode::FileNotFound, "cannot write '" + path + "'");
  out << text;
}

int run_batch(const CliConfig& cfg, bool order) {
  pcorder::WindowSpec spec = pcorder::WindowSpec::with_default_stride(cfg.window);
  if (cfg.stride) spec.stride_fraction = *cfg.stride;
  pcorder::Weights weights;
  try {
    spec.validate();
    weights = pcorder::Weights::parse(cfg.weights);
    weights.require_active();
  } catch (const pcorder::Error& e) {
    report(e);
    return kExitUsage;
  }

  try {
    std::optional<std::vector<std::string>> columns;
    if (!cfg.columns.empty()) {
      columns.emplace();
      std::stringstream ss(cfg.columns);
      for (std::string c; std::getline(ss, c, ',');) columns->push_back(c);
    }
    const pcorder::LoadResult loaded = pcorder::load_csv(cfg.input, columns);
    pcorder::AnalysisOptions opts;
    opts.seed = cfg.seed;
    opts.permutations = cfg.permutations;
    opts.fan_bins = cfg.bins;
    const pcorder::Analysis analysis = pcorder::Analysis::compute(loaded.dataset, spec, opts);

    if (!order) {
      write_json(pcorder::doc::result_document(analysis, weights, loaded.dropped_rows), cfg.out);
      return 0;
    }

    const pcorder::ScoreMatrix m = pcorder::build_matrix(analysis, weights);
    if (cfg.mode == "tsp" && m.size() > pcorder::kMaxExactDims) {
      std::cerr << "warning: " << m.size() << " axes exceed the exact-search limit of " << pcorder::kMaxExactDims
                << "; using greedy ordering\n";
    }
    const pcorder::OrderingResult r = cfg.mode == "tsp" ? pcorder::order_tsp(m) : pcorder::order_greedy(m);
    if (!cfg.out.empty()) write_json(pcorder::doc::order_document(analysis, weights, loaded.dropped_rows, r), cfg.out);
    for (std::size_t axis : r.order) std::cout << m.dims[axis] << '\n';
    return 0;
  } catch (const pcorder::Error& e) {
    report(e);
    return is_usage_error(e.code()) ? kExitUsage : kExitData;
  }
}

int run_serve(pcorder::service::ServiceConfig cfg, const std::string& host, const std::string& ui_dir) {
  pcorder::service::Service service(cfg);
  pcorder::service::HttpServer server(service, ui_dir);
  const int port = server.bind(host, cfg.port);
  if (port <= 0) {
    std::cerr << "error: bad_request: cannot bind " << host << ":" << cfg.port << '\n';
    return kExitUsage;
  }
  std::cerr << "listening on http://" << host << ":" << port << '\n';
  server.listen();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-coordinates axis ordering from localized line-pattern scores"};
  app.require_subcommand(1);

  CliConfig compute_cfg;
  auto* compute = app.add_subcommand("compute", "Write profiles and the score matrix as JSON");
  add_common(compute, compute_cfg);

  CliConfig order_cfg;
  auto* order = app.add_subcommand("order", "Order axes and print one axis name per line");
  add_common(order, order_cfg);
  order->add_option("--mode", order_cfg.mode, "tsp (exact up to 15 axes) or greedy")
      ->check(CLI::IsMember({"tsp", "greedy"}))
      ->capture_default_str();

  auto serve_cfg = pcorder::service::ServiceConfig::from_env();
  std::string host = "0.0.0.0";
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--port", serve_cfg.port, "Listen port (env PORT)")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--max-sync-work", serve_cfg.max_sync_work, "Async threshold in detector calls (env MAX_SYNC_WORK)")
      ->capture_default_str();
  serve->add_option("--cache-bytes", serve_cfg.cache_bytes, "Analysis cache budget (env CACHE_BYTES)")
      ->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Directory of static UI assets served at /ui");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*compute) return run_batch(compute_cfg, false);
  if (*order) return run_batch(order_cfg, true);
  return run_serve(serve_cfg, host, ui_dir);
}
