#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "likesim/ingest.hpp"
#include "likesim/sim.hpp"
#include "likesim/stats.hpp"

namespace likesim::cli {

inline constexpr int kSchemaVersion = 1;

namespace detail {

using json = nlohmann::ordered_json;

// shortest round-trip representation; stable across runs
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// compact beta tag for file names: 1, 20, 2.5, 1000000
inline std::string beta_tag(double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", beta);
  return buf;
}

inline json to_json(const stats::DistributionSummary& s) {
  json j;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["skewness"] = s.skewness ? json(*s.skewness) : json(nullptr);
  j["excess_kurtosis"] =
      s.excess_kurtosis ? json(*s.excess_kurtosis) : json(nullptr);
  j["jarque_bera"] = s.jarque_bera ? json(*s.jarque_bera) : json(nullptr);
  j["hill_tail_index"] =
      s.hill_tail_index ? json(*s.hill_tail_index) : json(nullptr);
  j["regime"] = std::string(stats::to_string(s.regime));
  return j;
}

inline json to_json(const ingest::CategoryCounts& c) {
  json j;
  j["pages"] = c.pages;
  j["posts"] = c.posts;
  j["likes"] = c.likes;
  j["likers"] = c.likers;
  return j;
}

inline json summary_json(const ingest::DatasetSummary& summary) {
  json j;
  j["schema_version"] = kSchemaVersion;
  for (auto category : ingest::all_categories)
    j[std::string(ingest::to_string(category))] =
        to_json(summary.by_category.at(category));
  return j;
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// two-column plot-ready CSV; degenerate samples yield a header-only file
inline void write_histogram_csv(const std::filesystem::path& path,
                                std::span<const double> samples,
                                std::size_t bins = 0) {
  std::string body = "bin_center,density\n";
  try {
    const stats::Histogram h = stats::estimate_pdf(samples, bins);
    for (std::size_t i = 0; i < h.densities.size(); ++i) {
      const double center = 0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]);
      body += format_double(center);
      body += ',';
      body += format_double(h.densities[i]);
      body += '\n';
    }
  } catch (const std::domain_error&) {
    // fewer than two samples or zero range: keep the header only
  }
  write_text_file(path, body);
}

struct RegimeRow {
  std::string key;  // beta value or category name
  std::string observable;
  stats::DistributionSummary summary;
};

inline void print_regime_table(std::ostream& out, const char* key_header,
                               std::span<const RegimeRow> rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-16s %-16s %11s %11s %12s %9s",
                key_header, "observable", "regime", "skewness", "ex_kurt",
                "jarque_bera", "hill");
  out << line << '\n';
  for (const auto& row : rows) {
    const auto& s = row.summary;
    auto opt = [](const std::optional<double>& v, char* buf, std::size_t n) {
      if (v)
        std::snprintf(buf, n, "%.4g", *v);
      else
        std::snprintf(buf, n, "-");
      return buf;
    };
    char sk[32], ku[32], jb[32], hi[32];
    std::snprintf(line, sizeof line, "%-12s %-16s %-16s %11s %11s %12s %9s",
                  row.key.c_str(), row.observable.c_str(),
                  std::string(stats::to_string(s.regime)).c_str(),
                  opt(s.skewness, sk, sizeof sk), opt(s.excess_kurtosis, ku, sizeof ku),
                  opt(s.jarque_bera, jb, sizeof jb),
                  opt(s.hill_tail_index, hi, sizeof hi));
    out << line << '\n';
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  sim::SimConfig config;
  std::vector<double> betas;
  std::string out_dir = ".";
};

inline int cmd_simulate(const SimulateOptions& options, std::ostream& out) {
  sim::SimConfig config = options.config;
  if (options.betas.empty())
    throw std::invalid_argument("simulate: provide --beta or --beta-sweep");
  for (double beta : options.betas) {
    config.beta = beta;
    sim::validate(config);  // usage error on any out-of-range flag
  }
  std::vector<double> sorted_betas = options.betas;
  std::sort(sorted_betas.begin(), sorted_betas.end());
  if (std::adjacent_find(sorted_betas.begin(), sorted_betas.end()) !=
      sorted_betas.end())
    throw std::invalid_argument(
        "simulate: duplicate beta values would overwrite each other's "
        "histogram files");

  const auto started = std::chrono::steady_clock::now();
  const auto sweep = sim::run_sweep(options.config, options.betas);
  const std::chrono::duration<double> sweep_seconds =
      std::chrono::steady_clock::now() - started;

  const std::filesystem::path dir(options.out_dir);
  std::filesystem::create_directories(dir);

  detail::json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["command"] = "simulate";
  {
    detail::json cfg;
    cfg["posts"] = options.config.n_posts;
    cfg["users"] = options.config.n_users;
    cfg["iterations"] = options.config.iterations;
    cfg["seed"] = options.config.seed;
    cfg["gamma"] = options.config.gamma;
    cfg["activity_max"] = sim::resolved_activity_max(options.config);
    cfg["pref_max"] = options.config.pref_max;
    cfg["betas"] = options.betas;
    manifest["config"] = cfg;
  }

  std::vector<detail::RegimeRow> table;
  detail::json results = detail::json::array();
  for (const auto& [beta, experiment] : sweep) {
    const std::string tag = detail::beta_tag(beta);
    const auto user_summary = stats::summarize_distribution(experiment.likes_per_user);
    const auto post_summary = stats::summarize_distribution(experiment.likes_per_post);

    const std::string user_hist = "hist_beta" + tag + "_likes_per_user.csv";
    const std::string post_hist = "hist_beta" + tag + "_likes_per_post.csv";
    detail::write_histogram_csv(dir / user_hist, experiment.likes_per_user);
    detail::write_histogram_csv(dir / post_hist, experiment.likes_per_post);

    detail::json r;
    r["beta"] = beta;
    double mean_total = 0.0;
    detail::json iteration_summaries = detail::json::array();
    for (const auto& it : experiment.iterations) {
      detail::json ij;
      ij["total_likes"] = it.total_likes;
      ij["mean_likes_per_user"] = it.mean_likes_per_user;
      ij["mean_likes_per_post"] = it.mean_likes_per_post;
      ij["variance_likes_per_user"] = it.variance_likes_per_user;
      ij["variance_likes_per_post"] = it.variance_likes_per_post;
      iteration_summaries.push_back(std::move(ij));
      mean_total += static_cast<double>(it.total_likes);
    }
    mean_total /= static_cast<double>(experiment.iterations.size());
    r["mean_total_likes"] = mean_total;
    r["iteration_summaries"] = std::move(iteration_summaries);
    r["likes_per_user"] = detail::to_json(user_summary);
    r["likes_per_post"] = detail::to_json(post_summary);
    r["histograms"] = {{"likes_per_user", user_hist},
                       {"likes_per_post", post_hist}};
    results.push_back(std::move(r));

    table.push_back({tag, "likes_per_user", user_summary});
    table.push_back({tag, "likes_per_post", post_summary});
  }
  manifest["results"] = std::move(results);
  detail::write_json_file(dir / "manifest.json", manifest);

  detail::print_regime_table(out, "beta", table);
  // wall clock goes to stdout only: artifacts stay byte-reproducible
  out << "wall_clock_seconds " << detail::format_double(sweep_seconds.count())
      << '\n';
  out << "wrote " << (dir / "manifest.json").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  std::string input;
  std::string out_dir = ".";
};

inline int cmd_analyze(const AnalyzeOptions& options, std::ostream& out,
                       std::ostream& err) {
  std::ifstream in(options.input, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open input file: " + options.input);

  ingest::SummaryAccumulator summary_acc;
  ingest::ConsumptionAccumulator consumption_acc;
  std::array<stats::LifetimeAccumulator, 3> lifetime_acc;
  std::uint64_t row_errors = 0;

  ingest::for_each_event(
      in,
      [&](const ingest::LikeEvent& e) {
        summary_acc.add(e);
        consumption_acc.add(e);
        lifetime_acc[static_cast<std::size_t>(e.category)].add(
            e.user_id, e.page_id, e.timestamp);
      },
      [&](const ingest::RowError& e) {
        ++row_errors;
        err << options.input << ":" << e.line << ": " << e.message << '\n';
      });

  const ingest::DatasetSummary summary = summary_acc.finish();
  const ingest::ConsumptionSamples samples = consumption_acc.finish();

  const std::filesystem::path dir(options.out_dir);
  std::filesystem::create_directories(dir);
  detail::write_json_file(dir / "summary.json", detail::summary_json(summary));

  detail::json analysis;
  analysis["schema_version"] = kSchemaVersion;
  analysis["command"] = "analyze";
  analysis["input"] = options.input;
  analysis["row_errors"] = row_errors;
  detail::json categories = detail::json::object();
  std::vector<detail::RegimeRow> table;

  for (auto category : ingest::all_categories) {
    if (summary.by_category.at(category).likes == 0) continue;
    const std::string name(ingest::to_string(category));

    auto counts_of = [](const std::map<std::string, std::uint64_t>& m) {
      std::vector<double> v;
      v.reserve(m.size());
      for (const auto& [id, n] : m) v.push_back(static_cast<double>(n));
      return v;
    };
    const auto user_counts = counts_of(samples.likes_per_user.at(category));
    const auto post_counts = counts_of(samples.likes_per_post.at(category));
    const auto lifetimes_i =
        lifetime_acc[static_cast<std::size_t>(category)].finish();
    std::vector<double> lifetimes(lifetimes_i.begin(), lifetimes_i.end());

    const auto user_summary = stats::summarize_distribution(user_counts);
    const auto post_summary = stats::summarize_distribution(post_counts);
    const auto lifetime_summary = stats::summarize_distribution(lifetimes);

    // histograms of the normalized counts (one [0,1] axis per category)
    const std::string user_hist = "hist_" + name + "_likes_per_user.csv";
    const std::string post_hist = "hist_" + name + "_likes_per_post.csv";
    const std::string lifetime_hist = "hist_" + name + "_lifetime.csv";
    detail::write_histogram_csv(dir / user_hist,
                                samples.normalized_likes_per_user.at(category));
    detail::write_histogram_csv(dir / post_hist,
                                samples.normalized_likes_per_post.at(category));
    detail::write_histogram_csv(dir / lifetime_hist, lifetimes);

    detail::json c;
    c["likes_per_user"] = detail::to_json(user_summary);
    c["likes_per_post"] = detail::to_json(post_summary);
    c["lifetime"] = detail::to_json(lifetime_summary);
    c["histograms"] = {{"likes_per_user", user_hist},
                       {"likes_per_post", post_hist},
                       {"lifetime", lifetime_hist}};
    categories[name] = std::move(c);

    table.push_back({name, "likes_per_user", user_summary});
    table.push_back({name, "likes_per_post", post_summary});
    table.push_back({name, "lifetime", lifetime_summary});
  }
  analysis["categories"] = std::move(categories);
  detail::write_json_file(dir / "analysis.json", analysis);

  if (!table.empty()) detail::print_regime_table(out, "category", table);
  out << "rows with errors: " << row_errors << '\n';
  out << "wrote " << (dir / "summary.json").string() << " and "
      << (dir / "analysis.json").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// gen-synthetic
// ---------------------------------------------------------------------------

struct GenSyntheticOptions {
  ingest::FixtureSpec spec;
  std::string out_dir = ".";
};

inline int cmd_gen_synthetic(const GenSyntheticOptions& options,
                             std::ostream& out) {
  ingest::validate(options.spec);  // infeasible spec -> usage error

  const std::filesystem::path dir(options.out_dir);
  std::filesystem::create_directories(dir);

  std::ofstream events(dir / "events.csv", std::ios::binary);
  if (!events)
    throw std::runtime_error("cannot open " + (dir / "events.csv").string());
  const ingest::DatasetSummary summary =
      ingest::generate_fixture(options.spec, events);
  events.close();
  if (!events) throw std::runtime_error("write failed: events.csv");

  detail::json ground_truth;
  ground_truth["schema_version"] = kSchemaVersion;
  ground_truth["command"] = "gen-synthetic";
  {
    detail::json spec;
    spec["users"] = options.spec.n_users;
    spec["posts"] = options.spec.n_posts;
    spec["likes"] = options.spec.n_likes;
    spec["likers"] = options.spec.n_likers;
    spec["regime"] = options.spec.regime == ingest::FixtureSpec::Regime::uniform
                         ? "uniform"
                         : "pareto";
    spec["t0"] = options.spec.t_begin;
    spec["t1"] = options.spec.t_end;
    spec["seed"] = options.spec.seed;
    spec["category"] = std::string(ingest::to_string(options.spec.category));
    spec["page_id"] = options.spec.page_id;
    ground_truth["spec"] = spec;
  }
  ground_truth["summary"] = detail::summary_json(summary);
  detail::write_json_file(dir / "ground_truth.json", ground_truth);

  out << "wrote " << (dir / "events.csv").string() << " ("
      << options.spec.n_likes << " events) and "
      << (dir / "ground_truth.json").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

/// Parses and dispatches. Exit codes: 0 success, 1 runtime/data failure,
/// 2 usage or spec error.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Content-consumption simulator and engagement statistics"};
  app.require_subcommand(1);

  SimulateOptions simulate_options;
  double single_beta = 0.0;
  auto* simulate = app.add_subcommand(
      "simulate", "Run the consumption model over one or more beta values");
  simulate->add_option("--posts", simulate_options.config.n_posts,
                       "number of posts (P)")->capture_default_str();
  simulate->add_option("--users", simulate_options.config.n_users,
                       "number of users (U)")->capture_default_str();
  auto* beta_opt =
      simulate->add_option("--beta", single_beta, "single beta value");
  auto* sweep_opt = simulate
                        ->add_option("--beta-sweep", simulate_options.betas,
                                     "comma-separated beta values")
                        ->delimiter(',');
  beta_opt->excludes(sweep_opt);
  sweep_opt->excludes(beta_opt);
  simulate->add_option("--iterations", simulate_options.config.iterations,
                       "iterations per beta")->capture_default_str();
  simulate->add_option("--gamma", simulate_options.config.gamma,
                       "power-law exponent")->capture_default_str();
  simulate->add_option("--activity-max", simulate_options.config.activity_max,
                       "upper support of the activity draw (0 = posts)")->capture_default_str();
  simulate->add_option("--pref-max", simulate_options.config.pref_max,
                       "upper support of the raw preference draw")->capture_default_str();
  simulate->add_option("--seed", simulate_options.config.seed, "root seed")->capture_default_str();
  simulate->add_option("--out", simulate_options.out_dir, "output directory")->capture_default_str();

  AnalyzeOptions analyze_options;
  auto* analyze =
      app.add_subcommand("analyze", "Analyze a like-event CSV log");
  analyze->add_option("--input", analyze_options.input, "event CSV path")
      ->required();
  analyze->add_option("--out", analyze_options.out_dir, "output directory")->capture_default_str();

  GenSyntheticOptions gen_options;
  std::string regime_name = "uniform";
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "Generate a synthetic like-event log");
  gen->add_option("--users", gen_options.spec.n_users, "user pool size")->capture_default_str();
  gen->add_option("--posts", gen_options.spec.n_posts, "post pool size")->capture_default_str();
  gen->add_option("--likes", gen_options.spec.n_likes, "number of like events")->capture_default_str();
  gen->add_option("--likers", gen_options.spec.n_likers,
                  "exact distinct likers (0 = unconstrained)")->capture_default_str();
  gen->add_option("--regime", regime_name,
                  "planted activity/popularity shape")->capture_default_str()
      ->check(CLI::IsMember({"uniform", "pareto"}));
  gen->add_option("--t0", gen_options.spec.t_begin, "window start (seconds)")->capture_default_str();
  gen->add_option("--t1", gen_options.spec.t_end, "window end (seconds)")->capture_default_str();
  gen->add_option("--seed", gen_options.spec.seed, "root seed")->capture_default_str();
  gen->add_option("--out", gen_options.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      if (beta_opt->count() > 0) simulate_options.betas = {single_beta};
      return cmd_simulate(simulate_options, out);
    }
    if (analyze->parsed()) return cmd_analyze(analyze_options, out, err);
    if (gen->parsed()) {
      gen_options.spec.regime = regime_name == "pareto"
                                    ? ingest::FixtureSpec::Regime::pareto
                                    : ingest::FixtureSpec::Regime::uniform;
      if (gen_options.spec.n_users == 0)
        gen_options.spec.n_users = gen_options.spec.n_likers;
      return cmd_gen_synthetic(gen_options, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("likesim");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

inline int run(int argc, const char* const* argv) {
  return run(argc, argv, std::cout, std::cerr);
}

}  // namespace likesim::cli
