#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "likesim/distributions.hpp"
#include "likesim/random.hpp"

namespace likesim::ingest {

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

enum class Category { science, conspiracy, baseline };

inline constexpr std::array<Category, 3> all_categories = {
    Category::science, Category::conspiracy, Category::baseline};

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::science: return "science";
    case Category::conspiracy: return "conspiracy";
    case Category::baseline: return "baseline";
  }
  return "baseline";
}

inline std::optional<Category> parse_category(std::string_view s) {
  if (s == "science") return Category::science;
  if (s == "conspiracy") return Category::conspiracy;
  if (s == "baseline") return Category::baseline;
  return std::nullopt;
}

/// One like record from an event log.
struct LikeEvent {
  std::string user_id;
  std::string item_id;
  std::string page_id;
  Category category = Category::baseline;
  std::int64_t timestamp = 0;  // seconds since epoch, >= 0
};

struct RowError {
  std::size_t line = 0;  // 1-based line number in the file
  std::string message;
};

/// Required header of the event CSV. Plain comma separation, no quoting.
inline constexpr std::string_view event_csv_header =
    "user_id,item_id,page_id,category,timestamp";

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  std::int64_t value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || value < 0) return std::nullopt;
  return value;
}

// splits into exactly 5 fields; nullopt when the column count is off
inline std::optional<std::array<std::string_view, 5>> split_row(
    std::string_view line) {
  std::array<std::string_view, 5> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) return std::nullopt;
    fields[i] = line.substr(start, comma - start);
    start = comma + 1;
  }
  if (line.find(',', start) != std::string_view::npos) return std::nullopt;
  fields[4] = line.substr(start);
  return fields;
}

}  // namespace detail

/// Streaming single-pass parse. Valid rows are handed to `on_event` in file
/// order; malformed rows go to `on_error` with their line number and are
/// skipped. Throws std::runtime_error when the header line is missing or
/// wrong. Memory use is constant in the number of events.
template <class EventFn, class ErrorFn>
void for_each_event(std::istream& in, EventFn&& on_event, ErrorFn&& on_error) {
  std::string line;
  if (!std::getline(in, line) || detail::strip_cr(line) != event_csv_header)
    throw std::runtime_error(
        "event log: missing or malformed header (expected \"" +
        std::string(event_csv_header) + "\")");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::strip_cr(line);
    if (row.empty()) continue;
    const auto fields = detail::split_row(row);
    if (!fields) {
      on_error(RowError{line_no, "expected 5 comma-separated fields"});
      continue;
    }
    const auto& f = *fields;
    if (f[0].empty() || f[1].empty() || f[2].empty()) {
      on_error(RowError{line_no, "empty id field"});
      continue;
    }
    const auto category = parse_category(f[3]);
    if (!category) {
      on_error(RowError{line_no,
                        "unknown category \"" + std::string(f[3]) + "\""});
      continue;
    }
    const auto timestamp = detail::parse_timestamp(f[4]);
    if (!timestamp) {
      on_error(RowError{line_no,
                        "bad timestamp \"" + std::string(f[4]) + "\""});
      continue;
    }
    on_event(LikeEvent{std::string(f[0]), std::string(f[1]), std::string(f[2]),
                       *category, *timestamp});
  }
}

struct ParseResult {
  std::vector<LikeEvent> events;
  std::vector<RowError> errors;
};

/// Convenience batch form of `for_each_event`.
inline ParseResult parse_events(std::istream& in) {
  ParseResult result;
  for_each_event(
      in, [&](LikeEvent e) { result.events.push_back(std::move(e)); },
      [&](RowError e) { result.errors.push_back(std::move(e)); });
  return result;
}

// ---------------------------------------------------------------------------
// Dataset summary
// ---------------------------------------------------------------------------

struct CategoryCounts {
  std::uint64_t pages = 0;
  std::uint64_t posts = 0;
  std::uint64_t likes = 0;
  std::uint64_t likers = 0;

  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

/// Distinct-entity counts per category; every category is present, zeroed
/// when unseen.
struct DatasetSummary {
  std::map<Category, CategoryCounts> by_category = {
      {Category::science, {}}, {Category::conspiracy, {}},
      {Category::baseline, {}}};

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

/// Streaming distinct-count aggregator; memory grows with distinct entities,
/// not with event count.
class SummaryAccumulator {
 public:
  void add(const LikeEvent& e) {
    auto& s = state_[static_cast<std::size_t>(e.category)];
    ++s.likes;
    s.pages.insert(e.page_id);
    s.posts.insert(e.item_id);
    s.likers.insert(e.user_id);
  }

  [[nodiscard]] DatasetSummary finish() const {
    DatasetSummary out;
    for (Category c : all_categories) {
      const auto& s = state_[static_cast<std::size_t>(c)];
      out.by_category[c] = CategoryCounts{s.pages.size(), s.posts.size(),
                                          s.likes, s.likers.size()};
    }
    return out;
  }

 private:
  struct State {
    std::uint64_t likes = 0;
    std::set<std::string> pages, posts, likers;
  };
  std::array<State, 3> state_;
};

inline DatasetSummary summarize(std::span<const LikeEvent> events) {
  SummaryAccumulator acc;
  for (const auto& e : events) acc.add(e);
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Consumption samples
// ---------------------------------------------------------------------------

/// Per-category like counts grouped by user and by item, with unity-normalized
/// variants (normalization scope: within category). Ordered maps keep the
/// output deterministic; normalized vectors follow the map key order.
struct ConsumptionSamples {
  std::map<Category, std::map<std::string, std::uint64_t>> likes_per_user;
  std::map<Category, std::map<std::string, std::uint64_t>> likes_per_post;
  std::map<Category, std::vector<double>> normalized_likes_per_user;
  std::map<Category, std::vector<double>> normalized_likes_per_post;
};

class ConsumptionAccumulator {
 public:
  void add(const LikeEvent& e) {
    ++samples_.likes_per_user[e.category][e.user_id];
    ++samples_.likes_per_post[e.category][e.item_id];
  }

  [[nodiscard]] ConsumptionSamples finish() const {
    ConsumptionSamples out = samples_;
    for (const auto& [category, counts] : out.likes_per_user)
      out.normalized_likes_per_user[category] = normalize(counts);
    for (const auto& [category, counts] : out.likes_per_post)
      out.normalized_likes_per_post[category] = normalize(counts);
    return out;
  }

 private:
  static std::vector<double> normalize(
      const std::map<std::string, std::uint64_t>& counts) {
    std::vector<double> values;
    values.reserve(counts.size());
    for (const auto& [id, n] : counts)
      values.push_back(static_cast<double>(n));
    return values.empty() ? values : dist::unity_normalize(values);
  }

  ConsumptionSamples samples_;
};

inline ConsumptionSamples consumption_samples(std::span<const LikeEvent> events) {
  ConsumptionAccumulator acc;
  for (const auto& e : events) acc.add(e);
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

/// Recipe for a synthetic event log. Pools of `n_users` users and `n_posts`
/// posts; exactly `n_likes` events. When `n_likers` is non-zero the log
/// contains exactly that many distinct likers. `regime` plants the per-user
/// activity and per-post popularity shape.
struct FixtureSpec {
  enum class Regime { uniform, pareto };

  std::uint32_t n_users = 0;
  std::uint32_t n_posts = 0;
  std::uint64_t n_likes = 0;
  std::uint32_t n_likers = 0;  // 0 = unconstrained
  Regime regime = Regime::uniform;
  std::int64_t t_begin = 0;
  std::int64_t t_end = 86'400;
  std::uint64_t seed = 0;
  Category category = Category::baseline;
  std::string page_id = "page_1";
};

inline void validate(const FixtureSpec& spec) {
  if (spec.t_begin < 0)
    throw std::invalid_argument(
        "fixture: t_begin must be non-negative (event timestamps are >= 0)");
  if (spec.t_begin > spec.t_end)
    throw std::invalid_argument("fixture: t_begin must not exceed t_end");
  if (spec.page_id.empty() ||
      spec.page_id.find_first_of(",\r\n") != std::string::npos)
    throw std::invalid_argument(
        "fixture: page_id must be non-empty and free of commas/newlines");
  if (spec.n_likes == 0) return;
  if (spec.n_posts == 0)
    throw std::invalid_argument("fixture: n_posts must be positive when likes > 0");
  if (spec.n_users == 0)
    throw std::invalid_argument("fixture: n_users must be positive when likes > 0");
  if (spec.n_likers > spec.n_likes)
    throw std::invalid_argument("fixture: more likers than likes is infeasible");
  if (spec.n_likers > spec.n_users)
    throw std::invalid_argument("fixture: more likers than users is infeasible");
}

namespace detail {

// heavy-tailed index in [0, pool): low indices carry most of the mass
inline std::uint64_t pareto_index(Engine& rng, std::uint64_t pool) {
  const dist::TruncatedPowerLawParams params{
      1.5, 1.0, static_cast<double>(pool) + 1.0};
  const double draw = dist::sample_truncated_power_law(params, uniform_unit(rng));
  auto idx = static_cast<std::uint64_t>(draw) - 1;
  return idx >= pool ? pool - 1 : idx;
}

inline std::uint64_t draw_index(Engine& rng, std::uint64_t pool,
                                FixtureSpec::Regime regime) {
  return regime == FixtureSpec::Regime::uniform ? uniform_below(rng, pool)
                                                : pareto_index(rng, pool);
}

}  // namespace detail

/// Writes a deterministic synthetic event CSV to `out` and returns the
/// ground-truth summary of what was actually written.
///
/// Construction: the first min(n_posts, n_likes) events cover the post pool
/// round-robin, so the requested post count is reproduced exactly whenever
/// likes >= posts. With `n_likers` = K > 0 the first K events go to K distinct
/// users and all remaining draws stay inside those K, making the liker count
/// exact. Unconstrained specs draw users from the whole pool.
inline DatasetSummary generate_fixture(const FixtureSpec& spec,
                                       std::ostream& out) {
  validate(spec);
  out << event_csv_header << '\n';

  DatasetSummary summary;
  if (spec.n_likes == 0) return summary;

  Engine rng(spec.seed);
  const std::uint64_t user_pool =
      spec.n_likers > 0 ? spec.n_likers : spec.n_users;
  const std::uint64_t time_span =
      static_cast<std::uint64_t>(spec.t_end - spec.t_begin) + 1;

  std::vector<bool> user_seen(spec.n_users, false);
  std::vector<bool> post_seen(spec.n_posts, false);
  std::uint64_t distinct_users = 0;
  std::uint64_t distinct_posts = 0;

  const std::string_view category_name = to_string(spec.category);
  std::string row;
  for (std::uint64_t i = 0; i < spec.n_likes; ++i) {
    const std::uint64_t user = (spec.n_likers > 0 && i < spec.n_likers)
                                   ? i
                                   : detail::draw_index(rng, user_pool, spec.regime);
    const std::uint64_t post = i < spec.n_posts
                                   ? i % spec.n_posts
                                   : detail::draw_index(rng, spec.n_posts, spec.regime);
    const std::int64_t timestamp =
        spec.t_begin + static_cast<std::int64_t>(uniform_below(rng, time_span));

    if (!user_seen[user]) {
      user_seen[user] = true;
      ++distinct_users;
    }
    if (!post_seen[post]) {
      post_seen[post] = true;
      ++distinct_posts;
    }

    row.clear();
    row += 'u';
    row += std::to_string(user);
    row += ",i";
    row += std::to_string(post);
    row += ',';
    row += spec.page_id;
    row += ',';
    row += category_name;
    row += ',';
    row += std::to_string(timestamp);
    row += '\n';
    out << row;
  }

  summary.by_category[spec.category] =
      CategoryCounts{1, distinct_posts, spec.n_likes, distinct_users};
  return summary;
}

}  // namespace likesim::ingest
