#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "likesim/distributions.hpp"
#include "likesim/random.hpp"

namespace likesim::sim {

// ---------------------------------------------------------------------------
// Population
// ---------------------------------------------------------------------------

/// One simulated content item.
struct Post {
  std::uint32_t id = 0;
  double attractiveness = 0.0;  // in [0, 1)
};

/// One simulated consumer. `preference` is the unity-normalized form of
/// `preference_raw` across the whole sampled population; the user likes a
/// post only if its attractiveness strictly exceeds `preference`, and never
/// more than `activity` posts per iteration.
struct UserAgent {
  std::uint32_t id = 0;
  std::uint32_t activity = 1;
  double preference_raw = 0.0;
  double preference = 0.0;  // in [0, 1]
};

/// Full parameterization of one experiment.
struct SimConfig {
  std::uint32_t n_posts = 10'000;
  std::uint32_t n_users = 20'000;
  double beta = 1.0;        // attractiveness heterogeneity, in [1, 1e6]
  double gamma = 1.5;       // power-law exponent for activity and preference
  std::uint32_t iterations = 100;
  std::uint64_t seed = 0;
  double activity_max = 0.0;  // upper support of the activity draw; 0 = n_posts
  double pref_max = 1e4;      // upper support of the raw preference draw
};

inline double resolved_activity_max(const SimConfig& config) {
  return config.activity_max > 0.0 ? config.activity_max
                                   : static_cast<double>(config.n_posts);
}

inline void validate(const SimConfig& config) {
  if (config.n_posts == 0)
    throw std::invalid_argument("sim: n_posts must be positive");
  if (config.n_users < 2)
    throw std::invalid_argument(
        "sim: n_users must be at least 2 (preference normalization is "
        "degenerate for a single user)");
  if (!(config.beta >= 1.0 && config.beta <= 1e6))
    throw std::invalid_argument("sim: beta must lie in [1, 1e6]");
  if (!(config.gamma > 1.0))
    throw std::invalid_argument("sim: gamma must exceed 1");
  if (config.iterations == 0)
    throw std::invalid_argument("sim: iterations must be positive");
  if (config.activity_max != 0.0 && !(config.activity_max >= 1.0))
    throw std::invalid_argument("sim: activity_max must be >= 1");
  if (!(config.pref_max > 1.0))
    throw std::invalid_argument("sim: pref_max must exceed 1");
}

struct Population {
  std::vector<Post> posts;
  std::vector<UserAgent> users;
};

/// Samples a fresh population: post attractiveness i.i.d. Beta(1, beta);
/// user activity = floor of a truncated power-law draw clamped to >= 1;
/// user preference = unity-normalized power-law draws across all users.
///
/// Draw order (posts, then activities, then raw preferences) is part of the
/// reproducibility contract.
inline Population generate_population(const SimConfig& config, Engine& rng) {
  validate(config);
  Population pop;

  const dist::BetaParams beta_params{1.0, config.beta};
  pop.posts.resize(config.n_posts);
  for (std::uint32_t i = 0; i < config.n_posts; ++i) {
    pop.posts[i].id = i;
    pop.posts[i].attractiveness = dist::sample_beta(beta_params, uniform_unit(rng));
  }

  const double activity_hi = resolved_activity_max(config);
  pop.users.resize(config.n_users);
  if (activity_hi > 1.0) {
    const dist::TruncatedPowerLawParams activity_params{config.gamma, 1.0,
                                                        activity_hi};
    for (auto& user : pop.users) {
      const double draw =
          dist::sample_truncated_power_law(activity_params, uniform_unit(rng));
      user.activity = std::max<std::uint32_t>(
          1, static_cast<std::uint32_t>(std::floor(draw)));
    }
  } else {
    for (auto& user : pop.users) user.activity = 1;  // support collapses to {1}
  }

  const dist::TruncatedPowerLawParams pref_params{config.gamma, 1.0,
                                                  config.pref_max};
  std::vector<double> raw(config.n_users);
  for (auto& x : raw)
    x = dist::sample_truncated_power_law(pref_params, uniform_unit(rng));
  const std::vector<double> normalized = dist::unity_normalize(raw);
  for (std::uint32_t i = 0; i < config.n_users; ++i) {
    pop.users[i].id = i;
    pop.users[i].preference_raw = raw[i];
    pop.users[i].preference = normalized[i];
  }
  return pop;
}

// ---------------------------------------------------------------------------
// Iteration
// ---------------------------------------------------------------------------

/// Like counts from one pass over one population.
struct IterationResult {
  std::vector<std::uint32_t> likes_per_user;
  std::vector<std::uint32_t> likes_per_post;
  std::uint64_t total_likes = 0;
};

/// Executes the like rule once. For each user the qualifying set is
/// Q = { posts : attractiveness > preference } (strict); the user likes all
/// of Q when it fits her activity budget, otherwise a uniformly random
/// activity-sized subset of Q.
inline IterationResult run_iteration(std::span<const Post> posts,
                                     std::span<const UserAgent> users,
                                     Engine& rng) {
  IterationResult result;
  result.likes_per_user.assign(users.size(), 0);
  result.likes_per_post.assign(posts.size(), 0);

  // posts sorted by attractiveness descending: any qualifying set is a prefix;
  // ties break on id so the order is fully specified
  std::vector<std::uint32_t> order(posts.size());
  for (std::uint32_t i = 0; i < posts.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (posts[a].attractiveness != posts[b].attractiveness)
      return posts[a].attractiveness > posts[b].attractiveness;
    return a < b;
  });
  std::vector<double> sorted_v(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i)
    sorted_v[i] = posts[order[i]].attractiveness;

  std::unordered_set<std::uint64_t> picked;
  for (std::size_t ui = 0; ui < users.size(); ++ui) {
    const UserAgent& user = users[ui];
    const auto qualifying = static_cast<std::uint64_t>(
        std::lower_bound(sorted_v.begin(), sorted_v.end(), user.preference,
                         std::greater<>()) -
        sorted_v.begin());
    const std::uint64_t budget = user.activity;
    if (qualifying <= budget) {
      for (std::uint64_t j = 0; j < qualifying; ++j)
        ++result.likes_per_post[order[j]];
      result.likes_per_user[ui] = static_cast<std::uint32_t>(qualifying);
    } else {
      // Floyd's algorithm: uniform budget-sized subset of the prefix
      picked.clear();
      for (std::uint64_t j = qualifying - budget; j < qualifying; ++j) {
        const std::uint64_t t = uniform_below(rng, j + 1);
        std::uint64_t pick = t;
        if (!picked.insert(t).second) {
          pick = j;  // t already taken; j cannot be (all prior picks are < j)
          picked.insert(j);
        }
        ++result.likes_per_post[order[pick]];
      }
      result.likes_per_user[ui] = static_cast<std::uint32_t>(budget);
    }
    result.total_likes += result.likes_per_user[ui];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

/// Scalar digest of one iteration; across-iteration means of these fields are
/// the "averaged" results of an experiment.
struct IterationSummary {
  std::uint64_t total_likes = 0;
  double mean_likes_per_user = 0.0;
  double mean_likes_per_post = 0.0;
  double variance_likes_per_user = 0.0;
  double variance_likes_per_post = 0.0;
};

/// Pooled samples (all iterations concatenated, iteration order) plus the
/// per-iteration summaries of one experiment.
struct ExperimentResult {
  std::vector<double> likes_per_user;
  std::vector<double> likes_per_post;
  std::vector<IterationSummary> iterations;
};

/// Called after each iteration with that iteration's fresh population and
/// counts; invocations may come from worker threads but are serialized.
using IterationObserver = std::function<void(
    std::uint32_t iteration, const Population&, const IterationResult&)>;

namespace detail {

inline constexpr std::uint64_t kIterationStream = 0x11;
inline constexpr std::uint64_t kSweepStream = 0x22;

}  // namespace detail

/// Runs `config.iterations` independent population/iteration pairs. Each
/// iteration draws its generator from (seed, iteration index), so execution
/// order and thread count never change the result: parallel and serial runs
/// are bit-identical. `max_threads` 0 picks the hardware concurrency.
inline ExperimentResult run_experiment(const SimConfig& config,
                                       const IterationObserver& observer = {},
                                       unsigned max_threads = 0) {
  validate(config);
  const std::uint32_t iterations = config.iterations;
  std::vector<IterationResult> results(iterations);

  auto run_one = [&](std::uint32_t i) {
    Engine rng(derive_seed(config.seed, detail::kIterationStream, i));
    Population pop = generate_population(config, rng);
    results[i] = run_iteration(pop.posts, pop.users, rng);
    return pop;  // kept alive only for the observer
  };

  if (max_threads == 0)
    max_threads = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(max_threads, iterations);

  if (workers <= 1) {
    for (std::uint32_t i = 0; i < iterations; ++i) {
      const Population pop = run_one(i);
      if (observer) observer(i, pop, results[i]);
    }
  } else {
    std::atomic<std::uint32_t> next{0};
    std::mutex observer_mutex;
    auto worker = [&] {
      for (;;) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= iterations) return;
        const Population pop = run_one(i);
        if (observer) {
          const std::lock_guard<std::mutex> lock(observer_mutex);
          observer(i, pop, results[i]);
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult out;
  out.likes_per_user.reserve(std::size_t{iterations} * config.n_users);
  out.likes_per_post.reserve(std::size_t{iterations} * config.n_posts);
  out.iterations.reserve(iterations);
  const auto population_variance = [](std::span<const std::uint32_t> counts,
                                      double mean) {
    double m2 = 0.0;
    for (auto c : counts) {
      const double d = static_cast<double>(c) - mean;
      m2 += d * d;
    }
    return m2 / static_cast<double>(counts.size());
  };
  for (std::uint32_t i = 0; i < iterations; ++i) {
    const IterationResult& r = results[i];
    for (auto c : r.likes_per_user)
      out.likes_per_user.push_back(static_cast<double>(c));
    for (auto c : r.likes_per_post)
      out.likes_per_post.push_back(static_cast<double>(c));
    IterationSummary s;
    s.total_likes = r.total_likes;
    s.mean_likes_per_user =
        static_cast<double>(r.total_likes) / static_cast<double>(config.n_users);
    s.mean_likes_per_post =
        static_cast<double>(r.total_likes) / static_cast<double>(config.n_posts);
    s.variance_likes_per_user =
        population_variance(r.likes_per_user, s.mean_likes_per_user);
    s.variance_likes_per_post =
        population_variance(r.likes_per_post, s.mean_likes_per_post);
    out.iterations.push_back(s);
  }
  return out;
}

/// One experiment per beta value, keyed by beta in input order. The first
/// sweep point runs with the base seed (a one-element sweep reproduces
/// `run_experiment` exactly); later points derive independent seeds from
/// their position in the list.
inline std::vector<std::pair<double, ExperimentResult>> run_sweep(
    const SimConfig& base, std::span<const double> betas,
    const IterationObserver& observer = {}, unsigned max_threads = 0) {
  if (betas.empty())
    throw std::invalid_argument("run_sweep: beta list must be non-empty");
  std::vector<std::pair<double, ExperimentResult>> out;
  out.reserve(betas.size());
  for (std::size_t j = 0; j < betas.size(); ++j) {
    SimConfig config = base;
    config.beta = betas[j];
    config.seed = j == 0 ? base.seed
                         : derive_seed(base.seed, detail::kSweepStream, j);
    out.emplace_back(betas[j], run_experiment(config, observer, max_threads));
  }
  return out;
}

}  // namespace likesim::sim
