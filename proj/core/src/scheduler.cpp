/*
 * Copyright 2026 The dcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dcnsim/scheduler.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

// FIFO buffer of resident input tiles shared by all policies.
class TileBuffer {
 public:
  TileBuffer(SchedulerState& state, ScheduleResult& result)
      : state_(state), result_(result), pin_(state.oc.size()) {}

  void begin(TraceStep& step) {
    step_ = &step;
    hits_ = BitVector(state_.oc.size());
  }
  void end() { step_->reuses = hits_.ones(); }

  bool resident(std::size_t t) const noexcept { return state_.oc.test(t); }

  // Makes t resident; the victim is the oldest tile not in `pinned`.
  void fetch(std::size_t t, const BitVector& pinned) {
    if (resident(t)) {
      hits_.set(t);
      return;
    }
    if (state_.fifo.size() >= state_.capacity) {
      auto victim = std::find_if(state_.fifo.begin(), state_.fifo.end(),
                                 [&](std::size_t f) { return !pinned.test(f); });
      if (victim == state_.fifo.end()) {
        throw std::logic_error("tile buffer: every resident tile is pinned");
      }
      state_.oc.reset(*victim);
      step_->evictions.push_back(*victim);
      state_.fifo.erase(victim);
      ++result_.evictions;
    }
    state_.fifo.push_back(t);
    state_.oc.set(t);
    step_->loads.push_back(t);
    ++result_.loads;
  }

  // Runs one unit (an output tile or one output feature) whose inputs are `needed`,
  // fetched in `order`. Oversize units stream: resident tiles are consumed first,
  // then each missing tile is loaded and consumed on its own.
  void run_unit(const BitVector& needed, const std::vector<std::size_t>& order,
                OversizeMode oversize, std::size_t output_tile) {
    if (needed.count() <= state_.capacity) {
      for (std::size_t t : order) fetch(t, needed);
      return;
    }
    if (oversize == OversizeMode::kError) {
      throw InfeasibleError("output tile " + std::to_string(output_tile) + " needs " +
                                std::to_string(needed.count()) + " input tiles but the buffer holds " +
                                std::to_string(state_.capacity),
                            output_tile);
    }
    step_->streamed = true;
    for (std::size_t t : order) {
      if (resident(t)) hits_.set(t);
    }
    for (std::size_t t : order) {
      if (resident(t)) continue;
      pin_.set(t);
      fetch(t, pin_);
      pin_.reset(t);
    }
  }

 private:
  SchedulerState& state_;
  ScheduleResult& result_;
  BitVector pin_;
  BitVector hits_;
  TraceStep* step_ = nullptr;
};

BitVector pending_rows(const TileDependencyTable& tdt) {
  BitVector os(tdt.n_out);
  for (std::size_t r = 0; r < tdt.n_out; ++r) {
    if (tdt.rows[r].any()) os.set(r);
  }
  return os;
}

void check_features(const TileDependencyTable& tdt, const FeatureDependencies& features) {
  if (features.size() != tdt.n_out) {
    throw ConfigError("feature dependencies cover " + std::to_string(features.size()) +
                      " output tiles, the TDT has " + std::to_string(tdt.n_out));
  }
  for (std::size_t r = 0; r < tdt.n_out; ++r) {
    BitVector all(tdt.n_in);
    for (const auto& f : features[r]) {
      if (f.size() != tdt.n_in) throw ConfigError("feature dependency width differs from the TDT");
      all |= f;
    }
    if (!(all == tdt.rows[r])) {
      throw ConfigError("feature dependencies of output tile " + std::to_string(r) +
                        " disagree with its TDT row");
    }
  }
}

TraceStep& open_step(ScheduleResult& result, std::size_t output_tile) {
  TraceStep& s = result.trace.emplace_back();
  s.step = result.trace.size() - 1;
  s.output_tile = output_tile;
  result.oid.push_back(output_tile);
  return s;
}

void close_step(ScheduleResult& result, TileBuffer& buffer) {
  buffer.end();
  if (result.trace.back().streamed) ++result.streamed_steps;
}

void run_naive(const TileDependencyTable& tdt, const ScheduleOptions& opt, SchedulerState& state,
               ScheduleResult& result) {
  TileBuffer buffer(state, result);
  BitVector single(tdt.n_in);
  for (std::size_t r : state.os.ones()) {
    TraceStep& step = open_step(result, r);
    buffer.begin(step);
    if (opt.features) {
      for (const auto& f : (*opt.features)[r]) {
        if (f.any()) buffer.run_unit(f, f.ones(), opt.oversize, r);
      }
    } else {
      for (std::size_t t : tdt.rows[r].ones()) {
        single.set(t);
        buffer.run_unit(single, {t}, opt.oversize, r);
        single.reset(t);
      }
    }
    close_step(result, buffer);
    result.iid.push_back(step.loads);
  }
}

void run_tdt_only(const TileDependencyTable& tdt, const ScheduleOptions& opt,
                  SchedulerState& state, ScheduleResult& result) {
  TileBuffer buffer(state, result);
  for (std::size_t r : state.os.ones()) {
    TraceStep& step = open_step(result, r);
    buffer.begin(step);
    auto order = tdt.rows[r].ones();
    buffer.run_unit(tdt.rows[r], order, opt.oversize, r);
    close_step(result, buffer);
    result.iid.push_back(std::move(order));
  }
}

void run_tdt_sched(const TileDependencyTable& tdt, const ScheduleOptions& opt,
                   SchedulerState& state, ScheduleResult& result) {
  if (state.os.none()) return;
  TileBuffer buffer(state, result);
  const BitVector none(tdt.n_in);
  std::size_t curr = next_output_tile(state, tdt, std::nullopt);
  state.os.reset(curr);
  for (;;) {
    // Pre-scheduling: the successor is chosen before the current tile's loads are issued.
    std::optional<std::size_t> next;
    if (state.os.any()) {
      next = next_output_tile(state, tdt, curr);
      state.os.reset(*next);
    }
    auto order = order_input_tiles(tdt.rows[curr], next ? tdt.rows[*next] : none, state.oc);
    TraceStep& step = open_step(result, curr);
    buffer.begin(step);
    buffer.run_unit(tdt.rows[curr], order, opt.oversize, curr);
    close_step(result, buffer);
    result.iid.push_back(std::move(order));
    if (!next) break;
    curr = *next;
  }
}

}  // namespace

std::string_view to_string(SchedulePolicy p) noexcept {
  switch (p) {
    case SchedulePolicy::kNaive:
      return "naive";
    case SchedulePolicy::kTdtOnly:
      return "tdt_only";
    case SchedulePolicy::kTdtSched:
      return "tdt_sched";
  }
  return "?";
}

SchedulePolicy parse_policy(std::string_view name) {
  std::string n;
  for (char ch : name) n += ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (n == "naive") return SchedulePolicy::kNaive;
  if (n == "tdt_only") return SchedulePolicy::kTdtOnly;
  if (n == "tdt_sched") return SchedulePolicy::kTdtSched;
  throw ConfigError("unknown scheduler policy '" + std::string(name) +
                    "' (expected naive, tdt_only or tdt_sched)");
}

std::size_t next_output_tile(SchedulerState& state, const TileDependencyTable& tdt,
                             std::optional<std::size_t> curr) {
  std::size_t best = tdt.n_out;
  std::size_t best_score = 0;
  std::fill(state.tr.begin(), state.tr.end(), 0);
  state.tr.resize(tdt.n_out, 0);
  for (std::size_t i : state.os.ones()) {
    const std::size_t score = curr ? tdt.rows[*curr].count_and(tdt.rows[i]) : tdt.rows[i].count();
    state.tr[i] = score;
    if (best == tdt.n_out || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  if (best == tdt.n_out) throw std::logic_error("next_output_tile: no pending output tile");
  return best;
}

std::vector<std::size_t> order_input_tiles(const BitVector& target, const BitVector& lookahead,
                                           const BitVector& oc) {
  const BitVector loaded = oc & target;
  BitVector last = lookahead & target;
  last.and_not(loaded);
  BitVector seq = target;
  seq.and_not(loaded);
  seq.and_not(last);
  std::vector<std::size_t> order = loaded.ones();
  for (std::size_t t : seq.ones()) order.push_back(t);
  for (std::size_t t : last.ones()) order.push_back(t);
  return order;
}

ScheduleResult run_schedule(const TileDependencyTable& tdt, std::size_t capacity,
                            SchedulePolicy policy, const ScheduleOptions& options) {
  if (capacity == 0) throw ConfigError("buffer capacity must be at least one tile");
  if (tdt.rows.size() != tdt.n_out) throw ConfigError("TDT row count differs from n_out");
  for (const auto& r : tdt.rows) {
    if (r.size() != tdt.n_in) throw ConfigError("TDT row width differs from n_in");
  }
  if (options.features) check_features(tdt, *options.features);

  ScheduleResult result;
  result.policy = policy;
  result.capacity = capacity;
  SchedulerState state(tdt.n_out, tdt.n_in, capacity);
  state.os = pending_rows(tdt);
  switch (policy) {
    case SchedulePolicy::kNaive:
      run_naive(tdt, options, state, result);
      break;
    case SchedulePolicy::kTdtOnly:
      run_tdt_only(tdt, options, state, result);
      break;
    case SchedulePolicy::kTdtSched:
      run_tdt_sched(tdt, options, state, result);
      break;
  }
  return result;
}

std::string format_trace(const ScheduleResult& result) {
  auto list = [](std::ostringstream& os, const char* key, const std::vector<std::size_t>& v) {
    os << ", " << key << "=[";
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    os << ']';
  };
  std::ostringstream os;
  for (const auto& s : result.trace) {
    os << s.step << ", " << s.output_tile;
    list(os, "loads", s.loads);
    list(os, "evictions", s.evictions);
    list(os, "reuses", s.reuses);
    os << '\n';
  }
  return os.str();
}

}  // namespace dcnsim
