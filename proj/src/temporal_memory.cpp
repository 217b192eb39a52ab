#include "gridhtm/temporal_memory.hpp"

#include <algorithm>
#include <string>

#include "gridhtm/errors.hpp"

namespace gridhtm {

void TmParams::validate() const {
  using detail::require_config;
  require_config(column_count > 0, "tm.column_count must be positive");
  require_config(cells_per_column > 0, "tm.cells_per_column must be positive");
  require_config(max_segments_per_cell > 0, "tm.max_segments_per_cell must be positive");
  require_config(max_synapses_per_segment > 0, "tm.max_synapses_per_segment must be positive");
  require_config(initial_permanence > 0.0 && initial_permanence < 1.0, "tm.initial_permanence must be in (0, 1)");
  require_config(connected_threshold > 0.0 && connected_threshold < 1.0, "tm.connected_threshold must be in (0, 1)");
  require_config(permanence_increment > 0.0, "tm.permanence_increment must be > 0");
  require_config(permanence_decrement >= 0.0, "tm.permanence_decrement must be >= 0");
  require_config(predicted_decrement >= 0.0, "tm.predicted_decrement must be >= 0");
  require_config(activation_threshold > 0, "tm.activation_threshold must be positive");
  require_config(min_threshold > 0, "tm.min_threshold must be positive");
  require_config(min_threshold <= activation_threshold, "tm.min_threshold must not exceed tm.activation_threshold");
  require_config(new_synapse_count > 0, "tm.new_synapse_count must be positive");
  require_config(column_count * cells_per_column <= std::size_t{0xFFFFFFFFu}, "tm: too many cells");
}

TemporalMemory::TemporalMemory(const TmParams& params) : params_(params), rng_(params.seed) {
  params_.validate();
  cell_segments_.resize(cell_count());
  presynaptic_index_.resize(cell_count());
}

bool TemporalMemory::segment_before(SegmentId a, SegmentId b) const noexcept {
  const Segment& x = segments_[a];
  const Segment& y = segments_[b];
  return x.cell != y.cell ? x.cell < y.cell : x.ordinal < y.ordinal;
}

std::vector<CellId> TemporalMemory::predictive_cells() const {
  std::vector<CellId> cells;
  for (SegmentId s : active_segments_) {
    const CellId c = segments_[s].cell;
    if (cells.empty() || cells.back() != c) cells.push_back(c);
  }
  return cells;
}

std::vector<std::vector<std::pair<CellId, float>>> TemporalMemory::segments_of(CellId cell) const {
  std::vector<std::vector<std::pair<CellId, float>>> out;
  for (SegmentId s : cell_segments_.at(cell)) {
    auto& syns = out.emplace_back();
    for (SynapseId y : segments_[s].synapses) syns.emplace_back(synapses_[y].presynaptic, synapses_[y].permanence);
  }
  return out;
}

void TemporalMemory::reset() {
  active_cells_.clear();
  winner_cells_.clear();
  active_segments_.clear();
  matching_segments_.clear();
  potential_overlaps_.clear();
}

TmStepResult TemporalMemory::compute(const Sdr& active_columns, bool learn) {
  detail::require(active_columns.width() == params_.column_count,
                  "TemporalMemory::compute: input width " + std::to_string(active_columns.width()) + " != " +
                      std::to_string(params_.column_count));

  const auto columns = active_columns.active();
  TmStepResult result;
  result.active_column_count = columns.size();

  // predictions made at the end of the previous step
  std::vector<std::uint8_t> predicted(params_.column_count, 0);
  for (SegmentId s : active_segments_) predicted[column_of_segment(s)] = 1;
  std::size_t unpredicted = 0;
  for (BitIndex col : columns) unpredicted += predicted[col] == 0 ? 1 : 0;
  result.anomaly_score =
      columns.empty() ? 0.0 : static_cast<double>(unpredicted) / static_cast<double>(columns.size());

  std::vector<std::uint8_t> prev_active(cell_count(), 0);
  for (CellId c : active_cells_) prev_active[c] = 1;
  const std::vector<CellId> prev_winners = std::move(winner_cells_);
  active_cells_.clear();
  winner_cells_.clear();

  const std::vector<SegmentId> active_segments = std::move(active_segments_);
  const std::vector<SegmentId> matching_segments = std::move(matching_segments_);

  const auto column_range = [&](const std::vector<SegmentId>& segs, std::size_t col) {
    const auto lo = std::partition_point(segs.begin(), segs.end(),
                                         [&](SegmentId s) { return column_of_segment(s) < col; });
    const auto hi = std::partition_point(lo, segs.end(), [&](SegmentId s) { return column_of_segment(s) <= col; });
    return std::span<const SegmentId>(lo, hi);
  };

  // Segment ranges are resolved up front: learning below may create and
  // destroy segments, which would change the column lookup of reused slots.
  std::vector<std::span<const SegmentId>> active_ranges;
  std::vector<std::span<const SegmentId>> matching_ranges;
  active_ranges.reserve(columns.size());
  matching_ranges.reserve(columns.size());
  for (BitIndex col : columns) {
    active_ranges.push_back(column_range(active_segments, col));
    matching_ranges.push_back(column_range(matching_segments, col));
  }
  std::vector<SegmentId> punish;
  if (learn && params_.predicted_decrement > 0.0) {
    std::vector<std::uint8_t> is_active(params_.column_count, 0);
    for (BitIndex col : columns) is_active[col] = 1;
    for (SegmentId s : active_segments) {
      if (is_active[column_of_segment(s)] == 0) punish.push_back(s);
    }
  }

  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!active_ranges[i].empty()) {
      activate_predicted_column(active_ranges[i], prev_active, prev_winners, learn);
    } else {
      burst_column(columns[i], matching_ranges[i], prev_active, prev_winners, learn);
    }
  }

  const auto punishment = static_cast<float>(params_.predicted_decrement);
  for (SegmentId s : punish) {
    if (segments_[s].alive) adapt_segment(s, prev_active, -punishment, 0.0f);
  }

  activate_dendrites();

  std::size_t last_column = params_.column_count;
  for (SegmentId s : active_segments_) {
    const std::size_t col = column_of_segment(s);
    if (col != last_column) {
      ++result.predictive_column_count;
      last_column = col;
    }
  }
  ++step_count_;
  return result;
}

void TemporalMemory::activate_predicted_column(std::span<const SegmentId> column_active,
                                               const std::vector<std::uint8_t>& prev_active,
                                               const std::vector<CellId>& prev_winners, bool learn) {
  // segments are grouped by cell, so each cell is visited once
  std::vector<std::pair<SegmentId, std::uint32_t>> to_learn;
  for (SegmentId s : column_active) {
    const CellId cell = segments_[s].cell;
    if (active_cells_.empty() || active_cells_.back() != cell) {
      active_cells_.push_back(cell);
      winner_cells_.push_back(cell);
    }
    to_learn.emplace_back(s, potential_overlaps_[s]);
  }
  if (!learn) return;
  const auto inc = static_cast<float>(params_.permanence_increment);
  const auto dec = static_cast<float>(params_.permanence_decrement);
  for (auto [s, potential] : to_learn) {
    if (!segments_[s].alive) continue;
    adapt_segment(s, prev_active, inc, dec);
    if (!segments_[s].alive) continue;
    segments_[s].last_used = step_count_;
    if (params_.new_synapse_count > potential) grow_synapses(s, prev_winners, params_.new_synapse_count - potential);
  }
}

void TemporalMemory::burst_column(std::size_t column, std::span<const SegmentId> column_matching,
                                  const std::vector<std::uint8_t>& prev_active, const std::vector<CellId>& prev_winners,
                                  bool learn) {
  const auto first = static_cast<CellId>(column * params_.cells_per_column);
  for (std::size_t k = 0; k < params_.cells_per_column; ++k) active_cells_.push_back(first + static_cast<CellId>(k));

  // first maximum in (cell, ordinal) order
  const SegmentId* best = nullptr;
  for (const SegmentId& s : column_matching) {
    if (best == nullptr || potential_overlaps_[s] > potential_overlaps_[*best]) best = &s;
  }

  const CellId winner = best != nullptr ? segments_[*best].cell : least_used_cell(column);
  winner_cells_.push_back(winner);
  if (!learn) return;

  if (best != nullptr) {
    const SegmentId s = *best;
    const std::uint32_t potential = potential_overlaps_[s];
    adapt_segment(s, prev_active, static_cast<float>(params_.permanence_increment),
                  static_cast<float>(params_.permanence_decrement));
    if (!segments_[s].alive) return;
    segments_[s].last_used = step_count_;
    if (params_.new_synapse_count > potential) grow_synapses(s, prev_winners, params_.new_synapse_count - potential);
  } else if (!prev_winners.empty()) {
    const SegmentId s = create_segment(winner);
    grow_synapses(s, prev_winners, std::min(params_.new_synapse_count, prev_winners.size()));
  }
}

CellId TemporalMemory::least_used_cell(std::size_t column) const {
  const auto first = static_cast<CellId>(column * params_.cells_per_column);
  CellId best = first;
  for (std::size_t k = 1; k < params_.cells_per_column; ++k) {
    const auto cell = static_cast<CellId>(first + k);
    if (cell_segments_[cell].size() < cell_segments_[best].size()) best = cell;
  }
  return best;
}

void TemporalMemory::activate_dendrites() {
  const std::size_t slots = segments_.size();
  potential_overlaps_.assign(slots, 0);
  std::vector<std::uint32_t> connected(slots, 0);
  const auto threshold = static_cast<float>(params_.connected_threshold);
  for (CellId cell : active_cells_) {
    for (SynapseId y : presynaptic_index_[cell]) {
      const Synapse& syn = synapses_[y];
      ++potential_overlaps_[syn.segment];
      if (syn.permanence >= threshold) ++connected[syn.segment];
    }
  }
  active_segments_.clear();
  matching_segments_.clear();
  for (SegmentId s = 0; s < slots; ++s) {
    if (!segments_[s].alive) continue;
    if (connected[s] >= params_.activation_threshold) active_segments_.push_back(s);
    if (potential_overlaps_[s] >= params_.min_threshold) matching_segments_.push_back(s);
  }
  const auto order = [this](SegmentId a, SegmentId b) { return segment_before(a, b); };
  std::sort(active_segments_.begin(), active_segments_.end(), order);
  std::sort(matching_segments_.begin(), matching_segments_.end(), order);
}

void TemporalMemory::adapt_segment(SegmentId segment, const std::vector<std::uint8_t>& prev_active, float increment,
                                   float decrement) {
  std::vector<SynapseId> dead;
  for (SynapseId y : segments_[segment].synapses) {
    Synapse& syn = synapses_[y];
    const float next = prev_active[syn.presynaptic] != 0 ? syn.permanence + increment : syn.permanence - decrement;
    syn.permanence = std::clamp(next, 0.0f, 1.0f);
    if (syn.permanence <= 0.0f) dead.push_back(y);
  }
  for (SynapseId y : dead) destroy_synapse(y);
  if (segments_[segment].synapses.empty()) destroy_segment(segment);
}

void TemporalMemory::grow_synapses(SegmentId segment, const std::vector<CellId>& candidates, std::size_t desired) {
  // candidates arrive sorted; drop cells this segment already listens to
  std::vector<CellId> existing;
  for (SynapseId y : segments_[segment].synapses) existing.push_back(synapses_[y].presynaptic);
  std::sort(existing.begin(), existing.end());
  std::vector<CellId> pool;
  std::set_difference(candidates.begin(), candidates.end(), existing.begin(), existing.end(), std::back_inserter(pool));

  std::size_t count = std::min({desired, pool.size(), params_.max_synapses_per_segment});
  if (count == 0) return;

  const std::size_t held = segments_[segment].synapses.size();
  if (held + count > params_.max_synapses_per_segment) {
    std::size_t overflow = held + count - params_.max_synapses_per_segment;
    // synapses onto current candidates were just reinforced; evict others first
    std::vector<SynapseId> order;
    for (SynapseId y : segments_[segment].synapses) {
      if (!std::binary_search(candidates.begin(), candidates.end(), synapses_[y].presynaptic)) order.push_back(y);
    }
    std::sort(order.begin(), order.end(), [&](SynapseId a, SynapseId b) {
      const Synapse& x = synapses_[a];
      const Synapse& y = synapses_[b];
      return x.permanence != y.permanence ? x.permanence < y.permanence : x.presynaptic < y.presynaptic;
    });
    overflow = std::min(overflow, order.size());
    for (std::size_t i = 0; i < overflow; ++i) destroy_synapse(order[i]);
    count = std::min(count, params_.max_synapses_per_segment - segments_[segment].synapses.size());
    if (count == 0) return;
  }

  rng_.choose_front(std::span<CellId>(pool), count);
  const auto initial = static_cast<float>(params_.initial_permanence);
  for (std::size_t i = 0; i < count; ++i) create_synapse(segment, pool[i], initial);
}

SegmentId TemporalMemory::create_segment(CellId cell) {
  auto& owned = cell_segments_[cell];
  while (owned.size() >= params_.max_segments_per_cell) {
    const auto victim = std::min_element(owned.begin(), owned.end(), [&](SegmentId a, SegmentId b) {
      const Segment& x = segments_[a];
      const Segment& y = segments_[b];
      return x.last_used != y.last_used ? x.last_used < y.last_used : x.ordinal < y.ordinal;
    });
    destroy_segment(*victim);
  }

  SegmentId id;
  if (!free_segments_.empty()) {
    id = free_segments_.back();
    free_segments_.pop_back();
  } else {
    id = static_cast<SegmentId>(segments_.size());
    segments_.emplace_back();
  }
  Segment& seg = segments_[id];
  seg.cell = cell;
  seg.synapses.clear();
  seg.last_used = step_count_;
  seg.ordinal = next_ordinal_++;
  seg.alive = true;
  owned.push_back(id);
  return id;
}

void TemporalMemory::destroy_segment(SegmentId segment) {
  Segment& seg = segments_[segment];
  while (!seg.synapses.empty()) destroy_synapse(seg.synapses.back());
  auto& owned = cell_segments_[seg.cell];
  owned.erase(std::find(owned.begin(), owned.end(), segment));
  seg.alive = false;
  free_segments_.push_back(segment);
}

void TemporalMemory::create_synapse(SegmentId segment, CellId presynaptic, float permanence) {
  SynapseId id;
  if (!free_synapses_.empty()) {
    id = free_synapses_.back();
    free_synapses_.pop_back();
  } else {
    id = static_cast<SynapseId>(synapses_.size());
    synapses_.emplace_back();
  }
  synapses_[id] = Synapse{presynaptic, permanence, segment, true};
  segments_[segment].synapses.push_back(id);
  presynaptic_index_[presynaptic].push_back(id);
}

void TemporalMemory::destroy_synapse(SynapseId synapse) {
  Synapse& syn = synapses_[synapse];
  auto& by_pre = presynaptic_index_[syn.presynaptic];
  by_pre.erase(std::find(by_pre.begin(), by_pre.end(), synapse));
  auto& on_seg = segments_[syn.segment].synapses;
  on_seg.erase(std::find(on_seg.begin(), on_seg.end(), synapse));
  syn.alive = false;
  free_synapses_.push_back(synapse);
}

}  // namespace gridhtm
