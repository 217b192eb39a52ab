#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridhtm/random.hpp"
#include "gridhtm/sdr.hpp"

namespace gridhtm {

using CellId = std::uint32_t;
using SegmentId = std::uint32_t;
using SynapseId = std::uint32_t;

struct TmParams {
  std::size_t column_count = 512;
  std::size_t cells_per_column = 8;
  std::size_t max_segments_per_cell = 32;
  std::size_t max_synapses_per_segment = 32;
  double initial_permanence = 0.21;
  double connected_threshold = 0.2;
  double permanence_increment = 0.1;
  double permanence_decrement = 0.001;
  /// Applied to matching segments in columns that were predicted but did
  /// not become active.
  double predicted_decrement = 0.003;
  std::size_t activation_threshold = 8;
  std::size_t min_threshold = 4;
  std::size_t new_synapse_count = 15;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const TmParams&, const TmParams&) = default;
};

struct TmStepResult {
  /// Fraction of active columns that held no predictive cell before this
  /// step; 0 when no column is active.
  double anomaly_score = 0.0;
  /// Columns holding at least one predictive cell after this step. Fewer
  /// means a more certain prediction.
  std::size_t predictive_column_count = 0;
  std::size_t active_column_count = 0;

  friend bool operator==(const TmStepResult&, const TmStepResult&) = default;
};

/// First-order-cells / high-order-sequence temporal memory with dendritic
/// segments, in the usual HTM formulation.
///
/// Segment and synapse counts are capped; when a cell is full its least
/// recently reinforced segment is replaced, and a full segment drops its
/// weakest synapses to make room for new ones.
///
/// Single-writer: do not call compute() concurrently on one instance.
class TemporalMemory {
 public:
  explicit TemporalMemory(const TmParams& params);

  TmStepResult compute(const Sdr& active_columns, bool learn);

  /// Forgets the carried-over activity (active, winner and predictive
  /// cells) while keeping learned segments.
  void reset();

  const TmParams& params() const noexcept { return params_; }
  std::size_t cell_count() const noexcept { return params_.column_count * params_.cells_per_column; }
  std::uint64_t step_count() const noexcept { return step_count_; }

  std::span<const CellId> active_cells() const noexcept { return active_cells_; }
  std::span<const CellId> winner_cells() const noexcept { return winner_cells_; }
  std::vector<CellId> predictive_cells() const;

  std::size_t segment_count() const noexcept { return segments_.size() - free_segments_.size(); }
  std::size_t synapse_count() const noexcept { return synapses_.size() - free_synapses_.size(); }
  std::size_t segment_count(CellId cell) const { return cell_segments_[cell].size(); }

  /// Presynaptic cells and permanences of every live segment on `cell`, in
  /// creation order. Used by tests to check structural invariants.
  std::vector<std::vector<std::pair<CellId, float>>> segments_of(CellId cell) const;

  std::vector<std::byte> snapshot() const;
  static TemporalMemory restore(std::span<const std::byte> bytes);

  friend bool operator==(const TemporalMemory&, const TemporalMemory&) = default;

 private:
  friend struct SnapshotAccess;
  TemporalMemory() = default;

  struct Synapse {
    CellId presynaptic = 0;
    float permanence = 0.0f;
    SegmentId segment = 0;
    bool alive = false;
    friend bool operator==(const Synapse&, const Synapse&) = default;
  };

  struct Segment {
    CellId cell = 0;
    std::vector<SynapseId> synapses;
    std::uint64_t last_used = 0;
    std::uint64_t ordinal = 0;
    bool alive = false;
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  std::size_t column_of(CellId cell) const noexcept { return cell / params_.cells_per_column; }
  std::size_t column_of_segment(SegmentId s) const noexcept { return column_of(segments_[s].cell); }
  bool segment_before(SegmentId a, SegmentId b) const noexcept;

  void activate_predicted_column(std::span<const SegmentId> column_active, const std::vector<std::uint8_t>& prev_active,
                                 const std::vector<CellId>& prev_winners, bool learn);
  void burst_column(std::size_t column, std::span<const SegmentId> column_matching,
                    const std::vector<std::uint8_t>& prev_active, const std::vector<CellId>& prev_winners, bool learn);
  void activate_dendrites();

  CellId least_used_cell(std::size_t column) const;
  void adapt_segment(SegmentId segment, const std::vector<std::uint8_t>& prev_active, float increment, float decrement);
  void grow_synapses(SegmentId segment, const std::vector<CellId>& candidates, std::size_t desired);
  SegmentId create_segment(CellId cell);
  void destroy_segment(SegmentId segment);
  void create_synapse(SegmentId segment, CellId presynaptic, float permanence);
  void destroy_synapse(SynapseId synapse);

  TmParams params_;
  Rng rng_;

  std::vector<Segment> segments_;
  std::vector<SegmentId> free_segments_;
  std::vector<Synapse> synapses_;
  std::vector<SynapseId> free_synapses_;
  std::vector<std::vector<SegmentId>> cell_segments_;
  std::vector<std::vector<SynapseId>> presynaptic_index_;
  std::uint64_t next_ordinal_ = 0;

  std::vector<CellId> active_cells_;
  std::vector<CellId> winner_cells_;
  // segments sorted by (cell, ordinal); computed against active_cells_
  std::vector<SegmentId> active_segments_;
  std::vector<SegmentId> matching_segments_;
  std::vector<std::uint32_t> potential_overlaps_;
  std::uint64_t step_count_ = 0;
};

}  // namespace gridhtm
