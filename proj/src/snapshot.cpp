#include "gridhtm/snapshot.hpp"

#include <cstring>
#include <sstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/deque.hpp>
#include <cereal/types/map.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <zlib.h>

#include "gridhtm/errors.hpp"
#include "gridhtm/grid_model.hpp"
#include "gridhtm/spatial_pooler.hpp"
#include "gridhtm/temporal_memory.hpp"

namespace gridhtm {

namespace {

constexpr const char* kSpMagic = "GHSP";
constexpr const char* kTmMagic = "GHTM";
constexpr const char* kGridMagic = "GHGM";

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(std::span<const std::byte> bytes, std::size_t offset, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  return v;
}

std::uint32_t checksum(std::span<const std::byte> payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes a 32-bit length; feed large payloads in chunks
  std::size_t offset = 0;
  while (offset < payload.size()) {
    const std::size_t n = std::min<std::size_t>(payload.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data() + offset), static_cast<uInt>(n));
    offset += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::byte> frame(const char* magic, const std::string& payload) {
  std::vector<std::byte> out;
  out.reserve(kSnapshotHeaderBytes + payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(magic[i]));
  put_u32(out, kSnapshotVersion);
  put_u64(out, payload.size());
  const auto body = std::as_bytes(std::span<const char>(payload.data(), payload.size()));
  put_u32(out, checksum(body));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::string unframe(const char* magic, std::span<const std::byte> bytes) {
  const SnapshotHeader header = read_snapshot_header(bytes);
  if (header.magic != magic) {
    throw SnapshotError("snapshot holds a '" + header.magic + "' record, expected '" + magic + "'");
  }
  const auto body = bytes.subspan(kSnapshotHeaderBytes);
  return std::string(reinterpret_cast<const char*>(body.data()), body.size());
}

template <typename T, typename Fn>
std::vector<std::byte> save_framed(const char* magic, Fn&& write) {
  std::ostringstream os(std::ios::binary);
  {
    cereal::PortableBinaryOutputArchive ar(os);
    write(ar);
  }
  return frame(magic, os.str());
}

template <typename T, typename Fn>
T load_framed(const char* magic, std::span<const std::byte> bytes, Fn&& read) {
  std::istringstream is(unframe(magic, bytes), std::ios::binary);
  try {
    cereal::PortableBinaryInputArchive ar(is);
    T value = read(ar);
    if (is.peek() != std::char_traits<char>::eof()) throw SnapshotError("snapshot has trailing bytes");
    return value;
  } catch (const cereal::Exception& e) {
    throw SnapshotError(std::string("snapshot payload is truncated or malformed: ") + e.what());
  } catch (const ContractError& e) {
    throw SnapshotError(std::string("snapshot payload is inconsistent: ") + e.what());
  } catch (const ConfigError& e) {
    throw SnapshotError(std::string("snapshot holds invalid parameters: ") + e.what());
  }
}

void check(bool ok, const char* what) {
  if (!ok) throw SnapshotError(std::string("snapshot payload is inconsistent: ") + what);
}

}  // namespace

SnapshotHeader read_snapshot_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kSnapshotHeaderBytes) throw SnapshotError("snapshot is shorter than its header");
  SnapshotHeader h;
  h.magic.assign(reinterpret_cast<const char*>(bytes.data()), 4);
  if (h.magic != kSpMagic && h.magic != kTmMagic && h.magic != kGridMagic) {
    throw SnapshotError("not a gridhtm snapshot (bad magic)");
  }
  h.version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  h.payload_bytes = get_le(bytes, 8, 8);
  h.checksum = static_cast<std::uint32_t>(get_le(bytes, 16, 4));
  if (h.version != kSnapshotVersion) {
    throw UnsupportedVersionError("snapshot version " + std::to_string(h.version) + " is not supported (expected " +
                                  std::to_string(kSnapshotVersion) + ")");
  }
  if (h.payload_bytes != bytes.size() - kSnapshotHeaderBytes) {
    throw SnapshotError("snapshot length field does not match its size");
  }
  if (checksum(bytes.subspan(kSnapshotHeaderBytes)) != h.checksum) {
    throw SnapshotError("snapshot checksum mismatch");
  }
  return h;
}

// Archive functions for public value types.

template <class A>
void serialize(A& ar, CellCoord& c) {
  ar(c.row, c.col);
}

template <class A>
void serialize(A& ar, SpParams& p) {
  ar(p.input_width, p.column_count, p.active_columns, p.potential_fraction, p.connected_threshold,
     p.permanence_increment, p.permanence_decrement, p.initial_permanence_band, p.stimulus_threshold,
     p.boosting_enabled, p.boost_strength, p.duty_cycle_period, p.seed);
}

template <class A>
void serialize(A& ar, TmParams& p) {
  ar(p.column_count, p.cells_per_column, p.max_segments_per_cell, p.max_synapses_per_segment, p.initial_permanence,
     p.connected_threshold, p.permanence_increment, p.permanence_decrement, p.predicted_decrement,
     p.activation_threshold, p.min_threshold, p.new_synapse_count, p.seed);
}

template <class A>
void serialize(A& ar, EncoderConfig& e) {
  ar(e.frame_size, e.cell_size, e.class_count, e.min_sparsity, e.empty_pattern_sparsity, e.seed);
}

template <class A>
void serialize(A& ar, CellOverride& o) {
  ar(o.sp, o.tm);
}

template <class A>
void serialize(A& ar, GridConfig& g) {
  ar(g.encoder, g.multistep_n, g.default_sp, g.default_tm, g.per_cell_overrides, g.suppression_enabled, g.aggregation,
     g.smoothing_window, g.seed);
}

template <class A>
void save(A& ar, const Sdr& s) {
  const std::vector<BitIndex> active(s.active().begin(), s.active().end());
  ar(static_cast<std::uint64_t>(s.width()), active);
}

template <class A>
void load(A& ar, Sdr& s) {
  std::uint64_t width = 0;
  std::vector<BitIndex> active;
  ar(width, active);
  s = Sdr(width, std::move(active));
}

template <class A>
void save(A& ar, const Rng& r) {
  std::ostringstream os;
  os << r.engine();
  ar(os.str());
}

template <class A>
void load(A& ar, Rng& r) {
  std::string state;
  ar(state);
  std::istringstream is(state);
  is >> r.engine();
  check(!is.fail(), "bad generator state");
}

struct SnapshotAccess {
  template <class A>
  static void save_sp(A& ar, const SpatialPooler& sp) {
    ar(sp.params_, sp.pool_size_, sp.pools_, sp.permanences_, sp.active_duty_, sp.boost_, sp.step_count_);
  }

  template <class A>
  static SpatialPooler load_sp(A& ar) {
    SpatialPooler sp;
    ar(sp.params_, sp.pool_size_, sp.pools_, sp.permanences_, sp.active_duty_, sp.boost_, sp.step_count_);
    sp.params_.validate();
    const std::size_t cols = sp.params_.column_count;
    check(sp.pool_size_ <= sp.params_.input_width, "pool larger than input");
    check(sp.pools_.size() == cols * sp.pool_size_ && sp.permanences_.size() == cols * sp.pool_size_,
          "pool table size");
    check(sp.active_duty_.size() == cols && sp.boost_.size() == cols, "duty cycle table size");
    for (BitIndex i : sp.pools_) check(i < sp.params_.input_width, "pool index out of range");
    for (float p : sp.permanences_) check(p >= 0.0f && p <= 1.0f, "permanence out of range");
    return sp;
  }

  template <class A>
  static void save_tm(A& ar, const TemporalMemory& tm) {
    ar(tm.params_, tm.rng_);
    ar(static_cast<std::uint64_t>(tm.segments_.size()));
    for (const auto& s : tm.segments_) ar(s.cell, s.synapses, s.last_used, s.ordinal, s.alive);
    ar(tm.free_segments_);
    ar(static_cast<std::uint64_t>(tm.synapses_.size()));
    for (const auto& y : tm.synapses_) ar(y.presynaptic, y.permanence, y.segment, y.alive);
    ar(tm.free_synapses_, tm.cell_segments_, tm.presynaptic_index_, tm.next_ordinal_);
    ar(tm.active_cells_, tm.winner_cells_, tm.active_segments_, tm.matching_segments_, tm.potential_overlaps_,
       tm.step_count_);
  }

  template <class A>
  static TemporalMemory load_tm(A& ar) {
    TemporalMemory tm;
    ar(tm.params_, tm.rng_);
    tm.params_.validate();
    std::uint64_t n = 0;
    ar(n);
    check(n <= 0xFFFFFFFFull, "segment table size");
    tm.segments_.resize(n);
    for (auto& s : tm.segments_) ar(s.cell, s.synapses, s.last_used, s.ordinal, s.alive);
    ar(tm.free_segments_);
    ar(n);
    check(n <= 0xFFFFFFFFull, "synapse table size");
    tm.synapses_.resize(n);
    for (auto& y : tm.synapses_) ar(y.presynaptic, y.permanence, y.segment, y.alive);
    ar(tm.free_synapses_, tm.cell_segments_, tm.presynaptic_index_, tm.next_ordinal_);
    ar(tm.active_cells_, tm.winner_cells_, tm.active_segments_, tm.matching_segments_, tm.potential_overlaps_,
       tm.step_count_);

    const std::size_t cells = tm.cell_count();
    check(tm.cell_segments_.size() == cells && tm.presynaptic_index_.size() == cells, "cell table size");
    for (const auto& s : tm.segments_) {
      check(s.cell < cells, "segment cell out of range");
      for (SynapseId y : s.synapses) check(y < tm.synapses_.size(), "synapse id out of range");
    }
    for (const auto& y : tm.synapses_) {
      check(y.presynaptic < cells && y.segment < tm.segments_.size(), "synapse reference out of range");
    }
    for (const auto& list : tm.cell_segments_) {
      for (SegmentId s : list) check(s < tm.segments_.size() && tm.segments_[s].alive, "dangling segment");
    }
    for (const auto& list : tm.presynaptic_index_) {
      for (SynapseId y : list) check(y < tm.synapses_.size() && tm.synapses_[y].alive, "dangling synapse");
    }
    for (SegmentId s : tm.free_segments_) check(s < tm.segments_.size() && !tm.segments_[s].alive, "free list");
    for (SynapseId y : tm.free_synapses_) check(y < tm.synapses_.size() && !tm.synapses_[y].alive, "free list");
    for (CellId c : tm.active_cells_) check(c < cells, "active cell out of range");
    for (CellId c : tm.winner_cells_) check(c < cells, "winner cell out of range");
    for (SegmentId s : tm.active_segments_) check(s < tm.segments_.size() && tm.segments_[s].alive, "active segment");
    for (SegmentId s : tm.matching_segments_) check(s < tm.segments_.size() && tm.segments_[s].alive, "matching segment");
    check(tm.potential_overlaps_.empty() || tm.potential_overlaps_.size() == tm.segments_.size(),
          "overlap table size");
    for (SegmentId s : tm.matching_segments_) check(s < tm.potential_overlaps_.size(), "overlap table size");
    return tm;
  }

  template <class A>
  static void save_grid(A& ar, const GridModel& g) {
    ar(g.config_, static_cast<std::uint64_t>(g.cells_.size()));
    for (const CellUnit& u : g.cells_) {
      save_sp(ar, u.sp);
      save_tm(ar, u.tm);
      ar(u.history, u.prev_empty, u.last_tm_input);
    }
    ar(g.frames_seen_, g.smoother_.window_, g.smoother_.values_);
  }

  template <class A>
  static GridModel load_grid(A& ar) {
    GridConfig config;
    std::uint64_t count = 0;
    ar(config, count);
    // builds derived fields and validates the configuration
    GridModel g(config);
    check(count == g.cells_.size(), "cell count does not match the grid");
    for (std::size_t i = 0; i < g.cells_.size(); ++i) {
      CellUnit& u = g.cells_[i];
      u.sp = load_sp(ar);
      u.tm = load_tm(ar);
      ar(u.history, u.prev_empty, u.last_tm_input);
      const CellCoord coord{i / g.grid_size_.col, i % g.grid_size_.col};
      check(u.sp.params() == config.sp_params_for(coord), "cell spatial pooler parameters");
      check(u.tm.params() == config.tm_params_for(coord), "cell temporal memory parameters");
      check(u.history.size() == config.multistep_n, "history length");
      for (const Sdr& s : u.history) check(s.width() == u.sp.params().column_count, "history width");
      check(u.prev_empty.size() == config.encoder.class_count, "emptiness flags");
      check(u.last_tm_input.width() == u.tm.params().column_count, "TM input width");
    }
    ar(g.frames_seen_, g.smoother_.window_, g.smoother_.values_);
    check(g.smoother_.window_ == config.smoothing_window && g.smoother_.values_.size() <= g.smoother_.window_,
          "smoothing window");
    return g;
  }
};

std::vector<std::byte> SpatialPooler::snapshot() const {
  return save_framed<SpatialPooler>(kSpMagic, [&](auto& ar) { SnapshotAccess::save_sp(ar, *this); });
}

SpatialPooler SpatialPooler::restore(std::span<const std::byte> bytes) {
  return load_framed<SpatialPooler>(kSpMagic, bytes, [](auto& ar) { return SnapshotAccess::load_sp(ar); });
}

std::vector<std::byte> TemporalMemory::snapshot() const {
  return save_framed<TemporalMemory>(kTmMagic, [&](auto& ar) { SnapshotAccess::save_tm(ar, *this); });
}

TemporalMemory TemporalMemory::restore(std::span<const std::byte> bytes) {
  return load_framed<TemporalMemory>(kTmMagic, bytes, [](auto& ar) { return SnapshotAccess::load_tm(ar); });
}

std::vector<std::byte> GridModel::snapshot() const {
  return save_framed<GridModel>(kGridMagic, [&](auto& ar) { SnapshotAccess::save_grid(ar, *this); });
}

GridModel GridModel::restore(std::span<const std::byte> bytes) {
  return load_framed<GridModel>(kGridMagic, bytes, [](auto& ar) { return SnapshotAccess::load_grid(ar); });
}

}  // namespace gridhtm
