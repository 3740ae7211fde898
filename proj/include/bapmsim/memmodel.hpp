#pragma once

#include "bapmsim/domain.hpp"

namespace bapmsim::mem {

/// Latency/bandwidth constants. Published ratios (the 10% Memory-mode
/// latency penalty, the 50%/10% AppDirect read/write ratios) are defaults
/// with "paper-ratio" provenance in the calibration file; every absolute
/// number is a free parameter. The Memory-mode latency factor is applied
/// to local and remote accesses alike.
struct MemoryParams {
    double lat_dram_local_ns = 81.0;
    double lat_dram_remote_ns = 139.0;
    double mm_latency_factor = 1.10;
    double ad_latency_local_ns = 174.0; // expected within [100, 300] ns
    double ad_latency_remote_ns = 304.0;
    double bw_dram_read = 110e9;  // bytes/s per socket
    double bw_dram_write = 85e9;  // bytes/s per socket
    double ad_read_ratio = 0.5;
    double ad_write_ratio = 0.1;
    double mm_cached_bw_factor = 0.97;
    double media_read_bw = 95e9;  // bytes/s per socket, Memory-mode uncached floor
    double media_write_bw = 73e9; // bytes/s per socket
    double numa_bw_penalty = 1.4; // >= 1
};

enum class Medium { Dram, MemoryModeCached, MemoryModeUncached, AppDirect };
enum class MemOp { Read, Write };
enum class Numa { Local, Remote };

struct AccessKind {
    Medium medium = Medium::Dram;
    MemOp op = MemOp::Read;
    Numa numa = Numa::Local;
};

Validation validate(const MemoryParams& p);

/// Idle latency in ns. MemoryModeCached pays the cache-maintenance factor
/// on top of DRAM; MemoryModeUncached pays the media latency plus one
/// DRAM-cache fill.
double idle_latency(AccessKind kind, const MemoryParams& p);

/// Fraction of accesses served by the direct-mapped DRAM cache.
/// Resident working sets that fit are fully cached; streaming (or
/// oversized) sets degrade as cache/working_set. working_set == 0 is a
/// vacuous hit.
double dram_cache_hit_fraction(double working_set, double dram_cache, Reuse reuse);

enum class BwMode { Dram, MemoryMode, AppDirect };

/// Per-node sustained bandwidth for a given working set.
double effective_bandwidth(BwMode mode, MemOp op, double working_set, const ClusterSpec& cluster,
                           const MemoryParams& p, bool aliasing_pathology = false,
                           Numa numa = Numa::Local);

/// Wall seconds for one application step on `nodes` nodes: pure compute
/// plus per-node memory traffic served at the configured mode's bandwidth.
/// Throws SimError(OutOfMemory) when the per-node footprint exceeds the
/// effective main memory.
double step_compute_time(const ApplicationProfile& profile, const NodeConfiguration& config,
                         const ClusterSpec& cluster, int nodes, const MemoryParams& p);

} // namespace bapmsim::mem
