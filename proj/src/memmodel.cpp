#include "bapmsim/memmodel.hpp"

#include <algorithm>

#include "bapmsim/units.hpp"

namespace bapmsim::mem {

Validation validate(const MemoryParams& p) {
    Validation v;
    auto err = [&](const char* f, const char* m) { v.errors.push_back({f, m}); };
    if (p.lat_dram_local_ns <= 0 || p.lat_dram_remote_ns <= 0) err("lat_dram", "must be > 0");
    if (p.ad_latency_local_ns <= 0 || p.ad_latency_remote_ns <= 0) err("ad_latency", "must be > 0");
    if (p.mm_latency_factor <= 0) err("mm_latency_factor", "must be > 0");
    if (p.bw_dram_read <= 0 || p.bw_dram_write <= 0) err("bw_dram", "must be > 0");
    if (p.media_read_bw <= 0 || p.media_write_bw <= 0) err("media_bw", "must be > 0");
    if (p.ad_read_ratio <= 0 || p.ad_read_ratio > 1) err("ad_read_ratio", "must be in (0,1]");
    if (p.ad_write_ratio <= 0 || p.ad_write_ratio > 1) err("ad_write_ratio", "must be in (0,1]");
    if (p.mm_cached_bw_factor <= 0 || p.mm_cached_bw_factor > 1)
        err("mm_cached_bw_factor", "must be in (0,1]");
    if (p.numa_bw_penalty < 1) err("numa_bw_penalty", "must be >= 1");
    if (p.ad_latency_local_ns < 100 || p.ad_latency_local_ns > 300)
        v.warnings.push_back({"ad_latency_local_ns", "outside the expected 100-300 ns device range"});
    return v;
}

double idle_latency(AccessKind kind, const MemoryParams& p) {
    const bool local = kind.numa == Numa::Local;
    const double dram = local ? p.lat_dram_local_ns : p.lat_dram_remote_ns;
    const double ad = local ? p.ad_latency_local_ns : p.ad_latency_remote_ns;
    switch (kind.medium) {
        case Medium::Dram: return dram;
        case Medium::MemoryModeCached: return dram * p.mm_latency_factor;
        case Medium::AppDirect: return ad;
        case Medium::MemoryModeUncached: return ad + dram; // miss pays a cache fill
    }
    return dram;
}

double dram_cache_hit_fraction(double working_set, double dram_cache, Reuse reuse) {
    if (working_set <= 0) return 1.0;
    if (reuse == Reuse::Resident && working_set <= dram_cache) return 1.0;
    return std::min(1.0, dram_cache / working_set);
}

double effective_bandwidth(BwMode mode, MemOp op, double working_set, const ClusterSpec& cluster,
                           const MemoryParams& p, bool aliasing_pathology, Numa numa) {
    const double sockets = cluster.sockets_per_node;
    const double dram = op == MemOp::Read ? p.bw_dram_read : p.bw_dram_write;
    const double media = op == MemOp::Read ? p.media_read_bw : p.media_write_bw;
    const double numa_div = numa == Numa::Remote ? p.numa_bw_penalty : 1.0;
    double per_socket = 0;
    switch (mode) {
        case BwMode::Dram: per_socket = dram; break;
        case BwMode::AppDirect:
            per_socket = dram * (op == MemOp::Read ? p.ad_read_ratio : p.ad_write_ratio);
            break;
        case BwMode::MemoryMode: {
            double h = aliasing_pathology
                           ? 0.0
                           : dram_cache_hit_fraction(working_set,
                                                     double(cluster.dram_per_node), Reuse::Streaming);
            per_socket = h * dram * p.mm_cached_bw_factor + (1.0 - h) * media;
            break;
        }
    }
    return per_socket * sockets / numa_div;
}

double step_compute_time(const ApplicationProfile& profile, const NodeConfiguration& config,
                         const ClusterSpec& cluster, int nodes, const MemoryParams& p) {
    const double procs_per_node = double(profile.processes) / double(nodes);
    const double working_set = double(profile.mem_footprint_per_process) * procs_per_node;
    const double limit = double(effective_main_memory(config, cluster));
    if (working_set > limit) {
        throw SimError(Err::OutOfMemory,
                       profile.name + " needs " + units::format_bytes(working_set) +
                           " per node but only " + units::format_bytes(limit) +
                           " of main memory is available");
    }
    const double traffic = profile.mem_traffic_per_step * procs_per_node;
    if (traffic <= 0) return profile.compute_seconds_per_step;
    const BwMode mode =
        config.mode == PlatformMode::Memory ? BwMode::MemoryMode : BwMode::Dram;
    const double bw = effective_bandwidth(mode, MemOp::Read, working_set, cluster, p,
                                          profile.aliasing_pathology);
    return profile.compute_seconds_per_step + traffic / bw;
}

} // namespace bapmsim::mem
