#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "bapmsim/domain.hpp"

namespace bapmsim::io {

struct FsdaxParams {
    double bw_per_device = 5.0 * 1024 * 1024 * 1024; // bytes/s
    double meta_cost_per_file = 1e-3;                // seconds
    double numa_cross_penalty = 1.5;                 // >= 1
};

/// Ephemeral distributed file system (GekkoFS-style). Four fitted
/// throughput constants; network_cap is user-pinned. chunk placement is
/// round-robin.
struct EphemeralFsParams {
    std::uint64_t chunk_size = 512 * 1024;
    double per_node_bw_read = 7.5e9;
    double per_node_bw_write = 6.5e9;
    double network_cap_per_client = 12.5e9;
    double hard_write_serialization = 0.05; // single shared file, writes
    double hard_read_factor = 0.35;         // single shared file, reads
};

struct ObjectStoreParams {
    double per_server_bw = 3.0e9;
    double scaling_efficiency = 0.95; // in (0,1]
};

Validation validate(const FsdaxParams& p);
Validation validate(const EphemeralFsParams& p);
Validation validate(const ObjectStoreParams& p);

/// Node-local fsdax write: bandwidth term plus per-file metadata cost.
/// cross_numa applies the NUMA penalty (concatenated devices).
double fsdax_write_time(double bytes_per_device, int files_per_device, bool cross_numa,
                        const FsdaxParams& p);

/// Round-robin chunk placement: chunk i lives on node i % node_count.
struct ChunkLayout {
    std::uint64_t chunk_count = 0;
    int node_count = 1;
    int node_of(std::uint64_t chunk) const { return int(chunk % std::uint64_t(node_count)); }
    std::vector<std::uint64_t> loads() const;
};
ChunkLayout ephemeralfs_layout(std::uint64_t file_size, int node_count,
                               const EphemeralFsParams& p);

enum class IorAccess { EasyRead, EasyWrite, HardRead, HardWrite };

/// Aggregate bytes/s for an IOR-style access pattern.
double ephemeralfs_throughput(int clients, int nodes, IorAccess access,
                              const EphemeralFsParams& p);

/// Sub-linear object-store write scaling with a single efficiency knob.
double objectstore_write_throughput(int server_processes, const ObjectStoreParams& p);

// ---------------------------------------------------------------------------
// Shared parallel file system server.
//
// Fluid model with client-side write-back. A write request first ingests
// into the writer's dirty buffer at client_ingest_bw_per_node x nodes;
// ingestion throttles to the drain rate once the buffer holds
// writeback_cap_per_node x nodes. Dirty data drains to the file system at
// aggregate_bw x d(n) shared equally among the n active writers, with
// d(n) = 1 / (1 + contention_beta x (n - 1)). Metadata ops queue per
// writer at metadata_ops_per_second. A request completes at
// max(data completion, metadata completion): for write-back requests the
// data side completes at ingest, for drain requests (staging, or the batch
// entry point below) when the bytes have reached the file system.
// ---------------------------------------------------------------------------
class ParallelFsServer {
public:
    ParallelFsServer(const ParallelFsSpec& fs, double bytes_epsilon = 1e-3);

    /// net_bw bounds the writer's drain rate (staging crosses the network).
    int add_writer(int nodes, double net_bw = std::numeric_limits<double>::infinity());

    enum class Kind { WriteBack, Drain };

    void submit(std::uint64_t req_id, int writer, Kind kind, double bytes, int files, double now,
                double jitter_mult = 1.0);

    /// Earliest future state change (ingest/drain/cap/empty transition or a
    /// pending completion); +inf when idle.
    double next_transition(double now) const;

    struct Completion {
        std::uint64_t req_id;
        double time;
    };
    /// Integrates the fluid state up to `t` and returns completions with
    /// time <= t, in completion order.
    std::vector<Completion> advance_to(double t);

    bool idle() const;
    double delivered_bytes() const { return delivered_bytes_; }
    double busy_seconds() const { return busy_seconds_; }
    double max_drain_rate_seen() const { return max_drain_rate_seen_; }

private:
    struct Segment {
        std::size_t req = kAnon; // owning request index, kAnon for dirty data
        double remaining = 0;
    };
    struct Request {
        std::uint64_t id = 0;
        int writer = 0;
        Kind kind = Kind::WriteBack;
        double remaining_ingest = 0;
        double meta_done = 0;
        double data_done = -1;
        bool emitted = false;
    };
    struct Writer {
        int nodes = 1;
        double ingest_bw = 0;
        double cap = 0;
        double net_bw = 0;
        double backlog = 0;
        double meta_free_at = 0;
        std::deque<std::size_t> ingest_queue; // request indices
        std::deque<Segment> drain_fifo;
    };
    struct Rates {
        double ingest = 0;
        double drain = 0;
        bool active = false;
    };

    static constexpr std::size_t kAnon = std::size_t(-1);

    std::vector<Rates> current_rates() const;
    void push_dirty(Writer& w, std::size_t req, double bytes);

    ParallelFsSpec fs_;
    double eps_;
    double now_ = 0;
    std::vector<Writer> writers_;
    std::vector<Request> requests_;
    std::vector<std::size_t> pending_; // data-done requests awaiting meta
    std::vector<Completion> unclaimed_;
    double delivered_bytes_ = 0;
    double busy_seconds_ = 0;
    double max_drain_rate_seen_ = 0;
};

/// Batch form: one independent writer per request; entries are
/// (bytes, files, start_time); returns per-request completion seconds.
std::vector<double> parallelfs_service(
    const std::vector<std::tuple<double, int, double>>& requests, const ParallelFsSpec& fs);

} // namespace bapmsim::io
