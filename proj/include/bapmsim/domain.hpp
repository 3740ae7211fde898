#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bapmsim/errors.hpp"

namespace bapmsim {

/// Shared parallel file system. aggregate_bw / metadata_ops_per_second /
/// contention_beta / jitter_sigma are calibration outputs; the two
/// client-side constants model write-back behaviour (ingest rate into the
/// page cache, dirty-data cap per node before writers block).
/// metadata_ops_per_second is the rate available to each concurrent
/// writer (client-side gating), not a machine-wide pool.
struct ParallelFsSpec {
    std::uint64_t capacity = 0;
    double aggregate_bw = 0;             // bytes/s, whole file system
    double metadata_ops_per_second = 0;  // per concurrent writer
    double contention_beta = 0;          // >= 0
    double jitter_sigma = 0;             // lognormal sigma on service times
    double client_ingest_bw_per_node = 2.0 * 1024 * 1024 * 1024;
    std::uint64_t writeback_cap_per_node = 8ULL * 1024 * 1024 * 1024;
};

struct ClusterSpec {
    std::string name;
    int node_count = 0;
    int sockets_per_node = 0;
    int cores_per_socket = 0;
    std::uint64_t dram_per_node = 0;
    std::uint64_t bapm_per_node = 0;
    ParallelFsSpec parallel_fs;
    double network_bw_per_node = 0; // bytes/s
    double reboot_seconds = 0;
};

enum class PlatformMode { AppDirect, Memory };

struct Namespace {
    std::string id;
    std::uint64_t size = 0;
    int socket = 0; // kConcatenated merges both sockets into one device
    static constexpr int kConcatenated = -1;
    bool concatenated() const { return socket == kConcatenated; }
};

struct NodeConfiguration {
    PlatformMode mode = PlatformMode::AppDirect;
    std::uint64_t memory_space = 0;
    std::uint64_t appdirect_space = 0;
    std::vector<Namespace> namespaces;
};

enum class IoPattern { None, Local, Global, Mixed };
enum class Modifiable { Yes, Undesirable, No };
enum class Reuse { Streaming, Resident };

struct ApplicationProfile {
    std::string name;
    int processes = 1;
    std::uint64_t mem_footprint_per_process = 0;
    double mem_traffic_per_step = 0; // bytes per process per step
    double compute_seconds_per_step = 0;
    int steps = 1;
    int write_interval = 1; // steps between writes
    double write_bytes_per_process = 0;
    double write_bytes_growth_per_event = 0; // linear growth (MONC-style)
    int files_per_write_per_process = 0;
    IoPattern io_pattern = IoPattern::None;
    bool shared_file = false;
    Modifiable modifiable = Modifiable::No;
    bool io_perf_critical = false;
    bool memory_intensive = false;
    bool io_intensive = false;
    Reuse reuse = Reuse::Streaming;
    bool aliasing_pathology = false; // forces DRAM-cache hit fraction to 0
    bool async_io_servers = false;   // overlap writes with compute, depth 1
    bool writes_are_checkpoints = false;
};

struct DatasetSpec {
    enum class Home { ParallelFs, NodeLocal };
    std::string id;
    std::uint64_t size = 0;
    Home home = Home::ParallelFs;
};

struct WorkflowEdge {
    std::string producer;
    std::string dataset;
    std::string consumer;
};

enum class StorageTarget { None, ParallelFs, Fsdax, EphemeralFs, ObjectStore };

struct WorkflowJobSpec {
    std::string id;
    ApplicationProfile profile;
    int node_count = 1;
    NodeConfiguration config;
    StorageTarget storage = StorageTarget::None;
};

struct WorkflowSpec {
    std::vector<WorkflowJobSpec> jobs;
    std::vector<DatasetSpec> datasets;
    std::vector<WorkflowEdge> edges;
    std::map<std::string, bool> keep_flags; // dataset id -> persist at end
};

struct Violation {
    std::string field;
    std::string message;
};

struct Validation {
    std::vector<Violation> errors;
    std::vector<Violation> warnings;
    bool ok() const { return errors.empty(); }
    std::string describe() const;
};

Validation validate_cluster_spec(const ClusterSpec& spec);
Validation validate_profile(const ApplicationProfile& profile);
Validation validate_node_config(const NodeConfiguration& config, const ClusterSpec& spec);
Validation validate_workflow(const WorkflowSpec& wf);

struct PartitionResult {
    NodeConfiguration config;
    std::vector<Violation> warnings; // MemorySpaceUnusable is warning-level
};

/// Splits bapm_per_node into a Memory space and an AppDirect space
/// (appdirect_space = bapm_per_node - memory_space). Throws
/// SimError(OverCommit) when the requested sizes exceed capacity.
PartitionResult partition_bapm(const ClusterSpec& spec, PlatformMode mode,
                               std::uint64_t memory_space, std::vector<Namespace> namespaces);

/// Memory mode -> memory_space; AppDirect mode -> dram_per_node.
std::uint64_t effective_main_memory(const NodeConfiguration& config, const ClusterSpec& spec);

// --- JSON (declarative spec documents; byte quantities accept KB/MB/GB/TB,
// powers of 1024) ---
ClusterSpec cluster_from_json(const nlohmann::json& j);
nlohmann::json cluster_to_json(const ClusterSpec& spec);
ApplicationProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const ApplicationProfile& p);
NodeConfiguration node_config_from_json(const nlohmann::json& j);
nlohmann::json node_config_to_json(const NodeConfiguration& c);

const char* to_string(PlatformMode m);
const char* to_string(IoPattern p);
const char* to_string(Modifiable m);
const char* to_string(StorageTarget t);
StorageTarget storage_target_from_string(const std::string& s);

} // namespace bapmsim
