#include "bapmsim/domain.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "bapmsim/units.hpp"

namespace bapmsim {

std::string Validation::describe() const {
    std::ostringstream os;
    for (const auto& e : errors) os << e.field << ": " << e.message << "\n";
    for (const auto& w : warnings) os << "warning: " << w.field << ": " << w.message << "\n";
    return os.str();
}

Validation validate_cluster_spec(const ClusterSpec& s) {
    Validation v;
    auto err = [&](const char* f, const std::string& m) { v.errors.push_back({f, m}); };
    if (s.node_count < 1) err("node_count", "must be >= 1");
    if (s.sockets_per_node < 1) err("sockets_per_node", "must be >= 1");
    if (s.cores_per_socket < 1) err("cores_per_socket", "must be >= 1");
    if (s.dram_per_node == 0) err("dram_per_node", "must be > 0");
    if (s.bapm_per_node == 0) err("bapm_per_node", "must be > 0");
    if (s.network_bw_per_node <= 0) err("network_bw_per_node", "must be > 0");
    if (s.reboot_seconds < 0) err("reboot_seconds", "must be >= 0");
    if (s.parallel_fs.capacity == 0) err("parallel_fs.capacity", "must be > 0");
    if (s.parallel_fs.aggregate_bw <= 0) err("parallel_fs.aggregate_bw", "must be > 0");
    if (s.parallel_fs.metadata_ops_per_second <= 0)
        err("parallel_fs.metadata_ops_per_second", "must be > 0");
    if (s.parallel_fs.contention_beta < 0) err("parallel_fs.contention_beta", "must be >= 0");
    if (s.parallel_fs.jitter_sigma < 0) err("parallel_fs.jitter_sigma", "must be >= 0");
    if (s.parallel_fs.client_ingest_bw_per_node <= 0)
        err("parallel_fs.client_ingest_bw_per_node", "must be > 0");
    return v;
}

Validation validate_profile(const ApplicationProfile& p) {
    Validation v;
    auto err = [&](const char* f, const std::string& m) { v.errors.push_back({f, m}); };
    if (p.processes < 1) err("processes", "must be >= 1");
    if (p.steps < 1) err("steps", "must be >= 1");
    if (p.compute_seconds_per_step < 0) err("compute_seconds_per_step", "must be >= 0");
    if (p.mem_traffic_per_step < 0) err("mem_traffic_per_step", "must be >= 0");
    if (p.write_bytes_per_process < 0) err("write_bytes_per_process", "must be >= 0");
    if (p.io_pattern != IoPattern::None && p.write_interval < 1)
        err("write_interval", "must be >= 1 when io_pattern is not none");
    if (p.files_per_write_per_process < 0) err("files_per_write_per_process", "must be >= 0");
    return v;
}

Validation validate_node_config(const NodeConfiguration& c, const ClusterSpec& s) {
    Validation v;
    std::uint64_t ns_total = 0;
    std::map<int, std::uint64_t> per_socket;
    for (const auto& ns : c.namespaces) {
        if (ns.size == 0) v.errors.push_back({"namespace." + ns.id, "size must be > 0"});
        if (!ns.concatenated() && (ns.socket < 0 || ns.socket >= s.sockets_per_node))
            v.errors.push_back({"namespace." + ns.id, "socket index out of range"});
        ns_total += ns.size;
        if (!ns.concatenated()) per_socket[ns.socket] += ns.size;
    }
    if (c.memory_space + c.appdirect_space > s.bapm_per_node)
        v.errors.push_back({"memory_space", "memory + appdirect spaces exceed bapm_per_node"});
    if (ns_total > c.appdirect_space)
        v.errors.push_back({"namespaces", "namespace sizes exceed the AppDirect space"});
    if (c.mode == PlatformMode::AppDirect && c.memory_space > 0)
        v.warnings.push_back(
            {"memory_space", "MemorySpaceUnusable: Memory space is inaccessible in AppDirect mode"});
    if (per_socket.size() > 1) {
        auto [mn, mx] = std::minmax_element(
            per_socket.begin(), per_socket.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
        if (mn->second != mx->second)
            v.warnings.push_back({"namespaces", "asymmetric per-socket namespace sizes"});
    }
    return v;
}

Validation validate_workflow(const WorkflowSpec& wf) {
    Validation v;
    std::set<std::string> job_ids;
    for (const auto& j : wf.jobs) {
        if (!job_ids.insert(j.id).second)
            v.errors.push_back({"jobs", "duplicate job id " + j.id});
    }
    std::map<std::string, std::string> producer_of;
    for (const auto& e : wf.edges) {
        if (!job_ids.count(e.producer))
            v.errors.push_back({"edges", "unknown producer " + e.producer});
        if (!job_ids.count(e.consumer))
            v.errors.push_back({"edges", "unknown consumer " + e.consumer});
        auto it = producer_of.find(e.dataset);
        if (it != producer_of.end() && it->second != e.producer)
            v.errors.push_back({"edges", "dataset " + e.dataset + " has more than one producer"});
        producer_of[e.dataset] = e.producer;
    }
    // Cycle check over job-to-job dependencies.
    std::map<std::string, std::vector<std::string>> succ;
    std::map<std::string, int> indeg;
    for (const auto& j : wf.jobs) indeg[j.id] = 0;
    for (const auto& e : wf.edges) {
        succ[e.producer].push_back(e.consumer);
        indeg[e.consumer]++;
    }
    std::queue<std::string> q;
    for (auto& [id, d] : indeg)
        if (d == 0) q.push(id);
    std::size_t seen = 0;
    while (!q.empty()) {
        auto id = q.front();
        q.pop();
        ++seen;
        for (const auto& nxt : succ[id])
            if (--indeg[nxt] == 0) q.push(nxt);
    }
    if (seen != wf.jobs.size()) v.errors.push_back({"edges", "workflow graph has a cycle"});
    return v;
}

PartitionResult partition_bapm(const ClusterSpec& spec, PlatformMode mode,
                               std::uint64_t memory_space, std::vector<Namespace> namespaces) {
    std::uint64_t ns_total = 0;
    for (const auto& ns : namespaces) ns_total += ns.size;
    if (memory_space > spec.bapm_per_node || memory_space + ns_total > spec.bapm_per_node) {
        throw SimError(Err::OverCommit,
                       "requested " + units::format_bytes(double(memory_space) + double(ns_total)) +
                           " from " + units::format_bytes(double(spec.bapm_per_node)) +
                           " of B-APM");
    }
    NodeConfiguration cfg;
    cfg.mode = mode;
    cfg.memory_space = memory_space;
    cfg.appdirect_space = spec.bapm_per_node - memory_space;
    cfg.namespaces = std::move(namespaces);
    PartitionResult res{cfg, {}};
    auto v = validate_node_config(cfg, spec);
    res.warnings = v.warnings;
    return res;
}

std::uint64_t effective_main_memory(const NodeConfiguration& config, const ClusterSpec& spec) {
    return config.mode == PlatformMode::Memory ? config.memory_space : spec.dram_per_node;
}

// ------------------------------ JSON -------------------------------------

namespace {

using nlohmann::json;

PlatformMode mode_from_string(const std::string& s) {
    if (s == "memory") return PlatformMode::Memory;
    if (s == "appdirect") return PlatformMode::AppDirect;
    throw SimError(Err::BadInput, "unknown platform mode '" + s + "'");
}

IoPattern pattern_from_string(const std::string& s) {
    if (s == "none") return IoPattern::None;
    if (s == "local") return IoPattern::Local;
    if (s == "global") return IoPattern::Global;
    if (s == "mixed") return IoPattern::Mixed;
    throw SimError(Err::BadInput, "unknown io_pattern '" + s + "'");
}

Modifiable modifiable_from_string(const std::string& s) {
    if (s == "yes") return Modifiable::Yes;
    if (s == "undesirable") return Modifiable::Undesirable;
    if (s == "no" || s == "n/a") return Modifiable::No;
    throw SimError(Err::BadInput, "unknown modifiable value '" + s + "'");
}

} // namespace

ClusterSpec cluster_from_json(const nlohmann::json& j) {
    ClusterSpec s;
    s.name = j.value("name", "cluster");
    s.node_count = j.at("node_count").get<int>();
    s.sockets_per_node = j.at("sockets_per_node").get<int>();
    s.cores_per_socket = j.at("cores_per_socket").get<int>();
    s.dram_per_node = units::bytes_field(j.at("dram_per_node"));
    s.bapm_per_node = units::bytes_field(j.at("bapm_per_node"));
    s.network_bw_per_node = units::rate_field(j.at("network_bw_per_node"));
    s.reboot_seconds = j.value("reboot_seconds", 0.0);
    const auto& fs = j.at("parallel_fs");
    s.parallel_fs.capacity = units::bytes_field(fs.at("capacity"));
    s.parallel_fs.aggregate_bw = units::rate_field(fs.at("aggregate_bw"));
    s.parallel_fs.metadata_ops_per_second = fs.at("metadata_ops_per_second").get<double>();
    s.parallel_fs.contention_beta = fs.value("contention_beta", 0.0);
    s.parallel_fs.jitter_sigma = fs.value("jitter_sigma", 0.0);
    if (fs.contains("client_ingest_bw_per_node"))
        s.parallel_fs.client_ingest_bw_per_node =
            units::rate_field(fs.at("client_ingest_bw_per_node"));
    if (fs.contains("writeback_cap_per_node"))
        s.parallel_fs.writeback_cap_per_node = units::bytes_field(fs.at("writeback_cap_per_node"));
    return s;
}

nlohmann::json cluster_to_json(const ClusterSpec& s) {
    return json{{"name", s.name},
                {"node_count", s.node_count},
                {"sockets_per_node", s.sockets_per_node},
                {"cores_per_socket", s.cores_per_socket},
                {"dram_per_node", s.dram_per_node},
                {"bapm_per_node", s.bapm_per_node},
                {"network_bw_per_node", s.network_bw_per_node},
                {"reboot_seconds", s.reboot_seconds},
                {"parallel_fs",
                 {{"capacity", s.parallel_fs.capacity},
                  {"aggregate_bw", s.parallel_fs.aggregate_bw},
                  {"metadata_ops_per_second", s.parallel_fs.metadata_ops_per_second},
                  {"contention_beta", s.parallel_fs.contention_beta},
                  {"jitter_sigma", s.parallel_fs.jitter_sigma},
                  {"client_ingest_bw_per_node", s.parallel_fs.client_ingest_bw_per_node},
                  {"writeback_cap_per_node", s.parallel_fs.writeback_cap_per_node}}}};
}

ApplicationProfile profile_from_json(const nlohmann::json& j) {
    ApplicationProfile p;
    p.name = j.value("name", "app");
    p.processes = j.value("processes", 1);
    if (j.contains("mem_footprint_per_process"))
        p.mem_footprint_per_process = units::bytes_field(j.at("mem_footprint_per_process"));
    if (j.contains("mem_traffic_per_step"))
        p.mem_traffic_per_step = units::rate_field(j.at("mem_traffic_per_step"));
    p.compute_seconds_per_step = j.value("compute_seconds_per_step", 0.0);
    p.steps = j.value("steps", 1);
    p.write_interval = j.value("write_interval", 1);
    if (j.contains("write_bytes_per_process"))
        p.write_bytes_per_process = units::rate_field(j.at("write_bytes_per_process"));
    if (j.contains("write_bytes_growth_per_event"))
        p.write_bytes_growth_per_event = units::rate_field(j.at("write_bytes_growth_per_event"));
    p.files_per_write_per_process = j.value("files_per_write_per_process", 0);
    p.io_pattern = pattern_from_string(j.value("io_pattern", "none"));
    p.shared_file = j.value("shared_file", false);
    p.modifiable = modifiable_from_string(j.value("modifiable", "no"));
    p.io_perf_critical = j.value("io_perf_critical", false);
    p.memory_intensive = j.value("memory_intensive", false);
    p.io_intensive = j.value("io_intensive", false);
    p.reuse = j.value("reuse", "streaming") == std::string("resident") ? Reuse::Resident
                                                                       : Reuse::Streaming;
    p.aliasing_pathology = j.value("aliasing_pathology", false);
    p.async_io_servers = j.value("async_io_servers", false);
    p.writes_are_checkpoints = j.value("writes_are_checkpoints", false);
    return p;
}

nlohmann::json profile_to_json(const ApplicationProfile& p) {
    return json{{"name", p.name},
                {"processes", p.processes},
                {"mem_footprint_per_process", p.mem_footprint_per_process},
                {"mem_traffic_per_step", p.mem_traffic_per_step},
                {"compute_seconds_per_step", p.compute_seconds_per_step},
                {"steps", p.steps},
                {"write_interval", p.write_interval},
                {"write_bytes_per_process", p.write_bytes_per_process},
                {"write_bytes_growth_per_event", p.write_bytes_growth_per_event},
                {"files_per_write_per_process", p.files_per_write_per_process},
                {"io_pattern", to_string(p.io_pattern)},
                {"shared_file", p.shared_file},
                {"modifiable", to_string(p.modifiable)},
                {"io_perf_critical", p.io_perf_critical},
                {"memory_intensive", p.memory_intensive},
                {"io_intensive", p.io_intensive},
                {"reuse", p.reuse == Reuse::Resident ? "resident" : "streaming"},
                {"aliasing_pathology", p.aliasing_pathology},
                {"async_io_servers", p.async_io_servers},
                {"writes_are_checkpoints", p.writes_are_checkpoints}};
}

NodeConfiguration node_config_from_json(const nlohmann::json& j) {
    NodeConfiguration c;
    c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.memory_space = j.contains("memory_space") ? units::bytes_field(j.at("memory_space")) : 0;
    c.appdirect_space =
        j.contains("appdirect_space") ? units::bytes_field(j.at("appdirect_space")) : 0;
    if (j.contains("namespaces")) {
        for (const auto& n : j.at("namespaces")) {
            Namespace ns;
            ns.id = n.value("id", "pmem");
            ns.size = units::bytes_field(n.at("size"));
            if (n.contains("socket") && n.at("socket").is_string())
                ns.socket = Namespace::kConcatenated;
            else
                ns.socket = n.value("socket", 0);
            c.namespaces.push_back(ns);
        }
    }
    return c;
}

nlohmann::json node_config_to_json(const NodeConfiguration& c) {
    json ns = json::array();
    for (const auto& n : c.namespaces) {
        json e{{"id", n.id}, {"size", n.size}};
        if (n.concatenated())
            e["socket"] = "concatenated";
        else
            e["socket"] = n.socket;
        ns.push_back(e);
    }
    return json{{"mode", to_string(c.mode)},
                {"memory_space", c.memory_space},
                {"appdirect_space", c.appdirect_space},
                {"namespaces", ns}};
}

const char* to_string(PlatformMode m) {
    return m == PlatformMode::Memory ? "memory" : "appdirect";
}

const char* to_string(IoPattern p) {
    switch (p) {
        case IoPattern::None: return "none";
        case IoPattern::Local: return "local";
        case IoPattern::Global: return "global";
        case IoPattern::Mixed: return "mixed";
    }
    return "?";
}

const char* to_string(Modifiable m) {
    switch (m) {
        case Modifiable::Yes: return "yes";
        case Modifiable::Undesirable: return "undesirable";
        case Modifiable::No: return "no";
    }
    return "?";
}

const char* to_string(StorageTarget t) {
    switch (t) {
        case StorageTarget::None: return "none";
        case StorageTarget::ParallelFs: return "parallelfs";
        case StorageTarget::Fsdax: return "fsdax";
        case StorageTarget::EphemeralFs: return "ephemeralfs";
        case StorageTarget::ObjectStore: return "objectstore";
    }
    return "?";
}

StorageTarget storage_target_from_string(const std::string& s) {
    if (s == "none") return StorageTarget::None;
    if (s == "parallelfs" || s == "lustre") return StorageTarget::ParallelFs;
    if (s == "fsdax") return StorageTarget::Fsdax;
    if (s == "ephemeralfs") return StorageTarget::EphemeralFs;
    if (s == "objectstore") return StorageTarget::ObjectStore;
    throw SimError(Err::BadInput, "unknown storage target '" + s + "'");
}

} // namespace bapmsim
