#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "bapmsim/domain.hpp"
#include "bapmsim/params.hpp"

namespace bapmsim::sim {

enum class EventKind {
    JobStart,
    StepComplete,
    WriteComplete,
    StageComplete,
    RebootComplete,
    PowerLoss,
    JobEnd,
    ServerAdvance, // internal: parallel-FS fluid state transition
};

const char* to_string(EventKind k);

/// Events dispatch in (time, seq) lexicographic order; seq is unique and
/// assigned at scheduling time, so simultaneous events run in insertion
/// order.
struct Event {
    double time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::JobStart;
    int job = -1;
    int node = -1;
    std::uint64_t tag = 0;
};

/// One job placed on concrete nodes.
struct JobRun {
    std::string id;
    ApplicationProfile profile;
    std::vector<int> nodes;
    NodeConfiguration config;
    StorageTarget storage = StorageTarget::None;
    bool stage_out_at_end = false; // copy outputs to the parallel FS after JobEnd
    double start_time = 0;
};

struct JobReport {
    std::string id;
    double start = 0;
    double end = 0;
    double wallclock = 0;
    int nodes = 0;
    double node_seconds = 0;
    std::vector<double> step_durations; // boundary-to-boundary, writes included
    double io_stall_seconds = 0;
    int writes = 0;
    double bytes_written = 0;
    bool aborted = false;
    bool resumed = false;
    int recomputed_steps = 0;
    double stage_out_end = -1;
};

struct StageRecord {
    std::string dataset;
    std::string from;
    std::string to;
    double bytes = 0;
    double start = 0;
    double end = 0;
};

struct DatasetReport {
    std::string id;
    double produced_bytes = 0;
    double staged_in = 0;  // bytes moved onto compute nodes
    double staged_out = 0; // bytes moved to the parallel FS
    std::string final_location;
    bool survived_power_loss = true;
};

struct IoLedgerRow {
    std::string job;
    int step = 0;
    std::string path;
    double bytes = 0;
    int files = 0;
    double start = 0;
    double end = 0;
};

struct SimReport {
    std::uint64_t rng_seed = 0;
    std::vector<JobReport> jobs;
    std::vector<DatasetReport> datasets;
    std::vector<StageRecord> stages;
    std::vector<IoLedgerRow> io_ledger;
    std::vector<Event> event_log; // public events only, dispatch order
    double fs_delivered_bytes = 0;
    double fs_busy_seconds = 0;
    double fs_max_drain_rate = 0;
    double horizon = 0;
    double total_node_seconds = 0;
    nlohmann::ordered_json to_json() const;
};

struct PowerLossSpec {
    double time = 0;
    std::vector<int> nodes;
};

struct WorkflowPolicies {
    bool prefer_colocation = true;
    bool force_parallel_fs = false;
};

class Simulation {
public:
    Simulation(ClusterSpec cluster, ModelParams params, std::uint64_t seed);

    void add_job(JobRun run);
    void set_workflow(const WorkflowSpec& wf, const WorkflowPolicies& policies);
    /// Pre-registers a power-loss event; time must be >= 0.
    void inject_power_loss(double time, std::vector<int> nodes);

    SimReport run();

private:
    struct Impl;
    ClusterSpec cluster_;
    ModelParams params_;
    std::uint64_t seed_;
    std::vector<JobRun> jobs_;
    std::optional<WorkflowSpec> workflow_;
    WorkflowPolicies policies_;
    std::vector<PowerLossSpec> power_losses_;
};

SimReport run_simulation(const ClusterSpec& cluster, const std::vector<JobRun>& jobs,
                         std::uint64_t seed, const ModelParams& params,
                         const std::optional<PowerLossSpec>& power_loss = std::nullopt);

struct WorkflowResult {
    SimReport report;
    double makespan = 0;
    int reboots = 0;
};

WorkflowResult schedule_workflow(const ClusterSpec& cluster, const WorkflowSpec& wf,
                                 const WorkflowPolicies& policies, std::uint64_t seed,
                                 const ModelParams& params);

struct EnsembleStats {
    double mean = 0;
    double min = 0;
    double max = 0;
    double spread_maxmin = 0;  // (max - min) / mean
    double spread_maxmean = 0; // (max - mean) / mean
};

struct Summary {
    struct JobLine {
        std::string id;
        double wallclock = 0;
        double mean_step = 0;
        double min_step = 0;
        double max_step = 0;
        double node_seconds = 0;
        double io_stall = 0;
    };
    std::vector<JobLine> jobs;
    EnsembleStats wallclock; // across jobs
    double total_node_seconds = 0;
    double fs_delivered_bytes = 0;
    double fs_utilization = 0; // busy fraction of the horizon
    std::string text(const ClusterSpec& cluster) const;
};

/// Per-job step statistics plus both ensemble spread definitions.
Summary summarize_results(const SimReport& report);

/// CSV: job_id, step, path, bytes, files, start_s, end_s.
std::string io_ledger_csv(const SimReport& report);
std::string summary_csv(const SimReport& report);
std::string timeline_csv(const SimReport& report);

} // namespace bapmsim::sim
