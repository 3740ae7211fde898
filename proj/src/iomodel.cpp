#include "bapmsim/iomodel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace bapmsim::io {

Validation validate(const FsdaxParams& p) {
    Validation v;
    if (p.bw_per_device <= 0) v.errors.push_back({"bw_per_device", "must be > 0"});
    if (p.meta_cost_per_file < 0) v.errors.push_back({"meta_cost_per_file", "must be >= 0"});
    if (p.numa_cross_penalty < 1) v.errors.push_back({"numa_cross_penalty", "must be >= 1"});
    return v;
}

Validation validate(const EphemeralFsParams& p) {
    Validation v;
    if (p.chunk_size == 0) v.errors.push_back({"chunk_size", "must be > 0"});
    if (p.per_node_bw_read <= 0 || p.per_node_bw_write <= 0)
        v.errors.push_back({"per_node_bw", "must be > 0"});
    if (p.network_cap_per_client <= 0) v.errors.push_back({"network_cap", "must be > 0"});
    if (p.hard_write_serialization <= 0 || p.hard_write_serialization > 1)
        v.errors.push_back({"hard_write_serialization", "must be in (0,1]"});
    if (p.hard_read_factor <= 0 || p.hard_read_factor > 1)
        v.errors.push_back({"hard_read_factor", "must be in (0,1]"});
    return v;
}

Validation validate(const ObjectStoreParams& p) {
    Validation v;
    if (p.per_server_bw <= 0) v.errors.push_back({"per_server_bw", "must be > 0"});
    if (p.scaling_efficiency <= 0 || p.scaling_efficiency > 1)
        v.errors.push_back({"scaling_efficiency", "must be in (0,1]"});
    return v;
}

double fsdax_write_time(double bytes_per_device, int files_per_device, bool cross_numa,
                        const FsdaxParams& p) {
    const double penalty = cross_numa ? p.numa_cross_penalty : 1.0;
    return bytes_per_device / (p.bw_per_device / penalty) +
           double(files_per_device) * p.meta_cost_per_file;
}

std::vector<std::uint64_t> ChunkLayout::loads() const {
    std::vector<std::uint64_t> out(std::size_t(node_count), 0);
    for (std::uint64_t i = 0; i < chunk_count; ++i) out[std::size_t(node_of(i))]++;
    return out;
}

ChunkLayout ephemeralfs_layout(std::uint64_t file_size, int node_count,
                               const EphemeralFsParams& p) {
    if (node_count < 1) throw SimError(Err::BadInput, "node_count must be >= 1");
    ChunkLayout l;
    l.node_count = node_count;
    l.chunk_count = (file_size + p.chunk_size - 1) / p.chunk_size;
    return l;
}

double ephemeralfs_throughput(int clients, int nodes, IorAccess access,
                              const EphemeralFsParams& p) {
    if (nodes < 1) throw SimError(Err::BadInput, "nodes must be >= 1");
    const double net = double(clients) * p.network_cap_per_client;
    const double base_r = std::min(double(nodes) * p.per_node_bw_read, net);
    const double base_w = std::min(double(nodes) * p.per_node_bw_write, net);
    switch (access) {
        case IorAccess::EasyRead: return base_r;
        case IorAccess::EasyWrite: return base_w;
        case IorAccess::HardRead: return base_r * p.hard_read_factor;
        case IorAccess::HardWrite: return base_w * p.hard_write_serialization;
    }
    return 0;
}

double objectstore_write_throughput(int server_processes, const ObjectStoreParams& p) {
    if (server_processes < 1) throw SimError(Err::BadInput, "server_processes must be >= 1");
    const double s = double(server_processes);
    return p.per_server_bw * s * std::pow(p.scaling_efficiency, std::log2(s));
}

// --------------------------- ParallelFsServer -----------------------------

ParallelFsServer::ParallelFsServer(const ParallelFsSpec& fs, double bytes_epsilon)
    : fs_(fs), eps_(bytes_epsilon) {}

int ParallelFsServer::add_writer(int nodes, double net_bw) {
    Writer w;
    w.nodes = nodes;
    w.ingest_bw = fs_.client_ingest_bw_per_node * nodes;
    w.cap = double(fs_.writeback_cap_per_node) * nodes;
    w.net_bw = net_bw;
    writers_.push_back(w);
    return int(writers_.size()) - 1;
}

void ParallelFsServer::push_dirty(Writer& w, std::size_t req, double bytes) {
    if (bytes <= 0) return;
    if (req == kAnon && !w.drain_fifo.empty() && w.drain_fifo.back().req == kAnon) {
        w.drain_fifo.back().remaining += bytes;
    } else {
        w.drain_fifo.push_back({req, bytes});
    }
    w.backlog += bytes;
}

void ParallelFsServer::submit(std::uint64_t req_id, int writer, Kind kind, double bytes, int files,
                              double now, double jitter_mult) {
    assert(now + 1e-9 >= now_);
    if (now > now_) {
        auto done = advance_to(now);
        unclaimed_.insert(unclaimed_.end(), done.begin(), done.end());
    }
    Request r;
    r.id = req_id;
    r.writer = writer;
    r.kind = kind;
    Writer& w = writers_[std::size_t(writer)];
    const double eff = bytes * jitter_mult;
    const double meta_start = std::max(now, w.meta_free_at);
    const double meta_len =
        files > 0 ? double(files) / fs_.metadata_ops_per_second * jitter_mult : 0.0;
    r.meta_done = meta_start + meta_len;
    w.meta_free_at = r.meta_done;
    requests_.push_back(r);
    const std::size_t idx = requests_.size() - 1;
    if (kind == Kind::WriteBack) {
        requests_[idx].remaining_ingest = eff;
        if (eff <= 0) {
            requests_[idx].data_done = now;
            pending_.push_back(idx);
        } else {
            w.ingest_queue.push_back(idx);
        }
    } else {
        if (eff <= 0) {
            requests_[idx].data_done = now;
            pending_.push_back(idx);
        } else {
            push_dirty(w, idx, eff);
        }
    }
}

std::vector<ParallelFsServer::Rates> ParallelFsServer::current_rates() const {
    std::vector<Rates> rates(writers_.size());
    int n = 0;
    for (std::size_t i = 0; i < writers_.size(); ++i) {
        const Writer& w = writers_[i];
        rates[i].active = w.backlog > eps_ || !w.ingest_queue.empty();
        if (rates[i].active) ++n;
    }
    if (n == 0) return rates;
    const double d = 1.0 / (1.0 + fs_.contention_beta * double(n - 1));
    const double share = fs_.aggregate_bw * d / double(n);
    for (std::size_t i = 0; i < writers_.size(); ++i) {
        const Writer& w = writers_[i];
        if (!rates[i].active) continue;
        double drain = std::min(share, w.net_bw);
        double ingest = 0;
        if (!w.ingest_queue.empty()) {
            if (w.backlog >= w.cap - eps_) {
                ingest = drain; // room frees only as data drains
            } else {
                ingest = w.ingest_bw;
            }
        }
        if (w.backlog <= eps_) drain = std::min(drain, ingest); // passthrough
        rates[i].ingest = ingest;
        rates[i].drain = drain;
    }
    return rates;
}

double ParallelFsServer::next_transition(double now) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p : pending_) {
        if (!requests_[p].emitted) best = std::min(best, requests_[p].meta_done);
    }
    auto rates = current_rates();
    for (std::size_t i = 0; i < writers_.size(); ++i) {
        const Writer& w = writers_[i];
        const Rates& r = rates[i];
        if (!r.active) continue;
        if (!w.ingest_queue.empty() && r.ingest > 0) {
            const Request& req = requests_[w.ingest_queue.front()];
            best = std::min(best, now + req.remaining_ingest / r.ingest);
        }
        if (r.ingest > r.drain && w.backlog < w.cap - eps_) {
            best = std::min(best, now + (w.cap - w.backlog) / (r.ingest - r.drain));
        }
        if (!w.drain_fifo.empty() && r.drain > 0) {
            best = std::min(best, now + w.drain_fifo.front().remaining / r.drain);
        }
    }
    return std::max(best, now);
}

std::vector<ParallelFsServer::Completion> ParallelFsServer::advance_to(double t) {
    std::vector<Completion> out;
    std::swap(out, unclaimed_);
    auto emit_pending = [&](double upto) {
        // Emit data-done requests whose metadata has also finished by `upto`.
        for (std::size_t p : pending_) {
            Request& r = requests_[p];
            if (r.emitted) continue;
            const double done = std::max(r.data_done, r.meta_done);
            if (done <= upto + 1e-12) {
                r.emitted = true;
                out.push_back({r.id, done});
            }
        }
    };

    int guard = 0;
    while (now_ < t - 1e-12) {
        if (++guard > 1000000) throw SimError(Err::BadInput, "fs server failed to converge");
        auto rates = current_rates();
        double dt = t - now_;
        bool any_active = false;
        for (std::size_t i = 0; i < writers_.size(); ++i) {
            const Writer& w = writers_[i];
            const Rates& r = rates[i];
            if (!r.active) continue;
            any_active = true;
            if (!w.ingest_queue.empty() && r.ingest > 0)
                dt = std::min(dt, requests_[w.ingest_queue.front()].remaining_ingest / r.ingest);
            if (r.ingest > r.drain && w.backlog < w.cap - eps_)
                dt = std::min(dt, (w.cap - w.backlog) / (r.ingest - r.drain));
            if (!w.drain_fifo.empty() && r.drain > 0)
                dt = std::min(dt, w.drain_fifo.front().remaining / r.drain);
        }
        if (!any_active) {
            now_ = t;
            break;
        }
        dt = std::max(dt, 0.0);
        // Integrate.
        double slice_drain = 0;
        for (std::size_t i = 0; i < writers_.size(); ++i) {
            Writer& w = writers_[i];
            const Rates& r = rates[i];
            if (!r.active) continue;
            slice_drain += r.drain;
            // Ingest into the dirty buffer.
            if (!w.ingest_queue.empty() && r.ingest > 0) {
                const std::size_t ri = w.ingest_queue.front();
                Request& req = requests_[ri];
                const double moved = std::min(req.remaining_ingest, r.ingest * dt);
                req.remaining_ingest -= moved;
                push_dirty(w, kAnon, moved);
                if (req.remaining_ingest <= eps_) {
                    push_dirty(w, kAnon, req.remaining_ingest);
                    req.remaining_ingest = 0;
                    req.data_done = now_ + dt;
                    pending_.push_back(ri);
                    w.ingest_queue.pop_front();
                }
            }
            // Drain from the head of the FIFO.
            double to_drain = r.drain * dt;
            delivered_bytes_ += std::min(to_drain, w.backlog);
            while (to_drain > 0 && !w.drain_fifo.empty()) {
                Segment& seg = w.drain_fifo.front();
                const double moved = std::min(seg.remaining, to_drain);
                seg.remaining -= moved;
                w.backlog -= moved;
                to_drain -= moved;
                if (seg.remaining <= eps_) {
                    w.backlog -= seg.remaining;
                    if (seg.req != kAnon) {
                        requests_[seg.req].data_done = now_ + dt;
                        pending_.push_back(seg.req);
                    }
                    w.drain_fifo.pop_front();
                } else {
                    break;
                }
            }
            if (w.backlog < 0) w.backlog = 0;
        }
        max_drain_rate_seen_ = std::max(max_drain_rate_seen_, slice_drain);
        busy_seconds_ += dt;
        now_ += dt;
    }
    now_ = std::max(now_, t);
    emit_pending(t);
    // Drop emitted entries.
    std::erase_if(pending_, [&](std::size_t p) { return requests_[p].emitted; });
    std::stable_sort(out.begin(), out.end(), [](const Completion& a, const Completion& b) {
        return a.time < b.time;
    });
    return out;
}

bool ParallelFsServer::idle() const {
    if (!pending_.empty()) return false;
    for (const auto& w : writers_) {
        if (w.backlog > eps_ || !w.ingest_queue.empty()) return false;
    }
    return true;
}

std::vector<double> parallelfs_service(
    const std::vector<std::tuple<double, int, double>>& requests, const ParallelFsSpec& fs) {
    ParallelFsServer server(fs);
    std::vector<double> completions(requests.size(), 0.0);
    std::vector<std::size_t> order(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::get<2>(requests[a]) < std::get<2>(requests[b]);
    });
    for (std::size_t i = 0; i < requests.size(); ++i) server.add_writer(1);
    double now = 0;
    std::size_t next = 0;
    auto collect = [&](const std::vector<ParallelFsServer::Completion>& done) {
        for (const auto& c : done) completions[std::size_t(c.req_id)] = c.time;
    };
    while (next < order.size() || !server.idle()) {
        const double t_submit = next < order.size() ? std::get<2>(requests[order[next]])
                                                    : std::numeric_limits<double>::infinity();
        const double t_trans = server.next_transition(now);
        if (t_submit <= t_trans) {
            collect(server.advance_to(t_submit));
            const std::size_t i = order[next];
            server.submit(i, int(i), ParallelFsServer::Kind::Drain, std::get<0>(requests[i]),
                          std::get<1>(requests[i]), t_submit);
            now = t_submit;
            ++next;
        } else if (std::isfinite(t_trans)) {
            collect(server.advance_to(t_trans));
            now = t_trans;
        } else {
            break;
        }
    }
    return completions;
}

} // namespace bapmsim::io
