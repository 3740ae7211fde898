#include "bapmsim/advisor.hpp"

#include <sstream>

namespace bapmsim::adv {

namespace {

const char* yn(bool b) { return b ? "yes" : "no"; }

} // namespace

Recommendation recommend_platform_mode(const ApplicationProfile& p) {
    Recommendation rec;
    const bool io = p.io_intensive && p.io_pattern != IoPattern::None;
    rec.trail.emplace_back("memory intensive?", yn(p.memory_intensive));
    if (p.io_intensive && p.io_pattern == IoPattern::None) {
        rec.trail.emplace_back("I/O intensive?",
                               "flagged yes, but io_pattern is none; treated as no");
    } else {
        rec.trail.emplace_back("I/O intensive?", yn(p.io_intensive));
    }
    if (p.memory_intensive && !io)
        rec.platform = Platform::MemoryMode;
    else if (!p.memory_intensive && io)
        rec.platform = Platform::AppDirectMode;
    else if (p.memory_intensive && io)
        rec.platform = Platform::Mixed;
    else
        rec.platform = Platform::NoBapmNeeded;
    return rec;
}

Recommendation recommend_appdirect_strategy(const ApplicationProfile& p) {
    if (p.io_pattern == IoPattern::None)
        throw SimError(Err::PatternRequired, p.name + " declares no I/O pattern");
    Recommendation rec;
    rec.platform = Platform::AppDirectMode;
    rec.trail.emplace_back("I/O access pattern?", to_string(p.io_pattern));
    if (p.io_pattern == IoPattern::Local) {
        rec.strategy = Strategy::Fsdax;
        return rec;
    }
    // Global or mixed access needs a shared storage view. "Undesirable"
    // modifications follow the no-modification path.
    const bool can_modify = p.modifiable == Modifiable::Yes;
    rec.trail.emplace_back("code changes possible?", to_string(p.modifiable));
    if (!can_modify) {
        rec.strategy = Strategy::DistributedEphemeralFs;
        return rec;
    }
    rec.trail.emplace_back("I/O performance critical?", yn(p.io_perf_critical));
    rec.strategy =
        p.io_perf_critical ? Strategy::DirectAccess : Strategy::DistributedEphemeralFs;
    return rec;
}

Recommendation recommend(const ApplicationProfile& p) {
    Recommendation rec = recommend_platform_mode(p);
    if (rec.platform == Platform::AppDirectMode || rec.platform == Platform::Mixed) {
        Recommendation strat = recommend_appdirect_strategy(p);
        rec.strategy = strat.strategy;
        rec.trail.insert(rec.trail.end(), strat.trail.begin(), strat.trail.end());
    }
    return rec;
}

const char* to_string(Platform p) {
    switch (p) {
        case Platform::MemoryMode: return "Memory mode";
        case Platform::AppDirectMode: return "AppDirect mode";
        case Platform::Mixed: return "Mixed (Memory + AppDirect spaces)";
        case Platform::NoBapmNeeded: return "No B-APM needed";
    }
    return "?";
}

const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::Fsdax: return "fsdax node-local storage";
        case Strategy::DistributedEphemeralFs: return "distributed ephemeral file system";
        case Strategy::DirectAccess: return "direct access (application-managed)";
    }
    return "?";
}

std::string describe(const Recommendation& rec) {
    std::ostringstream os;
    os << "recommendation: " << to_string(rec.platform);
    if (rec.strategy) os << " + " << to_string(*rec.strategy);
    os << "\n";
    for (const auto& [q, a] : rec.trail) os << "  " << q << " " << a << "\n";
    return os.str();
}

} // namespace bapmsim::adv
